use serde::{Deserialize, Serialize};

use super::{Radius, Shape};
use crate::error::{Error, Result};

/// A type label. Geometric families carry the radius and shape they were
/// generated from; relation types carry neither.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeLabel {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<Radius>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<Shape>,
}

impl TypeLabel {
    pub fn relation(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            radius: None,
            shape: Some(Shape::Relation),
        }
    }

    pub fn geometric(shape: Shape, radius: Radius) -> Self {
        let label = match shape {
            Shape::Disk | Shape::Relation => radius.to_string(),
            _ => format!("{}-{}", shape.tag(), radius),
        };
        Self {
            label,
            radius: Some(radius),
            shape: Some(shape),
        }
    }
}

/// Partial order on type labels.
///
/// Only the transitive reduction of the supplied pairs is kept; `leq` answers
/// from the reflexive-transitive closure computed once at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TypePoset {
    labels: Vec<TypeLabel>,
    covers: Vec<(usize, usize)>,
    closure: Vec<Vec<bool>>,
}

impl TypePoset {
    // index loops read best for Warshall
    #[allow(clippy::needless_range_loop)]
    pub fn new(labels: Vec<TypeLabel>, order: &[(usize, usize)]) -> Result<Self> {
        let n = labels.len();
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].iter().any(|o| o.label == l.label) {
                return Err(Error::DuplicateType(l.label.clone()));
            }
        }
        let mut closure = vec![vec![false; n]; n];
        for (i, row) in closure.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(p, q) in order {
            if p >= n || q >= n {
                return Err(Error::UnknownType(format!("#{}", p.max(q))));
            }
            closure[p][q] = true;
        }
        // Warshall
        for k in 0..n {
            for i in 0..n {
                if closure[i][k] {
                    for j in 0..n {
                        if closure[k][j] {
                            closure[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if closure[i][j] && closure[j][i] {
                    return Err(Error::CyclicOrder(labels[i].label.clone()));
                }
            }
        }
        let mut covers = Vec::new();
        for p in 0..n {
            for q in 0..n {
                if p == q || !closure[p][q] {
                    continue;
                }
                let implied = (0..n).any(|m| m != p && m != q && closure[p][m] && closure[m][q]);
                if !implied {
                    covers.push((p, q));
                }
            }
        }
        Ok(Self {
            labels,
            covers,
            closure,
        })
    }

    /// Build from labels and label pairs.
    pub fn from_label_pairs(labels: Vec<TypeLabel>, order: &[(String, String)]) -> Result<Self> {
        let find = |name: &str| {
            labels
                .iter()
                .position(|l| l.label == name)
                .ok_or_else(|| Error::UnknownType(name.to_string()))
        };
        let pairs = order
            .iter()
            .map(|(p, q)| Ok((find(p)?, find(q)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(labels, &pairs)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[TypeLabel] {
        &self.labels
    }

    pub fn get(&self, p: usize) -> &TypeLabel {
        &self.labels[p]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l.label == label)
    }

    /// Transitive reduction of the order.
    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn leq(&self, p: usize, q: usize) -> bool {
        self.closure[p][q]
    }

    /// All strictly ordered pairs `p < q` of the closed order.
    pub fn strict_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.len();
        (0..n).flat_map(move |p| {
            (0..n).filter_map(move |q| (p != q && self.closure[p][q]).then_some((p, q)))
        })
    }
}
