//! Reference DBSCAN and its comparison with transitive closures of
//! metric-disk spaces.

use serde::{Deserialize, Serialize};

use crate::closure::tr_point;
use crate::error::{Error, Result};
use crate::space::{Coord2, PointSet, Shape, TypedSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Core,
    Border,
    Noise,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DbscanResult {
    /// Cluster number per point; clusters are numbered by smallest member.
    pub labels: Vec<Option<usize>>,
    pub roles: Vec<Role>,
    pub eps: f64,
    pub min_pts: usize,
}

impl DbscanResult {
    pub fn cluster_count(&self) -> usize {
        self.labels.iter().flatten().max().map_or(0, |m| m + 1)
    }

    pub fn cluster(&self, c: usize) -> PointSet {
        (0..self.labels.len())
            .filter(|&y| self.labels[y] == Some(c))
            .collect()
    }
}

/// Classic DBSCAN with `d < eps` neighborhoods (the point itself counts
/// toward `min_pts`). Clusters grow only through core points.
pub fn dbscan_classify(points: &[Coord2], eps: f64, min_pts: usize) -> Result<DbscanResult> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eps {eps} must be positive"
        )));
    }
    let mut res = classify_sq(points, eps * eps, min_pts)?;
    res.eps = eps;
    Ok(res)
}

fn classify_sq(points: &[Coord2], eps_sq: f64, min_pts: usize) -> Result<DbscanResult> {
    if min_pts == 0 {
        return Err(Error::InvalidParameter("minPts must be at least 1".into()));
    }
    let n = points.len();
    let neighbors: Vec<Vec<usize>> = (0..n)
        .map(|x| {
            (0..n)
                .filter(|&y| points[x].dist_sq(&points[y]) < eps_sq)
                .collect()
        })
        .collect();
    let core: Vec<bool> = neighbors.iter().map(|nb| nb.len() >= min_pts).collect();
    let mut labels = vec![None; n];
    let mut next = 0;
    // seeding in index order numbers clusters by their smallest core point;
    // renumbered below by smallest member
    for x in 0..n {
        if !core[x] || labels[x].is_some() {
            continue;
        }
        labels[x] = Some(next);
        let mut stack = vec![x];
        while let Some(y) = stack.pop() {
            for &z in &neighbors[y] {
                if labels[z].is_none() {
                    labels[z] = Some(next);
                    if core[z] {
                        stack.push(z);
                    }
                }
            }
        }
        next += 1;
    }
    let mut first: Vec<(usize, usize)> = Vec::new();
    for (y, l) in labels.iter().enumerate() {
        if let Some(c) = *l {
            if !first.iter().any(|&(cc, _)| cc == c) {
                first.push((c, y));
            }
        }
    }
    // `first` is already ordered by smallest member
    let renumber: std::collections::BTreeMap<usize, usize> = first
        .iter()
        .enumerate()
        .map(|(new, &(old, _))| (old, new))
        .collect();
    let labels: Vec<Option<usize>> = labels.iter().map(|l| l.map(|c| renumber[&c])).collect();
    let roles = (0..n)
        .map(|y| {
            if core[y] {
                Role::Core
            } else if labels[y].is_some() {
                Role::Border
            } else {
                Role::Noise
            }
        })
        .collect();
    Ok(DbscanResult {
        labels,
        roles,
        eps: eps_sq.sqrt(),
        min_pts,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SetRelation {
    Equal,
    ProperSubset,
    Different,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedComparison {
    pub seed: usize,
    pub relation: SetRelation,
    /// DBSCAN cluster of the seed (`{seed}` for noise).
    pub dbscan: PointSet,
    pub cluster: PointSet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DbscanComparison {
    pub ty: usize,
    pub min_pts: usize,
    /// `minPts = 1`: every seed's DBSCAN cluster equals its transitive closure.
    pub free_mode_equal: bool,
    pub free_mode_mismatches: Vec<usize>,
    pub standard: Vec<SeedComparison>,
}

fn relate(dbscan: &PointSet, cluster: &PointSet) -> SetRelation {
    if dbscan == cluster {
        SetRelation::Equal
    } else if dbscan.is_subset(cluster) {
        SetRelation::ProperSubset
    } else {
        SetRelation::Different
    }
}

fn seed_set(res: &DbscanResult, x: usize) -> PointSet {
    match res.labels[x] {
        Some(c) => res.cluster(c),
        None => PointSet::from([x]),
    }
}

/// Compare DBSCAN (eps = radius of `p`) with `tr_p` for every seed.
pub fn compare_with_tr(space: &TypedSpace, p: usize, min_pts: usize) -> Result<DbscanComparison> {
    space.check_type(p)?;
    let label = space.poset().get(p);
    let radius = match (label.shape, label.radius) {
        (Some(Shape::Disk), Some(r)) => r,
        _ => return Err(Error::NotRadiusType(label.label.clone())),
    };
    let coords: Vec<Coord2> = (0..space.len())
        .map(|x| {
            space
                .coord(x)
                .ok_or_else(|| Error::MissingCoordinates(space.id(x).0.clone()))
        })
        .collect::<Result<_>>()?;
    let free = classify_sq(&coords, radius.squared(), 1)?;
    let std = classify_sq(&coords, radius.squared(), min_pts)?;
    let mut free_mode_mismatches = Vec::new();
    let mut standard = Vec::new();
    for x in 0..space.len() {
        let cluster = tr_point(space, x, p);
        if seed_set(&free, x) != cluster {
            free_mode_mismatches.push(x);
        }
        let dbscan = seed_set(&std, x);
        standard.push(SeedComparison {
            seed: x,
            relation: relate(&dbscan, &cluster),
            dbscan,
            cluster,
        });
    }
    Ok(DbscanComparison {
        ty: p,
        min_pts,
        free_mode_equal: free_mode_mismatches.is_empty(),
        free_mode_mismatches,
        standard,
    })
}
