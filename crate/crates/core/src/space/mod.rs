//! Finite typed spaces stored as least neighborhoods.
//!
//! A [`TypedSpace`] is a finite point set, a poset of type labels and, for
//! every `(point, type)` pair, the least neighborhood of the point of that
//! type. Every other module reads spaces only through [`TypedSpace::umin`]
//! and its reverse, [`TypedSpace::reach`].
//!
//! Points are kept sorted by [`PointId`], so iterating a [`PointSet`] of
//! indices visits points in id order.

mod build;
mod geometry;
mod poset;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use build::{build_directed_2d_space, build_metric_space, build_relation_space};
pub use geometry::{boundary_epsilon, min_pairwise_gamma};
pub use poset::{TypeLabel, TypePoset};

/// Set of point indices into a [`TypedSpace`].
pub type PointSet = BTreeSet<usize>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointId(pub String);

impl PointId {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for PointId {
    fn from(s: &str) -> Self {
        PointId(s.to_string())
    }
}

impl From<String> for PointId {
    fn from(s: String) -> Self {
        PointId(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coord2 {
    pub x: f64,
    pub y: f64,
}

impl Coord2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dist_sq(&self, other: &Coord2) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn dist(&self, other: &Coord2) -> f64 {
        self.dist_sq(other).sqrt()
    }
}

/// Neighborhood shape families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    /// Open Euclidean disk, `d < r`.
    Disk,
    /// Closed half disk to the left, `d <= r` and `c <= a`.
    Left,
    Right,
    UpLeft,
    UpRight,
    Relation,
}

impl Shape {
    pub fn tag(&self) -> &'static str {
        match self {
            Shape::Disk => "disk",
            Shape::Left => "left",
            Shape::Right => "right",
            Shape::UpLeft => "up-left",
            Shape::UpRight => "up-right",
            Shape::Relation => "relation",
        }
    }

    pub fn is_directed(&self) -> bool {
        matches!(
            self,
            Shape::Left | Shape::Right | Shape::UpLeft | Shape::UpRight
        )
    }

    /// Whether `y` is in the neighborhood of `center` for this shape, given
    /// the squared radius. Distances are compared squared.
    pub fn contains(&self, center: &Coord2, y: &Coord2, radius_sq: f64) -> bool {
        let d2 = center.dist_sq(y);
        match self {
            Shape::Disk => d2 < radius_sq,
            Shape::Left => d2 <= radius_sq && y.x <= center.x,
            Shape::Right => d2 <= radius_sq && y.x >= center.x,
            Shape::UpLeft => d2 <= radius_sq && y.x <= center.x && y.y >= center.y,
            Shape::UpRight => d2 <= radius_sq && y.x >= center.x && y.y >= center.y,
            Shape::Relation => false,
        }
    }
}

impl std::str::FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "disk" => Ok(Shape::Disk),
            "left" => Ok(Shape::Left),
            "right" => Ok(Shape::Right),
            "up-left" => Ok(Shape::UpLeft),
            "up-right" => Ok(Shape::UpRight),
            "relation" => Ok(Shape::Relation),
            other => Err(Error::UnknownShape(other.to_string())),
        }
    }
}

/// A positive radius, held together with its square so that boundary tests
/// on integer-ish data stay exact. `Radius::from_squared(2.0)` is exactly √2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Radius {
    value: f64,
    squared: f64,
}

impl Radius {
    pub fn new(r: f64) -> Self {
        Self {
            value: r,
            squared: r * r,
        }
    }

    pub fn from_squared(squared: f64) -> Self {
        Self {
            value: squared.sqrt(),
            squared,
        }
    }

    pub fn squared(&self) -> f64 {
        self.squared
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    /// Whether the radius is fully described by its value (`value² == squared`).
    pub fn is_plain(&self) -> bool {
        self.value * self.value == self.squared
    }

    pub fn is_valid(&self) -> bool {
        self.squared.is_finite() && self.squared > 0.0 && self.value > 0.0
    }
}

impl fmt::Display for Radius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_plain() {
            write!(f, "{}", self.value)
        } else {
            write!(f, "sqrt({})", self.squared)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub id: PointId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coord: Option<Coord2>,
}

impl Point {
    pub fn new(id: impl Into<PointId>, coord: Option<Coord2>) -> Self {
        Self {
            id: id.into(),
            coord,
        }
    }

    pub fn at(id: impl Into<PointId>, x: f64, y: f64) -> Self {
        Self::new(id, Some(Coord2::new(x, y)))
    }
}

/// Least neighborhoods of one type together with their reverse index.
#[derive(Debug, Clone, PartialEq)]
struct NeighborhoodTable {
    umin: Vec<PointSet>,
    /// `reach[a] = { x : a ∈ umin[x] }`, i.e. the points `a` pulls into a closure.
    reach: Vec<PointSet>,
}

impl NeighborhoodTable {
    fn new(umin: Vec<PointSet>) -> Self {
        let mut reach = vec![PointSet::new(); umin.len()];
        for (x, nb) in umin.iter().enumerate() {
            for &a in nb {
                if a < reach.len() {
                    reach[a].insert(x);
                }
            }
        }
        Self { umin, reach }
    }
}

/// A finite typed topological space, represented by least neighborhoods.
///
/// Values are immutable; operations that modify neighborhoods return a new
/// space and share untouched per-type tables with the original.
#[derive(Debug, Clone, PartialEq)]
pub struct TypedSpace {
    points: Vec<Point>,
    lookup: BTreeMap<PointId, usize>,
    poset: TypePoset,
    tables: Vec<Arc<NeighborhoodTable>>,
    view: Option<usize>,
}

impl TypedSpace {
    /// Assemble a space from raw parts without checking the neighborhood
    /// invariants; run [`validate_space`] to audit the result.
    ///
    /// `umin[p][x]` lists indices into `points` *after* sorting by id, so
    /// prefer [`TypedSpace::from_id_neighborhoods`] unless the points are
    /// already sorted.
    pub fn from_parts(
        points: Vec<Point>,
        poset: TypePoset,
        umin: Vec<Vec<PointSet>>,
    ) -> Result<Self> {
        let (points, lookup) = sort_points(points)?;
        if umin.len() != poset.len() {
            return Err(Error::InvalidSpace(format!(
                "{} neighborhood tables for {} types",
                umin.len(),
                poset.len()
            )));
        }
        let n = points.len();
        for (p, table) in umin.iter().enumerate() {
            if table.len() != n {
                return Err(Error::InvalidSpace(format!(
                    "type {} has {} neighborhoods for {} points",
                    poset.get(p).label,
                    table.len(),
                    n
                )));
            }
        }
        Ok(Self {
            points,
            lookup,
            poset,
            tables: umin
                .into_iter()
                .map(|t| Arc::new(NeighborhoodTable::new(t)))
                .collect(),
            view: None,
        })
    }

    /// Assemble a space from neighborhoods keyed by label and point id.
    /// Missing entries become empty sets (which `validate_space` flags).
    pub fn from_id_neighborhoods(
        points: Vec<Point>,
        poset: TypePoset,
        umin: &BTreeMap<String, BTreeMap<String, Vec<String>>>,
    ) -> Result<Self> {
        let (points, lookup) = sort_points(points)?;
        let n = points.len();
        let mut tables = vec![vec![PointSet::new(); n]; poset.len()];
        for (label, rows) in umin {
            let p = poset
                .index_of(label)
                .ok_or_else(|| Error::UnknownType(label.clone()))?;
            for (center, members) in rows {
                let x = *lookup
                    .get(&PointId(center.clone()))
                    .ok_or_else(|| Error::UnknownPoint(center.clone()))?;
                for m in members {
                    let y = *lookup
                        .get(&PointId(m.clone()))
                        .ok_or_else(|| Error::UnknownPoint(m.clone()))?;
                    tables[p][x].insert(y);
                }
            }
        }
        Ok(Self {
            points,
            lookup,
            poset,
            tables: tables
                .into_iter()
                .map(|t| Arc::new(NeighborhoodTable::new(t)))
                .collect(),
            view: None,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn poset(&self) -> &TypePoset {
        &self.poset
    }

    pub fn type_count(&self) -> usize {
        self.poset.len()
    }

    pub fn id(&self, x: usize) -> &PointId {
        &self.points[x].id
    }

    pub fn coord(&self, x: usize) -> Option<Coord2> {
        self.points[x].coord
    }

    pub fn has_coords(&self) -> bool {
        self.points.iter().all(|p| p.coord.is_some())
    }

    pub fn all_points(&self) -> PointSet {
        (0..self.len()).collect()
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.lookup
            .get(&PointId(id.to_string()))
            .copied()
            .ok_or_else(|| Error::UnknownPoint(id.to_string()))
    }

    /// Point whose coordinates equal `(x, y)` exactly.
    pub fn find_by_coord(&self, x: f64, y: f64) -> Option<usize> {
        self.points
            .iter()
            .position(|p| p.coord.is_some_and(|c| c.x == x && c.y == y))
    }

    pub fn type_index(&self, label: &str) -> Result<usize> {
        self.poset
            .index_of(label)
            .ok_or_else(|| Error::UnknownType(label.to_string()))
    }

    pub fn type_label(&self, p: usize) -> &str {
        &self.poset.get(p).label
    }

    pub fn check_point(&self, x: usize) -> Result<()> {
        if x < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownPoint(format!("#{x}")))
        }
    }

    pub fn check_type(&self, p: usize) -> Result<()> {
        if p < self.type_count() {
            Ok(())
        } else {
            Err(Error::UnknownType(format!("#{p}")))
        }
    }

    pub fn check_set(&self, set: &PointSet) -> Result<()> {
        match set.iter().next_back() {
            Some(&last) => self.check_point(last),
            None => Ok(()),
        }
    }

    /// Least neighborhood of `x` of type `p`. Panics on out-of-range indices.
    pub fn umin(&self, x: usize, p: usize) -> &PointSet {
        &self.tables[p].umin[x]
    }

    /// Points whose least `p`-neighborhood contains `a`.
    pub fn reach(&self, a: usize, p: usize) -> &PointSet {
        &self.tables[p].reach[a]
    }

    /// When set, neighborhoods of this type were edited by a cut or surgery
    /// and cross-type monotonicity is no longer guaranteed.
    pub fn single_type_view(&self) -> Option<usize> {
        self.view
    }

    pub fn ids(&self, set: &PointSet) -> Vec<PointId> {
        set.iter().map(|&x| self.id(x).clone()).collect()
    }

    pub fn id_strings(&self, set: &PointSet) -> Vec<String> {
        set.iter().map(|&x| self.id(x).0.clone()).collect()
    }

    pub fn set_of<S: AsRef<str>>(&self, ids: &[S]) -> Result<PointSet> {
        ids.iter().map(|s| self.index_of(s.as_ref())).collect()
    }

    /// Removes `targets` from `umin(x, p)`; if anything changed, the space
    /// becomes a single-type view of `p`. The center is never removed.
    pub(crate) fn remove_from_umin(&mut self, x: usize, p: usize, targets: &PointSet) -> PointSet {
        let removed: PointSet = self.tables[p].umin[x]
            .intersection(targets)
            .copied()
            .filter(|&a| a != x)
            .collect();
        if removed.is_empty() {
            return removed;
        }
        let table = Arc::make_mut(&mut self.tables[p]);
        for a in &removed {
            table.umin[x].remove(a);
            table.reach[*a].remove(&x);
        }
        self.view = Some(p);
        removed
    }

    /// Stable 64-bit digest of the full space content.
    pub fn fingerprint(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        for pt in &self.points {
            pt.id.hash(&mut h);
            if let Some(c) = pt.coord {
                c.x.to_bits().hash(&mut h);
                c.y.to_bits().hash(&mut h);
            }
        }
        for (p, label) in self.poset.labels().iter().enumerate() {
            label.label.hash(&mut h);
            for nb in &self.tables[p].umin {
                nb.hash(&mut h);
            }
        }
        self.poset.covers().hash(&mut h);
        h.finish()
    }

    /// Whether this space shares the neighborhood table of type `p` with
    /// `other` (no copy was made).
    pub fn shares_table_with(&self, other: &TypedSpace, p: usize) -> bool {
        Arc::ptr_eq(&self.tables[p], &other.tables[p])
    }
}

fn sort_points(mut points: Vec<Point>) -> Result<(Vec<Point>, BTreeMap<PointId, usize>)> {
    points.sort_by(|a, b| a.id.cmp(&b.id));
    let mut lookup = BTreeMap::new();
    for (i, p) in points.iter().enumerate() {
        if let Some(c) = p.coord {
            if !c.is_finite() {
                return Err(Error::NonFiniteCoordinate(p.id.0.clone()));
            }
        }
        if lookup.insert(p.id.clone(), i).is_some() {
            return Err(Error::DuplicatePoint(p.id.0.clone()));
        }
    }
    Ok((points, lookup))
}

/// Checked least-neighborhood lookup.
pub fn u_min(space: &TypedSpace, x: usize, p: usize) -> Result<&PointSet> {
    space.check_point(x)?;
    space.check_type(p)?;
    Ok(space.umin(x, p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    CenterMembership,
    Monotonicity,
    ForeignMember,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub point: PointId,
    pub types: (String, Option<String>),
    pub offending: Option<PointId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

/// Audit the three neighborhood invariants: centers belong to their
/// neighborhoods, members are points of the space, and `p <= q` implies
/// `umin(x, p) ⊆ umin(x, q)`.
///
/// A space flagged as a single-type view is audited for that type only.
pub fn validate_space(space: &TypedSpace) -> ValidationReport {
    let n = space.len();
    let types: Vec<usize> = match space.view {
        Some(p) => vec![p],
        None => (0..space.type_count()).collect(),
    };
    let mut violations = Vec::new();
    for &p in &types {
        let label = space.type_label(p).to_string();
        for x in 0..n {
            let nb = space.umin(x, p);
            if !nb.contains(&x) {
                violations.push(Violation {
                    kind: ViolationKind::CenterMembership,
                    point: space.id(x).clone(),
                    types: (label.clone(), None),
                    offending: None,
                });
            }
            if let Some(&bad) = nb.iter().find(|&&y| y >= n) {
                violations.push(Violation {
                    kind: ViolationKind::ForeignMember,
                    point: space.id(x).clone(),
                    types: (label.clone(), None),
                    offending: Some(PointId(format!("#{bad}"))),
                });
            }
        }
    }
    if space.view.is_none() {
        for (p, q) in space.poset.strict_pairs() {
            for x in 0..n {
                let big = space.umin(x, q);
                if let Some(&y) = space.umin(x, p).iter().find(|y| !big.contains(y)) {
                    violations.push(Violation {
                        kind: ViolationKind::Monotonicity,
                        point: space.id(x).clone(),
                        types: (space.type_label(p).into(), Some(space.type_label(q).into())),
                        offending: (y < n).then(|| space.id(y).clone()),
                    });
                }
            }
        }
    }
    ValidationReport {
        ok: violations.is_empty(),
        violations,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymmetryCheck {
    pub symmetric: bool,
    /// `(x, y)` with `y ∈ umin(x, p)` but `x ∉ umin(y, p)`.
    pub witness: Option<(usize, usize)>,
}

pub fn is_symmetrically_typed(space: &TypedSpace, p: usize) -> Result<SymmetryCheck> {
    space.check_type(p)?;
    for x in 0..space.len() {
        for &y in space.umin(x, p) {
            if y != x && !space.umin(y, p).contains(&x) {
                return Ok(SymmetryCheck {
                    symmetric: false,
                    witness: Some((x, y)),
                });
            }
        }
    }
    Ok(SymmetryCheck {
        symmetric: true,
        witness: None,
    })
}
