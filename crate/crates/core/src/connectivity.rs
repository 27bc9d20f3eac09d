//! Type-p-connectedness, components, closure-connected decomposition, ports
//! and straightness.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::closure::{tr_point, tracks_unchecked};
use crate::error::{Error, Result};
use crate::space::{PointSet, TypedSpace};

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        // keep the smaller root so roots are the smallest member
        if ra < rb {
            self.parent[rb] = ra;
        } else if rb < ra {
            self.parent[ra] = rb;
        }
    }
}

/// Group `items` (indices into some domain of size `n`) by their union-find
/// root; groups come out ordered by smallest member.
fn groups(uf: &mut UnionFind, items: &PointSet) -> Vec<PointSet> {
    let mut by_root: BTreeMap<usize, PointSet> = BTreeMap::new();
    for &y in items {
        by_root.entry(uf.find(y)).or_default().insert(y);
    }
    let mut out: Vec<PointSet> = by_root.into_values().collect();
    out.sort_by_key(|g| *g.first().unwrap());
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bipartition {
    pub left: PointSet,
    pub right: PointSet,
}

/// Overlap components of `a`: `y ~ z` iff `umin(y) ∩ umin(z) ∩ a ≠ ∅`.
///
/// The neighborhoods are intersected with `a` itself, so `a` is tested as a
/// subspace: two points of `a` are only linked through a witness in `a`.
pub(crate) fn overlap_components(space: &TypedSpace, a: &PointSet, p: usize) -> Vec<PointSet> {
    let mut uf = UnionFind::new(space.len());
    for &w in a {
        let mut holders = space.reach(w, p).intersection(a);
        if let Some(&first) = holders.next() {
            for &y in holders {
                uf.union(first, y);
            }
        }
    }
    groups(&mut uf, a)
}

/// Whether `a` cannot be split into two nonempty parts whose least
/// neighborhoods (within `a`) are disjoint. On failure the witness puts the
/// first overlap component on the left.
pub fn is_type_p_connected(
    space: &TypedSpace,
    a: &PointSet,
    p: usize,
) -> Result<(bool, Option<Bipartition>)> {
    if a.is_empty() {
        return Err(Error::EmptySet("point set"));
    }
    space.check_set(a)?;
    space.check_type(p)?;
    let comps = overlap_components(space, a, p);
    if comps.len() == 1 {
        return Ok((true, None));
    }
    let left = comps[0].clone();
    let right = a.difference(&left).copied().collect();
    Ok((false, Some(Bipartition { left, right })))
}

/// Type-p-connected component of `x`: the overlap component of `x` in the
/// whole space.
pub fn component(space: &TypedSpace, x: usize, p: usize) -> Result<PointSet> {
    space.check_point(x)?;
    space.check_type(p)?;
    let mut uf = UnionFind::new(space.len());
    for w in 0..space.len() {
        let mut holders = space.reach(w, p).iter();
        if let Some(&first) = holders.next() {
            for &y in holders {
                uf.union(first, y);
            }
        }
    }
    let root = uf.find(x);
    Ok((0..space.len()).filter(|&y| uf.find(y) == root).collect())
}

/// Parts of `d` that are chained by overlapping transitive closures,
/// ordered by smallest member.
pub fn closure_decomposition(space: &TypedSpace, d: &PointSet, p: usize) -> Result<Vec<PointSet>> {
    if d.is_empty() {
        return Err(Error::EmptySet("point set"));
    }
    space.check_set(d)?;
    space.check_type(p)?;
    Ok(closure_parts(space, d, p))
}

pub(crate) fn closure_parts(space: &TypedSpace, d: &PointSet, p: usize) -> Vec<PointSet> {
    let mut uf = UnionFind::new(space.len());
    let mut owner: Vec<Option<usize>> = vec![None; space.len()];
    for &z in d {
        for w in tr_point(space, z, p) {
            match owner[w] {
                Some(o) => uf.union(o, z),
                None => owner[w] = Some(z),
            }
        }
    }
    groups(&mut uf, d)
}

pub fn is_closure_connected(space: &TypedSpace, d: &PointSet, p: usize) -> Result<bool> {
    Ok(closure_decomposition(space, d, p)?.len() == 1)
}

/// Entrance points of a set: one representative (smallest id) per minimal
/// class of mutual reachability.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Port {
    pub members: PointSet,
    pub parent: PointSet,
    pub ty: usize,
}

pub fn port(space: &TypedSpace, d: &PointSet, p: usize) -> Result<Port> {
    if d.is_empty() {
        return Err(Error::EmptySet("point set"));
    }
    space.check_set(d)?;
    space.check_type(p)?;
    Ok(Port {
        members: port_members(space, d, p),
        parent: d.clone(),
        ty: p,
    })
}

pub(crate) fn port_members(space: &TypedSpace, d: &PointSet, p: usize) -> PointSet {
    let closures: BTreeMap<usize, PointSet> =
        d.iter().map(|&y| (y, tr_point(space, y, p))).collect();
    let mut members = PointSet::new();
    let mut covered = PointSet::new();
    for &y in d {
        if covered.contains(&y) {
            continue;
        }
        // [y] is minimal iff nobody in D reaches y without being reached back
        let minimal = d
            .iter()
            .all(|&z| !closures[&z].contains(&y) || closures[&y].contains(&z));
        if minimal {
            members.insert(y);
            // the rest of y's class is represented by y
            covered.extend(
                d.iter()
                    .filter(|&&z| closures[&y].contains(&z) && closures[&z].contains(&y)),
            );
        }
    }
    members
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StraightViolation {
    pub y: usize,
    pub z: usize,
    pub i: usize,
    pub j: usize,
}

/// `violations`: `y ∈ T_i`, `z ∈ T_j`, `0 < i < j`, `z ∈ umin(y)` but
/// `y ∉ umin(z)`. `locality` lists direct-closure steps from `T_i` that land
/// outside `T_{i-1} ∪ T_i ∪ T_{i+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StraightnessReport {
    pub straight: bool,
    pub violations: Vec<StraightViolation>,
    pub locality: Vec<StraightViolation>,
}

pub fn is_straight(space: &TypedSpace, x: usize, p: usize) -> Result<StraightnessReport> {
    space.check_point(x)?;
    space.check_type(p)?;
    Ok(straightness(
        space,
        &tracks_unchecked(space, &PointSet::from([x]), p),
        p,
    ))
}

pub(crate) fn straightness(
    space: &TypedSpace,
    tracks: &[PointSet],
    p: usize,
) -> StraightnessReport {
    let mut level = vec![usize::MAX; space.len()];
    for (i, t) in tracks.iter().enumerate() {
        for &y in t {
            level[y] = i;
        }
    }
    let mut violations = Vec::new();
    let mut locality = Vec::new();
    for (i, t) in tracks.iter().enumerate().skip(1) {
        for &y in t {
            for &z in space.umin(y, p) {
                let j = level[z];
                if j != usize::MAX && j > i && !space.umin(z, p).contains(&y) {
                    violations.push(StraightViolation { y, z, i, j });
                }
            }
            for &z in space.reach(y, p) {
                let j = level[z];
                if j != usize::MAX && (j + 1 < i || j > i + 1) {
                    locality.push(StraightViolation { y, z, i, j });
                }
            }
        }
    }
    violations.sort_by_key(|v| (v.i, v.j, v.y, v.z));
    locality.sort_by_key(|v| (v.i, v.j, v.y, v.z));
    StraightnessReport {
        straight: violations.is_empty(),
        violations,
        locality,
    }
}
