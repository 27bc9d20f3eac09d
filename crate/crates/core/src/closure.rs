//! Direct, iterated and transitive closures, and track decompositions.
//!
//! All closures are evaluated through the reverse index
//! [`TypedSpace::reach`]: `x ∈ cl1(A)` iff some `a ∈ A` has `x ∈ reach(a)`.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::space::{PointSet, TypedSpace};

/// Transitive closure `tr(A)` together with the set and type it came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterSet {
    pub members: PointSet,
    pub origin: PointSet,
    pub ty: usize,
}

/// `[T_0, T_1, ..., T_{m-1}]` with `T_0 = A` and `T_i = CL_i \ CL_{i-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrackDecomposition {
    pub origin: PointSet,
    pub ty: usize,
    pub tracks: Vec<PointSet>,
}

impl TrackDecomposition {
    /// `m`: index of the first empty track.
    pub fn track_count(&self) -> usize {
        self.tracks.len()
    }

    pub fn track(&self, i: usize) -> &PointSet {
        static EMPTY: PointSet = PointSet::new();
        self.tracks.get(i).unwrap_or(&EMPTY)
    }

    /// Track number of `y`, if `y ∈ tr(A)`.
    pub fn track_of(&self, y: usize) -> Option<usize> {
        self.tracks.iter().position(|t| t.contains(&y))
    }

    /// `CL_i(A)`, the union of tracks `0..=i` (all of `tr(A)` for large `i`).
    pub fn cl(&self, i: usize) -> PointSet {
        self.tracks
            .iter()
            .take(i.saturating_add(1))
            .flatten()
            .copied()
            .collect()
    }

    pub fn members(&self) -> PointSet {
        self.tracks.iter().flatten().copied().collect()
    }
}

pub(crate) fn cl1_unchecked(space: &TypedSpace, a: &PointSet, p: usize) -> PointSet {
    let mut out = a.clone();
    for &y in a {
        out.extend(space.reach(y, p));
    }
    out
}

pub(crate) fn tracks_unchecked(space: &TypedSpace, a: &PointSet, p: usize) -> Vec<PointSet> {
    let mut seen = a.clone();
    let mut tracks = vec![a.clone()];
    loop {
        let mut next = PointSet::new();
        for &y in tracks.last().unwrap() {
            for &x in space.reach(y, p) {
                if !seen.contains(&x) {
                    next.insert(x);
                }
            }
        }
        if next.is_empty() {
            return tracks;
        }
        seen.extend(&next);
        tracks.push(next);
    }
}

pub(crate) fn tr_unchecked(space: &TypedSpace, a: &PointSet, p: usize) -> PointSet {
    let mut seen = a.clone();
    let mut stack: Vec<usize> = a.iter().copied().collect();
    while let Some(y) = stack.pop() {
        for &x in space.reach(y, p) {
            if seen.insert(x) {
                stack.push(x);
            }
        }
    }
    seen
}

pub(crate) fn tr_point(space: &TypedSpace, x: usize, p: usize) -> PointSet {
    tr_unchecked(space, &PointSet::from([x]), p)
}

/// `A ∪ { x : umin(x, p) ∩ A ≠ ∅ }`.
pub fn cl1(space: &TypedSpace, a: &PointSet, p: usize) -> Result<PointSet> {
    space.check_set(a)?;
    space.check_type(p)?;
    Ok(cl1_unchecked(space, a, p))
}

/// `n`-fold iterate of [`cl1`]; `cln(A, 0) = A`.
pub fn cln(space: &TypedSpace, a: &PointSet, p: usize, n: usize) -> Result<PointSet> {
    space.check_set(a)?;
    space.check_type(p)?;
    let tracks = tracks_unchecked(space, a, p);
    Ok(tracks
        .iter()
        .take(n.saturating_add(1))
        .flatten()
        .copied()
        .collect())
}

pub fn tr(space: &TypedSpace, a: &PointSet, p: usize) -> Result<ClusterSet> {
    space.check_set(a)?;
    space.check_type(p)?;
    Ok(ClusterSet {
        members: tr_unchecked(space, a, p),
        origin: a.clone(),
        ty: p,
    })
}

pub fn tracks(space: &TypedSpace, a: &PointSet, p: usize) -> Result<TrackDecomposition> {
    space.check_set(a)?;
    space.check_type(p)?;
    Ok(TrackDecomposition {
        origin: a.clone(),
        ty: p,
        tracks: tracks_unchecked(space, a, p),
    })
}

/// Tracks of a single point.
pub fn point_tracks(space: &TypedSpace, x: usize, p: usize) -> Result<TrackDecomposition> {
    space.check_point(x)?;
    tracks(space, &PointSet::from([x]), p)
}

pub fn track_count(space: &TypedSpace, x: usize, p: usize) -> Result<usize> {
    Ok(point_tracks(space, x, p)?.track_count())
}

/// `umin(x, p) ∩ A ≠ ∅`.
pub fn is_accumulation_point(space: &TypedSpace, x: usize, a: &PointSet, p: usize) -> Result<bool> {
    space.check_point(x)?;
    space.check_set(a)?;
    space.check_type(p)?;
    Ok(!space.umin(x, p).is_disjoint(a))
}
