//! Per-track connected components and branch enumeration.

use serde::{Deserialize, Serialize};

use crate::closure::{cl1_unchecked, tracks_unchecked};
use crate::connectivity::overlap_components;
use crate::error::Result;
use crate::space::{PointSet, TypedSpace};

/// `components[i]` partitions `Track_i(x)` into type-p-connected parts,
/// ordered by smallest member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrackComponents {
    pub origin: usize,
    pub ty: usize,
    pub components: Vec<Vec<PointSet>>,
}

/// `levels[0] = {x}`; `levels[i]` is one component of track `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Branch {
    pub levels: Vec<PointSet>,
    /// Component number chosen at each level.
    pub choice: Vec<usize>,
}

impl Branch {
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }
}

pub fn track_components(space: &TypedSpace, x: usize, p: usize) -> Result<TrackComponents> {
    space.check_point(x)?;
    space.check_type(p)?;
    let components = tracks_unchecked(space, &PointSet::from([x]), p)
        .iter()
        .map(|t| overlap_components(space, t, p))
        .collect();
    Ok(TrackComponents {
        origin: x,
        ty: p,
        components,
    })
}

/// Branches of `tr(x)`: chains of track components where each level meets
/// the direct closure of the previous one. With `all_prefixes` unset only
/// maximal chains are returned. Output is in lexicographic order of the
/// component choices.
pub fn enumerate_branches(
    space: &TypedSpace,
    x: usize,
    p: usize,
    all_prefixes: bool,
) -> Result<Vec<Branch>> {
    let comps = track_components(space, x, p)?.components;
    let mut out = Vec::new();
    let mut path = vec![0usize];
    walk(space, p, &comps, &mut path, all_prefixes, &mut out);
    Ok(out)
}

fn walk(
    space: &TypedSpace,
    p: usize,
    comps: &[Vec<PointSet>],
    path: &mut Vec<usize>,
    all_prefixes: bool,
    out: &mut Vec<Branch>,
) {
    let i = path.len() - 1;
    let here = &comps[i][path[i]];
    let next: Vec<usize> = match comps.get(i + 1) {
        Some(level) => {
            let reach = cl1_unchecked(space, here, p);
            (0..level.len())
                .filter(|&j| !level[j].is_disjoint(&reach))
                .collect()
        }
        None => Vec::new(),
    };
    if all_prefixes || next.is_empty() {
        out.push(Branch {
            levels: path
                .iter()
                .enumerate()
                .map(|(l, &j)| comps[l][j].clone())
                .collect(),
            choice: path.clone(),
        });
    }
    for j in next {
        path.push(j);
        walk(space, p, comps, path, all_prefixes, out);
        path.pop();
    }
}
