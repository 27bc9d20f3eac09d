//! Brute-force oracles and random space generators shared by the
//! integration tests. Oracles only read `umin` and recompute everything
//! from first principles.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use typtop_core::io::read_points_csv;
use typtop_core::{
    build_directed_2d_space, build_metric_space, build_relation_space, Coord2, Point, PointId,
    PointSet, Radius, Shape, TypeLabel, TypePoset, TypedSpace,
};

pub type Table = Vec<PointSet>;

pub fn table(space: &TypedSpace, p: usize) -> Table {
    (0..space.len()).map(|x| space.umin(x, p).clone()).collect()
}

pub fn oracle_cl1(t: &Table, a: &PointSet) -> PointSet {
    let mut out = a.clone();
    for (x, nb) in t.iter().enumerate() {
        if nb.iter().any(|y| a.contains(y)) {
            out.insert(x);
        }
    }
    out
}

pub fn oracle_tracks(t: &Table, a: &PointSet) -> Vec<PointSet> {
    let mut cur = a.clone();
    let mut out = vec![a.clone()];
    loop {
        let next = oracle_cl1(t, &cur);
        if next == cur {
            return out;
        }
        out.push(next.difference(&cur).copied().collect());
        cur = next;
    }
}

pub fn oracle_tr(t: &Table, a: &PointSet) -> PointSet {
    oracle_tracks(t, a).into_iter().flatten().collect()
}

/// Exhaustive covering-family test: `a` is disconnected iff some split
/// `a = u ∪ v` has `(⋃ umin(u) ∩ a) ∩ (⋃ umin(v) ∩ a) = ∅`.
pub fn oracle_connected(t: &Table, a: &PointSet) -> bool {
    let pts: Vec<usize> = a.iter().copied().collect();
    let n = pts.len();
    assert!(n <= 16, "exhaustive oracle is for small sets");
    if n <= 1 {
        return true;
    }
    // fix pts[0] on the left to halve the work
    for mask in 0u32..(1 << (n - 1)) {
        let right_mask = mask << 1;
        if right_mask == 0 {
            continue;
        }
        let mut left_cover = PointSet::new();
        let mut right_cover = PointSet::new();
        for (i, &x) in pts.iter().enumerate() {
            let cover = if right_mask & (1 << i) != 0 {
                &mut right_cover
            } else {
                &mut left_cover
            };
            cover.extend(t[x].iter().filter(|y| a.contains(y)));
        }
        if left_cover.is_disjoint(&right_cover) {
            return false;
        }
    }
    true
}

/// Largest connected set containing `x`, grown by the pairwise overlap
/// relation until nothing changes.
pub fn oracle_component(t: &Table, x: usize) -> PointSet {
    let mut comp = PointSet::from([x]);
    loop {
        let before = comp.len();
        for y in 0..t.len() {
            if comp.iter().any(|&c| !t[c].is_disjoint(&t[y])) {
                comp.insert(y);
            }
        }
        if comp.len() == before {
            return comp;
        }
    }
}

/// DBSCAN by definition: a point joins the cluster of core point `c` iff it
/// is reachable from `c` through a chain of core points with `d < eps`.
pub fn oracle_dbscan_cluster(coords: &[Coord2], eps: f64, min_pts: usize, x: usize) -> PointSet {
    let n = coords.len();
    let near = |a: usize, b: usize| coords[a].dist(&coords[b]) < eps;
    let core: Vec<bool> = (0..n)
        .map(|a| (0..n).filter(|&b| near(a, b)).count() >= min_pts)
        .collect();
    // core points density-connected to x (or to a core neighbor of a border x)
    let seeds: Vec<usize> = if core[x] {
        vec![x]
    } else {
        (0..n).filter(|&c| core[c] && near(c, x)).collect()
    };
    if seeds.is_empty() {
        return PointSet::from([x]);
    }
    let mut cores = PointSet::new();
    let mut stack = vec![seeds[0]];
    while let Some(c) = stack.pop() {
        if cores.insert(c) {
            stack.extend((0..n).filter(|&d| core[d] && near(c, d)));
        }
    }
    (0..n)
        .filter(|&y| cores.iter().any(|&c| near(c, y)))
        .collect()
}

pub fn fixture_path(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(rel)
}

pub fn read_fixture(rel: &str) -> String {
    fs::read_to_string(fixture_path(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

pub fn x48_points() -> Vec<(PointId, Coord2)> {
    read_points_csv(read_fixture("paper/x48.csv").as_bytes()).expect("x48 csv")
}

/// X48 with `left-1`, `left-2`, `up-left-1`, `up-left-2`.
pub fn x48() -> TypedSpace {
    build_directed_2d_space(
        &x48_points(),
        &[
            (Shape::Left, Radius::new(1.0)),
            (Shape::Left, Radius::new(2.0)),
            (Shape::UpLeft, Radius::new(1.0)),
            (Shape::UpLeft, Radius::new(2.0)),
        ],
    )
    .expect("x48 space")
}

pub fn coord_points(cs: &[(f64, f64)]) -> Vec<(PointId, Coord2)> {
    cs.iter()
        .map(|&(x, y)| (PointId(format!("({x},{y})")), Coord2::new(x, y)))
        .collect()
}

pub fn at(space: &TypedSpace, x: f64, y: f64) -> usize {
    space
        .find_by_coord(x, y)
        .unwrap_or_else(|| panic!("no point at ({x},{y})"))
}

pub fn ids(space: &TypedSpace, names: &[&str]) -> PointSet {
    space.set_of(names).expect("known ids")
}

/// Relation space from arrows: `(a, b)` means `a ∈ umin(b)` (b is reached
/// from a in one closure step).
pub fn arrows(
    names: &[&str],
    types: &[(&str, &[(&str, &str)])],
    order: &[(&str, &str)],
) -> TypedSpace {
    let pts: Vec<PointId> = names.iter().map(|s| PointId::from(*s)).collect();
    let rels: Vec<(String, Vec<(PointId, PointId)>)> = types
        .iter()
        .map(|(l, links)| {
            (
                l.to_string(),
                links
                    .iter()
                    .map(|&(a, b)| (PointId::from(b), PointId::from(a)))
                    .collect(),
            )
        })
        .collect();
    let order: Vec<(String, String)> = order.iter().map(|&(a, b)| (a.into(), b.into())).collect();
    build_relation_space(&pts, &rels, &order).expect("relation fixture")
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random relation space: up to `max_n` points, 1..=3 chained types
/// `t0 <= t1 <= t2`, neighborhoods grow with the type.
pub fn random_space(seed: u64, max_n: usize) -> TypedSpace {
    let mut r = rng(seed);
    let n = r.gen_range(1..=max_n);
    let types = r.gen_range(1..=3);
    let density = r.gen_range(0.05..0.35);
    let mut umin: Vec<Vec<PointSet>> = Vec::new();
    let mut prev: Vec<PointSet> = (0..n).map(|x| PointSet::from([x])).collect();
    for _ in 0..types {
        let layer: Vec<PointSet> = prev
            .iter()
            .map(|nb| {
                let mut nb = nb.clone();
                for y in 0..n {
                    if r.gen_bool(density) {
                        nb.insert(y);
                    }
                }
                nb
            })
            .collect();
        umin.push(layer.clone());
        prev = layer;
    }
    let labels = (0..types)
        .map(|t| TypeLabel::relation(format!("t{t}")))
        .collect();
    let order: Vec<(usize, usize)> = (1..types).map(|t| (t - 1, t)).collect();
    let poset = TypePoset::new(labels, &order).unwrap();
    let points = (0..n)
        .map(|x| Point::new(format!("v{x:02}"), None))
        .collect();
    TypedSpace::from_parts(points, poset, umin).unwrap()
}

/// Random planar points with distinct integer coordinates in a small grid.
pub fn random_coords(r: &mut ChaCha8Rng, max_n: usize) -> Vec<(PointId, Coord2)> {
    let n = r.gen_range(1..=max_n);
    let mut seen = BTreeSet::new();
    while seen.len() < n {
        seen.insert((r.gen_range(0..6i32), r.gen_range(0..6i32)));
    }
    seen.into_iter()
        .map(|(x, y)| {
            (
                PointId(format!("({x},{y})")),
                Coord2::new(x as f64, y as f64),
            )
        })
        .collect()
}

/// Random metric-disk space with one or two radii.
pub fn random_metric_space(seed: u64, max_n: usize) -> TypedSpace {
    let mut r = rng(seed);
    let pts = random_coords(&mut r, max_n);
    let r1 = [1.0, 1.2, 1.5, 2.0, 2.3][r.gen_range(0..5)];
    let radii = if r.gen_bool(0.5) {
        vec![Radius::new(r1)]
    } else {
        vec![Radius::new(r1), Radius::new(r1 + 1.0)]
    };
    build_metric_space(&pts, &radii).unwrap()
}

/// All nonempty subsets as a random pick.
pub fn random_subset(r: &mut ChaCha8Rng, n: usize) -> PointSet {
    let mut s: PointSet = (0..n).filter(|_| r.gen_bool(0.4)).collect();
    if s.is_empty() {
        s.insert(r.gen_range(0..n));
    }
    s
}

/// A pairwise mutually unreachable (port-like) closure-connected set, or
/// `None` if the random draw yields nothing useful.
pub fn random_port_part(space: &TypedSpace, r: &mut ChaCha8Rng, p: usize) -> Option<PointSet> {
    use typtop_core::connectivity::{closure_decomposition, port};
    let a = random_subset(r, space.len());
    let members = port(space, &a, p).ok()?.members;
    let parts = closure_decomposition(space, &members, p).ok()?;
    parts.into_iter().max_by_key(|s| s.len())
}

/// Unit square, optionally with a fifth point at (2,0).
pub fn square(extra: bool, r: Radius) -> TypedSpace {
    let mut cs = vec![(0.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, 0.0)];
    if extra {
        cs.push((2.0, 0.0));
    }
    build_metric_space(&coord_points(&cs), &[r]).unwrap()
}

/// Eight planar points; p- and q-disks of radius 1.01 and 3.01.
pub fn eight_points() -> TypedSpace {
    let pts = coord_points(&[
        (0.0, 0.0),
        (1.0, 0.0),
        (2.0, 0.0),
        (3.0, 0.0),
        (4.0, 0.0),
        (1.0, 1.0),
        (1.0, 2.0),
        (0.0, 2.0),
    ]);
    build_metric_space(&pts, &[Radius::new(1.01), Radius::new(3.01)]).unwrap()
}

/// Two routes from `x`; `z` is reached at step 3 but also sees `x4`, which
/// is only reached at step 4 and does not see `z` back.
pub fn two_routes() -> TypedSpace {
    arrows(
        &["x", "y1", "y2", "z", "x1", "x2", "x3", "x4", "w1", "w2"],
        &[(
            "p",
            &[
                ("x", "y1"),
                ("y1", "y2"),
                ("y2", "z"),
                ("x", "x1"),
                ("x1", "x2"),
                ("x2", "x3"),
                ("x3", "x4"),
                ("x4", "z"),
                ("w1", "w2"),
            ],
        )],
        &[],
    )
}
