//! Local horizontal axis.
//!
//! Points of a cluster are placed on an integer axis: the base index is the
//! track number, the combined `(p, q)` index splits the `p`-track axis at the
//! `q`-levels (`major.minor`), and the full extension walks the whole
//! `q`-cluster stage by stage using reference points and surrounding trees.
//! Extension values are measured in `p`-track units.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::closure::{tr_point, tr_unchecked, tracks_unchecked};
use crate::connectivity::{closure_parts, port_members};
use crate::error::{Error, Result};
use crate::space::{PointSet, TypedSpace};
use crate::surgery::{surrounding_tree, SurgeryLog};

/// Positional `major.minor` value. `1.10` and `1.1` are different values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct IndexValue {
    pub major: i64,
    pub minor: u64,
}

impl IndexValue {
    pub const ZERO: IndexValue = IndexValue { major: 0, minor: 0 };

    pub const fn new(major: i64, minor: u64) -> Self {
        Self { major, minor }
    }

    pub fn shifted(self, by: i64) -> Self {
        Self {
            major: self.major + by,
            minor: self.minor,
        }
    }
}

impl fmt::Display for IndexValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.major, self.minor)
    }
}

impl FromStr for IndexValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("index value `{s}`"));
        let (a, b) = s.split_once('.').ok_or_else(bad)?;
        Ok(Self {
            major: a.parse().map_err(|_| bad())?,
            minor: b.parse().map_err(|_| bad())?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexMap {
    pub p: usize,
    pub q: Option<usize>,
    pub origin: usize,
    pub entries: BTreeMap<usize, IndexValue>,
}

impl IndexMap {
    fn empty(p: usize, q: Option<usize>, origin: usize) -> Self {
        Self {
            p,
            q,
            origin,
            entries: BTreeMap::new(),
        }
    }

    pub fn get(&self, y: usize) -> Option<IndexValue> {
        self.entries.get(&y).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn domain(&self) -> PointSet {
        self.entries.keys().copied().collect()
    }

    fn assign(&mut self, space: &TypedSpace, y: usize, v: IndexValue) -> Result<()> {
        if self.entries.insert(y, v).is_some() {
            return Err(Error::DoubleIndex(space.id(y).0.clone()));
        }
        Ok(())
    }
}

/// `index_{p,x}(y) = j` for `y ∈ Track_j(x)`.
pub fn base_index(space: &TypedSpace, x: usize, p: usize) -> Result<IndexMap> {
    space.check_point(x)?;
    space.check_type(p)?;
    let mut map = IndexMap::empty(p, None, x);
    for (j, t) in tracks_unchecked(space, &PointSet::from([x]), p)
        .iter()
        .enumerate()
    {
        for &y in t {
            map.entries.insert(y, IndexValue::new(j as i64, 0));
        }
    }
    Ok(map)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniformityReport {
    pub uniform: bool,
    /// `(i, k)`: `p`-track `i` meets `q`-track `k` without lying inside it.
    pub violations: Vec<(usize, usize)>,
}

fn check_order(space: &TypedSpace, p: usize, q: usize) -> Result<()> {
    space.check_type(p)?;
    space.check_type(q)?;
    if !space.poset().leq(p, q) {
        return Err(Error::IncomparableTypes(
            space.type_label(p).to_string(),
            space.type_label(q).to_string(),
        ));
    }
    Ok(())
}

fn level_of(n: usize, tracks: &[PointSet]) -> Vec<Option<usize>> {
    let mut level = vec![None; n];
    for (i, t) in tracks.iter().enumerate() {
        for &y in t {
            level[y] = Some(i);
        }
    }
    level
}

/// Uniformity is tested track against track: whenever `Track^p_i(x)` meets
/// `Track^q_k(x)` it must lie inside it.
pub fn is_uniformly_typed(
    space: &TypedSpace,
    x: usize,
    p: usize,
    q: usize,
) -> Result<UniformityReport> {
    space.check_point(x)?;
    check_order(space, p, q)?;
    let seed = PointSet::from([x]);
    let tp = tracks_unchecked(space, &seed, p);
    let tq = tracks_unchecked(space, &seed, q);
    let lq = level_of(space.len(), &tq);
    let mut violations = Vec::new();
    for (i, t) in tp.iter().enumerate() {
        let hit: PointSet = t.iter().filter_map(|&y| lq[y]).collect();
        let stray = t.iter().any(|&y| lq[y].is_none());
        if hit.len() > 1 || (stray && !hit.is_empty()) {
            violations.extend(hit.into_iter().map(|k| (i, k)));
        }
    }
    Ok(UniformityReport {
        uniform: violations.is_empty(),
        violations,
    })
}

/// One stage of the `(p, q)` decomposition of `tr_q(x)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PqStage {
    pub stage: usize,
    /// `x_t` (`x_1 = x`).
    pub reference: usize,
    /// Index given to `x_t`.
    pub anchor: IndexValue,
    /// `q`-level the stage starts after (`0` for the first stage).
    pub start: usize,
    pub k: usize,
    /// `i^t_1 <= i^t_2 <= ...`, one per `q`-level `start+1 ..= k`.
    pub i_seq: Vec<usize>,
    pub a: PointSet,
    pub b: PointSet,
    pub c: PointSet,
    pub k_set: PointSet,
    /// `r_t`, for `t >= 2`.
    pub r: Option<usize>,
}

/// `i_j = max{ i < m : CL^p_i(x_t) ⊆ CL^q_level(x) }`, floor `0`.
fn i_sequence(
    p_tracks: &[PointSet],
    q_level: &[Option<usize>],
    levels: std::ops::RangeInclusive<usize>,
) -> Vec<usize> {
    // highest q-level reached by CL^p_i
    let mut reach = Vec::with_capacity(p_tracks.len());
    let mut hi = 0usize;
    for t in p_tracks {
        for &y in t {
            hi = hi.max(q_level[y].unwrap_or(usize::MAX));
        }
        reach.push(hi);
    }
    levels
        .map(|level| reach.iter().rposition(|&h| h <= level).unwrap_or(0))
        .collect()
}

/// First stage: `k_1`, `i^1_j`, `A_1`, `B_1`, `C_1`, `K_1`. Defined only for
/// uniformly typed `x`.
pub fn pq_decomposition(space: &TypedSpace, x: usize, p: usize, q: usize) -> Result<PqStage> {
    let report = is_uniformly_typed(space, x, p, q)?;
    if !report.uniform {
        return Err(Error::NotUniform {
            p: space.type_label(p).to_string(),
            q: space.type_label(q).to_string(),
            origin: space.id(x).0.clone(),
        });
    }
    Ok(first_stage(space, x, p, q))
}

fn first_stage(space: &TypedSpace, x: usize, p: usize, q: usize) -> PqStage {
    let seed = PointSet::from([x]);
    let tp = tracks_unchecked(space, &seed, p);
    let tq = tracks_unchecked(space, &seed, q);
    let lq = level_of(space.len(), &tq);
    let k1 = tp
        .iter()
        .flatten()
        .map(|&y| lq[y].unwrap_or(usize::MAX))
        .max()
        .unwrap_or(0)
        .min(tq.len() - 1);
    let i_seq = if k1 == 0 {
        Vec::new()
    } else {
        i_sequence(&tp, &lq, 1..=k1)
    };
    let a: PointSet = tq.iter().take(k1 + 1).flatten().copied().collect();
    let tr_q: PointSet = tq.iter().flatten().copied().collect();
    let tr_p: PointSet = tp.iter().flatten().copied().collect();
    let b = tr_q.difference(&a).copied().collect();
    let c: PointSet = a.difference(&tr_p).copied().collect();
    let k_set = tr_unchecked(space, &c, p);
    PqStage {
        stage: 1,
        reference: x,
        anchor: IndexValue::ZERO,
        start: 0,
        k: k1,
        i_seq,
        a,
        b,
        c,
        k_set,
        r: None,
    }
}

/// `k ↦ (t).(k - i_t)` with `t` the largest index such that `i_t <= k`
/// (`i_0 = 0`).
pub fn index_roundtrip(k: usize, i_seq: &[usize]) -> Result<IndexValue> {
    let last = i_seq.last().copied().unwrap_or(0);
    if k > last {
        return Err(Error::IndexOutOfRange(format!("k = {k} exceeds {last}")));
    }
    let t = i_seq.iter().rposition(|&i| i <= k).map_or(0, |t| t + 1);
    let base = if t == 0 { 0 } else { i_seq[t - 1] };
    Ok(IndexValue::new(t as i64, (k - base) as u64))
}

/// Inverse of [`index_roundtrip`].
pub fn index_inverse(v: IndexValue, i_seq: &[usize]) -> Result<usize> {
    let out_of_range = || Error::IndexOutOfRange(v.to_string());
    if v.major < 0 || v.major as usize > i_seq.len() {
        return Err(out_of_range());
    }
    let t = v.major as usize;
    let base = if t == 0 { 0 } else { i_seq[t - 1] };
    let k = base
        .checked_add(usize::try_from(v.minor).map_err(|_| out_of_range())?)
        .ok_or_else(out_of_range)?;
    match index_roundtrip(k, i_seq) {
        Ok(back) if back == v => Ok(k),
        _ => Err(out_of_range()),
    }
}

/// Combined `major.minor` index over `tr_p(x)`.
pub fn combined_index(
    space: &TypedSpace,
    x: usize,
    p: usize,
    q: usize,
) -> Result<(IndexMap, PqStage)> {
    let stage = pq_decomposition(space, x, p, q)?;
    let mut map = IndexMap::empty(p, Some(q), x);
    for (k, t) in tracks_unchecked(space, &PointSet::from([x]), p)
        .iter()
        .enumerate()
    {
        let v = index_roundtrip(k, &stage.i_seq)?;
        for &y in t {
            map.entries.insert(y, v);
        }
    }
    Ok((map, stage))
}

/// First `k` where `tr(e)` meets `Track_k(d)`, and the first track of `e`
/// that meets that track of `d`.
fn anchor_offsets(space: &TypedSpace, d: usize, e: usize, p: usize) -> Option<(usize, usize)> {
    let td = tracks_unchecked(space, &PointSet::from([d]), p);
    let te = tracks_unchecked(space, &PointSet::from([e]), p);
    let tr_e: PointSet = te.iter().flatten().copied().collect();
    let m1 = td.iter().position(|t| !t.is_disjoint(&tr_e))?;
    let m2 = te.iter().position(|t| !t.is_disjoint(&td[m1]))?;
    Some((m1, m2))
}

/// Index `tr(D)` for a closure-connected `D` whose reference point `d0` is
/// given `base`. The surrounding tree's surgeries are applied first; node
/// offsets are measured on the input space, track offsets after surgery.
pub fn index_closure_connected_set(
    space: &TypedSpace,
    d: &PointSet,
    d0: usize,
    base: IndexValue,
    p: usize,
) -> Result<(IndexMap, TypedSpace, SurgeryLog)> {
    let (tree, after, log) = surrounding_tree(space, d, d0, p)?;
    let mut map = IndexMap::empty(p, None, d0);
    let mut node_index: BTreeMap<usize, IndexValue> = BTreeMap::from([(d0, base)]);
    for level in &tree.levels {
        for &e in level {
            let v = match node_index.get(&e) {
                Some(&v) => v,
                None => {
                    let parent = tree.parent_of(e).expect("non-root node has a parent");
                    let (m1, m2) = anchor_offsets(space, parent, e, p).ok_or_else(|| {
                        Error::NotClosureConnected(space.type_label(p).to_string())
                    })?;
                    let v = node_index[&parent].shifted(m1 as i64 - m2 as i64);
                    node_index.insert(e, v);
                    v
                }
            };
            map.assign(space, e, v)?;
            for (j, t) in tracks_unchecked(&after, &PointSet::from([e]), p)
                .iter()
                .enumerate()
                .skip(1)
            {
                for &w in t {
                    map.assign(space, w, v.shifted(j as i64))?;
                }
            }
        }
    }
    Ok((map, after, log))
}

/// Extend an anchored index over `tr_p(port_p(a))`.
///
/// The closure-connected part of the port holding a point `x'` that reaches
/// `anchor` is rooted at the smallest such `x'`, indexed
/// `anchor_value - k` with `anchor ∈ Track_k(x')`. Every other part is
/// rooted at its smallest point with `anchor_value`.
fn extend_over(
    space: &TypedSpace,
    a: &PointSet,
    anchor: usize,
    anchor_value: IndexValue,
    p: usize,
) -> Result<(IndexMap, TypedSpace, SurgeryLog)> {
    let mut s = space.clone();
    let mut map = IndexMap::empty(p, None, anchor);
    let mut log = SurgeryLog::default();
    if a.is_empty() {
        return Ok((map, s, log));
    }
    let ports = port_members(space, a, p);
    for part in closure_parts(space, &ports, p) {
        let mut root = None;
        for &xp in &part {
            let t = tracks_unchecked(&s, &PointSet::from([xp]), p);
            if let Some(k) = t.iter().position(|t| t.contains(&anchor)) {
                root = Some((xp, anchor_value.shifted(-(k as i64))));
                break;
            }
        }
        let (d0, base) = root.unwrap_or((*part.first().unwrap(), anchor_value));
        let (m, next, l) = index_closure_connected_set(&s, &part, d0, base, p)?;
        for (y, v) in m.entries {
            map.assign(space, y, v)?;
        }
        s = next;
        log.entries.extend(l.entries);
    }
    Ok((map, s, log))
}

/// Index `A_t ∪ K_t` for a computed stage, anchored at the stage's
/// reference point.
pub fn extend_index_a1(
    space: &TypedSpace,
    stage: &PqStage,
    p: usize,
) -> Result<(IndexMap, TypedSpace, SurgeryLog)> {
    space.check_point(stage.reference)?;
    space.check_set(&stage.a)?;
    space.check_type(p)?;
    extend_over(space, &stage.a, stage.reference, stage.anchor, p)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PqStraightReport {
    pub straight: bool,
    /// `(y, z, w)` with `index_{p,y}(z) <= index_{p,y}(w)` but
    /// `index_{q,y}(z) > index_{q,y}(w)`.
    pub violations: Vec<(usize, usize, usize)>,
}

pub fn is_pq_straight(
    space: &TypedSpace,
    x: usize,
    p: usize,
    q: usize,
) -> Result<PqStraightReport> {
    space.check_point(x)?;
    check_order(space, p, q)?;
    let n = space.len();
    let mut violations = Vec::new();
    for y in tr_point(space, x, q) {
        let seed = PointSet::from([y]);
        let lp = level_of(n, &tracks_unchecked(space, &seed, p));
        let lq = level_of(n, &tracks_unchecked(space, &seed, q));
        let members: Vec<usize> = (0..n).filter(|&z| lp[z].is_some()).collect();
        for &z in &members {
            for &w in &members {
                let qz = lq[z].unwrap_or(usize::MAX);
                let qw = lq[w].unwrap_or(usize::MAX);
                if lp[z] <= lp[w] && qz > qw {
                    violations.push((y, z, w));
                }
            }
        }
    }
    Ok(PqStraightReport {
        straight: violations.is_empty(),
        violations,
    })
}

/// Port member of `Track^q_level(x) \ skip` with the most `p`-tracks
/// (smallest id on ties), or `None` if that set is empty.
fn pick_reference(space: &TypedSpace, d: &PointSet, p: usize) -> Option<usize> {
    if d.is_empty() {
        return None;
    }
    let ports = port_members(space, d, p);
    let mut best: Option<(usize, usize)> = None;
    for y in ports {
        let m = tracks_unchecked(space, &PointSet::from([y]), p).len();
        if best.is_none_or(|(bm, _)| m > bm) {
            best = Some((m, y));
        }
    }
    best.map(|(_, y)| y)
}

/// Reference point for the stage following `q`-level `k`:
/// a member of `port_p(Track^q_{k+1}(x))` with the largest track count.
pub fn reference_point(
    space: &TypedSpace,
    x: usize,
    p: usize,
    q: usize,
    k: usize,
) -> Result<Option<usize>> {
    space.check_point(x)?;
    check_order(space, p, q)?;
    let tq = tracks_unchecked(space, &PointSet::from([x]), q);
    let d = tq.get(k + 1).cloned().unwrap_or_default();
    Ok(pick_reference(space, &d, p))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extension {
    pub map: IndexMap,
    pub space: TypedSpace,
    pub log: SurgeryLog,
    pub stages: Vec<PqStage>,
    /// `(point, kept, rejected)` when a later stage proposed another value.
    pub conflicts: Vec<(usize, IndexValue, IndexValue)>,
}

/// Extend the index over all of `tr_q(x)`.
///
/// Requires `x` to be `(p, q)`-uniformly typed and `tr_q(x)` to be
/// `(p, q)`-straight. Stage `t >= 2` anchors its reference point at
/// `index(x_{t-1}) + r_t + i^{t-1}_last`.
pub fn full_extension(space: &TypedSpace, x: usize, p: usize, q: usize) -> Result<Extension> {
    let first = pq_decomposition(space, x, p, q)?;
    if !is_pq_straight(space, x, p, q)?.straight {
        return Err(Error::NotPqStraight {
            p: space.type_label(p).to_string(),
            q: space.type_label(q).to_string(),
            origin: space.id(x).0.clone(),
        });
    }
    let tq = tracks_unchecked(space, &PointSet::from([x]), q);
    let lq = level_of(space.len(), &tq);
    let tr_q: PointSet = tq.iter().flatten().copied().collect();

    let mut map = IndexMap::empty(p, Some(q), x);
    let mut conflicts = Vec::new();
    let mut log = SurgeryLog::default();
    let mut stages = Vec::new();
    // A_1 ∪ ... ∪ A_t ∪ K_1 ∪ ... ∪ K_{t-1}, for the literal B_t
    let mut a_k = PointSet::new();

    let (m, mut s, l) = extend_index_a1(space, &first, p)?;
    merge(&mut map, m, &mut conflicts);
    log.entries.extend(l.entries);
    a_k.extend(&first.a);
    let mut prev_k_set = first.k_set.clone();
    stages.push(first);

    loop {
        let claimed = map.domain();
        let remaining: PointSet = tr_q.difference(&claimed).copied().collect();
        if remaining.is_empty() {
            break;
        }
        let prev = stages.last().unwrap();
        let t = prev.stage + 1;
        let stalled = Error::StageStalled {
            stage: t,
            remaining: remaining.len(),
        };
        let Some(level) = (prev.k + 1..tq.len()).find(|&l| !tq[l].is_disjoint(&remaining)) else {
            return Err(stalled);
        };
        let d: PointSet = tq[level].difference(&claimed).copied().collect();
        let xt = pick_reference(&s, &d, p).ok_or(stalled.clone())?;

        let prev_tracks = tracks_unchecked(&s, &PointSet::from([prev.reference]), p);
        let r = prev_tracks
            .iter()
            .position(|t| !t.is_disjoint(s.umin(xt, q)))
            .unwrap_or(prev_tracks.len());
        let prev_anchor = map.get(prev.reference).unwrap_or(prev.anchor);
        let last_i = prev.i_seq.last().copied().unwrap_or(0);
        let anchor = IndexValue::new(prev_anchor.major + r as i64 + last_i as i64, 0);

        let tp = tracks_unchecked(&s, &PointSet::from([xt]), p);
        let reach_level = tp
            .iter()
            .flatten()
            .map(|&y| lq[y].unwrap_or(usize::MAX))
            .max()
            .unwrap_or(level);
        let k = reach_level.max(prev.k + 1).min(tq.len() - 1);
        let i_seq = i_sequence(&tp, &lq, prev.k + 1..=k);
        let start = prev.k;

        a_k.extend(&prev_k_set);
        let a: PointSet = tq
            .iter()
            .take(k + 1)
            .flatten()
            .copied()
            .filter(|y| !claimed.contains(y))
            .collect();
        a_k.extend(&a);
        let b: PointSet = tr_q.difference(&a_k).copied().collect();
        let tr_xt: PointSet = tp.iter().flatten().copied().collect();
        let c: PointSet = a.difference(&tr_xt).copied().collect();
        let k_set = tr_unchecked(&s, &c, p);

        let stage = PqStage {
            stage: t,
            reference: xt,
            anchor,
            start,
            k,
            i_seq,
            a,
            b,
            c,
            k_set,
            r: Some(r),
        };
        let (m, next, l) = extend_index_a1(&s, &stage, p)?;
        let before = map.len();
        merge(&mut map, m, &mut conflicts);
        if map.len() == before {
            return Err(stalled);
        }
        s = next;
        log.entries.extend(l.entries);
        prev_k_set = stage.k_set.clone();
        stages.push(stage);
    }
    Ok(Extension {
        map,
        space: s,
        log,
        stages,
        conflicts,
    })
}

fn merge(
    map: &mut IndexMap,
    other: IndexMap,
    conflicts: &mut Vec<(usize, IndexValue, IndexValue)>,
) {
    for (y, v) in other.entries {
        match map.entries.get(&y) {
            None => {
                map.entries.insert(y, v);
            }
            Some(&kept) if kept != v => conflicts.push((y, kept, v)),
            Some(_) => {}
        }
    }
}
