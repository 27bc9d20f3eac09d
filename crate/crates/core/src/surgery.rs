//! Cuts, surgeries, separation surgeries, straightening and surrounding
//! trees. Every operation returns a new space and leaves its input intact.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::closure::{tr_point, tr_unchecked, tracks_unchecked};
use crate::connectivity::closure_parts;
use crate::error::{Error, Result};
use crate::space::{PointSet, TypedSpace};

/// `umin(z)` loses `y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutRecord {
    pub z: usize,
    pub y: usize,
    pub ty: usize,
}

/// Surgery keeping `y`'s cluster and pruning `z`'s.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurgeryRecord {
    pub z: usize,
    pub y: usize,
    pub ty: usize,
    /// `tr(y) ∩ tr(z)` before the surgery.
    pub affected: PointSet,
    /// `tr(z) \ tr(y)` before the surgery.
    pub removed: PointSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogEntry {
    Cut(CutRecord),
    Surgery(SurgeryRecord),
    /// A repeated point dropped from a separation sequence.
    Remove {
        point: usize,
        position: usize,
    },
    /// A scheduled surgery whose precondition failed; nothing was changed.
    Skip {
        z: usize,
        y: usize,
        ty: usize,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurgeryLog {
    pub entries: Vec<LogEntry>,
}

impl SurgeryLog {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn surgeries(&self) -> impl Iterator<Item = &SurgeryRecord> {
        self.entries.iter().filter_map(|e| match e {
            LogEntry::Surgery(s) => Some(s),
            _ => None,
        })
    }

    fn extend(&mut self, other: SurgeryLog) {
        self.entries.extend(other.entries);
    }

    /// Re-apply the log to `space`. Surgeries are recomputed and must match
    /// the recorded sets.
    pub fn replay(&self, space: &TypedSpace) -> Result<TypedSpace> {
        let mut s = space.clone();
        for entry in &self.entries {
            match entry {
                LogEntry::Cut(c) => s = cut(&s, c.z, c.y, c.ty)?.0,
                LogEntry::Surgery(rec) => {
                    let (next, got) = surgery(&s, rec.z, rec.y, rec.ty)?;
                    if got.affected != rec.affected || got.removed != rec.removed {
                        return Err(Error::InvalidParameter(format!(
                            "surgery ({}, {}) does not match the recorded sets",
                            s.id(rec.z),
                            s.id(rec.y)
                        )));
                    }
                    s = next;
                }
                LogEntry::Remove { .. } | LogEntry::Skip { .. } => {}
            }
        }
        Ok(s)
    }
}

/// `Cut(z, y)`: remove `y` from `umin(z, p)`.
pub fn cut(space: &TypedSpace, z: usize, y: usize, p: usize) -> Result<(TypedSpace, CutRecord)> {
    space.check_point(z)?;
    space.check_point(y)?;
    space.check_type(p)?;
    if z == y {
        return Err(Error::SamePoint(space.id(z).0.clone()));
    }
    let mut out = space.clone();
    out.remove_from_umin(z, p, &PointSet::from([y]));
    Ok((out, CutRecord { z, y, ty: p }))
}

/// `S(z, y)`: for each `w ∈ tr(y) ∩ tr(z)`, `umin(w) := umin(w) \ (tr(z) \ tr(y))`.
/// Afterwards `tr(y)` is unchanged and disjoint from the new `tr(z)`.
pub fn surgery(
    space: &TypedSpace,
    z: usize,
    y: usize,
    p: usize,
) -> Result<(TypedSpace, SurgeryRecord)> {
    space.check_point(z)?;
    space.check_point(y)?;
    space.check_type(p)?;
    if z == y {
        return Err(Error::SamePoint(space.id(z).0.clone()));
    }
    let tr_y = tr_point(space, y, p);
    let tr_z = tr_point(space, z, p);
    if tr_y.contains(&z) {
        return Err(Error::NotSurgeryEligible {
            inside: space.id(z).0.clone(),
            of: space.id(y).0.clone(),
        });
    }
    if tr_z.contains(&y) {
        return Err(Error::NotSurgeryEligible {
            inside: space.id(y).0.clone(),
            of: space.id(z).0.clone(),
        });
    }
    let affected: PointSet = tr_y.intersection(&tr_z).copied().collect();
    let removed: PointSet = tr_z.difference(&tr_y).copied().collect();
    let mut out = space.clone();
    for &w in &affected {
        out.remove_from_umin(w, p, &removed);
    }
    if cfg!(debug_assertions) {
        let new_y = tr_point(&out, y, p);
        let new_z = tr_point(&out, z, p);
        debug_assert_eq!(new_y, tr_y);
        debug_assert!(new_y.is_disjoint(&new_z));
        debug_assert_eq!(
            new_y.union(&new_z).copied().collect::<PointSet>(),
            tr_y.union(&tr_z).copied().collect::<PointSet>()
        );
    }
    Ok((
        out,
        SurgeryRecord {
            z,
            y,
            ty: p,
            affected,
            removed,
        },
    ))
}

fn is_eligible(space: &TypedSpace, z: usize, y: usize, p: usize) -> bool {
    z != y && !tr_point(space, y, p).contains(&z) && !tr_point(space, z, p).contains(&y)
}

/// Separation surgeries on `seq`: `(y2,y1), (y3,y1), ..., (yn,y1), (y3,y2), ...`.
/// Later occurrences of a repeated point are removed; pairs whose
/// precondition fails are logged as skipped.
///
/// Returns the new space, the log, and the sequence after removals.
pub fn separation_surgeries(
    space: &TypedSpace,
    seq: &[usize],
    p: usize,
) -> Result<(TypedSpace, SurgeryLog, Vec<usize>)> {
    if seq.is_empty() {
        return Err(Error::EmptySet("surgery sequence"));
    }
    for &y in seq {
        space.check_point(y)?;
    }
    space.check_type(p)?;
    let mut s = space.clone();
    let mut log = SurgeryLog::default();
    let mut seq = seq.to_vec();
    let mut i = 0;
    while i < seq.len() {
        let mut j = i + 1;
        while j < seq.len() {
            let (yi, yj) = (seq[i], seq[j]);
            if yi == yj {
                log.entries.push(LogEntry::Remove {
                    point: yj,
                    position: j,
                });
                seq.remove(j);
                continue;
            }
            if is_eligible(&s, yj, yi, p) {
                let (next, rec) = surgery(&s, yj, yi, p)?;
                s = next;
                log.entries.push(LogEntry::Surgery(rec));
            } else {
                log.entries.push(LogEntry::Skip {
                    z: yj,
                    y: yi,
                    ty: p,
                });
            }
            j += 1;
        }
        i += 1;
    }
    Ok((s, log, seq))
}

/// Cut every asymmetric link that jumps forward across tracks of `tr(x)`:
/// for `y ∈ T_i` and `z ∈ umin(y) ∩ tr(x) \ CL_i(x)` with `y ∉ umin(z)`,
/// `umin(y)` loses `z`. Links to points outside the cluster are left alone.
/// Tracks of `x` are unchanged and the result is straight.
pub fn straighten(space: &TypedSpace, x: usize, p: usize) -> Result<(TypedSpace, Vec<CutRecord>)> {
    space.check_point(x)?;
    space.check_type(p)?;
    let tracks = tracks_unchecked(space, &PointSet::from([x]), p);
    let cluster: PointSet = tracks.iter().flatten().copied().collect();
    let mut cl = PointSet::new();
    let mut cuts = Vec::new();
    for t in &tracks {
        cl.extend(t);
        for &y in t {
            for &z in space.umin(y, p) {
                if cluster.contains(&z) && !cl.contains(&z) && !space.umin(z, p).contains(&y) {
                    cuts.push(CutRecord { z: y, y: z, ty: p });
                }
            }
        }
    }
    let mut out = space.clone();
    for c in &cuts {
        out.remove_from_umin(c.z, p, &PointSet::from([c.y]));
    }
    Ok((out, cuts))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurroundingTree {
    pub root: usize,
    /// `L_0 = [d0], L_1, ...`, each point at exactly one level.
    pub levels: Vec<Vec<usize>>,
    /// Children per node, after repeated points were kept under their
    /// first parent only.
    pub children: BTreeMap<usize, Vec<usize>>,
    /// `PS_i`: node surgeries of level `i` followed by the separation
    /// surgeries on level `i + 1`.
    pub level_surgeries: Vec<SurgeryLog>,
}

impl SurroundingTree {
    pub fn parent_of(&self, e: usize) -> Option<usize> {
        self.children
            .iter()
            .find(|(_, c)| c.contains(&e))
            .map(|(&d, _)| d)
    }

    pub fn level_of(&self, e: usize) -> Option<usize> {
        self.levels.iter().position(|l| l.contains(&e))
    }

    pub fn height(&self) -> usize {
        self.levels.len() - 1
    }
}

/// Place a closure-connected set `d` on a surrounding tree rooted at `d0` and
/// run the per-level surgeries.
///
/// Children of a node are the not-yet-placed points whose cluster meets the
/// node's cluster in the input space. Pairs whose surgery precondition fails
/// (possible when `d` is not a port) are logged as skipped.
pub fn surrounding_tree(
    space: &TypedSpace,
    d: &PointSet,
    d0: usize,
    p: usize,
) -> Result<(SurroundingTree, TypedSpace, SurgeryLog)> {
    if d.is_empty() {
        return Err(Error::EmptySet("point set"));
    }
    space.check_set(d)?;
    space.check_type(p)?;
    if !d.contains(&d0) {
        return Err(Error::RootNotInSet(space.id(d0).0.clone()));
    }
    if closure_parts(space, d, p).len() != 1 {
        return Err(Error::NotClosureConnected(space.type_label(p).to_string()));
    }
    let closures: BTreeMap<usize, PointSet> =
        d.iter().map(|&e| (e, tr_point(space, e, p))).collect();

    let mut s = space.clone();
    let mut log = SurgeryLog::default();
    let mut placed = PointSet::from([d0]);
    let mut levels = vec![vec![d0]];
    let mut children: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut level_surgeries = Vec::new();

    loop {
        let current = levels.last().unwrap().clone();
        let mut batch = SurgeryLog::default();
        let mut raw: Vec<(usize, Vec<usize>)> = Vec::new();
        for &node in &current {
            let kids: Vec<usize> = d
                .iter()
                .copied()
                .filter(|e| !placed.contains(e) && !closures[e].is_disjoint(&closures[&node]))
                .collect();
            raw.push((node, kids));
        }
        for (node, kids) in &raw {
            for &e in kids {
                if is_eligible(&s, e, *node, p) {
                    let (next, rec) = surgery(&s, e, *node, p)?;
                    s = next;
                    batch.entries.push(LogEntry::Surgery(rec));
                } else {
                    batch.entries.push(LogEntry::Skip {
                        z: e,
                        y: *node,
                        ty: p,
                    });
                }
            }
        }
        let seq: Vec<usize> = raw.iter().flat_map(|(_, k)| k.iter().copied()).collect();
        let mut next_level = Vec::new();
        if !seq.is_empty() {
            let (next, sep, kept) = separation_surgeries(&s, &seq, p)?;
            s = next;
            batch.extend(sep);
            next_level = kept;
        }
        // a repeated child stays with its first parent
        let mut claimed = PointSet::new();
        for (node, kids) in raw {
            let own: Vec<usize> = kids.into_iter().filter(|e| claimed.insert(*e)).collect();
            children.insert(node, own);
        }
        log.entries.extend(batch.entries.iter().cloned());
        level_surgeries.push(batch);
        if next_level.is_empty() {
            break;
        }
        placed.extend(&next_level);
        levels.push(next_level);
    }
    if cfg!(debug_assertions) {
        debug_assert_eq!(placed, *d);
        debug_assert_eq!(tr_unchecked(space, d, p), tr_unchecked(&s, d, p));
    }
    Ok((
        SurroundingTree {
            root: d0,
            levels,
            children,
            level_surgeries,
        },
        s,
        log,
    ))
}
