//! `--oracle-check`: recompute results by brute force from `umin` alone.

use typtop_core::{PointSet, TypedSpace};

#[derive(Debug)]
pub struct Mismatch(pub String);

impl std::fmt::Display for Mismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "oracle mismatch: {}", self.0)
    }
}

impl std::error::Error for Mismatch {}

pub fn tracks(space: &TypedSpace, a: &PointSet, p: usize) -> Vec<PointSet> {
    let mut cur = a.clone();
    let mut out = vec![a.clone()];
    loop {
        let next: PointSet = (0..space.len())
            .filter(|&x| cur.contains(&x) || !space.umin(x, p).is_disjoint(&cur))
            .collect();
        if next == cur {
            return out;
        }
        out.push(next.difference(&cur).copied().collect());
        cur = next;
    }
}

/// Exhaustive bipartition search (exponential; small sets only).
pub fn connected(space: &TypedSpace, a: &PointSet, p: usize) -> bool {
    let pts: Vec<usize> = a.iter().copied().collect();
    let n = pts.len();
    if n <= 1 {
        return true;
    }
    (1u64..(1 << (n - 1))).all(|mask| {
        let right = mask << 1;
        let cover = |side: bool| -> PointSet {
            pts.iter()
                .enumerate()
                .filter(|&(i, _)| (right >> i & 1 == 1) == side)
                .flat_map(|(_, &x)| space.umin(x, p).intersection(a).copied())
                .collect()
        };
        !cover(true).is_disjoint(&cover(false))
    })
}
