use super::Coord2;
use crate::error::{Error, Result};

/// Positive slack `ε` such that the closed half-disk neighborhoods of radius
/// `r` coincide with their strict forms `d < r + ε`, `c < a + ε`
/// (resp. `c > a - ε`).
///
/// `ε = min(r1, r2)` where `r1` is the smallest excess `d(x, y) - r` over
/// pairs farther apart than `r` and `r2` the smallest positive horizontal gap.
/// An empty minimum is skipped.
pub fn boundary_epsilon(points: &[Coord2], r: f64) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: points.len(),
        });
    }
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "radius {r} must be positive"
        )));
    }
    let r2 = r * r;
    let mut r1 = f64::INFINITY;
    let mut gap = f64::INFINITY;
    for a in points {
        for b in points {
            let d2 = a.dist_sq(b);
            if d2 > r2 {
                r1 = r1.min(d2.sqrt() - r);
            }
            if b.x > a.x {
                gap = gap.min(b.x - a.x);
            }
        }
    }
    let eps = r1.min(gap);
    if eps.is_finite() && eps > 0.0 {
        Ok(eps)
    } else {
        Err(Error::EpsilonUndefined)
    }
}

/// Smallest distance between two distinct points.
pub fn min_pairwise_gamma(points: &[Coord2]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: points.len(),
        });
    }
    let mut best = f64::INFINITY;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            let d2 = a.dist_sq(b);
            if d2 == 0.0 {
                return Err(Error::DuplicateCoordinates {
                    first: format!("({},{})", a.x, a.y),
                    second: format!("({},{})", b.x, b.y),
                    x: a.x,
                    y: a.y,
                });
            }
            best = best.min(d2);
        }
    }
    Ok(best.sqrt())
}
