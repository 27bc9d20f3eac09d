use std::collections::BTreeMap;

use super::{
    validate_space, Coord2, Point, PointId, PointSet, Radius, Shape, TypeLabel, TypePoset,
    TypedSpace, ViolationKind,
};
use crate::error::{Error, Result};

fn reject_duplicate_coords(points: &[(PointId, Coord2)]) -> Result<()> {
    let mut seen: BTreeMap<(u64, u64), &PointId> = BTreeMap::new();
    for (id, c) in points {
        if !c.is_finite() {
            return Err(Error::NonFiniteCoordinate(id.0.clone()));
        }
        // normalise -0.0 so that it collides with 0.0
        let key = ((c.x + 0.0).to_bits(), (c.y + 0.0).to_bits());
        if let Some(first) = seen.insert(key, id) {
            let (a, b) = if first < id { (first, id) } else { (id, first) };
            return Err(Error::DuplicateCoordinates {
                first: a.0.clone(),
                second: b.0.clone(),
                x: c.x,
                y: c.y,
            });
        }
    }
    Ok(())
}

fn geometric_space(
    points: &[(PointId, Coord2)],
    types: Vec<(Shape, Radius)>,
) -> Result<TypedSpace> {
    reject_duplicate_coords(points)?;
    let mut order = Vec::new();
    for (i, (si, ri)) in types.iter().enumerate() {
        if !ri.is_valid() {
            return Err(Error::NonAscendingRadii);
        }
        // chain consecutive radii of the same family
        if let Some(j) = (0..i).rev().find(|&j| types[j].0 == *si) {
            if types[j].1.squared() >= ri.squared() {
                return Err(Error::NonAscendingRadii);
            }
            order.push((j, i));
        }
    }
    let labels = types
        .iter()
        .map(|&(s, r)| TypeLabel::geometric(s, r))
        .collect();
    let poset = TypePoset::new(labels, &order)?;

    let mut sorted: Vec<Point> = points
        .iter()
        .map(|(id, c)| Point::new(id.clone(), Some(*c)))
        .collect();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));
    let coords: Vec<Coord2> = sorted.iter().map(|p| p.coord.unwrap()).collect();
    let umin = types
        .iter()
        .map(|&(shape, r)| {
            let r2 = r.squared();
            coords
                .iter()
                .enumerate()
                .map(|(x, cx)| {
                    let mut nb: PointSet = coords
                        .iter()
                        .enumerate()
                        .filter(|(_, cy)| shape.contains(cx, cy, r2))
                        .map(|(y, _)| y)
                        .collect();
                    nb.insert(x);
                    nb
                })
                .collect()
        })
        .collect();
    TypedSpace::from_parts(sorted, poset, umin)
}

/// Metric-disk space: one type per radius, linearly ordered, with
/// `umin(x, r) = { y : d(x, y) < r } ∪ { x }`.
pub fn build_metric_space(points: &[(PointId, Coord2)], radii: &[Radius]) -> Result<TypedSpace> {
    if radii.is_empty() {
        return Err(Error::EmptySet("radii"));
    }
    geometric_space(points, radii.iter().map(|&r| (Shape::Disk, r)).collect())
}

/// Directed half-disk / quarter-disk space. Radii within one shape family
/// must ascend in the order given; families are mutually incomparable.
pub fn build_directed_2d_space(
    points: &[(PointId, Coord2)],
    specs: &[(Shape, Radius)],
) -> Result<TypedSpace> {
    if specs.is_empty() {
        return Err(Error::EmptySet("shape specs"));
    }
    if let Some((s, _)) = specs.iter().find(|(s, _)| !s.is_directed()) {
        return Err(Error::UnknownShape(s.tag().to_string()));
    }
    geometric_space(points, specs.to_vec())
}

/// Relation space: `umin(x, p) = { y : (x, y) ∈ p } ∪ { x }`.
///
/// A supplied order must respect neighborhood inclusion; the first violation
/// is returned as a witness.
pub fn build_relation_space(
    points: &[PointId],
    relations: &[(String, Vec<(PointId, PointId)>)],
    order: &[(String, String)],
) -> Result<TypedSpace> {
    let labels: Vec<TypeLabel> = relations
        .iter()
        .map(|(l, _)| TypeLabel::relation(l.clone()))
        .collect();
    let poset = TypePoset::from_label_pairs(labels, order)?;
    let mut sorted: Vec<Point> = points
        .iter()
        .map(|id| Point::new(id.clone(), None))
        .collect();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));
    let lookup: BTreeMap<&PointId, usize> =
        sorted.iter().enumerate().map(|(i, p)| (&p.id, i)).collect();
    let find = |id: &PointId| {
        lookup
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownPoint(id.0.clone()))
    };
    let n = sorted.len();
    let mut umin = Vec::with_capacity(relations.len());
    for (_, pairs) in relations {
        let mut table: Vec<PointSet> = (0..n).map(|x| PointSet::from([x])).collect();
        for (a, b) in pairs {
            let (a, b) = (find(a)?, find(b)?);
            table[a].insert(b);
        }
        umin.push(table);
    }
    let space = TypedSpace::from_parts(sorted, poset, umin)?;
    let report = validate_space(&space);
    if let Some(v) = report
        .violations
        .iter()
        .find(|v| v.kind == ViolationKind::Monotonicity)
    {
        return Err(Error::OrderViolation {
            p: v.types.0.clone(),
            q: v.types.1.clone().unwrap_or_default(),
            point: v.point.0.clone(),
            witness: v
                .offending
                .as_ref()
                .map(|w| w.0.clone())
                .unwrap_or_default(),
        });
    }
    Ok(space)
}
