//! Input loading and point/type resolution.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use typtop_core::io::{read_points_csv, space_from_json};
use typtop_core::{
    build_directed_2d_space, build_metric_space, PointSet, Radius, Shape, TypedSpace,
};

use crate::{usage, Common};

pub fn space(c: &Common) -> Result<TypedSpace> {
    let path = c
        .input
        .as_deref()
        .ok_or_else(|| usage("--input is required"))?;
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if is_json(path, &text) {
        if !c.families.is_empty() {
            return Err(usage("--types only applies to CSV input"));
        }
        return Ok(space_from_json(&text)?);
    }
    let points = read_points_csv(text.as_bytes())?;
    if c.families.is_empty() {
        return Err(usage("CSV input needs at least one --types family"));
    }
    let mut specs = Vec::new();
    for f in &c.families {
        specs.extend(family(f)?);
    }
    if specs.iter().all(|(s, _)| *s == Shape::Disk) {
        let radii: Vec<Radius> = specs.iter().map(|&(_, r)| r).collect();
        Ok(build_metric_space(&points, &radii)?)
    } else if specs.iter().any(|(s, _)| *s == Shape::Disk) {
        Err(usage("disk families cannot be mixed with directed shapes"))
    } else {
        Ok(build_directed_2d_space(&points, &specs)?)
    }
}

fn is_json(path: &Path, text: &str) -> bool {
    path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{')
}

/// `shape:r1,r2,...`; a radius may be written `sqrt(v)`.
fn family(spec: &str) -> Result<Vec<(Shape, Radius)>> {
    let (shape, radii) = spec
        .split_once(':')
        .ok_or_else(|| usage(format!("bad --types `{spec}`, expected shape:r1,r2")))?;
    let shape: Shape = shape
        .trim()
        .parse()
        .map_err(|_| usage(format!("unknown shape `{shape}`")))?;
    radii
        .split(',')
        .map(|r| Ok((shape, radius(r.trim())?)))
        .collect()
}

fn radius(s: &str) -> Result<Radius> {
    let bad = || usage(format!("bad radius `{s}`"));
    if let Some(inner) = s.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
        Ok(Radius::from_squared(inner.parse().map_err(|_| bad())?))
    } else {
        Ok(Radius::new(s.parse().map_err(|_| bad())?))
    }
}

/// A point given as an id or, when the space has coordinates, as `x,y`.
pub fn point(space: &TypedSpace, s: &str) -> Result<usize> {
    if let Ok(x) = space.index_of(s) {
        return Ok(x);
    }
    let coords = s.trim_matches(|c| c == '(' || c == ')').split_once(',');
    if let Some((a, b)) = coords {
        if let (Ok(a), Ok(b)) = (a.trim().parse(), b.trim().parse()) {
            if let Some(x) = space.find_by_coord(a, b) {
                return Ok(x);
            }
        }
    }
    Err(usage(format!("no point `{s}`")))
}

pub fn points(space: &TypedSpace, names: &[String]) -> Result<PointSet> {
    names.iter().map(|n| point(space, n)).collect()
}

pub fn origin(space: &TypedSpace, c: &Common) -> Result<usize> {
    point(
        space,
        c.origin
            .as_deref()
            .ok_or_else(|| usage("--origin is required"))?,
    )
}

fn type_named(space: &TypedSpace, label: &str) -> Result<usize> {
    space.type_index(label).map_err(|_| {
        let known: Vec<&str> = (0..space.type_count())
            .map(|p| space.type_label(p))
            .collect();
        usage(format!(
            "unknown type `{label}` (have {})",
            known.join(", ")
        ))
    })
}

/// `--type`, or the only type of a single-type space.
pub fn p(space: &TypedSpace, c: &Common) -> Result<usize> {
    match &c.p {
        Some(l) => type_named(space, l),
        None if space.type_count() == 1 => Ok(0),
        None => Err(usage("--type is required")),
    }
}

pub fn q(space: &TypedSpace, c: &Common) -> Result<Option<usize>> {
    c.q.as_deref().map(|l| type_named(space, l)).transpose()
}
