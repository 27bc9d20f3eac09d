//! File formats: points CSV, space / track / branch / index / log JSON, and
//! a deterministic SVG scatter plot.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Read;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::branches::{Branch, TrackComponents};
use crate::closure::TrackDecomposition;
use crate::connectivity::StraightnessReport;
use crate::dbscan::{DbscanResult, Role};
use crate::error::{Error, Result};
use crate::indexing::{IndexMap, IndexValue};
use crate::space::{
    Coord2, Point, PointId, PointSet, Radius, Shape, TypeLabel, TypePoset, TypedSpace,
};
use crate::surgery::{CutRecord, LogEntry, SurgeryLog, SurgeryRecord};

#[derive(Debug, Deserialize)]
struct CsvRow {
    #[serde(default)]
    id: Option<String>,
    x: f64,
    y: f64,
}

/// Read `id,x,y` rows; a missing or blank id becomes `p<row>` (1-based).
pub fn read_points_csv<R: Read>(reader: R) -> Result<Vec<(PointId, Coord2)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut out = Vec::new();
    for (row, rec) in rdr.deserialize::<CsvRow>().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        let id = match rec.id {
            Some(s) if !s.is_empty() => s,
            _ => format!("p{}", row + 1),
        };
        let c = Coord2::new(rec.x, rec.y);
        if !c.is_finite() {
            return Err(Error::NonFiniteCoordinate(id));
        }
        out.push((PointId(id), c));
    }
    if out.is_empty() {
        return Err(Error::EmptySet("point list"));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointDoc {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeDoc {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<Shape>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    /// Present when the radius is not exactly the square root of `r²`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_squared: Option<f64>,
}

/// Space JSON document. `umin` is optional on input for geometric types.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceDoc {
    pub points: Vec<PointDoc>,
    pub types: Vec<TypeDoc>,
    #[serde(default)]
    pub order: Vec<(String, String)>,
    #[serde(default)]
    pub umin: BTreeMap<String, BTreeMap<String, Vec<String>>>,
}

impl SpaceDoc {
    pub fn from_space(space: &TypedSpace) -> Self {
        let points = space
            .points()
            .iter()
            .map(|p| PointDoc {
                id: p.id.0.clone(),
                x: p.coord.map(|c| c.x),
                y: p.coord.map(|c| c.y),
            })
            .collect();
        let types = space
            .poset()
            .labels()
            .iter()
            .map(|l| TypeDoc {
                label: l.label.clone(),
                shape: l.shape,
                r: l.radius.map(|r| r.value()),
                r_squared: l.radius.filter(|r| !r.is_plain()).map(|r| r.squared()),
            })
            .collect();
        let order = space
            .poset()
            .covers()
            .iter()
            .map(|&(p, q)| {
                (
                    space.type_label(p).to_string(),
                    space.type_label(q).to_string(),
                )
            })
            .collect();
        let umin = (0..space.type_count())
            .map(|p| {
                let rows = (0..space.len())
                    .map(|x| (space.id(x).0.clone(), space.id_strings(space.umin(x, p))))
                    .collect();
                (space.type_label(p).to_string(), rows)
            })
            .collect();
        SpaceDoc {
            points,
            types,
            order,
            umin,
        }
    }

    pub fn into_space(self) -> Result<TypedSpace> {
        let points: Vec<Point> = self
            .points
            .iter()
            .map(|p| match (p.x, p.y) {
                (Some(x), Some(y)) => Ok(Point::at(p.id.clone(), x, y)),
                (None, None) => Ok(Point::new(p.id.clone(), None)),
                _ => Err(Error::MissingCoordinates(p.id.clone())),
            })
            .collect::<Result<_>>()?;
        let labels: Vec<TypeLabel> = self
            .types
            .iter()
            .map(|t| {
                let radius = match (t.r_squared, t.r) {
                    (Some(s), _) => Some(Radius::from_squared(s)),
                    (None, Some(r)) => Some(Radius::new(r)),
                    (None, None) => None,
                };
                TypeLabel {
                    label: t.label.clone(),
                    radius,
                    shape: t.shape,
                }
            })
            .collect();
        let mut umin = self.umin;
        // recompute geometric neighborhoods that were left out
        for l in &labels {
            if umin.contains_key(&l.label) {
                continue;
            }
            let rows = match (l.shape, l.radius) {
                (Some(shape), Some(r)) if shape != Shape::Relation => {
                    let mut rows = BTreeMap::new();
                    for a in &points {
                        let ca = a
                            .coord
                            .ok_or_else(|| Error::MissingCoordinates(a.id.0.clone()))?;
                        let mut nb = vec![a.id.0.clone()];
                        for b in &points {
                            let cb = b
                                .coord
                                .ok_or_else(|| Error::MissingCoordinates(b.id.0.clone()))?;
                            if b.id != a.id && shape.contains(&ca, &cb, r.squared()) {
                                nb.push(b.id.0.clone());
                            }
                        }
                        rows.insert(a.id.0.clone(), nb);
                    }
                    rows
                }
                _ => points
                    .iter()
                    .map(|a| (a.id.0.clone(), vec![a.id.0.clone()]))
                    .collect(),
            };
            umin.insert(l.label.clone(), rows);
        }
        let poset = TypePoset::from_label_pairs(labels, &self.order)?;
        TypedSpace::from_id_neighborhoods(points, poset, &umin)
    }
}

pub fn space_to_json(space: &TypedSpace) -> Value {
    serde_json::to_value(SpaceDoc::from_space(space)).expect("space document serializes")
}

pub fn space_from_json(text: &str) -> Result<TypedSpace> {
    let doc: SpaceDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    doc.into_space()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrackDoc {
    pub origin: Vec<String>,
    #[serde(rename = "type")]
    pub ty: String,
    pub tracks: Vec<Vec<String>>,
}

impl TrackDoc {
    pub fn new(space: &TypedSpace, t: &TrackDecomposition) -> Self {
        Self {
            origin: space.id_strings(&t.origin),
            ty: space.type_label(t.ty).to_string(),
            tracks: t.tracks.iter().map(|s| space.id_strings(s)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentsDoc {
    pub origin: String,
    #[serde(rename = "type")]
    pub ty: String,
    pub components: Vec<Vec<Vec<String>>>,
}

impl ComponentsDoc {
    pub fn new(space: &TypedSpace, c: &TrackComponents) -> Self {
        Self {
            origin: space.id(c.origin).0.clone(),
            ty: space.type_label(c.ty).to_string(),
            components: c
                .components
                .iter()
                .map(|level| level.iter().map(|s| space.id_strings(s)).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchDoc {
    pub origin: String,
    #[serde(rename = "type")]
    pub ty: String,
    pub branches: Vec<Vec<Vec<String>>>,
}

impl BranchDoc {
    pub fn new(space: &TypedSpace, origin: usize, p: usize, branches: &[Branch]) -> Self {
        Self {
            origin: space.id(origin).0.clone(),
            ty: space.type_label(p).to_string(),
            branches: branches
                .iter()
                .map(|b| b.levels.iter().map(|l| space.id_strings(l)).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexMapDoc {
    pub p: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<String>,
    pub origin: String,
    pub entries: BTreeMap<String, (i64, u64)>,
}

impl IndexMapDoc {
    pub fn new(space: &TypedSpace, m: &IndexMap) -> Self {
        Self {
            p: space.type_label(m.p).to_string(),
            q: m.q.map(|q| space.type_label(q).to_string()),
            origin: space.id(m.origin).0.clone(),
            entries: m
                .entries
                .iter()
                .map(|(&y, v)| (space.id(y).0.clone(), (v.major, v.minor)))
                .collect(),
        }
    }

    pub fn into_map(self, space: &TypedSpace) -> Result<IndexMap> {
        Ok(IndexMap {
            p: space.type_index(&self.p)?,
            q: self.q.as_deref().map(|q| space.type_index(q)).transpose()?,
            origin: space.index_of(&self.origin)?,
            entries: self
                .entries
                .iter()
                .map(|(id, &(a, b))| Ok((space.index_of(id)?, IndexValue::new(a, b))))
                .collect::<Result<_>>()?,
        })
    }
}

pub fn straightness_json(space: &TypedSpace, x: usize, p: usize, r: &StraightnessReport) -> Value {
    let list = |v: &[crate::connectivity::StraightViolation]| -> Vec<Value> {
        v.iter()
            .map(|v| json!({"y": space.id(v.y).0, "z": space.id(v.z).0, "i": v.i, "j": v.j}))
            .collect()
    };
    json!({
        "origin": space.id(x).0,
        "type": space.type_label(p),
        "straight": r.straight,
        "violations": list(&r.violations),
        "locality": list(&r.locality),
    })
}

pub fn log_to_json(space: &TypedSpace, log: &SurgeryLog) -> Value {
    let id = |x: usize| Value::String(space.id(x).0.clone());
    let ids = |s: &PointSet| Value::from(space.id_strings(s));
    let ty = |p: usize| Value::String(space.type_label(p).to_string());
    Value::Array(
        log.entries
            .iter()
            .map(|e| match e {
                LogEntry::Cut(c) => json!({"op": "cut", "args": [id(c.z), id(c.y), ty(c.ty)]}),
                LogEntry::Surgery(s) => json!({"op": "surgery", "args": [
                    id(s.z), id(s.y), ty(s.ty), ids(&s.affected), ids(&s.removed)
                ]}),
                LogEntry::Remove { point, position } => {
                    json!({"op": "remove", "args": [id(*point), position]})
                }
                LogEntry::Skip { z, y, ty: p } => {
                    json!({"op": "skip", "args": [id(*z), id(*y), ty(*p)]})
                }
            })
            .collect(),
    )
}

pub fn log_from_json(space: &TypedSpace, value: &Value) -> Result<SurgeryLog> {
    let bad = |what: &str| Error::Parse(format!("surgery log: {what}"));
    let arr = value.as_array().ok_or_else(|| bad("expected an array"))?;
    let mut entries = Vec::with_capacity(arr.len());
    for item in arr {
        let op = item
            .get("op")
            .and_then(Value::as_str)
            .ok_or_else(|| bad("missing op"))?;
        let args = item
            .get("args")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing args"))?;
        let point = |i: usize| -> Result<usize> {
            let s = args
                .get(i)
                .and_then(Value::as_str)
                .ok_or_else(|| bad("point argument"))?;
            space.index_of(s)
        };
        let ty = |i: usize| -> Result<usize> {
            let s = args
                .get(i)
                .and_then(Value::as_str)
                .ok_or_else(|| bad("type argument"))?;
            space.type_index(s)
        };
        let set = |i: usize| -> Result<PointSet> {
            let list = args
                .get(i)
                .and_then(Value::as_array)
                .ok_or_else(|| bad("set argument"))?;
            list.iter()
                .map(|v| {
                    v.as_str()
                        .ok_or_else(|| bad("set member"))
                        .and_then(|s| space.index_of(s))
                })
                .collect()
        };
        entries.push(match op {
            "cut" => LogEntry::Cut(CutRecord {
                z: point(0)?,
                y: point(1)?,
                ty: ty(2)?,
            }),
            "surgery" => LogEntry::Surgery(SurgeryRecord {
                z: point(0)?,
                y: point(1)?,
                ty: ty(2)?,
                affected: set(3)?,
                removed: set(4)?,
            }),
            "remove" => LogEntry::Remove {
                point: point(0)?,
                position: args
                    .get(1)
                    .and_then(Value::as_u64)
                    .ok_or_else(|| bad("position argument"))? as usize,
            },
            "skip" => LogEntry::Skip {
                z: point(0)?,
                y: point(1)?,
                ty: ty(2)?,
            },
            other => return Err(bad(&format!("unknown op `{other}`"))),
        });
    }
    Ok(SurgeryLog { entries })
}

/// What to draw on top of the scatter.
pub enum Overlay<'a> {
    None,
    Tracks(&'a TrackDecomposition),
    Branches(&'a [Branch]),
    Dbscan(&'a DbscanResult),
}

const SIZE: f64 = 600.0;
const MARGIN: f64 = 30.0;
const TRACK_COLORS: [&str; 2] = ["#d62728", "#1f77b4"];
const DARK: &str = "#333333";
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

/// Deterministic SVG scatter: fixed canvas, points in id order, one `<g>`
/// per overlay group.
pub fn emit_svg(space: &TypedSpace, overlay: Overlay<'_>) -> Result<String> {
    let coords: Vec<Coord2> = (0..space.len())
        .map(|x| {
            space
                .coord(x)
                .ok_or_else(|| Error::MissingCoordinates(space.id(x).0.clone()))
        })
        .collect::<Result<_>>()?;
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for c in &coords {
        x0 = x0.min(c.x);
        x1 = x1.max(c.x);
        y0 = y0.min(c.y);
        y1 = y1.max(c.y);
    }
    let span = (x1 - x0).max(y1 - y0).max(1e-9);
    let scale = (SIZE - 2.0 * MARGIN) / span;
    let px = |c: &Coord2| {
        (
            MARGIN + (c.x - x0) * scale,
            SIZE - MARGIN - (c.y - y0) * scale,
        )
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SIZE} {SIZE}" width="{SIZE}" height="{SIZE}">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#
    );
    let circle = |svg: &mut String, x: usize, fill: &str| {
        let (cx, cy) = px(&coords[x]);
        let _ = writeln!(
            svg,
            r#"  <circle cx="{cx:.2}" cy="{cy:.2}" r="5" fill="{fill}"><title>{}</title></circle>"#,
            escape(space.id(x).as_str())
        );
    };
    let group = |svg: &mut String, class: &str, i: usize, set: &PointSet, fill: &str| {
        let _ = writeln!(svg, r#"<g class="{class}" data-index="{i}">"#);
        for &x in set {
            circle(svg, x, fill);
        }
        let _ = writeln!(svg, "</g>");
    };
    match overlay {
        Overlay::None => group(&mut svg, "points", 0, &space.all_points(), DARK),
        Overlay::Tracks(t) => {
            let members = t.members();
            let rest: PointSet = space.all_points().difference(&members).copied().collect();
            group(&mut svg, "excluded", 0, &rest, DARK);
            for (i, track) in t.tracks.iter().enumerate() {
                group(&mut svg, "track", i, track, TRACK_COLORS[i % 2]);
            }
        }
        Overlay::Branches(bs) => {
            let mut covered = PointSet::new();
            for b in bs {
                covered.extend(b.levels.iter().flatten());
            }
            let rest: PointSet = space.all_points().difference(&covered).copied().collect();
            group(&mut svg, "excluded", 0, &rest, DARK);
            for (i, b) in bs.iter().enumerate() {
                let pts: PointSet = b.levels.iter().flatten().copied().collect();
                group(&mut svg, "branch", i, &pts, PALETTE[i % PALETTE.len()]);
            }
        }
        Overlay::Dbscan(r) => {
            let noise: PointSet = (0..space.len())
                .filter(|&x| r.roles[x] == Role::Noise)
                .collect();
            group(&mut svg, "noise", 0, &noise, DARK);
            for c in 0..r.cluster_count() {
                group(
                    &mut svg,
                    "cluster",
                    c,
                    &r.cluster(c),
                    PALETTE[c % PALETTE.len()],
                );
            }
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
