use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use serde_json::{json, Value};
use typtop_core::branches::{enumerate_branches, track_components};
use typtop_core::closure::point_tracks;
use typtop_core::connectivity::{closure_decomposition, is_straight, port};
use typtop_core::dbscan::{compare_with_tr, dbscan_classify, DbscanResult};
use typtop_core::indexing::{base_index, full_extension, IndexValue};
use typtop_core::io::{
    emit_svg, log_from_json, log_to_json, space_to_json, straightness_json, BranchDoc,
    ComponentsDoc, IndexMapDoc, Overlay, TrackDoc,
};
use typtop_core::surgery::{
    separation_surgeries, straighten, surgery, surrounding_tree, LogEntry, SurgeryLog,
};
use typtop_core::{tr, Coord2, PointSet, TypedSpace};

use crate::oracle::{self, Mismatch};
use crate::{load, usage, Cli, Command, Common, OverlayKind, SurgeryAction};

struct Out<'a> {
    common: &'a Common,
}

impl Out<'_> {
    fn write(&self, name: &str, contents: &str) -> Result<PathBuf> {
        let dir = &self.common.out;
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        println!("wrote {}", path.display());
        Ok(path)
    }

    fn json(&self, name: &str, value: &Value) -> Result<PathBuf> {
        self.write(name, &(serde_json::to_string_pretty(value)? + "\n"))
    }

    fn space(&self, space: &TypedSpace) -> Result<PathBuf> {
        self.json("space.json", &space_to_json(space))
    }

    fn log(&self, space: &TypedSpace, log: &SurgeryLog) -> Result<PathBuf> {
        self.json("log.json", &log_to_json(space, log))
    }
}

fn ids(space: &TypedSpace, set: &PointSet) -> Vec<String> {
    space.id_strings(set)
}

fn id(space: &TypedSpace, x: usize) -> String {
    space.id(x).0.clone()
}

fn index_json(v: IndexValue) -> Value {
    json!([v.major, v.minor])
}

fn oracle_applies(c: &Common, space: &TypedSpace) -> bool {
    if c.oracle_check && space.len() > c.oracle_limit {
        eprintln!(
            "note: oracle check skipped ({} points > limit {})",
            space.len(),
            c.oracle_limit
        );
    }
    c.oracle_check && space.len() <= c.oracle_limit
}

pub fn run(cli: &Cli) -> Result<()> {
    let c = &cli.common;
    let out = Out { common: c };
    let space = load::space(c)?;
    match &cli.command {
        Command::Build => {
            out.space(&space)?;
        }
        Command::Tracks => {
            let (x, p) = (load::origin(&space, c)?, load::p(&space, c)?);
            let t = point_tracks(&space, x, p)?;
            if oracle_applies(c, &space) && oracle::tracks(&space, &t.origin, p) != t.tracks {
                return Err(Mismatch("tracks".into()).into());
            }
            out.json(
                "tracks.json",
                &serde_json::to_value(TrackDoc::new(&space, &t))?,
            )?;
        }
        Command::Cluster => {
            let (x, p) = (load::origin(&space, c)?, load::p(&space, c)?);
            let members = tr(&space, &PointSet::from([x]), p)?.members;
            if oracle_applies(c, &space)
                && oracle::tracks(&space, &PointSet::from([x]), p)
                    .into_iter()
                    .flatten()
                    .collect::<PointSet>()
                    != members
            {
                return Err(Mismatch("cluster".into()).into());
            }
            let excluded: PointSet = space.all_points().difference(&members).copied().collect();
            out.json(
                "cluster.json",
                &json!({
                    "origin": id(&space, x),
                    "type": space.type_label(p),
                    "members": ids(&space, &members),
                    "excluded": ids(&space, &excluded),
                }),
            )?;
        }
        Command::Components => {
            let (x, p) = (load::origin(&space, c)?, load::p(&space, c)?);
            let comps = track_components(&space, x, p)?;
            if oracle_applies(c, &space) {
                let tracks = oracle::tracks(&space, &PointSet::from([x]), p);
                for (i, level) in comps.components.iter().enumerate() {
                    let union: PointSet = level.iter().flatten().copied().collect();
                    if union != tracks[i]
                        || level.iter().any(|part| !oracle::connected(&space, part, p))
                    {
                        return Err(Mismatch(format!("components of track {i}")).into());
                    }
                }
            }
            out.json(
                "components.json",
                &serde_json::to_value(ComponentsDoc::new(&space, &comps))?,
            )?;
        }
        Command::Port { points } => {
            let p = load::p(&space, c)?;
            let set = if points.is_empty() {
                space.all_points()
            } else {
                load::points(&space, points)?
            };
            let pt = port(&space, &set, p)?;
            let parts = closure_decomposition(&space, &pt.members, p)?;
            out.json(
                "port.json",
                &json!({
                    "type": space.type_label(p),
                    "set": ids(&space, &set),
                    "members": ids(&space, &pt.members),
                    "parts": parts.iter().map(|s| ids(&space, s)).collect::<Vec<_>>(),
                }),
            )?;
        }
        Command::Straighten => {
            let (x, p) = (load::origin(&space, c)?, load::p(&space, c)?);
            let before = is_straight(&space, x, p)?;
            let (after_space, cuts) = straighten(&space, x, p)?;
            let after = is_straight(&after_space, x, p)?;
            let log = SurgeryLog {
                entries: cuts.into_iter().map(LogEntry::Cut).collect(),
            };
            println!(
                "{} violation(s), {} cut(s)",
                before.violations.len(),
                log.len()
            );
            out.json(
                "straighten.json",
                &json!({
                    "before": straightness_json(&space, x, p, &before),
                    "after": straightness_json(&after_space, x, p, &after),
                    "cuts": log.len(),
                }),
            )?;
            out.log(&space, &log)?;
            out.space(&after_space)?;
        }
        Command::Surgery { action } => match action {
            SurgeryAction::Apply { z, y } => {
                let p = load::p(&space, c)?;
                let (z, y) = (load::point(&space, z)?, load::point(&space, y)?);
                let (after, rec) = surgery(&space, z, y, p)?;
                let log = SurgeryLog {
                    entries: vec![LogEntry::Surgery(rec)],
                };
                out.log(&space, &log)?;
                out.space(&after)?;
            }
            SurgeryAction::Separate { points } => {
                let p = load::p(&space, c)?;
                let seq = points
                    .iter()
                    .map(|s| load::point(&space, s))
                    .collect::<Result<Vec<_>>>()?;
                let (after, log, kept) = separation_surgeries(&space, &seq, p)?;
                out.json(
                    "separation.json",
                    &json!({
                        "type": space.type_label(p),
                        "sequence": kept.iter().map(|&x| id(&space, x)).collect::<Vec<_>>(),
                        "surgeries": log.surgeries().count(),
                    }),
                )?;
                out.log(&space, &log)?;
                out.space(&after)?;
            }
            SurgeryAction::Replay { log } => {
                let text = fs::read_to_string(log)
                    .with_context(|| format!("reading {}", log.display()))?;
                let value: Value = serde_json::from_str(&text).context("parsing log")?;
                let after = log_from_json(&space, &value)?.replay(&space)?;
                out.space(&after)?;
            }
        },
        Command::Tree { points } => {
            let (root, p) = (load::origin(&space, c)?, load::p(&space, c)?);
            let d = load::points(&space, points)?;
            let (tree, after, log) = surrounding_tree(&space, &d, root, p)?;
            let children: serde_json::Map<String, Value> = tree
                .children
                .iter()
                .map(|(&k, v)| {
                    (
                        id(&space, k),
                        json!(v.iter().map(|&e| id(&space, e)).collect::<Vec<_>>()),
                    )
                })
                .collect();
            out.json(
                "tree.json",
                &json!({
                    "type": space.type_label(p),
                    "root": id(&space, tree.root),
                    "levels": tree.levels.iter().map(|l| l.iter().map(|&e| id(&space, e)).collect::<Vec<_>>()).collect::<Vec<_>>(),
                    "children": children,
                }),
            )?;
            out.log(&space, &log)?;
            out.space(&after)?;
        }
        Command::Index => {
            let (x, p) = (load::origin(&space, c)?, load::p(&space, c)?);
            match load::q(&space, c)? {
                None => {
                    let m = base_index(&space, x, p)?;
                    out.json(
                        "index.json",
                        &serde_json::to_value(IndexMapDoc::new(&space, &m))?,
                    )?;
                }
                Some(q) => {
                    let ext = full_extension(&space, x, p, q)?;
                    let mut doc = serde_json::to_value(IndexMapDoc::new(&ext.space, &ext.map))?;
                    doc["stages"] = ext
                        .stages
                        .iter()
                        .map(|s| {
                            json!({
                                "stage": s.stage,
                                "reference": id(&space, s.reference),
                                "anchor": index_json(s.anchor),
                                "k": s.k,
                                "r": s.r,
                            })
                        })
                        .collect();
                    doc["conflicts"] = ext
                        .conflicts
                        .iter()
                        .map(|&(y, kept, rejected)| {
                            json!([id(&space, y), index_json(kept), index_json(rejected)])
                        })
                        .collect();
                    out.json("index.json", &doc)?;
                    out.log(&space, &ext.log)?;
                    out.space(&ext.space)?;
                }
            }
        }
        Command::Branches { all_prefixes } => {
            let (x, p) = (load::origin(&space, c)?, load::p(&space, c)?);
            let b = enumerate_branches(&space, x, p, *all_prefixes)?;
            println!("{} branch(es)", b.len());
            out.json(
                "branches.json",
                &serde_json::to_value(BranchDoc::new(&space, x, p, &b))?,
            )?;
        }
        Command::Dbscan { eps, min_pts } => {
            let res = dbscan_classify(&coords(&space)?, *eps, *min_pts)?;
            println!("{} cluster(s)", res.cluster_count());
            out.json("dbscan.json", &dbscan_json(&space, &res))?;
        }
        Command::Compare { min_pts } => {
            let p = load::p(&space, c)?;
            let cmp = compare_with_tr(&space, p, *min_pts)?;
            out.json(
                "compare.json",
                &json!({
                    "type": space.type_label(p),
                    "min_pts": cmp.min_pts,
                    "free_mode_equal": cmp.free_mode_equal,
                    "free_mode_mismatches": cmp.free_mode_mismatches.iter().map(|&x| id(&space, x)).collect::<Vec<_>>(),
                    "seeds": cmp.standard.iter().map(|s| json!({
                        "seed": id(&space, s.seed),
                        "relation": s.relation,
                        "dbscan": ids(&space, &s.dbscan),
                        "cluster": ids(&space, &s.cluster),
                    })).collect::<Vec<_>>(),
                }),
            )?;
        }
        Command::Plot {
            overlay,
            eps,
            min_pts,
        } => {
            let svg = match overlay {
                OverlayKind::None => emit_svg(&space, Overlay::None)?,
                OverlayKind::Tracks => {
                    let t = point_tracks(&space, load::origin(&space, c)?, load::p(&space, c)?)?;
                    emit_svg(&space, Overlay::Tracks(&t))?
                }
                OverlayKind::Branches => {
                    let b = enumerate_branches(
                        &space,
                        load::origin(&space, c)?,
                        load::p(&space, c)?,
                        false,
                    )?;
                    emit_svg(&space, Overlay::Branches(&b))?
                }
                OverlayKind::Dbscan => {
                    let eps = match eps {
                        Some(e) => *e,
                        None => {
                            let p = load::p(&space, c)?;
                            space
                                .poset()
                                .get(p)
                                .radius
                                .ok_or_else(|| usage("--eps is required for non-radius types"))?
                                .value()
                        }
                    };
                    let res = dbscan_classify(&coords(&space)?, eps, *min_pts)?;
                    emit_svg(&space, Overlay::Dbscan(&res))?
                }
            };
            out.write("plot.svg", &svg)?;
        }
    }
    Ok(())
}

fn coords(space: &TypedSpace) -> Result<Vec<Coord2>> {
    (0..space.len())
        .map(|x| {
            space
                .coord(x)
                .ok_or_else(|| typtop_core::Error::MissingCoordinates(id(space, x)).into())
        })
        .collect()
}

fn dbscan_json(space: &TypedSpace, res: &DbscanResult) -> Value {
    let clusters: Vec<Vec<String>> = (0..res.cluster_count())
        .map(|k| ids(space, &res.cluster(k)))
        .collect();
    let roles: serde_json::Map<String, Value> = (0..space.len())
        .map(|x| (id(space, x), json!(res.roles[x])))
        .collect();
    json!({
        "eps": res.eps,
        "min_pts": res.min_pts,
        "clusters": clusters,
        "roles": roles,
    })
}
