mod common;

use common::*;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use typtop_core::branches::{enumerate_branches, track_components};
use typtop_core::closure::point_tracks;
use typtop_core::connectivity::{component, is_straight, is_type_p_connected};
use typtop_core::dbscan::{compare_with_tr, dbscan_classify, Role};
use typtop_core::indexing::{
    full_extension, index_closure_connected_set, index_inverse, index_roundtrip, is_pq_straight,
    is_uniformly_typed, IndexValue,
};
use typtop_core::io::{space_from_json, space_to_json};
use typtop_core::space::is_symmetrically_typed;
use typtop_core::surgery::{cut, separation_surgeries, straighten, surgery, surrounding_tree};
use typtop_core::{cl1, cln, tr, Coord2, Error, PointSet, TypedSpace};

fn trp(s: &TypedSpace, a: &PointSet, p: usize) -> PointSet {
    tr(s, a, p).unwrap().members
}

fn tr1(s: &TypedSpace, x: usize, p: usize) -> PointSet {
    trp(s, &PointSet::from([x]), p)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn closures_match_oracle(seed in any::<u64>()) {
        let s = random_space(seed, 12);
        let mut r = rng(seed ^ 1);
        let a = random_subset(&mut r, s.len());
        for p in 0..s.type_count() {
            let t = table(&s, p);
            prop_assert_eq!(cl1(&s, &a, p).unwrap(), oracle_cl1(&t, &a));
            let tracks = typtop_core::tracks(&s, &a, p).unwrap();
            prop_assert_eq!(&tracks.tracks, &oracle_tracks(&t, &a));
            let closed = trp(&s, &a, p);
            prop_assert_eq!(&closed, &oracle_tr(&t, &a));
            prop_assert_eq!(&trp(&s, &closed, p), &closed);
            prop_assert_eq!(cln(&s, &a, p, tracks.track_count()).unwrap(), closed);
        }
        // p <= q widens clusters
        for (p, q) in s.poset().strict_pairs().collect::<Vec<_>>() {
            prop_assert!(trp(&s, &a, p).is_subset(&trp(&s, &a, q)));
        }
    }

    #[test]
    fn connectivity_matches_exhaustive_oracle(seed in any::<u64>()) {
        let s = random_space(seed, 8);
        let mut r = rng(seed ^ 2);
        let a = random_subset(&mut r, s.len());
        for p in 0..s.type_count() {
            let t = table(&s, p);
            let (ok, witness) = is_type_p_connected(&s, &a, p).unwrap();
            prop_assert_eq!(ok, oracle_connected(&t, &a));
            if let Some(w) = witness {
                let cover = |side: &PointSet| -> PointSet {
                    side.iter().flat_map(|&x| t[x].iter().copied()).filter(|y| a.contains(y)).collect()
                };
                prop_assert!(!w.left.is_empty() && !w.right.is_empty());
                prop_assert_eq!(w.left.union(&w.right).copied().collect::<PointSet>(), a.clone());
                prop_assert!(cover(&w.left).is_disjoint(&cover(&w.right)));
            }
        }
    }

    #[test]
    fn connected_sets_stay_connected_under_closure(seed in any::<u64>()) {
        let s = random_space(seed, 12);
        let mut r = rng(seed ^ 3);
        let a = random_subset(&mut r, s.len());
        for p in 0..s.type_count() {
            if !is_type_p_connected(&s, &a, p).unwrap().0 {
                continue;
            }
            for n in 1..=3 {
                prop_assert!(is_type_p_connected(&s, &cln(&s, &a, p, n).unwrap(), p).unwrap().0);
            }
            prop_assert!(is_type_p_connected(&s, &trp(&s, &a, p), p).unwrap().0);
        }
    }

    #[test]
    fn components_are_closed_and_connected(seed in any::<u64>()) {
        let s = random_space(seed, 12);
        for p in 0..s.type_count() {
            let t = table(&s, p);
            for x in 0..s.len() {
                let c = component(&s, x, p).unwrap();
                prop_assert_eq!(&c, &oracle_component(&t, x));
                prop_assert!(is_type_p_connected(&s, &c, p).unwrap().0);
                prop_assert_eq!(&cl1(&s, &c, p).unwrap(), &c);
                prop_assert_eq!(&trp(&s, &c, p), &c);
                prop_assert!(tr1(&s, x, p).is_subset(&c));
            }
        }
    }

    #[test]
    fn symmetric_metric_spaces(seed in any::<u64>()) {
        let s = random_metric_space(seed, 12);
        for p in 0..s.type_count() {
            prop_assert!(is_symmetrically_typed(&s, p).unwrap().symmetric);
            for x in 0..s.len() {
                let cx = tr1(&s, x, p);
                prop_assert_eq!(&component(&s, x, p).unwrap(), &cx);
                let one = cl1(&s, &PointSet::from([x]), p).unwrap();
                for y in 0..s.len() {
                    let back = cl1(&s, &PointSet::from([y]), p).unwrap();
                    prop_assert_eq!(one.contains(&y), back.contains(&x));
                }
                for &y in &cx {
                    prop_assert_eq!(&tr1(&s, y, p), &cx);
                }
            }
        }
    }

    #[test]
    fn surgery_keeps_y_and_separates(seed in any::<u64>()) {
        let s = random_space(seed, 12);
        let mut r = rng(seed ^ 4);
        let p = r.gen_range(0..s.type_count());
        let (z, y) = (r.gen_range(0..s.len()), r.gen_range(0..s.len()));
        let (ty, tz) = (tr1(&s, y, p), tr1(&s, z, p));
        match surgery(&s, z, y, p) {
            Ok((after, rec)) => {
                prop_assert!(z != y && !ty.contains(&z) && !tz.contains(&y));
                let (ny, nz) = (tr1(&after, y, p), tr1(&after, z, p));
                prop_assert_eq!(&ny, &ty);
                prop_assert!(ny.is_disjoint(&nz));
                prop_assert_eq!(
                    ny.union(&nz).copied().collect::<PointSet>(),
                    ty.union(&tz).copied().collect::<PointSet>()
                );
                // only the shared region is touched
                for w in 0..s.len() {
                    if !rec.affected.contains(&w) {
                        prop_assert_eq!(after.umin(w, p), s.umin(w, p));
                    }
                }
            }
            Err(Error::SamePoint(_)) => prop_assert_eq!(z, y),
            Err(Error::NotSurgeryEligible { .. }) => prop_assert!(ty.contains(&z) || tz.contains(&y)),
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn separation_surgeries_on_ports(seed in any::<u64>()) {
        let s = random_space(seed, 12);
        let mut r = rng(seed ^ 5);
        let p = r.gen_range(0..s.type_count());
        let Some(part) = random_port_part(&s, &mut r, p) else { return Ok(()); };
        let mut seq: Vec<usize> = part.iter().copied().collect();
        // shuffled, with an occasional repeat
        seq.shuffle(&mut r);
        if r.gen_bool(0.3) {
            let dup = seq[r.gen_range(0..seq.len())];
            seq.push(dup);
        }
        let (after, log, kept) = separation_surgeries(&s, &seq, p).unwrap();
        let distinct: PointSet = seq.iter().copied().collect();
        prop_assert_eq!(kept.len(), distinct.len());
        for (i, &a) in kept.iter().enumerate() {
            for &b in &kept[i + 1..] {
                prop_assert!(tr1(&after, a, p).is_disjoint(&tr1(&after, b, p)));
            }
        }
        prop_assert_eq!(trp(&after, &distinct, p), trp(&s, &distinct, p));
        prop_assert_eq!(log.replay(&s).unwrap(), after);
    }

    #[test]
    fn surrounding_tree_on_ports(seed in any::<u64>()) {
        let s = random_space(seed, 12);
        let mut r = rng(seed ^ 6);
        let p = r.gen_range(0..s.type_count());
        let Some(d) = random_port_part(&s, &mut r, p) else { return Ok(()); };
        let d0 = *d.iter().nth(r.gen_range(0..d.len())).unwrap();
        let (tree, after, log) = surrounding_tree(&s, &d, d0, p).unwrap();
        // (1) every point at exactly one node
        let placed: Vec<usize> = tree.levels.iter().flatten().copied().collect();
        prop_assert_eq!(placed.len(), d.len());
        prop_assert_eq!(placed.iter().copied().collect::<PointSet>(), d.clone());
        prop_assert_eq!(tree.levels[0].clone(), vec![d0]);
        // (2) the cluster of D is preserved
        prop_assert_eq!(trp(&after, &d, p), trp(&s, &d, p));
        // (3) pairwise disjoint afterwards
        for (i, &a) in placed.iter().enumerate() {
            for &b in &placed[i + 1..] {
                prop_assert!(tr1(&after, a, p).is_disjoint(&tr1(&after, b, p)));
            }
        }
        prop_assert_eq!(log.replay(&s).unwrap(), after);
    }

    #[test]
    fn straighten_makes_straight(seed in any::<u64>()) {
        let s = random_space(seed, 12);
        let mut r = rng(seed ^ 7);
        let p = r.gen_range(0..s.type_count());
        let x = r.gen_range(0..s.len());
        let (st, cuts) = straighten(&s, x, p).unwrap();
        prop_assert!(is_straight(&st, x, p).unwrap().straight);
        prop_assert_eq!(point_tracks(&st, x, p).unwrap().tracks, point_tracks(&s, x, p).unwrap().tracks);
        // straight clusters can only lose links out of x itself (track 0)
        if is_straight(&s, x, p).unwrap().straight {
            prop_assert!(cuts.iter().all(|c| c.z == x));
        } else {
            prop_assert!(!cuts.is_empty());
        }
        let (again, more) = straighten(&st, x, p).unwrap();
        prop_assert!(more.is_empty());
        prop_assert_eq!(&again, &st);
        // straight clusters keep tracks local away from x; straightening
        // also clears the far links out of x
        let rep = is_straight(&s, x, p).unwrap();
        if rep.straight {
            prop_assert!(rep.locality.iter().all(|v| v.z == x));
        }
        prop_assert!(is_straight(&st, x, p).unwrap().locality.is_empty());
    }

    #[test]
    fn cut_touches_one_neighborhood(seed in any::<u64>()) {
        let s = random_space(seed, 12);
        let mut r = rng(seed ^ 8);
        let p = r.gen_range(0..s.type_count());
        let (z, y) = (r.gen_range(0..s.len()), r.gen_range(0..s.len()));
        if z == y {
            prop_assert!(cut(&s, z, y, p).is_err());
            return Ok(());
        }
        let (after, _) = cut(&s, z, y, p).unwrap();
        for w in 0..s.len() {
            for q in 0..s.type_count() {
                if (w, q) == (z, p) {
                    let mut want = s.umin(z, p).clone();
                    want.remove(&y);
                    prop_assert_eq!(after.umin(w, q), &want);
                } else {
                    prop_assert_eq!(after.umin(w, q), s.umin(w, q));
                }
            }
        }
    }

    #[test]
    fn dbscan_free_mode_equals_clusters(seed in any::<u64>()) {
        let s = random_metric_space(seed, 12);
        let coords: Vec<Coord2> = (0..s.len()).map(|x| s.coord(x).unwrap()).collect();
        for p in 0..s.type_count() {
            let cmp = compare_with_tr(&s, p, 3).unwrap();
            prop_assert!(cmp.free_mode_equal, "mismatches {:?}", cmp.free_mode_mismatches);
            let eps = s.poset().get(p).radius.unwrap().value();
            for min_pts in [1usize, 2, 3, 4] {
                let res = dbscan_classify(&coords, eps, min_pts).unwrap();
                for x in 0..s.len() {
                    if res.roles[x] == Role::Core {
                        let c = res.cluster(res.labels[x].unwrap());
                        let want = oracle_dbscan_cluster(&coords, eps, min_pts, x);
                        // borders shared by two clusters stay with the first claimant
                        prop_assert!(c.is_subset(&want));
                        for &b in want.difference(&c) {
                            prop_assert_eq!(res.roles[b], Role::Border);
                            prop_assert!(res.labels[b].is_some() && res.labels[b] != res.labels[x]);
                        }
                        // density-connected clusters are type-p-connected
                        prop_assert!(is_type_p_connected(&s, &c, p).unwrap().0);
                        prop_assert!(c.is_subset(&tr1(&s, x, p)));
                    }
                }
            }
        }
    }

    #[test]
    fn roundtrip_identity(seq in proptest::collection::vec(0usize..40, 0..8), k in 0usize..40) {
        let mut seq = seq;
        seq.sort();
        let last = seq.last().copied().unwrap_or(0);
        match index_roundtrip(k, &seq) {
            Ok(v) => {
                prop_assert!(k <= last);
                prop_assert_eq!(index_inverse(v, &seq).unwrap(), k);
                // the proof's subdivision: i_t <= k < i_{t+1}
                let t = v.major as usize;
                let lo = if t == 0 { 0 } else { seq[t - 1] };
                prop_assert!(lo <= k);
                prop_assert_eq!(v.minor as usize, k - lo);
                if t < seq.len() {
                    prop_assert!(k < seq[t]);
                }
            }
            Err(_) => prop_assert!(k > last),
        }
    }

    #[test]
    fn branches_are_well_formed(seed in any::<u64>()) {
        let s = random_space(seed, 12);
        let mut r = rng(seed ^ 9);
        let p = r.gen_range(0..s.type_count());
        let x = r.gen_range(0..s.len());
        let tracks = point_tracks(&s, x, p).unwrap();
        let comps = track_components(&s, x, p).unwrap().components;
        let branches = enumerate_branches(&s, x, p, false).unwrap();
        prop_assert!(!branches.is_empty());
        for b in &branches {
            prop_assert_eq!(&b.levels[0], &PointSet::from([x]));
            for (i, level) in b.levels.iter().enumerate() {
                prop_assert!(level.is_subset(tracks.track(i)));
                prop_assert!(comps[i].contains(level));
                prop_assert!(is_type_p_connected(&s, level, p).unwrap().0);
                if i > 0 {
                    prop_assert!(!level.is_disjoint(&cl1(&s, &b.levels[i - 1], p).unwrap()));
                }
            }
            // maximal: nothing in the next track links on
            let lastl = b.levels.last().unwrap();
            if let Some(next) = comps.get(b.levels.len()) {
                let reach = cl1(&s, lastl, p).unwrap();
                prop_assert!(next.iter().all(|c| c.is_disjoint(&reach)));
            }
        }
        let choices: Vec<&Vec<usize>> = branches.iter().map(|b| &b.choice).collect();
        prop_assert!(choices.windows(2).all(|w| w[0] < w[1]));
        for a in &choices {
            for b in &choices {
                prop_assert!(a == b || !b.starts_with(a));
            }
        }
        let all = enumerate_branches(&s, x, p, true).unwrap();
        prop_assert!(all.len() >= branches.len());
    }

    #[test]
    fn json_roundtrip(seed in any::<u64>()) {
        let s = if seed % 2 == 0 { random_space(seed, 12) } else { random_metric_space(seed, 12) };
        let text = serde_json::to_string(&space_to_json(&s)).unwrap();
        let back = space_from_json(&text).unwrap();
        prop_assert_eq!(back.fingerprint(), s.fingerprint());
        prop_assert_eq!(back, s);
    }

    #[test]
    fn joint_index_covers_port_clusters(seed in any::<u64>()) {
        let s = random_space(seed, 12);
        let mut r = rng(seed ^ 10);
        let p = r.gen_range(0..s.type_count());
        let Some(d) = random_port_part(&s, &mut r, p) else { return Ok(()); };
        let d0 = *d.iter().next().unwrap();
        let base = IndexValue::new(r.gen_range(-5..5), 0);
        let (m, after, _) = index_closure_connected_set(&s, &d, d0, base, p).unwrap();
        prop_assert_eq!(m.domain(), trp(&after, &d, p));
        prop_assert_eq!(m.get(d0), Some(base));
    }

    #[test]
    fn full_extension_covers_uniform_straight_clusters(seed in any::<u64>()) {
        let s = random_space(seed, 12);
        if s.type_count() < 2 {
            return Ok(());
        }
        let mut r = rng(seed ^ 11);
        let x = r.gen_range(0..s.len());
        let (p, q) = (0, s.type_count() - 1);
        let uniform = is_uniformly_typed(&s, x, p, q).unwrap().uniform;
        let straight = is_pq_straight(&s, x, p, q).unwrap().straight;
        match full_extension(&s, x, p, q) {
            Ok(ext) => {
                prop_assert!(uniform && straight);
                prop_assert_eq!(ext.map.domain(), tr1(&s, x, q));
                prop_assert_eq!(ext.map.get(x), Some(IndexValue::ZERO));
            }
            Err(Error::NotUniform { .. }) => prop_assert!(!uniform),
            Err(Error::NotPqStraight { .. }) => prop_assert!(uniform && !straight),
            Err(e) => prop_assert!(false, "uniform, pq-straight cluster failed: {e}"),
        }
    }
}
