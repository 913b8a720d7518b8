use collapse_lab::collapse::{
    dominated_set, find_dominator, newly_dominated_after_deletion, prune_phase, run_core, run_core_by, run_epoch2,
};
use collapse_lab::oracle::{euler_characteristic, is_dominated_via_link, non_isolated_isomorphic};
use collapse_lab::rng::rng_from_seed;
use collapse_lab::{AdjacencyGraph, VertexId};
use proptest::prelude::*;

fn graph() -> impl Strategy<Value = AdjacencyGraph> {
    (2usize..18).prop_flat_map(|n| {
        proptest::collection::vec((0..n as u32, 0..n as u32), 0..(n * 3)).prop_map(move |pairs| {
            let mut edges: Vec<(u32, u32)> = pairs
                .into_iter()
                .filter(|(a, b)| a != b)
                .map(|(a, b)| (a.min(b), a.max(b)))
                .collect();
            edges.sort_unstable();
            edges.dedup();
            AdjacencyGraph::from_edges(n, &edges).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn audit_survives_removals(g in graph(), picks in proptest::collection::vec(any::<u32>(), 0..10)) {
        let mut g = g;
        for p in picks {
            let alive: Vec<VertexId> = g.alive_vertices().collect();
            if alive.is_empty() { break; }
            let v = alive[p as usize % alive.len()];
            let former = g.remove_vertex(v).unwrap();
            prop_assert!(former.iter().all(|&u| !g.has_edge(u, v)));
            prop_assert!(g.audit().is_ok(), "{:?}", g.audit());
        }
    }

    #[test]
    fn phases_never_increase_f0(g in graph()) {
        let mut g = g;
        let mut last = g.non_isolated_count();
        loop {
            let report = prune_phase(&mut g);
            prop_assert!(report.f0_after <= last);
            prop_assert_eq!(report.f0_after, g.non_isolated_count());
            last = report.f0_after;
            if report.removed.is_empty() { break; }
        }
        prop_assert!(dominated_set(&g).is_empty());
    }

    #[test]
    fn containment_matches_link_cone(g in graph()) {
        for v in g.alive_vertices() {
            prop_assert_eq!(find_dominator(&g, v).unwrap().is_some(), is_dominated_via_link(&g, v, 30).unwrap());
        }
    }

    #[test]
    fn newly_dominated_matches_rescan(g in graph(), pick in any::<u32>()) {
        let alive: Vec<VertexId> = g.alive_vertices().collect();
        let b = alive[pick as usize % alive.len()];
        let before: Vec<VertexId> = dominated_set(&g);
        let newly = newly_dominated_after_deletion(&g, b).unwrap();
        let mut h = g.clone();
        h.remove_vertex(b).unwrap();
        let expected: Vec<VertexId> = dominated_set(&h).into_iter().filter(|v| !before.contains(v)).collect();
        prop_assert_eq!(newly, expected);
    }

    #[test]
    fn cores_agree_up_to_isomorphism(g in graph(), seed in any::<u64>()) {
        let chi = euler_characteristic(&g, 30).unwrap();
        let mut a = g.clone();
        run_core(&mut a);
        let mut b = g.clone();
        run_core_by(&mut b, |vs| vs.reverse());
        let mut c = g.clone();
        run_epoch2(&mut c, &mut rng_from_seed(seed));
        for h in [&b, &c] {
            prop_assert_eq!(h.non_isolated_count(), a.non_isolated_count());
            prop_assert!(non_isolated_isomorphic(h, &a));
            prop_assert_eq!(euler_characteristic(h, 30).unwrap(), chi);
        }
    }
}
