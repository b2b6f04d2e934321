//! Property tests over random graphs, sets and measures.

mod common;

use coarse_lab::amenability::{folner_search, variational_ratio, variational_to_set, verify_witness, Outcome, SearchOptions};
use coarse_lab::certificates::{growth_compare, vertex_cheeger, Verdict};
use coarse_lab::generators::{Component, GraphFamily};
use coarse_lab::io::SpaceFile;
use coarse_lab::sparsification::{accounting_total, greedy_sparsify, verify_msp};
use coarse_lab::{FiniteMetricSpace, Graph, PointSet, ProbMeasure};
use proptest::prelude::*;

/// Connected graph on 2..=max_n vertices from a seed.
fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n, any::<u64>(), 0.0..0.4f64).prop_map(|(n, seed, p)| {
        let mut rng = common::rng(seed);
        common::random_connected(&mut rng, n, p)
    })
}

fn graph_with_set(max_n: usize) -> impl Strategy<Value = (Graph, PointSet)> {
    graph(max_n).prop_flat_map(|g| {
        let n = g.len();
        (Just(g), proptest::collection::vec(any::<bool>(), n))
            .prop_map(|(g, mask)| (g, PointSet::from_mask(&mask)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn graph_metric_axioms(g in graph(30)) {
        let s = FiniteMetricSpace::from_graph(&g);
        prop_assert!(s.check_metric().is_ok());
        for x in 0..s.len() {
            for y in 0..s.len() {
                prop_assert_eq!(s.d(x, y), s.d(y, x));
                prop_assert_eq!(s.d(x, y) == 0, x == y);
            }
        }
    }

    #[test]
    fn neighbourhood_splits_into_set_and_boundary((g, e) in graph_with_set(25), r in 0u32..4) {
        let s = FiniteMetricSpace::from_graph(&g);
        let nbhd = s.neighborhood(&e, r).unwrap();
        let bnd = s.boundary(&e, r).unwrap();
        prop_assert!(bnd.is_disjoint(&e));
        prop_assert_eq!(e.union(&bnd), nbhd);
        prop_assert_eq!(bnd.as_slice(), &common::boundary(&s, &e, r)[..]);
    }

    #[test]
    fn set_algebra((g, a) in graph_with_set(20), mask in proptest::collection::vec(any::<bool>(), 20)) {
        let b = PointSet::from_mask(&mask[..g.len()]);
        prop_assert_eq!(a.union(&b).len() + a.intersection(&b).len(), a.len() + b.len());
        prop_assert!(a.difference(&b).is_disjoint(&b));
        prop_assert!(a.intersection(&b).is_subset(&a));
    }

    #[test]
    fn found_witnesses_verify(g in graph(14), r in 1u32..3, eps in 0.2..2.0f64, s_max in 0u32..4) {
        let s = FiniteMetricSpace::from_graph(&g);
        let f = s.all_points();
        if let Outcome::Found(w) = folner_search(&s, &f, r, eps, s_max, SearchOptions::exact()).unwrap() {
            prop_assert!(verify_witness(&s, &w, Some(&f), None).unwrap());
            prop_assert!(s.diameter(&w.set) <= s_max);
            prop_assert!((common::boundary(&s, &w.set, r).len() as f64) < eps * w.set.len() as f64);
        }
    }

    #[test]
    fn best_layer_beats_the_function(g in graph(20), seed in any::<u64>(), r in 1u32..3) {
        let s = FiniteMetricSpace::from_graph(&g);
        let mut rng = common::rng(seed);
        let mu = common::random_measure(&mut rng, s.len(), 0.2);
        let phi: Vec<f64> = (0..s.len()).map(|x| if mu.weight(x) > 0.0 { 1.0 + x as f64 } else { 0.0 }).collect();
        let (lhs, rhs) = variational_ratio(&s, &mu, &phi, r);
        let layer = variational_to_set(&s, &mu, &phi, r).unwrap();
        prop_assert!(layer.ratio <= lhs / rhs + 1e-12);
    }

    #[test]
    fn greedy_sparsification_accounts_for_all_mass(g in graph(14), seed in any::<u64>(), eps in 0.3..2.0f64) {
        let s = FiniteMetricSpace::from_graph(&g);
        let mut rng = common::rng(seed);
        let mu = common::random_measure(&mut rng, s.len(), 0.3);
        let big_s = s.max_finite_distance();
        let d = greedy_sparsify(&s, &mu, 1, eps, big_s, SearchOptions::exact()).unwrap();
        prop_assert!((accounting_total(&d) - 1.0).abs() <= 1e-12);
        prop_assert!(verify_msp(&s, &mu, &d.pieces, 1, big_s, 1.0 / (1.0 + eps)).valid());
    }

    #[test]
    fn cheeger_is_a_minimum((g, a) in graph_with_set(14)) {
        let ch = vertex_cheeger(&g);
        let s = FiniteMetricSpace::from_graph(&g);
        if !a.is_empty() && 2 * a.len() <= g.len() {
            let ratio = common::boundary(&s, &a, 1).len() as f64 / a.len() as f64;
            prop_assert!(ch.epsilon <= ratio + 1e-12);
        }
    }

    #[test]
    fn growth_is_reflexive(f in proptest::collection::vec(0.0..100.0f64, 1..20)) {
        let grid = [1.0, 2.0, 4.0];
        let rel = growth_compare(&f, &f, &grid, &grid).unwrap();
        prop_assert_eq!(rel.verdict, Verdict::Dominated);
    }

    #[test]
    fn space_files_round_trip(gs in proptest::collection::vec(graph(8), 1..4)) {
        let comps: Vec<Component> = gs.into_iter().enumerate().map(|(i, g)| Component::new(format!("G{i}"), g)).collect();
        let fam = GraphFamily::chain(comps).unwrap();
        let text = serde_json::to_string(&SpaceFile::from_family(&fam, None)).unwrap();
        let back = SpaceFile::parse(&text).unwrap().to_family().unwrap();
        prop_assert_eq!(back.space().len(), fam.space().len());
        for x in 0..fam.space().len() {
            prop_assert_eq!(back.space().row(x), fam.space().row(x));
        }
    }

    #[test]
    fn uniform_measure_is_normalised(n in 1usize..50) {
        let mu = ProbMeasure::uniform(n).unwrap();
        prop_assert!((mu.total() - 1.0).abs() <= 1e-12);
    }
}
