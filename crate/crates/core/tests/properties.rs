mod common;

use common::*;
use krboot::canon::canonical_form;
use krboot::constructions::{disjoint_chain, greedy_chain, random_chain, RandomChainConfig};
use krboot::engine::{diameter, snapshot};
use krboot::search::{exact_max_time, sampled_max_time};
use krboot::verify::{
    classify_set, covers_simply, find_external_kr_minus, is_valid_chain, Cover, Verdict,
};
use krboot::{run, step, EdgeId, Graph, Process};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let mut g = Graph::new(n);
            let mut k = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if bits[k] {
                        g.add_edge(u, v);
                    }
                    k += 1;
                }
            }
            g
        })
    })
}

fn permuted(g: &Graph, seed: u64) -> Graph {
    let mut perm: Vec<usize> = (0..g.n()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut rng);
    g.relabel(&perm).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn step_adds_only_non_edges_and_matches_oracle(g in graph_strategy(8), r in 3usize..=5) {
        let new = step(&g, r).unwrap();
        for e in &new {
            let (u, v) = e.endpoints();
            prop_assert!(!g.has_edge(u, v));
        }
        prop_assert!(new.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(new, step_oracle(&adjacency(&g), r));
    }

    #[test]
    fn runs_are_monotone_and_end_stable(g in graph_strategy(9), r in 3usize..=5) {
        let out = run(&g, r, None).unwrap();
        let res = &out.result;
        prop_assert!(!res.truncated);
        prop_assert_eq!(res.edges_per_step.len(), res.stabilization_time);
        prop_assert!(res.edges_per_step.iter().all(|&k| k > 0));
        prop_assert_eq!(
            res.edges_per_step.iter().sum::<usize>() + g.edge_count(),
            res.final_edges
        );
        prop_assert!(step(&out.graph, r).unwrap().is_empty());
        prop_assert_eq!(res.percolated, out.graph.is_complete());
        for t in 0..res.stabilization_time {
            let a = snapshot(&g, &out.trace, t).unwrap();
            let b = snapshot(&g, &out.trace, t + 1).unwrap();
            prop_assert!(a.edges().all(|e| b.has_edge(e.u as usize, e.v as usize)));
            prop_assert_eq!(step(&a, r).unwrap(), out.trace.added_at(t + 1).to_vec());
        }
    }

    #[test]
    fn incremental_process_equals_full_scans(g in graph_strategy(10), r in 3usize..=6) {
        let mut p = Process::new(g.clone(), r).unwrap();
        let mut full = g;
        loop {
            let expected = step(&full, r).unwrap();
            match p.advance() {
                None => {
                    prop_assert!(expected.is_empty());
                    break;
                }
                Some(delta) => {
                    let got: Vec<EdgeId> = delta.edges().collect();
                    prop_assert_eq!(&got, &expected);
                    for e in expected {
                        full.add_edge(e.u as usize, e.v as usize);
                    }
                }
            }
        }
    }

    #[test]
    fn stabilization_time_is_label_free(g in graph_strategy(9), r in 3usize..=5, seed in any::<u64>()) {
        let h = permuted(&g, seed);
        let a = run(&g, r, None).unwrap().result;
        let b = run(&h, r, None).unwrap().result;
        prop_assert_eq!(a.stabilization_time, b.stabilization_time);
        prop_assert_eq!(a.edges_per_step, b.edges_per_step);
    }

    #[test]
    fn canonical_form_is_label_free(g in graph_strategy(7), seed in any::<u64>()) {
        prop_assert_eq!(canonical_form(&g).unwrap(), canonical_form(&permuted(&g, seed)).unwrap());
    }

    #[test]
    fn edge_list_roundtrip(g in graph_strategy(12)) {
        let text = g.to_edge_list();
        prop_assert_eq!(Graph::parse_edge_list(&text).unwrap(), g);
    }

    #[test]
    fn diameter_agrees_with_floyd_warshall(g in graph_strategy(14)) {
        prop_assert_eq!(diameter(&g), diameter_oracle(&adjacency(&g)));
    }

    #[test]
    fn external_search_agrees_with_oracle(seed in any::<u64>(), r in 4usize..=5, t in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rand::Rng::gen_range(&mut rng, r..=12);
        let chain = random_chain_shape(n, r, t, &mut rng);
        prop_assert_eq!(find_external_kr_minus(&chain).unwrap(), external_krm_oracle(&chain));
    }

    #[test]
    fn classify_never_weakens_when_edges_grow(seed in any::<u64>(), extra in proptest::collection::vec((0usize..10, 0usize..10), 0..6)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let chain = random_chain_shape(10, 5, 2, &mut rng);
        let a = rand::seq::index::sample(&mut rng, 10, 3).into_vec();
        let g = chain.union_graph();
        let mut bigger = g.clone();
        for (u, v) in extra {
            if u != v {
                bigger.add_edge(u, v);
            }
        }
        let before = classify_set(&g, &chain, &a).unwrap();
        let after = classify_set(&bigger, &chain, &a).unwrap();
        prop_assert!(after.verdict >= before.verdict);
        if before.verdict != Verdict::Safe {
            prop_assert!(after.verdict != Verdict::Safe);
        }
        if let Some(b) = &after.witness {
            prop_assert!(a.iter().all(|v| b.contains(v)));
        }
    }

    #[test]
    fn good_valid_chains_add_one_edge_per_step(seed in any::<u64>(), t in 1usize..=12) {
        let mut cfg = RandomChainConfig::new(80, 5, t, seed);
        cfg.attempts = Some(16);
        if let Some(cg) = random_chain(&cfg).unwrap().built() {
            prop_assert!(is_valid_chain(&cg.chain).unwrap());
            prop_assert_eq!(find_external_kr_minus(&cg.chain).unwrap(), None);
            let out = run(&cg.graph, 5, None).unwrap();
            prop_assert_eq!(out.result.stabilization_time, t);
            for (i, e) in cg.withheld.iter().enumerate() {
                prop_assert_eq!(out.trace.added_at(i + 1), &[*e][..]);
            }
        }
    }

    #[test]
    fn random_chain_is_reproducible(seed in any::<u64>()) {
        let cfg = RandomChainConfig::new(60, 5, 5, seed);
        let a = random_chain(&cfg).unwrap();
        let b = random_chain(&cfg).unwrap();
        match (a, b) {
            (krboot::constructions::RandomChainOutcome::Built(x), krboot::constructions::RandomChainOutcome::Built(y)) => {
                prop_assert_eq!(x.chain, y.chain)
            }
            (krboot::constructions::RandomChainOutcome::Failed(x), krboot::constructions::RandomChainOutcome::Failed(y)) => {
                prop_assert_eq!(x, y)
            }
            _ => prop_assert!(false, "outcomes differ"),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn greedy_output_has_no_external_triangle(n in 30usize..=60, r in 5usize..=6) {
        let gc = greedy_chain(n, r, 1.0).unwrap();
        let sets = &gc.chain_graph.chain.cliques;
        for u in 0..n {
            for v in u + 1..n {
                for w in v + 1..n {
                    prop_assert_ne!(covers_simply(sets, [u, v, w]), Cover::Violation);
                }
            }
        }
    }

    #[test]
    fn sampled_search_is_reproducible(n in 5usize..=9, r in 3usize..=5, seed in any::<u64>()) {
        prop_assert_eq!(
            sampled_max_time(n, r, 1, seed).unwrap(),
            sampled_max_time(n, r, 1, seed).unwrap()
        );
    }
}

#[test]
fn dedup_does_not_change_maximum() {
    for n in 2..=5 {
        for r in 3..=5 {
            let a = exact_max_time(n, r, true).unwrap();
            let b = exact_max_time(n, r, false).unwrap();
            assert_eq!(a.max_time, b.max_time, "n={n} r={r}");
            assert_eq!(a.witness_graphs, b.witness_graphs, "n={n} r={r}");
        }
    }
}

#[test]
fn worker_count_does_not_change_results() {
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let a = one.install(|| exact_max_time(6, 4, false).unwrap());
    let b = four.install(|| exact_max_time(6, 4, false).unwrap());
    assert_eq!(a, b);
    let cfg = RandomChainConfig::new(100, 5, 10, 9);
    let x = one.install(|| random_chain(&cfg).unwrap().built().map(|c| c.chain));
    let y = four.install(|| random_chain(&cfg).unwrap().built().map(|c| c.chain));
    assert_eq!(x, y);
}

#[test]
fn disjoint_chain_cadence() {
    for r in 5..=6 {
        for t in 1..=6 {
            let cg = disjoint_chain(r, t).unwrap();
            let out = run(&cg.graph, r, None).unwrap();
            assert_eq!(out.result.stabilization_time, t);
            for (i, e) in cg.withheld.iter().enumerate() {
                assert_eq!(out.trace.added_at(i + 1), &[*e]);
            }
        }
    }
}
