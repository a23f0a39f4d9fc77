mod common;

use common::*;
use krboot::constructions::{disjoint_chain, k4_chain};
use krboot::engine::{check_clique_growth, diameter};
use krboot::verify::{
    classify_set, find_external_kr_minus, find_external_kr_minus_exhaustive, is_valid_chain,
};
use krboot::{run, step, Chain, EdgeId, Graph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn step_matches_oracle_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..300 {
        let n = rng.gen_range(2..=8);
        let r = rng.gen_range(3..=5);
        let g = random_graph(n, rng.gen_range(0.2..0.9), &mut rng);
        assert_eq!(step(&g, r).unwrap(), step_oracle(&adjacency(&g), r), "{g:?} r={r}");
    }
}

#[test]
fn whole_runs_match_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for _ in 0..150 {
        let n = rng.gen_range(3..=8);
        let r = rng.gen_range(3..=5);
        let g = random_graph(n, rng.gen_range(0.3..0.8), &mut rng);
        let (t, steps) = run_oracle(&adjacency(&g), r);
        let out = run(&g, r, None).unwrap();
        assert_eq!(out.result.stabilization_time, t);
        assert_eq!(out.trace.steps(), steps.as_slice());
    }
}

#[test]
fn wide_graphs_cross_word_boundaries() {
    // Sparse graphs on more than 64 vertices, where rows span several words.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10 {
        let g = random_graph(70, 0.08, &mut rng);
        assert_eq!(step(&g, 3).unwrap(), step_oracle(&adjacency(&g), 3));
    }
}

#[test]
fn diameter_matches_floyd_warshall() {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    for _ in 0..300 {
        let n = rng.gen_range(1..=40);
        let g = random_graph(n, rng.gen_range(0.02..0.5), &mut rng);
        assert_eq!(diameter(&g), diameter_oracle(&adjacency(&g)), "{g:?}");
    }
    for n in [2, 63, 64, 65, 130] {
        let g = Graph::from_edges(n, (1..n).map(|v| (v - 1, v))).unwrap();
        assert_eq!(diameter(&g), Some(n - 1));
    }
}

#[test]
fn clique_growth_matches_exhaustive_cliques() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for _ in 0..200 {
        let g = random_graph(7, rng.gen_range(0.3..0.7), &mut rng);
        let out = run(&g, 4, None).unwrap();
        let mut snaps = vec![adjacency(&g)];
        for s in out.trace.steps() {
            let mut next = snaps.last().unwrap().clone();
            for e in s {
                let (u, v) = e.endpoints();
                next[u][v] = true;
                next[v][u] = true;
            }
            snaps.push(next);
        }
        let t_final = snaps.len() - 1;
        let holds = out.trace.steps().iter().enumerate().all(|(i, s)| {
            let t = i + 1;
            s.iter().all(|e| {
                let (u, v) = e.endpoints();
                (0..=1).any(|d| {
                    max_clique_through(&snaps[(t + d).min(t_final)], u, v) >= t + 3 + d
                })
            })
        });
        assert_eq!(check_clique_growth(&g, &out.trace).unwrap().holds, holds);
    }
}

#[test]
fn external_search_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    for _ in 0..300 {
        let r = rng.gen_range(4..=6);
        let n = rng.gen_range(r..=12);
        let t = rng.gen_range(1..=4);
        let chain = random_chain_shape(n, r, t, &mut rng);
        let expected = external_krm_oracle(&chain);
        assert_eq!(find_external_kr_minus(&chain).unwrap(), expected, "{chain:?}");
        assert_eq!(find_external_kr_minus_exhaustive(&chain).unwrap(), expected);
    }
}

#[test]
fn classify_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    for _ in 0..300 {
        let r = rng.gen_range(4..=6);
        let n = rng.gen_range(r + 1..=11);
        let chain = random_chain_shape(n, r, rng.gen_range(1..=3), &mut rng);
        let mut g = chain.union_graph();
        for _ in 0..rng.gen_range(0..4) {
            let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if u != v {
                g.add_edge(u, v);
            }
        }
        let size = rng.gen_range(2..r);
        let mut a = rand::seq::index::sample(&mut rng, n, size).into_vec();
        a.sort_unstable();
        let rep = classify_set(&g, &chain, &a).unwrap();
        let (lvl, witness) = classify_oracle(&adjacency(&g), &chain, &a);
        assert_eq!((level(rep.verdict), rep.witness), (lvl, witness), "{chain:?} A={a:?}");
    }
}

#[test]
fn external_examples() {
    let two = Chain {
        r: 5,
        n: 8,
        cliques: vec![vec![0, 1, 2, 3, 4], vec![3, 4, 5, 6, 7]],
        shared_edges: vec![EdgeId::new(0, 1), EdgeId::new(3, 4), EdgeId::new(5, 6)],
    };
    assert_eq!(find_external_kr_minus(&two).unwrap(), None);
    assert_eq!(external_krm_oracle(&two), None);

    // A third clique through {0,5} and {1,6} closes B = {0,1,3,4,5} up to
    // nine or more edges; search all fillers for such a chain.
    let mut hits = 0;
    for x in [2, 8, 9] {
        let mut chain = two.clone();
        chain.n = 10;
        chain.cliques.push(vec![0, 1, 5, 6, x]);
        chain.shared_edges = vec![
            EdgeId::new(0, 1),
            EdgeId::new(3, 4),
            EdgeId::new(5, 6),
            EdgeId::new(1, x),
        ];
        let found = find_external_kr_minus(&chain).unwrap();
        assert_eq!(found, external_krm_oracle(&chain));
        assert!(found.is_some());
        let union = chain.union_graph();
        let b = [0, 1, 3, 4, 5];
        let edges = b
            .iter()
            .enumerate()
            .flat_map(|(i, &p)| b[i + 1..].iter().map(move |&q| (p, q)))
            .filter(|&(p, q)| union.has_edge(p, q))
            .count();
        if edges >= 9 {
            hits += 1;
        }
    }
    assert_eq!(hits, 3);
}

#[test]
fn disjoint_chains_are_valid_and_good() {
    for r in 4..=6 {
        for t in 1..=4 {
            let cg = disjoint_chain(r, t).unwrap();
            assert!(is_valid_chain(&cg.chain).unwrap());
            if cg.chain.n <= 12 {
                let expected = external_krm_oracle(&cg.chain);
                assert_eq!(find_external_kr_minus(&cg.chain).unwrap(), expected);
            }
            if r >= 5 {
                assert_eq!(find_external_kr_minus(&cg.chain).unwrap(), None);
            }
        }
    }
}

#[test]
fn k4_chain_matches_oracle_run() {
    for n in 4..=9 {
        let g = k4_chain(n).unwrap();
        let (t, _) = run_oracle(&adjacency(&g), 4);
        assert_eq!(t, n - 3);
    }
}
