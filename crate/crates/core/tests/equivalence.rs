use std::collections::{BTreeSet, HashMap};

use mbe_core::gen::{gen_bipartite, gen_er};
use mbe_core::parallel::{self, Algorithm};
use mbe_core::seq::{self, brute_force_oracle};
use mbe_core::{Biclique, Cluster, Engine, Graph, OrderKind, VertexId, VertexOrder};
use proptest::prelude::*;

fn graph_strategy() -> impl Strategy<Value = Graph> {
    prop_oneof![
        (1u64..=12, 0.0f64..=1.0, any::<u64>())
            .prop_map(|(n, p, seed)| gen_er(n, p, seed).unwrap()),
        (1u64..=6, 1u64..=6, 0.0f64..=1.0, any::<u64>())
            .prop_map(|(a, b, p, seed)| gen_bipartite(a, b, p, seed).unwrap()),
    ]
}

fn sorted(mut v: Vec<Biclique>) -> Vec<Biclique> {
    v.sort();
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sequential_enumerators_match_oracle(g in graph_strategy(), s in 1usize..=3) {
        let oracle: Vec<Biclique> = brute_force_oracle(&g, s).unwrap().into_iter().collect();
        let mut dfs = Vec::new();
        let summary = seq::mbe_dfs(&g, s, &mut dfs).unwrap();
        prop_assert_eq!(sorted(dfs), oracle.clone());
        prop_assert_eq!(summary.count as usize, oracle.len());
        prop_assert_eq!(summary.edge_sum, oracle.iter().map(Biclique::edge_weight).sum::<u64>());
        let mut cons = Vec::new();
        seq::mbe_consensus(&g, s, &mut cons).unwrap();
        prop_assert_eq!(sorted(cons), oracle);
    }

    #[test]
    fn pipelines_match_oracle(g in graph_strategy(), s in 1usize..=3, r in 1usize..=8) {
        let oracle: Vec<Biclique> = brute_force_oracle(&g, s).unwrap().into_iter().collect();
        for algo in Algorithm::ALL {
            let run = parallel::run(&Engine::new(), &g, algo, s, r).unwrap();
            let found = run.bicliques().unwrap().into_iter().map(|(_, b)| b).collect();
            prop_assert_eq!(sorted(found), oracle.clone(), "{}", algo);
        }
    }

    #[test]
    fn each_biclique_is_emitted_by_its_owner_only(g in graph_strategy(), s in 1usize..=2) {
        for algo in [Algorithm::Cd0, Algorithm::Cd1, Algorithm::Cd2] {
            let order = VertexOrder::for_graph(algo.order_kind(), &g);
            let run = parallel::run(&Engine::new(), &g, algo, s, 3).unwrap();
            let mut seen = HashMap::new();
            for (owner, b) in run.bicliques().unwrap() {
                let expected = order.min_of(b.vertices()).unwrap().unwrap();
                prop_assert_eq!(owner, expected, "{} {}", algo, b);
                prop_assert!(seen.insert(b, owner).is_none(), "{} emitted twice", algo);
            }
        }
    }

    #[test]
    fn reducer_outputs_partition_the_bicliques(g in graph_strategy(), kind_ix in 0usize..3) {
        let kind = [OrderKind::Lexicographic, OrderKind::Degree, OrderKind::TwoNeighborhood][kind_ix];
        let order = VertexOrder::for_graph(kind, &g);
        let mut union = Vec::new();
        for &key in g.vertices() {
            let cluster = Cluster::from_graph(&g, key).unwrap();
            let mut out = Vec::new();
            seq::cdl_seq(&cluster, &order, 1, &mut out).unwrap();
            for b in &out {
                prop_assert_eq!(order.min_of(b.vertices()).unwrap(), Some(key));
            }
            union.extend(out);
        }
        let oracle: Vec<Biclique> = brute_force_oracle(&g, 1).unwrap().into_iter().collect();
        prop_assert_eq!(sorted(union), oracle);
    }
}

#[test]
fn seeded_corpus_matches_oracle() {
    // ER n ∈ [4,12] at three densities plus small bipartite graphs, every
    // algorithm, three thresholds and three reducer counts.
    let mut graphs = Vec::new();
    for seed in 0..30u64 {
        for (i, p) in [0.2, 0.4, 0.6].into_iter().enumerate() {
            let n = 4 + (seed * 3 + i as u64) % 9;
            graphs.push(gen_er(n, p, seed).unwrap());
        }
        graphs.push(gen_bipartite(1 + seed % 6, 1 + (seed / 6) % 6, 0.5, seed).unwrap());
    }
    let engine = Engine::new();
    for g in &graphs {
        for s in 1..=3 {
            let oracle = brute_force_oracle(g, s).unwrap();
            for r in [1, 3, 8] {
                for algo in Algorithm::ALL {
                    let found: BTreeSet<Biclique> = parallel::run(&engine, g, algo, s, r)
                        .unwrap()
                        .bicliques()
                        .unwrap()
                        .into_iter()
                        .map(|(_, b)| b)
                        .collect();
                    assert_eq!(found, oracle, "{algo} s={s} r={r} on {g:?}");
                }
            }
        }
    }
}

#[test]
fn larger_random_graphs_agree_across_algorithms() {
    let engine = Engine::new();
    for seed in 0..4 {
        for g in [
            gen_er(150, 0.08, seed).unwrap(),
            gen_er(60, 0.3, seed).unwrap(),
        ] {
            for s in 1..=3 {
                let mut reference = Vec::new();
                seq::mbe_dfs(&g, s, &mut reference).unwrap();
                let reference = sorted(reference);
                for b in &reference {
                    assert!(b.is_maximal_in(&g) && b.min_side() >= s);
                }
                for algo in Algorithm::ALL {
                    let found = parallel::run(&engine, &g, algo, s, 5)
                        .unwrap()
                        .bicliques()
                        .unwrap();
                    assert_eq!(
                        sorted(found.into_iter().map(|(_, b)| b).collect()),
                        reference,
                        "{algo} s={s}"
                    );
                }
            }
        }
    }
}

#[test]
fn vertex_ids_need_not_be_dense() {
    let g = Graph::from_edges(
        [(10, 500), (500, 7), (7, 10), (7, 9000), (9000, 500)]
            .map(|(a, b)| (VertexId(a), VertexId(b))),
    );
    let oracle: Vec<Biclique> = brute_force_oracle(&g, 1).unwrap().into_iter().collect();
    for algo in Algorithm::ALL {
        let found = parallel::run(&Engine::new(), &g, algo, 1, 2)
            .unwrap()
            .bicliques()
            .unwrap();
        assert_eq!(
            sorted(found.into_iter().map(|(_, b)| b).collect()),
            oracle,
            "{algo}"
        );
    }
}
