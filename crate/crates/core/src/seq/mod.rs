//! Sequential enumerators: depth-first search, its owner-pruned reducer
//! variants, the consensus enumerator, and a brute-force oracle.

mod consensus;
mod dfs;
mod oracle;

pub use consensus::mbe_consensus;
pub use dfs::SearchStats;
pub use oracle::{brute_force_oracle, ORACLE_MAX_VERTICES};

use crate::biclique::{Biclique, BicliqueSink, EnumSummary};
use crate::cluster::Cluster;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::order::VertexOrder;

use dfs::{Search, SearchConfig};

fn run_search<S: BicliqueSink + ?Sized>(
    g: &Graph,
    cfg: SearchConfig,
    sink: &mut S,
) -> Result<(EnumSummary, SearchStats)> {
    let mut search = Search::new(g, cfg)?;
    let mut summary = EnumSummary::default();
    search.run(&mut |y: &[u32], n: &[u32]| {
        let b = Biclique::from_indices(g, y, n);
        summary.record(&b);
        sink.accept(b);
    });
    Ok((summary, search.stats))
}

/// Streams every maximal biclique `⟨L,R⟩` of `g` with `|L| ≥ s` and `|R| ≥ s`
/// into `sink`, each exactly once.
pub fn mbe_dfs<S: BicliqueSink + ?Sized>(g: &Graph, s: usize, sink: &mut S) -> Result<EnumSummary> {
    mbe_dfs_with_stats(g, s, sink).map(|(summary, _)| summary)
}

pub fn mbe_dfs_with_stats<S: BicliqueSink + ?Sized>(
    g: &Graph,
    s: usize,
    sink: &mut S,
) -> Result<(EnumSummary, SearchStats)> {
    let cfg = SearchConfig {
        s,
        rank: (0..g.vertex_count() as u32).collect(),
        owner: None,
    };
    run_search(g, cfg, sink)
}

/// Reducer-side search over a cluster under the id order: emits exactly the
/// maximal bicliques of the cluster whose smallest vertex is its center.
pub fn cd0_seq<S: BicliqueSink + ?Sized>(
    cluster: &Cluster,
    s: usize,
    sink: &mut S,
) -> Result<EnumSummary> {
    cdl_seq_with_stats(cluster, &VertexOrder::lexicographic(), s, sink).map(|(summary, _)| summary)
}

/// Like [`cd0_seq`], with "smallest" taken in `order`. Every cluster vertex
/// must have a property value in `order`.
pub fn cdl_seq<S: BicliqueSink + ?Sized>(
    cluster: &Cluster,
    order: &VertexOrder,
    s: usize,
    sink: &mut S,
) -> Result<EnumSummary> {
    cdl_seq_with_stats(cluster, order, s, sink).map(|(summary, _)| summary)
}

pub fn cdl_seq_with_stats<S: BicliqueSink + ?Sized>(
    cluster: &Cluster,
    order: &VertexOrder,
    s: usize,
    sink: &mut S,
) -> Result<(EnumSummary, SearchStats)> {
    if s < 1 {
        return Err(Error::InvalidThreshold(s));
    }
    if cluster.subgraph.is_empty() {
        // The cluster of an isolated vertex holds no biclique.
        return Ok((EnumSummary::default(), SearchStats::default()));
    }
    let key = cluster.center_index()?;
    let cfg = SearchConfig {
        s,
        rank: order.ranks(&cluster.subgraph)?,
        owner: Some(key),
    };
    run_search(&cluster.subgraph, cfg, sink)
}

#[cfg(test)]
mod tests {
    use std::collections::{BTreeSet, HashMap};

    use super::*;
    use crate::graph::VertexId;
    use crate::order::OrderKind;

    fn v(x: u64) -> VertexId {
        VertexId(x)
    }

    fn graph(edges: &[(u64, u64)]) -> Graph {
        Graph::from_edges(edges.iter().map(|&(a, b)| (v(a), v(b))))
    }

    fn b(l: &[u64], r: &[u64]) -> Biclique {
        Biclique::new(
            l.iter().map(|&x| v(x)).collect(),
            r.iter().map(|&x| v(x)).collect(),
        )
        .unwrap()
    }

    fn dfs(g: &Graph, s: usize) -> (Vec<Biclique>, EnumSummary) {
        let mut out = Vec::new();
        let summary = mbe_dfs(g, s, &mut out).unwrap();
        (out, summary)
    }

    fn set(bs: Vec<Biclique>) -> BTreeSet<Biclique> {
        bs.into_iter().collect()
    }

    #[test]
    fn single_edge() {
        let (out, summary) = dfs(&graph(&[(1, 2)]), 1);
        assert_eq!(out, vec![b(&[1], &[2])]);
        assert_eq!(
            summary,
            EnumSummary {
                count: 1,
                edge_sum: 1
            }
        );
    }

    #[test]
    fn triangle_yields_three_stars() {
        let (out, summary) = dfs(&graph(&[(1, 2), (2, 3), (1, 3)]), 1);
        assert_eq!(summary.count, 3);
        assert_eq!(
            set(out),
            set(vec![b(&[1], &[2, 3]), b(&[2], &[1, 3]), b(&[3], &[1, 2])])
        );
    }

    #[test]
    fn four_cycle_with_threshold_two() {
        let c4 = graph(&[(1, 2), (2, 3), (3, 4), (4, 1)]);
        let (out, summary) = dfs(&c4, 2);
        assert_eq!(out, vec![b(&[1, 3], &[2, 4])]);
        assert_eq!(summary.edge_sum, 4);
    }

    #[test]
    fn zero_threshold_is_rejected() {
        let mut out = Vec::new();
        assert!(matches!(
            mbe_dfs(&graph(&[(1, 2)]), 0, &mut out),
            Err(Error::InvalidThreshold(0))
        ));
    }

    #[test]
    fn cd0_on_triangle_keeps_only_owned() {
        let g = graph(&[(1, 2), (2, 3), (1, 3)]);
        // Every triangle biclique spans all three vertices, so vertex 1 owns
        // them all and the other clusters emit nothing.
        let mut out = Vec::new();
        cd0_seq(&Cluster::from_graph(&g, v(1)).unwrap(), 1, &mut out).unwrap();
        assert_eq!(
            set(out),
            set(vec![b(&[1], &[2, 3]), b(&[2], &[1, 3]), b(&[3], &[1, 2])])
        );
        for key in [2, 3] {
            let mut out = Vec::new();
            cd0_seq(&Cluster::from_graph(&g, v(key)).unwrap(), 1, &mut out).unwrap();
            assert!(out.is_empty());
        }
    }

    #[test]
    fn cd0_on_four_cycle() {
        let c4 = graph(&[(1, 2), (2, 3), (3, 4), (4, 1)]);
        let mut out = Vec::new();
        cd0_seq(&Cluster::from_graph(&c4, v(1)).unwrap(), 1, &mut out).unwrap();
        // {1}x{2,4} is not closed: Γ({2,4}) = {1,3}.
        assert_eq!(out, vec![b(&[1, 3], &[2, 4])]);
        for key in [2, 3, 4] {
            let mut out = Vec::new();
            cd0_seq(&Cluster::from_graph(&c4, v(key)).unwrap(), 1, &mut out).unwrap();
            assert!(out.is_empty(), "key {key} emitted {out:?}");
        }
    }

    #[test]
    fn cdl_with_lexicographic_order_matches_cd0() {
        let g = graph(&[(1, 2), (2, 3), (1, 3), (3, 4), (4, 5), (2, 5), (1, 5)]);
        for &key in g.vertices() {
            let c = Cluster::from_graph(&g, key).unwrap();
            let (mut a, mut b2) = (Vec::new(), Vec::new());
            cd0_seq(&c, 1, &mut a).unwrap();
            cdl_seq(&c, &VertexOrder::lexicographic(), 1, &mut b2).unwrap();
            assert_eq!(a, b2);
        }
    }

    #[test]
    fn degree_order_moves_star_ownership_to_a_leaf() {
        // center 0 has the highest degree; leaves 1,2,3 have degree 1.
        let star = graph(&[(0, 1), (0, 2), (0, 3)]);
        let order = VertexOrder::for_graph(OrderKind::Degree, &star);
        let mut owners = HashMap::new();
        for &key in star.vertices() {
            let c = Cluster::from_graph(&star, key).unwrap();
            let mut out = Vec::new();
            cdl_seq(&c, &order, 1, &mut out).unwrap();
            for bc in out {
                owners.insert(bc, key);
            }
        }
        assert_eq!(owners.len(), 1);
        assert_eq!(owners[&b(&[0], &[1, 2, 3])], v(1));
    }

    #[test]
    fn degree_ties_fall_back_to_ids() {
        let tri = graph(&[(1, 2), (2, 3), (1, 3)]);
        let order = VertexOrder::for_graph(OrderKind::Degree, &tri);
        for &key in tri.vertices() {
            let c = Cluster::from_graph(&tri, key).unwrap();
            let (mut a, mut l) = (Vec::new(), Vec::new());
            cd0_seq(&c, 1, &mut a).unwrap();
            cdl_seq(&c, &order, 1, &mut l).unwrap();
            assert_eq!(a, l);
        }
    }

    #[test]
    fn cdl_requires_properties_for_every_cluster_vertex() {
        let g = graph(&[(1, 2), (2, 3)]);
        let c = Cluster::from_graph(&g, v(1)).unwrap();
        let partial =
            VertexOrder::from_properties(OrderKind::Degree, HashMap::from([(v(1), 1), (v(2), 2)]));
        let mut out = Vec::new();
        assert!(matches!(
            cdl_seq(&c, &partial, 1, &mut out),
            Err(Error::MissingProperty(x)) if x == v(3)
        ));
    }

    #[test]
    fn isolated_center_has_an_empty_cluster() {
        let g = Graph::with_vertices([v(9)], [(v(1), v(2))]);
        let mut out = Vec::new();
        let summary = cd0_seq(&Cluster::from_graph(&g, v(9)).unwrap(), 1, &mut out).unwrap();
        assert_eq!((summary.count, out.len()), (0, 0));
    }

    #[test]
    fn isolated_vertices_are_ignored() {
        let g = Graph::with_vertices([v(9)], [(v(1), v(2))]);
        let (out, _) = dfs(&g, 1);
        assert_eq!(out, vec![b(&[1], &[2])]);
    }
}
