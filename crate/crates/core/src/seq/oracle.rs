use std::collections::BTreeSet;

use crate::biclique::Biclique;
use crate::error::{Error, Result};
use crate::graph::Graph;

pub const ORACLE_MAX_VERTICES: usize = 20;

/// Exhaustive maximal-biclique enumeration by subset closure.
///
/// For every non-empty `R ⊆ V`, `L = Γ(R)`; the pair is maximal exactly when
/// `L ≠ ∅` and `Γ(L) = R`. Shares no code with the search enumerators.
pub fn brute_force_oracle(g: &Graph, s: usize) -> Result<BTreeSet<Biclique>> {
    let n = g.vertex_count();
    if n > ORACLE_MAX_VERTICES {
        return Err(Error::OracleTooLarge {
            n,
            limit: ORACLE_MAX_VERTICES,
        });
    }
    let adj: Vec<u32> = (0..n)
        .map(|i| {
            g.vertices()
                .iter()
                .enumerate()
                .filter(|&(j, &w)| g.has_edge(g.vertices()[i], w) && i != j)
                .fold(0u32, |m, (j, _)| m | (1 << j))
        })
        .collect();
    let all: u32 = (1u32 << n) - 1;
    let gamma = |mask: u32| -> u32 {
        (0..n)
            .filter(|&i| mask & (1 << i) != 0)
            .fold(all, |acc, i| acc & adj[i])
    };
    let members = |mask: u32| -> Vec<_> {
        (0..n)
            .filter(|&i| mask & (1 << i) != 0)
            .map(|i| g.vertices()[i])
            .collect()
    };

    let mut out = BTreeSet::new();
    for r in 1..=all {
        let l = gamma(r);
        if l == 0 || gamma(l) != r {
            continue;
        }
        if (l.count_ones() as usize) < s || (r.count_ones() as usize) < s {
            continue;
        }
        out.insert(Biclique::new(members(l), members(r))?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::VertexId;

    fn graph(edges: &[(u64, u64)]) -> Graph {
        Graph::from_edges(edges.iter().map(|&(a, b)| (VertexId(a), VertexId(b))))
    }

    #[test]
    fn path_has_one_maximal_biclique() {
        let out = brute_force_oracle(&graph(&[(1, 2), (2, 3)]), 1).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out.iter().next().unwrap().to_string(), "1 3 | 2");
    }

    #[test]
    fn k4_has_four_stars_and_three_squares() {
        let k4 = graph(&[(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]);
        let out = brute_force_oracle(&k4, 1).unwrap();
        assert_eq!(out.len(), 7);
        assert_eq!(out.iter().filter(|b| b.min_side() == 1).count(), 4);
        assert_eq!(out.iter().filter(|b| b.min_side() == 2).count(), 3);
    }

    #[test]
    fn empty_graph_and_size_guard() {
        let empty = Graph::with_vertices((0..5).map(VertexId), []);
        assert!(brute_force_oracle(&empty, 1).unwrap().is_empty());
        let big = Graph::with_vertices((0..21).map(VertexId), []);
        assert!(matches!(
            brute_force_oracle(&big, 1),
            Err(Error::OracleTooLarge { n: 21, .. })
        ));
    }
}
