use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};

/// The subgraph on η²(center) handed to one reducer.
#[derive(Clone, Debug)]
pub struct Cluster {
    pub center: VertexId,
    pub subgraph: Graph,
    /// Order property of each subgraph vertex (load-balanced variants only).
    pub properties: Option<HashMap<VertexId, u64>>,
}

impl Cluster {
    /// Induced subgraph of `g` on η²(center).
    pub fn from_graph(g: &Graph, center: VertexId) -> Result<Cluster> {
        let idx = g.index_of(center).ok_or(Error::UnknownVertex(center))?;
        let members = g.two_neighborhood_at(idx);
        Ok(Cluster {
            center,
            subgraph: g.induced_at(&members),
            properties: None,
        })
    }

    /// Assembles a cluster from the adjacency lists a reducer receives: the
    /// center's own list and those of each of its neighbors.
    ///
    /// Only edges incident to the center or one of its neighbors are known
    /// here. Every biclique containing the center lies entirely on such edges
    /// (the side opposite the center is inside η(center)), so this yields the
    /// same bicliques-through-the-center as the fully induced subgraph.
    pub fn from_adjacency<'a, I>(center: VertexId, lists: I) -> Cluster
    where
        I: IntoIterator<Item = (VertexId, &'a [VertexId])>,
    {
        let mut edges = Vec::new();
        for (u, nbrs) in lists {
            edges.extend(nbrs.iter().map(|&w| (u, w)));
        }
        Cluster {
            center,
            subgraph: Graph::with_vertices([center], edges),
            properties: None,
        }
    }

    /// [`Cluster::from_adjacency`] restricted to vertices that can lie in a
    /// biclique through the center with both sides of size at least `s`:
    /// neighbors of degree `≥ s` and two-hop vertices joined to at least `s`
    /// of them. `None` when the center's own degree is below `s`.
    ///
    /// Any biclique through the center, and any vertex extending one, has
    /// degree `≥ s` inside that biclique, so the kept vertices decide both
    /// membership and maximality.
    pub fn from_adjacency_pruned(
        center: VertexId,
        lists: &[(VertexId, Vec<VertexId>)],
        s: usize,
    ) -> Option<Cluster> {
        let own = lists.iter().find(|(u, _)| *u == center)?;
        if own.1.len() < s {
            return None;
        }
        if s <= 1 {
            return Some(Cluster::from_adjacency(
                center,
                lists.iter().map(|(u, n)| (*u, n.as_slice())),
            ));
        }
        let mut senders: Vec<VertexId> = lists.iter().map(|(u, _)| *u).collect();
        senders.sort_unstable();
        let mut short: Vec<VertexId> = lists
            .iter()
            .filter(|(_, n)| n.len() < s)
            .map(|(u, _)| *u)
            .collect();
        short.sort_unstable();
        let kept = lists.iter().filter(|(_, n)| n.len() >= s);
        let mut far: Vec<VertexId> = kept
            .clone()
            .flat_map(|(_, n)| n.iter().copied())
            .filter(|x| senders.binary_search(x).is_err())
            .collect();
        far.sort_unstable();
        let mut rare = Vec::new();
        for run in far.chunk_by(|a, b| a == b) {
            if run.len() < s {
                rare.push(run[0]);
            }
        }
        let keep = |x: &VertexId| short.binary_search(x).is_err() && rare.binary_search(x).is_err();
        let filtered: Vec<(VertexId, Vec<VertexId>)> = kept
            .map(|(u, n)| (*u, n.iter().copied().filter(keep).collect()))
            .collect();
        Some(Cluster::from_adjacency(
            center,
            filtered.iter().map(|(u, n)| (*u, n.as_slice())),
        ))
    }

    pub fn with_properties(mut self, properties: HashMap<VertexId, u64>) -> Cluster {
        self.properties = Some(properties);
        self
    }

    pub(crate) fn center_index(&self) -> Result<u32> {
        self.subgraph
            .index_of(self.center)
            .ok_or(Error::UnknownVertex(self.center))
    }
}
