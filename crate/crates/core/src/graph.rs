//! Undirected simple graphs, neighborhood algebra, and the edge-list loader.
//!
//! Vertices carry a global [`VertexId`]; internally every graph stores its
//! vertices sorted by id and addresses them by dense `u32` index, so index
//! order coincides with the baseline (lexicographic) vertex order.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sets;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u64);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u64> for VertexId {
    fn from(v: u64) -> Self {
        VertexId(v)
    }
}

/// Immutable undirected simple graph in compressed sparse row form.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    ids: Vec<VertexId>,
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.vertex_count())
            .field("m", &self.edge_count())
            .finish()
    }
}

impl Graph {
    /// Builds a graph whose vertex set is exactly the edge endpoints.
    pub fn from_edges<I>(edges: I) -> Graph
    where
        I: IntoIterator<Item = (VertexId, VertexId)>,
    {
        Graph::with_vertices(std::iter::empty(), edges)
    }

    /// Builds a graph on `vertices` plus every edge endpoint. Self-loops and
    /// duplicate edges are dropped; every edge is stored in both directions.
    pub fn with_vertices<V, I>(vertices: V, edges: I) -> Graph
    where
        V: IntoIterator<Item = VertexId>,
        I: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let edges: Vec<(VertexId, VertexId)> = edges.into_iter().filter(|(a, b)| a != b).collect();
        let mut ids: Vec<VertexId> = vertices.into_iter().collect();
        ids.reserve(edges.len() * 2);
        for &(a, b) in &edges {
            ids.push(a);
            ids.push(b);
        }
        ids.sort_unstable();
        ids.dedup();
        assert!(
            ids.len() < u32::MAX as usize,
            "graph too large for u32 indices"
        );

        let index = |v: VertexId| ids.binary_search(&v).expect("endpoint registered") as u32;
        let n = ids.len();
        let ends: Vec<(u32, u32)> = edges.iter().map(|&(a, b)| (index(a), index(b))).collect();
        // Bucket both directions by source, then sort and dedup each row.
        let mut start = vec![0usize; n + 1];
        for &(a, b) in &ends {
            start[a as usize + 1] += 1;
            start[b as usize + 1] += 1;
        }
        for i in 0..n {
            start[i + 1] += start[i];
        }
        let mut fill = start.clone();
        let mut targets = vec![0u32; ends.len() * 2];
        for &(a, b) in &ends {
            targets[fill[a as usize]] = b;
            fill[a as usize] += 1;
            targets[fill[b as usize]] = a;
            fill[b as usize] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        let mut len = 0;
        for i in 0..n {
            let row = &mut targets[start[i]..start[i + 1]];
            row.sort_unstable();
            let mut prev = None;
            for j in start[i]..start[i + 1] {
                let t = targets[j];
                if prev != Some(t) {
                    targets[len] = t;
                    len += 1;
                    prev = Some(t);
                }
            }
            offsets[i + 1] = len;
        }
        targets.truncate(len);
        Graph {
            ids,
            offsets,
            targets,
        }
    }

    /// `pairs` must be sorted, deduplicated, symmetric, and loop free.
    fn from_sorted_pairs(ids: Vec<VertexId>, pairs: &[(u32, u32)]) -> Graph {
        let n = ids.len();
        let mut offsets = vec![0usize; n + 1];
        for &(a, _) in pairs {
            offsets[a as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let targets = pairs.iter().map(|&(_, b)| b).collect();
        Graph {
            ids,
            offsets,
            targets,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Vertex ids in ascending order.
    pub fn vertices(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.index_of(v).is_some()
    }

    pub fn index_of(&self, v: VertexId) -> Option<u32> {
        self.ids.binary_search(&v).ok().map(|i| i as u32)
    }

    #[inline]
    pub fn id(&self, idx: u32) -> VertexId {
        self.ids[idx as usize]
    }

    /// Sorted neighbor indices of the vertex at `idx`.
    #[inline]
    pub fn adj(&self, idx: u32) -> &[u32] {
        let i = idx as usize;
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    #[inline]
    pub fn degree_at(&self, idx: u32) -> usize {
        let i = idx as usize;
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn degree(&self, v: VertexId) -> Result<usize> {
        Ok(self.degree_at(self.require(v)?))
    }

    pub fn max_degree(&self) -> usize {
        (0..self.ids.len() as u32)
            .map(|i| self.degree_at(i))
            .max()
            .unwrap_or(0)
    }

    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        match (self.index_of(a), self.index_of(b)) {
            (Some(ia), Some(ib)) => self.adj(ia).binary_search(&ib).is_ok(),
            _ => false,
        }
    }

    /// Each undirected edge once, as `(smaller, larger)`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        (0..self.ids.len() as u32).flat_map(move |a| {
            self.adj(a)
                .iter()
                .filter(move |&&b| b > a)
                .map(move |&b| (self.id(a), self.id(b)))
        })
    }

    fn require(&self, v: VertexId) -> Result<u32> {
        self.index_of(v).ok_or(Error::UnknownVertex(v))
    }

    fn to_ids(&self, idx: &[u32]) -> Vec<VertexId> {
        idx.iter().map(|&i| self.id(i)).collect()
    }

    /// η(v), sorted.
    pub fn neighborhood(&self, v: VertexId) -> Result<Vec<VertexId>> {
        Ok(self.to_ids(self.adj(self.require(v)?)))
    }

    /// η²(v): every vertex within two hops of `v`. A vertex with at least one
    /// neighbor reaches itself in two hops, so it belongs to its own
    /// 2-neighborhood; an isolated vertex has an empty one.
    pub fn two_neighborhood(&self, v: VertexId) -> Result<Vec<VertexId>> {
        let idx = self.require(v)?;
        Ok(self.to_ids(&self.two_neighborhood_at(idx)))
    }

    pub(crate) fn two_neighborhood_at(&self, idx: u32) -> Vec<u32> {
        let mut out: Vec<u32> = Vec::new();
        for &u in self.adj(idx) {
            out.push(u);
            out.extend_from_slice(self.adj(u));
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Γ(U), the vertices adjacent to every member of `set`.
    pub fn common_neighborhood(&self, set: &[VertexId]) -> Result<Vec<VertexId>> {
        let mut idx = set
            .iter()
            .map(|&v| self.require(v))
            .collect::<Result<Vec<u32>>>()?;
        idx.sort_unstable();
        idx.dedup();
        match self.common_neighborhood_at(&idx) {
            Some(common) => Ok(self.to_ids(&common)),
            None => Err(Error::EmptyVertexSet),
        }
    }

    /// Γ over vertex indices; `None` for the empty set.
    pub(crate) fn common_neighborhood_at(&self, set: &[u32]) -> Option<Vec<u32>> {
        let first = *set.iter().min_by_key(|&&v| self.degree_at(v))?;
        let mut acc = self.adj(first).to_vec();
        let mut scratch = Vec::with_capacity(acc.len());
        for &v in set {
            if v == first {
                continue;
            }
            if acc.is_empty() {
                break;
            }
            sets::intersect_into(&acc, self.adj(v), &mut scratch);
            std::mem::swap(&mut acc, &mut scratch);
        }
        Some(acc)
    }

    /// The subgraph on `set` containing every edge of `self` between members.
    pub fn induced_subgraph(&self, set: &[VertexId]) -> Result<Graph> {
        let mut idx = set
            .iter()
            .map(|&v| self.require(v))
            .collect::<Result<Vec<u32>>>()?;
        idx.sort_unstable();
        idx.dedup();
        Ok(self.induced_at(&idx))
    }

    pub(crate) fn induced_at(&self, idx: &[u32]) -> Graph {
        let ids: Vec<VertexId> = idx.iter().map(|&i| self.id(i)).collect();
        let mut local: HashMap<u32, u32> = HashMap::with_capacity(idx.len());
        for (pos, &i) in idx.iter().enumerate() {
            local.insert(i, pos as u32);
        }
        let mut pairs = Vec::new();
        for (pos, &i) in idx.iter().enumerate() {
            for &j in self.adj(i) {
                if let Some(&lj) = local.get(&j) {
                    pairs.push((pos as u32, lj));
                }
            }
        }
        // Rows are visited in order and each row's neighbors are sorted by
        // parent index, which is monotone in local index.
        Graph::from_sorted_pairs(ids, &pairs)
    }
}

/// Mapping from dense integer ids back to the string labels of the input.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LabelDictionary {
    labels: Vec<String>,
}

impl LabelDictionary {
    pub fn label(&self, v: VertexId) -> Option<&str> {
        self.labels.get(v.0 as usize).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Two columns per line: integer id, tab, original label.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        for (i, label) in self.labels.iter().enumerate() {
            writeln!(w, "{i}\t{label}")?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<LabelDictionary> {
        let mut labels = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let (id, label) = line.split_once('\t').ok_or_else(|| Error::Parse {
                line: lineno + 1,
                message: "expected `id<TAB>label`".into(),
            })?;
            let id: usize = id.parse().map_err(|_| Error::Parse {
                line: lineno + 1,
                message: format!("bad id {id:?}"),
            })?;
            if id != labels.len() {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: format!("ids must be dense and ascending, expected {}", labels.len()),
                });
            }
            labels.push(label.to_string());
        }
        Ok(LabelDictionary { labels })
    }
}

#[derive(Clone, Debug)]
pub struct LoadedGraph {
    pub graph: Graph,
    /// Present when the input used non-numeric vertex tokens.
    pub labels: Option<LabelDictionary>,
}

impl LoadedGraph {
    pub fn display_vertex(&self, v: VertexId) -> String {
        match self.labels.as_ref().and_then(|d| d.label(v)) {
            Some(label) => label.to_string(),
            None => v.to_string(),
        }
    }
}

/// Reads a SNAP-style edge list: two whitespace-separated vertex tokens per
/// line, `#` comment lines and blank lines ignored.
///
/// If every token is a non-negative integer the ids are used as given.
/// Otherwise all tokens are treated as labels, sorted, and numbered densely,
/// so the integer order matches the lexicographic order of the labels.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<LoadedGraph> {
    let mut numeric: Vec<(u64, u64)> = Vec::new();
    let mut labelled: Option<Vec<(String, String)>> = None;

    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (a, b) = match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: format!("expected two vertex tokens, got {trimmed:?}"),
                })
            }
        };
        if let Some(pairs) = labelled.as_mut() {
            pairs.push((a.to_string(), b.to_string()));
            continue;
        }
        match (a.parse::<u64>(), b.parse::<u64>()) {
            (Ok(x), Ok(y)) => numeric.push((x, y)),
            _ => {
                let mut pairs: Vec<(String, String)> = numeric
                    .drain(..)
                    .map(|(x, y)| (x.to_string(), y.to_string()))
                    .collect();
                pairs.push((a.to_string(), b.to_string()));
                labelled = Some(pairs);
            }
        }
    }

    match labelled {
        None => {
            if numeric.is_empty() {
                return Err(Error::EmptyGraph);
            }
            let graph =
                Graph::from_edges(numeric.into_iter().map(|(a, b)| (VertexId(a), VertexId(b))));
            Ok(LoadedGraph {
                graph,
                labels: None,
            })
        }
        Some(pairs) => {
            let mut labels: Vec<String> = pairs
                .iter()
                .flat_map(|(a, b)| [a.clone(), b.clone()])
                .collect();
            labels.sort_unstable();
            labels.dedup();
            let lookup =
                |s: &str| VertexId(labels.binary_search_by(|l| l.as_str().cmp(s)).unwrap() as u64);
            let edges: Vec<(VertexId, VertexId)> =
                pairs.iter().map(|(a, b)| (lookup(a), lookup(b))).collect();
            Ok(LoadedGraph {
                graph: Graph::from_edges(edges),
                labels: Some(LabelDictionary { labels }),
            })
        }
    }
}

/// Writes one `a b` line per undirected edge.
pub fn write_edge_list<W: Write>(g: &Graph, mut w: W) -> Result<()> {
    for (a, b) in g.edges() {
        writeln!(w, "{a} {b}")?;
    }
    Ok(())
}
