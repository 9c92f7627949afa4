//! Total orders on vertices used to decide which reducer owns a biclique.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OrderKind {
    /// Vertex id alone.
    Lexicographic,
    /// (degree, id).
    Degree,
    /// (|η²(v)|, id).
    TwoNeighborhood,
}

impl fmt::Display for OrderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrderKind::Lexicographic => "lexicographic",
            OrderKind::Degree => "degree",
            OrderKind::TwoNeighborhood => "two-neighborhood",
        })
    }
}

impl FromStr for OrderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lexicographic" | "lex" => Ok(OrderKind::Lexicographic),
            "degree" => Ok(OrderKind::Degree),
            "two-neighborhood" | "2hop" => Ok(OrderKind::TwoNeighborhood),
            _ => Err(Error::InvalidArgument(format!(
                "unknown vertex order {s:?}"
            ))),
        }
    }
}

/// Ascending by `(property[v], v)`; lexicographic compares `v` alone.
#[derive(Clone, Debug)]
pub struct VertexOrder {
    kind: OrderKind,
    /// Sorted by vertex, one entry per vertex.
    property: Option<Vec<(VertexId, u64)>>,
}

impl VertexOrder {
    pub fn lexicographic() -> VertexOrder {
        VertexOrder {
            kind: OrderKind::Lexicographic,
            property: None,
        }
    }

    /// Uses externally supplied property values, as a round-3 reducer does.
    pub fn from_properties(kind: OrderKind, property: HashMap<VertexId, u64>) -> VertexOrder {
        VertexOrder::from_property_list(kind, property.into_iter().collect())
    }

    /// Like [`VertexOrder::from_properties`]; for repeated vertices the last
    /// value wins.
    pub fn from_property_list(kind: OrderKind, mut property: Vec<(VertexId, u64)>) -> VertexOrder {
        if kind == OrderKind::Lexicographic {
            return VertexOrder::lexicographic();
        }
        property.reverse();
        property.sort_by_key(|&(v, _)| v);
        property.dedup_by_key(|&mut (v, _)| v);
        VertexOrder {
            kind,
            property: Some(property),
        }
    }

    /// Computes the property from `g` directly.
    pub fn for_graph(kind: OrderKind, g: &Graph) -> VertexOrder {
        let property = match kind {
            OrderKind::Lexicographic => return VertexOrder::lexicographic(),
            // Index order is id order, so these lists are already sorted.
            OrderKind::Degree => (0..g.vertex_count() as u32)
                .map(|i| (g.id(i), g.degree_at(i) as u64))
                .collect(),
            OrderKind::TwoNeighborhood => (0..g.vertex_count() as u32)
                .map(|i| (g.id(i), g.two_neighborhood_at(i).len() as u64))
                .collect(),
        };
        VertexOrder {
            kind,
            property: Some(property),
        }
    }

    pub fn kind(&self) -> OrderKind {
        self.kind
    }

    pub fn property(&self, v: VertexId) -> Option<u64> {
        match &self.property {
            None => Some(0),
            Some(p) => p.binary_search_by_key(&v, |&(u, _)| u).ok().map(|i| p[i].1),
        }
    }

    fn key(&self, v: VertexId) -> Result<(u64, VertexId)> {
        Ok((self.property(v).ok_or(Error::MissingProperty(v))?, v))
    }

    pub fn compare(&self, a: VertexId, b: VertexId) -> Result<Ordering> {
        Ok(self.key(a)?.cmp(&self.key(b)?))
    }

    /// Smallest vertex of `vs` under this order.
    pub fn min_of<I: IntoIterator<Item = VertexId>>(&self, vs: I) -> Result<Option<VertexId>> {
        let mut best: Option<(u64, VertexId)> = None;
        for v in vs {
            let k = self.key(v)?;
            if best.is_none_or(|b| k < b) {
                best = Some(k);
            }
        }
        Ok(best.map(|(_, v)| v))
    }

    /// Rank of every vertex index of `g` under this order (0 = smallest).
    /// Fails if any vertex of `g` lacks a property value.
    pub fn ranks(&self, g: &Graph) -> Result<Vec<u32>> {
        let n = g.vertex_count();
        let Some(property) = &self.property else {
            return Ok((0..n as u32).collect());
        };
        let mut keyed = Vec::with_capacity(n);
        let mut entries = property.iter().peekable();
        for i in 0..n as u32 {
            let v = g.id(i);
            while entries.next_if(|&&(u, _)| u < v).is_some() {}
            match entries.peek() {
                Some(&&(u, p)) if u == v => keyed.push(((p, v), i)),
                _ => return Err(Error::MissingProperty(v)),
            }
        }
        keyed.sort_unstable();
        let mut rank = vec![0u32; n];
        for (r, &(_, i)) in keyed.iter().enumerate() {
            rank[i as usize] = r as u32;
        }
        Ok(rank)
    }
}
