use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};

/// An unordered pair of disjoint, non-empty vertex sets.
///
/// Stored canonically: both sides sorted, and the side holding the smallest
/// vertex id of `L ∪ R` is `left`. `⟨L,R⟩` and `⟨R,L⟩` are the same value.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Biclique {
    left: Vec<VertexId>,
    right: Vec<VertexId>,
}

impl Biclique {
    pub fn new(a: Vec<VertexId>, b: Vec<VertexId>) -> Result<Biclique> {
        let mut a = a;
        let mut b = b;
        a.sort_unstable();
        a.dedup();
        b.sort_unstable();
        b.dedup();
        if a.is_empty() || b.is_empty() {
            return Err(Error::InvalidBiclique("both sides must be non-empty"));
        }
        if !crate::sets::is_disjoint(&a, &b) {
            return Err(Error::InvalidBiclique("sides must be disjoint"));
        }
        Ok(Biclique::from_sorted(a, b))
    }

    /// Both sides already sorted, non-empty and disjoint.
    pub(crate) fn from_sorted(a: Vec<VertexId>, b: Vec<VertexId>) -> Biclique {
        debug_assert!(!a.is_empty() && !b.is_empty());
        if a[0] < b[0] {
            Biclique { left: a, right: b }
        } else {
            Biclique { left: b, right: a }
        }
    }

    /// Converts sorted index sets of `g` (index order is id order).
    pub(crate) fn from_indices(g: &Graph, a: &[u32], b: &[u32]) -> Biclique {
        let a = a.iter().map(|&i| g.id(i)).collect();
        let b = b.iter().map(|&i| g.id(i)).collect();
        Biclique::from_sorted(a, b)
    }

    pub fn left(&self) -> &[VertexId] {
        &self.left
    }

    pub fn right(&self) -> &[VertexId] {
        &self.right
    }

    /// |L|·|R|, the number of biclique edges.
    pub fn edge_weight(&self) -> u64 {
        self.left.len() as u64 * self.right.len() as u64
    }

    /// Size of the smaller side.
    pub fn min_side(&self) -> usize {
        self.left.len().min(self.right.len())
    }

    /// Smallest vertex id in `L ∪ R`.
    pub fn min_vertex(&self) -> VertexId {
        self.left[0]
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.left.iter().chain(self.right.iter()).copied()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.left.binary_search(&v).is_ok() || self.right.binary_search(&v).is_ok()
    }

    /// Every cross pair is an edge of `g`.
    pub fn is_biclique_of(&self, g: &Graph) -> bool {
        self.left
            .iter()
            .all(|&a| self.right.iter().all(|&b| g.has_edge(a, b)))
    }

    /// Mutual closure `Γ(L) = R` and `Γ(R) = L`, which is maximality.
    pub fn is_maximal_in(&self, g: &Graph) -> bool {
        match (
            g.common_neighborhood(&self.left),
            g.common_neighborhood(&self.right),
        ) {
            (Ok(gl), Ok(gr)) => gl == self.right && gr == self.left,
            _ => false,
        }
    }

    /// Renders with a custom vertex formatter, e.g. to restore string labels.
    pub fn display_with<F>(&self, f: F) -> String
    where
        F: Fn(VertexId) -> String,
    {
        let side = |s: &[VertexId]| s.iter().map(|&v| f(v)).collect::<Vec<_>>().join(" ");
        format!("{} | {}", side(&self.left), side(&self.right))
    }
}

/// `L-vertices | R-vertices`, each side ascending.
impl fmt::Display for Biclique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(|v| v.to_string()))
    }
}

impl FromStr for Biclique {
    type Err = Error;

    fn from_str(s: &str) -> Result<Biclique> {
        let bad = |message: String| Error::Parse { line: 0, message };
        let (l, r) = s
            .split_once('|')
            .ok_or_else(|| bad(format!("missing `|` in {s:?}")))?;
        let side = |text: &str| -> Result<Vec<VertexId>> {
            text.split_whitespace()
                .map(|t| {
                    t.parse::<u64>()
                        .map(VertexId)
                        .map_err(|_| bad(format!("bad vertex {t:?}")))
                })
                .collect()
        };
        Biclique::new(side(l)?, side(r)?)
    }
}

/// Running count and output size (Σ |L|·|R|) of an enumeration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct EnumSummary {
    pub count: u64,
    pub edge_sum: u64,
}

impl EnumSummary {
    pub fn record(&mut self, b: &Biclique) {
        self.count += 1;
        self.edge_sum += b.edge_weight();
    }
}

impl fmt::Display for EnumSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "count={} edge_sum={}", self.count, self.edge_sum)
    }
}

/// Consumer of enumerated bicliques. Enumerators stream into a sink and never
/// hold the full result themselves.
pub trait BicliqueSink {
    fn accept(&mut self, b: Biclique);
}

impl<F: FnMut(Biclique)> BicliqueSink for F {
    fn accept(&mut self, b: Biclique) {
        self(b)
    }
}

impl BicliqueSink for Vec<Biclique> {
    fn accept(&mut self, b: Biclique) {
        self.push(b)
    }
}
