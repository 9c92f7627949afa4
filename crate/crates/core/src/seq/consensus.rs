use std::collections::HashSet;

use crate::biclique::{Biclique, BicliqueSink, EnumSummary};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::sets;

/// Canonical index pair: both sides sorted, first side holds the smaller index.
type Pair = (Vec<u32>, Vec<u32>);

fn canonical(a: Vec<u32>, b: Vec<u32>) -> Pair {
    if a[0] < b[0] {
        (a, b)
    } else {
        (b, a)
    }
}

/// `⟨Γ(Γ(X)), Γ(X)⟩`, or `None` if `Γ(X)` is empty.
fn extend(g: &Graph, x: &[u32]) -> Option<Pair> {
    let n = g.common_neighborhood_at(x)?;
    if n.is_empty() {
        return None;
    }
    let y = g.common_neighborhood_at(&n)?;
    Some(canonical(y, n))
}

/// The four union/intersection crossings of two bicliques.
fn cross(p: &Pair, q: &Pair) -> [Pair; 4] {
    let (x1, y1) = p;
    let (x2, y2) = q;
    [
        (sets::union(x1, x2), sets::intersect(y1, y2)),
        (sets::union(x1, y2), sets::intersect(y1, x2)),
        (sets::union(y1, x2), sets::intersect(x1, y2)),
        (sets::union(y1, y2), sets::intersect(x1, x2)),
    ]
}

/// Consensus enumeration: seed with the extended stars `⟨{v}, η(v)⟩`, then
/// repeatedly cross the bicliques found in the previous iteration with every
/// seed, extend each crossing to its two closures, and keep the new ones,
/// until an iteration adds nothing. The result is filtered by `s` and emitted
/// in canonical order.
///
/// Unlike the depth-first search this keeps every biclique found in memory
/// for duplicate elimination.
pub fn mbe_consensus<S: BicliqueSink + ?Sized>(
    g: &Graph,
    s: usize,
    sink: &mut S,
) -> Result<EnumSummary> {
    if s < 1 {
        return Err(Error::InvalidThreshold(s));
    }
    let mut found: HashSet<Pair> = HashSet::new();
    let mut seeds: Vec<Pair> = Vec::new();
    for v in 0..g.vertex_count() as u32 {
        if let Some(p) = extend(g, &[v]) {
            if found.insert(p.clone()) {
                seeds.push(p);
            }
        }
    }

    let mut prev = seeds.clone();
    while !prev.is_empty() {
        let mut fresh = Vec::new();
        for p in &prev {
            for q in &seeds {
                for (x, y) in cross(p, q) {
                    if x.is_empty() || y.is_empty() || !sets::is_disjoint(&x, &y) {
                        continue;
                    }
                    for side in [&x, &y] {
                        if let Some(e) = extend(g, side) {
                            if !found.contains(&e) {
                                found.insert(e.clone());
                                fresh.push(e);
                            }
                        }
                    }
                }
            }
        }
        prev = fresh;
    }

    let mut out: Vec<Biclique> = found
        .into_iter()
        .filter(|(a, b)| a.len() >= s && b.len() >= s)
        .map(|(a, b)| Biclique::from_indices(g, &a, &b))
        .collect();
    out.sort_unstable();
    let mut summary = EnumSummary::default();
    for b in out {
        summary.record(&b);
        sink.accept(b);
    }
    Ok(summary)
}
