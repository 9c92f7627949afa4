//! Depth-first closed-pair search shared by the sequential enumerator and its
//! reducer-side pruned variants.
//!
//! Each search node holds a closed vertex set `X` (so `X = Γ(Γ(X))`), the
//! common neighborhood `Γ(X)`, and a tail `T` of candidates. Extending `X` by
//! a tail vertex `v` gives `N = Γ(X ∪ {v})` and its closure `Y = Γ(N)`; the
//! pair `⟨Y, N⟩` is a maximal biclique. The branch is kept only if every vertex
//! that closure pulled in is still in the tail, which makes each closed set
//! reachable along exactly one path.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::sets;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Recursive calls, including the root.
    pub nodes: u64,
    /// Closures `Y = Γ(N)` computed.
    pub closures: u64,
    /// Maximal pairs that passed the closure check (before emission filters).
    pub generated: u64,
    /// Bicliques handed to the sink.
    pub emitted: u64,
}

/// Search parameters over vertex indices of a single graph.
pub(crate) struct SearchConfig {
    pub s: usize,
    /// Rank of each vertex index in the active total order.
    pub rank: Vec<u32>,
    /// Reducer key. When set, only closed sets containing the key are
    /// explored, branches whose closure holds a vertex ranked below the key
    /// are abandoned, and only bicliques whose minimum is the key are emitted.
    pub owner: Option<u32>,
}

pub(crate) struct Search<'g> {
    g: &'g Graph,
    cfg: SearchConfig,
    stamp: Vec<u64>,
    pos: Vec<u32>,
    next_stamp: u64,
    buckets: Vec<Vec<u32>>,
    pub stats: SearchStats,
}

type Candidate = (u32, Vec<u32>);

impl<'g> Search<'g> {
    pub fn new(g: &'g Graph, cfg: SearchConfig) -> Result<Search<'g>> {
        if cfg.s < 1 {
            return Err(Error::InvalidThreshold(cfg.s));
        }
        let n = g.vertex_count();
        debug_assert_eq!(cfg.rank.len(), n);
        Ok(Search {
            g,
            cfg,
            stamp: vec![0; n],
            pos: vec![0; n],
            next_stamp: 0,
            buckets: vec![Vec::new(); n],
            stats: SearchStats::default(),
        })
    }

    /// Runs the search. `emit` receives `(Y, N)` with `Y` the side holding
    /// the minimum vertex of the pair under the active order.
    ///
    /// Without an owner the search starts from `X = ∅`. With an owner key
    /// every emitted `Y` contains the key and therefore its closure
    /// `Γ(η(key))`, so the search starts there with the tail restricted to
    /// vertices ranked above the key.
    pub fn run<F: FnMut(&[u32], &[u32])>(&mut self, emit: &mut F) {
        let g = self.g;
        let n = g.vertex_count() as u32;
        let Some(key) = self.cfg.owner else {
            let tail: Vec<u32> = (0..n).collect();
            self.expand(&[], None, &tail, emit);
            return;
        };
        self.stats.nodes += 1;
        let star = g.adj(key);
        let Some(x0) = g.common_neighborhood_at(star) else {
            return;
        };
        self.stats.closures += 1;
        let floor = self.cfg.rank[key as usize];
        if x0.iter().any(|&u| self.cfg.rank[u as usize] < floor) {
            return;
        }
        self.stats.generated += 1;
        if x0.len() >= self.cfg.s && star.len() >= self.cfg.s && self.should_emit(&x0, star) {
            self.stats.emitted += 1;
            emit(&x0, star);
        }
        let tail: Vec<u32> = (0..n)
            .filter(|&u| self.cfg.rank[u as usize] > floor && x0.binary_search(&u).is_err())
            .collect();
        self.expand(&x0, Some(star), &tail, emit);
    }

    fn fresh_stamp(&mut self) -> u64 {
        self.next_stamp += 1;
        self.next_stamp
    }

    /// Tail vertices `w` with `|Γ(X ∪ {w})| ≥ s`, paired with that set.
    fn candidates(&mut self, gamma_x: Option<&[u32]>, tail: &[u32]) -> Vec<Candidate> {
        let s = self.cfg.s;
        let Some(gamma_x) = gamma_x else {
            return tail
                .iter()
                .filter(|&&w| self.g.degree_at(w) >= s)
                .map(|&w| (w, self.g.adj(w).to_vec()))
                .collect();
        };
        // Γ(X ∪ {w}) = Γ(X) ∩ η(w); bucket each member of Γ(X) under its tail
        // neighbors instead of intersecting per tail vertex.
        let id = self.fresh_stamp();
        for &w in tail {
            self.stamp[w as usize] = id;
        }
        let mut touched = Vec::new();
        for &nb in gamma_x {
            for &w in self.g.adj(nb) {
                if self.stamp[w as usize] == id {
                    let bucket = &mut self.buckets[w as usize];
                    if bucket.is_empty() {
                        touched.push(w);
                    }
                    bucket.push(nb);
                }
            }
        }
        let mut out = Vec::with_capacity(touched.len());
        for w in touched {
            let bucket = std::mem::take(&mut self.buckets[w as usize]);
            if bucket.len() >= s {
                out.push((w, bucket));
            }
        }
        out
    }

    fn expand<F: FnMut(&[u32], &[u32])>(
        &mut self,
        x: &[u32],
        gamma_x: Option<&[u32]>,
        tail: &[u32],
        emit: &mut F,
    ) {
        self.stats.nodes += 1;
        let s = self.cfg.s;
        let mut cands = self.candidates(gamma_x, tail);
        if x.len() + cands.len() < s {
            return;
        }
        {
            let rank = &self.cfg.rank;
            cands.sort_unstable_by(|a, b| {
                a.1.len()
                    .cmp(&b.1.len())
                    .then(rank[a.0 as usize].cmp(&rank[b.0 as usize]))
            });
        }

        let id = self.fresh_stamp();
        self.mark_tail(&cands, 0, id);
        let floor = self.cfg.owner.map(|k| self.cfg.rank[k as usize]);

        for i in 0..cands.len() {
            let remaining = cands.len() - i - 1;
            if x.len() + 1 + remaining < s {
                break;
            }
            let (v, ref n_set) = cands[i];
            let y = self
                .g
                .common_neighborhood_at(n_set)
                .expect("candidate neighborhoods are non-empty");
            self.stats.closures += 1;

            if let Some(floor) = floor {
                if y.iter().any(|&u| self.cfg.rank[u as usize] < floor) {
                    continue;
                }
            }
            let closed_in_tail = y.iter().all(|&u| {
                u == v
                    || x.binary_search(&u).is_ok()
                    || (self.stamp[u as usize] == id && self.pos[u as usize] as usize > i)
            });
            if !closed_in_tail {
                continue;
            }
            debug_assert!(sets::is_subset(x, &y), "closure shrank X");
            self.stats.generated += 1;

            if y.len() >= s && self.should_emit(&y, n_set) {
                self.stats.emitted += 1;
                emit(&y, n_set);
            }

            let child_tail: Vec<u32> = cands[i + 1..]
                .iter()
                .map(|c| c.0)
                .filter(|u| y.binary_search(u).is_err())
                .collect();
            self.expand(&y, Some(n_set), &child_tail, emit);
            self.mark_tail(&cands, i + 1, id);
        }
    }

    fn mark_tail(&mut self, cands: &[Candidate], from: usize, id: u64) {
        for (j, c) in cands.iter().enumerate().skip(from) {
            self.stamp[c.0 as usize] = id;
            self.pos[c.0 as usize] = j as u32;
        }
    }

    fn min_rank(&self, set: &[u32]) -> u32 {
        set.iter()
            .map(|&u| self.cfg.rank[u as usize])
            .min()
            .unwrap_or(u32::MAX)
    }

    /// Every maximal pair is reached once with each side as `Y`; keep the
    /// orientation whose `Y` holds the minimum vertex, and under an owner key
    /// require that minimum to be the key.
    fn should_emit(&self, y: &[u32], n: &[u32]) -> bool {
        let (ry, rn) = (self.min_rank(y), self.min_rank(n));
        match self.cfg.owner {
            None => ry < rn,
            Some(key) => ry == self.cfg.rank[key as usize] && ry < rn,
        }
    }
}
