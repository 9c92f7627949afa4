//! Seeded random graph generators and fixtures.

use std::fmt;
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::str::FromStr;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{load_edge_list, Graph, VertexId};

/// Number of vertices in the skew fixture.
pub const SKEW_FIXTURE_N: u64 = 2000;
/// Side size of the biclique planted in the skew fixture.
pub const SKEW_FIXTURE_SIDE: u64 = 8;

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "probability {p} outside [0, 1]"
        )))
    }
}

/// Draws gap lengths between successes of independent Bernoulli(p) trials.
struct GeometricSkips {
    rng: ChaCha8Rng,
    log_q: f64,
}

impl GeometricSkips {
    fn new(p: f64, seed: u64) -> GeometricSkips {
        GeometricSkips {
            rng: ChaCha8Rng::seed_from_u64(seed),
            log_q: (1.0 - p).ln(),
        }
    }

    /// Number of failures before the next success.
    fn next(&mut self) -> u64 {
        let u: f64 = self.rng.random();
        let k = ((1.0 - u).ln() / self.log_q).floor();
        if k.is_finite() && k < u64::MAX as f64 {
            k as u64
        } else {
            u64::MAX
        }
    }
}

/// Default edge probability for [`gen_er`]: `ln(n)/n`.
pub fn default_er_probability(n: u64) -> f64 {
    if n < 2 {
        0.0
    } else {
        (n as f64).ln() / n as f64
    }
}

/// Default edge probability for [`gen_bipartite`]: `5·ln(n1+n2)/(n1+n2)`.
pub fn default_bipartite_probability(n1: u64, n2: u64) -> f64 {
    let n = (n1 + n2) as f64;
    if n < 2.0 {
        0.0
    } else {
        (5.0 * n.ln() / n).min(1.0)
    }
}

/// Erdős–Rényi graph on vertices `0..n`: each pair is an edge independently
/// with probability `p`.
pub fn gen_er(n: u64, p: f64, seed: u64) -> Result<Graph> {
    check_probability(p)?;
    let vertices = (0..n).map(VertexId);
    let mut edges = Vec::new();
    if p >= 1.0 {
        for v in 0..n {
            for w in 0..v {
                edges.push((VertexId(w), VertexId(v)));
            }
        }
    } else if p > 0.0 {
        // Walk the lower triangle (v, w<v) in row-major order, jumping over
        // geometrically distributed runs of non-edges.
        let mut skips = GeometricSkips::new(p, seed);
        let (mut v, mut w) = (1u64, 0u64);
        while v < n {
            let mut gap = skips.next();
            while v < n && gap >= v - w {
                gap -= v - w;
                v += 1;
                w = 0;
            }
            if v >= n {
                break;
            }
            w += gap;
            edges.push((VertexId(w), VertexId(v)));
            w += 1;
            if w == v {
                v += 1;
                w = 0;
            }
        }
    }
    Ok(Graph::with_vertices(vertices, edges))
}

/// Random bipartite graph with left side `0..n1` and right side
/// `n1..n1+n2`; each cross pair is an edge independently with probability `p`.
pub fn gen_bipartite(n1: u64, n2: u64, p: f64, seed: u64) -> Result<Graph> {
    check_probability(p)?;
    let vertices = (0..n1 + n2).map(VertexId);
    let mut edges = Vec::new();
    if p >= 1.0 {
        for a in 0..n1 {
            for b in 0..n2 {
                edges.push((VertexId(a), VertexId(n1 + b)));
            }
        }
    } else if p > 0.0 && n2 > 0 {
        let mut skips = GeometricSkips::new(p, seed);
        let total = n1
            .checked_mul(n2)
            .ok_or_else(|| Error::InvalidArgument(format!("bipartite size {n1}x{n2} overflows")))?;
        let mut pos = 0u64;
        loop {
            pos = pos.saturating_add(skips.next());
            if pos >= total {
                break;
            }
            edges.push((VertexId(pos / n2), VertexId(n1 + pos % n2)));
            pos += 1;
        }
    }
    Ok(Graph::with_vertices(vertices, edges))
}

/// Removes each edge of `g` independently with probability `q`, keeping every
/// vertex.
pub fn thin_edges(g: &Graph, q: f64, seed: u64) -> Result<Graph> {
    check_probability(q)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kept: Vec<(VertexId, VertexId)> = g.edges().filter(|_| !rng.random_bool(q)).collect();
    Ok(Graph::with_vertices(g.vertices().iter().copied(), kept))
}

/// Sparse ER graph on `0..2000` with a complete bipartite block planted
/// between `0..8` and `8..16`. Under the id order the planted vertices own
/// most of the dense structure, which concentrates work on a few reducers.
pub fn skew_fixture(seed: u64) -> Result<Graph> {
    let base = gen_er(SKEW_FIXTURE_N, default_er_probability(SKEW_FIXTURE_N), seed)?;
    let k = SKEW_FIXTURE_SIDE;
    let planted = (0..k).flat_map(|a| (k..2 * k).map(move |b| (VertexId(a), VertexId(b))));
    Ok(Graph::with_vertices(
        base.vertices().iter().copied(),
        base.edges().chain(planted),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenKind {
    Er,
    Bipartite,
    Thin,
    Skew,
}

impl fmt::Display for GenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GenKind::Er => "er",
            GenKind::Bipartite => "bipartite",
            GenKind::Thin => "thin",
            GenKind::Skew => "skew",
        })
    }
}

impl FromStr for GenKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<GenKind> {
        match s.trim().to_ascii_lowercase().as_str() {
            "er" => Ok(GenKind::Er),
            "bipartite" => Ok(GenKind::Bipartite),
            "thin" => Ok(GenKind::Thin),
            "skew" => Ok(GenKind::Skew),
            other => Err(Error::InvalidArgument(format!(
                "unknown generator kind `{other}`"
            ))),
        }
    }
}

/// A reproducible generator invocation. `p` is the edge probability for `er`
/// and `bipartite` (defaulted when absent) and the deletion probability for
/// `thin`, which reads its base graph from `input`.
#[derive(Clone, Debug, PartialEq)]
pub struct GenSpec {
    pub kind: GenKind,
    pub n: u64,
    pub n1: u64,
    pub n2: u64,
    pub p: Option<f64>,
    pub seed: u64,
    pub input: Option<PathBuf>,
}

impl GenSpec {
    pub fn er(n: u64, p: Option<f64>, seed: u64) -> GenSpec {
        GenSpec {
            kind: GenKind::Er,
            n,
            n1: 0,
            n2: 0,
            p,
            seed,
            input: None,
        }
    }

    pub fn bipartite(n1: u64, n2: u64, p: Option<f64>, seed: u64) -> GenSpec {
        GenSpec {
            kind: GenKind::Bipartite,
            n1,
            n2,
            ..GenSpec::er(0, p, seed)
        }
    }

    pub fn thin(input: PathBuf, q: f64, seed: u64) -> GenSpec {
        GenSpec {
            kind: GenKind::Thin,
            input: Some(input),
            ..GenSpec::er(0, Some(q), seed)
        }
    }

    pub fn skew(seed: u64) -> GenSpec {
        GenSpec {
            kind: GenKind::Skew,
            ..GenSpec::er(SKEW_FIXTURE_N, None, seed)
        }
    }

    /// Parses `key=value` pairs separated by newlines or commas. Blank lines
    /// and `#` comments are ignored. Keys: kind, n, n1, n2, p, q, seed, input.
    pub fn parse(text: &str) -> Result<GenSpec> {
        let mut kind = None;
        let mut spec = GenSpec::er(0, None, 0);
        for (k, v) in key_values(text)? {
            let num = |v: &str| {
                v.parse::<u64>().map_err(|_| {
                    Error::InvalidArgument(format!("`{k}` expects an integer, got `{v}`"))
                })
            };
            let prob = |v: &str| {
                v.parse::<f64>().map_err(|_| {
                    Error::InvalidArgument(format!("`{k}` expects a number, got `{v}`"))
                })
            };
            match k {
                "kind" => kind = Some(v.parse::<GenKind>()?),
                "n" => spec.n = num(v)?,
                "n1" => spec.n1 = num(v)?,
                "n2" => spec.n2 = num(v)?,
                "p" | "q" => spec.p = Some(prob(v)?),
                "seed" => spec.seed = num(v)?,
                "input" => spec.input = Some(PathBuf::from(v)),
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "unknown generator key `{other}`"
                    )))
                }
            }
        }
        spec.kind =
            kind.ok_or_else(|| Error::InvalidArgument("generator spec needs `kind`".into()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(p) = self.p {
            check_probability(p)?;
        }
        match self.kind {
            GenKind::Thin if self.input.is_none() => {
                Err(Error::InvalidArgument("`thin` needs an input graph".into()))
            }
            GenKind::Thin if self.p.is_none() => Err(Error::InvalidArgument(
                "`thin` needs a deletion probability".into(),
            )),
            _ => Ok(()),
        }
    }

    /// Edge probability actually used by `er`/`bipartite`.
    pub fn effective_p(&self) -> f64 {
        match (self.kind, self.p) {
            (_, Some(p)) => p,
            (GenKind::Bipartite, None) => default_bipartite_probability(self.n1, self.n2),
            _ => default_er_probability(self.n),
        }
    }

    pub fn build(&self) -> Result<Graph> {
        self.validate()?;
        match self.kind {
            GenKind::Er => gen_er(self.n, self.effective_p(), self.seed),
            GenKind::Bipartite => gen_bipartite(self.n1, self.n2, self.effective_p(), self.seed),
            GenKind::Skew => skew_fixture(self.seed),
            GenKind::Thin => {
                let path = self.input.as_ref().expect("validated");
                let loaded = load_edge_list(BufReader::new(File::open(path)?))?;
                thin_edges(&loaded.graph, self.effective_p(), self.seed)
            }
        }
    }

    /// Short name used in reports.
    pub fn label(&self) -> String {
        match self.kind {
            GenKind::Er => format!("er-{}-{}", self.n, self.seed),
            GenKind::Bipartite => format!("bipartite-{}-{}-{}", self.n1, self.n2, self.seed),
            GenKind::Skew => format!("skew-{}", self.seed),
            GenKind::Thin => {
                let stem = self
                    .input
                    .as_ref()
                    .and_then(|p| p.file_stem())
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default();
                format!("{stem}-thin-{}-{}", self.effective_p(), self.seed)
            }
        }
    }
}

/// Splits `key=value` items separated by newlines or commas, skipping blanks
/// and `#` comments.
pub(crate) fn key_values(text: &str) -> Result<Vec<(&str, &str)>> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        for item in line.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| {
                Error::InvalidArgument(format!("expected key=value, got `{item}`"))
            })?;
            out.push((k.trim(), v.trim()));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::write_edge_list;

    fn edge_list(g: &Graph) -> Vec<u8> {
        let mut out = Vec::new();
        write_edge_list(g, &mut out).unwrap();
        out
    }

    #[test]
    fn er_extremes() {
        let empty = gen_er(10, 0.0, 1).unwrap();
        assert_eq!((empty.vertex_count(), empty.edge_count()), (10, 0));
        assert_eq!(gen_er(4, 1.0, 1).unwrap().edge_count(), 6);
    }

    #[test]
    fn er_skipping_covers_every_pair() {
        // With p close to 1 nearly every pair must appear, including the
        // first and last of the lower triangle.
        let g = gen_er(30, 0.999_999, 3).unwrap();
        assert_eq!(g.edge_count(), 30 * 29 / 2);
    }

    #[test]
    fn er_edge_count_is_near_expectation() {
        let n = 2000u64;
        let p = 0.01;
        let expected = p * (n * (n - 1) / 2) as f64;
        let sd = (expected * (1.0 - p)).sqrt();
        for seed in 0..5 {
            let m = gen_er(n, p, seed).unwrap().edge_count() as f64;
            assert!((m - expected).abs() < 5.0 * sd, "seed {seed}: m={m}");
        }
    }

    #[test]
    fn er_is_seed_deterministic() {
        let a = gen_er(300, 0.05, 42).unwrap();
        let b = gen_er(300, 0.05, 42).unwrap();
        let c = gen_er(300, 0.05, 43).unwrap();
        assert_eq!(edge_list(&a), edge_list(&b));
        assert_ne!(edge_list(&a), edge_list(&c));
    }

    #[test]
    fn bipartite_extremes() {
        let g = gen_bipartite(2, 3, 1.0, 0).unwrap();
        assert_eq!(g.edge_count(), 6);
        assert_eq!(gen_bipartite(2, 3, 0.0, 0).unwrap().edge_count(), 0);
    }

    #[test]
    fn bipartite_edges_cross_sides() {
        let g = gen_bipartite(40, 60, 0.2, 7).unwrap();
        assert_eq!(g.vertex_count(), 100);
        for (a, b) in g.edges() {
            assert!(a.0 < 40 && b.0 >= 40, "{a}-{b}");
        }
    }

    #[test]
    fn bad_probability_is_rejected() {
        assert!(gen_er(5, 1.5, 0).is_err());
        assert!(gen_bipartite(5, 5, -0.1, 0).is_err());
        assert!(thin_edges(&gen_er(5, 1.0, 0).unwrap(), 2.0, 0).is_err());
    }

    #[test]
    fn thinning_extremes() {
        let k4 = gen_er(4, 1.0, 0).unwrap();
        assert_eq!(edge_list(&thin_edges(&k4, 0.0, 9).unwrap()), edge_list(&k4));
        let bare = thin_edges(&k4, 1.0, 9).unwrap();
        assert_eq!((bare.vertex_count(), bare.edge_count()), (4, 0));
        let a = thin_edges(&k4, 0.5, 5).unwrap();
        let b = thin_edges(&k4, 0.5, 5).unwrap();
        assert_eq!(edge_list(&a), edge_list(&b));
    }

    #[test]
    fn skew_fixture_contains_the_planted_block() {
        let g = skew_fixture(1).unwrap();
        assert_eq!(g.vertex_count() as u64, SKEW_FIXTURE_N);
        for a in 0..SKEW_FIXTURE_SIDE {
            for b in SKEW_FIXTURE_SIDE..2 * SKEW_FIXTURE_SIDE {
                assert!(g.has_edge(VertexId(a), VertexId(b)));
            }
        }
    }

    #[test]
    fn spec_parsing() {
        let spec = GenSpec::parse("kind=er\nn=100 # vertices\np=0.1, seed=4").unwrap();
        assert_eq!(spec, GenSpec::er(100, Some(0.1), 4));
        let spec = GenSpec::parse("kind=bipartite,n1=3,n2=4").unwrap();
        assert_eq!(spec.effective_p(), default_bipartite_probability(3, 4));
        assert!(GenSpec::parse("n=3").is_err());
        assert!(GenSpec::parse("kind=er,x=1").is_err());
        assert!(GenSpec::parse("kind=thin,q=0.4").is_err());
        assert!(GenSpec::parse("kind=er,p=2").is_err());
    }

    #[test]
    fn default_probabilities() {
        let p = default_er_probability(50_000);
        assert!((p - 50_000f64.ln() / 50_000.0).abs() < 1e-15);
        assert_eq!(default_er_probability(1), 0.0);
        let q = default_bipartite_probability(50_000, 100_000);
        assert!((q * 150_000.0 / 150_000f64.ln() - 5.0).abs() < 1e-9);
    }
}
