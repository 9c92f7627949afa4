//! Benchmark harness: runs pipelines over a grid of graphs, thresholds and
//! reducer counts and reports timings, output sizes and speedups.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::engine::{Engine, JobStats};
use crate::error::{Error, Result};
use crate::gen::GenSpec;
use crate::graph::Graph;
use crate::parallel::{self, Algorithm};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub algorithm: String,
    pub graph: String,
    pub s: usize,
    pub r: usize,
    /// End-to-end time of the pipeline, all rounds included.
    pub wall_millis: f64,
    pub count: u64,
    /// Sum of `|L|·|R|` over the enumerated bicliques.
    pub output_size: u64,
    /// `wall(r=1) / wall(r)` when the grid contains `r = 1`.
    pub speedup: Option<f64>,
    pub stats: JobStats,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    algorithm: &'a str,
    graph: &'a str,
    s: usize,
    r: usize,
    wall_millis: f64,
    count: u64,
    output_size: u64,
    speedup: Option<f64>,
    communication_bytes: u64,
    communication_records: u64,
}

/// Runs one pipeline and measures it.
pub fn bench_one(
    engine: &Engine,
    label: &str,
    g: &Graph,
    algo: Algorithm,
    s: usize,
    r: usize,
) -> Result<BenchReport> {
    let start = Instant::now();
    let run = parallel::run(engine, g, algo, s, r)?;
    let wall_millis = start.elapsed().as_secs_f64() * 1e3;
    let summary = run.summary()?;
    Ok(BenchReport {
        algorithm: algo.to_string(),
        graph: label.to_string(),
        s,
        r,
        wall_millis,
        count: summary.count,
        output_size: summary.edge_sum,
        speedup: None,
        stats: run.stats,
    })
}

/// Runs every combination one at a time; with `repeats > 1` the run with the
/// median wall time is kept.
pub fn bench(
    engine: &Engine,
    algorithms: &[Algorithm],
    graphs: &[(String, Graph)],
    s_values: &[usize],
    r_values: &[usize],
    repeats: usize,
) -> Result<Vec<BenchReport>> {
    let mut reports = Vec::new();
    for (label, g) in graphs {
        for &algo in algorithms {
            for &s in s_values {
                let first = reports.len();
                for &r in r_values {
                    let mut runs = (0..repeats.max(1))
                        .map(|_| bench_one(engine, label, g, algo, s, r))
                        .collect::<Result<Vec<_>>>()?;
                    runs.sort_by(|a, b| a.wall_millis.total_cmp(&b.wall_millis));
                    let mid = runs.len() / 2;
                    reports.push(runs.swap_remove(mid));
                }
                let series = &mut reports[first..];
                if let Some(base) = series.iter().find(|b| b.r == 1).map(|b| b.wall_millis) {
                    for b in series {
                        b.speedup = Some(base / b.wall_millis);
                    }
                }
            }
        }
    }
    Ok(reports)
}

pub fn write_csv<W: Write>(reports: &[BenchReport], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for b in reports {
        out.serialize(CsvRow {
            algorithm: &b.algorithm,
            graph: &b.graph,
            s: b.s,
            r: b.r,
            wall_millis: b.wall_millis,
            count: b.count,
            output_size: b.output_size,
            speedup: b.speedup,
            communication_bytes: b.stats.communication_bytes(),
            communication_records: b.stats.communication_records(),
        })?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(reports: &[BenchReport], w: W) -> Result<()> {
    serde_json::to_writer_pretty(w, reports)?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub enum GraphSource {
    File(PathBuf),
    Generated(GenSpec),
}

/// A benchmark grid read from a config file of `key = value` lines:
///
/// ```text
/// algorithms = cd0 cd1
/// s = 1 2
/// reducers = 1 2 4
/// repeats = 3
/// graph = kind=er,n=1000,seed=1
/// graph = data/p2p.txt
/// ```
///
/// List values are separated by spaces or commas; `graph` may repeat and is
/// either a generator spec or an edge-list path.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub algorithms: Vec<Algorithm>,
    pub s_values: Vec<usize>,
    pub r_values: Vec<usize>,
    pub repeats: usize,
    pub graphs: Vec<GraphSource>,
}

impl BenchConfig {
    pub fn parse(text: &str) -> Result<BenchConfig> {
        let mut cfg = BenchConfig {
            algorithms: vec![Algorithm::Cd1],
            s_values: vec![1],
            r_values: vec![1],
            repeats: 1,
            graphs: Vec::new(),
        };
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |message: String| Error::Parse {
                line: lineno + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key = value, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let items = || value.split([' ', ',', '\t']).filter(|s| !s.is_empty());
            let numbers = || {
                items()
                    .map(|x| {
                        x.parse::<usize>()
                            .map_err(|_| bad(format!("`{key}`: bad number `{x}`")))
                    })
                    .collect::<Result<Vec<_>>>()
            };
            match key {
                "algorithms" | "algorithm" => {
                    cfg.algorithms = items().map(str::parse).collect::<Result<Vec<_>>>()?
                }
                "s" => cfg.s_values = numbers()?,
                "reducers" | "r" => cfg.r_values = numbers()?,
                "repeats" => {
                    cfg.repeats = numbers()?
                        .first()
                        .copied()
                        .ok_or_else(|| bad("`repeats` is empty".into()))?
                }
                "graph" if value.contains('=') => cfg
                    .graphs
                    .push(GraphSource::Generated(GenSpec::parse(value)?)),
                "graph" => cfg.graphs.push(GraphSource::File(PathBuf::from(value))),
                other => return Err(bad(format!("unknown key `{other}`"))),
            }
        }
        if cfg.graphs.is_empty() {
            return Err(Error::InvalidArgument("bench config lists no graph".into()));
        }
        if cfg.algorithms.is_empty() || cfg.s_values.is_empty() || cfg.r_values.is_empty() {
            return Err(Error::InvalidArgument(
                "bench config has an empty list".into(),
            ));
        }
        if cfg.s_values.contains(&0) || cfg.r_values.contains(&0) {
            return Err(Error::InvalidArgument(
                "s and reducers must be at least 1".into(),
            ));
        }
        Ok(cfg)
    }
}
