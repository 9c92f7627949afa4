use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use mbe_core::bench::{self, BenchConfig, GraphSource};
use mbe_core::engine::Skew;
use mbe_core::gen::{GenKind, GenSpec};
use mbe_core::graph::write_edge_list;
use mbe_core::parallel::{self, wire};
use mbe_core::seq::{self, ORACLE_MAX_VERTICES};
use mbe_core::{Algorithm, Biclique, Engine, EnumSummary, Error, JobStats, LoadedGraph};

const EXIT_MISMATCH: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "mbe", version, about = "Maximal biclique enumeration")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Algo {
    Dfs,
    Consensus,
    Cdfs,
    Cd0,
    Cd1,
    Cd2,
    Ccons,
}

impl Algo {
    fn pipeline(self) -> Option<Algorithm> {
        match self {
            Algo::Dfs | Algo::Consensus => None,
            Algo::Cdfs => Some(Algorithm::Cdfs),
            Algo::Cd0 => Some(Algorithm::Cd0),
            Algo::Cd1 => Some(Algorithm::Cd1),
            Algo::Cd2 => Some(Algorithm::Cd2),
            Algo::Ccons => Some(Algorithm::Ccons),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate maximal bicliques of an edge-list graph.
    Enumerate {
        #[arg(long, value_enum)]
        algo: Algo,
        #[arg(long)]
        input: PathBuf,
        /// Minimum size of each side.
        #[arg(long, default_value_t = 1)]
        s: usize,
        /// Reducer count; defaults to the number of logical cores.
        #[arg(long)]
        reducers: Option<usize>,
        /// Output directory for biclique shards, summary and job report.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write a single bicliques.txt instead of one shard per reducer.
        #[arg(long, requires = "out")]
        merge: bool,
        /// Keep intermediate round data in shard files under this directory.
        #[arg(long)]
        spill: Option<PathBuf>,
    },
    /// Generate a random graph as an edge list.
    Generate {
        #[arg(long, value_parser = parse_kind)]
        kind: Option<GenKind>,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        n1: Option<u64>,
        #[arg(long)]
        n2: Option<u64>,
        /// Edge probability (er, bipartite).
        #[arg(long)]
        p: Option<f64>,
        /// Edge deletion probability (thin).
        #[arg(long)]
        q: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Base graph for thin.
        #[arg(long)]
        input: Option<PathBuf>,
        /// key=value generator spec file; flags given on the command line win.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cross-check every algorithm (and the brute-force oracle on small graphs).
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        s: usize,
        #[arg(long)]
        reducers: Option<usize>,
    },
    /// Run a benchmark grid described by a config file.
    Bench {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Summarize a job report written by `enumerate`.
    Stats {
        #[arg(long)]
        job_report: PathBuf,
    },
}

fn parse_kind(s: &str) -> Result<GenKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Failure {
    Usage(String),
    Mismatch,
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::InvalidArgument(_) | Error::InvalidThreshold(_) => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Failure {
        Failure::Runtime(e.to_string())
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn load(path: &Path) -> CliResult<LoadedGraph> {
    let file = File::open(path)
        .map_err(|e| Failure::Usage(format!("cannot open {}: {e}", path.display())))?;
    mbe_core::load_edge_list(BufReader::new(file)).map_err(|e| match e {
        Error::Parse { .. } | Error::EmptyGraph => {
            Failure::Usage(format!("{}: {e}", path.display()))
        }
        other => other.into(),
    })
}

fn default_reducers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn check_counts(s: usize, reducers: usize) -> CliResult {
    if s == 0 {
        return Err(Failure::Usage("--s must be at least 1".into()));
    }
    if reducers == 0 {
        return Err(Failure::Usage("--reducers must be at least 1".into()));
    }
    Ok(())
}

fn engine(spill: Option<&Path>) -> CliResult<Engine> {
    let engine = Engine::new();
    match spill {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            Ok(engine.with_spill_dir(dir))
        }
        None => Ok(engine),
    }
}

struct ShardWriter<'a> {
    graph: &'a LoadedGraph,
    out: Option<BufWriter<File>>,
}

impl ShardWriter<'_> {
    fn write(&mut self, b: &Biclique) -> CliResult {
        if let Some(out) = self.out.as_mut() {
            writeln!(out, "{}", b.display_with(|v| self.graph.display_vertex(v)))?;
        }
        Ok(())
    }

    fn finish(self) -> CliResult {
        if let Some(mut out) = self.out {
            out.flush()?;
        }
        Ok(())
    }
}

fn open_shard(dir: Option<&Path>, name: &str) -> CliResult<Option<BufWriter<File>>> {
    dir.map(|d| Ok(BufWriter::new(File::create(d.join(name))?)))
        .transpose()
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    algo: Algo,
    input: &Path,
    s: usize,
    reducers: Option<usize>,
    out: Option<&Path>,
    merge: bool,
    spill: Option<&Path>,
) -> CliResult {
    let r = reducers.unwrap_or_else(default_reducers);
    check_counts(s, r)?;
    let graph = load(input)?;
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        if let Some(labels) = &graph.labels {
            labels.write_to(BufWriter::new(File::create(dir.join("labels.tsv"))?))?;
        }
    }
    let start = Instant::now();
    let mut summary = EnumSummary::default();
    let mut job: Option<JobStats> = None;
    match algo.pipeline() {
        None => {
            let mut w = ShardWriter {
                graph: &graph,
                out: open_shard(
                    out,
                    if merge {
                        "bicliques.txt"
                    } else {
                        "part-00000.txt"
                    },
                )?,
            };
            let mut failure = None;
            let mut sink = |b: Biclique| {
                if failure.is_none() {
                    failure = w.write(&b).err();
                }
            };
            summary = match algo {
                Algo::Dfs => seq::mbe_dfs(&graph.graph, s, &mut sink)?,
                _ => seq::mbe_consensus(&graph.graph, s, &mut sink)?,
            };
            if let Some(f) = failure {
                return Err(f);
            }
            w.finish()?;
        }
        Some(pipeline) => {
            let run = parallel::run(&engine(spill)?, &graph.graph, pipeline, s, r)?;
            let mut merged = if merge {
                open_shard(out, "bicliques.txt")?
            } else {
                None
            };
            for part in 0..run.output.partition_count() {
                let mut w = ShardWriter {
                    graph: &graph,
                    out: match merged.take() {
                        Some(m) => Some(m),
                        None if merge => None,
                        None => open_shard(out, &format!("part-{part:05}.txt"))?,
                    },
                };
                let mut failure = None;
                run.output.for_each_in(part, |_, v| {
                    let b = wire::decode_biclique(v)?;
                    summary.record(&b);
                    if failure.is_none() {
                        failure = w.write(&b).err();
                    }
                    Ok(())
                })?;
                if let Some(f) = failure {
                    return Err(f);
                }
                if merge {
                    merged = w.out;
                } else {
                    w.finish()?;
                }
            }
            if let Some(mut m) = merged {
                m.flush()?;
            }
            job = Some(run.stats);
        }
    }
    let millis = start.elapsed().as_secs_f64() * 1e3;
    println!("{summary}");
    eprintln!("algo={algo:?} s={s} reducers={r} wall_millis={millis:.1}");
    if let Some(dir) = out {
        fs::write(dir.join("summary.txt"), format!("{summary}\n"))?;
        if let Some(job) = &job {
            fs::write(dir.join("job.json"), job.to_json()?)?;
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn generate(
    kind: Option<GenKind>,
    n: Option<u64>,
    n1: Option<u64>,
    n2: Option<u64>,
    p: Option<f64>,
    q: Option<f64>,
    seed: u64,
    input: Option<PathBuf>,
    config: Option<&Path>,
    out: &Path,
) -> CliResult {
    let mut spec = match config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            GenSpec::parse(&text)?
        }
        None => {
            let kind =
                kind.ok_or_else(|| Failure::Usage("--kind or --config is required".into()))?;
            GenSpec {
                kind,
                ..GenSpec::er(0, None, seed)
            }
        }
    };
    if let Some(kind) = kind {
        spec.kind = kind;
    }
    if config.is_none() || seed != 0 {
        spec.seed = seed;
    }
    spec.n = n.unwrap_or(spec.n);
    spec.n1 = n1.unwrap_or(spec.n1);
    spec.n2 = n2.unwrap_or(spec.n2);
    spec.p = p.or(q).or(spec.p);
    spec.input = input.or(spec.input);
    let graph = spec.build().map_err(|e| match e {
        Error::Io(e) => Failure::Usage(format!("cannot read input graph: {e}")),
        other => other.into(),
    })?;
    let mut w = BufWriter::new(File::create(out)?);
    write_edge_list(&graph, &mut w)?;
    w.flush()?;
    println!(
        "{} n={} m={}",
        spec.label(),
        graph.vertex_count(),
        graph.edge_count()
    );
    Ok(())
}

fn first_difference(expected: &[Biclique], actual: &[Biclique]) -> Option<String> {
    let (mut i, mut j) = (0, 0);
    while i < expected.len() || j < actual.len() {
        match (expected.get(i), actual.get(j)) {
            (Some(a), Some(b)) if a == b => {
                i += 1;
                j += 1;
            }
            (Some(a), Some(b)) if a < b => return Some(format!("missing {a}")),
            (Some(a), None) => return Some(format!("missing {a}")),
            (_, Some(b)) if j > 0 && actual[j - 1] == *b => return Some(format!("duplicate {b}")),
            (_, Some(b)) => return Some(format!("unexpected {b}")),
            (None, None) => unreachable!(),
        }
    }
    None
}

fn verify(input: &Path, s: usize, reducers: Option<usize>) -> CliResult {
    let r = reducers.unwrap_or_else(default_reducers);
    check_counts(s, r)?;
    let graph = load(input)?;
    let g = &graph.graph;
    let sorted = |mut v: Vec<Biclique>| {
        v.sort();
        v
    };
    let mut reference = Vec::new();
    seq::mbe_dfs(g, s, &mut reference)?;
    let reference = sorted(reference);
    let mut candidates: Vec<(String, Vec<Biclique>)> = Vec::new();
    let mut consensus = Vec::new();
    seq::mbe_consensus(g, s, &mut consensus)?;
    candidates.push(("consensus".into(), sorted(consensus)));
    let engine = Engine::new();
    for algo in Algorithm::ALL {
        let run = parallel::run(&engine, g, algo, s, r)?;
        let found = run.bicliques()?.into_iter().map(|(_, b)| b).collect();
        candidates.push((algo.to_string(), sorted(found)));
    }
    let mut ok = true;
    let mut report = |name: &str, other: &str, expected: &[Biclique], actual: &[Biclique]| {
        match first_difference(expected, actual) {
            None => println!("PASS {name} == {other} ({} bicliques)", actual.len()),
            Some(diff) => {
                ok = false;
                println!("FAIL {name} != {other}: {diff}");
            }
        }
    };
    for (name, found) in &candidates {
        report(name, "dfs", &reference, found);
    }
    if g.vertex_count() <= ORACLE_MAX_VERTICES {
        let oracle: Vec<Biclique> = seq::brute_force_oracle(g, s)?.into_iter().collect();
        report("dfs", "oracle", &oracle, &reference);
    } else {
        println!(
            "SKIP oracle (n={} > {ORACLE_MAX_VERTICES})",
            g.vertex_count()
        );
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Mismatch)
    }
}

fn run_bench(config: &Path, out: &Path) -> CliResult {
    let text = fs::read_to_string(config)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", config.display())))?;
    let cfg = BenchConfig::parse(&text).map_err(|e| Failure::Usage(e.to_string()))?;
    let mut graphs = Vec::new();
    for source in &cfg.graphs {
        graphs.push(match source {
            GraphSource::File(path) => {
                let label = path
                    .file_stem()
                    .map_or_else(String::new, |s| s.to_string_lossy().into_owned());
                (label, load(path)?.graph)
            }
            GraphSource::Generated(spec) => (spec.label(), spec.build()?),
        });
    }
    let reports = bench::bench(
        &Engine::new(),
        &cfg.algorithms,
        &graphs,
        &cfg.s_values,
        &cfg.r_values,
        cfg.repeats,
    )?;
    fs::create_dir_all(out)?;
    bench::write_csv(&reports, File::create(out.join("bench.csv"))?)?;
    bench::write_json(
        &reports,
        BufWriter::new(File::create(out.join("bench.json"))?),
    )?;
    println!("algorithm\tgraph\ts\tr\twall_millis\tcount\toutput_size\tspeedup");
    for b in &reports {
        let speedup = b.speedup.map_or_else(|| "-".into(), |x| format!("{x:.2}"));
        println!(
            "{}\t{}\t{}\t{}\t{:.1}\t{}\t{}\t{}",
            b.algorithm, b.graph, b.s, b.r, b.wall_millis, b.count, b.output_size, speedup
        );
    }
    Ok(())
}

fn stats(path: &Path) -> CliResult {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let job = JobStats::from_json(&text)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    println!("round\tname\treducers\tmap_records\tmap_bytes\treduce_records\treduce_bytes\treducer_mean_ms\treducer_stddev_ms\twall_ms");
    for (i, r) in job.rounds.iter().enumerate() {
        let skew = Skew::of(&r.reducer_millis);
        println!(
            "{i}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.3}\t{:.3}\t{:.1}",
            r.name,
            r.reducers,
            r.map_records,
            r.map_bytes,
            r.reduce_output_records,
            r.reduce_output_bytes,
            skew.mean,
            skew.stddev,
            r.wall_millis
        );
    }
    println!(
        "total\tcommunication_records={}\tcommunication_bytes={}\twall_ms={:.1}",
        job.communication_records(),
        job.communication_bytes(),
        job.total_millis
    );
    Ok(())
}

fn dispatch(cli: Cli) -> CliResult {
    match cli.command {
        Command::Enumerate {
            algo,
            input,
            s,
            reducers,
            out,
            merge,
            spill,
        } => enumerate(
            algo,
            &input,
            s,
            reducers,
            out.as_deref(),
            merge,
            spill.as_deref(),
        ),
        Command::Generate {
            kind,
            n,
            n1,
            n2,
            p,
            q,
            seed,
            input,
            config,
            out,
        } => generate(kind, n, n1, n2, p, q, seed, input, config.as_deref(), &out),
        Command::Verify { input, s, reducers } => verify(&input, s, reducers),
        Command::Bench { config, out } => run_bench(&config, &out),
        Command::Stats { job_report } => stats(&job_report),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch) => ExitCode::from(EXIT_MISMATCH),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
