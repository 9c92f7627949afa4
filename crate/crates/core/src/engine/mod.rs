//! A local, multi-round map/shuffle/reduce engine.
//!
//! Every round maps each input record, routes map output to reducer
//! `stable_hash(key) mod r`, groups each reducer's records by key, and calls
//! the reduce function once per key. Records cross round boundaries as bytes,
//! so the byte counters reflect what a distributed run would ship.

pub mod codec;
mod stats;

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

pub use codec::RecordBuf;
pub use stats::{reducer_skew, JobStats, RoundStats, Skew};

use crate::error::{Error, Result, TaskError};

/// An owned key/value pair. An empty key marks direct output.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Record {
    pub key: Vec<u8>,
    pub value: Vec<u8>,
}

impl Record {
    pub fn new(key: impl Into<Vec<u8>>, value: impl Into<Vec<u8>>) -> Record {
        Record {
            key: key.into(),
            value: value.into(),
        }
    }
}

/// Round input or output: in-memory partitions or spilled shard files.
#[derive(Debug)]
pub enum Dataset {
    Memory(Vec<RecordBuf>),
    Shards(Vec<PathBuf>),
}

impl Dataset {
    pub fn empty() -> Dataset {
        Dataset::Memory(Vec::new())
    }

    pub fn from_records<I: IntoIterator<Item = Record>>(records: I) -> Dataset {
        let mut buf = RecordBuf::new();
        for r in records {
            buf.push(&r.key, &r.value);
        }
        Dataset::Memory(vec![buf])
    }

    pub fn partition_count(&self) -> usize {
        match self {
            Dataset::Memory(parts) => parts.len(),
            Dataset::Shards(paths) => paths.len(),
        }
    }

    /// Visits the records of partition `i`.
    pub fn for_each_in<F>(&self, i: usize, mut f: F) -> Result<()>
    where
        F: FnMut(&[u8], &[u8]) -> Result<()>,
    {
        let shard;
        let part = match self {
            Dataset::Memory(parts) => &parts[i],
            Dataset::Shards(paths) => {
                shard = RecordBuf::read_framed(File::open(&paths[i])?)?;
                &shard
            }
        };
        for (k, v) in part.iter() {
            f(k, v)?;
        }
        Ok(())
    }

    /// Visits every record, partition by partition.
    pub fn for_each<F>(&self, mut f: F) -> Result<()>
    where
        F: FnMut(&[u8], &[u8]) -> Result<()>,
    {
        for i in 0..self.partition_count() {
            self.for_each_in(i, &mut f)?;
        }
        Ok(())
    }

    pub fn to_records(&self) -> Result<Vec<Record>> {
        let mut out = Vec::new();
        self.for_each(|k, v| {
            out.push(Record::new(k, v));
            Ok(())
        })?;
        Ok(out)
    }

    pub fn record_count(&self) -> Result<usize> {
        let mut n = 0;
        self.for_each(|_, _| {
            n += 1;
            Ok(())
        })?;
        Ok(n)
    }
}

/// Collects the records a map or reduce call emits and counts them.
pub struct Emitter<'a> {
    buckets: Vec<RecordBuf>,
    route: &'a (dyn Fn(&[u8]) -> usize + Sync),
    records: u64,
    bytes: u64,
}

impl<'a> Emitter<'a> {
    fn new(buckets: usize, route: &'a (dyn Fn(&[u8]) -> usize + Sync)) -> Emitter<'a> {
        Emitter {
            buckets: vec![RecordBuf::new(); buckets],
            route,
            records: 0,
            bytes: 0,
        }
    }

    pub fn emit(&mut self, key: &[u8], value: &[u8]) {
        let b = (self.route)(key);
        self.buckets[b].push(key, value);
        self.records += 1;
        self.bytes += codec::frame_len(key, value) as u64;
    }

    pub fn records(&self) -> u64 {
        self.records
    }
}

pub type MapFn<'a> = dyn Fn(&[u8], &[u8], &mut Emitter) -> Result<(), TaskError> + Send + Sync + 'a;
pub type ReduceFn<'a> =
    dyn Fn(&[u8], &[&[u8]], &mut Emitter) -> Result<(), TaskError> + Send + Sync + 'a;
pub type PartitionFn<'a> = dyn Fn(&[u8], usize) -> usize + Send + Sync + 'a;

/// One map/shuffle/reduce stage.
pub struct RoundSpec<'a> {
    pub name: String,
    pub reducers: usize,
    map: Box<MapFn<'a>>,
    reduce: Box<ReduceFn<'a>>,
    partitioner: Option<Box<PartitionFn<'a>>>,
}

impl<'a> RoundSpec<'a> {
    pub fn new<M, R>(name: impl Into<String>, reducers: usize, map: M, reduce: R) -> RoundSpec<'a>
    where
        M: Fn(&[u8], &[u8], &mut Emitter) -> Result<(), TaskError> + Send + Sync + 'a,
        R: Fn(&[u8], &[&[u8]], &mut Emitter) -> Result<(), TaskError> + Send + Sync + 'a,
    {
        RoundSpec {
            name: name.into(),
            reducers,
            map: Box::new(map),
            reduce: Box::new(reduce),
            partitioner: None,
        }
    }

    /// Replaces the default `stable_hash(key) mod r` reducer assignment.
    pub fn with_partitioner<P>(mut self, p: P) -> RoundSpec<'a>
    where
        P: Fn(&[u8], usize) -> usize + Send + Sync + 'a,
    {
        self.partitioner = Some(Box::new(p));
        self
    }

    fn reducer_of(&self, key: &[u8]) -> usize {
        match &self.partitioner {
            Some(p) => p(key, self.reducers) % self.reducers,
            None => (stable_hash(key) % self.reducers as u64) as usize,
        }
    }
}

/// 64-bit FNV-1a; identical across runs, platforms and toolchains.
pub fn stable_hash(key: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in key {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Runs `f(0..tasks)` on at most `threads` scoped threads; results in task order.
fn run_tasks<T, F>(threads: usize, tasks: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    if threads <= 1 || tasks <= 1 {
        return (0..tasks).map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let mut results: Vec<(usize, T)> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads.min(tasks))
            .map(|_| {
                scope.spawn(|| {
                    let mut local = Vec::new();
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        if i >= tasks {
                            break local;
                        }
                        local.push((i, f(i)));
                    }
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("engine worker panicked"))
            .collect()
    });
    results.sort_unstable_by_key(|(i, _)| *i);
    results.into_iter().map(|(_, t)| t).collect()
}

enum MapInput<'d> {
    Slice(&'d RecordBuf, std::ops::Range<usize>),
    Shard(&'d Path),
}

struct MapOutput {
    buckets: Vec<RecordBuf>,
    records: u64,
    bytes: u64,
}

struct ReduceOutput {
    output: Option<RecordBuf>,
    records: u64,
    bytes: u64,
    groups: u64,
    millis: f64,
}

/// Executes rounds on a bounded pool of worker threads.
#[derive(Clone, Debug)]
pub struct Engine {
    max_workers: usize,
    spill_dir: Option<PathBuf>,
}

impl Default for Engine {
    fn default() -> Self {
        Engine::new()
    }
}

impl Engine {
    /// Worker threads capped at the machine's available parallelism.
    pub fn new() -> Engine {
        Engine {
            max_workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            spill_dir: None,
        }
    }

    pub fn with_max_workers(mut self, n: usize) -> Engine {
        self.max_workers = n.max(1);
        self
    }

    /// Writes every round's reduce output to shard files under `dir` instead
    /// of keeping it in memory.
    pub fn with_spill_dir(mut self, dir: impl Into<PathBuf>) -> Engine {
        self.spill_dir = Some(dir.into());
        self
    }

    pub fn max_workers(&self) -> usize {
        self.max_workers
    }

    pub fn spill_dir(&self) -> Option<&Path> {
        self.spill_dir.as_deref()
    }

    pub fn run_round(&self, input: &Dataset, spec: &RoundSpec) -> Result<(Dataset, RoundStats)> {
        self.run_round_at(0, input, spec)
    }

    /// Chains rounds; each round's output is the next round's input.
    pub fn run_pipeline(&self, input: Dataset, specs: &[RoundSpec]) -> Result<(Dataset, JobStats)> {
        let start = Instant::now();
        let mut stats = JobStats::default();
        let mut data = input;
        for (i, spec) in specs.iter().enumerate() {
            let (out, round) = self.run_round_at(i, &data, spec)?;
            stats.rounds.push(round);
            data = out;
        }
        stats.total_millis = start.elapsed().as_secs_f64() * 1e3;
        Ok((data, stats))
    }

    fn run_round_at(
        &self,
        round: usize,
        input: &Dataset,
        spec: &RoundSpec,
    ) -> Result<(Dataset, RoundStats)> {
        if spec.reducers == 0 {
            return Err(Error::InvalidArgument(format!(
                "round {round} ({}): reducer count must be positive",
                spec.name
            )));
        }
        let start = Instant::now();
        let r = spec.reducers;
        let threads = r.min(self.max_workers);

        // Map.
        let mut inputs: Vec<MapInput> = Vec::new();
        match input {
            Dataset::Memory(parts) => {
                for part in parts {
                    let chunk = part.len().div_ceil(threads).max(1);
                    let mut lo = 0;
                    while lo < part.len() {
                        let hi = (lo + chunk).min(part.len());
                        inputs.push(MapInput::Slice(part, lo..hi));
                        lo = hi;
                    }
                }
            }
            Dataset::Shards(paths) => inputs.extend(paths.iter().map(|p| MapInput::Shard(p))),
        }
        let route = |key: &[u8]| spec.reducer_of(key);
        let map_results = run_tasks(threads, inputs.len(), |t| -> Result<MapOutput> {
            let mut em = Emitter::new(r, &route);
            let fail = |source| Error::MapFailed {
                round,
                name: spec.name.clone(),
                source,
            };
            match &inputs[t] {
                MapInput::Slice(part, range) => {
                    for i in range.clone() {
                        let (k, v) = part.get(i);
                        (spec.map)(k, v, &mut em).map_err(fail)?;
                    }
                }
                MapInput::Shard(path) => {
                    let part = RecordBuf::read_framed(File::open(path)?)?;
                    for (k, v) in part.iter() {
                        (spec.map)(k, v, &mut em).map_err(fail)?;
                    }
                }
            }
            Ok(MapOutput {
                records: em.records,
                bytes: em.bytes,
                buckets: em.buckets,
            })
        });
        let map_outputs = map_results.into_iter().collect::<Result<Vec<_>>>()?;
        let map_records = map_outputs.iter().map(|m| m.records).sum();
        let map_bytes = map_outputs.iter().map(|m| m.bytes).sum();
        let map_millis = start.elapsed().as_secs_f64() * 1e3;

        // Shuffle + reduce.
        let shard_paths: Option<Vec<PathBuf>> = match &self.spill_dir {
            Some(dir) => {
                fs::create_dir_all(dir)?;
                Some(
                    (0..r)
                        .map(|j| dir.join(format!("round-{round:02}-part-{j:05}.rec")))
                        .collect(),
                )
            }
            None => None,
        };
        let direct = |_: &[u8]| 0usize;
        let reduce_results = run_tasks(threads, r, |j| -> Result<ReduceOutput> {
            let mut index: Vec<(u64, u32, u32)> = Vec::new();
            for (t, m) in map_outputs.iter().enumerate() {
                let bucket = &m.buckets[j];
                index.extend(
                    (0..bucket.len()).map(|i| (sort_prefix(bucket.key(i)), t as u32, i as u32)),
                );
            }
            let key_of =
                |&(_, t, i): &(u64, u32, u32)| map_outputs[t as usize].buckets[j].key(i as usize);
            // Ties keep map order so every group sees its values deterministically.
            let short_keys = index.iter().all(|e| e.0 & 0xff <= PREFIX_BYTES as u64);
            if short_keys {
                index.sort_unstable();
            } else {
                index.sort_unstable_by(|a, b| {
                    a.0.cmp(&b.0)
                        .then_with(|| {
                            if a.0 & 0xff == PREFIX_BYTES as u64 + 1 {
                                key_of(a).cmp(key_of(b))
                            } else {
                                std::cmp::Ordering::Equal
                            }
                        })
                        .then((a.1, a.2).cmp(&(b.1, b.2)))
                });
            }

            // Reducer time covers the batch of keys, not the shuffle sort.
            let t0 = Instant::now();
            let mut em = Emitter::new(1, &direct);
            let mut groups = 0u64;
            let mut values: Vec<&[u8]> = Vec::new();
            let mut lo = 0;
            while lo < index.len() {
                let key = key_of(&index[lo]);
                let mut hi = lo;
                values.clear();
                while hi < index.len() && index[hi].0 == index[lo].0 && key_of(&index[hi]) == key {
                    let (_, t, i) = index[hi];
                    values.push(map_outputs[t as usize].buckets[j].get(i as usize).1);
                    hi += 1;
                }
                (spec.reduce)(key, &values, &mut em).map_err(|source| Error::ReduceFailed {
                    round,
                    name: spec.name.clone(),
                    key: key.to_vec(),
                    source,
                })?;
                groups += 1;
                lo = hi;
            }
            let Emitter {
                mut buckets,
                records,
                bytes,
                ..
            } = em;
            let buf = buckets.pop().expect("one output bucket");
            let output = match &shard_paths {
                Some(paths) => {
                    let mut w = BufWriter::new(File::create(&paths[j])?);
                    buf.write_framed(&mut w)?;
                    w.flush()?;
                    None
                }
                None => Some(buf),
            };
            Ok(ReduceOutput {
                output,
                records,
                bytes,
                groups,
                millis: t0.elapsed().as_secs_f64() * 1e3,
            })
        });
        let reduce_outputs = reduce_results.into_iter().collect::<Result<Vec<_>>>()?;
        drop(map_outputs);

        let stats = RoundStats {
            name: spec.name.clone(),
            reducers: r,
            input_records: inputs_len(input)?,
            map_records,
            map_bytes,
            reduce_groups: reduce_outputs.iter().map(|o| o.groups).sum(),
            reduce_output_records: reduce_outputs.iter().map(|o| o.records).sum(),
            reduce_output_bytes: reduce_outputs.iter().map(|o| o.bytes).sum(),
            reducer_millis: reduce_outputs.iter().map(|o| o.millis).collect(),
            map_millis,
            wall_millis: start.elapsed().as_secs_f64() * 1e3,
        };
        let out = match shard_paths {
            Some(paths) => Dataset::Shards(paths),
            None => Dataset::Memory(
                reduce_outputs
                    .into_iter()
                    .map(|o| o.output.expect("in-memory output"))
                    .collect(),
            ),
        };
        Ok((out, stats))
    }
}

const PREFIX_BYTES: usize = 7;

/// Order-preserving summary of a key: its first seven bytes, zero padded,
/// followed by its length capped at eight. Keys of up to seven bytes are
/// fully ordered by the prefix alone.
fn sort_prefix(key: &[u8]) -> u64 {
    let mut x = 0u64;
    for i in 0..PREFIX_BYTES {
        x = (x << 8) | u64::from(key.get(i).copied().unwrap_or(0));
    }
    (x << 8) | key.len().min(PREFIX_BYTES + 1) as u64
}

fn inputs_len(input: &Dataset) -> Result<u64> {
    Ok(match input {
        Dataset::Memory(parts) => parts.iter().map(|p| p.len() as u64).sum(),
        Dataset::Shards(_) => input.record_count()? as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn identity_concat(r: usize) -> RoundSpec<'static> {
        RoundSpec::new(
            "identity",
            r,
            |k, v, em| {
                em.emit(k, v);
                Ok(())
            },
            |k, vs, em| {
                for v in vs {
                    em.emit(k, v);
                }
                Ok(())
            },
        )
    }

    fn word_count(r: usize) -> RoundSpec<'static> {
        RoundSpec::new(
            "word-count",
            r,
            |_, v, em| {
                for w in std::str::from_utf8(v)?.split_whitespace() {
                    em.emit(w.as_bytes(), b"1");
                }
                Ok(())
            },
            |k, vs, em| {
                em.emit(k, vs.len().to_string().as_bytes());
                Ok(())
            },
        )
    }

    #[test]
    fn identity_round_groups_by_key() {
        let input = Dataset::from_records([
            Record::new("b", "1"),
            Record::new("a", "2"),
            Record::new("b", "3"),
        ]);
        let (out, stats) = Engine::new()
            .run_round(&input, &identity_concat(1))
            .unwrap();
        let got = out.to_records().unwrap();
        assert_eq!(
            got,
            vec![
                Record::new("a", "2"),
                Record::new("b", "1"),
                Record::new("b", "3")
            ]
        );
        assert_eq!(stats.map_records, 3);
        assert_eq!(stats.reduce_groups, 2);
        assert_eq!(stats.reducer_millis.len(), 1);
    }

    #[test]
    fn word_count_smoke() {
        let input = Dataset::from_records([Record::new("", "a b a")]);
        for r in [1, 2, 4, 8] {
            let (out, stats) = Engine::new()
                .with_max_workers(4)
                .run_round(&input, &word_count(r))
                .unwrap();
            let counts: BTreeMap<String, String> = out
                .to_records()
                .unwrap()
                .into_iter()
                .map(|rec| {
                    (
                        String::from_utf8(rec.key).unwrap(),
                        String::from_utf8(rec.value).unwrap(),
                    )
                })
                .collect();
            assert_eq!(
                counts,
                BTreeMap::from([("a".into(), "2".into()), ("b".into(), "1".into())])
            );
            assert_eq!(stats.map_records, 3);
            assert_eq!(stats.reducer_millis.len(), r);
        }
    }

    #[test]
    fn zero_reducers_rejected() {
        let err = Engine::new()
            .run_round(&Dataset::empty(), &identity_concat(0))
            .unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }

    #[test]
    fn reduce_failure_names_the_key() {
        let spec = RoundSpec::new(
            "boom",
            2,
            |k, v, em| {
                em.emit(k, v);
                Ok(())
            },
            |k, _, _| {
                if k == b"bad" {
                    Err("nope".into())
                } else {
                    Ok(())
                }
            },
        );
        let input = Dataset::from_records([Record::new("ok", ""), Record::new("bad", "")]);
        match Engine::new().run_pipeline(input, &[identity_concat(1), spec]) {
            Err(Error::ReduceFailed { round, key, .. }) => {
                assert_eq!(round, 1);
                assert_eq!(key, b"bad");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn map_failure_is_reported() {
        let spec = RoundSpec::new(
            "bad-map",
            1,
            |_, _, _| Err("broken".into()),
            |_, _, _| Ok(()),
        );
        let input = Dataset::from_records([Record::new("k", "v")]);
        assert!(matches!(
            Engine::new().run_round(&input, &spec),
            Err(Error::MapFailed { round: 0, .. })
        ));
    }

    #[test]
    fn empty_pipeline_is_identity() {
        let input = Dataset::from_records([Record::new("k", "v")]);
        let (out, stats) = Engine::new().run_pipeline(input, &[]).unwrap();
        assert_eq!(out.to_records().unwrap(), vec![Record::new("k", "v")]);
        assert!(stats.rounds.is_empty());
        assert_eq!(stats.communication_bytes(), 0);
    }

    #[test]
    fn spilled_rounds_match_in_memory() {
        let dir = tempfile::tempdir().unwrap();
        let input = || {
            Dataset::from_records(
                (0..50).map(|i| Record::new("", format!("w{} w{}", i % 7, i % 3))),
            )
        };
        let mem = Engine::new()
            .run_pipeline(input(), &[word_count(3), identity_concat(2)])
            .unwrap();
        let spilled = Engine::new()
            .with_spill_dir(dir.path())
            .run_pipeline(input(), &[word_count(3), identity_concat(2)])
            .unwrap();
        assert!(matches!(spilled.0, Dataset::Shards(ref p) if p.len() == 2));
        let mut a = mem.0.to_records().unwrap();
        let mut b = spilled.0.to_records().unwrap();
        a.sort();
        b.sort();
        assert_eq!(a, b);
        assert_eq!(mem.1.rounds[1].map_bytes, spilled.1.rounds[1].map_bytes);
        assert!(dir.path().join("round-00-part-00002.rec").exists());
    }

    #[test]
    fn custom_partitioner_routes_everything_to_one_reducer() {
        let spec = word_count(4).with_partitioner(|_, _| 3);
        let input = Dataset::from_records([Record::new("", "x y z")]);
        let (out, _) = Engine::new().run_round(&input, &spec).unwrap();
        match out {
            Dataset::Memory(parts) => {
                assert_eq!(
                    parts.iter().map(|p| p.len()).collect::<Vec<_>>(),
                    vec![0, 0, 0, 3]
                );
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn stable_hash_is_fixed() {
        assert_eq!(stable_hash(b""), 0xcbf2_9ce4_8422_2325);
        assert_eq!(stable_hash(b"a"), 0xaf63_dc4c_8601_ec8c);
    }

    proptest::proptest! {
        #[test]
        fn sort_prefix_agrees_with_key_order(
            a in proptest::collection::vec(0u8..4, 0..10),
            b in proptest::collection::vec(0u8..4, 0..10),
        ) {
            let (pa, pb) = (sort_prefix(&a), sort_prefix(&b));
            if pa != pb {
                proptest::prop_assert_eq!(pa.cmp(&pb), a.cmp(&b));
            } else if a.len() <= PREFIX_BYTES {
                proptest::prop_assert_eq!(&a, &b);
            }
        }
    }
}
