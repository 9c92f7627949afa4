//! Clustered enumeration pipelines on the map/shuffle/reduce engine.
//!
//! | variant | rounds | per-reducer enumerator                      |
//! |---------|--------|---------------------------------------------|
//! | CDFS    | 2      | full search, keep bicliques owned by the key |
//! | CD0     | 2      | owner-pruned search, id order                |
//! | CD1     | 3      | owner-pruned search, (degree, id) order      |
//! | CD2     | 3      | owner-pruned search, (\|η²\|, id) order      |
//! | CCONS   | 2      | consensus, keep bicliques owned by the key   |
//!
//! Round 1 turns the edge list into adjacency lists. Round 2 sends every
//! adjacency list to its owner and to each neighbor, so the reducer for `v`
//! holds exactly what it needs to assemble the cluster on η²(v). The
//! load-balanced variants use round 2 to spread each vertex's order property
//! to its whole 2-neighborhood and assemble clusters in round 3.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::biclique::{Biclique, EnumSummary};
use crate::cluster::Cluster;
use crate::engine::codec::{put_varint, Reader};
use crate::engine::{Dataset, Emitter, Engine, JobStats, RoundSpec};
use crate::error::{Error, Result, TaskError};
use crate::graph::{Graph, VertexId};
use crate::order::{OrderKind, VertexOrder};
use crate::seq;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Cdfs,
    Cd0,
    Cd1,
    Cd2,
    Ccons,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Cdfs,
        Algorithm::Cd0,
        Algorithm::Cd1,
        Algorithm::Cd2,
        Algorithm::Ccons,
    ];

    pub fn rounds(self) -> usize {
        match self {
            Algorithm::Cd1 | Algorithm::Cd2 => 3,
            _ => 2,
        }
    }

    /// Order used to pick the owning reducer of a biclique.
    pub fn order_kind(self) -> OrderKind {
        match self {
            Algorithm::Cd1 => OrderKind::Degree,
            Algorithm::Cd2 => OrderKind::TwoNeighborhood,
            _ => OrderKind::Lexicographic,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Cdfs => "cdfs",
            Algorithm::Cd0 => "cd0",
            Algorithm::Cd1 => "cd1",
            Algorithm::Cd2 => "cd2",
            Algorithm::Ccons => "ccons",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Algorithm> {
        match s.to_ascii_lowercase().as_str() {
            "cdfs" => Ok(Algorithm::Cdfs),
            "cd0" => Ok(Algorithm::Cd0),
            "cd1" => Ok(Algorithm::Cd1),
            "cd2" => Ok(Algorithm::Cd2),
            "ccons" => Ok(Algorithm::Ccons),
            _ => Err(Error::InvalidArgument(format!("unknown algorithm {s:?}"))),
        }
    }
}

/// Record payload encodings.
pub mod wire {
    use super::*;

    const EDGE: u8 = 0;
    const ADJ: u8 = 1;
    const TRIPLE: u8 = 2;
    const PROP: u8 = 3;

    #[derive(Debug, PartialEq, Eq)]
    pub enum Payload {
        Edge(VertexId, VertexId),
        /// A vertex and its full neighborhood.
        Adjacency(VertexId, Vec<VertexId>),
        /// Property `p` of `source`, addressed to `destination ∈ η²(source)`.
        Triple {
            destination: VertexId,
            source: VertexId,
            p: u64,
        },
        Property {
            source: VertexId,
            p: u64,
        },
    }

    /// Fixed-capacity encoding buffer for the short payloads, which are
    /// emitted once per record and should not allocate.
    #[derive(Clone, Copy)]
    pub struct Small {
        buf: [u8; 32],
        len: usize,
    }

    impl Small {
        fn tagged(tag: Option<u8>) -> Small {
            let mut s = Small {
                buf: [0; 32],
                len: 0,
            };
            if let Some(t) = tag {
                s.buf[0] = t;
                s.len = 1;
            }
            s
        }

        fn varint(mut self, mut x: u64) -> Small {
            while x >= 0x80 {
                self.buf[self.len] = (x as u8) | 0x80;
                self.len += 1;
                x >>= 7;
            }
            self.buf[self.len] = x as u8;
            self.len += 1;
            self
        }
    }

    impl std::ops::Deref for Small {
        type Target = [u8];

        fn deref(&self) -> &[u8] {
            &self.buf[..self.len]
        }
    }

    pub fn vertex_key(v: VertexId) -> Small {
        Small::tagged(None).varint(v.0)
    }

    pub fn decode_vertex_key(key: &[u8]) -> Result<VertexId> {
        let mut rd = Reader::new(key);
        let v = VertexId(rd.varint()?);
        if !rd.is_empty() {
            return Err(Error::Corrupt("trailing bytes in vertex key".into()));
        }
        Ok(v)
    }

    pub fn edge(a: VertexId, b: VertexId) -> Small {
        Small::tagged(Some(EDGE)).varint(a.0).varint(b.0)
    }

    pub fn adjacency(v: VertexId, nbrs: &[VertexId]) -> Vec<u8> {
        let mut out = Vec::with_capacity(2 + 3 * nbrs.len());
        out.push(ADJ);
        put_varint(&mut out, v.0);
        put_varint(&mut out, nbrs.len() as u64);
        for w in nbrs {
            put_varint(&mut out, w.0);
        }
        out
    }

    pub fn triple(destination: VertexId, source: VertexId, p: u64) -> Small {
        Small::tagged(Some(TRIPLE))
            .varint(destination.0)
            .varint(source.0)
            .varint(p)
    }

    pub fn property(source: VertexId, p: u64) -> Small {
        Small::tagged(Some(PROP)).varint(source.0).varint(p)
    }

    pub fn decode(buf: &[u8]) -> Result<Payload> {
        let mut rd = Reader::new(buf);
        let vid = |rd: &mut Reader| rd.varint().map(VertexId);
        let payload = match rd.byte()? {
            EDGE => Payload::Edge(vid(&mut rd)?, vid(&mut rd)?),
            ADJ => {
                let v = vid(&mut rd)?;
                let len = rd.varint()? as usize;
                let mut nbrs = Vec::with_capacity(len.min(buf.len()));
                for _ in 0..len {
                    nbrs.push(vid(&mut rd)?);
                }
                Payload::Adjacency(v, nbrs)
            }
            TRIPLE => Payload::Triple {
                destination: vid(&mut rd)?,
                source: vid(&mut rd)?,
                p: rd.varint()?,
            },
            PROP => Payload::Property {
                source: vid(&mut rd)?,
                p: rd.varint()?,
            },
            tag => return Err(Error::Corrupt(format!("unknown payload tag {tag}"))),
        };
        if !rd.is_empty() {
            return Err(Error::Corrupt("trailing bytes in payload".into()));
        }
        Ok(payload)
    }

    pub fn biclique(b: &Biclique) -> Vec<u8> {
        let mut out = Vec::with_capacity(2 + 3 * (b.left().len() + b.right().len()));
        for side in [b.left(), b.right()] {
            put_varint(&mut out, side.len() as u64);
            for v in side {
                put_varint(&mut out, v.0);
            }
        }
        out
    }

    pub fn decode_biclique(buf: &[u8]) -> Result<Biclique> {
        let mut rd = Reader::new(buf);
        let mut side = || -> Result<Vec<VertexId>> {
            let len = rd.varint()? as usize;
            (0..len).map(|_| rd.varint().map(VertexId)).collect()
        };
        let (l, r) = (side()?, side()?);
        Biclique::new(l, r)
    }
}

use wire::Payload;

/// One record per undirected edge, as a MapReduce job would read it.
pub fn edge_records(g: &Graph) -> Dataset {
    let mut buf = crate::engine::RecordBuf::new();
    for (a, b) in g.edges() {
        buf.push(&[], &wire::edge(a, b));
    }
    Dataset::Memory(vec![buf])
}

fn adjacency_round<'a>(r: usize) -> RoundSpec<'a> {
    RoundSpec::new(
        "adjacency",
        r,
        |_, value, em| match wire::decode(value)? {
            Payload::Edge(a, b) => {
                em.emit(&wire::vertex_key(a), &wire::vertex_key(b));
                em.emit(&wire::vertex_key(b), &wire::vertex_key(a));
                Ok(())
            }
            other => Err(format!("expected an edge, got {other:?}").into()),
        },
        |key, values, em| {
            let v = wire::decode_vertex_key(key)?;
            let mut nbrs = values
                .iter()
                .map(|x| wire::decode_vertex_key(x))
                .collect::<Result<Vec<_>>>()?;
            nbrs.sort_unstable();
            nbrs.dedup();
            em.emit(&[], &wire::adjacency(v, &nbrs));
            Ok(())
        },
    )
}

/// Sends an adjacency record to its owner and every neighbor.
fn fan_out_adjacency(value: &[u8], v: VertexId, nbrs: &[VertexId], em: &mut Emitter) {
    em.emit(&wire::vertex_key(v), value);
    for &y in nbrs {
        em.emit(&wire::vertex_key(y), value);
    }
}

fn two_neighborhood_map(_: &[u8], value: &[u8], em: &mut Emitter) -> Result<(), TaskError> {
    match wire::decode(value)? {
        Payload::Adjacency(v, nbrs) => {
            fan_out_adjacency(value, v, &nbrs, em);
            Ok(())
        }
        other => Err(format!("expected an adjacency list, got {other:?}").into()),
    }
}

fn property_map(_: &[u8], value: &[u8], em: &mut Emitter) -> Result<(), TaskError> {
    match wire::decode(value)? {
        Payload::Adjacency(v, nbrs) => fan_out_adjacency(value, v, &nbrs, em),
        Payload::Triple {
            destination,
            source,
            p,
        } => em.emit(&wire::vertex_key(destination), &wire::property(source, p)),
        other => return Err(format!("unexpected round-3 input {other:?}").into()),
    }
    Ok(())
}

/// Splits a reducer's values into adjacency lists and received properties.
type Lists = Vec<(VertexId, Vec<VertexId>)>;

fn split_values(values: &[&[u8]]) -> Result<(Lists, Vec<(VertexId, u64)>)> {
    let mut lists = Vec::new();
    let mut props = Vec::new();
    for v in values {
        match wire::decode(v)? {
            Payload::Adjacency(u, nbrs) => lists.push((u, nbrs)),
            Payload::Property { source, p } => props.push((source, p)),
            other => {
                return Err(Error::Corrupt(format!(
                    "unexpected reducer value {other:?}"
                )))
            }
        }
    }
    Ok((lists, props))
}

fn enumerate_reduce<'a>(algo: Algorithm, s: usize, r: usize) -> RoundSpec<'a> {
    RoundSpec::new(
        "two-neighborhood",
        r,
        two_neighborhood_map,
        move |key, values, em| {
            let center = wire::decode_vertex_key(key)?;
            let (lists, _) = split_values(values)?;
            let Some(cluster) = Cluster::from_adjacency_pruned(center, &lists, s) else {
                return Ok(());
            };
            let mut emit = |b: Biclique| em.emit(key, &wire::biclique(&b));
            match algo {
                Algorithm::Cd0 => {
                    seq::cd0_seq(&cluster, s, &mut emit)?;
                }
                Algorithm::Cdfs => {
                    seq::mbe_dfs(&cluster.subgraph, s, &mut |b: Biclique| {
                        if b.min_vertex() == center {
                            emit(b);
                        }
                    })?;
                }
                Algorithm::Ccons => {
                    seq::mbe_consensus(&cluster.subgraph, s, &mut |b: Biclique| {
                        if b.min_vertex() == center {
                            emit(b);
                        }
                    })?;
                }
                Algorithm::Cd1 | Algorithm::Cd2 => unreachable!("three-round variants"),
            }
            Ok(())
        },
    )
}

fn send_property_round<'a>(kind: OrderKind, s: usize, r: usize) -> RoundSpec<'a> {
    RoundSpec::new(
        "send-property",
        r,
        two_neighborhood_map,
        move |key, values, em| {
            let v = wire::decode_vertex_key(key)?;
            let (lists, _) = split_values(values)?;
            let mut two_hop: Vec<VertexId> = Vec::new();
            let mut own: Option<&[VertexId]> = None;
            for (u, nbrs) in &lists {
                two_hop.push(*u);
                two_hop.extend_from_slice(nbrs);
                if *u == v {
                    own = Some(nbrs);
                }
            }
            two_hop.sort_unstable();
            two_hop.dedup();
            let own =
                own.ok_or_else(|| format!("reducer {v} did not receive its own adjacency list"))?;
            em.emit(&[], &wire::adjacency(v, own));
            let p = match kind {
                OrderKind::Degree => own.len() as u64,
                OrderKind::TwoNeighborhood => two_hop.len() as u64,
                OrderKind::Lexicographic => 0,
            };
            for dest in property_destinations(v, own, &lists, two_hop, s) {
                em.emit(&[], &wire::triple(dest, v, p));
            }
            Ok(())
        },
    )
}

/// The vertices whose threshold-pruned cluster keeps `v` (see
/// [`Cluster::from_adjacency_pruned`]); only they need `v`'s property.
/// `lists` holds the adjacency lists of `v` and its neighbors.
fn property_destinations(
    v: VertexId,
    own: &[VertexId],
    lists: &[(VertexId, Vec<VertexId>)],
    two_hop: Vec<VertexId>,
    s: usize,
) -> Vec<VertexId> {
    if s <= 1 {
        return two_hop;
    }
    if own.len() < s {
        return Vec::new();
    }
    let mut dests = vec![v];
    let mut far = Vec::new();
    for (u, nbrs) in lists {
        if *u == v || nbrs.len() < s {
            continue;
        }
        dests.push(*u);
        far.extend(
            nbrs.iter()
                .copied()
                .filter(|&d| d != v && own.binary_search(&d).is_err()),
        );
    }
    far.sort_unstable();
    dests.extend(
        far.chunk_by(|a, b| a == b)
            .filter(|run| run.len() >= s)
            .map(|run| run[0]),
    );
    dests
}

fn balanced_enumerate_round<'a>(kind: OrderKind, s: usize, r: usize) -> RoundSpec<'a> {
    RoundSpec::new(
        "two-neighborhood-ordered",
        r,
        property_map,
        move |key, values, em| {
            let center = wire::decode_vertex_key(key)?;
            let (lists, props) = split_values(values)?;
            let Some(cluster) = Cluster::from_adjacency_pruned(center, &lists, s) else {
                return Ok(());
            };
            let order = VertexOrder::from_property_list(kind, props);
            seq::cdl_seq(&cluster, &order, s, &mut |b: Biclique| {
                em.emit(key, &wire::biclique(&b))
            })?;
            Ok(())
        },
    )
}

/// The round list for `algo`.
pub fn rounds<'a>(algo: Algorithm, s: usize, r: usize) -> Vec<RoundSpec<'a>> {
    match algo {
        Algorithm::Cd1 | Algorithm::Cd2 => vec![
            adjacency_round(r),
            send_property_round(algo.order_kind(), s, r),
            balanced_enumerate_round(algo.order_kind(), s, r),
        ],
        _ => vec![adjacency_round(r), enumerate_reduce(algo, s, r)],
    }
}

/// Output of a pipeline run: the final records (one per biclique, keyed by the
/// emitting reducer's vertex) and the job's statistics.
#[derive(Debug)]
pub struct PipelineRun {
    pub algorithm: Algorithm,
    pub output: Dataset,
    pub stats: JobStats,
}

impl PipelineRun {
    /// Streams `(owner key, biclique)` pairs.
    pub fn for_each_biclique<F>(&self, mut f: F) -> Result<()>
    where
        F: FnMut(VertexId, Biclique) -> Result<()>,
    {
        self.output
            .for_each(|k, v| f(wire::decode_vertex_key(k)?, wire::decode_biclique(v)?))
    }

    pub fn bicliques(&self) -> Result<Vec<(VertexId, Biclique)>> {
        let mut out = Vec::new();
        self.for_each_biclique(|k, b| {
            out.push((k, b));
            Ok(())
        })?;
        Ok(out)
    }

    pub fn summary(&self) -> Result<EnumSummary> {
        let mut s = EnumSummary::default();
        self.for_each_biclique(|_, b| {
            s.record(&b);
            Ok(())
        })?;
        Ok(s)
    }
}

/// Runs `algo` end to end on `g` with `r` reducers.
pub fn run(engine: &Engine, g: &Graph, algo: Algorithm, s: usize, r: usize) -> Result<PipelineRun> {
    if s < 1 {
        return Err(Error::InvalidThreshold(s));
    }
    if r < 1 {
        return Err(Error::InvalidArgument(
            "reducer count must be positive".into(),
        ));
    }
    let (output, stats) = engine.run_pipeline(edge_records(g), &rounds(algo, s, r))?;
    Ok(PipelineRun {
        algorithm: algo,
        output,
        stats,
    })
}

pub fn cdfs(engine: &Engine, g: &Graph, s: usize, r: usize) -> Result<PipelineRun> {
    run(engine, g, Algorithm::Cdfs, s, r)
}

pub fn cd0(engine: &Engine, g: &Graph, s: usize, r: usize) -> Result<PipelineRun> {
    run(engine, g, Algorithm::Cd0, s, r)
}

pub fn cd1(engine: &Engine, g: &Graph, s: usize, r: usize) -> Result<PipelineRun> {
    run(engine, g, Algorithm::Cd1, s, r)
}

pub fn cd2(engine: &Engine, g: &Graph, s: usize, r: usize) -> Result<PipelineRun> {
    run(engine, g, Algorithm::Cd2, s, r)
}

pub fn ccons(engine: &Engine, g: &Graph, s: usize, r: usize) -> Result<PipelineRun> {
    run(engine, g, Algorithm::Ccons, s, r)
}
