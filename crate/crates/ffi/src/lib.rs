//! C ABI for `mbe-core`.
//!
//! Graphs and results are opaque heap handles released with their `_free`
//! function. Every fallible call returns an [`MbeStatus`]; on failure the
//! message is available from [`mbe_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::BufReader;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mbe_core::parallel::{self, Algorithm};
use mbe_core::seq;
use mbe_core::{Biclique, Engine, Error, Graph, LoadedGraph, VertexId};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MbeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    OutOfRange = 5,
    Failed = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MbeAlgorithm {
    Dfs = 0,
    Consensus = 1,
    Cdfs = 2,
    Cd0 = 3,
    Cd1 = 4,
    Cd2 = 5,
    Ccons = 6,
}

/// An undirected graph, optionally with string vertex labels.
pub struct MbeGraph {
    graph: Graph,
    labels: Vec<Option<CString>>,
}

struct Entry {
    owner: u64,
    left: Vec<u64>,
    right: Vec<u64>,
}

/// The bicliques found by one enumeration.
pub struct MbeResult {
    entries: Vec<Entry>,
    count: u64,
    edge_sum: u64,
    job_report: Option<CString>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: MbeStatus, message: impl Into<String>) -> MbeStatus {
    set_error(message.into());
    status
}

fn status_of(e: &Error) -> MbeStatus {
    match e {
        Error::Io(_) => MbeStatus::Io,
        Error::Parse { .. } | Error::EmptyGraph | Error::Csv(_) | Error::Json(_) => {
            MbeStatus::Parse
        }
        Error::InvalidThreshold(_)
        | Error::InvalidArgument(_)
        | Error::UnknownVertex(_)
        | Error::EmptyVertexSet
        | Error::InvalidBiclique(_)
        | Error::OracleTooLarge { .. } => MbeStatus::InvalidArgument,
        _ => MbeStatus::Failed,
    }
}

fn from_error(e: Error) -> MbeStatus {
    fail(status_of(&e), e.to_string())
}

fn guarded<F: FnOnce() -> MbeStatus>(f: F) -> MbeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            fail(MbeStatus::Panic, message)
        }
    }
}

fn into_handle(loaded: LoadedGraph) -> *mut MbeGraph {
    let labels = match &loaded.labels {
        Some(dict) => loaded
            .graph
            .vertices()
            .iter()
            .map(|&v| dict.label(v).and_then(|l| CString::new(l).ok()))
            .collect(),
        None => Vec::new(),
    };
    Box::into_raw(Box::new(MbeGraph {
        graph: loaded.graph,
        labels,
    }))
}

/// Version string of the library, static storage.
#[no_mangle]
pub extern "C" fn mbe_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mbe_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Loads an edge-list file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mbe_graph_load(path: *const c_char, out: *mut *mut MbeGraph) -> MbeStatus {
    guarded(|| {
        if path.is_null() || out.is_null() {
            return fail(MbeStatus::NullPointer, "null argument");
        }
        let path = match CStr::from_ptr(path).to_str() {
            Ok(p) => p,
            Err(_) => return fail(MbeStatus::InvalidArgument, "path is not UTF-8"),
        };
        let file = match File::open(path) {
            Ok(f) => f,
            Err(e) => return fail(MbeStatus::Io, format!("{path}: {e}")),
        };
        match mbe_core::load_edge_list(BufReader::new(file)) {
            Ok(loaded) => {
                *out = into_handle(loaded);
                MbeStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Builds a graph from `m` edges `(src[i], dst[i])`. Loops and duplicates are
/// dropped.
///
/// # Safety
/// `src` and `dst` must point to `m` readable values (may be NULL when
/// `m == 0`) and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mbe_graph_from_edges(
    src: *const u64,
    dst: *const u64,
    m: usize,
    out: *mut *mut MbeGraph,
) -> MbeStatus {
    guarded(|| {
        if out.is_null() || (m > 0 && (src.is_null() || dst.is_null())) {
            return fail(MbeStatus::NullPointer, "null argument");
        }
        let (src, dst) = if m == 0 {
            (&[][..], &[][..])
        } else {
            (
                std::slice::from_raw_parts(src, m),
                std::slice::from_raw_parts(dst, m),
            )
        };
        let graph = Graph::from_edges(
            src.iter()
                .zip(dst)
                .map(|(&a, &b)| (VertexId(a), VertexId(b))),
        );
        *out = into_handle(LoadedGraph {
            graph,
            labels: None,
        });
        MbeStatus::Ok
    })
}

/// # Safety
/// `g` must be NULL or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn mbe_graph_vertex_count(g: *const MbeGraph) -> usize {
    g.as_ref().map_or(0, |g| g.graph.vertex_count())
}

/// # Safety
/// `g` must be NULL or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn mbe_graph_edge_count(g: *const MbeGraph) -> usize {
    g.as_ref().map_or(0, |g| g.graph.edge_count())
}

/// Original label of vertex `id` for graphs loaded from labelled files, else
/// NULL. Owned by the graph.
///
/// # Safety
/// `g` must be NULL or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn mbe_graph_label(g: *const MbeGraph, id: u64) -> *const c_char {
    let Some(g) = g.as_ref() else {
        return ptr::null();
    };
    match g.graph.index_of(VertexId(id)) {
        Some(i) => g
            .labels
            .get(i as usize)
            .and_then(|l| l.as_ref())
            .map_or(ptr::null(), |l| l.as_ptr()),
        None => ptr::null(),
    }
}

/// # Safety
/// `g` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mbe_graph_free(g: *mut MbeGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

fn to_u64(vs: &[VertexId]) -> Vec<u64> {
    vs.iter().map(|v| v.0).collect()
}

fn entry(owner: VertexId, b: &Biclique) -> Entry {
    Entry {
        owner: owner.0,
        left: to_u64(b.left()),
        right: to_u64(b.right()),
    }
}

fn enumerate(
    g: &Graph,
    algorithm: MbeAlgorithm,
    s: usize,
    reducers: usize,
) -> mbe_core::Result<MbeResult> {
    let pipeline = match algorithm {
        MbeAlgorithm::Dfs | MbeAlgorithm::Consensus => None,
        MbeAlgorithm::Cdfs => Some(Algorithm::Cdfs),
        MbeAlgorithm::Cd0 => Some(Algorithm::Cd0),
        MbeAlgorithm::Cd1 => Some(Algorithm::Cd1),
        MbeAlgorithm::Cd2 => Some(Algorithm::Cd2),
        MbeAlgorithm::Ccons => Some(Algorithm::Ccons),
    };
    let mut entries = Vec::new();
    match pipeline {
        None => {
            let mut sink = |b: Biclique| entries.push(entry(b.min_vertex(), &b));
            let summary = if algorithm == MbeAlgorithm::Dfs {
                seq::mbe_dfs(g, s, &mut sink)?
            } else {
                seq::mbe_consensus(g, s, &mut sink)?
            };
            Ok(MbeResult {
                entries,
                count: summary.count,
                edge_sum: summary.edge_sum,
                job_report: None,
            })
        }
        Some(algo) => {
            let run = parallel::run(&Engine::new(), g, algo, s, reducers)?;
            let (mut count, mut edge_sum) = (0, 0);
            run.for_each_biclique(|owner, b| {
                count += 1;
                edge_sum += b.edge_weight();
                entries.push(entry(owner, &b));
                Ok(())
            })?;
            let report =
                CString::new(run.stats.to_json()?).map_err(|e| Error::Corrupt(e.to_string()))?;
            Ok(MbeResult {
                entries,
                count,
                edge_sum,
                job_report: Some(report),
            })
        }
    }
}

/// Enumerates the maximal bicliques of `g` with both sides of size at least
/// `s`. `reducers` is ignored by the sequential algorithms.
///
/// # Safety
/// `g` must be a live graph handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mbe_enumerate(
    g: *const MbeGraph,
    algorithm: MbeAlgorithm,
    s: usize,
    reducers: usize,
    out: *mut *mut MbeResult,
) -> MbeStatus {
    guarded(|| {
        let Some(g) = g.as_ref() else {
            return fail(MbeStatus::NullPointer, "null graph");
        };
        if out.is_null() {
            return fail(MbeStatus::NullPointer, "null output pointer");
        }
        match enumerate(&g.graph, algorithm, s, reducers) {
            Ok(result) => {
                *out = Box::into_raw(Box::new(result));
                MbeStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `r` must be NULL or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn mbe_result_count(r: *const MbeResult) -> u64 {
    r.as_ref().map_or(0, |r| r.count)
}

/// Number of bicliques addressable with [`mbe_result_biclique`].
///
/// # Safety
/// `r` must be NULL or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn mbe_result_len(r: *const MbeResult) -> usize {
    r.as_ref().map_or(0, |r| r.entries.len())
}

/// Sum of `|L|·|R|` over all bicliques.
///
/// # Safety
/// `r` must be NULL or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn mbe_result_edge_sum(r: *const MbeResult) -> u64 {
    r.as_ref().map_or(0, |r| r.edge_sum)
}

/// Borrows biclique `i`: its sides as ascending id arrays and the vertex of
/// the reducer that emitted it (the minimum vertex for sequential runs).
/// Arrays stay valid until the result is freed.
///
/// # Safety
/// `r` must be a live result handle; every output pointer must be valid.
#[no_mangle]
pub unsafe extern "C" fn mbe_result_biclique(
    r: *const MbeResult,
    i: usize,
    left: *mut *const u64,
    left_len: *mut usize,
    right: *mut *const u64,
    right_len: *mut usize,
    owner: *mut u64,
) -> MbeStatus {
    guarded(|| {
        let Some(r) = r.as_ref() else {
            return fail(MbeStatus::NullPointer, "null result");
        };
        if left.is_null()
            || left_len.is_null()
            || right.is_null()
            || right_len.is_null()
            || owner.is_null()
        {
            return fail(MbeStatus::NullPointer, "null output pointer");
        }
        let Some(e) = r.entries.get(i) else {
            return fail(
                MbeStatus::OutOfRange,
                format!("index {i} out of range ({} bicliques)", r.entries.len()),
            );
        };
        *left = e.left.as_ptr();
        *left_len = e.left.len();
        *right = e.right.as_ptr();
        *right_len = e.right.len();
        *owner = e.owner;
        MbeStatus::Ok
    })
}

/// JSON job report of a pipeline run, or NULL for sequential algorithms.
/// Owned by the result.
///
/// # Safety
/// `r` must be NULL or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn mbe_result_job_report(r: *const MbeResult) -> *const c_char {
    r.as_ref()
        .and_then(|r| r.job_report.as_ref())
        .map_or(ptr::null(), |c| c.as_ptr())
}

/// # Safety
/// `r` must be NULL or a result handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mbe_result_free(r: *mut MbeResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}
