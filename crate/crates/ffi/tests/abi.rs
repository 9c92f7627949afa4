use std::collections::BTreeSet;
use std::ffi::{CStr, CString};
use std::io::Write;
use std::ptr;

use mbe_core::gen::gen_er;
use mbe_core::seq::brute_force_oracle;
use mbe_core::{Biclique, VertexId};
use mbe_ffi::*;

struct Graph(*mut MbeGraph);

impl Drop for Graph {
    fn drop(&mut self) {
        unsafe { mbe_graph_free(self.0) }
    }
}

fn from_edges(edges: &[(u64, u64)]) -> Graph {
    let (src, dst): (Vec<u64>, Vec<u64>) = edges.iter().copied().unzip();
    let mut g = ptr::null_mut();
    let status = unsafe { mbe_graph_from_edges(src.as_ptr(), dst.as_ptr(), edges.len(), &mut g) };
    assert_eq!(status, MbeStatus::Ok);
    Graph(g)
}

fn collect(g: &Graph, algo: MbeAlgorithm, s: usize, r: usize) -> Vec<(u64, Biclique)> {
    let mut res = ptr::null_mut();
    assert_eq!(
        unsafe { mbe_enumerate(g.0, algo, s, r, &mut res) },
        MbeStatus::Ok
    );
    let mut out = Vec::new();
    unsafe {
        for i in 0..mbe_result_len(res) {
            let (mut l, mut ll, mut rr, mut rl, mut owner) = (ptr::null(), 0, ptr::null(), 0, 0);
            assert_eq!(
                mbe_result_biclique(res, i, &mut l, &mut ll, &mut rr, &mut rl, &mut owner),
                MbeStatus::Ok
            );
            let side = |p: *const u64, n: usize| {
                std::slice::from_raw_parts(p, n)
                    .iter()
                    .map(|&v| VertexId(v))
                    .collect()
            };
            out.push((owner, Biclique::new(side(l, ll), side(rr, rl)).unwrap()));
        }
        let edge_sum: u64 = out.iter().map(|(_, b)| b.edge_weight()).sum();
        assert_eq!(mbe_result_count(res), out.len() as u64);
        assert_eq!(mbe_result_edge_sum(res), edge_sum);
        mbe_result_free(res);
    }
    out
}

const ALL: [MbeAlgorithm; 7] = [
    MbeAlgorithm::Dfs,
    MbeAlgorithm::Consensus,
    MbeAlgorithm::Cdfs,
    MbeAlgorithm::Cd0,
    MbeAlgorithm::Cd1,
    MbeAlgorithm::Cd2,
    MbeAlgorithm::Ccons,
];

#[test]
fn every_algorithm_matches_the_oracle() {
    for seed in 0..5 {
        let core = gen_er(10, 0.4, seed).unwrap();
        let edges: Vec<(u64, u64)> = core.edges().map(|(a, b)| (a.0, b.0)).collect();
        let g = from_edges(&edges);
        for s in 1..=2 {
            let oracle = brute_force_oracle(&core, s).unwrap();
            for algo in ALL {
                let found = collect(&g, algo, s, 3);
                let set: BTreeSet<Biclique> = found.iter().map(|(_, b)| b.clone()).collect();
                assert_eq!(set.len(), found.len(), "{algo:?} duplicates");
                assert_eq!(set, oracle, "{algo:?} seed={seed} s={s}");
            }
        }
    }
}

#[test]
fn sequential_owner_is_the_minimum_vertex() {
    let g = from_edges(&[(1, 2), (2, 3), (3, 1)]);
    for (owner, b) in collect(&g, MbeAlgorithm::Dfs, 1, 1) {
        assert_eq!(owner, b.min_vertex().0);
    }
}

#[test]
fn job_report_is_json_for_pipelines_only() {
    let g = from_edges(&[(1, 2), (2, 3)]);
    unsafe {
        let mut res = ptr::null_mut();
        assert_eq!(
            mbe_enumerate(g.0, MbeAlgorithm::Cd2, 1, 2, &mut res),
            MbeStatus::Ok
        );
        let json = CStr::from_ptr(mbe_result_job_report(res)).to_str().unwrap();
        let stats = mbe_core::JobStats::from_json(json).unwrap();
        assert_eq!(stats.rounds.len(), 3);
        mbe_result_free(res);
        assert_eq!(
            mbe_enumerate(g.0, MbeAlgorithm::Consensus, 1, 2, &mut res),
            MbeStatus::Ok
        );
        assert!(mbe_result_job_report(res).is_null());
        mbe_result_free(res);
    }
}

#[test]
fn load_keeps_labels() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "# comment\na b\nb c").unwrap();
    let path = CString::new(file.path().to_str().unwrap()).unwrap();
    let mut raw = ptr::null_mut();
    assert_eq!(
        unsafe { mbe_graph_load(path.as_ptr(), &mut raw) },
        MbeStatus::Ok
    );
    let g = Graph(raw);
    unsafe {
        assert_eq!(
            (mbe_graph_vertex_count(g.0), mbe_graph_edge_count(g.0)),
            (3, 2)
        );
        let label = |id| {
            CStr::from_ptr(mbe_graph_label(g.0, id))
                .to_str()
                .unwrap()
                .to_owned()
        };
        assert_eq!(
            (label(0), label(1), label(2)),
            ("a".into(), "b".into(), "c".into())
        );
        assert!(mbe_graph_label(g.0, 7).is_null());
    }
    let found = collect(&g, MbeAlgorithm::Cd1, 1, 2);
    assert_eq!(found.len(), 1);
    assert_eq!(found[0].1.to_string(), "0 2 | 1");
}

#[test]
fn numeric_files_have_no_labels() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "1 2").unwrap();
    let path = CString::new(file.path().to_str().unwrap()).unwrap();
    let mut raw = ptr::null_mut();
    assert_eq!(
        unsafe { mbe_graph_load(path.as_ptr(), &mut raw) },
        MbeStatus::Ok
    );
    let g = Graph(raw);
    assert!(unsafe { mbe_graph_label(g.0, 1) }.is_null());
}

#[test]
fn failures_report_status_and_message() {
    let last = || unsafe {
        CStr::from_ptr(mbe_last_error())
            .to_str()
            .unwrap()
            .to_owned()
    };
    let mut raw = ptr::null_mut();
    let missing = CString::new("/nonexistent/graph.txt").unwrap();
    assert_eq!(
        unsafe { mbe_graph_load(missing.as_ptr(), &mut raw) },
        MbeStatus::Io
    );
    assert!(last().contains("/nonexistent/graph.txt"));
    assert!(raw.is_null());

    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "1 2 3").unwrap();
    let bad = CString::new(file.path().to_str().unwrap()).unwrap();
    assert_eq!(
        unsafe { mbe_graph_load(bad.as_ptr(), &mut raw) },
        MbeStatus::Parse
    );
    assert!(last().contains("line 1"), "{}", last());

    assert_eq!(
        unsafe { mbe_graph_load(ptr::null(), &mut raw) },
        MbeStatus::NullPointer
    );

    let g = from_edges(&[(1, 2)]);
    let mut res = ptr::null_mut();
    assert_eq!(
        unsafe { mbe_enumerate(g.0, MbeAlgorithm::Cd0, 1, 0, &mut res) },
        MbeStatus::InvalidArgument
    );
    assert_eq!(
        unsafe { mbe_enumerate(g.0, MbeAlgorithm::Cd0, 1, 1, &mut res) },
        MbeStatus::Ok
    );
    let (mut l, mut ll, mut r, mut rl, mut o) = (ptr::null(), 0, ptr::null(), 0, 0);
    assert_eq!(
        unsafe { mbe_result_biclique(res, 5, &mut l, &mut ll, &mut r, &mut rl, &mut o) },
        MbeStatus::OutOfRange
    );
    assert!(last().contains("out of range"));
    unsafe { mbe_result_free(res) };
}

#[test]
fn empty_edge_list_is_an_empty_graph() {
    let mut g = ptr::null_mut();
    assert_eq!(
        unsafe { mbe_graph_from_edges(ptr::null(), ptr::null(), 0, &mut g) },
        MbeStatus::Ok
    );
    let g = Graph(g);
    assert!(collect(&g, MbeAlgorithm::Cd1, 1, 1).is_empty());
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/mbe.h");
    for name in [
        "mbe_version",
        "mbe_last_error",
        "mbe_graph_load",
        "mbe_graph_from_edges",
        "mbe_graph_vertex_count",
        "mbe_graph_edge_count",
        "mbe_graph_label",
        "mbe_graph_free",
        "mbe_enumerate",
        "mbe_result_len",
        "mbe_result_count",
        "mbe_result_edge_sum",
        "mbe_result_biclique",
        "mbe_result_job_report",
        "mbe_result_free",
        "MBE_STATUS_OK",
        "MBE_ALGORITHM_CD2",
        "typedef struct MbeGraph MbeGraph",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
