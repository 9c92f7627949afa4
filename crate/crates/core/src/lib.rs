//! Maximal biclique enumeration.
//!
//! A biclique `⟨L,R⟩` is a pair of disjoint non-empty vertex sets with every
//! `L`–`R` pair adjacent (edges inside a side are allowed). This crate
//! enumerates the maximal ones, sequentially ([`seq`]) or through clustered
//! map/shuffle/reduce pipelines ([`parallel`]) on a local engine ([`engine`]).

pub mod bench;
pub mod biclique;
pub mod cluster;
pub mod engine;
pub mod error;
pub mod gen;
pub mod graph;
pub mod order;
pub mod parallel;
pub mod seq;
mod sets;

pub use biclique::{Biclique, BicliqueSink, EnumSummary};
pub use cluster::Cluster;
pub use engine::{Dataset, Engine, JobStats, Record, RoundSpec, RoundStats};
pub use error::{Error, Result};
pub use graph::{load_edge_list, Graph, LabelDictionary, LoadedGraph, VertexId};
pub use order::{OrderKind, VertexOrder};
pub use parallel::{Algorithm, PipelineRun};
