//! Clustered planarity for embedded cyclic clustered graphs.
//!
//! A cyclic clustered graph has its vertices split into clusters `0..c`,
//! and every edge stays inside a cluster or joins cyclically consecutive
//! clusters. Given a fixed spherical embedding, [`decide`] answers whether
//! the clusters can be drawn as disjoint discs without changing the
//! embedding, and on success returns a [`Certificate`]: extra intra-cluster
//! edges, inserted without crossings, after which every cluster induces a
//! connected subgraph.

pub mod cmodel;
pub mod combmap;
pub mod construct;
pub mod decide;
pub mod normalize;
pub mod generate;
pub mod io;
pub mod oracle;
pub mod render;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cmodel::{CGraph, FaceClass, FaceInfo, ModelError, PoleSelection, Poles};
pub use combmap::{CombMap, Dart, FacialWalk, MapError};
pub use construct::{verify_certificate, AddedEdge, Certificate, ClusterTree};
pub use decide::{decide, decide_with_options, decide_with_report, DecideOptions, PoleRule, Report, Stats, Unsupported, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CplanarError {
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// Why an instance has no clustered embedding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Rejection {
    /// Face heights other than exactly one `+c` and one `-c` face.
    WindingObstruction { heights: Vec<i64> },
    /// A cycle inside one cluster has a vertex of another cluster on the
    /// side away from the outer face.
    LoopEnclosure { cluster: usize, vertex: usize, enclosed: Vec<usize> },
    /// Sinks and sources cannot be matched to the faces that need them.
    NoPerfectMatching { sinks_sources: usize, faces: usize, matched: usize },
}

impl std::fmt::Display for Rejection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Rejection::WindingObstruction { heights } => {
                write!(f, "winding obstruction: nonzero face heights {heights:?}")
            }
            Rejection::LoopEnclosure { cluster, vertex, enclosed } => write!(
                f,
                "a cycle of cluster {cluster} through vertex {vertex} encloses vertices {enclosed:?} of other clusters"
            ),
            Rejection::NoPerfectMatching { sinks_sources, faces, matched } => write!(
                f,
                "no perfect matching between {sinks_sources} sinks/sources and {faces} faces (maximum {matched})"
            ),
        }
    }
}
