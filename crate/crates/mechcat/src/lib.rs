//! Exhaustive enumeration and classification of spatial manipulator
//! topologies.
//!
//! A candidate structure is a set of `n` rigid links (3..=6) connected by
//! kinematic joints drawn from four types: revolute (R), prismatic (P),
//! cylindrical (C) and spherical (S). Candidates are represented as symmetric
//! adjacency matrices and enumerated by interpreting the strict upper
//! triangle as a base-5 integer, so the whole design space for a given link
//! count is a contiguous index range that can be split into shards and
//! processed in parallel.
//!
//! Each candidate passes through a fixed sequence of validity filters
//! (connectivity, mobility, actuation, isomorphism canonicity, and a numeric
//! screw-theoretic end-effector test). Survivors are classified by joint-type
//! multiset and written to a reproducible catalog.

pub mod canon;
pub mod catalog;
pub mod generate;
pub mod mobility;
pub mod model;
pub mod pipeline;
pub mod screw;
pub mod topology;

pub use model::{
    AdjacencyMatrix, CatalogEntry, ClassSignature, CriterionId, FilterTrace, JointKind,
    MatrixIndex, ModelError,
};
pub use pipeline::{DofMode, PipelineConfig, RunStats};

/// Version stamp written into catalog records so downstream consumers can
/// detect when two files were produced by incompatible engine revisions.
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");
