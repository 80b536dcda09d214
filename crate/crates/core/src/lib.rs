//! Rainbow matchings in r-uniform hypergraphs: instance model, exhaustive
//! search, explicit lower-bound constructions, a probabilistic finite-field
//! construction, a constructive spread-decomposition finder and a
//! multilinear-algebra finder.

pub mod bipartite;
pub mod bounds;
pub mod constructions;
pub mod finder;
pub mod gen;
pub mod instance;
pub mod multilinear;
pub mod probfield;
pub mod search;

pub use instance::{
    Edge, Instance, Matching, Partition, RainbowCertificate, ValidationReport, VertexId,
};
pub use search::{SearchBudget, SearchOutcome, SearchStatus};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("decode error: {0}")]
    Decode(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
