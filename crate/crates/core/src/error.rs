use thiserror::Error;

use crate::graph::{VertexId, Violation};

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {}", join(.0))]
    InvalidGraph(Vec<Violation>),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("invalid walk: {0}")]
    InvalidWalk(String),
    #[error("map is not total: {0} has no image")]
    NotTotal(VertexId),
    #[error("map is not simplicial: edge {0}-{1} goes to non-adjacent {2}, {3}")]
    NotSimplicial(VertexId, VertexId, VertexId, VertexId),
    #[error("codomain of the inner map differs from the domain of the outer map")]
    DomainMismatch,
    #[error("not a simple-n-od: {0}")]
    NotSimpleNOd(String),
    #[error("map is not light: edge {0}-{1} collapses")]
    NotLight(VertexId, VertexId),
    #[error("walks do not meet: {0} ends where {1} does not start")]
    JunctionMismatch(VertexId, VertexId),
    #[error("invalid subdivision: {0}")]
    InvalidSubdivision(String),
    #[error("dual pair undefined at {vertex}: {reason}")]
    DualPair { vertex: VertexId, reason: String },
    #[error("size guard exceeded: {0}")]
    SizeGuard(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("normal form failed: {0}")]
    NormalForm(String),
    #[error("invalid selection: {0}")]
    InvalidSelection(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
