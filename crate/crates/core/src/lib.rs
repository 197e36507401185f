//! Simplicial maps between finite graphs, their duals, subdivision-generated
//! inverse systems of simple-n-ods, arm patterns and factorization search.

pub mod dot;
pub mod dual;
pub mod error;
pub mod factoring;
pub mod family;
pub mod graph;
pub mod map;
pub mod od;
pub mod par;
pub mod patterns;
pub mod subdivision;

pub use error::{Error, Result};
pub use graph::{Graph, RawGraph, VertexId, Walk};
pub use map::SimplicialMap;
