//! Computational coarse geometry on finite graphs.
//!
//! The crate builds finite metric spaces from graphs and families of graphs,
//! searches for Følner-type witnesses (sets, functions, measure fields),
//! builds metric sparsifications, localises operator norms of band
//! operators, and produces positive and negative certificates for expanders,
//! large-girth families, box spaces and Hamming powers.
//!
//! Every witness returned by a search is re-verified by direct computation
//! before it leaves the crate, and every result that is not the outcome of an
//! exhaustive search carries an `exact: false` flag.

// `!(a < b)` is deliberate throughout: NaN must fail the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod amenability;
pub mod certificates;
pub mod cli;
pub mod error;
pub mod generators;
pub mod graph;
pub mod io;
mod linalg;
pub mod operator;
pub mod space;
pub mod sparsification;

pub use error::{Error, Result};
pub use graph::Graph;
pub use space::{CoarseMap, FiniteMetricSpace, GrowthProfile, PointId, PointSet, ProbMeasure};
