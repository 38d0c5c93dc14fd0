//! Surrogate-assisted multi-objective optimization under a hard budget of
//! expensive evaluations.
//!
//! The crate is organised in layers:
//!
//! * [`base`]: problems, solutions, the evaluation budget and archive,
//!   dominance relations and the external-evaluator protocol.
//! * [`problems`]: analytic benchmarks with reference fronts.
//! * [`algorithms`]: GA, DE, NSGA-II and NSGA-III behind one ask-tell trait.
//! * [`surrogates`]: RBF models with cross-validated kernel selection.
//! * [`assist`]: the loop that lets an algorithm evolve on surrogate
//!   predictions and spends real evaluations only on infill points.
//! * [`metrics`]: hypervolume, IGD and IGD+.
//! * [`cli`]: JSON-configured experiments used by the `samoo` binary.

pub mod algorithms;
pub mod assist;
pub mod base;
pub mod cli;
pub mod error;
pub mod metrics;
pub mod problems;
pub mod surrogates;

pub use error::{Error, Result};
