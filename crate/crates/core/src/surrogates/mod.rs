//! Cheap approximation models standing in for expensive evaluations.

pub mod ensemble;
pub mod rbf;
pub mod select;

use crate::error::Result;

pub use ensemble::SurrogateEnsemble;
pub use rbf::{fit, Kernel, RbfConfig, Surrogate, Tail};
pub use select::{select_model, Selection};

/// Per-output prediction for one design.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub mean: Vec<f64>,
    pub uncertainty: Vec<f64>,
}

/// Anything that can approximate all outputs of a problem.
pub trait Approximator: Send + Sync {
    /// Objectives followed by constraints.
    fn n_outputs(&self) -> usize;

    fn predict(&self, xs: &[Vec<f64>]) -> Result<Vec<Prediction>>;
}
