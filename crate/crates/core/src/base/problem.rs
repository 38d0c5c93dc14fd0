use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape and box bounds of a black-box problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub n_var: usize,
    pub n_obj: usize,
    pub n_constr: usize,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl ProblemSpec {
    pub fn new(n_obj: usize, n_constr: usize, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let spec = ProblemSpec {
            n_var: lower.len(),
            n_obj,
            n_constr,
            lower,
            upper,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_var == 0 {
            return Err(Error::InvalidProblem("n_var must be positive".into()));
        }
        if self.n_obj == 0 {
            return Err(Error::InvalidProblem("n_obj must be positive".into()));
        }
        if self.lower.len() != self.n_var || self.upper.len() != self.n_var {
            return Err(Error::InvalidProblem(format!(
                "bounds must have length n_var = {}",
                self.n_var
            )));
        }
        for (i, (lo, hi)) in self.lower.iter().zip(&self.upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidProblem(format!(
                    "bound {i}: need finite lower < upper, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }

    pub fn n_outputs(&self) -> usize {
        self.n_obj + self.n_constr
    }

    pub fn check_bounds(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_var {
            return Err(Error::DimensionMismatch {
                expected: self.n_var,
                actual: x.len(),
            });
        }
        for (index, ((&value, &lower), &upper)) in
            x.iter().zip(&self.lower).zip(&self.upper).enumerate()
        {
            // NaN fails both comparisons and is rejected here too.
            if !(value >= lower && value <= upper) {
                return Err(Error::OutOfBounds {
                    index,
                    value,
                    lower,
                    upper,
                });
            }
        }
        Ok(())
    }

    pub fn clip(&self, x: &mut [f64]) {
        for ((v, &lo), &hi) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            *v = v.clamp(lo, hi);
        }
    }

    /// Map `x` into the unit cube.
    pub fn normalize(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.lower)
            .zip(&self.upper)
            .map(|((v, lo), hi)| (v - lo) / (hi - lo))
            .collect()
    }
}

/// A black-box problem: `evaluate` is the expensive call.
///
/// Implementations must be pure functions of `x` so that batches can be
/// evaluated in any order.
pub trait Problem: Send + Sync {
    fn spec(&self) -> &ProblemSpec;

    /// Returns objective values (minimized) and inequality constraint values
    /// (feasible iff every value is <= 0).
    fn evaluate(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)>;

    fn name(&self) -> String {
        "problem".to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    Expensive,
    Approximate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub provenance: Provenance,
}

impl Evaluation {
    pub fn expensive(f: Vec<f64>, g: Vec<f64>) -> Self {
        Evaluation {
            f,
            g,
            provenance: Provenance::Expensive,
        }
    }

    pub fn approximate(f: Vec<f64>, g: Vec<f64>) -> Self {
        Evaluation {
            f,
            g,
            provenance: Provenance::Approximate,
        }
    }

    /// Total constraint violation, the sum of positive constraint values.
    pub fn violation(&self) -> f64 {
        constraint_violation(&self.g)
    }

    pub fn is_feasible(&self) -> bool {
        self.g.iter().all(|&g| g <= 0.0)
    }

    pub(crate) fn check_shape(&self, spec: &ProblemSpec) -> Result<()> {
        if self.f.len() != spec.n_obj {
            return Err(Error::LengthMismatch {
                expected: spec.n_obj,
                actual: self.f.len(),
            });
        }
        if self.g.len() != spec.n_constr {
            return Err(Error::LengthMismatch {
                expected: spec.n_constr,
                actual: self.g.len(),
            });
        }
        Ok(())
    }
}

pub fn constraint_violation(g: &[f64]) -> f64 {
    g.iter().map(|&v| v.max(0.0)).sum()
}

/// A design vector with an optional evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub id: u64,
    pub x: Vec<f64>,
    pub eval: Option<Evaluation>,
}

impl Solution {
    pub fn new(id: u64, x: Vec<f64>) -> Self {
        Solution { id, x, eval: None }
    }

    pub fn is_evaluated(&self) -> bool {
        self.eval.is_some()
    }

    pub fn objectives(&self) -> Option<&[f64]> {
        self.eval.as_ref().map(|e| e.f.as_slice())
    }
}

/// Shared monotone id source; clones hand out ids from the same sequence.
#[derive(Debug, Clone, Default)]
pub struct IdGen(Arc<AtomicU64>);

impl IdGen {
    pub fn new() -> Self {
        IdGen::default()
    }

    pub fn next_id(&self) -> u64 {
        self.0.fetch_add(1, Ordering::Relaxed)
    }

    pub fn mint(&self, x: Vec<f64>) -> Solution {
        Solution::new(self.next_id(), x)
    }
}

/// Wraps a closure as a [`Problem`].
pub struct FnProblem<F> {
    spec: ProblemSpec,
    name: String,
    func: F,
}

impl<F> FnProblem<F>
where
    F: Fn(&[f64]) -> (Vec<f64>, Vec<f64>) + Send + Sync,
{
    pub fn new(name: impl Into<String>, spec: ProblemSpec, func: F) -> Result<Self> {
        spec.validate()?;
        Ok(FnProblem {
            spec,
            name: name.into(),
            func,
        })
    }
}

impl<F> Problem for FnProblem<F>
where
    F: Fn(&[f64]) -> (Vec<f64>, Vec<f64>) + Send + Sync,
{
    fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    fn evaluate(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        self.spec.check_bounds(x)?;
        Ok((self.func)(x))
    }

    fn name(&self) -> String {
        self.name.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_validation() {
        assert!(ProblemSpec::new(1, 0, vec![0.0], vec![0.0]).is_err());
        assert!(ProblemSpec::new(0, 0, vec![0.0], vec![1.0]).is_err());
        assert!(ProblemSpec::new(1, 0, vec![], vec![]).is_err());
        let spec = ProblemSpec::new(2, 1, vec![0.0, -1.0], vec![1.0, 1.0]).unwrap();
        assert_eq!(spec.n_var, 2);
        assert!(spec.check_bounds(&[0.5, -1.0]).is_ok());
        assert!(matches!(
            spec.check_bounds(&[0.5, 1.5]),
            Err(Error::OutOfBounds { index: 1, .. })
        ));
        assert!(spec.check_bounds(&[f64::NAN, 0.0]).is_err());
    }

    #[test]
    fn violation_sums_positive_parts() {
        let e = Evaluation::expensive(vec![0.0], vec![-1.0, 2.0, 0.5]);
        assert_eq!(e.violation(), 2.5);
        assert!(!e.is_feasible());
        let ok = Evaluation::expensive(vec![1.0], vec![-1.0, 0.0]);
        assert!(ok.is_feasible());
        assert_eq!(ok.violation(), 0.0);
    }

    #[test]
    fn ids_are_shared_between_clones() {
        let ids = IdGen::new();
        let other = ids.clone();
        assert_eq!(ids.next_id(), 0);
        assert_eq!(other.next_id(), 1);
        assert_eq!(ids.next_id(), 2);
    }
}
