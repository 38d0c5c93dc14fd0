#![allow(dead_code)]

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use samoo::base::{Archive, Problem, ProblemSpec};
use samoo::surrogates::{Approximator, Prediction};
use samoo::assist::SurrogateBuilder;

/// Brute-force Pareto dominance for minimization.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y) && a.iter().zip(b).any(|(x, y)| x < y)
}

/// O(n^2 m) front peeling.
pub fn brute_force_fronts(points: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let mut left: Vec<usize> = (0..points.len()).collect();
    let mut fronts = Vec::new();
    while !left.is_empty() {
        let front: Vec<usize> = left
            .iter()
            .copied()
            .filter(|&i| !left.iter().any(|&j| dominates(&points[j], &points[i])))
            .collect();
        left.retain(|i| !front.contains(i));
        fronts.push(front);
    }
    fronts
}

/// Counts every call that reaches the real objective.
pub struct Counted<P> {
    pub inner: P,
    pub calls: AtomicUsize,
}

impl<P> Counted<P> {
    pub fn new(inner: P) -> Self {
        Counted {
            inner,
            calls: AtomicUsize::new(0),
        }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl<P: Problem> Problem for Counted<P> {
    fn spec(&self) -> &ProblemSpec {
        self.inner.spec()
    }

    fn evaluate(&self, x: &[f64]) -> samoo::Result<(Vec<f64>, Vec<f64>)> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.inner.evaluate(x)
    }

    fn name(&self) -> String {
        self.inner.name()
    }
}

/// A "surrogate" that is the true function, with zero uncertainty.
pub struct Oracle<P>(pub Arc<P>);

impl<P: Problem> Approximator for Oracle<P> {
    fn n_outputs(&self) -> usize {
        self.0.spec().n_outputs()
    }

    fn predict(&self, xs: &[Vec<f64>]) -> samoo::Result<Vec<Prediction>> {
        xs.iter()
            .map(|x| {
                let (mut f, g) = self.0.evaluate(x)?;
                f.extend(g);
                let n = f.len();
                Ok(Prediction {
                    mean: f,
                    uncertainty: vec![0.0; n],
                })
            })
            .collect()
    }
}

pub struct OracleBuilder<P>(pub Arc<P>);

impl<P: Problem + 'static> SurrogateBuilder for OracleBuilder<P> {
    fn build(&self, _: &Archive, _: &ProblemSpec, _: u64) -> samoo::Result<Arc<dyn Approximator>> {
        Ok(Arc::new(Oracle(self.0.clone())))
    }
}
