use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::base::problem::Evaluation;
use crate::error::{Error, Result};

/// Outcome of comparing two candidates under (constrained) Pareto dominance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dominance {
    ADominatesB,
    BDominatesA,
    Incomparable,
    Equal,
}

impl Dominance {
    pub fn flip(self) -> Self {
        match self {
            Dominance::ADominatesB => Dominance::BDominatesA,
            Dominance::BDominatesA => Dominance::ADominatesB,
            other => other,
        }
    }
}

/// Pareto dominance between two objective vectors, minimization.
pub fn dominates(a: &[f64], b: &[f64]) -> Result<Dominance> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    Ok(pareto(a, b))
}

// Unchecked variant for hot loops; callers guarantee equal lengths.
pub(crate) fn pareto(a: &[f64], b: &[f64]) -> Dominance {
    let mut a_better = false;
    let mut b_better = false;
    for (x, y) in a.iter().zip(b) {
        if x < y {
            a_better = true;
        } else if y < x {
            b_better = true;
        }
        if a_better && b_better {
            return Dominance::Incomparable;
        }
    }
    match (a_better, b_better) {
        (true, false) => Dominance::ADominatesB,
        (false, true) => Dominance::BDominatesA,
        _ => Dominance::Equal,
    }
}

/// Constraint-domination on raw objective vectors and violation totals.
///
/// Feasible beats infeasible; among infeasible, the smaller violation wins;
/// equal violations fall through to Pareto dominance on the objectives.
pub fn constrained_dominates(
    fa: &[f64],
    cva: f64,
    fb: &[f64],
    cvb: f64,
) -> Result<Dominance> {
    if fa.len() != fb.len() {
        return Err(Error::LengthMismatch {
            expected: fa.len(),
            actual: fb.len(),
        });
    }
    Ok(constrained(fa, cva, fb, cvb))
}

pub(crate) fn constrained(fa: &[f64], cva: f64, fb: &[f64], cvb: f64) -> Dominance {
    match (cva > 0.0, cvb > 0.0) {
        (false, true) => Dominance::ADominatesB,
        (true, false) => Dominance::BDominatesA,
        (true, true) if cva < cvb => Dominance::ADominatesB,
        (true, true) if cvb < cva => Dominance::BDominatesA,
        _ => pareto(fa, fb),
    }
}

/// Constraint-domination between two evaluations.
pub fn compare_evaluations(a: &Evaluation, b: &Evaluation) -> Result<Dominance> {
    constrained_dominates(&a.f, a.violation(), &b.f, b.violation())
}

/// Total order for single-objective selection: violation first, then the
/// first objective. NaN sorts last.
pub fn scalar_order(a: &Evaluation, b: &Evaluation) -> Ordering {
    let (va, vb) = (a.violation(), b.violation());
    va.total_cmp(&vb).then_with(|| a.f[0].total_cmp(&b.f[0]))
}
