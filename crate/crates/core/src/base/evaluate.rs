use crate::base::archive::Archive;
use crate::base::budget::Budget;
use crate::base::problem::{Evaluation, Problem, ProblemSpec, Solution};
use crate::error::{Error, Result};
use crate::surrogates::Approximator;

/// Result of an expensive batch.
#[derive(Debug, Clone)]
pub struct BatchOutcome {
    /// Evaluated solutions, a prefix of the request in input order.
    pub solutions: Vec<Solution>,
    /// Set when the batch was cut short by the budget.
    pub truncated: bool,
    /// Requests answered from the archive without spending budget.
    pub reused: usize,
    /// Requests that consumed an ESE.
    pub evaluated: usize,
}

/// Runs the expensive evaluation for each solution, subject to the budget.
///
/// Designs already in the archive reuse their archived evaluation. Once the
/// budget runs out the batch is truncated and `truncated` is set.
pub fn evaluate_expensive(
    problem: &dyn Problem,
    solutions: Vec<Solution>,
    budget: &mut Budget,
    archive: &mut Archive,
) -> Result<BatchOutcome> {
    if budget.is_exhausted() {
        return Err(Error::BudgetExhausted {
            used: budget.ese_used(),
            max: budget.ese_max(),
        });
    }
    let spec = problem.spec();
    for s in &solutions {
        spec.check_bounds(&s.x)?;
    }

    let requested = solutions.len();
    let mut out = Vec::with_capacity(requested);
    let mut reused = 0;
    let mut evaluated = 0;
    for mut s in solutions {
        if let Some(hit) = archive.lookup(&s.x) {
            s.eval = hit.eval.clone();
            archive.note_reuse();
            reused += 1;
            out.push(s);
            continue;
        }
        if budget.is_exhausted() {
            break;
        }
        let (f, g) = problem.evaluate(&s.x)?;
        let eval = Evaluation::expensive(f, g);
        eval.check_shape(spec)?;
        budget.consume_expensive()?;
        s.eval = Some(eval);
        archive.insert(s.clone())?;
        evaluated += 1;
        out.push(s);
    }
    Ok(BatchOutcome {
        truncated: out.len() < requested,
        solutions: out,
        reused,
        evaluated,
    })
}

/// Attaches surrogate predictions to each solution. Never touches `ese_used`.
pub fn evaluate_approximate(
    model: &dyn Approximator,
    spec: &ProblemSpec,
    mut solutions: Vec<Solution>,
    budget: &mut Budget,
) -> Result<Vec<Solution>> {
    if model.n_outputs() < spec.n_outputs() {
        return Err(Error::ModelNotFitted(model.n_outputs()));
    }
    if solutions.is_empty() {
        return Ok(solutions);
    }
    let xs: Vec<Vec<f64>> = solutions.iter().map(|s| s.x.clone()).collect();
    let preds = model.predict(&xs)?;
    for (s, p) in solutions.iter_mut().zip(preds) {
        let mut mean = p.mean;
        mean.truncate(spec.n_outputs());
        let g = mean.split_off(spec.n_obj);
        s.eval = Some(Evaluation::approximate(mean, g));
    }
    budget.record_approximate(solutions.len());
    Ok(solutions)
}
