//! Expensive evaluations are counted against a hard cap; repeats of an
//! archived design are answered from the archive for free, and a batch that
//! does not fit is cut short.

use samoo::base::{evaluate_expensive, Archive, Budget, FnProblem, IdGen, ProblemSpec};

fn main() -> samoo::Result<()> {
    let spec = ProblemSpec::new(1, 1, vec![-2.0; 2], vec![2.0; 2])?;
    // Minimize x1^2 + x2^2 subject to x1 + x2 >= 1.
    let problem = FnProblem::new("disk", spec, |x: &[f64]| {
        (vec![x[0] * x[0] + x[1] * x[1]], vec![1.0 - x[0] - x[1]])
    })?;

    let ids = IdGen::new();
    let mut budget = Budget::new(4)?;
    let mut archive = Archive::new();

    let batch = vec![ids.mint(vec![0.5, 0.5]), ids.mint(vec![0.0, 0.0]), ids.mint(vec![0.5, 0.5])];
    let out = evaluate_expensive(&problem, batch, &mut budget, &mut archive)?;
    println!("evaluated {} reused {} -> {}/{} ESEs", out.evaluated, out.reused, budget.ese_used(), budget.ese_max());

    let batch = (0..5).map(|i| ids.mint(vec![i as f64 * 0.1, 1.0])).collect();
    let out = evaluate_expensive(&problem, batch, &mut budget, &mut archive)?;
    println!("second batch: {} solutions, truncated={}", out.solutions.len(), out.truncated);

    for s in archive.entries() {
        let e = s.eval.as_ref().unwrap();
        println!("x={:?} f={:?} violation={}", s.x, e.f, e.violation());
    }
    match evaluate_expensive(&problem, vec![ids.mint(vec![1.0, 1.0])], &mut budget, &mut archive) {
        Err(e) => println!("after exhaustion: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
