//! An optimization whose objective lives in a separate process speaking
//! newline-delimited JSON: `{"x":[...]}` in, `{"f":[...],"g":[...]}` out.
//!
//! The evaluator here is the bundled one in the `samoo` binary, so build it
//! first:
//!
//!     cargo build --release && cargo run --release --example external_evaluator

use std::path::PathBuf;
use std::time::Duration;

use samoo::algorithms::{AlgorithmKind, AlgorithmParams, AskTellState};
use samoo::assist::{run, RbfBuilder, Tracking};
use samoo::base::{Budget, ExternalProblem, IdGen, ProblemSpec};

fn samoo_binary() -> PathBuf {
    let mut p = std::env::current_exe().expect("current exe");
    p.pop();
    if p.ends_with("examples") {
        p.pop();
    }
    p.join("samoo")
}

fn main() -> samoo::Result<()> {
    let spec = ProblemSpec::new(1, 0, vec![-5.12; 4], vec![5.12; 4])?;
    let bin = samoo_binary();
    let problem = ExternalProblem::spawn(
        spec.clone(),
        bin.to_str().expect("utf-8 path"),
        &["evaluator".to_string(), "sphere".to_string()],
        Duration::from_secs(10),
    )?;
    let de = AskTellState::new(spec, AlgorithmParams::new(AlgorithmKind::De).with_pop_size(10), 3, IdGen::new())?;
    let result = run(&problem, de, None, &RbfBuilder::default(), Budget::new(200)?, 3, Tracking::single_objective())?;
    let best = &result.front[0];
    println!("{} ESEs, best f = {:.6} at {:?}", result.budget.ese_used(), best.objectives().unwrap()[0], best.x);
    Ok(())
}
