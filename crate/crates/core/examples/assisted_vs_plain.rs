//! Paired comparison of plain and surrogate-assisted NSGA-II on ZDT1 with a
//! 300-evaluation budget.
//!
//!     cargo run --release --example assisted_vs_plain -- [n_seeds]

use std::time::Instant;

use samoo::algorithms::{AlgorithmKind, AlgorithmParams, AskTellState, DEFAULT_ASSISTED_POP_SIZE};
use samoo::assist::{run, AssistConfig, RbfBuilder, Tracking};
use samoo::base::{Budget, IdGen, Problem};
use samoo::metrics::{igd, IndicatorName};
use samoo::problems::{Benchmark, BenchmarkName};

const ESE_MAX: usize = 300;

fn main() -> samoo::Result<()> {
    let n_seeds: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let problem = Benchmark::new(BenchmarkName::Zdt1, Some(10), None)?;
    let front = problem.reference_front(1000)?;
    let tracking = Tracking {
        indicator: IndicatorName::Igd,
        ref_point: problem.default_ref_point(),
        reference_front: Some(front.clone()),
    };
    let builder = RbfBuilder::default();
    let assist = AssistConfig::defaults(problem.spec(), ESE_MAX);

    println!("seed  plain_igd  assisted_igd  seconds");
    for seed in 0..n_seeds {
        let algo = |pop| {
            let params = AlgorithmParams::new(AlgorithmKind::Nsga2).with_pop_size(pop);
            AskTellState::new(problem.spec().clone(), params, seed, IdGen::new())
        };
        let plain = run(&problem, algo(100)?, None, &builder, Budget::new(ESE_MAX)?, seed, tracking.clone())?;
        let t = Instant::now();
        let assisted = run(
            &problem,
            algo(DEFAULT_ASSISTED_POP_SIZE)?,
            Some(&assist),
            &builder,
            Budget::new(ESE_MAX)?,
            seed,
            tracking.clone(),
        )?;
        let secs = t.elapsed().as_secs_f64();
        println!(
            "{seed:>4}  {:>9.4}  {:>12.4}  {secs:>7.1}",
            igd(&front, &plain.front_objectives())?,
            igd(&front, &assisted.front_objectives())?,
        );
    }
    Ok(())
}
