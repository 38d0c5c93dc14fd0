//! Driving NSGA-II by hand through the ask-tell interface.

use samoo::algorithms::{AlgorithmKind, AlgorithmParams, AskTell, AskTellState};
use samoo::base::{evaluate_expensive, Archive, Budget, IdGen, Problem};
use samoo::metrics::igd;
use samoo::problems::{Benchmark, BenchmarkName};

fn main() -> samoo::Result<()> {
    let problem = Benchmark::new(BenchmarkName::Zdt2, Some(12), None)?;
    let params = AlgorithmParams::new(AlgorithmKind::Nsga2).with_pop_size(40);
    let mut nsga2 = AskTellState::new(problem.spec().clone(), params, 42, IdGen::new())?;
    let mut budget = Budget::new(8000)?;
    let mut archive = Archive::new();
    let front = problem.reference_front(500)?;

    while !budget.is_exhausted() {
        let offspring = nsga2.ask()?;
        let out = evaluate_expensive(&problem, offspring, &mut budget, &mut archive)?;
        if out.truncated {
            break;
        }
        nsga2.tell(out.solutions)?;
        if nsga2.generation() % 40 == 0 {
            let objs: Vec<Vec<f64>> = nsga2.population().iter().filter_map(|s| s.objectives().map(<[f64]>::to_vec)).collect();
            println!("gen {:>3}  ESE {:>5}  IGD {:.5}", nsga2.generation(), budget.ese_used(), igd(&front, &objs)?);
        }
    }
    Ok(())
}
