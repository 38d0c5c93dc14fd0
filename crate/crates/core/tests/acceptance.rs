//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//!     cargo test --release --test acceptance

mod common;

use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use samoo::algorithms::{non_dominated_sort, AlgorithmKind, AlgorithmParams, AskTellState, DEFAULT_ASSISTED_POP_SIZE};
use samoo::assist::{initialize_doe, probabilistic_knockout, run, AssistConfig, AssistMode, RbfBuilder, StepOutcome, Tracking};
use samoo::base::{Budget, ExternalProblem, FnProblem, IdGen, Problem, ProblemSpec};
use samoo::cli::{cmd_run, median, Options};
use samoo::metrics::{hypervolume, hypervolume_2d, hypervolume_monte_carlo, igd, IndicatorName, MC_SAMPLES};
use samoo::problems::{Benchmark, BenchmarkName};
use samoo::surrogates::{fit, Kernel, Prediction, RbfConfig, Tail};

use common::{brute_force_fronts, Counted};

type Outcome = Result<String, String>;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn random_problem(rng: &mut ChaCha8Rng) -> Benchmark {
    let names = BenchmarkName::ALL;
    let name = names[rng.gen_range(0..names.len())];
    match name {
        BenchmarkName::Bnh => Benchmark::new(name, None, None),
        BenchmarkName::Dtlz2 => Benchmark::new(name, Some(rng.gen_range(3..7)), Some(3)),
        _ => Benchmark::new(name, Some(rng.gen_range(2..7)), None),
    }
    .unwrap()
}

fn tracking_for(p: &Benchmark) -> Tracking {
    match p.default_ref_point() {
        None => Tracking::single_objective(),
        Some(r) => Tracking {
            indicator: IndicatorName::Hypervolume,
            ref_point: Some(r),
            reference_front: None,
        },
    }
}

/// Criterion 1: Budget safety over randomized problems, algorithms and assist modes.
fn budget_safety() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut assisted = 0;
    for case in 0..100 {
        let bench = random_problem(&mut rng);
        let problem = Counted::new(bench.clone());
        let spec = bench.spec().clone();
        let kinds: &[AlgorithmKind] = if spec.n_obj == 1 {
            &[AlgorithmKind::Ga, AlgorithmKind::De]
        } else {
            &[AlgorithmKind::Nsga2, AlgorithmKind::Nsga3]
        };
        let kind = kinds[rng.gen_range(0..kinds.len())];
        let pop = rng.gen_range(4..=16);
        let ese_max = rng.gen_range(10..=60);
        let seed = rng.gen::<u64>();
        let alg = AskTellState::new(spec.clone(), AlgorithmParams::new(kind).with_pop_size(pop), seed, IdGen::new()).unwrap();
        let budget = Budget::new(ese_max).unwrap();
        let builder = RbfBuilder::default();
        let mode = rng.gen_range(0..3);
        let (used, archive_len) = if mode == 0 {
            let r = run(&problem, alg, None, &builder, budget, seed, tracking_for(&bench)).map_err(|e| format!("case {case}: {e}"))?;
            if r.history.len() != r.budget.ese_used() {
                return Err(format!("case {case}: history rows {} != ESEs {}", r.history.len(), r.budget.ese_used()));
            }
            (r.budget.ese_used(), r.archive.len())
        } else {
            assisted += 1;
            let mut cfg = AssistConfig::defaults(&spec, ese_max);
            cfg.mode = if mode == 1 { AssistMode::Bias } else { AssistMode::Knockout };
            cfg.n_doe = rng.gen_range(1..ese_max.min(30));
            cfg.beta = rng.gen_range(1..=10);
            cfg.n_candidates = rng.gen_range(1..=4);
            cfg.n_infill = rng.gen_range(1..=6);
            let mut st = initialize_doe(&problem, alg, &cfg, &builder, budget, seed, tracking_for(&bench))
                .map_err(|e| format!("case {case}: {e}"))?;
            let mut spent_total = cfg.n_doe;
            loop {
                match st.assisted_step(&problem, &builder).map_err(|e| format!("case {case}: {e}"))? {
                    StepOutcome::Finished => break,
                    StepOutcome::Continued { spent, .. } => spent_total += spent,
                }
                if st.budget.ese_used() > ese_max {
                    return Err(format!("case {case}: {} ESEs exceed {ese_max}", st.budget.ese_used()));
                }
            }
            if spent_total != st.budget.ese_used() {
                return Err(format!("case {case}: n_doe + infill = {spent_total} but ese_used = {}", st.budget.ese_used()));
            }
            if st.budget.ese_used() != ese_max && !st.saturated {
                return Err(format!("case {case}: stopped at {} of {ese_max} without saturation", st.budget.ese_used()));
            }
            (st.budget.ese_used(), st.archive.len())
        };
        if used > ese_max || problem.calls() != used || archive_len != used {
            return Err(format!(
                "case {case}: ese_used {used}, max {ese_max}, evaluator calls {}, archive {archive_len}",
                problem.calls()
            ));
        }
    }
    Ok(format!("100 configs ({assisted} assisted); evaluator calls == ese_used <= ese_max in all"))
}

/// Criterion 2: Non-dominated sorting against the brute-force oracle.
fn sorting_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=50);
        let m = rng.gen_range(1..=4);
        let grid = rng.gen_bool(0.5);
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                (0..m)
                    .map(|_| if grid { rng.gen_range(0..5) as f64 } else { rng.gen() })
                    .collect()
            })
            .collect();
        let mut got = non_dominated_sort(&pts).map_err(|e| e.to_string())?;
        let mut want = brute_force_fronts(&pts);
        got.iter_mut().for_each(|f| f.sort_unstable());
        want.iter_mut().for_each(|f| f.sort_unstable());
        if got != want {
            mismatches += 1;
        }
    }
    check(mismatches == 0, format!("1000 instances, {mismatches} mismatches"))
}

/// Criterion 3: Interpolation exactness with nugget 0, and exact linear reproduction.
fn surrogate_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    let mut worst_linear: f64 = 0.0;
    for case in 0..100 {
        let n = rng.gen_range(5..=40);
        let d = rng.gen_range(1..=10);
        let xs: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x.iter().map(|v| (1.3 * v).sin()).sum::<f64>() + rng.gen_range(-0.1..0.1)).collect();
        let kernel = [Kernel::Cubic, Kernel::ThinPlateSpline][case % 2];
        let tail = if n > d { Tail::Linear } else { Tail::Constant };
        let model = fit(&xs, &ys, &RbfConfig::new(kernel, tail, 0.0)).map_err(|e| format!("case {case}: {e}"))?;
        if model.nugget_used != 0.0 {
            return Err(format!("case {case}: needed nugget {}", model.nugget_used));
        }
        let (pred, _) = model.predict(&xs).map_err(|e| e.to_string())?;
        for (p, y) in pred.iter().zip(&ys) {
            worst = worst.max((p - y).abs());
        }

        if n > d {
            let w: Vec<f64> = (0..d).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let b = rng.gen_range(-5.0..5.0);
            let lin = |x: &[f64]| b + x.iter().zip(&w).map(|(a, c)| a * c).sum::<f64>();
            let ly: Vec<f64> = xs.iter().map(|x| lin(x)).collect();
            let model = fit(&xs, &ly, &RbfConfig::new(kernel, Tail::Linear, 0.0)).map_err(|e| e.to_string())?;
            let probes: Vec<Vec<f64>> = (0..20).map(|_| (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
            let (pred, _) = model.predict(&probes).map_err(|e| e.to_string())?;
            for (p, x) in pred.iter().zip(&probes) {
                worst_linear = worst_linear.max((p - lin(x)).abs());
            }
        }
    }
    check(
        worst <= 1e-6 && worst_linear <= 1e-6,
        format!("max training residual {worst:.1e}, max linear-data error {worst_linear:.1e}"),
    )
}

/// Criterion 4: Indicator correctness.
fn indicators() -> Outcome {
    let hv = hypervolume(&[vec![1.0, 2.0], vec![2.0, 1.0]], &[3.0, 3.0]).map_err(|e| e.to_string())?;
    if hv != 3.0 {
        return Err(format!("HV {{(1,2),(2,1)}} = {hv}, expected 3"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let n = rng.gen_range(1..=30);
        let pts: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen(), rng.gen()]).collect();
        let r = [1.1, 1.1];
        let exact = hypervolume_2d(&pts, &r);
        let mc = hypervolume_monte_carlo(&pts, &r, MC_SAMPLES, i);
        worst = worst.max((mc - exact).abs() / exact);
    }
    let front = Benchmark::new(BenchmarkName::Zdt1, Some(5), None).unwrap().reference_front(100).unwrap();
    let zero = igd(&front, &front).map_err(|e| e.to_string())?;
    check(
        worst <= 0.01 && zero == 0.0,
        format!("HV = 3 exactly; worst Monte Carlo relative error {:.3}%; IGD(A, A) = {zero}", worst * 100.0),
    )
}

fn paired(problem: &Benchmark, kind: AlgorithmKind, ese_max: usize, plain_pop: usize, tracking: &Tracking) -> samoo::Result<Vec<(f64, f64)>> {
    let assist = AssistConfig::defaults(problem.spec(), ese_max);
    let builder = RbfBuilder::default();
    let score = |r: &samoo::assist::RunResult| -> samoo::Result<f64> {
        Ok(match &tracking.reference_front {
            Some(front) => igd(front, &r.front_objectives())?,
            None => r.history.last().map_or(f64::INFINITY, |h| h.best_scalar),
        })
    };
    (1..=11u64)
        .map(|seed| {
            let alg = |pop| AskTellState::new(problem.spec().clone(), AlgorithmParams::new(kind).with_pop_size(pop), seed, IdGen::new());
            let plain = run(problem, alg(plain_pop)?, None, &builder, Budget::new(ese_max)?, seed, tracking.clone())?;
            let assisted = run(problem, alg(DEFAULT_ASSISTED_POP_SIZE)?, Some(&assist), &builder, Budget::new(ese_max)?, seed, tracking.clone())?;
            Ok((score(&assisted)?, score(&plain)?))
        })
        .collect()
}

/// Criterion 5: Assisted runs converge faster than plain ones at equal budget.
fn convergence() -> Outcome {
    let zdt1 = Benchmark::new(BenchmarkName::Zdt1, Some(10), None).unwrap();
    let tracking = Tracking {
        indicator: IndicatorName::Igd,
        ref_point: zdt1.default_ref_point(),
        reference_front: Some(zdt1.reference_front(1000).unwrap()),
    };
    let z = paired(&zdt1, AlgorithmKind::Nsga2, 300, 100, &tracking).map_err(|e| e.to_string())?;
    let z_wins = z.iter().filter(|(a, p)| a < p).count();
    let ratios: Vec<f64> = z.iter().map(|(a, p)| a / p).collect();
    let z_ratio = median(&ratios);

    let sphere = Benchmark::new(BenchmarkName::Sphere, Some(10), None).unwrap();
    let s = paired(&sphere, AlgorithmKind::Ga, 150, 100, &Tracking::single_objective()).map_err(|e| e.to_string())?;
    let plain_median = median(&s.iter().map(|(_, p)| *p).collect::<Vec<_>>());
    let s_wins = s.iter().filter(|(a, _)| *a < plain_median).count();
    let s_paired = s.iter().filter(|(a, p)| a < p).count();
    let assisted_median = median(&s.iter().map(|(a, _)| *a).collect::<Vec<_>>());

    check(
        z_wins >= 8 && z_ratio <= 0.6 && s_wins >= 8 && assisted_median < plain_median,
        format!(
            "ZDT1: assisted wins {z_wins}/11, median IGD ratio {z_ratio:.4}; Sphere: {s_wins}/11 assisted seeds below plain median \
             ({s_paired}/11 paired), median best {assisted_median:.3e} vs {plain_median:.3e}"
        ),
    )
}

/// Criterion 6: Same config and seed produce byte-identical artifacts.
fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let configs = [
        r#"{"problem":{"name":"zdt1","n_var":6},"algorithm":{"name":"nsga2"},"assist":{"mode":"knockout","beta":15},"ese_max":80,"seeds":[3,4]}"#,
        r#"{"problem":{"name":"bnh"},"algorithm":{"name":"nsga3","pop_size":12},"assist":{"mode":"bias"},"ese_max":60,"seeds":[9],"indicator":{"name":"hv"}}"#,
        r#"{"problem":{"name":"rastrigin","n_var":4},"algorithm":{"name":"de","pop_size":10},"ese_max":200,"seeds":[1]}"#,
    ];
    let mut compared = 0;
    for (i, text) in configs.iter().enumerate() {
        let path = dir.path().join(format!("c{i}.json"));
        std::fs::write(&path, text).map_err(|e| e.to_string())?;
        let mut outs = Vec::new();
        for rep in 0..2 {
            let out = dir.path().join(format!("c{i}-run{rep}"));
            let opts = Options { out: Some(out.clone()), quiet: true, ..Options::default() };
            let summary = cmd_run(&path, &opts).map_err(|e| e.to_string())?;
            outs.push((out, summary.seeds.iter().map(|s| s.seed).collect::<Vec<_>>()));
        }
        for seed in &outs[0].1 {
            for file in ["history.csv", "front.csv", "archive.csv"] {
                let read = |root: &Path| std::fs::read(root.join(format!("seed-{seed}")).join(file)).map_err(|e| e.to_string());
                if read(&outs[0].0)? != read(&outs[1].0)? {
                    return Err(format!("config {i} seed {seed}: {file} differs"));
                }
                compared += 1;
            }
        }
    }
    Ok(format!("{compared} artifact pairs byte-identical"))
}

/// Criterion 7: Without noise the knockout returns exactly the best candidates.
fn knockout_degeneracy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for pool in 0..1000 {
        let n = rng.gen_range(1..=40);
        let constrained = rng.gen_bool(0.5);
        let preds: Vec<Prediction> = (0..n)
            .map(|_| {
                let mut mean = vec![rng.gen_range(-1.0..1.0)];
                if constrained {
                    mean.push(rng.gen_range(-1.0..1.0));
                }
                let k = mean.len();
                Prediction { mean, uncertainty: vec![0.0; k] }
            })
            .collect();
        let n_winners = rng.gen_range(1..=n);
        let key = |p: &Prediction| (p.mean.get(1).map_or(0.0, |g| g.max(0.0)), p.mean[0]);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| key(&preds[a]).partial_cmp(&key(&preds[b])).unwrap());
        let mut want = order[..n_winners].to_vec();
        let mut got = probabilistic_knockout(&preds, 1, n_winners, rng.gen()).map_err(|e| e.to_string())?;
        want.sort_unstable();
        got.sort_unstable();
        if got != want {
            return Err(format!("pool {pool}: winners {got:?}, expected {want:?}"));
        }
    }
    Ok("1000 pools: winner sets equal the deterministic top-n".into())
}

/// Criterion 8: bundled evaluators over the child-process protocol reproduce
/// the built-in Sphere exactly.
fn external_protocol() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_samoo");
    let n = 4;
    let spec = ProblemSpec::new(1, 0, vec![-5.12; n], vec![5.12; n]).unwrap();
    let timeout = Duration::from_secs(10);
    let sphere_ext = ExternalProblem::spawn(spec.clone(), bin, &["evaluator".into(), "sphere".into()], timeout).map_err(|e| e.to_string())?;
    // The echo evaluator returns x itself; squaring and summing the echoed
    // vector on this side must give the same numbers as the built-in.
    let echo_spec = ProblemSpec::new(n, 0, spec.lower.clone(), spec.upper.clone()).unwrap();
    let echo = Arc::new(ExternalProblem::spawn(echo_spec, bin, &["evaluator".into(), "echo".into()], timeout).map_err(|e| e.to_string())?);
    let echo_sphere = FnProblem::new("echo-sphere", spec.clone(), move |x: &[f64]| {
        let (f, _) = echo.evaluate(x).expect("echo evaluator");
        (vec![f.iter().map(|v| v * v).sum()], vec![])
    })
    .unwrap();
    let builtin = Benchmark::new(BenchmarkName::Sphere, Some(n), None).unwrap();

    let cfg = AssistConfig { n_doe: 20, beta: 10, n_candidates: 3, n_infill: 2, mode: AssistMode::Knockout };
    let go = |p: &dyn Problem| -> samoo::Result<samoo::assist::RunResult> {
        let alg = AskTellState::new(spec.clone(), AlgorithmParams::new(AlgorithmKind::Ga).with_pop_size(10), 21, IdGen::new())?;
        run(p, alg, Some(&cfg), &RbfBuilder::default(), Budget::new(50)?, 21, Tracking::single_objective())
    };
    let reference = go(&builtin).map_err(|e| e.to_string())?;
    for (label, p) in [("sphere", &sphere_ext as &dyn Problem), ("echo", &echo_sphere as &dyn Problem)] {
        let r = go(p).map_err(|e| format!("{label}: {e}"))?;
        if r.budget.ese_used() != 50 || r.archive.len() != reference.archive.len() {
            return Err(format!("{label}: {} ESEs, archive {}", r.budget.ese_used(), r.archive.len()));
        }
        for (a, b) in r.archive.entries().iter().zip(reference.archive.entries()) {
            let (fa, fb) = (a.objectives().unwrap()[0], b.objectives().unwrap()[0]);
            if a.x != b.x || (fa - fb).abs() > 1e-12 {
                return Err(format!("{label}: diverged at x={:?}: {fa} vs {fb}", a.x));
            }
        }
    }
    Ok("echo and sphere evaluators: 50 ESEs each, archives identical to the built-in".into())
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() {
    let criteria: [Criterion; 8] = [
        ("budget safety", budget_safety, Duration::from_secs(120)),
        ("sorting oracle equivalence", sorting_oracle, Duration::from_secs(30)),
        ("surrogate exactness", surrogate_exactness, Duration::from_secs(30)),
        ("indicator correctness", indicators, Duration::from_secs(60)),
        ("convergence direction", convergence, Duration::from_secs(600)),
        ("determinism", determinism, Duration::from_secs(60)),
        ("knockout degeneracy", knockout_degeneracy, Duration::from_secs(30)),
        ("external-evaluator protocol", external_protocol, Duration::from_secs(30)),
    ];
    let mut failed = 0;
    for (i, (name, f, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if secs <= limit => (true, d),
            Ok(d) => (false, format!("{d}; took longer than {}s", limit.as_secs())),
            Err(d) => (false, d),
        };
        failed += usize::from(!ok);
        println!(
            "{} [{}] {name}: {detail} ({:.1}s)",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            secs.as_secs_f64()
        );
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
