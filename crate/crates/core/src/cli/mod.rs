//! Batch experiments: `run`, `compare` and `list`.
//!
//! Artifacts per run directory:
//!
//! * `seed-<s>/history.csv`: `ese,best_scalar,indicator`, one row per ESE
//! * `seed-<s>/front.csv`: final non-dominated objective vectors
//! * `seed-<s>/archive.csv`: every expensively evaluated design (x, f, g)
//! * `summary.json`: final indicator per seed with median and IQR
//!
//! Numbers are written in shortest round-trip form, so reruns with the same
//! configuration are byte-identical.

pub mod config;
mod report;

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::algorithms::{AlgorithmKind, AskTellState, DEFAULT_ASSISTED_POP_SIZE, DEFAULT_POP_SIZE};
use crate::assist::{run, RunResult};
use crate::base::{Budget, IdGen, Problem};
use crate::error::{Error, Result};
use crate::metrics::IndicatorName;
use crate::problems::{Benchmark, BenchmarkName};
use crate::surrogates::{Kernel, RbfConfig, Tail};

pub use config::{Experiment, RunConfig};

/// Overrides the output directory when `--out` is not given.
pub const OUT_DIR_ENV: &str = "SAMOO_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "samoo-out";

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_INVALID_CONFIG: i32 = 2;
pub const EXIT_EVALUATOR: i32 = 3;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidConfig(_) | Error::MismatchedExperiment(_) | Error::InvalidProblem(_) => {
            EXIT_INVALID_CONFIG
        }
        e if e.is_evaluator_failure() => EXIT_EVALUATOR,
        _ => EXIT_OTHER,
    }
}

/// Command-line overrides shared by `run` and `compare`.
#[derive(Debug, Clone, Default)]
pub struct Options {
    pub out: Option<PathBuf>,
    pub seeds: Option<Vec<u64>>,
    pub quiet: bool,
}

/// `--out`, then the environment variable, then the config, then the default.
pub fn resolve_out_dir(flag: Option<&Path>, config: Option<&Path>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => config.map_or_else(|| PathBuf::from(DEFAULT_OUT_DIR), Path::to_path_buf),
    }
}

/// One seed of a validated experiment.
pub fn run_seed(exp: &Experiment, seed: u64) -> Result<RunResult> {
    let problem = exp.instantiate()?;
    let algorithm = AskTellState::new(exp.spec().clone(), exp.params().clone(), seed, IdGen::new())?;
    run(
        problem.as_ref(),
        algorithm,
        exp.assist(),
        exp.builder(),
        Budget::new(exp.config.ese_max)?,
        seed,
        exp.tracking().clone(),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedSummary {
    pub seed: u64,
    pub final_indicator: f64,
    pub ese_used: usize,
    pub ase_used: usize,
    pub front_size: usize,
    pub saturated: bool,
    pub fallbacks: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub problem: String,
    pub algorithm: AlgorithmKind,
    pub assisted: bool,
    /// `best_fitness` for single-objective problems, else the indicator.
    pub indicator: String,
    pub higher_is_better: bool,
    pub ese_max: usize,
    pub seeds: Vec<SeedSummary>,
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
    pub iqr: f64,
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    quantile(&v, 0.5)
}

fn indicator_label(exp: &Experiment) -> (String, bool) {
    if exp.spec().n_obj == 1 {
        ("best_fitness".into(), false)
    } else {
        let name = exp.tracking().indicator;
        (name.as_str().into(), name.higher_is_better())
    }
}

fn summarize(exp: &Experiment, results: &[(u64, RunResult)]) -> Summary {
    let seeds: Vec<SeedSummary> = results
        .iter()
        .map(|(seed, r)| SeedSummary {
            seed: *seed,
            final_indicator: r.final_indicator().unwrap_or(f64::NAN),
            ese_used: r.budget.ese_used(),
            ase_used: r.budget.ase_used(),
            front_size: r.front.len(),
            saturated: r.saturated,
            fallbacks: r.fallbacks,
        })
        .collect();
    let mut values: Vec<f64> = seeds.iter().map(|s| s.final_indicator).collect();
    values.sort_by(f64::total_cmp);
    let (q25, med, q75) = (quantile(&values, 0.25), quantile(&values, 0.5), quantile(&values, 0.75));
    let (indicator, higher_is_better) = indicator_label(exp);
    Summary {
        problem: problem_label(&exp.config),
        algorithm: exp.params().kind,
        assisted: exp.assist().is_some(),
        indicator,
        higher_is_better,
        ese_max: exp.config.ese_max,
        seeds,
        median: med,
        q25,
        q75,
        iqr: q75 - q25,
    }
}

fn problem_label(config: &RunConfig) -> String {
    match (&config.problem.name, &config.problem.command) {
        (Some(n), _) => n.to_ascii_lowercase(),
        (None, Some(c)) => c.argv().join(" "),
        (None, None) => String::new(),
    }
}

fn load(path: &Path, opts: &Options) -> Result<Experiment> {
    let mut config = RunConfig::load(path)?;
    if let Some(seeds) = &opts.seeds {
        config.seeds = seeds.clone();
    }
    config.validate()
}

fn run_all(exp: &Experiment, quiet: bool) -> Result<Vec<(u64, RunResult)>> {
    // Seeds are independent; they run one after another so that evaluator
    // processes never compete for the machine.
    let mut out = Vec::with_capacity(exp.config.seeds.len());
    for &seed in &exp.config.seeds {
        let r = run_seed(exp, seed)?;
        if !quiet {
            log::info!(
                "seed {seed}: {} ESEs, final {}",
                r.budget.ese_used(),
                r.final_indicator().unwrap_or(f64::NAN)
            );
        }
        out.push((seed, r));
    }
    Ok(out)
}

/// `run <config>`: executes every seed and writes the artifacts.
pub fn cmd_run(config_path: &Path, opts: &Options) -> Result<Summary> {
    let exp = load(config_path, opts)?;
    let out = resolve_out_dir(opts.out.as_deref(), exp.config.output.as_deref());
    let results = run_all(&exp, opts.quiet)?;
    fs::create_dir_all(&out)?;
    for (seed, r) in &results {
        report::write_run(&out.join(format!("seed-{seed}")), r, exp.spec())?;
    }
    let summary = summarize(&exp, &results);
    fs::write(out.join("summary.json"), serde_json::to_string_pretty(&summary).map_err(json_err)? + "\n")?;
    if !opts.quiet {
        log::info!("wrote {}", out.display());
    }
    Ok(summary)
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedSeed {
    pub seed: u64,
    pub a: f64,
    pub b: f64,
    /// `a`, `b` or `tie`.
    pub winner: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub indicator: String,
    pub higher_is_better: bool,
    pub seeds: Vec<PairedSeed>,
    pub wins_a: usize,
    pub wins_b: usize,
    pub ties: usize,
    /// Median over seeds of `a / b`.
    pub median_ratio: f64,
}

/// Pairs final indicator values seed by seed.
pub fn compare_finals(
    indicator: &str,
    higher_is_better: bool,
    a: &[(u64, f64)],
    b: &[(u64, f64)],
) -> Result<Comparison> {
    if a.len() != b.len() || a.iter().zip(b).any(|(x, y)| x.0 != y.0) {
        return Err(Error::MismatchedExperiment("seed lists differ".into()));
    }
    let mut seeds = Vec::with_capacity(a.len());
    let mut ratios = Vec::with_capacity(a.len());
    let (mut wins_a, mut wins_b, mut ties) = (0, 0, 0);
    for (&(seed, va), &(_, vb)) in a.iter().zip(b) {
        let a_better = if higher_is_better { va > vb } else { va < vb };
        let b_better = if higher_is_better { vb > va } else { vb < va };
        let winner = if a_better {
            wins_a += 1;
            "a"
        } else if b_better {
            wins_b += 1;
            "b"
        } else {
            ties += 1;
            "tie"
        };
        ratios.push(if va == vb { 1.0 } else { va / vb });
        seeds.push(PairedSeed {
            seed,
            a: va,
            b: vb,
            winner: winner.into(),
        });
    }
    Ok(Comparison {
        indicator: indicator.into(),
        higher_is_better,
        seeds,
        wins_a,
        wins_b,
        ties,
        median_ratio: median(&ratios),
    })
}

fn mismatch(a: &RunConfig, b: &RunConfig) -> Option<String> {
    let (ka, kb) = (a.experiment_key(), b.experiment_key());
    let differing: Vec<&str> = ["problem", "ese_max", "seeds", "indicator"]
        .into_iter()
        .filter(|k| ka[k] != kb[k])
        .collect();
    (!differing.is_empty()).then(|| format!("configs differ in {}", differing.join(", ")))
}

/// `compare <A> <B>`: runs both configurations on the same seeds and
/// reports per-seed winners.
pub fn cmd_compare(path_a: &Path, path_b: &Path, opts: &Options, svg: bool) -> Result<Comparison> {
    let a = load(path_a, opts)?;
    let b = load(path_b, opts)?;
    if let Some(msg) = mismatch(&a.config, &b.config) {
        return Err(Error::MismatchedExperiment(msg));
    }
    let out = resolve_out_dir(opts.out.as_deref(), None);
    let ra = run_all(&a, opts.quiet)?;
    let rb = run_all(&b, opts.quiet)?;
    let finals = |rs: &[(u64, RunResult)]| -> Vec<(u64, f64)> {
        rs.iter()
            .map(|(s, r)| (*s, r.final_indicator().unwrap_or(f64::NAN)))
            .collect()
    };
    let (label, higher) = indicator_label(&a);
    let cmp = compare_finals(&label, higher, &finals(&ra), &finals(&rb))?;

    fs::create_dir_all(&out)?;
    fs::write(out.join("compare.json"), serde_json::to_string_pretty(&cmp).map_err(json_err)? + "\n")?;
    let table = report::comparison_table(&cmp);
    fs::write(out.join("compare.txt"), &table)?;
    if !opts.quiet {
        print!("{table}");
    }
    if svg {
        if a.spec().n_obj == 2 {
            let svg = report::front_svg(
                &ra[0].1.front_objectives(),
                &rb[0].1.front_objectives(),
                a.reference_front(),
            );
            fs::write(out.join("front.svg"), svg)?;
        } else {
            log::warn!("front.svg needs exactly 2 objectives, got {}; skipped", a.spec().n_obj);
        }
    }
    Ok(cmp)
}

/// `list`: built-in problems, algorithms, kernels and defaults.
pub fn cmd_list() -> String {
    use std::fmt::Write;
    let mut s = String::new();
    let _ = writeln!(s, "problems:");
    for name in BenchmarkName::ALL {
        let b = Benchmark::new(name, None, None).expect("defaults are valid");
        let spec = b.spec();
        let _ = writeln!(
            s,
            "  {:<10} n_var={:<3} n_obj={} n_constr={} bounds=[{}, {}]",
            name.as_str(),
            spec.n_var,
            spec.n_obj,
            spec.n_constr,
            spec.lower[0],
            spec.upper[0],
        );
    }
    let _ = writeln!(s, "algorithms:");
    for kind in AlgorithmKind::ALL {
        let p = crate::algorithms::AlgorithmParams::new(kind);
        let params = match kind {
            AlgorithmKind::De => format!("f={} cr={}", p.f, p.cr),
            AlgorithmKind::Nsga3 => format!(
                "eta_c={} p_c={} eta_m={} p_m=1/n_var n_partitions=auto",
                p.eta_c, p.p_c, p.eta_m
            ),
            _ => format!("eta_c={} p_c={} eta_m={} p_m=1/n_var", p.eta_c, p.p_c, p.eta_m),
        };
        let _ = writeln!(
            s,
            "  {:<10} objectives={} pop_size={} (assisted {}) {params}",
            kind.as_str(),
            if kind.is_multi_objective() { "any" } else { "1" },
            DEFAULT_POP_SIZE,
            DEFAULT_ASSISTED_POP_SIZE,
        );
    }
    let _ = writeln!(s, "kernels:");
    for k in Kernel::ALL {
        let _ = writeln!(s, "  {}", k.as_str());
    }
    let _ = writeln!(s, "tails:");
    for t in Tail::ALL {
        let _ = writeln!(s, "  {}", t.as_str());
    }
    let cands: Vec<String> = RbfConfig::default_candidates()
        .iter()
        .map(|c| format!("{}+{}", c.kernel.as_str(), c.tail.as_str()))
        .collect();
    let _ = writeln!(s, "surrogate candidates (default): {}", cands.join(", "));
    let _ = writeln!(s, "indicators:");
    for i in [IndicatorName::Hypervolume, IndicatorName::Igd, IndicatorName::IgdPlus] {
        let _ = writeln!(s, "  {}", i.as_str());
    }
    let _ = writeln!(s, "assist modes: none, bias, knockout");
    let _ = writeln!(
        s,
        "assist defaults: n_doe=min(11*n_var-1, ese_max/2) beta=30 n_candidates=5 n_infill=1 (single-objective) or 5 mode=knockout"
    );
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile(&v, 0.5), 3.0);
        assert_eq!(quantile(&v, 0.25), 2.0);
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), 2.5);
    }

    #[test]
    fn identical_finals_tie() {
        let a = [(1, 0.5), (2, 0.25)];
        let c = compare_finals("igd", false, &a, &a).unwrap();
        assert_eq!((c.wins_a, c.wins_b, c.ties), (0, 0, 2));
        assert_eq!(c.median_ratio, 1.0);
    }

    #[test]
    fn winners_respect_direction() {
        let a = [(1, 2.0)];
        let b = [(1, 1.0)];
        assert_eq!(compare_finals("hv", true, &a, &b).unwrap().wins_a, 1);
        assert_eq!(compare_finals("igd", false, &a, &b).unwrap().wins_b, 1);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::InvalidConfig(String::new())), 2);
        assert_eq!(exit_code(&Error::EvaluatorCrashed(String::new())), 3);
        assert_eq!(exit_code(&Error::SingularSystem), 1);
    }

    #[test]
    fn listing_is_stable() {
        let l = cmd_list();
        assert_eq!(l, cmd_list());
        for word in ["zdt1", "nsga2", "nsga3", "cubic"] {
            assert!(l.contains(word));
        }
    }
}
