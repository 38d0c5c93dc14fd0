//! JSON experiment configuration.
//!
//! ```json
//! {
//!   "problem":   { "name": "zdt1", "n_var": 10 },
//!   "algorithm": { "name": "nsga2", "pop_size": 20 },
//!   "assist":    { "mode": "knockout", "beta": 30 },
//!   "ese_max":   300,
//!   "seeds":     [1, 2, 3],
//!   "indicator": { "name": "igd", "n_ref": 1000 },
//!   "output":    "out/zdt1-assisted"
//! }
//! ```
//!
//! Unknown keys are rejected everywhere. A problem is either a built-in
//! benchmark (`name`) or an external evaluator (`command` plus `n_obj`,
//! `n_constr`, `lower`, `upper`, optional `timeout_secs`).

use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::algorithms::{
    AlgorithmKind, AlgorithmParams, AskTellState, DEFAULT_ASSISTED_POP_SIZE, DEFAULT_POP_SIZE,
};
use crate::assist::{AssistConfig, AssistMode, RbfBuilder, Tracking};
use crate::base::external::DEFAULT_TIMEOUT;
use crate::base::{ExternalProblem, IdGen, Problem, ProblemSpec};
use crate::error::{Error, Result};
use crate::metrics::IndicatorName;
use crate::problems::{Benchmark, BenchmarkName};
use crate::surrogates::{Kernel, RbfConfig, Tail};

/// Reference points sampled from a benchmark's front when IGD is tracked.
pub const DEFAULT_N_REF: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    pub algorithm: AlgorithmConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assist: Option<AssistSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surrogate: Option<SurrogateSection>,
    pub ese_max: usize,
    pub seeds: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub indicator: Option<IndicatorSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Command {
    Line(String),
    Argv(Vec<String>),
}

impl Command {
    pub fn argv(&self) -> Vec<String> {
        match self {
            Command::Line(s) => s.split_whitespace().map(str::to_string).collect(),
            Command::Argv(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_var: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_obj: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_constr: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timeout_secs: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmConfig {
    pub name: AlgorithmKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pop_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_partitions: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AssistModeConfig {
    None,
    Bias,
    Knockout,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssistSection {
    pub mode: AssistModeConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_doe: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_candidates: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_infill: Option<usize>,
}

/// Either one fixed model or a candidate list for cross-validated selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurrogateSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<Kernel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<Tail>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nugget: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidates: Option<Vec<RbfConfig>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndicatorSection {
    pub name: IndicatorName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ref_point: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_ref: Option<usize>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| invalid(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::InvalidConfig(m) => invalid(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Checks everything that can be checked without spawning an evaluator
    /// or spending an evaluation.
    pub fn validate(&self) -> Result<Experiment> {
        Experiment::new(self.clone())
    }

    /// The fields that must agree for two runs to be comparable.
    pub fn experiment_key(&self) -> serde_json::Value {
        serde_json::json!({
            "problem": self.problem,
            "ese_max": self.ese_max,
            "seeds": self.seeds,
            "indicator": self.indicator,
        })
    }
}

enum ProblemSource {
    Builtin(Benchmark),
    External {
        spec: ProblemSpec,
        argv: Vec<String>,
        timeout: Duration,
    },
}

/// A validated configuration, ready to run.
pub struct Experiment {
    pub config: RunConfig,
    source: ProblemSource,
    params: AlgorithmParams,
    assist: Option<AssistConfig>,
    builder: RbfBuilder,
    tracking: Tracking,
}

impl Experiment {
    fn new(config: RunConfig) -> Result<Self> {
        if config.ese_max == 0 {
            return Err(invalid("ese_max must be positive"));
        }
        if config.seeds.is_empty() {
            return Err(invalid("seeds must not be empty"));
        }
        let mut seen = config.seeds.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("seeds must be distinct"));
        }
        let source = build_source(&config.problem)?;
        let spec = match &source {
            ProblemSource::Builtin(b) => b.spec().clone(),
            ProblemSource::External { spec, .. } => spec.clone(),
        };

        let assist = match &config.assist {
            None => None,
            Some(a) if a.mode == AssistModeConfig::None => {
                if a.n_doe.is_some() || a.beta.is_some() || a.n_candidates.is_some() || a.n_infill.is_some() {
                    return Err(invalid("assist parameters given with mode `none`"));
                }
                None
            }
            Some(a) => {
                let mut c = AssistConfig::defaults(&spec, config.ese_max);
                c.mode = if a.mode == AssistModeConfig::Bias { AssistMode::Bias } else { AssistMode::Knockout };
                if a.mode == AssistModeConfig::Bias && a.n_candidates.is_some() {
                    return Err(invalid("`n_candidates` applies to knockout mode only"));
                }
                c.n_doe = a.n_doe.unwrap_or(c.n_doe);
                c.beta = a.beta.unwrap_or(c.beta);
                c.n_candidates = a.n_candidates.unwrap_or(c.n_candidates);
                c.n_infill = a.n_infill.unwrap_or(c.n_infill);
                c.validate(config.ese_max)?;
                Some(c)
            }
        };
        if assist.is_none() && config.surrogate.is_some() {
            return Err(invalid("`surrogate` given without assistance"));
        }

        let params = algorithm_params(&config.algorithm, assist.is_some())?;
        // Constructing the state validates the parameters against the problem.
        AskTellState::new(spec.clone(), params.clone(), 0, IdGen::new())?;

        let builder = match &config.surrogate {
            None => RbfBuilder::default(),
            Some(s) => surrogate_builder(s)?,
        };
        let tracking = tracking(&config, &source, &spec)?;
        Ok(Experiment {
            config,
            source,
            params,
            assist,
            builder,
            tracking,
        })
    }

    pub fn spec(&self) -> &ProblemSpec {
        match &self.source {
            ProblemSource::Builtin(b) => b.spec(),
            ProblemSource::External { spec, .. } => spec,
        }
    }

    pub fn params(&self) -> &AlgorithmParams {
        &self.params
    }

    pub fn assist(&self) -> Option<&AssistConfig> {
        self.assist.as_ref()
    }

    pub fn builder(&self) -> &RbfBuilder {
        &self.builder
    }

    pub fn tracking(&self) -> &Tracking {
        &self.tracking
    }

    /// Reference front used by the indicator, if any.
    pub fn reference_front(&self) -> Option<&[Vec<f64>]> {
        self.tracking.reference_front.as_deref()
    }

    /// Instantiates the problem; external evaluators are spawned here.
    pub fn instantiate(&self) -> Result<Box<dyn Problem>> {
        Ok(match &self.source {
            ProblemSource::Builtin(b) => Box::new(b.clone()),
            ProblemSource::External { spec, argv, timeout } => {
                Box::new(ExternalProblem::spawn(spec.clone(), &argv[0], &argv[1..], *timeout)?)
            }
        })
    }
}

fn build_source(p: &ProblemConfig) -> Result<ProblemSource> {
    match (&p.name, &p.command) {
        (Some(_), Some(_)) => Err(invalid("problem takes either `name` or `command`, not both")),
        (None, None) => Err(invalid("problem needs `name` or `command`")),
        (Some(name), None) => {
            if p.n_constr.is_some() || p.lower.is_some() || p.upper.is_some() || p.timeout_secs.is_some() {
                return Err(invalid(
                    "`n_constr`, `lower`, `upper` and `timeout_secs` apply to external problems only",
                ));
            }
            let id: BenchmarkName = name.parse().map_err(|_| {
                invalid(format!("unknown problem `{name}`; see `samoo list`"))
            })?;
            let b = Benchmark::new(id, p.n_var, p.n_obj).map_err(|e| invalid(e.to_string()))?;
            Ok(ProblemSource::Builtin(b))
        }
        (None, Some(cmd)) => {
            let argv = cmd.argv();
            if argv.is_empty() {
                return Err(invalid("empty evaluator command"));
            }
            let (Some(lower), Some(upper)) = (&p.lower, &p.upper) else {
                return Err(invalid("external problems need `lower` and `upper`"));
            };
            let n_obj = p.n_obj.ok_or_else(|| invalid("external problems need `n_obj`"))?;
            let spec = ProblemSpec::new(n_obj, p.n_constr.unwrap_or(0), lower.clone(), upper.clone())
                .map_err(|e| invalid(e.to_string()))?;
            if let Some(n) = p.n_var {
                if n != spec.n_var {
                    return Err(invalid(format!("n_var {n} disagrees with {} bounds", spec.n_var)));
                }
            }
            let timeout = match p.timeout_secs {
                None => DEFAULT_TIMEOUT,
                Some(t) if t > 0.0 && t.is_finite() => Duration::from_secs_f64(t),
                Some(t) => return Err(invalid(format!("timeout_secs must be positive, got {t}"))),
            };
            Ok(ProblemSource::External { spec, argv, timeout })
        }
    }
}

fn algorithm_params(a: &AlgorithmConfig, assisted: bool) -> Result<AlgorithmParams> {
    let kind = a.name;
    let given = [
        ("eta_c", a.eta_c.is_some()),
        ("p_c", a.p_c.is_some()),
        ("eta_m", a.eta_m.is_some()),
        ("p_m", a.p_m.is_some()),
        ("f", a.f.is_some()),
        ("cr", a.cr.is_some()),
        ("n_partitions", a.n_partitions.is_some()),
    ];
    let allowed: &[&str] = match kind {
        AlgorithmKind::Ga | AlgorithmKind::Nsga2 => &["eta_c", "p_c", "eta_m", "p_m"],
        AlgorithmKind::Nsga3 => &["eta_c", "p_c", "eta_m", "p_m", "n_partitions"],
        AlgorithmKind::De => &["f", "cr"],
    };
    if let Some((key, _)) = given.iter().find(|(k, set)| *set && !allowed.contains(k)) {
        return Err(invalid(format!("parameter `{key}` does not apply to {kind}")));
    }
    let mut p = AlgorithmParams::new(kind);
    p.pop_size = a.pop_size.unwrap_or(if assisted { DEFAULT_ASSISTED_POP_SIZE } else { DEFAULT_POP_SIZE });
    p.eta_c = a.eta_c.unwrap_or(p.eta_c);
    p.p_c = a.p_c.unwrap_or(p.p_c);
    p.eta_m = a.eta_m.unwrap_or(p.eta_m);
    p.p_m = a.p_m.or(p.p_m);
    p.f = a.f.unwrap_or(p.f);
    p.cr = a.cr.unwrap_or(p.cr);
    p.n_partitions = a.n_partitions;
    Ok(p)
}

fn surrogate_builder(s: &SurrogateSection) -> Result<RbfBuilder> {
    let single = s.kernel.is_some() || s.tail.is_some() || s.nugget.is_some();
    let candidates = match (&s.candidates, single) {
        (Some(_), true) => {
            return Err(invalid("surrogate takes `candidates` or `kernel`/`tail`/`nugget`, not both"))
        }
        (Some(c), false) if c.is_empty() => return Err(invalid("surrogate candidates are empty")),
        (Some(c), false) => c.clone(),
        (None, _) => vec![RbfConfig::new(
            s.kernel.unwrap_or(Kernel::Cubic),
            s.tail.unwrap_or(Tail::Linear),
            s.nugget.unwrap_or(0.0),
        )],
    };
    if let Some(c) = candidates.iter().find(|c| !(c.nugget >= 0.0 && c.nugget.is_finite())) {
        return Err(invalid(format!("nugget must be non-negative, got {}", c.nugget)));
    }
    Ok(RbfBuilder { candidates })
}

fn tracking(config: &RunConfig, source: &ProblemSource, spec: &ProblemSpec) -> Result<Tracking> {
    if spec.n_obj == 1 {
        if config.indicator.is_some() {
            return Err(invalid("indicators apply to multi-objective problems only"));
        }
        return Ok(Tracking::single_objective());
    }
    let bench = match source {
        ProblemSource::Builtin(b) => Some(b),
        ProblemSource::External { .. } => None,
    };
    let section = config.indicator.clone().unwrap_or(IndicatorSection {
        name: if bench.is_some() { IndicatorName::Igd } else { IndicatorName::Hypervolume },
        ref_point: None,
        n_ref: None,
    });
    let ref_point = match (&section.ref_point, bench) {
        (Some(r), _) => r.clone(),
        (None, Some(b)) => b
            .default_ref_point()
            .ok_or_else(|| invalid("problem has no default reference point"))?,
        (None, None) => return Err(invalid("external multi-objective problems need `indicator.ref_point`")),
    };
    if ref_point.len() != spec.n_obj || ref_point.iter().any(|v| !v.is_finite()) {
        return Err(invalid(format!(
            "ref_point must hold {} finite values, got {:?}",
            spec.n_obj, ref_point
        )));
    }
    let reference_front = match section.name {
        IndicatorName::Hypervolume => {
            if section.n_ref.is_some() {
                return Err(invalid("`n_ref` applies to igd and igd_plus only"));
            }
            None
        }
        IndicatorName::Igd | IndicatorName::IgdPlus => {
            let b = bench.ok_or_else(|| invalid("igd needs a built-in problem with a known front"))?;
            let n = section.n_ref.unwrap_or(DEFAULT_N_REF);
            if n == 0 {
                return Err(invalid("n_ref must be positive"));
            }
            Some(b.reference_front(n).map_err(|e| invalid(e.to_string()))?)
        }
    };
    Ok(Tracking {
        indicator: section.name,
        ref_point: Some(ref_point),
        reference_front,
    })
}
