//! Surrogate assistance for any ask-tell algorithm.
//!
//! An assisted run starts from a Latin hypercube design, fits one surrogate
//! per output on the archive, and then repeats an outer iteration: clones of
//! the wrapped algorithm evolve for `beta` generations on surrogate
//! predictions only, a handful of their proposals receive real expensive
//! evaluations, the real algorithm ingests those, and the surrogates are
//! refitted. Only the infill points touch the budget.
//!
//! In `Bias` mode a single clone runs and its best predicted members become
//! infill points. In `Knockout` mode several independently seeded clones
//! run and the pooled proposals are reduced by [`probabilistic_knockout`],
//! which accounts for the surrogate's error estimate.

pub mod doe;
pub mod history;
pub mod knockout;

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algorithms::sorting::{constrained_sort, crowding_distance};
use crate::algorithms::AskTell;
use crate::base::dominance::scalar_order;
use crate::base::evaluate::{evaluate_approximate, evaluate_expensive};
use crate::base::problem::{Evaluation, Problem, ProblemSpec, Solution};
use crate::base::{Archive, Budget};
use crate::error::{Error, Result};
use crate::surrogates::{Approximator, Prediction, RbfConfig, SurrogateEnsemble};

pub use doe::latin_hypercube;
pub use history::{HistoryEntry, InfillSource, Tracking};
pub use knockout::probabilistic_knockout;

use history::Tracker;

/// Minimum normalized distance between an infill point and any archived
/// or already chosen design.
pub const MIN_INFILL_DISTANCE: f64 = 1e-3;

/// Consecutive outer iterations without a new ESE before a run is declared
/// saturated.
const MAX_STALLS: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AssistMode {
    Bias,
    Knockout,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssistConfig {
    /// Size of the initial Latin hypercube design.
    pub n_doe: usize,
    /// Surrogate-only generations per outer iteration.
    pub beta: usize,
    /// Independently seeded clones in knockout mode.
    pub n_candidates: usize,
    /// ESEs spent per outer iteration.
    pub n_infill: usize,
    pub mode: AssistMode,
}

impl AssistConfig {
    /// Small-budget defaults: `11 d - 1` initial designs (at most half the
    /// budget), 30 surrogate generations, 5 clones, knockout mode, and one
    /// infill point per iteration for single-objective problems or five
    /// otherwise.
    pub fn defaults(spec: &ProblemSpec, ese_max: usize) -> Self {
        let n_doe = (11 * spec.n_var - 1).min(ese_max / 2).max(1);
        AssistConfig {
            n_doe,
            beta: 30,
            n_candidates: 5,
            n_infill: if spec.n_obj == 1 { 1 } else { 5 },
            mode: AssistMode::Knockout,
        }
    }

    pub fn validate(&self, ese_max: usize) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.n_doe == 0 || self.n_doe >= ese_max {
            return bad(format!("n_doe must lie in [1, ese_max), got {}", self.n_doe));
        }
        if self.beta == 0 {
            return bad("beta must be >= 1".into());
        }
        if self.n_infill == 0 {
            return bad("n_infill must be >= 1".into());
        }
        if self.n_candidates == 0 {
            return bad("n_candidates must be >= 1".into());
        }
        Ok(())
    }
}

/// Produces the approximation model from the archive.
pub trait SurrogateBuilder: Send + Sync {
    fn build(&self, archive: &Archive, spec: &ProblemSpec, seed: u64)
        -> Result<Arc<dyn Approximator>>;
}

/// One RBF per output, chosen by cross-validation among `candidates`.
#[derive(Debug, Clone)]
pub struct RbfBuilder {
    pub candidates: Vec<RbfConfig>,
}

impl Default for RbfBuilder {
    fn default() -> Self {
        RbfBuilder {
            candidates: RbfConfig::default_candidates(),
        }
    }
}

impl SurrogateBuilder for RbfBuilder {
    fn build(
        &self,
        archive: &Archive,
        _spec: &ProblemSpec,
        seed: u64,
    ) -> Result<Arc<dyn Approximator>> {
        let (xs, ys) = archive.training_data();
        Ok(Arc::new(SurrogateEnsemble::fit(&xs, &ys, &self.candidates, seed)?))
    }
}

/// An infill point with what the surrogate predicted for it.
#[derive(Debug, Clone)]
pub struct InfillRecord {
    pub predicted: Option<Evaluation>,
    pub solution: Solution,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    Continued { spent: usize, source: InfillSource },
    Finished,
}

/// Everything an assisted run carries between outer iterations.
pub struct AssistState<A> {
    pub archive: Archive,
    pub budget: Budget,
    pub model: Option<Arc<dyn Approximator>>,
    pub algorithm: A,
    pub outer_iteration: usize,
    pub history: Vec<HistoryEntry>,
    pub fallbacks: usize,
    pub saturated: bool,
    /// Infill points of the most recent outer iteration.
    pub last_infill: Vec<InfillRecord>,
    config: AssistConfig,
    seed: u64,
    rng: ChaCha8Rng,
    tracker: Tracker,
    stalls: usize,
}

/// Final products of a run.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub archive: Archive,
    pub budget: Budget,
    /// Non-dominated archive members under constraint-domination.
    pub front: Vec<Solution>,
    pub history: Vec<HistoryEntry>,
    /// Set when the run stopped early because no new designs appeared.
    pub saturated: bool,
    pub fallbacks: usize,
}

impl RunResult {
    fn new(archive: Archive, budget: Budget, history: Vec<HistoryEntry>, saturated: bool, fallbacks: usize) -> Self {
        let entries = archive.entries();
        let front = constrained_sort(entries)
            .first()
            .map(|f| f.iter().map(|&i| entries[i].clone()).collect())
            .unwrap_or_default();
        RunResult {
            archive,
            budget,
            front,
            history,
            saturated,
            fallbacks,
        }
    }

    pub fn front_objectives(&self) -> Vec<Vec<f64>> {
        self.front
            .iter()
            .filter_map(|s| s.objectives().map(<[f64]>::to_vec))
            .collect()
    }

    pub fn final_indicator(&self) -> Option<f64> {
        self.history.last().map(|h| h.indicator)
    }
}

fn record(
    tracker: &mut Tracker,
    archive: &Archive,
    from: usize,
    source: InfillSource,
    history: &mut Vec<HistoryEntry>,
) {
    for (i, s) in archive.entries().iter().enumerate().skip(from) {
        history.push(tracker.observe(s, i + 1, source));
    }
}

/// Builds the initial design, evaluates it, seeds the algorithm with it and
/// fits the first surrogate.
pub fn initialize_doe<A: AskTell>(
    problem: &dyn Problem,
    mut algorithm: A,
    config: &AssistConfig,
    builder: &dyn SurrogateBuilder,
    mut budget: Budget,
    seed: u64,
    tracking: Tracking,
) -> Result<AssistState<A>> {
    config.validate(budget.ese_max())?;
    if budget.ese_used() != 0 {
        return Err(Error::InvalidConfig("initial design needs an untouched budget".into()));
    }
    let spec = problem.spec();
    let mut tracker = Tracker::new(spec.n_obj, tracking)?;
    let mut archive = Archive::new();
    let design: Vec<Solution> = latin_hypercube(spec, config.n_doe, seed)
        .into_iter()
        .map(|x| algorithm.ids().mint(x))
        .collect();
    let out = evaluate_expensive(problem, design, &mut budget, &mut archive)?;
    let mut history = Vec::with_capacity(budget.ese_max());
    record(&mut tracker, &archive, 0, InfillSource::Doe, &mut history);
    algorithm.inject(out.solutions)?;
    let model = fit_or_warn(builder, &archive, spec, seed);
    Ok(AssistState {
        archive,
        budget,
        model,
        algorithm,
        outer_iteration: 0,
        history,
        fallbacks: 0,
        saturated: false,
        last_infill: Vec::new(),
        config: config.clone(),
        seed,
        rng: ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15),
        tracker,
        stalls: 0,
    })
}

fn fit_or_warn(
    builder: &dyn SurrogateBuilder,
    archive: &Archive,
    spec: &ProblemSpec,
    seed: u64,
) -> Option<Arc<dyn Approximator>> {
    match builder.build(archive, spec, seed) {
        Ok(m) => Some(m),
        Err(e) => {
            log::warn!("surrogate fit failed, falling back to unassisted offspring: {e}");
            None
        }
    }
}

fn is_model_error(e: &Error) -> bool {
    matches!(
        e,
        Error::SingularSystem
            | Error::ModelNotFitted(_)
            | Error::AllCandidatesFailed
            | Error::DegenerateData(_)
    )
}

/// Greedy distance filter in the unit cube.
struct Spacing {
    taken: Vec<Vec<f64>>,
}

impl Spacing {
    fn new(spec: &ProblemSpec, archive: &Archive) -> Self {
        Spacing {
            taken: archive.entries().iter().map(|s| spec.normalize(&s.x)).collect(),
        }
    }

    fn accept(&mut self, spec: &ProblemSpec, x: &[f64]) -> bool {
        let z = spec.normalize(x);
        let limit = MIN_INFILL_DISTANCE * MIN_INFILL_DISTANCE;
        let close = self.taken.iter().any(|t| {
            t.iter().zip(&z).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() < limit
        });
        if !close {
            self.taken.push(z);
        }
        !close
    }
}

/// Population indices from best to worst predicted quality.
fn quality_order(pop: &[Solution]) -> Vec<usize> {
    let single = pop
        .first()
        .and_then(|s| s.eval.as_ref())
        .is_none_or(|e| e.f.len() == 1);
    if single {
        let mut idx: Vec<usize> = (0..pop.len()).collect();
        idx.sort_by(|&a, &b| {
            scalar_order(pop[a].eval.as_ref().unwrap(), pop[b].eval.as_ref().unwrap())
        });
        return idx;
    }
    let mut order = Vec::with_capacity(pop.len());
    for front in constrained_sort(pop) {
        let objs: Vec<Vec<f64>> = front
            .iter()
            .map(|&i| pop[i].eval.as_ref().unwrap().f.clone())
            .collect();
        let cd = crowding_distance(&objs);
        let mut k: Vec<usize> = (0..front.len()).collect();
        k.sort_by(|&a, &b| cd[b].total_cmp(&cd[a]).then(a.cmp(&b)));
        order.extend(k.into_iter().map(|j| front[j]));
    }
    order
}

/// Runs a reseeded clone of `algorithm` for `beta` generations on ASEs.
fn advance_clone<A: AskTell>(
    algorithm: &A,
    model: &dyn Approximator,
    budget: &mut Budget,
    beta: usize,
    seed: u64,
) -> Result<Vec<Solution>> {
    let mut clone = algorithm.clone();
    clone.reseed(seed);
    let spec = clone.spec().clone();
    let pop = std::mem::take(clone.population_mut());
    *clone.population_mut() = evaluate_approximate(model, &spec, pop, budget)?;
    for _ in 0..beta {
        let off = clone.ask()?;
        let off = evaluate_approximate(model, &spec, off, budget)?;
        clone.tell(off)?;
    }
    Ok(clone.population().to_vec())
}

impl<A: AskTell> AssistState<A> {
    pub fn config(&self) -> &AssistConfig {
        &self.config
    }

    /// Picks infill designs with surrogate guidance.
    fn surrogate_infill(&mut self, model: &dyn Approximator, n_take: usize) -> Result<Vec<Vec<f64>>> {
        let spec = self.algorithm.spec().clone();
        let mut spacing = Spacing::new(&spec, &self.archive);
        let mut picks: Vec<Vec<f64>> = Vec::with_capacity(n_take);
        let mut reserve: Vec<Vec<f64>> = Vec::new();

        match self.config.mode {
            AssistMode::Bias => {
                let seed = self.rng.gen::<u64>();
                let pop = advance_clone(&self.algorithm, model, &mut self.budget, self.config.beta, seed)?;
                for i in quality_order(&pop) {
                    reserve.push(pop[i].x.clone());
                }
            }
            AssistMode::Knockout => {
                let base = self.rng.gen::<u64>();
                let mut pool: Vec<Vec<f64>> = Vec::new();
                for k in 0..self.config.n_candidates {
                    let pop = advance_clone(
                        &self.algorithm,
                        model,
                        &mut self.budget,
                        self.config.beta,
                        base.wrapping_add(k as u64),
                    )?;
                    let fronts = constrained_sort(&pop);
                    for &i in &fronts[0] {
                        pool.push(pop[i].x.clone());
                    }
                    for i in quality_order(&pop) {
                        if !fronts[0].contains(&i) {
                            reserve.push(pop[i].x.clone());
                        }
                    }
                }
                let pool: Vec<Vec<f64>> = pool
                    .into_iter()
                    .filter(|x| spacing.accept(&spec, x))
                    .collect();
                if !pool.is_empty() {
                    let preds = model.predict(&pool)?;
                    self.budget.record_approximate(pool.len());
                    let winners = probabilistic_knockout(&preds, spec.n_obj, n_take, base)?;
                    picks.extend(winners.into_iter().map(|w| pool[w].clone()));
                }
            }
        }
        for x in reserve {
            if picks.len() >= n_take {
                break;
            }
            if spacing.accept(&spec, &x) {
                picks.push(x);
            }
        }
        self.top_up_random(&spec, &mut spacing, &mut picks, n_take);
        Ok(picks)
    }

    fn fallback_infill(&mut self, n_take: usize) -> Result<Vec<Vec<f64>>> {
        let spec = self.algorithm.spec().clone();
        let mut spacing = Spacing::new(&spec, &self.archive);
        let mut picks = Vec::with_capacity(n_take);
        for s in self.algorithm.ask()? {
            if picks.len() >= n_take {
                break;
            }
            if spacing.accept(&spec, &s.x) {
                picks.push(s.x);
            }
        }
        self.top_up_random(&spec, &mut spacing, &mut picks, n_take);
        Ok(picks)
    }

    fn top_up_random(
        &mut self,
        spec: &ProblemSpec,
        spacing: &mut Spacing,
        picks: &mut Vec<Vec<f64>>,
        n_take: usize,
    ) {
        let mut attempts = 0;
        while picks.len() < n_take && attempts < 1000 {
            attempts += 1;
            let x: Vec<f64> = spec
                .lower
                .iter()
                .zip(&spec.upper)
                .map(|(lo, hi)| lo + self.rng.gen::<f64>() * (hi - lo))
                .collect();
            if spacing.accept(spec, &x) {
                picks.push(x);
            }
        }
    }

    /// One outer iteration: propose, evaluate `min(n_infill, remaining)`
    /// designs expensively, update the algorithm and refit.
    pub fn assisted_step(
        &mut self,
        problem: &dyn Problem,
        builder: &dyn SurrogateBuilder,
    ) -> Result<StepOutcome> {
        if self.budget.is_exhausted() || self.saturated {
            return Ok(StepOutcome::Finished);
        }
        let n_take = self.config.n_infill.min(self.budget.remaining());
        let proposal = match self.model.clone() {
            Some(model) => self.surrogate_infill(model.as_ref(), n_take),
            None => Err(Error::ModelNotFitted(0)),
        };
        let (xs, source) = match proposal {
            Ok(xs) => (xs, InfillSource::Surrogate),
            Err(e) if is_model_error(&e) => {
                log::debug!("outer iteration {} falls back: {e}", self.outer_iteration);
                self.fallbacks += 1;
                (self.fallback_infill(n_take)?, InfillSource::Fallback)
            }
            Err(e) => return Err(e),
        };

        let spec = problem.spec();
        let solutions: Vec<Solution> = xs.into_iter().map(|x| self.algorithm.ids().mint(x)).collect();
        let predicted: Vec<Option<Evaluation>> = match (&self.model, source) {
            (Some(m), InfillSource::Surrogate) if !solutions.is_empty() => {
                let xs: Vec<Vec<f64>> = solutions.iter().map(|s| s.x.clone()).collect();
                let preds = m.predict(&xs)?;
                self.budget.record_approximate(preds.len());
                preds.into_iter().map(|p| Some(split_prediction(p, spec))).collect()
            }
            _ => vec![None; solutions.len()],
        };

        let before = self.archive.len();
        let out = evaluate_expensive(problem, solutions, &mut self.budget, &mut self.archive)?;
        record(&mut self.tracker, &self.archive, before, source, &mut self.history);
        let spent = self.archive.len() - before;
        self.last_infill = out
            .solutions
            .iter()
            .cloned()
            .zip(predicted)
            .map(|(solution, predicted)| InfillRecord { predicted, solution })
            .collect();
        self.algorithm.inject(out.solutions)?;
        self.outer_iteration += 1;

        if spent == 0 {
            self.stalls += 1;
            if self.stalls >= MAX_STALLS {
                self.saturated = true;
            }
        } else {
            self.stalls = 0;
            self.model = fit_or_warn(builder, &self.archive, spec, self.seed);
        }
        Ok(StepOutcome::Continued { spent, source })
    }

    pub fn into_result(self) -> RunResult {
        RunResult::new(self.archive, self.budget, self.history, self.saturated, self.fallbacks)
    }
}

fn split_prediction(p: Prediction, spec: &ProblemSpec) -> Evaluation {
    let mut f = p.mean;
    f.truncate(spec.n_outputs());
    let g = f.split_off(spec.n_obj);
    Evaluation::approximate(f, g)
}

/// Runs until the budget is spent, with or without assistance.
pub fn run<A: AskTell>(
    problem: &dyn Problem,
    algorithm: A,
    assist: Option<&AssistConfig>,
    builder: &dyn SurrogateBuilder,
    budget: Budget,
    seed: u64,
    tracking: Tracking,
) -> Result<RunResult> {
    if algorithm.spec() != problem.spec() {
        return Err(Error::InvalidConfig(
            "algorithm and problem disagree on dimensions or bounds".into(),
        ));
    }
    match assist {
        Some(config) => {
            let mut state = initialize_doe(problem, algorithm, config, builder, budget, seed, tracking)?;
            while let StepOutcome::Continued { .. } = state.assisted_step(problem, builder)? {}
            Ok(state.into_result())
        }
        None => plain_run(problem, algorithm, budget, tracking),
    }
}

fn plain_run<A: AskTell>(
    problem: &dyn Problem,
    mut algorithm: A,
    mut budget: Budget,
    tracking: Tracking,
) -> Result<RunResult> {
    let mut tracker = Tracker::new(problem.spec().n_obj, tracking)?;
    let mut archive = Archive::new();
    let mut history = Vec::with_capacity(budget.ese_max());
    let mut stalls = 0;
    let mut saturated = false;
    while !budget.is_exhausted() {
        let offspring = algorithm.ask()?;
        let before = archive.len();
        let out = evaluate_expensive(problem, offspring, &mut budget, &mut archive)?;
        record(&mut tracker, &archive, before, InfillSource::Plain, &mut history);
        if out.truncated {
            break;
        }
        algorithm.tell(out.solutions)?;
        if out.evaluated == 0 {
            stalls += 1;
            if stalls >= MAX_STALLS {
                saturated = true;
                break;
            }
        } else {
            stalls = 0;
        }
    }
    Ok(RunResult::new(archive, budget, history, saturated, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::{AlgorithmKind, AlgorithmParams, AskTellState};
    use crate::base::problem::IdGen;
    use crate::problems::{Benchmark, BenchmarkName};

    fn ga(problem: &Benchmark, pop: usize, seed: u64) -> AskTellState {
        AskTellState::new(
            problem.spec().clone(),
            AlgorithmParams::new(AlgorithmKind::Ga).with_pop_size(pop),
            seed,
            IdGen::new(),
        )
        .unwrap()
    }

    #[test]
    fn defaults_follow_dimension_and_budget() {
        let p = Benchmark::new(BenchmarkName::Sphere, Some(10), None).unwrap();
        let c = AssistConfig::defaults(p.spec(), 150);
        assert_eq!(c.n_doe, 75);
        assert_eq!(c.n_infill, 1);
        let c = AssistConfig::defaults(p.spec(), 1000);
        assert_eq!(c.n_doe, 109);
        let z = Benchmark::new(BenchmarkName::Zdt1, Some(10), None).unwrap();
        assert_eq!(AssistConfig::defaults(z.spec(), 300).n_infill, 5);
    }

    #[test]
    fn invalid_configs() {
        let p = Benchmark::new(BenchmarkName::Sphere, Some(2), None).unwrap();
        let mut c = AssistConfig::defaults(p.spec(), 50);
        c.n_doe = 50;
        assert!(c.validate(50).is_err());
        c.n_doe = 10;
        c.beta = 0;
        assert!(c.validate(50).is_err());
    }

    #[test]
    fn doe_accounting_and_determinism() {
        let p = Benchmark::new(BenchmarkName::Sphere, Some(3), None).unwrap();
        let mut c = AssistConfig::defaults(p.spec(), 40);
        c.n_doe = 12;
        let init = |seed| {
            initialize_doe(
                &p,
                ga(&p, 10, 1),
                &c,
                &RbfBuilder::default(),
                Budget::new(40).unwrap(),
                seed,
                Tracking::single_objective(),
            )
            .unwrap()
        };
        let a = init(5);
        assert_eq!(a.budget.ese_used(), 12);
        assert_eq!(a.history.len(), 12);
        assert!(a.model.is_some());
        let b = init(5);
        let xa: Vec<_> = a.archive.entries().iter().map(|s| s.x.clone()).collect();
        let xb: Vec<_> = b.archive.entries().iter().map(|s| s.x.clone()).collect();
        assert_eq!(xa, xb);
    }

    #[test]
    fn exhausted_budget_finishes() {
        let p = Benchmark::new(BenchmarkName::Sphere, Some(2), None).unwrap();
        let mut c = AssistConfig::defaults(p.spec(), 12);
        c.n_doe = 10;
        c.beta = 3;
        let builder = RbfBuilder::default();
        let mut st = initialize_doe(
            &p,
            ga(&p, 8, 0),
            &c,
            &builder,
            Budget::new(12).unwrap(),
            0,
            Tracking::single_objective(),
        )
        .unwrap();
        for _ in 0..2 {
            let before = st.archive.len();
            let out = st.assisted_step(&p, &builder).unwrap();
            assert!(matches!(out, StepOutcome::Continued { spent: 1, .. }));
            assert_eq!(st.archive.len(), before + 1);
        }
        let used = st.budget.ese_used();
        assert_eq!(st.assisted_step(&p, &builder).unwrap(), StepOutcome::Finished);
        assert_eq!(st.budget.ese_used(), used);
    }

    #[test]
    fn plain_run_spends_exactly_the_budget() {
        let p = Benchmark::new(BenchmarkName::Sphere, Some(4), None).unwrap();
        let r = run(
            &p,
            ga(&p, 16, 3),
            None,
            &RbfBuilder::default(),
            Budget::new(70).unwrap(),
            3,
            Tracking::single_objective(),
        )
        .unwrap();
        assert_eq!(r.budget.ese_used(), 70);
        assert_eq!(r.history.len(), 70);
        assert!(r.history.windows(2).all(|w| w[1].best_scalar <= w[0].best_scalar));
    }
}
