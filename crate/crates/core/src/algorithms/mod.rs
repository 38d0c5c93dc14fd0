//! Population metaheuristics behind a uniform ask-tell interface.
//!
//! `ga` and `de` are single-objective; `nsga2` and `nsga3` handle any number
//! of objectives. Constraints are handled everywhere by constraint-domination.

pub mod operators;
pub mod refdirs;
pub mod sorting;
pub mod survival;

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::base::dominance::scalar_order;
use crate::base::problem::{IdGen, ProblemSpec, Solution};
use crate::error::{Error, Result};

pub use refdirs::{das_dennis, ReferenceDirections};
pub use sorting::{crowding_distance, non_dominated_sort};
pub use survival::nsga3_survive;

/// The optimizer surface the assistance layer wraps.
pub trait AskTell: Clone + Send + Sync {
    fn spec(&self) -> &ProblemSpec;

    /// Proposes unevaluated offspring. The first call on an empty
    /// population proposes the initial random population.
    fn ask(&mut self) -> Result<Vec<Solution>>;

    /// Ingests the evaluated offspring of the preceding `ask`.
    fn tell(&mut self, offspring: Vec<Solution>) -> Result<()>;

    /// Merges evaluated solutions that did not come from `ask` (initial
    /// designs, infill points) through the usual survival.
    fn inject(&mut self, solutions: Vec<Solution>) -> Result<()>;

    fn population(&self) -> &[Solution];

    fn population_mut(&mut self) -> &mut Vec<Solution>;

    fn generation(&self) -> usize;

    fn pop_size(&self) -> usize;

    /// Replaces the random stream, e.g. for independently seeded clones.
    fn reseed(&mut self, seed: u64);

    fn ids(&self) -> &IdGen;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmKind {
    Ga,
    De,
    Nsga2,
    Nsga3,
}

impl AlgorithmKind {
    pub const ALL: [AlgorithmKind; 4] = [
        AlgorithmKind::Ga,
        AlgorithmKind::De,
        AlgorithmKind::Nsga2,
        AlgorithmKind::Nsga3,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AlgorithmKind::Ga => "ga",
            AlgorithmKind::De => "de",
            AlgorithmKind::Nsga2 => "nsga2",
            AlgorithmKind::Nsga3 => "nsga3",
        }
    }

    pub fn is_multi_objective(self) -> bool {
        matches!(self, AlgorithmKind::Nsga2 | AlgorithmKind::Nsga3)
    }
}

impl fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AlgorithmKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AlgorithmKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown algorithm `{s}`")))
    }
}

pub const DEFAULT_POP_SIZE: usize = 100;
pub const DEFAULT_ASSISTED_POP_SIZE: usize = 20;

/// Algorithm parameters. Fields that do not apply to `kind` are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmParams {
    pub kind: AlgorithmKind,
    pub pop_size: usize,
    /// SBX distribution index.
    pub eta_c: f64,
    /// Crossover probability per mating.
    pub p_c: f64,
    /// Polynomial mutation distribution index.
    pub eta_m: f64,
    /// Per-variable mutation probability; `None` means `1 / n_var`.
    pub p_m: Option<f64>,
    /// DE differential weight.
    pub f: f64,
    /// DE crossover rate.
    pub cr: f64,
    /// NSGA-III lattice partitions; `None` picks the densest lattice that
    /// fits in `pop_size`.
    pub n_partitions: Option<usize>,
}

impl AlgorithmParams {
    pub fn new(kind: AlgorithmKind) -> Self {
        AlgorithmParams {
            kind,
            pop_size: DEFAULT_POP_SIZE,
            eta_c: 15.0,
            p_c: 0.9,
            eta_m: 20.0,
            p_m: None,
            f: 0.5,
            cr: 0.9,
            n_partitions: None,
        }
    }

    pub fn with_pop_size(mut self, pop_size: usize) -> Self {
        self.pop_size = pop_size;
        self
    }

    pub fn validate(&self, spec: &ProblemSpec) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.pop_size < 2 {
            return bad(format!("pop_size must be >= 2, got {}", self.pop_size));
        }
        if !self.kind.is_multi_objective() && spec.n_obj != 1 {
            return bad(format!(
                "{} is single-objective but the problem has {} objectives",
                self.kind, spec.n_obj
            ));
        }
        if !(self.eta_c > 0.0 && self.eta_m > 0.0) {
            return bad("eta_c and eta_m must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.p_c) || !(0.0..=1.0).contains(&self.cr) {
            return bad("p_c and cr must lie in [0, 1]".into());
        }
        if let Some(p) = self.p_m {
            if !(0.0..=1.0).contains(&p) {
                return bad("p_m must lie in [0, 1]".into());
            }
        }
        if !(self.f >= 0.0 && self.f.is_finite()) {
            return bad("f must be a finite non-negative number".into());
        }
        if self.n_partitions == Some(0) {
            return bad("n_partitions must be positive".into());
        }
        Ok(())
    }
}

/// State of one ask-tell optimizer run.
#[derive(Debug, Clone)]
pub struct AskTellState {
    spec: ProblemSpec,
    params: AlgorithmParams,
    population: Vec<Solution>,
    generation: usize,
    rng: ChaCha8Rng,
    ids: IdGen,
    /// Ids of the last ask, with the DE target index of each.
    pending: Vec<(u64, usize)>,
    directions: Option<ReferenceDirections>,
}

impl AskTellState {
    pub fn new(spec: ProblemSpec, params: AlgorithmParams, seed: u64, ids: IdGen) -> Result<Self> {
        spec.validate()?;
        params.validate(&spec)?;
        let directions = if params.kind == AlgorithmKind::Nsga3 {
            Some(match (spec.n_obj, params.n_partitions) {
                (1, _) => ReferenceDirections::new(vec![vec![1.0]])?,
                (m, Some(p)) => das_dennis(m, p),
                (m, None) => das_dennis(m, refdirs::partitions_for(m, params.pop_size)),
            })
        } else {
            None
        };
        Ok(AskTellState {
            spec,
            params,
            population: Vec::new(),
            generation: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
            ids,
            pending: Vec::new(),
            directions,
        })
    }

    pub fn params(&self) -> &AlgorithmParams {
        &self.params
    }

    pub fn directions(&self) -> Option<&ReferenceDirections> {
        self.directions.as_ref()
    }

    fn p_m(&self) -> f64 {
        self.params.p_m.unwrap_or(1.0 / self.spec.n_var as f64)
    }

    fn random_population(&mut self) -> Vec<Solution> {
        (0..self.params.pop_size)
            .map(|_| {
                let x = self
                    .spec
                    .lower
                    .iter()
                    .zip(&self.spec.upper)
                    .map(|(lo, hi)| lo + self.rng.gen::<f64>() * (hi - lo))
                    .collect();
                self.ids.mint(x)
            })
            .collect()
    }

    fn check_evaluated(&self) -> Result<()> {
        match self.population.iter().find(|s| s.eval.is_none()) {
            Some(s) => Err(Error::StateCorrupt(s.id)),
            None => Ok(()),
        }
    }

    /// Binary tournament; `better(a, b)` is `Some(true)` when `a` wins and
    /// `None` on a tie, which a coin flip settles.
    fn tournament(&mut self, better: &impl Fn(usize, usize) -> Option<bool>) -> usize {
        let n = self.population.len();
        if n == 1 {
            return 0;
        }
        let pick = sample(&mut self.rng, n, 2);
        let (a, b) = (pick.index(0), pick.index(1));
        match better(a, b) {
            Some(true) => a,
            Some(false) => b,
            None => {
                if self.rng.gen::<bool>() {
                    a
                } else {
                    b
                }
            }
        }
    }

    fn mate(&mut self) -> Vec<Solution> {
        let pop = &self.population;
        let better: Box<dyn Fn(usize, usize) -> Option<bool>> = match self.params.kind {
            AlgorithmKind::Ga => {
                let evals: Vec<_> = pop.iter().map(|s| s.eval.clone().unwrap()).collect();
                Box::new(move |a, b| match scalar_order(&evals[a], &evals[b]) {
                    std::cmp::Ordering::Less => Some(true),
                    std::cmp::Ordering::Greater => Some(false),
                    std::cmp::Ordering::Equal => None,
                })
            }
            _ => {
                let (rank, crowd) = survival::rank_and_crowding(pop);
                let use_crowding = self.params.kind == AlgorithmKind::Nsga2;
                Box::new(move |a, b| {
                    if rank[a] != rank[b] {
                        Some(rank[a] < rank[b])
                    } else if use_crowding && crowd[a] != crowd[b] {
                        Some(crowd[a] > crowd[b])
                    } else {
                        None
                    }
                })
            }
        };

        let n_off = self.params.pop_size;
        let p_m = self.p_m();
        let mut children = Vec::with_capacity(n_off + 1);
        while children.len() < n_off {
            let a = self.tournament(&better);
            let b = self.tournament(&better);
            let (pa, pb) = (self.population[a].x.clone(), self.population[b].x.clone());
            let (c1, c2) = if self.rng.gen::<f64>() < self.params.p_c {
                operators::sbx_crossover(&pa, &pb, self.params.eta_c, &mut self.rng, &self.spec)
            } else {
                (pa, pb)
            };
            for c in [c1, c2] {
                if children.len() < n_off {
                    let m = operators::polynomial_mutation(
                        &c,
                        self.params.eta_m,
                        p_m,
                        &mut self.rng,
                        &self.spec,
                    );
                    children.push(m);
                }
            }
        }
        children.into_iter().map(|x| self.ids.mint(x)).collect()
    }

    fn differential(&mut self) -> Vec<(Solution, usize)> {
        let n = self.population.len();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let (r1, r2, r3) = if n >= 4 {
                let others: Vec<usize> = sample(&mut self.rng, n - 1, 3)
                    .into_iter()
                    .map(|k| if k >= i { k + 1 } else { k })
                    .collect();
                (others[0], others[1], others[2])
            } else {
                (
                    self.rng.gen_range(0..n),
                    self.rng.gen_range(0..n),
                    self.rng.gen_range(0..n),
                )
            };
            let pop = &self.population;
            let trial = operators::de_trial(
                &pop[i].x,
                &pop[r1].x,
                &pop[r2].x,
                &pop[r3].x,
                self.params.f,
                self.params.cr,
                &mut self.rng,
                &self.spec,
            );
            out.push((self.ids.mint(trial), i));
        }
        out
    }

    fn survive(&mut self, merged: Vec<Solution>) {
        let pop_size = self.params.pop_size;
        self.population = match self.params.kind {
            AlgorithmKind::Ga | AlgorithmKind::De => {
                survival::truncate_scalar(merged, pop_size, &mut self.rng)
            }
            AlgorithmKind::Nsga2 => {
                survival::rank_and_crowding_survival(merged, pop_size, &mut self.rng)
            }
            AlgorithmKind::Nsga3 => {
                let dirs = self.directions.as_ref().expect("nsga3 has directions");
                survival::nsga3_survive(merged, dirs, pop_size, &mut self.rng)
            }
        };
    }
}

impl AskTell for AskTellState {
    fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    fn ask(&mut self) -> Result<Vec<Solution>> {
        if self.population.is_empty() {
            let init = self.random_population();
            self.pending = init.iter().map(|s| (s.id, usize::MAX)).collect();
            return Ok(init);
        }
        self.check_evaluated()?;
        let offspring: Vec<(Solution, usize)> = match self.params.kind {
            AlgorithmKind::De => self.differential(),
            _ => self.mate().into_iter().map(|s| (s, usize::MAX)).collect(),
        };
        self.pending = offspring.iter().map(|(s, t)| (s.id, *t)).collect();
        Ok(offspring.into_iter().map(|(s, _)| s).collect())
    }

    fn tell(&mut self, offspring: Vec<Solution>) -> Result<()> {
        if offspring.len() != self.pending.len()
            || offspring
                .iter()
                .zip(&self.pending)
                .any(|(s, (id, _))| s.id != *id)
        {
            return Err(Error::TellMismatch);
        }
        if let Some(s) = offspring.iter().find(|s| s.eval.is_none()) {
            return Err(Error::StateCorrupt(s.id));
        }
        let pending = std::mem::take(&mut self.pending);
        let initial = self.population.is_empty();
        if self.params.kind == AlgorithmKind::De && !initial {
            for (child, (_, target)) in offspring.into_iter().zip(pending) {
                let parent = self.population[target].eval.as_ref().unwrap();
                if scalar_order(child.eval.as_ref().unwrap(), parent)
                    != std::cmp::Ordering::Greater
                {
                    self.population[target] = child;
                }
            }
        } else {
            let mut merged = std::mem::take(&mut self.population);
            merged.extend(offspring);
            self.survive(merged);
        }
        self.generation += 1;
        Ok(())
    }

    fn inject(&mut self, solutions: Vec<Solution>) -> Result<()> {
        if let Some(s) = solutions.iter().find(|s| s.eval.is_none()) {
            return Err(Error::StateCorrupt(s.id));
        }
        self.pending.clear();
        let mut merged = std::mem::take(&mut self.population);
        merged.extend(solutions);
        self.survive(merged);
        self.generation += 1;
        Ok(())
    }

    fn population(&self) -> &[Solution] {
        &self.population
    }

    fn population_mut(&mut self) -> &mut Vec<Solution> {
        &mut self.population
    }

    fn generation(&self) -> usize {
        self.generation
    }

    fn pop_size(&self) -> usize {
        self.params.pop_size
    }

    fn reseed(&mut self, seed: u64) {
        self.rng = ChaCha8Rng::seed_from_u64(seed);
    }

    fn ids(&self) -> &IdGen {
        &self.ids
    }
}
