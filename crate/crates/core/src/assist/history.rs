use serde::{Deserialize, Serialize};

use crate::base::dominance::{pareto, Dominance};
use crate::base::problem::Solution;
use crate::error::{Error, Result};
use crate::metrics::{hypervolume, igd, igd_plus, IndicatorName};

/// Where the design behind an ESE came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InfillSource {
    /// Initial design of experiments.
    Doe,
    /// Unassisted algorithm offspring.
    Plain,
    /// Chosen with surrogate guidance.
    Surrogate,
    /// Unassisted offspring used because the surrogate was unavailable.
    Fallback,
}

/// Best-so-far record after one expensive evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub ese: usize,
    /// Single-objective: best feasible fitness. Multi-objective: hypervolume
    /// of the feasible non-dominated archive.
    pub best_scalar: f64,
    /// The configured indicator; equals `best_scalar` for single-objective runs.
    pub indicator: f64,
    pub source: InfillSource,
}

/// What a run measures at every ESE.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tracking {
    pub indicator: IndicatorName,
    pub ref_point: Option<Vec<f64>>,
    pub reference_front: Option<Vec<Vec<f64>>>,
}

impl Tracking {
    pub fn single_objective() -> Self {
        Tracking {
            indicator: IndicatorName::Hypervolume,
            ref_point: None,
            reference_front: None,
        }
    }
}

/// Incrementally maintained best-so-far values.
#[derive(Debug, Clone)]
pub(crate) struct Tracker {
    n_obj: usize,
    tracking: Tracking,
    best: f64,
    front: Vec<Vec<f64>>,
    hv: f64,
    indicator: f64,
}

impl Tracker {
    pub(crate) fn new(n_obj: usize, tracking: Tracking) -> Result<Self> {
        if n_obj > 1 {
            match &tracking.ref_point {
                None => {
                    return Err(Error::InvalidConfig(
                        "multi-objective runs need a reference point".into(),
                    ))
                }
                Some(r) if r.len() != n_obj => {
                    return Err(Error::DimensionMismatch {
                        expected: n_obj,
                        actual: r.len(),
                    })
                }
                _ => {}
            }
            if tracking.indicator != IndicatorName::Hypervolume {
                match &tracking.reference_front {
                    None => {
                        return Err(Error::InvalidConfig(format!(
                            "indicator {} needs a reference front",
                            tracking.indicator
                        )))
                    }
                    Some(f) if f.iter().any(|p| p.len() != n_obj) || f.is_empty() => {
                        return Err(Error::InvalidConfig("bad reference front".into()))
                    }
                    _ => {}
                }
            }
        }
        let indicator = if tracking.indicator.higher_is_better() {
            0.0
        } else {
            f64::INFINITY
        };
        Ok(Tracker {
            n_obj,
            tracking,
            best: f64::INFINITY,
            front: Vec::new(),
            hv: 0.0,
            indicator,
        })
    }

    pub(crate) fn observe(&mut self, s: &Solution, ese: usize, source: InfillSource) -> HistoryEntry {
        let e = s.eval.as_ref().expect("archived solutions are evaluated");
        if self.n_obj == 1 {
            if e.is_feasible() && e.f[0] < self.best {
                self.best = e.f[0];
            }
            return HistoryEntry {
                ese,
                best_scalar: self.best,
                indicator: self.best,
                source,
            };
        }
        if e.is_feasible() && self.admit(&e.f) {
            let r = self.tracking.ref_point.as_ref().expect("validated");
            self.hv = hypervolume(&self.front, r).unwrap_or(self.hv);
            self.indicator = match self.tracking.indicator {
                IndicatorName::Hypervolume => self.hv,
                IndicatorName::Igd => {
                    igd(self.tracking.reference_front.as_ref().unwrap(), &self.front).unwrap_or(self.indicator)
                }
                IndicatorName::IgdPlus => {
                    igd_plus(self.tracking.reference_front.as_ref().unwrap(), &self.front)
                        .unwrap_or(self.indicator)
                }
            };
        }
        HistoryEntry {
            ese,
            best_scalar: self.hv,
            indicator: self.indicator,
            source,
        }
    }

    /// Adds `f` to the non-dominated set; false if it is dominated or a repeat.
    fn admit(&mut self, f: &[f64]) -> bool {
        if self
            .front
            .iter()
            .any(|q| matches!(pareto(q, f), Dominance::ADominatesB | Dominance::Equal))
        {
            return false;
        }
        self.front.retain(|q| pareto(f, q) != Dominance::ADominatesB);
        self.front.push(f.to_vec());
        true
    }
}
