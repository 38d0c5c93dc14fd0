use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::surrogates::rbf::{fit, RbfConfig, Surrogate};
use crate::surrogates::select::select_model;
use crate::surrogates::{Approximator, Prediction};

/// One surrogate per output: objectives first, then constraints.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SurrogateEnsemble {
    models: Vec<Option<Surrogate>>,
}

impl SurrogateEnsemble {
    pub fn unfitted(n_outputs: usize) -> Self {
        SurrogateEnsemble {
            models: vec![None; n_outputs],
        }
    }

    pub fn from_models(models: Vec<Surrogate>) -> Self {
        SurrogateEnsemble {
            models: models.into_iter().map(Some).collect(),
        }
    }

    /// Fits every output column of `ys` against `xs`.
    ///
    /// With five or more samples each output goes through cross-validated
    /// selection over `candidates`; below that the first candidate that fits
    /// is used and its error estimate is the output's standard deviation.
    pub fn fit(
        xs: &[Vec<f64>],
        ys: &[Vec<f64>],
        candidates: &[RbfConfig],
        seed: u64,
    ) -> Result<Self> {
        let models = ys
            .iter()
            .map(|y| fit_output(xs, y, candidates, seed))
            .collect::<Result<Vec<_>>>()?;
        Ok(SurrogateEnsemble::from_models(models))
    }

    pub fn n_outputs(&self) -> usize {
        self.models.len()
    }

    pub fn model(&self, output: usize) -> Option<&Surrogate> {
        self.models.get(output).and_then(Option::as_ref)
    }

    pub fn cv_errors(&self) -> Vec<f64> {
        self.models
            .iter()
            .map(|m| m.as_ref().map_or(f64::NAN, |m| m.cv_error))
            .collect()
    }

    fn fitted(&self) -> Result<Vec<&Surrogate>> {
        self.models
            .iter()
            .enumerate()
            .map(|(i, m)| m.as_ref().ok_or(Error::ModelNotFitted(i)))
            .collect()
    }
}

fn fit_output(
    xs: &[Vec<f64>],
    y: &[f64],
    candidates: &[RbfConfig],
    seed: u64,
) -> Result<Surrogate> {
    if xs.len() >= 5 {
        return Ok(select_model(xs, y, candidates, seed)?.model);
    }
    let mean = y.iter().sum::<f64>() / y.len().max(1) as f64;
    let std = (y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / y.len().max(1) as f64).sqrt();
    let mut last = Error::AllCandidatesFailed;
    for cfg in candidates {
        match fit(xs, y, cfg) {
            Ok(mut m) => {
                m.cv_error = std;
                return Ok(m);
            }
            Err(e) => last = e,
        }
    }
    Err(last)
}

impl Approximator for SurrogateEnsemble {
    fn n_outputs(&self) -> usize {
        self.models.len()
    }

    fn predict(&self, xs: &[Vec<f64>]) -> Result<Vec<Prediction>> {
        let models = self.fitted()?;
        let mut out: Vec<Prediction> = xs
            .iter()
            .map(|_| Prediction {
                mean: Vec::with_capacity(models.len()),
                uncertainty: Vec::with_capacity(models.len()),
            })
            .collect();
        for m in models {
            let (mean, unc) = m.predict(xs)?;
            for ((p, mu), u) in out.iter_mut().zip(mean).zip(unc) {
                p.mean.push(mu);
                p.uncertainty.push(u);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn per_output_models() {
        let xs: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64 / 7.0, (i * i) as f64 / 49.0]).collect();
        let ys = vec![
            xs.iter().map(|r| r[0] + r[1]).collect::<Vec<_>>(),
            xs.iter().map(|r| r[0] * r[1] - 0.2).collect::<Vec<_>>(),
        ];
        let ens = SurrogateEnsemble::fit(&xs, &ys, &RbfConfig::default_candidates(), 1).unwrap();
        assert_eq!(ens.n_outputs(), 2);
        assert!(ens.cv_errors().iter().all(|e| e.is_finite() && *e >= 0.0));
        let preds = ens.predict(&xs[..3]).unwrap();
        assert_eq!(preds.len(), 3);
        for (p, i) in preds.iter().zip(0..) {
            assert!((p.mean[0] - ys[0][i]).abs() < 1e-6);
            assert!((p.mean[1] - ys[1][i]).abs() < 1e-6);
        }
    }

    #[test]
    fn small_archive_uses_first_fitting_candidate() {
        let xs = vec![vec![0.0], vec![1.0], vec![0.5]];
        let ys = vec![vec![1.0, 3.0, 2.5]];
        let ens = SurrogateEnsemble::fit(&xs, &ys, &RbfConfig::default_candidates(), 0).unwrap();
        let m = ens.model(0).unwrap();
        assert_eq!(m.config, RbfConfig::default_candidates()[0]);
        assert!(m.cv_error > 0.0);
    }
}
