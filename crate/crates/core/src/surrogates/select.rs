use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::surrogates::rbf::{fit, RbfConfig, Surrogate};

/// Winner of cross-validated model selection.
#[derive(Debug, Clone)]
pub struct Selection {
    pub config: RbfConfig,
    pub cv_error: f64,
    /// Winner refitted on all data, with `cv_error` attached.
    pub model: Surrogate,
}

/// Fold index of every sample: a seeded permutation dealt round-robin into
/// `min(10, n)` folds.
pub fn fold_assignment(n: usize, seed: u64) -> Vec<usize> {
    let k = n.min(10);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut fold = vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        fold[i] = pos % k;
    }
    fold
}

/// Cross-validated RMSE of one configuration.
pub fn cv_rmse(x: &[Vec<f64>], y: &[f64], config: &RbfConfig, folds: &[usize]) -> Result<f64> {
    let k = folds.iter().max().map_or(0, |m| m + 1);
    let mut sse = 0.0;
    for fold in 0..k {
        let mut train_x = Vec::with_capacity(x.len());
        let mut train_y = Vec::with_capacity(x.len());
        let mut test_x = Vec::new();
        let mut test_y = Vec::new();
        for (i, &f) in folds.iter().enumerate() {
            if f == fold {
                test_x.push(x[i].clone());
                test_y.push(y[i]);
            } else {
                train_x.push(x[i].clone());
                train_y.push(y[i]);
            }
        }
        let model = fit(&train_x, &train_y, config)?;
        let (pred, _) = model.predict(&test_x)?;
        sse += pred
            .iter()
            .zip(&test_y)
            .map(|(p, t)| (p - t) * (p - t))
            .sum::<f64>();
    }
    let rmse = (sse / x.len() as f64).sqrt();
    if rmse.is_finite() {
        Ok(rmse)
    } else {
        Err(Error::SingularSystem)
    }
}

/// Picks the candidate with the lowest k-fold RMSE; ties go to the earlier
/// candidate. Candidates that fail to fit are skipped.
pub fn select_model(
    x: &[Vec<f64>],
    y: &[f64],
    candidates: &[RbfConfig],
    seed: u64,
) -> Result<Selection> {
    if x.len() < 5 {
        return Err(Error::DegenerateData(format!(
            "model selection needs at least 5 samples, got {}",
            x.len()
        )));
    }
    if candidates.is_empty() {
        return Err(Error::InvalidConfig("no surrogate candidates".into()));
    }
    let folds = fold_assignment(x.len(), seed);
    let mut best: Option<(RbfConfig, f64)> = None;
    for cfg in candidates {
        let Ok(err) = cv_rmse(x, y, cfg, &folds) else {
            continue;
        };
        if best.is_none_or(|(_, e)| err < e) {
            best = Some((*cfg, err));
        }
    }
    let (config, cv_error) = best.ok_or(Error::AllCandidatesFailed)?;
    let mut model = fit(x, y, &config)?;
    model.cv_error = cv_error;
    Ok(Selection {
        config,
        cv_error,
        model,
    })
}
