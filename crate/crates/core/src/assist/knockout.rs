use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::base::dominance::{constrained, Dominance};
use crate::base::problem::constraint_violation;
use crate::error::{Error, Result};
use crate::surrogates::Prediction;

/// Ranks candidates by repeated single-elimination tournaments on noisy
/// surrogate predictions.
///
/// Each match draws one value per output and contestant from a normal with
/// the predicted mean and the uncertainty as standard deviation; the
/// constraint-dominating draw advances, and incomparable or equal draws are
/// settled by a coin flip. Every bracket is freshly shuffled and excludes
/// earlier winners. Returns up to `n_winners` indices in winning order.
pub fn probabilistic_knockout(
    predictions: &[Prediction],
    n_obj: usize,
    n_winners: usize,
    seed: u64,
) -> Result<Vec<usize>> {
    for p in predictions {
        if p.mean.len() != p.uncertainty.len() {
            return Err(Error::LengthMismatch {
                expected: p.mean.len(),
                actual: p.uncertainty.len(),
            });
        }
        if p.mean.len() < n_obj {
            return Err(Error::LengthMismatch {
                expected: n_obj,
                actual: p.mean.len(),
            });
        }
        if p.uncertainty.iter().any(|u| u.is_nan() || *u < 0.0) {
            return Err(Error::InvalidConfig("uncertainties must be non-negative".into()));
        }
    }
    let width = predictions.first().map_or(0, |p| p.mean.len());
    if let Some(p) = predictions.iter().find(|p| p.mean.len() != width) {
        return Err(Error::LengthMismatch {
            expected: width,
            actual: p.mean.len(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut remaining: Vec<usize> = (0..predictions.len()).collect();
    let mut winners = Vec::with_capacity(n_winners);
    while winners.len() < n_winners && !remaining.is_empty() {
        let mut bracket = remaining.clone();
        bracket.shuffle(&mut rng);
        while bracket.len() > 1 {
            let mut next = Vec::with_capacity(bracket.len() / 2 + 1);
            for pair in bracket.chunks(2) {
                match *pair {
                    [a, b] => next.push(play(&predictions[a], &predictions[b], n_obj, &mut rng, a, b)),
                    [bye] => next.push(bye),
                    _ => unreachable!(),
                }
            }
            bracket = next;
        }
        let w = bracket[0];
        winners.push(w);
        remaining.retain(|&i| i != w);
    }
    Ok(winners)
}

fn draw<R: Rng>(p: &Prediction, rng: &mut R) -> Vec<f64> {
    p.mean
        .iter()
        .zip(&p.uncertainty)
        .map(|(&m, &s)| {
            if s > 0.0 {
                Normal::new(m, s).map_or(m, |d| d.sample(rng))
            } else {
                m
            }
        })
        .collect()
}

fn play<R: Rng>(pa: &Prediction, pb: &Prediction, n_obj: usize, rng: &mut R, a: usize, b: usize) -> usize {
    let va = draw(pa, rng);
    let vb = draw(pb, rng);
    let cva = constraint_violation(&va[n_obj..]);
    let cvb = constraint_violation(&vb[n_obj..]);
    match constrained(&va[..n_obj], cva, &vb[..n_obj], cvb) {
        Dominance::ADominatesB => a,
        Dominance::BDominatesA => b,
        Dominance::Incomparable | Dominance::Equal => {
            if rng.gen::<bool>() {
                a
            } else {
                b
            }
        }
    }
}
