use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::base::problem::ProblemSpec;

/// Centered Latin hypercube: each axis is cut into `n` equal strata, every
/// stratum holds exactly one point at its center, and the stratum order of
/// each axis is an independent seeded permutation.
pub fn latin_hypercube(spec: &ProblemSpec, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = vec![vec![0.0; spec.n_var]; n];
    for j in 0..spec.n_var {
        let mut strata: Vec<usize> = (0..n).collect();
        strata.shuffle(&mut rng);
        let (lo, hi) = (spec.lower[j], spec.upper[j]);
        for (p, s) in points.iter_mut().zip(strata) {
            p[j] = lo + (s as f64 + 0.5) / n as f64 * (hi - lo);
        }
    }
    points
}
