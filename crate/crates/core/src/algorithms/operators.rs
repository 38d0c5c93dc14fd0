//! Variation operators: simulated binary crossover, polynomial mutation
//! and DE rand/1/bin.

use rand::Rng;

use crate::base::problem::ProblemSpec;

/// Spread factor of SBX for a uniform draw `u` in [0, 1).
pub fn sbx_beta(u: f64, eta: f64) -> f64 {
    if u <= 0.5 {
        (2.0 * u).powf(1.0 / (eta + 1.0))
    } else {
        (1.0 / (2.0 * (1.0 - u))).powf(1.0 / (eta + 1.0))
    }
}

/// SBX applied to one variable pair with a fixed draw `u`.
pub fn sbx_pair(p1: f64, p2: f64, u: f64, eta: f64) -> (f64, f64) {
    let beta = sbx_beta(u, eta);
    let c1 = 0.5 * ((1.0 + beta) * p1 + (1.0 - beta) * p2);
    let c2 = 0.5 * ((1.0 - beta) * p1 + (1.0 + beta) * p2);
    (c1, c2)
}

/// Simulated binary crossover; each variable is crossed with probability 0.5
/// and the resulting pair is exchanged with probability 0.5.
pub fn sbx_crossover<R: Rng + ?Sized>(
    p1: &[f64],
    p2: &[f64],
    eta_c: f64,
    rng: &mut R,
    bounds: &ProblemSpec,
) -> (Vec<f64>, Vec<f64>) {
    let mut c1 = p1.to_vec();
    let mut c2 = p2.to_vec();
    for i in 0..p1.len() {
        if rng.gen::<f64>() >= 0.5 {
            continue;
        }
        let u: f64 = rng.gen();
        if (p1[i] - p2[i]).abs() <= 1e-14 {
            continue;
        }
        let (mut a, mut b) = sbx_pair(p1[i], p2[i], u, eta_c);
        if rng.gen::<f64>() < 0.5 {
            std::mem::swap(&mut a, &mut b);
        }
        c1[i] = a;
        c2[i] = b;
    }
    bounds.clip(&mut c1);
    bounds.clip(&mut c2);
    (c1, c2)
}

/// Perturbation of polynomial mutation for a uniform draw `u`.
pub fn mutation_delta(u: f64, eta: f64) -> f64 {
    if u < 0.5 {
        (2.0 * u).powf(1.0 / (eta + 1.0)) - 1.0
    } else {
        1.0 - (2.0 * (1.0 - u)).powf(1.0 / (eta + 1.0))
    }
}

/// Polynomial mutation: each variable is perturbed with probability `p_mut`
/// by `delta * (upper - lower)` and clipped.
pub fn polynomial_mutation<R: Rng + ?Sized>(
    x: &[f64],
    eta_m: f64,
    p_mut: f64,
    rng: &mut R,
    bounds: &ProblemSpec,
) -> Vec<f64> {
    let mut y = x.to_vec();
    for (i, v) in y.iter_mut().enumerate() {
        if rng.gen::<f64>() >= p_mut {
            continue;
        }
        let u: f64 = rng.gen();
        *v += mutation_delta(u, eta_m) * (bounds.upper[i] - bounds.lower[i]);
    }
    bounds.clip(&mut y);
    y
}

/// DE rand/1/bin trial vector: `base + f * (a - b)` crossed binomially with
/// `target`; one random coordinate always comes from the mutant.
#[allow(clippy::too_many_arguments)]
pub fn de_trial<R: Rng + ?Sized>(
    target: &[f64],
    base: &[f64],
    a: &[f64],
    b: &[f64],
    f: f64,
    cr: f64,
    rng: &mut R,
    bounds: &ProblemSpec,
) -> Vec<f64> {
    let n = target.len();
    let forced = rng.gen_range(0..n);
    let mut trial = target.to_vec();
    for j in 0..n {
        let take = j == forced || rng.gen::<f64>() < cr;
        if take {
            trial[j] = base[j] + f * (a[j] - b[j]);
        }
    }
    bounds.clip(&mut trial);
    trial
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn unit(n: usize) -> ProblemSpec {
        ProblemSpec::new(1, 0, vec![0.0; n], vec![1.0; n]).unwrap()
    }

    #[test]
    fn sbx_half_draw_copies_parents() {
        assert_eq!(sbx_beta(0.5, 15.0), 1.0);
        assert_eq!(sbx_pair(0.2, 0.7, 0.5, 15.0), (0.2, 0.7));
    }

    #[test]
    fn sbx_identical_parents() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = vec![0.3, 0.6, 0.9];
        let (a, b) = sbx_crossover(&p, &p, 15.0, &mut rng, &unit(3));
        assert_eq!(a, p);
        assert_eq!(b, p);
    }

    #[test]
    fn sbx_clips_to_upper() {
        // u close to 1 spreads far beyond the parents.
        let (c1, c2) = sbx_pair(0.9, 1.0, 0.999_999, 1.0);
        assert!(c2 > 1.0 || c1 > 1.0);
        let spec = unit(1);
        let mut child = vec![c1.max(c2)];
        spec.clip(&mut child);
        assert_eq!(child[0], 1.0);
    }

    #[test]
    fn mutation_half_draw_is_identity() {
        assert_eq!(mutation_delta(0.5, 20.0), 0.0);
        assert!(mutation_delta(0.0, 20.0) == -1.0);
    }

    #[test]
    fn mutation_zero_probability() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = vec![0.1, 0.2, 0.3];
        assert_eq!(polynomial_mutation(&x, 20.0, 0.0, &mut rng, &unit(3)), x);
    }

    #[test]
    fn mutation_clipped_at_lower_bound() {
        let spec = unit(1);
        let mut y = vec![0.0 + mutation_delta(0.01, 20.0)];
        assert!(y[0] < 0.0);
        spec.clip(&mut y);
        assert_eq!(y[0], 0.0);
    }

    #[test]
    fn de_degenerate_one_dimensional() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = de_trial(&[0.1], &[0.7], &[0.2], &[0.9], 0.0, 0.0, &mut rng, &unit(1));
        assert_eq!(t, vec![0.7]);
    }

    #[test]
    fn de_full_crossover_zero_weight_is_base() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let base = [0.7, 0.1, 0.4];
        let t = de_trial(&[0.1; 3], &base, &[0.2; 3], &[0.9; 3], 0.0, 1.0, &mut rng, &unit(3));
        assert_eq!(t, base.to_vec());
    }
}
