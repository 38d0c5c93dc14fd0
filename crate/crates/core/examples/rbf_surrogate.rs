//! Fitting RBF surrogates: a single configuration, then cross-validated
//! selection among the default candidates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use samoo::surrogates::{fit, select_model, Kernel, RbfConfig, Tail};

fn target(x: &[f64]) -> f64 {
    (3.0 * x[0]).sin() + x[1] * x[1]
}

fn main() -> samoo::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let xs: Vec<Vec<f64>> = (0..40).map(|_| vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]).collect();
    let ys: Vec<f64> = xs.iter().map(|x| target(x)).collect();

    let cubic = fit(&xs, &ys, &RbfConfig::new(Kernel::Cubic, Tail::Linear, 0.0))?;
    let (train_pred, _) = cubic.predict(&xs)?;
    let worst = train_pred.iter().zip(&ys).map(|(p, y)| (p - y).abs()).fold(0.0, f64::max);
    println!("cubic+linear: max training residual {worst:.2e}");

    let sel = select_model(&xs, &ys, &RbfConfig::default_candidates(), 7)?;
    println!("selected {}+{} with CV RMSE {:.4}", sel.config.kernel.as_str(), sel.config.tail.as_str(), sel.cv_error);

    let probes = vec![vec![0.0, 0.0], vec![0.5, -0.5], vec![0.9, 0.9], vec![3.0, 3.0]];
    let (mean, unc) = sel.model.predict(&probes)?;
    for ((p, m), u) in probes.iter().zip(mean).zip(unc) {
        println!("x={p:?} pred={m:+.4} true={:+.4} uncertainty={u:.4}", target(p));
    }
    Ok(())
}
