//! Radial basis function interpolation with an optional polynomial tail.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    Cubic,
    Gaussian,
    ThinPlateSpline,
}

impl Kernel {
    pub const ALL: [Kernel; 3] = [Kernel::Cubic, Kernel::Gaussian, Kernel::ThinPlateSpline];

    pub fn as_str(self) -> &'static str {
        match self {
            Kernel::Cubic => "cubic",
            Kernel::Gaussian => "gaussian",
            Kernel::ThinPlateSpline => "thin_plate_spline",
        }
    }

    #[inline]
    fn phi(self, r: f64, shape: f64) -> f64 {
        match self {
            Kernel::Cubic => r * r * r,
            Kernel::Gaussian => {
                let s = r / shape;
                (-s * s).exp()
            }
            Kernel::ThinPlateSpline => {
                if r > 0.0 {
                    r * r * r.ln()
                } else {
                    0.0
                }
            }
        }
    }
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cubic" => Ok(Kernel::Cubic),
            "gaussian" => Ok(Kernel::Gaussian),
            "thin_plate_spline" | "tps" => Ok(Kernel::ThinPlateSpline),
            _ => Err(Error::InvalidConfig(format!("unknown kernel `{s}`"))),
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    None,
    Constant,
    Linear,
}

impl Tail {
    pub const ALL: [Tail; 3] = [Tail::None, Tail::Constant, Tail::Linear];

    pub fn as_str(self) -> &'static str {
        match self {
            Tail::None => "none",
            Tail::Constant => "constant",
            Tail::Linear => "linear",
        }
    }

    fn size(self, d: usize) -> usize {
        match self {
            Tail::None => 0,
            Tail::Constant => 1,
            Tail::Linear => d + 1,
        }
    }
}

impl FromStr for Tail {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(Tail::None),
            "constant" => Ok(Tail::Constant),
            "linear" => Ok(Tail::Linear),
            _ => Err(Error::InvalidConfig(format!("unknown tail `{s}`"))),
        }
    }
}

impl fmt::Display for Tail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RbfConfig {
    pub kernel: Kernel,
    pub tail: Tail,
    #[serde(default)]
    pub nugget: f64,
}

impl RbfConfig {
    pub fn new(kernel: Kernel, tail: Tail, nugget: f64) -> Self {
        RbfConfig {
            kernel,
            tail,
            nugget,
        }
    }

    /// Cubic and thin-plate kernels with a linear tail, and a Gaussian with
    /// a constant tail.
    pub fn default_candidates() -> Vec<RbfConfig> {
        vec![
            RbfConfig::new(Kernel::Cubic, Tail::Linear, 0.0),
            RbfConfig::new(Kernel::ThinPlateSpline, Tail::Linear, 0.0),
            RbfConfig::new(Kernel::Gaussian, Tail::Constant, 0.0),
        ]
    }
}

impl fmt::Display for RbfConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}", self.kernel, self.tail)?;
        if self.nugget > 0.0 {
            write!(f, " (nugget {})", self.nugget)?;
        }
        Ok(())
    }
}

/// Nuggets tried after the configured one fails.
const NUGGET_LADDER: [f64; 2] = [1e-8, 1e-4];

/// A fitted RBF model for one output. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Surrogate {
    pub config: RbfConfig,
    /// Nugget actually used after any escalation.
    pub nugget_used: f64,
    /// Gaussian width in normalized input units.
    pub shape: f64,
    pub weights: Vec<f64>,
    pub tail_coefficients: Vec<f64>,
    /// Training inputs mapped to the unit cube, row-major.
    pub training_inputs: Vec<Vec<f64>>,
    pub input_min: Vec<f64>,
    pub input_max: Vec<f64>,
    pub output_mean: f64,
    pub output_std: f64,
    /// Mean nearest-neighbour spacing of the normalized training inputs.
    pub spacing: f64,
    /// Cross-validated RMSE in output units; zero until set by model selection.
    pub cv_error: f64,
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Fits an RBF interpolant to `(x, y)`.
pub fn fit(x: &[Vec<f64>], y: &[f64], config: &RbfConfig) -> Result<Surrogate> {
    let n = x.len();
    if y.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: y.len(),
        });
    }
    if n < 2 {
        return Err(Error::DegenerateData("need at least two samples".into()));
    }
    let d = x[0].len();
    if d == 0 {
        return Err(Error::DegenerateData("zero-width design matrix".into()));
    }
    if let Some(row) = x.iter().find(|r| r.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            actual: row.len(),
        });
    }
    if y.iter().any(|v| !v.is_finite()) || x.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateData("non-finite training data".into()));
    }
    if !(config.nugget >= 0.0 && config.nugget.is_finite()) {
        return Err(Error::InvalidConfig("nugget must be non-negative".into()));
    }
    if x.iter().all(|r| r == &x[0]) {
        return Err(Error::DegenerateData("all training rows are identical".into()));
    }

    let mut input_min = vec![f64::INFINITY; d];
    let mut input_max = vec![f64::NEG_INFINITY; d];
    for row in x {
        for j in 0..d {
            input_min[j] = input_min[j].min(row[j]);
            input_max[j] = input_max[j].max(row[j]);
        }
    }
    let scale: Vec<f64> = input_min
        .iter()
        .zip(&input_max)
        .map(|(lo, hi)| if hi > lo { hi - lo } else { 1.0 })
        .collect();
    let z: Vec<Vec<f64>> = x
        .iter()
        .map(|r| {
            r.iter()
                .zip(&input_min)
                .zip(&scale)
                .map(|((v, lo), s)| (v - lo) / s)
                .collect()
        })
        .collect();

    let mean = y.iter().sum::<f64>() / n as f64;
    let var = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    let std = if var > 0.0 { var.sqrt() } else { 1.0 };
    let ys: Vec<f64> = y.iter().map(|v| (v - mean) / std).collect();

    let mut dist = DMatrix::<f64>::zeros(n, n);
    let mut nearest = vec![f64::INFINITY; n];
    let mut pairwise = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let r = distance(&z[i], &z[j]);
            dist[(i, j)] = r;
            dist[(j, i)] = r;
            nearest[i] = nearest[i].min(r);
            nearest[j] = nearest[j].min(r);
            pairwise.push(r);
        }
    }
    let spacing = nearest.iter().sum::<f64>() / n as f64;
    let shape = if config.kernel == Kernel::Gaussian {
        let mid = pairwise.len() / 2;
        let (_, median, _) = pairwise.select_nth_unstable_by(mid, f64::total_cmp);
        if *median > 0.0 {
            *median
        } else {
            1.0
        }
    } else {
        1.0
    };

    let q = config.tail.size(d);
    if n < q {
        // Too few points to determine the polynomial tail.
        return Err(Error::SingularSystem);
    }
    let size = n + q;
    let mut base = DMatrix::<f64>::zeros(size, size);
    for i in 0..n {
        for j in 0..n {
            base[(i, j)] = config.kernel.phi(dist[(i, j)], shape);
        }
        if q > 0 {
            base[(i, n)] = 1.0;
            base[(n, i)] = 1.0;
            if config.tail == Tail::Linear {
                for k in 0..d {
                    base[(i, n + 1 + k)] = z[i][k];
                    base[(n + 1 + k, i)] = z[i][k];
                }
            }
        }
    }
    let mut rhs = DVector::<f64>::zeros(size);
    for i in 0..n {
        rhs[i] = ys[i];
    }

    let nuggets = std::iter::once(config.nugget).chain(
        NUGGET_LADDER
            .iter()
            .copied()
            .filter(|&v| v > config.nugget),
    );
    for nugget in nuggets {
        let mut a = base.clone();
        for i in 0..n {
            a[(i, i)] += nugget;
        }
        if let Some(sol) = solve(&a, &rhs) {
            return Ok(Surrogate {
                config: *config,
                nugget_used: nugget,
                shape,
                weights: sol.rows(0, n).iter().copied().collect(),
                tail_coefficients: sol.rows(n, q).iter().copied().collect(),
                training_inputs: z,
                input_min,
                input_max,
                output_mean: mean,
                output_std: std,
                spacing,
                cv_error: 0.0,
            });
        }
    }
    Err(Error::SingularSystem)
}

const PROBE_RESIDUAL_TOL: f64 = 1e-8;
/// Loose on purpose: clustered points give badly conditioned weights while
/// the interpolant itself stays accurate.
const PROBE_FORWARD_TOL: f64 = 1e-7;

/// LU solve with one refinement step. The system is accepted only if a
/// probe right-hand side with known solution (all ones) is reproduced in
/// both residual and solution, which rejects numerically singular systems. The check depends on the design alone, so adding a
/// constant to the outputs never changes the nugget that gets used.
fn solve(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let lu = a.clone().lu();
    let refined = |rhs: &DVector<f64>| -> Option<DVector<f64>> {
        let mut x = lu.solve(rhs)?;
        let r = rhs - a * &x;
        if let Some(dx) = lu.solve(&r) {
            x += dx;
        }
        x.iter().all(|v| v.is_finite()).then_some(x)
    };
    let probe = a * DVector::<f64>::from_element(a.nrows(), 1.0);
    let p = refined(&probe)?;
    let residual = (&probe - a * &p).amax();
    let forward = p.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
    if residual > PROBE_RESIDUAL_TOL * probe.amax().max(1.0) || forward > PROBE_FORWARD_TOL {
        return None;
    }
    refined(b)
}

impl Surrogate {
    pub fn n_inputs(&self) -> usize {
        self.input_min.len()
    }

    fn normalize(&self, q: &[f64]) -> Vec<f64> {
        q.iter()
            .zip(&self.input_min)
            .zip(&self.input_max)
            .map(|((v, lo), hi)| {
                let s = if hi > lo { hi - lo } else { 1.0 };
                (v - lo) / s
            })
            .collect()
    }

    /// Mean prediction and distance to the nearest training input, both for
    /// a single query.
    fn predict_one(&self, q: &[f64]) -> (f64, f64) {
        let z = self.normalize(q);
        let mut s = 0.0;
        let mut d_min = f64::INFINITY;
        for (w, t) in self.weights.iter().zip(&self.training_inputs) {
            let r = distance(&z, t);
            d_min = d_min.min(r);
            s += w * self.config.kernel.phi(r, self.shape);
        }
        if let Some((c0, lin)) = self.tail_coefficients.split_first() {
            s += c0;
            s += lin.iter().zip(&z).map(|(c, v)| c * v).sum::<f64>();
        }
        (self.output_mean + self.output_std * s, d_min)
    }

    /// Distance-based uncertainty proxy, zero at training inputs and
    /// approaching `cv_error` far away from them.
    pub fn uncertainty_at(&self, d_min: f64) -> f64 {
        if self.spacing > 0.0 {
            self.cv_error * (1.0 - (-d_min / self.spacing).exp())
        } else {
            self.cv_error
        }
    }

    /// Predictions and uncertainties for each query row, in order.
    pub fn predict(&self, queries: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut mean = Vec::with_capacity(queries.len());
        let mut unc = Vec::with_capacity(queries.len());
        for q in queries {
            if q.len() != self.n_inputs() {
                return Err(Error::DimensionMismatch {
                    expected: self.n_inputs(),
                    actual: q.len(),
                });
            }
            let (m, d) = self.predict_one(q);
            mean.push(m);
            unc.push(self.uncertainty_at(d));
        }
        Ok((mean, unc))
    }
}
