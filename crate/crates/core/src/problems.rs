//! Benchmark problems with known optima or Pareto fronts.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algorithms::refdirs::das_dennis;
use crate::base::problem::{Problem, ProblemSpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchmarkName {
    Sphere,
    Rastrigin,
    Zdt1,
    Zdt2,
    Zdt3,
    Dtlz2,
    Bnh,
}

impl BenchmarkName {
    pub const ALL: [BenchmarkName; 7] = [
        BenchmarkName::Sphere,
        BenchmarkName::Rastrigin,
        BenchmarkName::Zdt1,
        BenchmarkName::Zdt2,
        BenchmarkName::Zdt3,
        BenchmarkName::Dtlz2,
        BenchmarkName::Bnh,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BenchmarkName::Sphere => "sphere",
            BenchmarkName::Rastrigin => "rastrigin",
            BenchmarkName::Zdt1 => "zdt1",
            BenchmarkName::Zdt2 => "zdt2",
            BenchmarkName::Zdt3 => "zdt3",
            BenchmarkName::Dtlz2 => "dtlz2",
            BenchmarkName::Bnh => "bnh",
        }
    }

    pub fn default_n_obj(self) -> usize {
        match self {
            BenchmarkName::Sphere | BenchmarkName::Rastrigin => 1,
            BenchmarkName::Dtlz2 => 3,
            _ => 2,
        }
    }

    pub fn default_n_var(self, n_obj: usize) -> usize {
        match self {
            BenchmarkName::Sphere | BenchmarkName::Rastrigin => 10,
            BenchmarkName::Zdt1 | BenchmarkName::Zdt2 | BenchmarkName::Zdt3 => 30,
            BenchmarkName::Dtlz2 => n_obj + 9,
            BenchmarkName::Bnh => 2,
        }
    }
}

impl fmt::Display for BenchmarkName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BenchmarkName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BenchmarkName::ALL
            .into_iter()
            .find(|b| b.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown problem `{s}`")))
    }
}

/// A fully parameterized benchmark instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Benchmark {
    name: BenchmarkName,
    spec: ProblemSpec,
}

impl Benchmark {
    /// Builds a benchmark; `None` picks the literature-standard size.
    pub fn new(name: BenchmarkName, n_var: Option<usize>, n_obj: Option<usize>) -> Result<Self> {
        let n_obj = match (name, n_obj) {
            (BenchmarkName::Dtlz2, Some(m)) if m >= 2 => m,
            (BenchmarkName::Dtlz2, Some(m)) => {
                return Err(Error::InvalidProblem(format!("dtlz2 needs n_obj >= 2, got {m}")))
            }
            (_, Some(m)) if m != name.default_n_obj() => {
                return Err(Error::InvalidProblem(format!(
                    "{name} has exactly {} objectives",
                    name.default_n_obj()
                )))
            }
            _ => name.default_n_obj(),
        };
        let n_var = n_var.unwrap_or_else(|| name.default_n_var(n_obj));
        let (lower, upper, n_constr) = match name {
            BenchmarkName::Sphere | BenchmarkName::Rastrigin => {
                if n_var == 0 {
                    return Err(Error::InvalidProblem("n_var must be positive".into()));
                }
                (vec![-5.12; n_var], vec![5.12; n_var], 0)
            }
            BenchmarkName::Zdt1 | BenchmarkName::Zdt2 | BenchmarkName::Zdt3 => {
                if n_var < 2 {
                    return Err(Error::InvalidProblem(format!("{name} needs n_var >= 2")));
                }
                (vec![0.0; n_var], vec![1.0; n_var], 0)
            }
            BenchmarkName::Dtlz2 => {
                if n_var < n_obj {
                    return Err(Error::InvalidProblem("dtlz2 needs n_var >= n_obj".into()));
                }
                (vec![0.0; n_var], vec![1.0; n_var], 0)
            }
            BenchmarkName::Bnh => {
                if n_var != 2 {
                    return Err(Error::InvalidProblem("bnh is fixed at n_var = 2".into()));
                }
                (vec![0.0, 0.0], vec![5.0, 3.0], 2)
            }
        };
        let spec = ProblemSpec::new(n_obj, n_constr, lower, upper)?;
        Ok(Benchmark { name, spec })
    }

    pub fn by_name(name: &str) -> Result<Self> {
        Benchmark::new(name.parse()?, None, None)
    }

    pub fn id(&self) -> BenchmarkName {
        self.name
    }

    /// Evaluates the closed-form objectives and constraints.
    pub fn evaluate_unchecked(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        match self.name {
            BenchmarkName::Sphere => (vec![x.iter().map(|v| v * v).sum()], vec![]),
            BenchmarkName::Rastrigin => {
                let a = 10.0;
                let s: f64 = x.iter().map(|v| v * v - a * (2.0 * PI * v).cos()).sum();
                (vec![a * x.len() as f64 + s], vec![])
            }
            BenchmarkName::Zdt1 | BenchmarkName::Zdt2 | BenchmarkName::Zdt3 => {
                let f1 = x[0];
                let tail: f64 = x[1..].iter().sum();
                let g = 1.0 + 9.0 * tail / (x.len() - 1) as f64;
                let r = f1 / g;
                let h = match self.name {
                    BenchmarkName::Zdt1 => 1.0 - r.sqrt(),
                    BenchmarkName::Zdt2 => 1.0 - r * r,
                    _ => 1.0 - r.sqrt() - r * (10.0 * PI * f1).sin(),
                };
                (vec![f1, g * h], vec![])
            }
            BenchmarkName::Dtlz2 => (dtlz2(x, self.spec.n_obj), vec![]),
            BenchmarkName::Bnh => {
                let (a, b) = (x[0], x[1]);
                let f1 = 4.0 * a * a + 4.0 * b * b;
                let f2 = (a - 5.0).powi(2) + (b - 5.0).powi(2);
                let g1 = (a - 5.0).powi(2) + b * b - 25.0;
                let g2 = 7.7 - (a - 8.0).powi(2) - (b + 3.0).powi(2);
                (vec![f1, f2], vec![g1, g2])
            }
        }
    }

    /// `n_points` samples of the true Pareto front.
    pub fn reference_front(&self, n_points: usize) -> Result<Vec<Vec<f64>>> {
        reference_front(self.name, self.spec.n_obj, n_points)
    }

    /// Nadir of the reference front scaled by 1.1; `None` for single-objective problems.
    pub fn default_ref_point(&self) -> Option<Vec<f64>> {
        match self.name {
            BenchmarkName::Sphere | BenchmarkName::Rastrigin => None,
            // Nadir of the known BNH front is (136, 50).
            BenchmarkName::Bnh => Some(vec![136.0 * 1.1, 50.0 * 1.1]),
            // The unit sphere octant has nadir (1, ..., 1).
            BenchmarkName::Dtlz2 => Some(vec![1.1; self.spec.n_obj]),
            _ => {
                let front = self.reference_front(1000).ok()?;
                let mut nadir = vec![f64::NEG_INFINITY; self.spec.n_obj];
                for p in &front {
                    for (n, v) in nadir.iter_mut().zip(p) {
                        *n = n.max(*v);
                    }
                }
                Some(nadir.into_iter().map(|v| v * 1.1).collect())
            }
        }
    }
}

impl Problem for Benchmark {
    fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    fn evaluate(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        self.spec.check_bounds(x)?;
        Ok(self.evaluate_unchecked(x))
    }

    fn name(&self) -> String {
        self.name.to_string()
    }
}

fn dtlz2(x: &[f64], m: usize) -> Vec<f64> {
    let g: f64 = x[m - 1..].iter().map(|v| (v - 0.5).powi(2)).sum();
    let half_pi = PI / 2.0;
    (0..m)
        .map(|i| {
            let mut f = 1.0 + g;
            for v in &x[..m - 1 - i] {
                f *= (v * half_pi).cos();
            }
            if i > 0 {
                f *= (x[m - 1 - i] * half_pi).sin();
            }
            f
        })
        .collect()
}

fn linspace(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| i as f64 / (n - 1) as f64)
}

fn pick_evenly<T: Clone>(items: &[T], n: usize) -> Vec<T> {
    if items.len() <= n {
        return items.to_vec();
    }
    (0..n)
        .map(|i| {
            let idx = (i as f64 * (items.len() - 1) as f64 / (n - 1) as f64).round() as usize;
            items[idx].clone()
        })
        .collect()
}

/// Samples of the analytic Pareto front of `name`.
pub fn reference_front(name: BenchmarkName, n_obj: usize, n_points: usize) -> Result<Vec<Vec<f64>>> {
    if n_points < 2 {
        return Err(Error::InvalidConfig("reference front needs n_points >= 2".into()));
    }
    match name {
        BenchmarkName::Zdt1 => Ok(linspace(n_points).map(|f| vec![f, 1.0 - f.sqrt()]).collect()),
        BenchmarkName::Zdt2 => Ok(linspace(n_points).map(|f| vec![f, 1.0 - f * f]).collect()),
        BenchmarkName::Zdt3 => {
            let dense = (n_points * 50).max(20_000);
            let mut kept: Vec<Vec<f64>> = Vec::new();
            let mut best = f64::INFINITY;
            // f1 ascending, so a point is non-dominated iff its f2 beats all before it.
            for f1 in linspace(dense) {
                let f2 = 1.0 - f1.sqrt() - f1 * (10.0 * PI * f1).sin();
                if f2 < best {
                    best = f2;
                    kept.push(vec![f1, f2]);
                }
            }
            Ok(pick_evenly(&kept, n_points))
        }
        BenchmarkName::Dtlz2 if n_obj == 2 => Ok(linspace(n_points)
            .map(|t| {
                let a = t * PI / 2.0;
                vec![a.cos(), a.sin()]
            })
            .collect()),
        BenchmarkName::Dtlz2 => {
            let mut p = 1;
            while binomial(p + n_obj - 1, n_obj - 1) < n_points {
                p += 1;
            }
            let dirs: Vec<Vec<f64>> = das_dennis(n_obj, p)
                .directions()
                .iter()
                .map(|d| {
                    let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
                    d.iter().map(|v| v / norm).collect()
                })
                .collect();
            Ok(pick_evenly(&dirs, n_points))
        }
        other => Err(Error::UnknownFront(other.to_string())),
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}
