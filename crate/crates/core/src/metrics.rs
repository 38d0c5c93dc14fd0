//! Pareto-front quality indicators.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Samples used by the Monte Carlo hypervolume for three or more objectives.
pub const MC_SAMPLES: usize = 100_000;
const MC_SEED: u64 = 0x5eed_4a11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndicatorName {
    #[serde(alias = "hv")]
    Hypervolume,
    Igd,
    #[serde(alias = "igd+")]
    IgdPlus,
}

impl IndicatorName {
    pub fn as_str(self) -> &'static str {
        match self {
            IndicatorName::Hypervolume => "hv",
            IndicatorName::Igd => "igd",
            IndicatorName::IgdPlus => "igd_plus",
        }
    }

    pub fn higher_is_better(self) -> bool {
        self == IndicatorName::Hypervolume
    }
}

impl FromStr for IndicatorName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hv" | "hypervolume" => Ok(IndicatorName::Hypervolume),
            "igd" => Ok(IndicatorName::Igd),
            "igd_plus" | "igd+" => Ok(IndicatorName::IgdPlus),
            _ => Err(Error::InvalidConfig(format!("unknown indicator `{s}`"))),
        }
    }
}

impl fmt::Display for IndicatorName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndicatorResult {
    pub name: IndicatorName,
    pub value: f64,
    pub at_ese: usize,
}

fn check_dims(points: &[Vec<f64>], m: usize) -> Result<()> {
    match points.iter().find(|p| p.len() != m) {
        Some(p) => Err(Error::DimensionMismatch {
            expected: m,
            actual: p.len(),
        }),
        None => Ok(()),
    }
}

/// Points strictly better than the reference in every objective.
fn inside(points: &[Vec<f64>], reference: &[f64]) -> Vec<Vec<f64>> {
    points
        .iter()
        .filter(|p| p.iter().zip(reference).all(|(a, r)| a < r))
        .cloned()
        .collect()
}

/// Dominated hypervolume (minimization). Exact for two objectives, Monte
/// Carlo with a fixed seed otherwise.
pub fn hypervolume(points: &[Vec<f64>], reference: &[f64]) -> Result<f64> {
    check_dims(points, reference.len())?;
    match reference.len() {
        1 => Ok(inside(points, reference)
            .iter()
            .map(|p| reference[0] - p[0])
            .fold(0.0, f64::max)),
        2 => Ok(hypervolume_2d(points, reference)),
        _ => Ok(hypervolume_monte_carlo(points, reference, MC_SAMPLES, MC_SEED)),
    }
}

/// Sort-and-sweep area of the union of boxes `[p, reference]`.
pub fn hypervolume_2d(points: &[Vec<f64>], reference: &[f64]) -> f64 {
    let mut pts = inside(points, reference);
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut stairs: Vec<(f64, f64)> = Vec::new();
    let mut best = reference[1];
    for p in &pts {
        if p[1] < best {
            best = p[1];
            stairs.push((p[0], p[1]));
        }
    }
    let mut area = 0.0;
    for (i, &(x, y)) in stairs.iter().enumerate() {
        let next_x = stairs.get(i + 1).map_or(reference[0], |s| s.0);
        area += (next_x - x) * (reference[1] - y);
    }
    area
}

/// Monte Carlo hypervolume over the box spanned by the points' ideal and
/// the reference point.
pub fn hypervolume_monte_carlo(
    points: &[Vec<f64>],
    reference: &[f64],
    samples: usize,
    seed: u64,
) -> f64 {
    let pts = inside(points, reference);
    if pts.is_empty() || samples == 0 {
        return 0.0;
    }
    let m = reference.len();
    let mut lo = reference.to_vec();
    for p in &pts {
        for (l, v) in lo.iter_mut().zip(p) {
            *l = l.min(*v);
        }
    }
    let volume: f64 = lo.iter().zip(reference).map(|(l, r)| r - l).product();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sample = vec![0.0; m];
    let mut hits = 0usize;
    for _ in 0..samples {
        for ((s, l), r) in sample.iter_mut().zip(&lo).zip(reference) {
            *s = l + rng.gen::<f64>() * (r - l);
        }
        if pts.iter().any(|p| p.iter().zip(&sample).all(|(a, s)| a <= s)) {
            hits += 1;
        }
    }
    volume * hits as f64 / samples as f64
}

fn mean_nearest(
    reference_set: &[Vec<f64>],
    approximation: &[Vec<f64>],
    dist: impl Fn(&[f64], &[f64]) -> f64,
) -> Result<f64> {
    if reference_set.is_empty() || approximation.is_empty() {
        return Err(Error::EmptySet);
    }
    let m = reference_set[0].len();
    check_dims(reference_set, m)?;
    check_dims(approximation, m)?;
    let total: f64 = reference_set
        .iter()
        .map(|r| {
            approximation
                .iter()
                .map(|a| dist(a, r))
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    Ok(total / reference_set.len() as f64)
}

/// Mean Euclidean distance from each reference point to its nearest
/// approximation point.
pub fn igd(reference_set: &[Vec<f64>], approximation: &[Vec<f64>]) -> Result<f64> {
    mean_nearest(reference_set, approximation, |a, r| {
        a.iter().zip(r).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
    })
}

/// IGD with the one-sided distance `max(a_i - r_i, 0)`.
pub fn igd_plus(reference_set: &[Vec<f64>], approximation: &[Vec<f64>]) -> Result<f64> {
    mean_nearest(reference_set, approximation, |a, r| {
        a.iter()
            .zip(r)
            .map(|(x, y)| (x - y).max(0.0).powi(2))
            .sum::<f64>()
            .sqrt()
    })
}
