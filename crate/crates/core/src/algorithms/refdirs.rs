use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Structured reference directions on the unit simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceDirections {
    directions: Vec<Vec<f64>>,
}

impl ReferenceDirections {
    /// Validates that every direction is non-negative and sums to one.
    pub fn new(directions: Vec<Vec<f64>>) -> Result<Self> {
        let m = directions.first().map(Vec::len).ok_or(Error::EmptySet)?;
        for d in &directions {
            if d.len() != m {
                return Err(Error::LengthMismatch {
                    expected: m,
                    actual: d.len(),
                });
            }
            let sum: f64 = d.iter().sum();
            if d.iter().any(|&v| v < 0.0) || (sum - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidConfig(format!(
                    "reference direction {d:?} is not on the unit simplex"
                )));
            }
        }
        Ok(ReferenceDirections { directions })
    }

    pub fn directions(&self) -> &[Vec<f64>] {
        &self.directions
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn n_obj(&self) -> usize {
        self.directions[0].len()
    }
}

/// Das-Dennis simplex-lattice directions with `p` partitions in `m` objectives.
///
/// Yields all vectors with components in {0, 1/p, ..., 1} summing to one;
/// there are C(p + m - 1, m - 1) of them.
pub fn das_dennis(m: usize, p: usize) -> ReferenceDirections {
    assert!(m >= 1 && p >= 1, "das_dennis needs m >= 1 and p >= 1");
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(m);
    fill(m, p, p, &mut current, &mut out);
    ReferenceDirections { directions: out }
}

fn fill(m: usize, p: usize, left: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
    if current.len() == m - 1 {
        current.push(left);
        out.push(current.iter().map(|&k| k as f64 / p as f64).collect());
        current.pop();
        return;
    }
    for k in (0..=left).rev() {
        current.push(k);
        fill(m, p, left - k, current, out);
        current.pop();
    }
}

/// Largest partition count whose lattice has at most `max_points` directions.
pub fn partitions_for(m: usize, max_points: usize) -> usize {
    let mut p = 1;
    while crate::problems::binomial(p + 1 + m - 1, m - 1) <= max_points {
        p += 1;
    }
    p
}
