use std::collections::HashMap;

use crate::base::problem::{Evaluation, Provenance, Solution};
use crate::error::{Error, Result};

/// Every expensively evaluated solution of a run, in evaluation order.
///
/// Design vectors are unique under exact componentwise equality; a request
/// for an archived design is answered from the archive for free.
#[derive(Debug, Clone, Default)]
pub struct Archive {
    entries: Vec<Solution>,
    index: HashMap<Vec<u64>, usize>,
    reused: usize,
}

fn key(x: &[f64]) -> Vec<u64> {
    // -0.0 == 0.0 must hash identically.
    x.iter()
        .map(|&v| if v == 0.0 { 0 } else { v.to_bits() })
        .collect()
}

impl Archive {
    pub fn new() -> Self {
        Archive::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Solution] {
        &self.entries
    }

    /// How many requests were answered from the archive instead of an ESE.
    pub fn reused(&self) -> usize {
        self.reused
    }

    pub fn lookup(&self, x: &[f64]) -> Option<&Solution> {
        self.index.get(&key(x)).map(|&i| &self.entries[i])
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.index.contains_key(&key(x))
    }

    pub(crate) fn note_reuse(&mut self) {
        self.reused += 1;
    }

    pub(crate) fn insert(&mut self, solution: Solution) -> Result<()> {
        match &solution.eval {
            Some(Evaluation {
                provenance: Provenance::Expensive,
                ..
            }) => {}
            _ => {
                return Err(Error::InvalidProblem(
                    "archive accepts only expensively evaluated solutions".into(),
                ))
            }
        }
        let k = key(&solution.x);
        if self.index.contains_key(&k) {
            return Err(Error::InvalidProblem("duplicate design in archive".into()));
        }
        self.index.insert(k, self.entries.len());
        self.entries.push(solution);
        Ok(())
    }

    /// Design matrix (rows) and per-output targets (objectives then constraints).
    pub fn training_data(&self) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let xs: Vec<Vec<f64>> = self.entries.iter().map(|s| s.x.clone()).collect();
        let n_out = self
            .entries
            .first()
            .and_then(|s| s.eval.as_ref())
            .map(|e| e.f.len() + e.g.len())
            .unwrap_or(0);
        let mut ys = vec![Vec::with_capacity(self.entries.len()); n_out];
        for s in &self.entries {
            let e = s.eval.as_ref().expect("archive entries are evaluated");
            for (j, v) in e.f.iter().chain(&e.g).enumerate() {
                ys[j].push(*v);
            }
        }
        (xs, ys)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sol(id: u64, x: Vec<f64>) -> Solution {
        Solution {
            id,
            x,
            eval: Some(Evaluation::expensive(vec![1.0], vec![])),
        }
    }

    #[test]
    fn negative_zero_is_a_duplicate() {
        let mut a = Archive::new();
        a.insert(sol(0, vec![0.0, 1.0])).unwrap();
        assert!(a.contains(&[-0.0, 1.0]));
        assert!(a.insert(sol(1, vec![-0.0, 1.0])).is_err());
    }

    #[test]
    fn rejects_approximate() {
        let mut a = Archive::new();
        let s = Solution {
            id: 0,
            x: vec![0.0],
            eval: Some(Evaluation::approximate(vec![1.0], vec![])),
        };
        assert!(a.insert(s).is_err());
        assert!(a.is_empty());
    }

    #[test]
    fn training_data_columns() {
        let mut a = Archive::new();
        for i in 0..3 {
            a.insert(Solution {
                id: i,
                x: vec![i as f64],
                eval: Some(Evaluation::expensive(vec![i as f64, 10.0], vec![-1.0])),
            })
            .unwrap();
        }
        let (xs, ys) = a.training_data();
        assert_eq!(xs.len(), 3);
        assert_eq!(ys.len(), 3);
        assert_eq!(ys[0], vec![0.0, 1.0, 2.0]);
        assert_eq!(ys[2], vec![-1.0; 3]);
    }
}
