use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Expensive-evaluation accounting for one run.
///
/// Only expensive solution evaluations (ESEs) count against `ese_max`.
/// Approximate evaluations (ASEs) are tallied for reporting but never
/// constrain anything.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    ese_max: usize,
    ese_used: usize,
    ase_used: usize,
}

impl Budget {
    pub fn new(ese_max: usize) -> Result<Self> {
        if ese_max == 0 {
            return Err(Error::InvalidConfig("ese_max must be positive".into()));
        }
        Ok(Budget {
            ese_max,
            ese_used: 0,
            ase_used: 0,
        })
    }

    pub fn ese_max(&self) -> usize {
        self.ese_max
    }

    pub fn ese_used(&self) -> usize {
        self.ese_used
    }

    pub fn ase_used(&self) -> usize {
        self.ase_used
    }

    pub fn remaining(&self) -> usize {
        self.ese_max - self.ese_used
    }

    pub fn is_exhausted(&self) -> bool {
        self.ese_used >= self.ese_max
    }

    pub(crate) fn consume_expensive(&mut self) -> Result<()> {
        if self.is_exhausted() {
            return Err(Error::BudgetExhausted {
                used: self.ese_used,
                max: self.ese_max,
            });
        }
        self.ese_used += 1;
        Ok(())
    }

    pub(crate) fn record_approximate(&mut self, n: usize) {
        self.ase_used += n;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_budget_rejected() {
        assert!(Budget::new(0).is_err());
    }

    #[test]
    fn consume_until_exhausted() {
        let mut b = Budget::new(2).unwrap();
        b.consume_expensive().unwrap();
        b.consume_expensive().unwrap();
        assert!(b.is_exhausted());
        assert!(matches!(
            b.consume_expensive(),
            Err(Error::BudgetExhausted { used: 2, max: 2 })
        ));
        assert_eq!(b.ese_used(), 2);
    }

    #[test]
    fn approximate_never_blocks() {
        let mut b = Budget::new(1).unwrap();
        b.consume_expensive().unwrap();
        b.record_approximate(1_000_000);
        assert_eq!(b.ase_used(), 1_000_000);
        assert_eq!(b.remaining(), 0);
    }
}
