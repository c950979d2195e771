//! Probability mass estimate over the symbol alphabet.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Non-negative entries summing to 1 (±1e-9). Produced by the softmax
/// head and by window averaging; consumed by hard-decision argmax or by
/// downstream soft-decision processing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pmf(Vec<f64>);

impl Pmf {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidPmf("empty".into()));
        }
        if values.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidPmf(format!("negative or non-finite entry in {values:?}")));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidPmf(format!("sum {sum} != 1")));
        }
        Ok(Pmf(values))
    }

    /// Degenerate one-hot mass on `index`.
    pub fn one_hot(m: usize, index: usize) -> Self {
        assert!(index < m);
        let mut v = vec![0.0; m];
        v[index] = 1.0;
        Pmf(v)
    }

    pub fn uniform(m: usize) -> Self {
        assert!(m > 0);
        Pmf(vec![1.0 / m as f64; m])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    /// Index of the largest mass; ties resolve to the smallest index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &v) in self.0.iter().enumerate().skip(1) {
            if v > self.0[best] {
                best = i;
            }
        }
        best
    }
}

impl std::ops::Index<usize> for Pmf {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}
