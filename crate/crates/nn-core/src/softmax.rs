//! Softmax head and cross-entropy loss.

use crate::pmf::Pmf;
use crate::tensor::Tensor;
use crate::{Error, Result};

/// Clamp applied to estimates before taking logs.
pub const LOG_CLAMP: f64 = 1e-12;

/// Numerically stabilized softmax of a rank-1 tensor.
pub fn softmax(x: &Tensor) -> Result<Pmf> {
    if x.rank() != 1 {
        return Err(Error::ShapeMismatch {
            context: "softmax",
            expected: vec![0],
            got: x.shape().to_vec(),
        });
    }
    let mut out = x.data().to_vec();
    softmax_slice(&mut out);
    Pmf::new(out)
}

/// In-place stabilized softmax over one row.
pub(crate) fn softmax_slice(row: &mut [f64]) {
    let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in row.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in row.iter_mut() {
        *v /= sum;
    }
}

/// Row-wise softmax of a [n, m] batch.
pub fn softmax_rows(x: &Tensor) -> Result<Tensor> {
    if x.rank() != 2 {
        return Err(Error::ShapeMismatch {
            context: "softmax_rows",
            expected: vec![0, 0],
            got: x.shape().to_vec(),
        });
    }
    let mut y = x.clone();
    let m = x.shape()[1];
    for row in y.data_mut().chunks_mut(m) {
        softmax_slice(row);
    }
    debug_assert!(y.all_finite());
    Ok(y)
}

/// Cross-entropy −Σ p·log(q̂) with the estimate clamped at `LOG_CLAMP`
/// before the log, so a zero estimate never produces an infinite loss.
pub fn cross_entropy(p_true: &Pmf, p_est: &Pmf) -> f64 {
    cross_entropy_slices(p_true.values(), p_est.values())
}

pub(crate) fn cross_entropy_slices(p_true: &[f64], p_est: &[f64]) -> f64 {
    debug_assert_eq!(p_true.len(), p_est.len());
    -p_true
        .iter()
        .zip(p_est)
        .map(|(p, q)| {
            if *p == 0.0 {
                0.0
            } else {
                p * q.max(LOG_CLAMP).ln()
            }
        })
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn symmetric_pair_splits_evenly() {
        let p = softmax(&Tensor::vector(&[0.0, 0.0])).unwrap();
        assert_eq!(p.values(), &[0.5, 0.5]);
    }

    #[test]
    fn large_logit_does_not_overflow() {
        let p = softmax(&Tensor::vector(&[1000.0, 0.0])).unwrap();
        assert!(p[0] > 1.0 - 1e-12);
        assert!(p[1] < 1e-12);
        assert!(p.values().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn matches_direct_formula_oracle() {
        // Unstabilized exp/sum route.
        let x = [1.0f64, 2.0, 3.0];
        let exps: Vec<f64> = x.iter().map(|v| v.exp()).collect();
        let sum: f64 = exps.iter().sum();
        let p = softmax(&Tensor::vector(&x)).unwrap();
        for (got, e) in p.values().iter().zip(&exps) {
            assert!((got - e / sum).abs() < 1e-14);
        }
    }

    #[test]
    fn cross_entropy_analytic_cases() {
        let e0 = Pmf::one_hot(2, 0);
        let e1 = Pmf::one_hot(2, 1);
        assert_eq!(cross_entropy(&e0, &Pmf::new(vec![1.0, 0.0]).unwrap()), 0.0);
        let half = Pmf::new(vec![0.5, 0.5]).unwrap();
        assert!((cross_entropy(&e0, &half) - std::f64::consts::LN_2).abs() < 1e-15);
        let skew = Pmf::new(vec![0.9, 0.1]).unwrap();
        assert!((cross_entropy(&e1, &skew) - 2.302585092994046).abs() < 1e-12);
    }

    #[test]
    fn clamp_prevents_infinite_loss() {
        let e0 = Pmf::one_hot(2, 0);
        let zeroed = Pmf::new(vec![0.0, 1.0]).unwrap();
        let loss = cross_entropy(&e0, &zeroed);
        assert!(loss.is_finite());
        assert!((loss - (-(LOG_CLAMP.ln()))).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn softmax_is_a_valid_pmf(xs in proptest::collection::vec(-50.0f64..50.0, 1..12)) {
            let p = softmax(&Tensor::vector(&xs)).unwrap();
            let sum: f64 = p.values().iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
            prop_assert!(p.values().iter().all(|&v| v > 0.0));
        }

        #[test]
        fn cross_entropy_non_negative(
            idx in 0usize..4,
            xs in proptest::collection::vec(-20.0f64..20.0, 4),
        ) {
            let p_est = softmax(&Tensor::vector(&xs)).unwrap();
            let loss = cross_entropy(&Pmf::one_hot(4, idx), &p_est);
            prop_assert!(loss >= 0.0);
        }
    }
}
