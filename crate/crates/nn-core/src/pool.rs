//! 1-D max pooling. Output length is `floor(len / pool)`; a trailing
//! remainder shorter than the pool width is dropped.

use serde::{Deserialize, Serialize};

use crate::tensor::Tensor;
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MaxPool1d {
    pub pool: usize,
}

#[derive(Debug)]
pub struct PoolCache {
    /// Flat input index of each output's max, per step.
    argmax: Vec<Vec<usize>>,
    in_shapes: Vec<Vec<usize>>,
}

impl MaxPool1d {
    pub fn new(pool: usize) -> Self {
        assert!(pool >= 1);
        MaxPool1d { pool }
    }

    pub fn out_len(&self, len: usize) -> usize {
        len / self.pool
    }

    fn forward_step_cached(&self, x: &Tensor) -> Result<(Tensor, Vec<usize>)> {
        if x.rank() != 3 {
            return Err(Error::ShapeMismatch {
                context: "max_pool1d forward",
                expected: vec![0, 0, 0],
                got: x.shape().to_vec(),
            });
        }
        let (n, c, len) = (x.shape()[0], x.shape()[1], x.shape()[2]);
        let o_len = self.out_len(len);
        if o_len == 0 {
            // Legal per contract, but a rank-3 tensor cannot carry a zero
            // extent; surface it as a shape error at the layer level.
            return Err(Error::ShapeMismatch {
                context: "max_pool1d output would be empty",
                expected: vec![n, c, self.pool],
                got: x.shape().to_vec(),
            });
        }
        let mut y = Tensor::zeros(&[n, c, o_len]);
        let mut argmax = vec![0usize; n * c * o_len];
        let xd = x.data();
        for b in 0..n {
            for ch in 0..c {
                let base = (b * c + ch) * len;
                let y_base = (b * c + ch) * o_len;
                for j in 0..o_len {
                    let mut best = base + j * self.pool;
                    for t in 1..self.pool {
                        let idx = base + j * self.pool + t;
                        if xd[idx] > xd[best] {
                            best = idx;
                        }
                    }
                    y.data_mut()[y_base + j] = xd[best];
                    argmax[y_base + j] = best;
                }
            }
        }
        Ok((y, argmax))
    }

    pub fn forward_step(&self, x: &Tensor) -> Result<Tensor> {
        Ok(self.forward_step_cached(x)?.0)
    }

    pub fn forward(&self, xs: &[Tensor]) -> Result<Vec<Tensor>> {
        xs.iter().map(|x| self.forward_step(x)).collect()
    }

    pub fn forward_train(&self, xs: &[Tensor]) -> Result<(Vec<Tensor>, PoolCache)> {
        let mut ys = Vec::with_capacity(xs.len());
        let mut argmax = Vec::with_capacity(xs.len());
        let mut in_shapes = Vec::with_capacity(xs.len());
        for x in xs {
            let (y, a) = self.forward_step_cached(x)?;
            ys.push(y);
            argmax.push(a);
            in_shapes.push(x.shape().to_vec());
        }
        Ok((ys, PoolCache { argmax, in_shapes }))
    }

    pub fn backward(&self, cache: &PoolCache, grad_out: &[Tensor]) -> Vec<Tensor> {
        grad_out
            .iter()
            .zip(&cache.argmax)
            .zip(&cache.in_shapes)
            .map(|((dy, amax), shape)| {
                let mut dx = Tensor::zeros(shape);
                for (g, &idx) in dy.data().iter().zip(amax) {
                    dx.data_mut()[idx] += g;
                }
                dx
            })
            .collect()
    }
}

/// Pool a single rank-1 signal; an input shorter than the pool width
/// yields an empty vector.
pub fn max_pool1d(x: &Tensor, pool: usize) -> Result<Vec<f64>> {
    if x.rank() != 1 {
        return Err(Error::ShapeMismatch {
            context: "max_pool1d",
            expected: vec![0],
            got: x.shape().to_vec(),
        });
    }
    assert!(pool >= 1, "pool width must be positive");
    let o_len = x.len() / pool;
    Ok((0..o_len)
        .map(|j| {
            x.data()[j * pool..(j + 1) * pool]
                .iter()
                .cloned()
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn picks_window_maxima() {
        let y = max_pool1d(&Tensor::vector(&[1., 3., 2., 5.]), 2).unwrap();
        assert_eq!(y, vec![3., 5.]);
    }

    #[test]
    fn short_input_yields_empty() {
        let y = max_pool1d(&Tensor::vector(&[7.]), 2).unwrap();
        assert!(y.is_empty());
    }

    #[test]
    fn constant_stays_constant_with_floor_length() {
        let y = max_pool1d(&Tensor::vector(&[4.0; 9]), 2).unwrap();
        assert_eq!(y, vec![4.0; 4]);
    }

    #[test]
    fn remainder_is_dropped() {
        let y = max_pool1d(&Tensor::vector(&[1., 2., 3., 4., 9.]), 2).unwrap();
        assert_eq!(y, vec![2., 4.]);
    }
}
