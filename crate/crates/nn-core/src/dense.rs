//! Fully connected layer: `y = act(x·Wᵀ + b)` over a batch of rows.

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::activation::Activation;
use crate::init::glorot_uniform;
use crate::tensor::Tensor;
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Dense {
    /// Weight matrix, row-major [out, in].
    pub w: Tensor,
    /// Bias vector [out].
    pub b: Tensor,
    pub act: Activation,
}

#[derive(Debug)]
pub struct DenseCache {
    /// Input per step, [n, in].
    xs: Vec<Tensor>,
    /// Pre-activation per step, [n, out].
    zs: Vec<Tensor>,
}

impl Dense {
    pub fn new(in_dim: usize, out_dim: usize, act: Activation, seed: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        Dense {
            w: glorot_uniform(&mut rng, &[out_dim, in_dim], in_dim, out_dim),
            b: Tensor::zeros(&[out_dim]),
            act,
        }
    }

    pub fn in_dim(&self) -> usize {
        self.w.shape()[1]
    }

    pub fn out_dim(&self) -> usize {
        self.w.shape()[0]
    }

    fn check_input(&self, x: &Tensor) -> Result<()> {
        if x.rank() != 2 || x.shape()[1] != self.in_dim() {
            return Err(Error::ShapeMismatch {
                context: "dense forward",
                expected: vec![x.shape().first().copied().unwrap_or(1), self.in_dim()],
                got: x.shape().to_vec(),
            });
        }
        Ok(())
    }

    /// Forward one step batch [n, in] -> [n, out].
    pub fn forward_step(&self, x: &Tensor) -> Result<Tensor> {
        Ok(self.forward_step_cached(x)?.0)
    }

    fn forward_step_cached(&self, x: &Tensor) -> Result<(Tensor, Tensor)> {
        self.check_input(x)?;
        let n = x.shape()[0];
        let out = self.out_dim();
        let mut z: Array2<f64> = x.view2().dot(&self.w.view2().t());
        for mut row in z.rows_mut() {
            for (v, b) in row.iter_mut().zip(self.b.data()) {
                *v += b;
            }
        }
        let z = Tensor::from_vec(&[n, out], z.into_raw_vec_and_offset().0)?;
        let mut y = z.clone();
        self.act.apply_slice(y.data_mut());
        debug_assert!(y.all_finite());
        Ok((y, z))
    }

    pub fn forward(&self, xs: &[Tensor]) -> Result<Vec<Tensor>> {
        xs.iter().map(|x| self.forward_step(x)).collect()
    }

    pub fn forward_train(&self, xs: &[Tensor]) -> Result<(Vec<Tensor>, DenseCache)> {
        let mut ys = Vec::with_capacity(xs.len());
        let mut zs = Vec::with_capacity(xs.len());
        for x in xs {
            let (y, z) = self.forward_step_cached(x)?;
            ys.push(y);
            zs.push(z);
        }
        Ok((
            ys,
            DenseCache {
                xs: xs.to_vec(),
                zs,
            },
        ))
    }

    /// Returns (input gradients per step, [dW, db]).
    pub fn backward(&self, cache: &DenseCache, grad_out: &[Tensor]) -> (Vec<Tensor>, Vec<Tensor>) {
        let out = self.out_dim();
        let in_dim = self.in_dim();
        let mut dw = Array2::<f64>::zeros((out, in_dim));
        let mut db = vec![0.0f64; out];
        let mut dxs = Vec::with_capacity(grad_out.len());
        for ((dy, z), x) in grad_out.iter().zip(&cache.zs).zip(&cache.xs) {
            let n = dy.shape()[0];
            let mut dz = dy.clone();
            for (v, zv) in dz.data_mut().iter_mut().zip(z.data()) {
                *v *= self.act.grad(*zv);
            }
            let dz_m = dz.view2();
            dw = dw + dz_m.t().dot(&x.view2());
            for r in 0..n {
                for (acc, v) in db.iter_mut().zip(dz.row(r)) {
                    *acc += v;
                }
            }
            let dx = dz_m.dot(&self.w.view2());
            dxs.push(Tensor::from_vec(&[n, in_dim], dx.into_raw_vec_and_offset().0).unwrap());
        }
        let dw = Tensor::from_vec(&[out, in_dim], dw.into_raw_vec_and_offset().0).unwrap();
        let db = Tensor::from_vec(&[out], db).unwrap();
        (dxs, vec![dw, db])
    }
}

/// Single-vector forward pass, the scalar contract the layer is built on.
pub fn dense_forward(x: &Tensor, layer: &Dense) -> Result<Tensor> {
    if x.rank() != 1 || x.len() != layer.in_dim() {
        return Err(Error::ShapeMismatch {
            context: "dense_forward",
            expected: vec![layer.in_dim()],
            got: x.shape().to_vec(),
        });
    }
    let out = layer.forward_step(&x.clone().into_batch_of_one())?;
    Ok(Tensor::vector(out.row(0)))
}
