//! 1-D convolution with zero-padded "same" output length.
//!
//! Input is [n, c_in, len]; kernels are [c_out, c_in, k]. For stride `s`
//! the output length is `ceil(len / s)`. Padding puts `floor((k-1)/2)`
//! zeros on the left and the rest on the right, so a length-2 kernel
//! reads the current and next sample with one zero pad at the end.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::activation::Activation;
use crate::init::glorot_uniform;
use crate::tensor::Tensor;
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Conv1d {
    /// Kernels, row-major [c_out, c_in, k].
    pub w: Tensor,
    /// One bias per output channel.
    pub b: Tensor,
    pub act: Activation,
    pub stride: usize,
}

#[derive(Debug)]
pub struct ConvCache {
    xs: Vec<Tensor>,
    zs: Vec<Tensor>,
}

impl Conv1d {
    pub fn new(c_in: usize, c_out: usize, k: usize, act: Activation, seed: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        Conv1d {
            w: glorot_uniform(&mut rng, &[c_out, c_in, k], c_in * k, c_out * k),
            b: Tensor::zeros(&[c_out]),
            act,
            stride: 1,
        }
    }

    pub fn c_in(&self) -> usize {
        self.w.shape()[1]
    }

    pub fn c_out(&self) -> usize {
        self.w.shape()[0]
    }

    pub fn kernel(&self) -> usize {
        self.w.shape()[2]
    }

    fn pad_left(&self) -> usize {
        (self.kernel() - 1) / 2
    }

    pub fn out_len(&self, len: usize) -> usize {
        len.div_ceil(self.stride)
    }

    fn check_input(&self, x: &Tensor) -> Result<()> {
        if x.rank() != 3 || x.shape()[1] != self.c_in() || x.shape()[2] == 0 {
            return Err(Error::ShapeMismatch {
                context: "conv1d forward",
                expected: vec![x.shape().first().copied().unwrap_or(1), self.c_in(), 1],
                got: x.shape().to_vec(),
            });
        }
        Ok(())
    }

    fn forward_step_cached(&self, x: &Tensor) -> Result<(Tensor, Tensor)> {
        self.check_input(x)?;
        let (n, c_in, len) = (x.shape()[0], x.shape()[1], x.shape()[2]);
        let (c_out, k, pl) = (self.c_out(), self.kernel(), self.pad_left());
        let o_len = self.out_len(len);
        let mut z = Tensor::zeros(&[n, c_out, o_len]);
        let xd = x.data();
        let wd = self.w.data();
        let zd = z.data_mut();
        for b in 0..n {
            for co in 0..c_out {
                let bias = self.b.data()[co];
                let z_base = (b * c_out + co) * o_len;
                for j in 0..o_len {
                    let mut acc = bias;
                    let start = (j * self.stride) as isize - pl as isize;
                    for ci in 0..c_in {
                        let x_base = (b * c_in + ci) * len;
                        let w_base = (co * c_in + ci) * k;
                        for t in 0..k {
                            let idx = start + t as isize;
                            if idx >= 0 && (idx as usize) < len {
                                acc += wd[w_base + t] * xd[x_base + idx as usize];
                            }
                        }
                    }
                    zd[z_base + j] = acc;
                }
            }
        }
        let mut y = z.clone();
        self.act.apply_slice(y.data_mut());
        debug_assert!(y.all_finite());
        Ok((y, z))
    }

    pub fn forward_step(&self, x: &Tensor) -> Result<Tensor> {
        Ok(self.forward_step_cached(x)?.0)
    }

    pub fn forward(&self, xs: &[Tensor]) -> Result<Vec<Tensor>> {
        xs.iter().map(|x| self.forward_step(x)).collect()
    }

    pub fn forward_train(&self, xs: &[Tensor]) -> Result<(Vec<Tensor>, ConvCache)> {
        let mut ys = Vec::with_capacity(xs.len());
        let mut zs = Vec::with_capacity(xs.len());
        for x in xs {
            let (y, z) = self.forward_step_cached(x)?;
            ys.push(y);
            zs.push(z);
        }
        Ok((
            ys,
            ConvCache {
                xs: xs.to_vec(),
                zs,
            },
        ))
    }

    pub fn backward(&self, cache: &ConvCache, grad_out: &[Tensor]) -> (Vec<Tensor>, Vec<Tensor>) {
        let (c_in, c_out, k, pl) = (self.c_in(), self.c_out(), self.kernel(), self.pad_left());
        let mut dw = Tensor::zeros(&[c_out, c_in, k]);
        let mut db = Tensor::zeros(&[c_out]);
        let mut dxs = Vec::with_capacity(grad_out.len());
        for ((dy, z), x) in grad_out.iter().zip(&cache.zs).zip(&cache.xs) {
            let (n, len) = (x.shape()[0], x.shape()[2]);
            let o_len = self.out_len(len);
            let mut dz = dy.clone();
            for (v, zv) in dz.data_mut().iter_mut().zip(z.data()) {
                *v *= self.act.grad(*zv);
            }
            let mut dx = Tensor::zeros(&[n, c_in, len]);
            let (xd, wd, dzd) = (x.data(), self.w.data(), dz.data());
            for b in 0..n {
                for co in 0..c_out {
                    let dz_base = (b * c_out + co) * o_len;
                    for j in 0..o_len {
                        let g = dzd[dz_base + j];
                        if g == 0.0 {
                            continue;
                        }
                        db.data_mut()[co] += g;
                        let start = (j * self.stride) as isize - pl as isize;
                        for ci in 0..c_in {
                            let x_base = (b * c_in + ci) * len;
                            let w_base = (co * c_in + ci) * k;
                            for t in 0..k {
                                let idx = start + t as isize;
                                if idx >= 0 && (idx as usize) < len {
                                    dw.data_mut()[w_base + t] += g * xd[x_base + idx as usize];
                                    dx.data_mut()[x_base + idx as usize] += g * wd[w_base + t];
                                }
                            }
                        }
                    }
                }
            }
            dxs.push(dx);
        }
        (dxs, vec![dw, db])
    }
}

/// Single-signal forward: x is [len] (one channel) or [c_in, len].
pub fn conv1d_forward(x: &Tensor, layer: &Conv1d, stride: usize) -> Result<Tensor> {
    let mut layer = layer.clone();
    layer.stride = stride.max(1);
    let shaped = match x.rank() {
        1 => Tensor::from_vec(&[1, 1, x.len()], x.data().to_vec())?,
        2 => Tensor::from_vec(
            &[1, x.shape()[0], x.shape()[1]],
            x.data().to_vec(),
        )?,
        _ => {
            return Err(Error::ShapeMismatch {
                context: "conv1d_forward",
                expected: vec![layer.c_in(), 1],
                got: x.shape().to_vec(),
            })
        }
    };
    let y = layer.forward_step(&shaped)?;
    let (c_out, o_len) = (y.shape()[1], y.shape()[2]);
    Tensor::from_vec(&[c_out, o_len], y.into_data())
}
