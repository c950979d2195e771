//! Layer graph: a straight stack of layers closed by a softmax head,
//! with cached forward passes and exact backpropagation.
//!
//! A network maps a sequence of step batches to a sequence of step
//! batches. Per-step layers (dense, conv, pool, flatten, softmax) apply
//! independently at each step; recurrent layers treat the slice as the
//! time axis. Training loss is cross-entropy summed over steps and
//! averaged over the batch.

use serde::{Deserialize, Serialize};

use crate::conv1d::{Conv1d, ConvCache};
use crate::dense::{Dense, DenseCache};
use crate::lstm::{Blstm, BlstmCache, Lstm, LstmCache};
use crate::pool::{MaxPool1d, PoolCache};
use crate::softmax::{cross_entropy_slices, softmax_rows};
use crate::tensor::Tensor;
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Layer {
    Dense(Dense),
    Conv1d(Conv1d),
    MaxPool1d(MaxPool1d),
    /// [n, c, len] -> [n, c·len].
    Flatten,
    Lstm(Lstm),
    Blstm(Blstm),
    /// Row-wise softmax; must be the last layer when training.
    Softmax,
}

impl Layer {
    pub fn kind(&self) -> &'static str {
        match self {
            Layer::Dense(_) => "dense",
            Layer::Conv1d(_) => "conv1d",
            Layer::MaxPool1d(_) => "maxpool1d",
            Layer::Flatten => "flatten",
            Layer::Lstm(_) => "lstm",
            Layer::Blstm(_) => "blstm",
            Layer::Softmax => "softmax",
        }
    }

    /// Parameter tensors in a fixed documented order.
    pub fn params(&self) -> Vec<&Tensor> {
        match self {
            Layer::Dense(l) => vec![&l.w, &l.b],
            Layer::Conv1d(l) => vec![&l.w, &l.b],
            Layer::Lstm(l) => vec![&l.params.wx, &l.params.wh, &l.params.b],
            Layer::Blstm(l) => vec![
                &l.fwd.params.wx,
                &l.fwd.params.wh,
                &l.fwd.params.b,
                &l.bwd.params.wx,
                &l.bwd.params.wh,
                &l.bwd.params.b,
            ],
            _ => vec![],
        }
    }

    pub fn params_mut(&mut self) -> Vec<&mut Tensor> {
        match self {
            Layer::Dense(l) => vec![&mut l.w, &mut l.b],
            Layer::Conv1d(l) => vec![&mut l.w, &mut l.b],
            Layer::Lstm(l) => vec![&mut l.params.wx, &mut l.params.wh, &mut l.params.b],
            Layer::Blstm(l) => vec![
                &mut l.fwd.params.wx,
                &mut l.fwd.params.wh,
                &mut l.fwd.params.b,
                &mut l.bwd.params.wx,
                &mut l.bwd.params.wh,
                &mut l.bwd.params.b,
            ],
            _ => vec![],
        }
    }
}

enum LayerCache {
    Dense(DenseCache),
    Conv(ConvCache),
    Pool(PoolCache),
    Flatten(Vec<Vec<usize>>),
    Lstm(LstmCache),
    Blstm(BlstmCache),
    Softmax,
}

struct TrainCache {
    layers: Vec<LayerCache>,
    outputs: Vec<Tensor>,
}

/// One gradient tensor per parameter tensor, in [`Network::params`]
/// order.
#[derive(Debug, Clone)]
pub struct GradientBundle {
    pub tensors: Vec<Tensor>,
}

impl GradientBundle {
    pub fn zeros_like(net: &Network) -> Self {
        GradientBundle {
            tensors: net.params().iter().map(|p| Tensor::zeros(p.shape())).collect(),
        }
    }

    pub fn add(&mut self, other: &GradientBundle) {
        assert_eq!(self.tensors.len(), other.tensors.len());
        for (a, b) in self.tensors.iter_mut().zip(&other.tensors) {
            for (x, y) in a.data_mut().iter_mut().zip(b.data()) {
                *x += y;
            }
        }
    }

    pub fn scale(&mut self, s: f64) {
        for t in &mut self.tensors {
            for v in t.data_mut() {
                *v *= s;
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Network {
    pub layers: Vec<Layer>,
}

/// Opaque record of one cached forward pass. Backward passes require it
/// by construction, so a backward without a prior forward cannot be
/// expressed; a cache from a different network shape is rejected at run
/// time.
pub struct TrainState {
    cache: TrainCache,
}

impl Network {
    pub fn new(layers: Vec<Layer>) -> Self {
        Network { layers }
    }

    pub fn params(&self) -> Vec<&Tensor> {
        self.layers.iter().flat_map(|l| l.params()).collect()
    }

    pub fn params_mut(&mut self) -> Vec<&mut Tensor> {
        self.layers.iter_mut().flat_map(|l| l.params_mut()).collect()
    }

    pub fn param_count(&self) -> usize {
        self.params().iter().map(|t| t.len()).sum()
    }

    /// Pure inference pass over a sequence of step batches.
    pub fn forward(&self, xs: &[Tensor]) -> Result<Vec<Tensor>> {
        self.forward_upto(xs, self.layers.len())
    }

    /// Run only the first `n_layers` layers (used to expose penultimate
    /// feature maps).
    pub fn forward_upto(&self, xs: &[Tensor], n_layers: usize) -> Result<Vec<Tensor>> {
        let mut cur = xs.to_vec();
        for layer in &self.layers[..n_layers] {
            cur = match layer {
                Layer::Dense(l) => l.forward(&cur)?,
                Layer::Conv1d(l) => l.forward(&cur)?,
                Layer::MaxPool1d(l) => l.forward(&cur)?,
                Layer::Flatten => flatten_forward(&cur)?,
                Layer::Lstm(l) => l.forward(&cur)?,
                Layer::Blstm(l) => l.forward(&cur)?,
                Layer::Softmax => cur.iter().map(softmax_rows).collect::<Result<_>>()?,
            };
        }
        Ok(cur)
    }

    /// Forward pass that records every intermediate the backward pass
    /// needs. Returns the outputs and an opaque state to hand back to
    /// [`Network::backward`].
    pub fn forward_train(&self, xs: &[Tensor]) -> Result<(Vec<Tensor>, TrainState)> {
        let mut cur = xs.to_vec();
        let mut caches = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            match layer {
                Layer::Dense(l) => {
                    let (y, c) = l.forward_train(&cur)?;
                    caches.push(LayerCache::Dense(c));
                    cur = y;
                }
                Layer::Conv1d(l) => {
                    let (y, c) = l.forward_train(&cur)?;
                    caches.push(LayerCache::Conv(c));
                    cur = y;
                }
                Layer::MaxPool1d(l) => {
                    let (y, c) = l.forward_train(&cur)?;
                    caches.push(LayerCache::Pool(c));
                    cur = y;
                }
                Layer::Flatten => {
                    let shapes = cur.iter().map(|t| t.shape().to_vec()).collect();
                    cur = flatten_forward(&cur)?;
                    caches.push(LayerCache::Flatten(shapes));
                }
                Layer::Lstm(l) => {
                    let (y, c) = l.forward_train(&cur)?;
                    caches.push(LayerCache::Lstm(c));
                    cur = y;
                }
                Layer::Blstm(l) => {
                    let (y, c) = l.forward_train(&cur)?;
                    caches.push(LayerCache::Blstm(c));
                    cur = y;
                }
                Layer::Softmax => {
                    cur = cur.iter().map(softmax_rows).collect::<Result<Vec<_>>>()?;
                    caches.push(LayerCache::Softmax);
                }
            }
        }
        Ok((
            cur.clone(),
            TrainState {
                cache: TrainCache {
                    layers: caches,
                    outputs: cur,
                },
            },
        ))
    }

    /// Cross-entropy of the network output against one-hot targets:
    /// summed over steps, averaged over the batch.
    pub fn loss(&self, xs: &[Tensor], targets: &[Tensor]) -> Result<f64> {
        let out = self.forward(xs)?;
        Ok(loss_of_outputs(&out, targets))
    }

    /// Exact gradient of the loss for the pass recorded in `state`.
    ///
    /// The last layer must be [`Layer::Softmax`]; the softmax/cross-entropy
    /// pair backpropagates as `p_est − p_true`.
    pub fn backward(&self, state: &TrainState, targets: &[Tensor]) -> Result<GradientBundle> {
        let cache = &state.cache;
        if !matches!(self.layers.last(), Some(Layer::Softmax)) {
            return Err(Error::BadCheckpoint(
                "training requires a softmax output layer".into(),
            ));
        }
        let outputs = &cache.outputs;
        if outputs.len() != targets.len() {
            return Err(Error::ShapeMismatch {
                context: "backward targets",
                expected: vec![outputs.len()],
                got: vec![targets.len()],
            });
        }
        let n = outputs[0].shape()[0] as f64;
        // Fused softmax + cross-entropy gradient, scaled by 1/batch.
        let mut grad: Vec<Tensor> = outputs
            .iter()
            .zip(targets)
            .map(|(p, y)| {
                let mut g = p.clone();
                for (gv, yv) in g.data_mut().iter_mut().zip(y.data()) {
                    *gv = (*gv - yv) / n;
                }
                g
            })
            .collect();
        let mut param_grads_rev: Vec<Vec<Tensor>> = Vec::new();
        for (layer, lcache) in self.layers.iter().zip(&cache.layers).rev() {
            match (layer, lcache) {
                (Layer::Softmax, LayerCache::Softmax) => {
                    // Handled by the fused initialization above.
                    param_grads_rev.push(vec![]);
                }
                (Layer::Dense(l), LayerCache::Dense(c)) => {
                    let (dx, pg) = l.backward(c, &grad);
                    grad = dx;
                    param_grads_rev.push(pg);
                }
                (Layer::Conv1d(l), LayerCache::Conv(c)) => {
                    let (dx, pg) = l.backward(c, &grad);
                    grad = dx;
                    param_grads_rev.push(pg);
                }
                (Layer::MaxPool1d(l), LayerCache::Pool(c)) => {
                    grad = l.backward(c, &grad);
                    param_grads_rev.push(vec![]);
                }
                (Layer::Flatten, LayerCache::Flatten(shapes)) => {
                    grad = grad
                        .iter()
                        .zip(shapes)
                        .map(|(g, s)| Tensor::from_vec(s, g.data().to_vec()).unwrap())
                        .collect();
                    param_grads_rev.push(vec![]);
                }
                (Layer::Lstm(l), LayerCache::Lstm(c)) => {
                    let (dx, pg) = l.backward(c, &grad);
                    grad = dx;
                    param_grads_rev.push(pg);
                }
                (Layer::Blstm(l), LayerCache::Blstm(c)) => {
                    let (dx, pg) = l.backward(c, &grad);
                    grad = dx;
                    param_grads_rev.push(pg);
                }
                _ => return Err(Error::NoForwardCache),
            }
        }
        let tensors: Vec<Tensor> = param_grads_rev
            .into_iter()
            .rev()
            .flatten()
            .collect();
        debug_assert!(tensors.iter().all(|t| t.all_finite()));
        Ok(GradientBundle { tensors })
    }

    /// Convenience: forward + backward in one call, returning
    /// (loss, gradients).
    pub fn loss_and_grad(&self, xs: &[Tensor], targets: &[Tensor]) -> Result<(f64, GradientBundle)> {
        let (out, state) = self.forward_train(xs)?;
        let loss = loss_of_outputs(&out, targets);
        let grads = self.backward(&state, targets)?;
        Ok((loss, grads))
    }
}

/// Sum of per-step cross-entropies averaged over the batch rows.
pub fn loss_of_outputs(outputs: &[Tensor], targets: &[Tensor]) -> f64 {
    let n = outputs[0].shape()[0];
    let mut total = 0.0;
    for (p, y) in outputs.iter().zip(targets) {
        for b in 0..n {
            total += cross_entropy_slices(y.row(b), p.row(b));
        }
    }
    total / n as f64
}

fn flatten_forward(xs: &[Tensor]) -> Result<Vec<Tensor>> {
    xs.iter()
        .map(|x| {
            if x.rank() != 3 {
                return Err(Error::ShapeMismatch {
                    context: "flatten",
                    expected: vec![0, 0, 0],
                    got: x.shape().to_vec(),
                });
            }
            let (n, c, len) = (x.shape()[0], x.shape()[1], x.shape()[2]);
            Tensor::from_vec(&[n, c * len], x.data().to_vec())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activation::Activation;

    fn tiny_classifier(seed: u64) -> Network {
        Network::new(vec![
            Layer::Dense(Dense::new(3, 4, Activation::Relu, seed)),
            Layer::Dense(Dense::new(4, 2, Activation::Identity, seed + 1)),
            Layer::Softmax,
        ])
    }

    #[test]
    fn forward_emits_pmf_rows() {
        let net = tiny_classifier(1);
        let x = Tensor::from_vec(&[2, 3], vec![0.1, -0.4, 0.9, 1.0, 0.0, -1.0]).unwrap();
        let out = net.forward(&[x]).unwrap();
        for b in 0..2 {
            let s: f64 = out[0].row(b).iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn softmax_preactivation_gradient_is_estimate_minus_truth() {
        // Head-only network: gradient w.r.t. dense output (= softmax
        // pre-activations) must equal p_est − p_true. Verified through
        // the identity-weight dense layer right below the head.
        let mut w = Tensor::zeros(&[3, 3]);
        for i in 0..3 {
            w.data_mut()[i * 3 + i] = 1.0;
        }
        let net = Network::new(vec![
            Layer::Dense(Dense {
                w,
                b: Tensor::zeros(&[3]),
                act: Activation::Identity,
            }),
            Layer::Softmax,
        ]);
        let x = Tensor::from_vec(&[1, 3], vec![0.2, -1.0, 0.5]).unwrap();
        let target = Tensor::from_vec(&[1, 3], vec![0.0, 1.0, 0.0]).unwrap();
        let (out, state) = net.forward_train(&[x.clone()]).unwrap();
        let grads = net.backward(&state, &[target.clone()]).unwrap();
        // db of the identity dense layer equals the pre-activation grad.
        let db = &grads.tensors[1];
        for j in 0..3 {
            let expect = out[0].data()[j] - target.data()[j];
            assert!((db.data()[j] - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn unused_parameter_gets_zero_gradient() {
        // Second input feature never influences the loss when its weights
        // are zero and stay zeroed by ReLU masking of a dead unit.
        let mut dense = Dense::new(2, 2, Activation::Identity, 3);
        // Zero the column for input 1: loss cannot depend on w[.,1].
        for r in 0..2 {
            dense.w.data_mut()[r * 2 + 1] = 0.0;
        }
        let net = Network::new(vec![Layer::Dense(dense), Layer::Softmax]);
        let x = Tensor::from_vec(&[1, 2], vec![0.0, 5.0]).unwrap();
        let t = Tensor::from_vec(&[1, 2], vec![1.0, 0.0]).unwrap();
        let (_, state) = net.forward_train(&[x]).unwrap();
        let g = net.backward(&state, &[t]).unwrap();
        // Gradient w.r.t. w[r][0] is x₀·δ = 0 since x₀ = 0.
        assert_eq!(g.tensors[0].data()[0], 0.0);
        assert_eq!(g.tensors[0].data()[2], 0.0);
    }

    #[test]
    fn loss_decreases_under_gradient_step() {
        let mut net = tiny_classifier(9);
        let x = Tensor::from_vec(&[1, 3], vec![0.3, 0.8, -0.2]).unwrap();
        let t = Tensor::from_vec(&[1, 2], vec![1.0, 0.0]).unwrap();
        let (l0, g) = net.loss_and_grad(&[x.clone()], &[t.clone()]).unwrap();
        for (p, gt) in net.params_mut().into_iter().zip(&g.tensors) {
            for (pv, gv) in p.data_mut().iter_mut().zip(gt.data()) {
                *pv -= 0.1 * gv;
            }
        }
        let l1 = net.loss(&[x], &[t]).unwrap();
        assert!(l1 < l0, "{l1} !< {l0}");
    }
}
