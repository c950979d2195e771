//! Adam optimizer with bias correction.

use serde::{Deserialize, Serialize};

use crate::network::{GradientBundle, Network};
use crate::tensor::Tensor;
use crate::{Error, Result};

/// Per-parameter first/second moment estimates plus the step counter.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdamState {
    m: Vec<Tensor>,
    v: Vec<Tensor>,
    t: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamState {
    /// Fresh state shaped like the network's parameter list, with the
    /// standard β₁ = 0.9, β₂ = 0.999, ε = 1e-8 defaults.
    pub fn new(net: &Network) -> Self {
        Self::for_shapes(&net.params().iter().map(|p| p.shape().to_vec()).collect::<Vec<_>>())
    }

    pub fn for_shapes(shapes: &[Vec<usize>]) -> Self {
        AdamState {
            m: shapes.iter().map(|s| Tensor::zeros(s)).collect(),
            v: shapes.iter().map(|s| Tensor::zeros(s)).collect(),
            t: 0,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }

    /// One Adam update over a parameter list. Parameters, gradients and
    /// moment tensors must line up one-to-one.
    pub fn step(
        &mut self,
        params: &mut [&mut Tensor],
        grads: &GradientBundle,
        lr: f64,
    ) -> Result<()> {
        assert!(lr > 0.0, "learning rate must be positive");
        if params.len() != grads.tensors.len() || params.len() != self.m.len() {
            return Err(Error::ShapeMismatch {
                context: "adam_step parameter list",
                expected: vec![self.m.len()],
                got: vec![params.len(), grads.tensors.len()],
            });
        }
        self.t += 1;
        let b1t = 1.0 - self.beta1.powi(self.t as i32);
        let b2t = 1.0 - self.beta2.powi(self.t as i32);
        for ((p, g), (m, v)) in params
            .iter_mut()
            .zip(&grads.tensors)
            .zip(self.m.iter_mut().zip(self.v.iter_mut()))
        {
            if p.shape() != g.shape() {
                return Err(Error::ShapeMismatch {
                    context: "adam_step gradient",
                    expected: p.shape().to_vec(),
                    got: g.shape().to_vec(),
                });
            }
            for (((pv, gv), mv), vv) in p
                .data_mut()
                .iter_mut()
                .zip(g.data())
                .zip(m.data_mut())
                .zip(v.data_mut())
            {
                *mv = self.beta1 * *mv + (1.0 - self.beta1) * gv;
                *vv = self.beta2 * *vv + (1.0 - self.beta2) * gv * gv;
                let m_hat = *mv / b1t;
                let v_hat = *vv / b2t;
                *pv -= lr * m_hat / (v_hat.sqrt() + self.epsilon);
            }
        }
        Ok(())
    }
}

/// Update a whole network in place.
pub fn adam_step(net: &mut Network, grads: &GradientBundle, state: &mut AdamState, lr: f64) -> Result<()> {
    let mut params = net.params_mut();
    state.step(&mut params, grads, lr)
}
