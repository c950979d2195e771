//! LSTM and bidirectional LSTM layers with exact backpropagation
//! through time (full unroll, no truncation).
//!
//! Gate layout stacks input, forget, candidate and output blocks in that
//! order, so `wx` is [4h, in], `wh` is [4h, h] and `b` is [4h]. The cell
//! update is the standard peephole-free form
//!
//! ```text
//! i = σ(Wxi·x + Whi·h' + bi)      f = σ(Wxf·x + Whf·h' + bf)
//! g = tanh(Wxg·x + Whg·h' + bg)   o = σ(Wxo·x + Who·h' + bo)
//! c = f⊙c' + i⊙g                  h = o⊙tanh(c)
//! ```
//!
//! The forget-gate bias initializes to 1.0, everything else to the
//! Glorot/orthogonal scheme in [`crate::init`].

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::activation::sigmoid;
use crate::init::{glorot_uniform, stacked_orthogonal};
use crate::tensor::Tensor;
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LstmParams {
    /// Input kernel [4h, in].
    pub wx: Tensor,
    /// Recurrent kernel [4h, h].
    pub wh: Tensor,
    /// Gate biases [4h].
    pub b: Tensor,
}

impl LstmParams {
    pub fn new(in_dim: usize, hidden: usize, seed: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let wx = glorot_uniform(&mut rng, &[4 * hidden, in_dim], in_dim, hidden);
        let wh = stacked_orthogonal(&mut rng, 4, hidden);
        let mut b = Tensor::zeros(&[4 * hidden]);
        // Forget-gate block starts open.
        for v in &mut b.data_mut()[hidden..2 * hidden] {
            *v = 1.0;
        }
        LstmParams { wx, wh, b }
    }

    pub fn zeroed(in_dim: usize, hidden: usize) -> Self {
        LstmParams {
            wx: Tensor::zeros(&[4 * hidden, in_dim]),
            wh: Tensor::zeros(&[4 * hidden, hidden]),
            b: Tensor::zeros(&[4 * hidden]),
        }
    }

    pub fn hidden(&self) -> usize {
        self.wh.shape()[1]
    }

    pub fn in_dim(&self) -> usize {
        self.wx.shape()[1]
    }
}

/// One cell update on plain vectors. `x` is [in], `h_prev`/`c_prev` are
/// [h]; returns (h, c). This is the scalar reference the batched layer
/// is tested against.
pub fn lstm_step(
    x: &Tensor,
    h_prev: &Tensor,
    c_prev: &Tensor,
    p: &LstmParams,
) -> Result<(Tensor, Tensor)> {
    let h = p.hidden();
    if x.rank() != 1 || x.len() != p.in_dim() || h_prev.len() != h || c_prev.len() != h {
        return Err(Error::ShapeMismatch {
            context: "lstm_step",
            expected: vec![p.in_dim(), h, h],
            got: vec![x.len(), h_prev.len(), c_prev.len()],
        });
    }
    let mut pre = vec![0.0f64; 4 * h];
    let (wx, wh, b) = (p.wx.data(), p.wh.data(), p.b.data());
    for (r, pre_r) in pre.iter_mut().enumerate() {
        let mut acc = b[r];
        for (c, xv) in x.data().iter().enumerate() {
            acc += wx[r * p.in_dim() + c] * xv;
        }
        for (c, hv) in h_prev.data().iter().enumerate() {
            acc += wh[r * h + c] * hv;
        }
        *pre_r = acc;
    }
    let mut h_t = Tensor::zeros(&[h]);
    let mut c_t = Tensor::zeros(&[h]);
    for j in 0..h {
        let i = sigmoid(pre[j]);
        let f = sigmoid(pre[h + j]);
        let g = pre[2 * h + j].tanh();
        let o = sigmoid(pre[3 * h + j]);
        let c = f * c_prev.data()[j] + i * g;
        c_t.data_mut()[j] = c;
        h_t.data_mut()[j] = o * c.tanh();
    }
    Ok((h_t, c_t))
}

/// Unidirectional LSTM layer over step batches.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Lstm {
    pub params: LstmParams,
}

/// Everything BPTT needs from the forward pass: per-step inputs, gate
/// activations, cell states and tanh(c).
#[derive(Debug)]
pub struct LstmCache {
    xs: Vec<Tensor>,
    gates: Vec<[Tensor; 4]>,
    cells: Vec<Tensor>,
    tanh_c: Vec<Tensor>,
    hs: Vec<Tensor>,
}

impl Lstm {
    pub fn new(in_dim: usize, hidden: usize, seed: u64) -> Self {
        Lstm {
            params: LstmParams::new(in_dim, hidden, seed),
        }
    }

    pub fn hidden(&self) -> usize {
        self.params.hidden()
    }

    pub fn in_dim(&self) -> usize {
        self.params.in_dim()
    }

    fn check_seq(&self, xs: &[Tensor]) -> Result<()> {
        if xs.is_empty() {
            return Err(Error::EmptySequence("lstm layer"));
        }
        for x in xs {
            if x.rank() != 2 || x.shape()[1] != self.in_dim() {
                return Err(Error::ShapeMismatch {
                    context: "lstm layer",
                    expected: vec![x.shape().first().copied().unwrap_or(1), self.in_dim()],
                    got: x.shape().to_vec(),
                });
            }
        }
        Ok(())
    }

    /// Causal forward pass from zero state; returns h_t for every step.
    pub fn forward(&self, xs: &[Tensor]) -> Result<Vec<Tensor>> {
        Ok(self.run(xs)?.hs)
    }

    pub fn forward_train(&self, xs: &[Tensor]) -> Result<(Vec<Tensor>, LstmCache)> {
        let cache = self.run(xs)?;
        Ok((cache.hs.clone(), cache))
    }

    fn run(&self, xs: &[Tensor]) -> Result<LstmCache> {
        self.check_seq(xs)?;
        let n = xs[0].shape()[0];
        let h = self.hidden();
        let p = &self.params;
        let wx_t = p.wx.view2(); // [4h, in]
        let wh_t = p.wh.view2(); // [4h, h]
        let mut h_prev = Array2::<f64>::zeros((n, h));
        let mut c_prev = Tensor::zeros(&[n, h]);
        let mut cache = LstmCache {
            xs: xs.to_vec(),
            gates: Vec::with_capacity(xs.len()),
            cells: Vec::with_capacity(xs.len()),
            tanh_c: Vec::with_capacity(xs.len()),
            hs: Vec::with_capacity(xs.len()),
        };
        for x in xs {
            // pre = x·Wxᵀ + h'·Whᵀ + b : [n, 4h]
            let mut pre = x.view2().dot(&wx_t.t());
            pre = pre + h_prev.dot(&wh_t.t());
            let bias = p.b.data();
            for mut row in pre.rows_mut() {
                for (v, bv) in row.iter_mut().zip(bias) {
                    *v += bv;
                }
            }
            let mut gi = Tensor::zeros(&[n, h]);
            let mut gf = Tensor::zeros(&[n, h]);
            let mut gg = Tensor::zeros(&[n, h]);
            let mut go = Tensor::zeros(&[n, h]);
            let mut c_t = Tensor::zeros(&[n, h]);
            let mut tc = Tensor::zeros(&[n, h]);
            let mut h_t = Array2::<f64>::zeros((n, h));
            for b_i in 0..n {
                let pre_row = pre.row(b_i);
                for j in 0..h {
                    let i = sigmoid(pre_row[stack_idx(0, h, j)]);
                    let f = sigmoid(pre_row[stack_idx(1, h, j)]);
                    let g = pre_row[stack_idx(2, h, j)].tanh();
                    let o = sigmoid(pre_row[stack_idx(3, h, j)]);
                    let c = f * c_prev.data()[b_i * h + j] + i * g;
                    let tch = c.tanh();
                    gi.data_mut()[b_i * h + j] = i;
                    gf.data_mut()[b_i * h + j] = f;
                    gg.data_mut()[b_i * h + j] = g;
                    go.data_mut()[b_i * h + j] = o;
                    c_t.data_mut()[b_i * h + j] = c;
                    tc.data_mut()[b_i * h + j] = tch;
                    h_t[[b_i, j]] = o * tch;
                }
            }
            let h_tensor =
                Tensor::from_vec(&[n, h], h_t.clone().into_raw_vec_and_offset().0).unwrap();
            debug_assert!(h_tensor.all_finite());
            cache.gates.push([gi, gf, gg, go]);
            cache.cells.push(c_t.clone());
            cache.tanh_c.push(tc);
            cache.hs.push(h_tensor);
            h_prev = h_t;
            c_prev = c_t;
        }
        Ok(cache)
    }

    /// Full-unroll BPTT. Returns (input grads per step, [dWx, dWh, db]).
    pub fn backward(&self, cache: &LstmCache, grad_out: &[Tensor]) -> (Vec<Tensor>, Vec<Tensor>) {
        let steps = cache.xs.len();
        let n = cache.xs[0].shape()[0];
        let h = self.hidden();
        let in_dim = self.in_dim();
        let p = &self.params;
        let mut dwx = Array2::<f64>::zeros((4 * h, in_dim));
        let mut dwh = Array2::<f64>::zeros((4 * h, h));
        let mut db = vec![0.0f64; 4 * h];
        let mut dxs = vec![Tensor::zeros(&[n, in_dim]); steps];
        let mut dh_next = Array2::<f64>::zeros((n, h));
        let mut dc_next = vec![0.0f64; n * h];
        for t in (0..steps).rev() {
            let [gi, gf, gg, go] = &cache.gates[t];
            let tc = &cache.tanh_c[t];
            let c_prev: Option<&Tensor> = if t > 0 { Some(&cache.cells[t - 1]) } else { None };
            let mut dpre = Array2::<f64>::zeros((n, 4 * h));
            for b_i in 0..n {
                for j in 0..h {
                    let idx = b_i * h + j;
                    let dh = grad_out[t].data()[idx] + dh_next[[b_i, j]];
                    let o = go.data()[idx];
                    let tch = tc.data()[idx];
                    let dc = dh * o * (1.0 - tch * tch) + dc_next[idx];
                    let i = gi.data()[idx];
                    let f = gf.data()[idx];
                    let g = gg.data()[idx];
                    let cp = c_prev.map_or(0.0, |c| c.data()[idx]);
                    dpre[[b_i, stack_idx(0, h, j)]] = dc * g * i * (1.0 - i);
                    dpre[[b_i, stack_idx(1, h, j)]] = dc * cp * f * (1.0 - f);
                    dpre[[b_i, stack_idx(2, h, j)]] = dc * i * (1.0 - g * g);
                    dpre[[b_i, stack_idx(3, h, j)]] = dh * tch * o * (1.0 - o);
                    dc_next[idx] = dc * f;
                }
            }
            dwx = dwx + dpre.t().dot(&cache.xs[t].view2());
            if t > 0 {
                dwh = dwh + dpre.t().dot(&cache.hs[t - 1].view2());
            }
            for b_i in 0..n {
                for (acc, v) in db.iter_mut().zip(dpre.row(b_i)) {
                    *acc += v;
                }
            }
            let dx = dpre.dot(&p.wx.view2());
            dxs[t] = Tensor::from_vec(&[n, in_dim], dx.into_raw_vec_and_offset().0).unwrap();
            dh_next = dpre.dot(&p.wh.view2());
        }
        let dwx = Tensor::from_vec(&[4 * h, in_dim], dwx.into_raw_vec_and_offset().0).unwrap();
        let dwh = Tensor::from_vec(&[4 * h, h], dwh.into_raw_vec_and_offset().0).unwrap();
        let db = Tensor::from_vec(&[4 * h], db).unwrap();
        (dxs, vec![dwx, dwh, db])
    }
}

#[inline]
fn stack_idx(gate: usize, h: usize, j: usize) -> usize {
    gate * h + j
}

/// Bidirectional LSTM: one pass over the sequence, one over its
/// reverse, outputs concatenated per step to width 2h.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Blstm {
    pub fwd: Lstm,
    pub bwd: Lstm,
}

#[derive(Debug)]
pub struct BlstmCache {
    fwd: LstmCache,
    bwd: LstmCache,
}

impl Blstm {
    pub fn new(in_dim: usize, hidden: usize, seed: u64) -> Self {
        Blstm {
            fwd: Lstm::new(in_dim, hidden, seed),
            bwd: Lstm::new(in_dim, hidden, seed.wrapping_add(0x9e3779b97f4a7c15)),
        }
    }

    pub fn hidden(&self) -> usize {
        self.fwd.hidden()
    }

    pub fn in_dim(&self) -> usize {
        self.fwd.in_dim()
    }

    pub fn out_dim(&self) -> usize {
        2 * self.hidden()
    }

    pub fn forward(&self, xs: &[Tensor]) -> Result<Vec<Tensor>> {
        Ok(self.forward_train(xs)?.0)
    }

    pub fn forward_train(&self, xs: &[Tensor]) -> Result<(Vec<Tensor>, BlstmCache)> {
        if xs.is_empty() {
            return Err(Error::EmptySequence("blstm layer"));
        }
        let (hs_f, cache_f) = self.fwd.forward_train(xs)?;
        let rev: Vec<Tensor> = xs.iter().rev().cloned().collect();
        let (hs_b, cache_b) = self.bwd.forward_train(&rev)?;
        let n = xs[0].shape()[0];
        let h = self.hidden();
        let steps = xs.len();
        let mut out = Vec::with_capacity(steps);
        for t in 0..steps {
            let mut y = Tensor::zeros(&[n, 2 * h]);
            let hf = &hs_f[t];
            let hb = &hs_b[steps - 1 - t];
            for b_i in 0..n {
                y.row_mut(b_i)[..h].copy_from_slice(&hf.row(b_i)[..]);
                y.row_mut(b_i)[h..].copy_from_slice(&hb.row(b_i)[..]);
            }
            out.push(y);
        }
        Ok((
            out,
            BlstmCache {
                fwd: cache_f,
                bwd: cache_b,
            },
        ))
    }

    pub fn backward(&self, cache: &BlstmCache, grad_out: &[Tensor]) -> (Vec<Tensor>, Vec<Tensor>) {
        let steps = grad_out.len();
        let n = grad_out[0].shape()[0];
        let h = self.hidden();
        let mut gf = Vec::with_capacity(steps);
        let mut gb = Vec::with_capacity(steps);
        for t in 0..steps {
            let mut f = Tensor::zeros(&[n, h]);
            let mut b = Tensor::zeros(&[n, h]);
            for b_i in 0..n {
                f.row_mut(b_i).copy_from_slice(&grad_out[t].row(b_i)[..h]);
                b.row_mut(b_i).copy_from_slice(&grad_out[t].row(b_i)[h..]);
            }
            gf.push(f);
            gb.push(b);
        }
        gb.reverse();
        let (dx_f, grads_f) = self.fwd.backward(&cache.fwd, &gf);
        let (dx_b_rev, grads_b) = self.bwd.backward(&cache.bwd, &gb);
        let mut dxs = dx_f;
        for (t, dxb) in dx_b_rev.into_iter().rev().enumerate() {
            for (a, b) in dxs[t].data_mut().iter_mut().zip(dxb.data()) {
                *a += b;
            }
        }
        let mut grads = grads_f;
        grads.extend(grads_b);
        (dxs, grads)
    }
}

/// Sequence pass over plain vectors (batch of one), the documented
/// layer-level contract: returns h_t for every step, h₀ = c₀ = 0.
pub fn lstm_layer_forward(xs: &[Tensor], p: &LstmParams) -> Result<Vec<Tensor>> {
    if xs.is_empty() {
        return Err(Error::EmptySequence("lstm_layer_forward"));
    }
    let layer = Lstm { params: p.clone() };
    let batched: Vec<Tensor> = xs.iter().map(|x| x.clone().into_batch_of_one()).collect();
    let hs = layer.forward(&batched)?;
    Ok(hs.into_iter().map(|h| Tensor::vector(h.row(0))).collect())
}

/// Bidirectional pass over plain vectors: output t is [fwd h_t ‖ bwd h'_t]
/// where the backward pass consumed the reversed sequence.
pub fn blstm_layer_forward(
    xs: &[Tensor],
    p_fwd: &LstmParams,
    p_bwd: &LstmParams,
) -> Result<Vec<Tensor>> {
    if xs.is_empty() {
        return Err(Error::EmptySequence("blstm_layer_forward"));
    }
    let layer = Blstm {
        fwd: Lstm {
            params: p_fwd.clone(),
        },
        bwd: Lstm {
            params: p_bwd.clone(),
        },
    };
    let batched: Vec<Tensor> = xs.iter().map(|x| x.clone().into_batch_of_one()).collect();
    let out = layer.forward(&batched)?;
    Ok(out.into_iter().map(|h| Tensor::vector(h.row(0))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn seeded_params(in_dim: usize, hidden: usize, seed: u64) -> LstmParams {
        LstmParams::new(in_dim, hidden, seed)
    }

    fn random_seq(steps: usize, dim: usize, seed: u64) -> Vec<Tensor> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        (0..steps)
            .map(|_| Tensor::vector(&(0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>()))
            .collect()
    }

    #[test]
    fn zero_params_zero_cell_stay_zero() {
        let p = LstmParams::zeroed(2, 3);
        let (h, c) = lstm_step(
            &Tensor::vector(&[1.0, -1.0]),
            &Tensor::zeros(&[3]),
            &Tensor::zeros(&[3]),
            &p,
        )
        .unwrap();
        assert!(h.data().iter().all(|&v| v == 0.0));
        assert!(c.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn zero_params_unit_cell_halves() {
        // Gates all 0.5, candidate 0: c = 0.5·1, h = 0.5·tanh(0.5).
        let p = LstmParams::zeroed(1, 1);
        let (h, c) = lstm_step(
            &Tensor::vector(&[0.7]),
            &Tensor::zeros(&[1]),
            &Tensor::vector(&[1.0]),
            &p,
        )
        .unwrap();
        assert!((c.data()[0] - 0.5).abs() < 1e-15);
        assert!((h.data()[0] - 0.5 * 0.5f64.tanh()).abs() < 1e-15);
        assert!((h.data()[0] - 0.23105857863000487).abs() < 1e-12);
    }

    /// Independent scalar oracle: evaluates each gate formula explicitly.
    fn step_oracle(x: &[f64], h_prev: &[f64], c_prev: &[f64], p: &LstmParams) -> (Vec<f64>, Vec<f64>) {
        let h = p.hidden();
        let gate_pre = |block: usize, j: usize| -> f64 {
            let r = block * h + j;
            let mut acc = p.b.data()[r];
            for (c, xv) in x.iter().enumerate() {
                acc += p.wx.data()[r * p.in_dim() + c] * xv;
            }
            for (c, hv) in h_prev.iter().enumerate() {
                acc += p.wh.data()[r * h + c] * hv;
            }
            acc
        };
        let sig = |v: f64| 1.0 / (1.0 + (-v).exp());
        let mut hs = vec![0.0; h];
        let mut cs = vec![0.0; h];
        for j in 0..h {
            let i = sig(gate_pre(0, j));
            let f = sig(gate_pre(1, j));
            let g = gate_pre(2, j).tanh();
            let o = sig(gate_pre(3, j));
            cs[j] = f * c_prev[j] + i * g;
            hs[j] = o * cs[j].tanh();
        }
        (hs, cs)
    }

    #[test]
    fn step_matches_scalar_oracle() {
        for seed in 0..5u64 {
            let p = seeded_params(3, 4, seed);
            let mut rng = ChaCha12Rng::seed_from_u64(100 + seed);
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let hp: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let cp: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let (h, c) = lstm_step(
                &Tensor::vector(&x),
                &Tensor::vector(&hp),
                &Tensor::vector(&cp),
                &p,
            )
            .unwrap();
            let (ho, co) = step_oracle(&x, &hp, &cp, &p);
            for j in 0..4 {
                assert!((h.data()[j] - ho[j]).abs() < 1e-14);
                assert!((c.data()[j] - co[j]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn single_step_layer_equals_step_from_zero_state() {
        let p = seeded_params(3, 5, 8);
        let x = random_seq(1, 3, 2);
        let hs = lstm_layer_forward(&x, &p).unwrap();
        let (h1, _) = lstm_step(&x[0], &Tensor::zeros(&[5]), &Tensor::zeros(&[5]), &p).unwrap();
        assert!(hs[0].approx_eq(&h1, 1e-14));
    }

    #[test]
    fn layer_equals_iterated_scalar_steps() {
        let p = seeded_params(2, 3, 21);
        let xs = random_seq(6, 2, 3);
        let hs = lstm_layer_forward(&xs, &p).unwrap();
        let mut h = Tensor::zeros(&[3]);
        let mut c = Tensor::zeros(&[3]);
        for (t, x) in xs.iter().enumerate() {
            let (h2, c2) = lstm_step(x, &h, &c, &p).unwrap();
            h = h2;
            c = c2;
            assert!(hs[t].approx_eq(&h, 1e-13), "step {t}");
        }
    }

    #[test]
    fn zero_weights_give_zero_outputs() {
        let p = LstmParams::zeroed(2, 3);
        let xs = random_seq(4, 2, 9);
        let hs = lstm_layer_forward(&xs, &p).unwrap();
        assert!(hs.iter().all(|h| h.data().iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn causal_outputs_ignore_future_inputs() {
        let p = seeded_params(2, 4, 5);
        let mut xs = random_seq(5, 2, 17);
        let before = lstm_layer_forward(&xs, &p).unwrap();
        xs[3].data_mut()[0] += 10.0;
        xs[4].data_mut()[1] -= 3.0;
        let after = lstm_layer_forward(&xs, &p).unwrap();
        for t in 0..3 {
            assert_eq!(before[t].data(), after[t].data(), "step {t} changed");
        }
        assert_ne!(before[3].data(), after[3].data());
    }

    #[test]
    fn empty_sequence_errors() {
        let p = seeded_params(2, 3, 0);
        assert!(matches!(
            lstm_layer_forward(&[], &p),
            Err(Error::EmptySequence(_))
        ));
        assert!(matches!(
            blstm_layer_forward(&[], &p, &p),
            Err(Error::EmptySequence(_))
        ));
    }

    #[test]
    fn blstm_matches_two_unidirectional_passes() {
        let pf = seeded_params(3, 4, 31);
        let pb = seeded_params(3, 4, 32);
        let xs = random_seq(7, 3, 33);
        let out = blstm_layer_forward(&xs, &pf, &pb).unwrap();
        let hf = lstm_layer_forward(&xs, &pf).unwrap();
        let rev: Vec<Tensor> = xs.iter().rev().cloned().collect();
        let hb = lstm_layer_forward(&rev, &pb).unwrap();
        for t in 0..7 {
            assert_eq!(&out[t].data()[..4], hf[t].data());
            assert_eq!(&out[t].data()[4..], hb[6 - t].data());
        }
    }

    #[test]
    fn palindrome_with_shared_params_is_half_swap_symmetric() {
        let p = seeded_params(2, 3, 40);
        let mut xs = random_seq(3, 2, 41);
        // Make the sequence palindromic: x₁ x₂ x₁.
        xs[2] = xs[0].clone();
        let out = blstm_layer_forward(&xs, &p, &p).unwrap();
        let n = xs.len();
        for t in 0..n {
            let (f_t, b_t) = out[t].data().split_at(3);
            let (f_m, b_m) = out[n - 1 - t].data().split_at(3);
            for j in 0..3 {
                assert!((f_t[j] - b_m[j]).abs() < 1e-14);
                assert!((b_t[j] - f_m[j]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn blstm_zero_weights_zero_output() {
        let p = LstmParams::zeroed(2, 3);
        let xs = random_seq(4, 2, 50);
        let out = blstm_layer_forward(&xs, &p, &p).unwrap();
        assert!(out.iter().all(|h| h.data().iter().all(|&v| v == 0.0)));
    }
}
