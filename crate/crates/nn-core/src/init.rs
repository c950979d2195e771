//! Weight initialization: Glorot-uniform for input-to-hidden and dense
//! kernels, orthogonal (QR of a Gaussian draw) for hidden-to-hidden
//! recurrences.

use rand::Rng;
use rand_chacha::ChaCha12Rng;

use crate::tensor::Tensor;

/// Glorot-uniform draw for a kernel with the given fan-in and fan-out.
pub fn glorot_uniform(rng: &mut ChaCha12Rng, shape: &[usize], fan_in: usize, fan_out: usize) -> Tensor {
    let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
    let mut t = Tensor::zeros(shape);
    for w in t.data_mut() {
        *w = rng.gen_range(-limit..limit);
    }
    t
}

/// Square orthogonal-ish matrix: modified Gram-Schmidt QR of a standard
/// Gaussian draw, returned row-major as [n, n].
pub fn orthogonal(rng: &mut ChaCha12Rng, n: usize) -> Tensor {
    // Box-Muller Gaussian draws.
    let mut cols = vec![vec![0.0f64; n]; n];
    for col in cols.iter_mut() {
        for v in col.iter_mut() {
            let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
            let u2: f64 = rng.gen_range(0.0..1.0);
            *v = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
        }
    }
    // Modified Gram-Schmidt over columns.
    for j in 0..n {
        for i in 0..j {
            let dot: f64 = (0..n).map(|k| cols[i][k] * cols[j][k]).sum();
            for k in 0..n {
                cols[j][k] -= dot * cols[i][k];
            }
        }
        let norm: f64 = (0..n).map(|k| cols[j][k] * cols[j][k]).sum::<f64>().sqrt();
        // A degenerate draw has measure zero; fall back to a unit vector.
        if norm < 1e-12 {
            for k in 0..n {
                cols[j][k] = if k == j { 1.0 } else { 0.0 };
            }
        } else {
            for k in 0..n {
                cols[j][k] /= norm;
            }
        }
    }
    let mut t = Tensor::zeros(&[n, n]);
    for r in 0..n {
        for c in 0..n {
            t.data_mut()[r * n + c] = cols[c][r];
        }
    }
    t
}

/// Stacked orthogonal blocks for an [m*n, n] recurrent kernel (one block
/// per gate).
pub fn stacked_orthogonal(rng: &mut ChaCha12Rng, blocks: usize, n: usize) -> Tensor {
    let mut t = Tensor::zeros(&[blocks * n, n]);
    for b in 0..blocks {
        let block = orthogonal(rng, n);
        t.data_mut()[b * n * n..(b + 1) * n * n].copy_from_slice(block.data());
    }
    t
}
