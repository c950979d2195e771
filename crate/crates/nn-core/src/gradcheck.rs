//! Central-finite-difference gradient oracle.
//!
//! Deliberately independent of the backward pass: it only ever calls
//! [`Network::loss`], perturbing one parameter at a time.

use crate::network::Network;
use crate::tensor::Tensor;

/// Numerical gradient of the loss w.r.t. every parameter, same order as
/// [`Network::params`]. `h` is the central-difference half step.
pub fn numerical_gradient(
    net: &mut Network,
    xs: &[Tensor],
    targets: &[Tensor],
    h: f64,
) -> Vec<Tensor> {
    let shapes: Vec<Vec<usize>> = net.params().iter().map(|p| p.shape().to_vec()).collect();
    let mut grads: Vec<Tensor> = shapes.iter().map(|s| Tensor::zeros(s)).collect();
    for (pi, shape) in shapes.iter().enumerate() {
        let count: usize = shape.iter().product();
        for j in 0..count {
            let orig = net.params()[pi].data()[j];
            net.params_mut()[pi].data_mut()[j] = orig + h;
            let up = net.loss(xs, targets).unwrap();
            net.params_mut()[pi].data_mut()[j] = orig - h;
            let down = net.loss(xs, targets).unwrap();
            net.params_mut()[pi].data_mut()[j] = orig;
            grads[pi].data_mut()[j] = (up - down) / (2.0 * h);
        }
    }
    grads
}

/// Max relative error between analytic and numerical gradients, with an
/// absolute floor so near-zero entries compare absolutely.
pub fn max_relative_error(analytic: &[Tensor], numeric: &[Tensor], floor: f64) -> f64 {
    let mut worst = 0.0f64;
    for (a, n) in analytic.iter().zip(numeric) {
        for (&av, &nv) in a.data().iter().zip(n.data()) {
            let denom = av.abs().max(nv.abs()).max(floor);
            worst = worst.max((av - nv).abs() / denom);
        }
    }
    worst
}
