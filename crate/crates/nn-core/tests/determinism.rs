//! Fixed seed ⇒ bit-identical parameters after N optimization steps.

use nn_core::activation::Activation;
use nn_core::adam::adam_step;
use nn_core::{AdamState, Dense, Layer, Lstm, Network, Tensor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

fn train_run(seed: u64, steps: usize) -> Vec<Vec<f64>> {
    let mut net = Network::new(vec![
        Layer::Lstm(Lstm::new(3, 4, seed)),
        Layer::Dense(Dense::new(4, 2, Activation::Identity, seed + 1)),
        Layer::Softmax,
    ]);
    let mut state = AdamState::new(&net);
    let mut rng = ChaCha12Rng::seed_from_u64(seed + 2);
    for _ in 0..steps {
        let xs: Vec<Tensor> = (0..3)
            .map(|_| {
                let data: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
                Tensor::from_vec(&[2, 3], data).unwrap()
            })
            .collect();
        let targets: Vec<Tensor> = (0..3)
            .map(|_| {
                let mut t = Tensor::zeros(&[2, 2]);
                for b in 0..2 {
                    let idx = rng.gen_range(0..2);
                    t.data_mut()[b * 2 + idx] = 1.0;
                }
                t
            })
            .collect();
        let (_, grads) = net.loss_and_grad(&xs, &targets).unwrap();
        adam_step(&mut net, &grads, &mut state, 1e-3).unwrap();
    }
    net.params().iter().map(|p| p.data().to_vec()).collect()
}

#[test]
fn identical_seeds_give_bit_identical_parameters() {
    let a = train_run(99, 25);
    let b = train_run(99, 25);
    assert_eq!(a.len(), b.len());
    for (ta, tb) in a.iter().zip(&b) {
        for (x, y) in ta.iter().zip(tb) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }
}

#[test]
fn different_seeds_diverge() {
    let a = train_run(99, 5);
    let b = train_run(100, 5);
    assert!(a.iter().flatten().zip(b.iter().flatten()).any(|(x, y)| x != y));
}
