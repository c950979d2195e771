//! Linear-superposition stand-in channel.
//!
//! Each transmitted bit deposits a smooth bump in the pH trace, signed
//! by polarity (acid down, base up). ISI is modeled by echoing the bump
//! into later symbol windows scaled by `isi_taps[j]`, and the whole
//! transmission arrives after a fixed propagation delay. Orders of
//! magnitude faster than the PDE integration; used as the oracle and
//! quick-test channel.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::schedule::FrameTiming;
use crate::trace::WaveformTrace;
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SurrogateParams {
    pub sample_rate: f64,
    /// Window-aligned echo gains; taps[0] scales the bit's own window.
    pub isi_taps: Vec<f64>,
    /// Std of additive Gaussian noise, pH units.
    pub noise_std: f64,
    /// Peak pH deflection of one symbol bump.
    pub amplitude: f64,
    /// Fixed propagation delay before anything arrives, seconds.
    pub delay: f64,
}

impl Default for SurrogateParams {
    fn default() -> Self {
        SurrogateParams {
            sample_rate: 200.0,
            isi_taps: vec![1.0, 0.3],
            noise_std: 0.0,
            amplitude: 1.2,
            delay: 0.3,
        }
    }
}

impl SurrogateParams {
    pub fn validate(&self) -> Result<()> {
        if self.isi_taps.is_empty() {
            return Err(Error::InvalidConfig("isi_taps must be nonempty".into()));
        }
        if self.sample_rate <= 0.0 {
            return Err(Error::InvalidConfig("sample_rate must be positive".into()));
        }
        if self.delay < 0.0 || self.amplitude <= 0.0 || self.noise_std < 0.0 {
            return Err(Error::InvalidConfig(
                "delay/amplitude/noise_std out of range".into(),
            ));
        }
        Ok(())
    }
}

/// Raised-cosine bump on [0, width): smooth, compact, peak 1.
fn bump(u: f64, width: f64) -> f64 {
    if u < 0.0 || u >= width {
        0.0
    } else {
        let s = (std::f64::consts::PI * u / width).sin();
        s * s
    }
}

/// Renders the pH trace for a bit sequence. Bit 0 pulls pH down (acid),
/// bit 1 pushes it up (base); a sync bump (acid polarity) leads the
/// frame. Deterministic given `seed`.
pub fn surrogate_channel(
    bits: &[u8],
    timing: &FrameTiming,
    params: &SurrogateParams,
    seed: u64,
) -> Result<WaveformTrace> {
    params.validate()?;
    debug_assert!(bits.iter().all(|&b| b <= 1));
    let fs = params.sample_rate;
    let preamble = timing.preamble_end();
    let tail = params.isi_taps.len() as f64 * timing.symbol_s + 0.2;
    let duration = params.delay + preamble + bits.len() as f64 * timing.symbol_s + tail;
    let n = (duration * fs).floor() as usize + 1;
    let mut samples = vec![7.0f64; n];

    // Bump confined to one symbol window so tap j is exactly the echo
    // amplitude in window k + j.
    let width = 0.6 * timing.symbol_s;
    let sync_width = 0.25;
    let sync_start = params.delay;
    for (i, s) in samples.iter_mut().enumerate() {
        let t = i as f64 / fs;
        // Sync pulse: acid polarity, stronger than a data symbol.
        *s -= 1.5 * params.amplitude * bump(t - sync_start, sync_width);
        for (k, &bit) in bits.iter().enumerate() {
            let polarity = if bit == 1 { 1.0 } else { -1.0 };
            let t_k = params.delay + preamble + k as f64 * timing.symbol_s;
            for (j, &tap) in params.isi_taps.iter().enumerate() {
                if tap == 0.0 {
                    continue;
                }
                let u = t - (t_k + j as f64 * timing.symbol_s);
                if u >= 0.0 && u < width {
                    *s += polarity * tap * params.amplitude * bump(u, width);
                }
            }
        }
    }

    if params.noise_std > 0.0 {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, params.noise_std).expect("validated std");
        for s in &mut samples {
            *s += normal.sample(&mut rng);
        }
    }
    for s in &mut samples {
        *s = s.clamp(0.0, 14.0);
    }
    Ok(WaveformTrace::new(fs, samples))
}
