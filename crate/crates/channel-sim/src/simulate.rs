//! Schedule-to-waveform integration.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};

use crate::field::ConcentrationField;
use crate::params::ChannelParams;
use crate::schedule::InjectionSchedule;
use crate::trace::WaveformTrace;
use crate::{Error, Result};

/// pH of a hydrogen-ion concentration in mol/L.
pub fn ph_from_concentration(c_h: f64) -> Result<f64> {
    if c_h <= 0.0 || !c_h.is_finite() {
        return Err(Error::NonPositiveConcentration(c_h));
    }
    Ok(-c_h.log10())
}

/// Probe reading: concentration floored/capped so pH stays in [0, 14]
/// even when the neutralization reaction wipes a species out.
fn probe_ph(c_h: f64) -> f64 {
    -c_h.clamp(1e-14, 1.0).log10()
}

/// Integrates the field from background equilibrium over `duration`
/// seconds, recording pH at the receiver every 1/sample_rate with
/// additive Gaussian probe noise. Deterministic given `seed`.
pub fn simulate(
    schedule: &InjectionSchedule,
    duration: f64,
    params: &ChannelParams,
    seed: u64,
) -> Result<WaveformTrace> {
    params.validate()?;
    let last_end = schedule.last_end();
    if duration < last_end {
        return Err(Error::DurationTooShort {
            duration,
            last_end,
        });
    }
    let mut field = ConcentrationField::background(params);
    let rx = params.rx_cell();
    let n_samples = (duration * params.sample_rate).floor() as usize + 1;
    let mut samples = Vec::with_capacity(n_samples);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let noise = if params.noise_std > 0.0 {
        Some(Normal::new(0.0, params.noise_std).expect("validated std"))
    } else {
        None
    };
    let sample_dt = 1.0 / params.sample_rate;

    // Events sorted by start; advance a cursor instead of scanning.
    let events = schedule.events();
    let mut first_live = 0usize;

    fn record(
        samples: &mut Vec<f64>,
        c_h: f64,
        noise: &Option<Normal<f64>>,
        rng: &mut ChaCha12Rng,
    ) {
        let mut ph = probe_ph(c_h);
        if let Some(n) = noise {
            ph += n.sample(rng);
        }
        samples.push(ph.clamp(0.0, 14.0));
    }

    record(&mut samples, field.c_h[rx], &noise, &mut rng);
    let mut next_sample = sample_dt;
    while samples.len() < n_samples {
        // Pump state for the step starting at field.time.
        while first_live < events.len() && events[first_live].end() <= field.time {
            first_live += 1;
        }
        let mut active = (false, false);
        for e in &events[first_live..] {
            if e.start > field.time {
                break;
            }
            if field.time < e.end() {
                match e.species {
                    crate::schedule::Species::Acid => active.0 = true,
                    crate::schedule::Species::Base => active.1 = true,
                }
            }
        }
        field.step(params, active);
        if field.time + 1e-12 >= next_sample {
            record(&mut samples, field.c_h[rx], &noise, &mut rng);
            next_sample += sample_dt;
        }
    }
    Ok(WaveformTrace::new(params.sample_rate, samples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::{Injection, Species};

    #[test]
    fn ph_definition_cases() {
        assert_eq!(ph_from_concentration(1e-7).unwrap(), 7.0);
        assert_eq!(ph_from_concentration(1e-4).unwrap(), 4.0);
        assert!((ph_from_concentration(2e-7).unwrap() - 6.698970004336019).abs() < 1e-12);
        assert!(ph_from_concentration(0.0).is_err());
        assert!(ph_from_concentration(-1.0).is_err());
    }

    #[test]
    fn empty_schedule_holds_neutral_ph() {
        let params = ChannelParams::default();
        let trace = simulate(&InjectionSchedule::default(), 2.0, &params, 1).unwrap();
        for &s in trace.samples() {
            assert!((s - 7.0).abs() < 0.05, "pH drifted to {s}");
        }
    }

    #[test]
    fn acid_pulse_dips_then_recovers() {
        let params = ChannelParams::default();
        let schedule = InjectionSchedule::new(vec![Injection {
            start: 0.1,
            duration: 0.03,
            species: Species::Acid,
        }]);
        let trace = simulate(&schedule, 1.5, &params, 2).unwrap();
        let samples = trace.samples();
        let (min_idx, min_val) = samples
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &v)| {
                if v < acc.1 {
                    (i, v)
                } else {
                    acc
                }
            });
        let min_time = min_idx as f64 / params.sample_rate;
        assert!(min_val < 6.0, "pulse too weak: min pH {min_val}");
        assert!(min_time > 0.1, "minimum at {min_time}s precedes injection");
        // Recovers toward neutral after the slug passes.
        let tail = *samples.last().unwrap();
        assert!((tail - 7.0).abs() < 0.3, "tail pH {tail}");
    }

    #[test]
    fn base_pulse_mirrors_upward() {
        let params = ChannelParams::default();
        let schedule = InjectionSchedule::new(vec![Injection {
            start: 0.1,
            duration: 0.03,
            species: Species::Base,
        }]);
        let trace = simulate(&schedule, 1.5, &params, 3).unwrap();
        let max = trace.samples().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let max_idx = trace
            .samples()
            .iter()
            .position(|&v| v == max)
            .unwrap();
        assert!(max > 8.0, "base pulse too weak: max pH {max}");
        assert!(max_idx as f64 / params.sample_rate > 0.1);
    }

    #[test]
    fn duration_must_cover_schedule() {
        let params = ChannelParams::default();
        let schedule = InjectionSchedule::new(vec![Injection {
            start: 1.0,
            duration: 0.1,
            species: Species::Acid,
        }]);
        assert!(matches!(
            simulate(&schedule, 0.5, &params, 0),
            Err(Error::DurationTooShort { .. })
        ));
    }

    #[test]
    fn same_seed_same_trace() {
        let params = ChannelParams {
            noise_std: 0.2,
            ..ChannelParams::default()
        };
        let schedule = InjectionSchedule::new(vec![Injection {
            start: 0.05,
            duration: 0.03,
            species: Species::Acid,
        }]);
        let a = simulate(&schedule, 0.8, &params, 42).unwrap();
        let b = simulate(&schedule, 0.8, &params, 42).unwrap();
        assert_eq!(a.samples(), b.samples());
        let c = simulate(&schedule, 0.8, &params, 43).unwrap();
        assert_ne!(a.samples(), c.samples());
    }

    #[test]
    fn halving_dt_barely_moves_the_waveform() {
        let params = ChannelParams::default();
        let schedule = InjectionSchedule::new(vec![Injection {
            start: 0.05,
            duration: 0.03,
            species: Species::Acid,
        }]);
        let coarse = simulate(&schedule, 1.0, &params, 0).unwrap();
        let fine_params = ChannelParams {
            dt: params.dt / 2.0,
            ..params
        };
        let fine = simulate(&schedule, 1.0, &fine_params, 0).unwrap();
        let rel = coarse.relative_rms_diff(&fine);
        assert!(rel < 0.01, "dt halving moved waveform by {rel:.4}");
    }

    #[test]
    fn halving_dx_converges_in_diffusion_regime() {
        // Flow-free configuration: transport is diffusion + reaction, the
        // regime where the spatial discretization error is observable and
        // second-order.
        let base = ChannelParams {
            v: 0.0,
            d_h: 1e-5,
            d_oh: 0.6e-5,
            boundary: crate::params::BoundaryMode::Closed,
            tube_length: 0.1,
            tx_position: 0.02,
            rx_position: 0.04,
            dt: 5e-3,
            dx: 1e-3,
            sample_rate: 50.0,
            ..ChannelParams::default()
        };
        base.validate().unwrap();
        let schedule = InjectionSchedule::new(vec![Injection {
            start: 0.5,
            duration: 0.03,
            species: Species::Acid,
        }]);
        let coarse = simulate(&schedule, 60.0, &base, 0).unwrap();
        let fine_params = ChannelParams {
            dx: base.dx / 2.0,
            ..base
        };
        let fine = simulate(&schedule, 60.0, &fine_params, 0).unwrap();
        let rel = coarse.relative_rms_diff(&fine);
        assert!(rel < 0.02, "dx halving moved waveform by {rel:.4}");
    }
}
