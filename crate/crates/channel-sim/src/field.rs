//! Concentration field and one explicit time step of the coupled
//! acid/base system.
//!
//! Per step, for each species: central-difference diffusion, first-order
//! upwind advection, and the pointwise neutralization term
//! `−k_f·C_H·C_OH + k_r` applied identically to both species. Injection
//! adds source mass at the transmitter cell while a pump is active.
//! Negative values are clamped to zero (the explicit scheme under the
//! validated step limits is positivity-preserving; the clamp is a guard).

use crate::params::{BoundaryMode, ChannelParams};

/// Physical width of the pump's injection zone.
pub const INJECTION_ZONE_M: f64 = 1.0e-3;

/// Cell range `[lo, hi)` covering the injection zone around the
/// transmitter, at least one cell wide.
fn injection_zone(params: &ChannelParams, n: usize) -> (usize, usize) {
    let lo = ((params.tx_position - 0.5 * INJECTION_ZONE_M) / params.dx).round() as isize;
    let hi = ((params.tx_position + 0.5 * INJECTION_ZONE_M) / params.dx).round() as isize;
    let lo = lo.clamp(0, n as isize - 1) as usize;
    let hi = (hi.max(lo as isize + 1)).clamp(1, n as isize) as usize;
    (lo, hi)
}

/// Per-cell (C_H, C_OH) in mol/L plus the current simulation time.
#[derive(Debug, Clone)]
pub struct ConcentrationField {
    pub c_h: Vec<f64>,
    pub c_oh: Vec<f64>,
    pub time: f64,
    scratch_h: Vec<f64>,
    scratch_oh: Vec<f64>,
}

impl ConcentrationField {
    /// Uniform background field.
    pub fn background(params: &ChannelParams) -> Self {
        let n = params.n_cells();
        ConcentrationField {
            c_h: vec![params.background.0; n],
            c_oh: vec![params.background.1; n],
            time: 0.0,
            scratch_h: vec![0.0; n],
            scratch_oh: vec![0.0; n],
        }
    }

    pub fn n_cells(&self) -> usize {
        self.c_h.len()
    }

    /// Total amount per species (concentration × cell width summed over
    /// the grid).
    pub fn mass(&self, params: &ChannelParams) -> (f64, f64) {
        let h: f64 = self.c_h.iter().sum::<f64>() * params.dx;
        let oh: f64 = self.c_oh.iter().sum::<f64>() * params.dx;
        (h, oh)
    }

    /// Advances the field by one `params.dt` step. `active` says which
    /// species the pump is injecting during this step.
    pub fn step(&mut self, params: &ChannelParams, active: (bool, bool)) {
        let n = self.n_cells();
        let dt = params.dt;
        let inv_dx2 = 1.0 / (params.dx * params.dx);
        let inv_dx = 1.0 / params.dx;
        let v = params.v;
        let (kf, kr) = (params.k_f, params.k_r);
        let closed = params.boundary == BoundaryMode::Closed;

        {
            let ch = &self.c_h;
            let coh = &self.c_oh;
            let nh = &mut self.scratch_h;
            let noh = &mut self.scratch_oh;
            for i in 0..n {
                // Ghost cells: closed boundaries mirror, flow boundaries
                // extend with background upstream / zero-gradient downstream.
                let (h_l, oh_l) = if i > 0 {
                    (ch[i - 1], coh[i - 1])
                } else if closed {
                    (ch[0], coh[0])
                } else {
                    (params.background.0, params.background.1)
                };
                let (h_r, oh_r) = if i + 1 < n {
                    (ch[i + 1], coh[i + 1])
                } else {
                    (ch[n - 1], coh[n - 1])
                };
                let react = -kf * ch[i] * coh[i] + kr;

                let mut dh = params.d_h * (h_l - 2.0 * ch[i] + h_r) * inv_dx2 + react;
                let mut doh = params.d_oh * (oh_l - 2.0 * coh[i] + oh_r) * inv_dx2 + react;
                if v > 0.0 {
                    dh -= v * (ch[i] - h_l) * inv_dx;
                    doh -= v * (coh[i] - oh_l) * inv_dx;
                } else if v < 0.0 {
                    dh -= v * (h_r - ch[i]) * inv_dx;
                    doh -= v * (oh_r - coh[i]) * inv_dx;
                }
                nh[i] = (ch[i] + dt * dh).max(0.0);
                noh[i] = (coh[i] + dt * doh).max(0.0);
            }
        }

        if active.0 || active.1 {
            // Amplitude is the concentration a 30 ms event adds across the
            // fixed 1 mm injection zone; spreading it over the event
            // duration and the zone keeps the deposited amount invariant
            // to both the time step and the grid spacing.
            let (lo, hi) = injection_zone(params, n);
            let cells = (hi - lo) as f64;
            let scale = dt / 0.030 * INJECTION_ZONE_M / (cells * params.dx);
            if active.0 {
                let add = params.injection_amplitude.0 * scale;
                for c in &mut self.scratch_h[lo..hi] {
                    *c += add;
                }
            }
            if active.1 {
                let add = params.injection_amplitude.1 * scale;
                for c in &mut self.scratch_oh[lo..hi] {
                    *c += add;
                }
            }
        }

        if !closed {
            // Inflow cell pinned to background: fresh carrier enters.
            self.scratch_h[0] = params.background.0;
            self.scratch_oh[0] = params.background.1;
        }

        std::mem::swap(&mut self.c_h, &mut self.scratch_h);
        std::mem::swap(&mut self.c_oh, &mut self.scratch_oh);
        self.time += dt;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quiet_closed() -> ChannelParams {
        ChannelParams {
            v: 0.0,
            k_f: 0.0,
            k_r: 0.0,
            boundary: BoundaryMode::Closed,
            ..ChannelParams::default()
        }
    }

    #[test]
    fn zero_field_without_sources_stays_zero() {
        let params = ChannelParams {
            v: 0.0,
            k_r: 0.0,
            boundary: BoundaryMode::Closed,
            background: (1e-30, 1e-30),
            ..ChannelParams::default()
        };
        let mut f = ConcentrationField::background(&params);
        for c in f.c_h.iter_mut().chain(f.c_oh.iter_mut()) {
            *c = 0.0;
        }
        for _ in 0..100 {
            f.step(&params, (false, false));
        }
        assert!(f.c_h.iter().all(|&c| c == 0.0));
        assert!(f.c_oh.iter().all(|&c| c == 0.0));
    }

    #[test]
    fn diffusion_conserves_mass_on_closed_domain() {
        let params = ChannelParams {
            // Fast diffusion so the test exercises real transport.
            d_h: 4e-3,
            d_oh: 2e-3,
            dt: 0.4 * 1e-6 / 4e-3,
            ..quiet_closed()
        };
        params.validate().unwrap();
        let mut f = ConcentrationField::background(&params);
        // Asymmetric initial blob.
        let n = f.n_cells();
        f.c_h[n / 3] = 1e-4;
        f.c_oh[n / 2] = 2e-4;
        let before = f.mass(&params);
        for _ in 0..10_000 {
            f.step(&params, (false, false));
        }
        let after = f.mass(&params);
        assert!(
            ((after.0 - before.0) / before.0).abs() < 1e-9,
            "H mass drifted: {} -> {}",
            before.0,
            after.0
        );
        assert!(((after.1 - before.1) / before.1).abs() < 1e-9);
    }

    #[test]
    fn equilibrium_product_field_is_stationary() {
        // C_H = C_OH = sqrt(k_r/k_f) zeroes the reaction term exactly.
        let params = ChannelParams {
            v: 0.0,
            boundary: BoundaryMode::Closed,
            ..ChannelParams::default()
        };
        let eq = (params.k_r / params.k_f).sqrt();
        assert!((eq - 1e-7).abs() < 1e-20);
        let mut f = ConcentrationField::background(&params);
        for _ in 0..1000 {
            let before: Vec<f64> = f.c_h.clone();
            f.step(&params, (false, false));
            for (a, b) in before.iter().zip(&f.c_h) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn concentrations_never_go_negative() {
        let params = ChannelParams::default();
        let mut f = ConcentrationField::background(&params);
        for step in 0..40_000 {
            let active = (step % 4000 < 1200, step % 4000 >= 2000 && step % 4000 < 3200);
            f.step(&params, active);
            debug_assert!(f.c_h.iter().all(|&c| c >= 0.0));
            debug_assert!(f.c_oh.iter().all(|&c| c >= 0.0));
        }
        assert!(f.c_h.iter().all(|&c| c >= 0.0));
        assert!(f.c_oh.iter().all(|&c| c >= 0.0));
    }
}
