//! Channel parameters, validation and the declarative config format.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::surrogate::SurrogateParams;
use crate::{Error, Result};

/// Spatial boundary handling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryMode {
    /// Inflow cell held at background (fresh carrier advected in),
    /// outflow cell zero-gradient.
    #[default]
    Flow,
    /// Reflective at both ends; requires zero flow speed. Used for
    /// conservation checks.
    Closed,
}

/// Physical and numerical parameters of the tube channel.
///
/// Units: lengths m, times s, concentrations mol/L, diffusion m²/s,
/// forward rate L/(mol·s), reverse rate mol/(L·s). `injection_amplitude`
/// is the total concentration a nominal 30 ms pump event adds at the
/// injection cell; longer events scale linearly.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ChannelParams {
    pub d_h: f64,
    pub d_oh: f64,
    pub v: f64,
    pub k_f: f64,
    pub k_r: f64,
    pub tube_length: f64,
    pub tx_position: f64,
    pub rx_position: f64,
    pub dx: f64,
    pub dt: f64,
    /// Background (C_H, C_OH) the tube starts from and the inflow carries.
    pub background: (f64, f64),
    /// (acid, base) concentration added by one 30 ms event.
    pub injection_amplitude: (f64, f64),
    /// Std of the additive Gaussian probe noise, pH units.
    pub noise_std: f64,
    /// Probe sampling rate, Hz.
    pub sample_rate: f64,
    pub boundary: BoundaryMode,
}

impl Default for ChannelParams {
    fn default() -> Self {
        ChannelParams {
            d_h: 9.3e-9,
            d_oh: 5.3e-9,
            v: 0.6,
            k_f: 1.0e7,
            k_r: 1.0e-7,
            tube_length: 0.2,
            tx_position: 0.02,
            rx_position: 0.15,
            dx: 1.0e-3,
            dt: 2.5e-5,
            background: (1.0e-7, 1.0e-7),
            injection_amplitude: (5.0e-4, 5.0e-4),
            noise_std: 0.0,
            sample_rate: 200.0,
            boundary: BoundaryMode::Flow,
        }
    }
}

impl ChannelParams {
    /// Checks physical invariants and the explicit-scheme stability
    /// guards; every constructor path calls this so an unstable
    /// configuration can never blow up silently mid-run.
    pub fn validate(&self) -> Result<()> {
        let err = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.dx > 0.0 && self.dt > 0.0 && self.tube_length > 0.0) {
            return err(format!(
                "dx ({}), dt ({}) and tube_length ({}) must be positive",
                self.dx, self.dt, self.tube_length
            ));
        }
        if !(self.rx_position > 0.0 && self.rx_position < self.tube_length) {
            return err(format!(
                "rx_position {} outside (0, {})",
                self.rx_position, self.tube_length
            ));
        }
        if !(self.tx_position > 0.0 && self.tx_position < self.rx_position) {
            return err(format!(
                "tx_position {} outside (0, rx_position {})",
                self.tx_position, self.rx_position
            ));
        }
        for (name, v) in [
            ("d_h", self.d_h),
            ("d_oh", self.d_oh),
            ("k_f", self.k_f),
            ("k_r", self.k_r),
            ("noise_std", self.noise_std),
        ] {
            if v < 0.0 {
                return err(format!("{name} must be >= 0, got {v}"));
            }
        }
        if self.background.0 <= 0.0 || self.background.1 <= 0.0 {
            return err("background concentrations must be positive".into());
        }
        if self.sample_rate <= 0.0 {
            return err(format!("sample_rate must be positive, got {}", self.sample_rate));
        }
        let d_max = self.d_h.max(self.d_oh);
        if d_max > 0.0 {
            let dt_diff = 0.4 * self.dx * self.dx / d_max;
            if self.dt > dt_diff {
                return Err(Error::Unstable(format!(
                    "dt {} exceeds diffusion limit 0.4·dx²/D = {dt_diff}",
                    self.dt
                )));
            }
        }
        if self.v != 0.0 {
            let dt_adv = 0.9 * self.dx / self.v.abs();
            if self.dt > dt_adv {
                return Err(Error::Unstable(format!(
                    "dt {} exceeds advection limit 0.9·dx/|v| = {dt_adv}",
                    self.dt
                )));
            }
        }
        if self.boundary == BoundaryMode::Closed && self.v != 0.0 {
            return err("closed boundaries require v = 0".into());
        }
        Ok(())
    }

    pub fn n_cells(&self) -> usize {
        (self.tube_length / self.dx).round() as usize
    }

    pub fn cell_of(&self, position: f64) -> usize {
        ((position / self.dx).round() as usize).min(self.n_cells() - 1)
    }

    pub fn tx_cell(&self) -> usize {
        self.cell_of(self.tx_position)
    }

    pub fn rx_cell(&self) -> usize {
        self.cell_of(self.rx_position)
    }

    /// Nominal advective transit time from injection to probe.
    pub fn transit_time(&self) -> f64 {
        if self.v > 0.0 {
            (self.rx_position - self.tx_position) / self.v
        } else {
            0.0
        }
    }

    /// Hex SHA-256 of the canonical JSON serialization; recorded in
    /// trace and dataset provenance headers.
    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(self).expect("params serialize");
        let mut hasher = Sha256::new();
        hasher.update(&json);
        let out = hasher.finalize();
        out.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_json_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let params: ChannelParams = serde_json::from_str(&text)?;
        params.validate()?;
        Ok(params)
    }
}

/// Which channel backend renders waveforms.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "backend", rename_all = "snake_case")]
pub enum ChannelConfig {
    Pde(ChannelParams),
    Surrogate(SurrogateParams),
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig::Pde(ChannelParams::default())
    }
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<()> {
        match self {
            ChannelConfig::Pde(p) => p.validate(),
            ChannelConfig::Surrogate(s) => s.validate(),
        }
    }

    pub fn sample_rate(&self) -> f64 {
        match self {
            ChannelConfig::Pde(p) => p.sample_rate,
            ChannelConfig::Surrogate(s) => s.sample_rate,
        }
    }

    pub fn noise_std(&self) -> f64 {
        match self {
            ChannelConfig::Pde(p) => p.noise_std,
            ChannelConfig::Surrogate(s) => s.noise_std,
        }
    }

    pub fn set_noise_std(&mut self, std: f64) {
        match self {
            ChannelConfig::Pde(p) => p.noise_std = std,
            ChannelConfig::Surrogate(s) => s.noise_std = std,
        }
    }

    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serialize");
        let mut hasher = Sha256::new();
        hasher.update(&json);
        hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_json_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        // A bare params object (no "backend" tag) is accepted as PDE.
        let cfg: ChannelConfig = match serde_json::from_str(&text) {
            Ok(c) => c,
            Err(_) => ChannelConfig::Pde(serde_json::from_str(&text)?),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
