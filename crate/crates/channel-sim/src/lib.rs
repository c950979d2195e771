//! Simulated pH channel.
//!
//! A transmitter pumps acid or base into a 1-D tube with a steady
//! carrier flow; hydrogen and hydroxide concentrations evolve under
//! diffusion, advection and the neutralization reaction, and a receiver
//! probe samples pH downstream. [`simulate`] integrates the coupled
//! PDE system explicitly; [`surrogate`] provides a cheap linear-ISI
//! stand-in channel for oracles and fast tests.
//!
//! A simulation run is single-threaded and deterministic given its
//! seed; independent runs share no mutable state.

pub mod field;
pub mod params;
pub mod schedule;
pub mod simulate;
pub mod surrogate;
pub mod trace;

pub use field::ConcentrationField;
pub use params::{BoundaryMode, ChannelConfig, ChannelParams};
pub use schedule::{FrameTiming, Injection, InjectionSchedule, Species};
pub use simulate::{ph_from_concentration, simulate};
pub use surrogate::{surrogate_channel, SurrogateParams};
pub use trace::{TraceMeta, WaveformTrace};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid channel configuration: {0}")]
    InvalidConfig(String),
    #[error("stability violation: {0}")]
    Unstable(String),
    #[error("duration {duration}s ends before the last injection at {last_end}s")]
    DurationTooShort { duration: f64, last_end: f64 },
    #[error("concentration must be positive, got {0}")]
    NonPositiveConcentration(f64),
    #[error("invalid trace file: {0}")]
    BadTraceFile(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
