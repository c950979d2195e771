//! Minimal neural-network engine in 64-bit floats.
//!
//! Everything a small detection network needs and nothing more: dense,
//! 1-D convolution, max pooling, LSTM and bidirectional LSTM layers, a
//! softmax head with cross-entropy loss, exact backpropagation (full
//! unroll through time for the recurrent layers) and the Adam optimizer.
//!
//! Layers operate on batches. A network input is a sequence of steps,
//! one [`Tensor`] per step, whose leading extent is the batch size.
//! Symbol-by-symbol networks simply use single-step sequences. All
//! forward and backward passes are pure functions of `(parameters,
//! input)`; nothing here spawns threads or touches globals, so
//! independent networks can run on separate threads freely.

pub mod activation;
pub mod adam;
pub mod checkpoint;
pub mod conv1d;
pub mod dense;
pub mod gradcheck;
pub mod init;
pub mod lstm;
pub mod network;
pub mod pmf;
pub mod pool;
pub mod softmax;
pub mod tensor;

pub use activation::Activation;
pub use adam::AdamState;
pub use checkpoint::Container;
pub use conv1d::Conv1d;
pub use dense::Dense;
pub use lstm::{lstm_step, Blstm, Lstm, LstmParams};
pub use network::{GradientBundle, Layer, Network};
pub use pmf::Pmf;
pub use pool::{max_pool1d, MaxPool1d};
pub use softmax::{cross_entropy, softmax, softmax_rows};
pub use tensor::Tensor;

/// Errors surfaced by the engine.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch in {context}: expected {expected:?}, got {got:?}")]
    ShapeMismatch {
        context: &'static str,
        expected: Vec<usize>,
        got: Vec<usize>,
    },
    #[error("empty sequence passed to {0}")]
    EmptySequence(&'static str),
    #[error("backward called without a cached forward pass")]
    NoForwardCache,
    #[error("invalid probability vector: {0}")]
    InvalidPmf(String),
    #[error("invalid checkpoint: {0}")]
    BadCheckpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("checkpoint header is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
