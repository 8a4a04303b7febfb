//! Sequential variational mode decomposition.
//!
//! Modes are pulled out of the analytic spectrum one at a time. Each
//! extraction alternates between estimating the center frequency of the
//! current mode, the center frequency of what is left over, and a closed-form
//! bin-wise update that keeps both of them narrowband.

mod config;
mod extract;
mod peaks;

pub use config::{InitPolicy, SvmdConfig};
pub use extract::{
    decompose, decompose_spectrum, extract_one, objective, update_mode, DecompositionResult,
    ExtractionTrace, IterationRecord, Mode,
};
pub use peaks::{init_from_peaks, smoothed_magnitudes, Peak};

use spectral::SpectralError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SvmdError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("no admissible spectral peak left")]
    NoPeak,
}

pub type Result<T> = std::result::Result<T, SvmdError>;
