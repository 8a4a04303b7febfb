//! Real signals, their one-sided analytic spectra, and spectral moments.
//!
//! Convention: the forward DFT is unnormalized and the inverse carries the
//! `1/N` factor. The analytic spectrum keeps DC (and Nyquist, for even
//! lengths) at unit weight and doubles every strictly positive bin, so the
//! real part of the inverse transform gives the input back exactly.

mod signal;
mod transform;

pub use signal::{HalfSpectrum, Signal};
pub use transform::{
    analytic_signal, analytic_spectrum, center_frequency, full_spectrum, inverse_to_time,
};

pub use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpectralError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("degenerate spectrum: total power is zero")]
    DegenerateSpectrum,
}

pub type Result<T> = std::result::Result<T, SpectralError>;
