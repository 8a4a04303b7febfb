//! Benchmark mixtures, quality metrics and the experiment runners built on
//! them.

mod experiments;
mod gen;
mod metrics;

pub use experiments::{
    convergent_interval, em_win_fraction, nominal_centers, par_map, run_compare, run_convergence_scan, run_noise_sweep,
    run_refine, run_svmd, run_vmd, score_modes, vmd_for, CompareRow, RefineRow, RefineSummary, ScanPoint, SvmdRun,
    SweepRow, CONVERGED_ER,
};
pub use gen::{gen_signal, mode_count, BenchSignal, GaussianNoise, N_SAMPLES, SAMPLE_RATE_HZ};
pub use metrics::{best_match, em, er, er_slice, q_ee, quality, QualityReport};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BenchError {
    #[error("unknown benchmark signal {0} (expected 1 to 4)")]
    UnknownSignal(u8),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("degenerate metric: {0}")]
    Degenerate(&'static str),
    #[error(transparent)]
    Spectral(#[from] spectral::SpectralError),
}

pub type Result<T> = std::result::Result<T, BenchError>;
