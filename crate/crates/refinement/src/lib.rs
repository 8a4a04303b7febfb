//! A second extraction pass over the residual, detection of the true mode
//! count from spectral similarity, and merging of pieces that belong to the
//! same mode. [`pipeline`] chains all stages with elongation.

mod count;
mod merge;
pub mod pipeline;

pub use count::{detect_mode_count, normalized_distance, profile_distance, ModeCountVerdict};
pub use merge::{fold_modes, merge_modes, Folded};
pub use pipeline::{run_pipeline, PipelineConfig, PipelineOutput};

use spectral::{HalfSpectrum, SpectralError};
use svmd_core::{extract_one, smoothed_magnitudes, DecompositionResult, SvmdConfig, SvmdError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RefineError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Svmd(#[from] SvmdError),
    #[error(transparent)]
    Pcr(#[from] elongation_pcr::PcrError),
}

pub type Result<T> = std::result::Result<T, RefineError>;

#[derive(Debug, Clone, PartialEq)]
pub struct RefineConfig {
    /// Second-cycle stop on residual power, as a fraction of input power.
    pub eps_refine: f64,
    /// Center-frequency radius for [`merge_modes`], and the search radius
    /// around each first-cycle center when seeding the second cycle.
    pub merge_tol_hz: f64,
    /// Distance below which a component counts as a repeat.
    pub jump_threshold: f64,
    /// Seed the second cycle only where the residual peak exceeds this
    /// multiple of the residual noise floor.
    pub snr_stop: f64,
    /// Penalties of the second cycle, in 1/Hz².
    pub alpha: f64,
    pub beta: f64,
    /// Gaussian smoothing (Hz) of magnitude spectra before comparing them.
    pub profile_smoothing_hz: f64,
    /// Components beyond the mode count join their most similar mode only
    /// if closer than this; the rest go to the residual.
    pub fold_max_distance: f64,
    /// Components with less power than this fraction of the input are
    /// dropped into the residual before counting.
    pub min_mode_power: f64,
}

impl Default for RefineConfig {
    fn default() -> Self {
        Self {
            eps_refine: 1e-4,
            merge_tol_hz: 10.0,
            jump_threshold: 0.3,
            snr_stop: 3.0,
            alpha: 0.035,
            beta: 1e-6,
            profile_smoothing_hz: 20.0,
            fold_max_distance: 1.0,
            min_mode_power: 1e-5,
        }
    }
}

impl RefineConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(RefineError::InvalidConfig(m.into()));
        if !(self.eps_refine > 0.0 && self.eps_refine < 1.0) {
            return bad("eps_refine must lie in (0, 1)");
        }
        if !(self.merge_tol_hz > 0.0) {
            return bad("merge tolerance must be positive");
        }
        if !(self.jump_threshold > 0.0 && self.jump_threshold < 1.0) {
            return bad("jump threshold must lie in (0, 1)");
        }
        if !(self.snr_stop > 0.0) {
            return bad("snr_stop must be positive");
        }
        if !(self.alpha > 0.0 && self.beta > 0.0) {
            return bad("second-cycle penalties must be positive");
        }
        if !(self.profile_smoothing_hz >= 0.0 && self.fold_max_distance >= 0.0 && self.min_mode_power >= 0.0) {
            return bad("smoothing, fold distance and power floor must be non-negative");
        }
        Ok(())
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(|a, b| a.total_cmp(b));
    v[v.len() / 2]
}

/// Median bin power of `r` away from the given centers.
pub fn noise_floor(r: &HalfSpectrum, centers_hz: &[f64], radius_hz: f64) -> f64 {
    let outside: Vec<f64> = r
        .bins
        .iter()
        .enumerate()
        .filter(|(k, _)| centers_hz.iter().all(|c| (r.freq(*k) - c).abs() > radius_hz))
        .map(|(_, b)| b.norm_sqr())
        .collect();
    if outside.is_empty() {
        median(r.bins.iter().map(|b| b.norm_sqr()).collect())
    } else {
        median(outside)
    }
}

/// Extract more components from `first.residual`, one per first-cycle mode,
/// each started from the strongest residual bin near that mode's center.
///
/// The returned result holds only the new components; its residual is what
/// remains after them.
pub fn second_cycle(
    first: &DecompositionResult,
    cfg_svmd: &SvmdConfig,
    cfg_ref: &RefineConfig,
) -> Result<DecompositionResult> {
    cfg_ref.validate()?;
    let cfg = SvmdConfig {
        alpha: cfg_ref.alpha,
        beta: cfg_ref.beta,
        ..cfg_svmd.clone()
    };
    let centers: Vec<f64> = first.modes.iter().map(|m| m.center_hz).collect();
    let mut r = first.residual.clone();
    let floor = noise_floor(&r, &centers, cfg_ref.merge_tol_hz);
    let mut modes = Vec::new();
    let mut traces = Vec::new();
    for &c in &centers {
        if r.power() <= cfg_ref.eps_refine * first.input_power {
            break;
        }
        let smooth = smoothed_magnitudes(&r, cfg.peak_smoothing_bins);
        let lo = r.bin_of((c - cfg_ref.merge_tol_hz).max(0.0));
        let hi = r.bin_of(c + cfg_ref.merge_tol_hz);
        let Some(j) = (lo..=hi).max_by(|&a, &b| smooth[a].total_cmp(&smooth[b])) else {
            continue;
        };
        if smooth[j] * smooth[j] < cfg_ref.snr_stop * floor || r.bins[j].norm() == 0.0 {
            continue;
        }
        let mut init = r.zeros_like();
        init.bins[j] = r.bins[j];
        let (mode, trace) = match extract_one(&r, &init, &cfg) {
            Ok(x) => x,
            Err(SvmdError::Spectral(SpectralError::DegenerateSpectrum)) => continue,
            Err(e) => return Err(e.into()),
        };
        r = r.sub(&mode.spectrum);
        modes.push(mode);
        traces.push(trace);
    }
    Ok(DecompositionResult {
        modes,
        residual: r,
        traces,
        input_power: first.input_power,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Refined {
    pub result: DecompositionResult,
    pub verdict: ModeCountVerdict,
    /// Number of second-cycle components before folding.
    pub n_second: usize,
}

/// Second cycle, mode-count detection over first plus second cycle
/// components, then folding of every repeat into its closest mode.
pub fn refine(
    first: &DecompositionResult,
    cfg_svmd: &SvmdConfig,
    cfg_ref: &RefineConfig,
) -> Result<Refined> {
    let second = second_cycle(first, cfg_svmd, cfg_ref)?;
    let mut all = first.modes.clone();
    all.extend(second.modes.iter().cloned());
    let verdict = detect_mode_count(&all, cfg_ref)?;
    let folded = fold_modes(&all, &verdict, cfg_ref)?;
    let mut residual = second.residual.clone();
    residual.add_assign(&folded.dropped);
    let mut traces = first.traces.clone();
    traces.extend(second.traces.iter().cloned());
    Ok(Refined {
        result: DecompositionResult {
            modes: folded.modes,
            residual,
            traces,
            input_power: first.input_power,
        },
        verdict,
        n_second: second.modes.len(),
    })
}
