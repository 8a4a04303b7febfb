use crate::SvmdError;

/// How each outer step picks its starting point.
#[derive(Debug, Clone, PartialEq)]
pub enum InitPolicy {
    /// Impulse at the strongest admissible spectral peak.
    HighestPeak,
    /// Impulses at these frequencies (Hz), one per extraction, in order.
    ExplicitFrequency(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmdConfig {
    /// Bandwidth penalty on the extracted mode, in 1/Hz².
    pub alpha: f64,
    /// Bandwidth penalty on the residual, in 1/Hz².
    pub beta: f64,
    /// Stop once residual power falls to this fraction of the input power.
    pub eps_outer: f64,
    /// Inner stop on the update norm.
    pub eta_inner: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    pub init_policy: InitPolicy,
    /// Divide the update norm by the mode power before comparing with
    /// `eta_inner`. Off gives the absolute criterion.
    pub relative_inner_stop: bool,
    /// Width of the moving average applied to magnitudes before peak search.
    pub peak_smoothing_bins: usize,
    /// Peaks closer than this to an already used peak are skipped.
    pub exclusion_radius_hz: f64,
    /// A peak is admissible only if its smoothed power exceeds this multiple
    /// of the median bin power.
    pub peak_snr: f64,
}

impl Default for SvmdConfig {
    fn default() -> Self {
        Self {
            alpha: 0.035,
            beta: 3.5e-6,
            eps_outer: 1e-3,
            eta_inner: 1e-7,
            max_outer: 50,
            max_inner: 500,
            init_policy: InitPolicy::HighestPeak,
            relative_inner_stop: true,
            peak_smoothing_bins: 5,
            exclusion_radius_hz: 5.0,
            peak_snr: 10.0,
        }
    }
}

impl SvmdConfig {
    pub fn validate(&self) -> Result<(), SvmdError> {
        let bad = |m: &str| Err(SvmdError::InvalidConfig(m.to_string()));
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return bad("alpha must be positive");
        }
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return bad("beta must be positive");
        }
        if !(self.eps_outer > 0.0 && self.eps_outer < 1.0) {
            return bad("eps_outer must lie in (0, 1)");
        }
        if !(self.eta_inner.is_finite() && self.eta_inner > 0.0) {
            return bad("eta_inner must be positive");
        }
        if self.max_outer == 0 || self.max_inner == 0 {
            return bad("iteration caps must be at least 1");
        }
        if self.peak_smoothing_bins == 0 {
            return bad("peak smoothing width must be at least 1");
        }
        if !(self.exclusion_radius_hz >= 0.0) || !(self.peak_snr >= 0.0) {
            return bad("peak search settings must be non-negative");
        }
        if let InitPolicy::ExplicitFrequency(f) = &self.init_policy {
            if f.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return bad("explicit init frequencies must be finite and non-negative");
            }
        }
        Ok(())
    }
}
