//! Principal component restoring (PCR): extend a record at both ends with a
//! locally fitted trend plus its dominant sinusoids, decompose the longer
//! record, then crop the results back.
//!
//! End effects come from the implicit periodic wrap of the DFT. Extending
//! each end with a plausible continuation pushes that discontinuity out of
//! the region of interest.

mod fit;

use std::f64::consts::PI;

use spectral::{analytic_spectrum, HalfSpectrum, Signal, SpectralError};
use svmd_core::{DecompositionResult, Mode, SvmdError};

pub use fit::{eval_model, polyfit, weighted_fit, EndModel};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PcrError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Svmd(#[from] SvmdError),
}

pub type Result<T> = std::result::Result<T, PcrError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PcrConfig {
    /// Fraction of the record used at each end for fitting.
    pub end_window_frac: f64,
    /// Extension length per end as a fraction of the record length.
    pub extension_frac: f64,
    /// Polynomial order of the local trend, 1 or 2.
    pub trend_order: usize,
    /// Number of sinusoids restored per end.
    pub n_principal: usize,
    /// Weight of a window sample is (rank from the end)^-exponent.
    pub weighting_exponent: f64,
    /// Spectral peaks weaker than this multiple of the median bin power are
    /// not restored. Keeps noise lines out of the extension.
    pub component_snr: f64,
    /// Use one whole-record trend for both ends instead of local fits.
    pub global_trend: bool,
    /// Blend both far ends to a common level so the periodic wrap is smooth.
    pub far_end_taper: bool,
}

impl Default for PcrConfig {
    fn default() -> Self {
        Self {
            end_window_frac: 0.1,
            extension_frac: 0.3,
            trend_order: 1,
            n_principal: 3,
            weighting_exponent: 1.0,
            component_snr: 10.0,
            global_trend: false,
            far_end_taper: true,
        }
    }
}

impl PcrConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.end_window_frac > 0.0 && self.end_window_frac <= 0.5) {
            return Err(PcrError::InvalidInput("end window fraction must lie in (0, 0.5]".into()));
        }
        if !(self.extension_frac >= 0.0 && self.extension_frac.is_finite()) {
            return Err(PcrError::InvalidInput("extension fraction must be non-negative".into()));
        }
        if !(1..=2).contains(&self.trend_order) {
            return Err(PcrError::InvalidInput("trend order must be 1 or 2".into()));
        }
        if self.n_principal == 0 {
            return Err(PcrError::InvalidInput("need at least one principal component".into()));
        }
        if !(self.weighting_exponent >= 0.0) || !(self.component_snr >= 0.0) {
            return Err(PcrError::InvalidInput("exponent and snr must be non-negative".into()));
        }
        Ok(())
    }
}

/// `amplitude · cos(2π·frequency_hz·t + phase)`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sinusoid {
    pub amplitude: f64,
    pub frequency_hz: f64,
    pub phase: f64,
}

impl Sinusoid {
    pub fn eval(&self, t: f64) -> f64 {
        self.amplitude * (2.0 * PI * self.frequency_hz * t + self.phase).cos()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Elongation {
    pub extended: Signal,
    pub left_len: usize,
    pub right_len: usize,
    /// Ascending polynomial coefficients in absolute time (s).
    pub trend_coeffs_left: Vec<f64>,
    pub trend_coeffs_right: Vec<f64>,
    pub components_left: Vec<Sinusoid>,
    pub components_right: Vec<Sinusoid>,
    /// Offsets added at each join so the continuation meets the record.
    pub offset_left: f64,
    pub offset_right: f64,
    /// Level both far ends are blended to (when tapering).
    pub far_level: Option<f64>,
    pub n_time: usize,
}

impl Elongation {
    /// The original record.
    pub fn original(&self) -> Signal {
        self.extended
            .slice(self.left_len, self.n_time)
            .expect("elongation keeps the original range")
    }

    /// Raw continuation (trend, sinusoids and join offset) at time `t`,
    /// before far-end blending. At the join this equals the end sample.
    pub fn continuation(&self, side: Side, t: f64) -> f64 {
        let (coeffs, comps, off, t_join, len) = match side {
            Side::Left => (
                &self.trend_coeffs_left,
                &self.components_left,
                self.offset_left,
                self.extended.time(self.left_len),
                self.left_len,
            ),
            Side::Right => (
                &self.trend_coeffs_right,
                &self.components_right,
                self.offset_right,
                self.extended.time(self.left_len + self.n_time - 1),
                self.right_len,
            ),
        };
        let span = len.max(1) as f64 * self.extended.dt();
        let ramp = (1.0 - (t - t_join).abs() / span).max(0.0);
        let poly: f64 = coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c);
        let osc: f64 = comps.iter().map(|c| c.eval(t)).sum();
        poly + osc + off * ramp
    }
}

/// Split a record into its end window.
fn end_window(s: &Signal, cfg: &PcrConfig, side: Side) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let n = s.len();
    let w = ((cfg.end_window_frac * n as f64).floor() as usize).min(n);
    if w < 4 * (cfg.trend_order + 1) {
        return Err(PcrError::InvalidInput(format!(
            "end window of {w} samples is too short for order {}",
            cfg.trend_order
        )));
    }
    let idx: Vec<usize> = match side {
        Side::Left => (0..w).collect(),
        Side::Right => (n - w..n).collect(),
    };
    let t = idx.iter().map(|&k| s.time(k)).collect();
    let y = idx.iter().map(|&k| s.samples[k]).collect();
    let wts = idx
        .iter()
        .map(|&k| {
            let rank = match side {
                Side::Left => k + 1,
                Side::Right => n - k,
            };
            (rank as f64).powf(-cfg.weighting_exponent)
        })
        .collect();
    Ok((t, y, wts))
}

fn detrended(s: &Signal, order: usize) -> Result<(Vec<f64>, Signal)> {
    let t = s.times();
    let p = polyfit(&t, &s.samples, order)?;
    let resid = t
        .iter()
        .zip(&s.samples)
        .map(|(&t, &y)| y - p.iter().rev().fold(0.0, |acc, c| acc * t + c))
        .collect();
    Ok((p, Signal::with_t0(resid, s.sample_rate_hz, s.t0_s)?))
}

/// Fit the end model (trend plus sinusoids at `freqs`) on one end window.
fn fit_end(s: &Signal, cfg: &PcrConfig, side: Side, freqs: &[f64], global: Option<&[f64]>) -> Result<EndModel> {
    let (t, y, w) = end_window(s, cfg, side)?;
    match global {
        Some(p) => {
            let y: Vec<f64> = t
                .iter()
                .zip(&y)
                .map(|(&t, &v)| v - p.iter().rev().fold(0.0, |acc, c| acc * t + c))
                .collect();
            let mut m = weighted_fit(&t, &y, &w, None, freqs)?;
            m.trend = p.to_vec();
            Ok(m)
        }
        None => weighted_fit(&t, &y, &w, Some(cfg.trend_order), freqs),
    }
}

/// Frequencies restored at the ends. Anything slower than one cycle per end
/// window cannot be told apart from the trend there, so it is left to the
/// polynomial.
fn end_frequencies(s: &Signal, det: &Signal, cfg: &PcrConfig) -> Result<Vec<f64>> {
    let window_s = (cfg.end_window_frac * s.len() as f64).floor() * s.dt();
    let min_hz = if window_s > 0.0 { 1.0 / window_s } else { 0.0 };
    let mut comps = extract_components_above(det, s.len(), cfg.component_snr)?;
    comps.retain(|c| c.frequency_hz >= min_hz);
    comps.truncate(cfg.n_principal);
    Ok(comps.iter().map(|c| c.frequency_hz).collect())
}

/// Weighted least-squares trend of one end window.
///
/// Oscillations are removed jointly: the dominant sinusoids of the
/// detrended record enter the same fit as extra columns.
pub fn fit_end_trend(s: &Signal, cfg: &PcrConfig, side: Side) -> Result<Vec<f64>> {
    cfg.validate()?;
    let (_, det) = detrended(s, cfg.trend_order)?;
    let freqs = end_frequencies(s, &det, cfg)?;
    Ok(fit_end(s, cfg, side, &freqs, None)?.trend)
}

/// The `n` strongest spectral peaks of a (detrended) record as sinusoids.
pub fn extract_end_components(s_detrended: &Signal, n: usize) -> Result<Vec<Sinusoid>> {
    extract_components_above(s_detrended, n, 0.0)
}

/// As [`extract_end_components`], but stops at peaks whose power is below
/// `min_snr` times the median bin power.
pub fn extract_components_above(s: &Signal, n: usize, min_snr: f64) -> Result<Vec<Sinusoid>> {
    let h = analytic_spectrum(s)?;
    let mag = h.magnitudes();
    let m = mag.len();
    let mut pw: Vec<f64> = mag.iter().map(|v| v * v).collect();
    pw.sort_by(|a, b| a.total_cmp(b));
    let floor = pw[pw.len() / 2];
    let mut cand: Vec<usize> = (1..m.saturating_sub(1))
        .filter(|&k| mag[k] > mag[k - 1] && mag[k] >= mag[k + 1])
        .collect();
    cand.sort_by(|&a, &b| mag[b].total_cmp(&mag[a]));
    let nt = s.len() as f64;
    let mut out = Vec::new();
    for k in cand {
        if out.len() >= n {
            break;
        }
        if mag[k] <= 0.0 || mag[k] * mag[k] < min_snr * floor {
            break;
        }
        // parabola through the log magnitudes of the three bins
        let (a, b, c) = (
            mag[k - 1].max(f64::MIN_POSITIVE).ln(),
            mag[k].ln(),
            mag[k + 1].max(f64::MIN_POSITIVE).ln(),
        );
        let den = a - 2.0 * b + c;
        let d = if den != 0.0 { 0.5 * (a - c) / den } else { 0.0 };
        let peak = b - 0.25 * (a - c) * d;
        let freq = (k as f64 + d) * h.df_hz;
        // a positive-frequency bin carries amplitude·N after doubling
        let amplitude = peak.exp() / nt;
        let t0_phase = 2.0 * PI * freq * s.t0_s;
        out.push(Sinusoid {
            amplitude,
            frequency_hz: freq,
            phase: h.bins[k].arg() - t0_phase,
        });
    }
    Ok(out)
}

/// Extend `s` at both ends. See the crate docs.
pub fn elongate(s: &Signal, cfg: &PcrConfig) -> Result<Elongation> {
    cfg.validate()?;
    let n = s.len();
    let len = (cfg.extension_frac * n as f64).round() as usize;
    if len == 0 {
        return Ok(Elongation {
            extended: s.clone(),
            left_len: 0,
            right_len: 0,
            trend_coeffs_left: Vec::new(),
            trend_coeffs_right: Vec::new(),
            components_left: Vec::new(),
            components_right: Vec::new(),
            offset_left: 0.0,
            offset_right: 0.0,
            far_level: None,
            n_time: n,
        });
    }
    let (global, det) = detrended(s, cfg.trend_order)?;
    let freqs = end_frequencies(s, &det, cfg)?;
    let g = cfg.global_trend.then_some(global.as_slice());
    let left = fit_end(s, cfg, Side::Left, &freqs, g)?;
    let right = fit_end(s, cfg, Side::Right, &freqs, g)?;

    let dt = s.dt();
    let t_first = s.time(0);
    let t_last = s.time(n - 1);
    let off_l = s.samples[0] - eval_model(&left, t_first);
    let off_r = s.samples[n - 1] - eval_model(&right, t_last);

    // s runs from 0 at the far end to 1 at the join
    let left_pos: Vec<f64> = (0..len).map(|i| i as f64 / len as f64).collect();
    let mut ext_l = Vec::with_capacity(len);
    let mut trend_l = Vec::with_capacity(len);
    for (i, &p) in left_pos.iter().enumerate() {
        let t = t_first - (len - i) as f64 * dt;
        ext_l.push(eval_model(&left, t) + off_l * p);
        trend_l.push(left.trend_at(t) + off_l * p);
    }
    let mut ext_r = Vec::with_capacity(len);
    let mut trend_r = Vec::with_capacity(len);
    for i in 0..len {
        let t = t_last + (i + 1) as f64 * dt;
        let p = (len - 1 - i) as f64 / len as f64;
        ext_r.push(eval_model(&right, t) + off_r * p);
        trend_r.push(right.trend_at(t) + off_r * p);
    }

    let mut far_level = None;
    if cfg.far_end_taper {
        let c = 0.5 * (trend_l[0] + trend_r[len - 1]);
        far_level = Some(c);
        for i in 0..len {
            let w = 0.5 - 0.5 * (PI * i as f64 / len as f64).cos();
            ext_l[i] = c + (ext_l[i] - c) * w;
            let w = 0.5 - 0.5 * (PI * (len - 1 - i) as f64 / len as f64).cos();
            ext_r[i] = c + (ext_r[i] - c) * w;
        }
    }

    let mut samples = ext_l;
    samples.extend_from_slice(&s.samples);
    samples.extend(ext_r);
    let extended = Signal::with_t0(samples, s.sample_rate_hz, t_first - len as f64 * dt)?;

    Ok(Elongation {
        extended,
        left_len: len,
        right_len: len,
        components_left: left.sinusoids(),
        components_right: right.sinusoids(),
        trend_coeffs_left: left.trend,
        trend_coeffs_right: right.trend,
        offset_left: off_l,
        offset_right: off_r,
        far_level,
        n_time: n,
    })
}

/// Crop a decomposition of `e.extended` back to the original samples.
///
/// Mode spectra are recomputed from the cropped series. The residual is
/// cropped the same way, so modes plus residual still add up to the
/// original record.
pub fn truncate(result: &DecompositionResult, e: &Elongation) -> Result<DecompositionResult> {
    let n_ext = e.extended.len();
    if result.residual.n_time != n_ext || result.modes.iter().any(|m| m.time.len() != n_ext) {
        return Err(PcrError::InvalidInput(format!(
            "decomposition length does not match the elongated length {n_ext}"
        )));
    }
    if e.left_len == 0 && e.right_len == 0 {
        return Ok(result.clone());
    }
    let crop = |sig: &Signal| -> Result<Signal> {
        let mut c = sig.slice(e.left_len, e.n_time)?;
        c.t0_s = e.extended.time(e.left_len);
        // df·n from the inverse transform can be off in the last bit
        c.sample_rate_hz = e.extended.sample_rate_hz;
        Ok(c)
    };
    let mut modes = Vec::with_capacity(result.modes.len());
    for m in &result.modes {
        modes.push(Mode::from_time(crop(&m.time)?, m.iterations_used)?);
    }
    let residual_time = crop(&result.residual_time()?)?;
    let residual: HalfSpectrum = analytic_spectrum(&residual_time)?;
    let input_power = analytic_spectrum(&e.original())?.power();
    Ok(DecompositionResult {
        modes,
        residual,
        traces: result.traces.clone(),
        input_power,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(f: impl Fn(f64) -> f64, n: usize, fs: f64) -> Signal {
        Signal::new((0..n).map(|k| f(k as f64 / fs)).collect(), fs).unwrap()
    }

    #[test]
    fn line_trend_coefficients() {
        let s = sig(|t| 2.0 * t, 5000, 5000.0);
        let cfg = PcrConfig::default();
        for side in [Side::Left, Side::Right] {
            let p = fit_end_trend(&s, &cfg, side).unwrap();
            assert!((p[1] - 2.0).abs() < 1e-9, "{p:?}");
            assert!(p[0].abs() < 1e-9);
        }
        let c = sig(|_| 0.7, 1000, 1000.0);
        let p = fit_end_trend(&c, &cfg, Side::Right).unwrap();
        assert!(p[1].abs() < 1e-9);
    }

    #[test]
    fn quadratic_under_oscillation() {
        let s = sig(|t| 5.0 * t * t + (2.0 * PI * 100.0 * t).cos(), 5000, 5000.0);
        let cfg = PcrConfig {
            trend_order: 2,
            ..Default::default()
        };
        for side in [Side::Left, Side::Right] {
            let p = fit_end_trend(&s, &cfg, side).unwrap();
            assert!((p[2] - 5.0).abs() < 0.1, "{side:?} {p:?}");
        }
    }

    #[test]
    fn short_window_rejected() {
        let s = sig(|t| t, 40, 40.0);
        assert!(fit_end_trend(&s, &PcrConfig::default(), Side::Left).is_err());
    }

    #[test]
    fn cosine_components() {
        let s = sig(|t| (2.0 * PI * 50.0 * t).cos(), 5000, 5000.0);
        let c = extract_end_components(&s, 1).unwrap();
        assert_eq!(c.len(), 1);
        assert!((c[0].amplitude - 1.0).abs() < 0.02);
        assert!((c[0].frequency_hz - 50.0).abs() < 0.5);
        assert!(c[0].phase.abs() < 0.05);

        let s = sig(
            |t| (2.0 * PI * 45.0 * t).cos() + 0.5 * (2.0 * PI * 100.0 * t).cos(),
            5000,
            5000.0,
        );
        let c = extract_end_components(&s, 2).unwrap();
        assert!((c[0].frequency_hz - 45.0).abs() < 0.5);
        assert!((c[1].frequency_hz - 100.0).abs() < 0.5);
        assert!(c[0].amplitude > c[1].amplitude);

        let z = sig(|_| 0.0, 256, 256.0);
        assert!(extract_end_components(&z, 3).unwrap().is_empty());
    }

    #[test]
    fn line_extends_as_line() {
        let s = sig(|t| 2.0 * t, 5000, 5000.0);
        let cfg = PcrConfig {
            far_end_taper: false,
            ..Default::default()
        };
        let e = elongate(&s, &cfg).unwrap();
        assert_eq!(e.left_len, 1500);
        assert_eq!(e.extended.len(), 8000);
        for k in 0..e.extended.len() {
            let t = e.extended.time(k);
            assert!((e.extended.samples[k] - 2.0 * t).abs() <= 0.01 * 2.0 * t.abs().max(1e-3));
        }
    }

    #[test]
    fn zero_extension_is_identity() {
        let s = sig(|t| (7.0 * t).sin(), 300, 300.0);
        let cfg = PcrConfig {
            extension_frac: 0.0,
            ..Default::default()
        };
        let e = elongate(&s, &cfg).unwrap();
        assert_eq!(e.left_len, 0);
        assert_eq!(e.right_len, 0);
        assert_eq!(e.extended, s);
    }

    #[test]
    fn continuation_meets_the_record() {
        let s = sig(
            |t| 5.0 * t * t + (2.0 * PI * (50.0 * t + 10.0 * t * t)).sin(),
            5000,
            5000.0,
        );
        let e = elongate(&s, &PcrConfig::default()).unwrap();
        let range = 6.0;
        let t0 = s.time(0);
        let t1 = s.time(4999);
        assert!((e.continuation(Side::Left, t0) - s.samples[0]).abs() <= 1e-9 * range);
        assert!((e.continuation(Side::Right, t1) - s.samples[4999]).abs() <= 1e-9 * range);
        // interior untouched
        assert_eq!(e.original().samples, s.samples);
        // far ends meet at the common level
        let c = e.far_level.unwrap();
        assert!((e.extended.samples[0] - c).abs() < 1e-12);
    }
}
