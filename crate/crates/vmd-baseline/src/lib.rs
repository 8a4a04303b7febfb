//! Classic fixed-K variational mode decomposition, kept as a baseline.
//!
//! All K modes are updated together with Wiener-type filters around their
//! centers. There is no multiplier term, so the modes need not add up to
//! the input and whatever is left is reported as the residual.

use spectral::{analytic_spectrum, center_frequency, HalfSpectrum, Signal, SpectralError};
use svmd_core::{init_from_peaks, DecompositionResult, ExtractionTrace, IterationRecord, Mode, SvmdConfig, SvmdError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VmdError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Svmd(#[from] SvmdError),
}

pub type Result<T> = std::result::Result<T, VmdError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CenterInit {
    /// Centers spread evenly from 0 Hz towards Nyquist.
    Uniform,
    /// Centers at the K strongest spectral peaks.
    Peaks,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VmdConfig {
    pub k_modes: usize,
    /// Bandwidth penalty in 1/Hz².
    pub alpha: f64,
    /// Stop when Σ‖Δu_i‖²/‖u_i‖² falls below this.
    pub eta_inner: f64,
    pub max_iter: usize,
    pub mirror_ends: bool,
    /// Mirrored length per end as a fraction of the record.
    pub mirror_frac: f64,
    pub init: CenterInit,
}

impl Default for VmdConfig {
    fn default() -> Self {
        Self {
            k_modes: 3,
            alpha: 3e-4,
            eta_inner: 1e-7,
            max_iter: 500,
            mirror_ends: true,
            mirror_frac: 0.5,
            init: CenterInit::Peaks,
        }
    }
}

impl VmdConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_modes == 0 || self.max_iter == 0 {
            return Err(VmdError::InvalidInput("k_modes and max_iter must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) || !(self.eta_inner > 0.0) {
            return Err(VmdError::InvalidInput("alpha and eta_inner must be positive".into()));
        }
        if self.mirror_ends && !(self.mirror_frac > 0.0 && self.mirror_frac <= 1.0) {
            return Err(VmdError::InvalidInput("mirror fraction must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

/// Reflect ⌈frac·n⌉ samples about each end sample.
///
/// `[1,2,3,4]` with `frac = 0.5` gives `[3,2,1,2,3,4,3,2]`.
pub fn mirror_extend(s: &Signal, frac: f64) -> Result<Signal> {
    if !(frac > 0.0 && frac <= 1.0) {
        return Err(VmdError::InvalidInput(format!("mirror fraction {frac} outside (0, 1]")));
    }
    let n = s.len();
    let m = (frac * n as f64).ceil() as usize;
    let x = &s.samples;
    // fold an index back into 0..n, reflecting about the end samples
    let at = |i: isize| -> f64 {
        if n == 1 {
            return x[0];
        }
        let period = 2 * (n as isize - 1);
        let mut j = i.rem_euclid(period);
        if j >= n as isize {
            j = period - j;
        }
        x[j as usize]
    };
    let mut out = Vec::with_capacity(n + 2 * m);
    out.extend((1..=m as isize).rev().map(at));
    out.extend_from_slice(x);
    out.extend((0..m as isize).map(|k| at(n as isize + k)));
    Ok(Signal::with_t0(out, s.sample_rate_hz, s.t0_s - m as f64 * s.dt())?)
}

fn initial_centers(f: &HalfSpectrum, cfg: &VmdConfig) -> Vec<f64> {
    let nyq = f.freq(f.len() - 1);
    match cfg.init {
        CenterInit::Uniform => (0..cfg.k_modes)
            .map(|i| i as f64 * nyq / cfg.k_modes as f64)
            .collect(),
        CenterInit::Peaks => {
            let pcfg = SvmdConfig::default();
            let mut used: Vec<f64> = Vec::new();
            let mut r = f.clone();
            while used.len() < cfg.k_modes {
                match init_from_peaks(&r, &used, &pcfg) {
                    Ok((imp, p)) => {
                        used.push(p.freq_hz);
                        r = r.sub(&imp);
                    }
                    Err(_) => break,
                }
            }
            // not enough peaks: fill the gaps evenly
            let mut i = 0;
            while used.len() < cfg.k_modes {
                used.push((i as f64 + 0.5) * nyq / cfg.k_modes as f64);
                i += 1;
            }
            used
        }
    }
}

/// Decompose `s` into exactly `cfg.k_modes` modes.
///
/// Modes are returned on the original samples (mirrored parts cropped away),
/// in order of increasing center frequency. The residual is the input minus
/// the sum of the modes.
pub fn vmd_decompose(s: &Signal, cfg: &VmdConfig) -> Result<DecompositionResult> {
    cfg.validate()?;
    if s.len() < 4 {
        return Err(VmdError::InvalidInput("need at least 4 samples".into()));
    }
    let (work, pad) = if cfg.mirror_ends {
        let m = (cfg.mirror_frac * s.len() as f64).ceil() as usize;
        (mirror_extend(s, cfg.mirror_frac)?, m)
    } else {
        (s.clone(), 0)
    };
    let f = analytic_spectrum(&work)?;
    if f.power() <= 0.0 {
        return Err(SpectralError::DegenerateSpectrum.into());
    }
    let k = cfg.k_modes;
    let mut centers = initial_centers(&f, cfg);
    let mut modes: Vec<HalfSpectrum> = vec![f.zeros_like(); k];
    let mut sum = f.zeros_like();
    let mut traces = vec![ExtractionTrace::default(); k];
    for (t, c) in traces.iter_mut().zip(&centers) {
        t.init_hz = *c;
    }
    let df = f.df_hz;

    for _ in 0..cfg.max_iter {
        let mut change = 0.0;
        for i in 0..k {
            let old = modes[i].clone();
            let mut next = f.zeros_like();
            for (j, b) in next.bins.iter_mut().enumerate() {
                let others = sum.bins[j] - old.bins[j];
                let d = j as f64 * df - centers[i];
                *b = (f.bins[j] - others) / (1.0 + 2.0 * cfg.alpha * d * d);
            }
            for (acc, (n, o)) in sum.bins.iter_mut().zip(next.bins.iter().zip(&old.bins)) {
                *acc += n - o;
            }
            if next.power() > 0.0 {
                centers[i] = center_frequency(&next)?;
            }
            let p = next.power();
            let diff = next.distance_sqr(&old);
            let rel = if p > 0.0 { diff / p } else { 0.0 };
            change += rel;
            traces[i].records.push(IterationRecord {
                center_hz: centers[i],
                residual_center_hz: f64::NAN,
                update_norm: rel,
            });
            modes[i] = next;
        }
        if change <= cfg.eta_inner {
            for t in &mut traces {
                t.converged = true;
            }
            break;
        }
    }

    let input = analytic_spectrum(s)?;
    let mut out_modes = Vec::with_capacity(k);
    let mut out_traces = Vec::with_capacity(k);
    let mut residual = s.samples.clone();
    for i in 0..k {
        let full = spectral::inverse_to_time(&modes[i])?;
        let mut time = full.slice(pad, s.len())?;
        time.t0_s = s.t0_s;
        time.sample_rate_hz = s.sample_rate_hz;
        for (r, v) in residual.iter_mut().zip(&time.samples) {
            *r -= v;
        }
        let iters = traces[i].records.len();
        out_modes.push(match Mode::from_time(time.clone(), iters) {
            Ok(m) => m,
            // an empty mode keeps its last center
            Err(SvmdError::Spectral(SpectralError::DegenerateSpectrum)) => Mode {
                spectrum: analytic_spectrum(&time)?,
                time,
                center_hz: centers[i],
                power: 0.0,
                iterations_used: iters,
            },
            Err(e) => return Err(e.into()),
        });
        out_traces.push(traces[i].clone());
    }
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| out_modes[a].center_hz.total_cmp(&out_modes[b].center_hz));
    let out_modes: Vec<Mode> = order.iter().map(|&i| out_modes[i].clone()).collect();
    let out_traces: Vec<ExtractionTrace> = order.iter().map(|&i| out_traces[i].clone()).collect();
    let residual = analytic_spectrum(&Signal::with_t0(residual, s.sample_rate_hz, s.t0_s)?)?;
    Ok(DecompositionResult {
        modes: out_modes,
        residual,
        traces: out_traces,
        input_power: input.power(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn mirror_small_case() {
        let s = Signal::new(vec![1.0, 2.0, 3.0, 4.0], 1.0).unwrap();
        let m = mirror_extend(&s, 0.5).unwrap();
        assert_eq!(m.samples, vec![3.0, 2.0, 1.0, 2.0, 3.0, 4.0, 3.0, 2.0]);
        let one = mirror_extend(&s, 1e-9).unwrap();
        assert_eq!(one.samples, vec![2.0, 1.0, 2.0, 3.0, 4.0, 3.0]);
        let sym = Signal::new(vec![1.0, 5.0, 2.0, 5.0, 1.0], 1.0).unwrap();
        let m = mirror_extend(&sym, 0.6).unwrap();
        let r: Vec<f64> = m.samples.iter().rev().copied().collect();
        assert_eq!(m.samples, r);
        assert!(mirror_extend(&s, 0.0).is_err());
    }

    #[test]
    fn separated_tones() {
        let n = 5000;
        let fs = 5000.0;
        let tones = [(20.0, 1.0), (150.0, 0.7), (600.0, 0.5)];
        let x: Vec<f64> = (0..n)
            .map(|k| {
                let t = k as f64 / fs;
                tones.iter().map(|(f, a)| a * (2.0 * PI * f * t).cos()).sum()
            })
            .collect();
        let s = Signal::new(x, fs).unwrap();
        let cfg = VmdConfig {
            k_modes: 3,
            init: CenterInit::Peaks,
            mirror_ends: false,
            ..Default::default()
        };
        let r = vmd_decompose(&s, &cfg).unwrap();
        assert_eq!(r.modes.len(), 3);
        for (m, (f, a)) in r.modes.iter().zip(tones) {
            let truth: Vec<f64> = (0..n).map(|k| a * (2.0 * PI * f * k as f64 / fs).cos()).collect();
            let num: f64 = m.time.samples.iter().zip(&truth).map(|(u, v)| (u - v).powi(2)).sum();
            let den: f64 = truth.iter().map(|v| v * v).sum();
            assert!((num / den).sqrt() < 0.02, "{f} Hz");
            assert!((m.center_hz - f).abs() < 1.0);
        }
    }
}
