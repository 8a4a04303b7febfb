use spectral::{analytic_spectrum, center_frequency, inverse_to_time, HalfSpectrum, Signal, SpectralError};

use crate::{init_from_peaks, InitPolicy, Result, SvmdConfig, SvmdError};

/// One extracted component.
///
/// `time`, `center_hz` and `power` are always derived from `spectrum`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mode {
    pub time: Signal,
    pub spectrum: HalfSpectrum,
    pub center_hz: f64,
    pub power: f64,
    pub iterations_used: usize,
}

impl Mode {
    pub fn from_spectrum(spectrum: HalfSpectrum, iterations_used: usize) -> Result<Self> {
        let center_hz = center_frequency(&spectrum)?;
        let time = inverse_to_time(&spectrum)?;
        let power = spectrum.power();
        Ok(Self {
            time,
            spectrum,
            center_hz,
            power,
            iterations_used,
        })
    }

    /// Rebuild from a time series, e.g. after cropping.
    pub fn from_time(time: Signal, iterations_used: usize) -> Result<Self> {
        let spectrum = analytic_spectrum(&time)?;
        let power = spectrum.power();
        let center_hz = center_frequency(&spectrum)?;
        Ok(Self {
            time,
            spectrum,
            center_hz,
            power,
            iterations_used,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub center_hz: f64,
    pub residual_center_hz: f64,
    pub update_norm: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExtractionTrace {
    pub records: Vec<IterationRecord>,
    pub converged: bool,
    /// Frequency of the impulse the extraction started from.
    pub init_hz: f64,
}

impl ExtractionTrace {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn final_center_hz(&self) -> Option<f64> {
        self.records.last().map(|r| r.center_hz)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionResult {
    pub modes: Vec<Mode>,
    pub residual: HalfSpectrum,
    pub traces: Vec<ExtractionTrace>,
    pub input_power: f64,
}

impl DecompositionResult {
    /// Σ mode spectra + residual.
    pub fn reconstruct(&self) -> HalfSpectrum {
        let mut acc = self.residual.clone();
        for m in &self.modes {
            acc.add_assign(&m.spectrum);
        }
        acc
    }

    pub fn residual_time(&self) -> Result<Signal> {
        Ok(inverse_to_time(&self.residual)?)
    }
}

/// Closed-form minimizer of the extraction objective with both centers held
/// fixed:
///
/// `û(ω) = f̂_r(ω)·(1+β(ω−ω_r)²) / (1+α(ω−ω_c)²+β(ω−ω_r)²)`
///
/// Frequencies are in Hz, so `alpha` and `beta` are in 1/Hz².
pub fn update_mode(
    f_r_prev: &HalfSpectrum,
    omega_c: f64,
    omega_c_r: f64,
    alpha: f64,
    beta: f64,
) -> HalfSpectrum {
    let df = f_r_prev.df_hz;
    let bins = f_r_prev
        .bins
        .iter()
        .enumerate()
        .map(|(k, f)| {
            let w = k as f64 * df;
            let dc = w - omega_c;
            let dr = w - omega_c_r;
            let keep = 1.0 + beta * dr * dr;
            f * (keep / (keep + alpha * dc * dc))
        })
        .collect();
    HalfSpectrum {
        bins,
        df_hz: df,
        n_time: f_r_prev.n_time,
    }
}

/// Value of the extraction objective for a candidate `u` with frozen
/// centers: ‖f−u‖² + α‖(ω−ω_c)u‖² + β‖(ω−ω_r)(f−u)‖², as plain bin sums.
pub fn objective(
    u: &HalfSpectrum,
    f_r_prev: &HalfSpectrum,
    omega_c: f64,
    omega_c_r: f64,
    alpha: f64,
    beta: f64,
) -> f64 {
    let df = f_r_prev.df_hz;
    u.bins
        .iter()
        .zip(&f_r_prev.bins)
        .enumerate()
        .map(|(k, (u, f))| {
            let w = k as f64 * df;
            let r = (f - u).norm_sqr();
            r + alpha * (w - omega_c).powi(2) * u.norm_sqr() + beta * (w - omega_c_r).powi(2) * r
        })
        .sum()
}

/// Run the alternating center/update iteration from `init` until the
/// update norm drops to `eta_inner` or `max_inner` is hit.
pub fn extract_one(
    f_r_prev: &HalfSpectrum,
    init: &HalfSpectrum,
    cfg: &SvmdConfig,
) -> Result<(Mode, ExtractionTrace)> {
    cfg.validate()?;
    if f_r_prev.power() <= 0.0 || init.power() <= 0.0 {
        return Err(SpectralError::DegenerateSpectrum.into());
    }
    let mut u = init.clone();
    let mut trace = ExtractionTrace {
        init_hz: center_frequency(init)?,
        ..Default::default()
    };
    for _ in 0..cfg.max_inner {
        let wc = center_frequency(&u)?;
        let wr = center_frequency(&f_r_prev.sub(&u))?;
        let next = update_mode(f_r_prev, wc, wr, cfg.alpha, cfg.beta);
        let mut norm = next.distance_sqr(&u);
        if cfg.relative_inner_stop {
            let p = next.power();
            norm = if p > 0.0 { norm / p } else { f64::INFINITY };
        }
        u = next;
        trace.records.push(IterationRecord {
            center_hz: wc,
            residual_center_hz: wr,
            update_norm: norm,
        });
        if norm <= cfg.eta_inner {
            trace.converged = true;
            break;
        }
    }
    let iters = trace.records.len();
    Ok((Mode::from_spectrum(u, iters)?, trace))
}

/// Decompose a real signal. See [`decompose_spectrum`].
pub fn decompose(s: &Signal, cfg: &SvmdConfig) -> Result<DecompositionResult> {
    cfg.validate()?;
    decompose_spectrum(&analytic_spectrum(s)?, cfg)
}

/// Extract modes one after another from `input` until the residual power is
/// at most `eps_outer` of the input power, `max_outer` modes exist, or no
/// admissible starting point is left.
pub fn decompose_spectrum(input: &HalfSpectrum, cfg: &SvmdConfig) -> Result<DecompositionResult> {
    cfg.validate()?;
    let input_power = input.power();
    if input_power <= 0.0 {
        return Err(SpectralError::DegenerateSpectrum.into());
    }
    let mut residual = input.clone();
    let mut modes = Vec::new();
    let mut traces = Vec::new();
    let mut used_hz: Vec<f64> = Vec::new();

    while modes.len() < cfg.max_outer && residual.power() > cfg.eps_outer * input_power {
        let init = match &cfg.init_policy {
            InitPolicy::HighestPeak => match init_from_peaks(&residual, &used_hz, cfg) {
                Ok((init, peak)) => {
                    used_hz.push(peak.freq_hz);
                    init
                }
                Err(SvmdError::NoPeak) => break,
                Err(e) => return Err(e),
            },
            InitPolicy::ExplicitFrequency(list) => {
                let Some(&hz) = list.get(modes.len()) else {
                    break;
                };
                let j = residual.bin_of(hz);
                let mut init = residual.zeros_like();
                init.bins[j] = residual.bins[j];
                used_hz.push(hz);
                init
            }
        };
        if init.power() <= 0.0 {
            break;
        }
        let (mode, trace) = match extract_one(&residual, &init, cfg) {
            Ok(x) => x,
            // the provisional residual vanished: the whole residual is the mode
            Err(SvmdError::Spectral(SpectralError::DegenerateSpectrum)) => {
                let trace = ExtractionTrace {
                    converged: true,
                    init_hz: center_frequency(&init)?,
                    ..Default::default()
                };
                (Mode::from_spectrum(residual.clone(), 0)?, trace)
            }
            Err(e) => return Err(e),
        };
        residual = residual.sub(&mode.spectrum);
        modes.push(mode);
        traces.push(trace);
    }

    Ok(DecompositionResult {
        modes,
        residual,
        traces,
        input_power,
    })
}
