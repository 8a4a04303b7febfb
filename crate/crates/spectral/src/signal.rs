use num_complex::Complex64;

use crate::{Result, SpectralError};

/// A uniformly sampled real time series.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    pub samples: Vec<f64>,
    pub sample_rate_hz: f64,
    /// Time of the first sample, in seconds.
    pub t0_s: f64,
}

impl Signal {
    pub fn new(samples: Vec<f64>, sample_rate_hz: f64) -> Result<Self> {
        Self::with_t0(samples, sample_rate_hz, 0.0)
    }

    pub fn with_t0(samples: Vec<f64>, sample_rate_hz: f64, t0_s: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(SpectralError::InvalidInput("signal has no samples".into()));
        }
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(SpectralError::InvalidInput(format!(
                "sample rate must be positive, got {sample_rate_hz}"
            )));
        }
        if let Some(k) = samples.iter().position(|v| !v.is_finite()) {
            return Err(SpectralError::InvalidInput(format!(
                "sample {k} is not finite"
            )));
        }
        if !t0_s.is_finite() {
            return Err(SpectralError::InvalidInput("t0 is not finite".into()));
        }
        Ok(Self {
            samples,
            sample_rate_hz,
            t0_s,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.sample_rate_hz
    }

    /// Time stamp of sample `k` in seconds.
    pub fn time(&self, k: usize) -> f64 {
        self.t0_s + k as f64 / self.sample_rate_hz
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.time(k)).collect()
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|v| v * v).sum()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            samples: self.samples.iter().map(|v| v * c).collect(),
            ..self.clone()
        }
    }

    /// Samples `start..start+len` as a new signal with the matching `t0`.
    pub fn slice(&self, start: usize, len: usize) -> Result<Self> {
        if start + len > self.len() || len == 0 {
            return Err(SpectralError::InvalidInput(format!(
                "slice {start}..{} outside signal of length {}",
                start + len,
                self.len()
            )));
        }
        Self::with_t0(
            self.samples[start..start + len].to_vec(),
            self.sample_rate_hz,
            self.time(start),
        )
    }
}

/// Non-negative frequency half of the analytic signal's spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpectrum {
    pub bins: Vec<Complex64>,
    pub df_hz: f64,
    /// Length of the time series this spectrum came from.
    pub n_time: usize,
}

impl HalfSpectrum {
    pub fn new(bins: Vec<Complex64>, df_hz: f64, n_time: usize) -> Result<Self> {
        if n_time == 0 || bins.len() != n_time / 2 + 1 {
            return Err(SpectralError::InvalidInput(format!(
                "{} bins do not match a time length of {n_time}",
                bins.len()
            )));
        }
        if !(df_hz.is_finite() && df_hz > 0.0) {
            return Err(SpectralError::InvalidInput(format!(
                "bin spacing must be positive, got {df_hz}"
            )));
        }
        if bins.iter().any(|b| !(b.re.is_finite() && b.im.is_finite())) {
            return Err(SpectralError::InvalidInput("non-finite bin".into()));
        }
        Ok(Self {
            bins,
            df_hz,
            n_time,
        })
    }

    pub fn zeros(df_hz: f64, n_time: usize) -> Self {
        Self {
            bins: vec![Complex64::new(0.0, 0.0); n_time / 2 + 1],
            df_hz,
            n_time,
        }
    }

    pub fn zeros_like(&self) -> Self {
        Self::zeros(self.df_hz, self.n_time)
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.df_hz * self.n_time as f64
    }

    pub fn freq(&self, k: usize) -> f64 {
        k as f64 * self.df_hz
    }

    /// Index of the bin closest to `hz`, clamped to the valid range.
    pub fn bin_of(&self, hz: f64) -> usize {
        let k = (hz / self.df_hz).round();
        if k <= 0.0 {
            0
        } else {
            (k as usize).min(self.len() - 1)
        }
    }

    /// Σ|bins|².
    pub fn power(&self) -> f64 {
        self.bins.iter().map(|b| b.norm_sqr()).sum()
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.bins.iter().map(|b| b.norm()).collect()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            bins: self.bins.iter().map(|b| b * c).collect(),
            ..self.clone()
        }
    }

    fn check_same_grid(&self, other: &Self) {
        assert_eq!(self.n_time, other.n_time, "spectra from different lengths");
        assert_eq!(self.df_hz, other.df_hz, "spectra on different grids");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_same_grid(other);
        Self {
            bins: self.bins.iter().zip(&other.bins).map(|(a, b)| a + b).collect(),
            ..self.clone()
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_same_grid(other);
        Self {
            bins: self.bins.iter().zip(&other.bins).map(|(a, b)| a - b).collect(),
            ..self.clone()
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        self.check_same_grid(other);
        for (a, b) in self.bins.iter_mut().zip(&other.bins) {
            *a += b;
        }
    }

    /// ‖self − other‖² over bins.
    pub fn distance_sqr(&self, other: &Self) -> f64 {
        self.check_same_grid(other);
        self.bins
            .iter()
            .zip(&other.bins)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum()
    }
}
