use spectral::{HalfSpectrum, SpectralError};
use svmd_core::Mode;

use crate::{RefineConfig, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ModeCountVerdict {
    pub count: usize,
    /// For each component after the first, its smallest distance to any
    /// earlier one. Stops at the first repeat.
    pub distance_series: Vec<f64>,
    /// Index of the earlier component that distance was measured to.
    pub nearest: Vec<usize>,
}

fn unit(v: Vec<f64>) -> Result<Vec<f64>> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n <= 0.0 || !n.is_finite() {
        return Err(SpectralError::DegenerateSpectrum.into());
    }
    Ok(v.into_iter().map(|x| x / n).collect())
}

/// Magnitude spectrum convolved with a Gaussian of standard deviation
/// `sigma_hz`, zero beyond the ends, scaled to unit energy.
fn profile(h: &HalfSpectrum, sigma_hz: f64) -> Result<Vec<f64>> {
    let m = h.magnitudes();
    if sigma_hz <= 0.0 {
        return unit(m);
    }
    let half = (4.0 * sigma_hz / h.df_hz).ceil() as isize;
    let kernel: Vec<f64> = (-half..=half)
        .map(|i| (-0.5 * (i as f64 * h.df_hz / sigma_hz).powi(2)).exp())
        .collect();
    let n = m.len() as isize;
    let out = (0..n)
        .map(|k| {
            let mut acc = 0.0;
            for (o, w) in (-half..=half).zip(&kernel) {
                let j = k + o;
                if (0..n).contains(&j) {
                    acc += w * m[j as usize];
                }
            }
            acc
        })
        .collect();
    unit(out)
}

fn l2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// ‖|â|/‖â‖ − |b̂|/‖b̂‖‖ over magnitude spectra. Lies in [0, √2].
pub fn normalized_distance(a: &Mode, b: &Mode) -> Result<f64> {
    profile_distance(a, b, 0.0)
}

/// [`normalized_distance`] after smoothing both magnitude spectra with a
/// Gaussian of `sigma_hz`. Smoothing lets a low-power piece lying next to
/// a mode (rather than on top of it) still read as the same profile.
pub fn profile_distance(a: &Mode, b: &Mode, sigma_hz: f64) -> Result<f64> {
    let pa = profile(&a.spectrum, sigma_hz)?;
    let pb = profile(&b.spectrum, sigma_hz)?;
    Ok(l2(&pa, &pb))
}

/// Walk the components in extraction order; the first one that looks like
/// an earlier one (distance below `jump_threshold`) ends the count.
pub fn detect_mode_count(modes: &[Mode], cfg: &RefineConfig) -> Result<ModeCountVerdict> {
    let profiles = modes
        .iter()
        .map(|m| profile(&m.spectrum, cfg.profile_smoothing_hz))
        .collect::<Result<Vec<_>>>()?;
    let mut distance_series = Vec::new();
    let mut nearest = Vec::new();
    for i in 1..profiles.len() {
        let (j, d) = (0..i)
            .map(|j| (j, l2(&profiles[i], &profiles[j])))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("i >= 1");
        distance_series.push(d);
        nearest.push(j);
        if d < cfg.jump_threshold {
            return Ok(ModeCountVerdict {
                count: i,
                distance_series,
                nearest,
            });
        }
    }
    Ok(ModeCountVerdict {
        count: modes.len(),
        distance_series,
        nearest,
    })
}
