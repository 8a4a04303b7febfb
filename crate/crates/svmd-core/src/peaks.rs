use spectral::HalfSpectrum;

use crate::{Result, SvmdConfig, SvmdError};

/// Where an extraction was started.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub bin: usize,
    pub freq_hz: f64,
    pub smoothed_magnitude: f64,
}

/// Moving average of bin magnitudes, reflected at both edges.
pub fn smoothed_magnitudes(h: &HalfSpectrum, width: usize) -> Vec<f64> {
    let m = h.magnitudes();
    let n = m.len();
    let half = width / 2;
    if half == 0 || n < 2 {
        return m;
    }
    let at = |i: isize| -> f64 {
        // reflect without repeating the edge sample
        let mut i = i;
        let last = n as isize - 1;
        while i < 0 || i > last {
            if i < 0 {
                i = -i;
            }
            if i > last {
                i = 2 * last - i;
            }
        }
        m[i as usize]
    };
    let w = (2 * half + 1) as f64;
    (0..n as isize)
        .map(|k| (k - half as isize..=k + half as isize).map(at).sum::<f64>() / w)
        .collect()
}

pub(crate) fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Local maxima of `m` (edges included), strongest first.
pub(crate) fn local_maxima(m: &[f64]) -> Vec<usize> {
    let n = m.len();
    let mut idx: Vec<usize> = (0..n)
        .filter(|&i| (i == 0 || m[i] > m[i - 1]) && (i + 1 == n || m[i] >= m[i + 1]))
        .collect();
    idx.sort_by(|&a, &b| m[b].total_cmp(&m[a]));
    idx
}

/// Impulse initialization at the strongest admissible peak of `f_r` that is
/// not within the exclusion radius of any frequency in `exclude_hz`.
///
/// The impulse carries the residual's own bin value, so scaling the input
/// scales the initialization with it.
pub fn init_from_peaks(
    f_r: &HalfSpectrum,
    exclude_hz: &[f64],
    cfg: &SvmdConfig,
) -> Result<(HalfSpectrum, Peak)> {
    if f_r.power() <= 0.0 {
        return Err(SvmdError::NoPeak);
    }
    let smooth = smoothed_magnitudes(f_r, cfg.peak_smoothing_bins);
    let floor = median(f_r.bins.iter().map(|b| b.norm_sqr()).collect());
    for j in local_maxima(&smooth) {
        if smooth[j] * smooth[j] < cfg.peak_snr * floor {
            break;
        }
        let f = f_r.freq(j);
        if exclude_hz
            .iter()
            .any(|e| (f - e).abs() < cfg.exclusion_radius_hz)
        {
            continue;
        }
        // the average shifts and flattens peaks: start from the strongest
        // raw bin under the smoothing window
        let half = cfg.peak_smoothing_bins / 2;
        let lo = j.saturating_sub(half);
        let hi = (j + half).min(f_r.len() - 1);
        let j = (lo..=hi)
            .max_by(|&a, &b| f_r.bins[a].norm().total_cmp(&f_r.bins[b].norm()))
            .unwrap_or(j);
        if f_r.bins[j].norm() == 0.0 {
            continue;
        }
        let f = f_r.freq(j);
        let mut init = f_r.zeros_like();
        init.bins[j] = f_r.bins[j];
        return Ok((
            init,
            Peak {
                bin: j,
                freq_hz: f,
                smoothed_magnitude: smooth[j],
            },
        ));
    }
    Err(SvmdError::NoPeak)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn spectrum(mags: &[(usize, f64)]) -> HalfSpectrum {
        let mut h = HalfSpectrum::zeros(1.0, 1000);
        for &(k, m) in mags {
            h.bins[k] = Complex64::new(m, 0.0);
        }
        h
    }

    #[test]
    fn picks_the_single_peak() {
        let h = spectrum(&[(45, 3.0)]);
        let (init, p) = init_from_peaks(&h, &[], &SvmdConfig::default()).unwrap();
        assert_eq!(p.bin, 45);
        assert_eq!(init.bins[45], h.bins[45]);
        assert_eq!(init.power(), 9.0);
    }

    #[test]
    fn exclusion_skips_used_peaks() {
        let h = spectrum(&[(45, 3.0), (100, 2.0)]);
        let (_, p) = init_from_peaks(&h, &[44.0], &SvmdConfig::default()).unwrap();
        assert_eq!(p.bin, 100);
        assert_eq!(
            init_from_peaks(&h, &[44.0, 101.0], &SvmdConfig::default()).unwrap_err(),
            SvmdError::NoPeak
        );
    }

    #[test]
    fn zero_spectrum_has_no_peak() {
        let h = HalfSpectrum::zeros(1.0, 64);
        assert_eq!(
            init_from_peaks(&h, &[], &SvmdConfig::default()).unwrap_err(),
            SvmdError::NoPeak
        );
    }

    #[test]
    fn smoothing_reflects_edges() {
        let h = spectrum(&[(0, 5.0), (1, 5.0)]);
        let s = smoothed_magnitudes(&h, 5);
        // window at 0 sees bins [2,1,0,1,2]
        assert!((s[0] - 3.0).abs() < 1e-12);
        assert!((s[1] - 3.0).abs() < 1e-12);
        assert!((s[2] - 2.0).abs() < 1e-12);
        assert!((s[3] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
