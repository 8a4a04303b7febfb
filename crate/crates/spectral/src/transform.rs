use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::{HalfSpectrum, Result, Signal, SpectralError};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft_in_place(buf: &mut [Complex64], inverse: bool) {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        let plan = if inverse {
            p.plan_fft_inverse(buf.len())
        } else {
            p.plan_fft_forward(buf.len())
        };
        plan.process(buf);
    });
}

/// One-sided spectrum of the analytic signal of `s`.
///
/// Bin `k` sits at `k * fs / n` Hz. Strictly positive bins are doubled,
/// DC and the even-length Nyquist bin are not.
pub fn analytic_spectrum(s: &Signal) -> Result<HalfSpectrum> {
    let n = s.len();
    if n < 4 {
        return Err(SpectralError::InvalidInput(format!(
            "need at least 4 samples, got {n}"
        )));
    }
    if let Some(k) = s.samples.iter().position(|v| !v.is_finite()) {
        return Err(SpectralError::InvalidInput(format!(
            "sample {k} is not finite"
        )));
    }
    let mut buf: Vec<Complex64> = s.samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_in_place(&mut buf, false);
    buf.truncate(n / 2 + 1);
    // (n-1)/2 is the last strictly positive bin that is not Nyquist
    for b in &mut buf[1..=(n - 1) / 2] {
        *b *= 2.0;
    }
    Ok(HalfSpectrum {
        bins: buf,
        df_hz: s.sample_rate_hz / n as f64,
        n_time: n,
    })
}

/// Two-sided spectrum with the negative half zeroed, length `n_time`.
pub fn full_spectrum(h: &HalfSpectrum) -> Result<Vec<Complex64>> {
    if h.n_time == 0 || h.bins.len() != h.n_time / 2 + 1 {
        return Err(SpectralError::InvalidInput(format!(
            "{} bins do not match a time length of {}",
            h.bins.len(),
            h.n_time
        )));
    }
    let mut full = vec![Complex64::new(0.0, 0.0); h.n_time];
    full[..h.bins.len()].copy_from_slice(&h.bins);
    Ok(full)
}

fn inverse_complex(h: &HalfSpectrum) -> Result<Vec<Complex64>> {
    let mut full = full_spectrum(h)?;
    fft_in_place(&mut full, true);
    let scale = 1.0 / h.n_time as f64;
    for v in &mut full {
        *v *= scale;
    }
    Ok(full)
}

/// Real part of the inverse transform of the zero-padded spectrum.
pub fn inverse_to_time(h: &HalfSpectrum) -> Result<Signal> {
    let z = inverse_complex(h)?;
    Signal::new(z.iter().map(|c| c.re).collect(), h.sample_rate_hz())
}

/// Complex analytic signal; its imaginary part is the discrete Hilbert
/// transform of `s`.
pub fn analytic_signal(s: &Signal) -> Result<Vec<Complex64>> {
    inverse_complex(&analytic_spectrum(s)?)
}

/// Power-weighted mean frequency in Hz.
pub fn center_frequency(h: &HalfSpectrum) -> Result<f64> {
    let mut num = 0.0;
    let mut den = 0.0;
    for (k, b) in h.bins.iter().enumerate() {
        let p = b.norm_sqr();
        num += k as f64 * p;
        den += p;
    }
    if den <= 0.0 || !den.is_finite() {
        return Err(SpectralError::DegenerateSpectrum);
    }
    Ok(num / den * h.df_hz)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn tone(f: f64, n: usize, fs: f64) -> Signal {
        Signal::new(
            (0..n).map(|k| (2.0 * PI * f * k as f64 / fs).cos()).collect(),
            fs,
        )
        .unwrap()
    }

    #[test]
    fn zeros_give_zero_bins() {
        let h = analytic_spectrum(&Signal::new(vec![0.0; 1024], 1.0).unwrap()).unwrap();
        assert!(h.bins.iter().all(|b| b.norm() == 0.0));
        assert_eq!(h.len(), 513);
    }

    #[test]
    fn constant_only_has_dc() {
        let h = analytic_spectrum(&Signal::new(vec![1.0; 100], 10.0).unwrap()).unwrap();
        assert!((h.bins[0].re - 100.0).abs() < 1e-9);
        assert!(h.bins[1..].iter().all(|b| b.norm() < 1e-9));
    }

    #[test]
    fn cosine_matches_direct_dft() {
        let s = tone(100.0, 5000, 5000.0);
        let h = analytic_spectrum(&s).unwrap();
        // direct summation at a few bins
        for &k in &[0usize, 99, 100, 101, 2500] {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, v) in s.samples.iter().enumerate() {
                let ph = -2.0 * PI * (k * j) as f64 / 5000.0;
                acc += Complex64::new(ph.cos(), ph.sin()) * v;
            }
            if k != 0 && k != 2500 {
                acc *= 2.0;
            }
            assert!((acc - h.bins[k]).norm() < 1e-7, "bin {k}");
        }
        // all energy at 100 Hz: 2 * n/2
        assert!((h.bins[100].norm() - 5000.0).abs() < 1e-7);
        let z = analytic_signal(&s).unwrap();
        for j in 100..4900 {
            let t = j as f64 / 5000.0;
            assert!((z[j].im - (2.0 * PI * 100.0 * t).sin()).abs() < 1e-9);
        }
    }

    #[test]
    fn single_bin_inverts_to_cosine() {
        let mut h = HalfSpectrum::zeros(1.0, 5000);
        h.bins[45] = Complex64::new(1.0, 0.0);
        let s = inverse_to_time(&h).unwrap();
        assert_eq!(s.sample_rate_hz, 5000.0);
        for j in 0..5000 {
            let want = (2.0 * PI * 45.0 * j as f64 / 5000.0).cos() / 5000.0;
            assert!((s.samples[j] - want).abs() < 1e-15);
        }
        let mut dc = HalfSpectrum::zeros(1.0, 16);
        dc.bins[0] = Complex64::new(1.0, 0.0);
        let s = inverse_to_time(&dc).unwrap();
        assert!(s.samples.iter().all(|v| (v - 1.0 / 16.0).abs() < 1e-15));
    }

    #[test]
    fn center_of_simple_spectra() {
        let mut h = HalfSpectrum::zeros(1.0, 5000);
        h.bins[100] = Complex64::new(0.0, 3.0);
        assert!((center_frequency(&h).unwrap() - 100.0).abs() < 1e-12);
        let mut h = HalfSpectrum::zeros(1.0, 5000);
        h.bins[40] = Complex64::new(1.0, 0.0);
        h.bins[60] = Complex64::new(0.0, -1.0);
        assert!((center_frequency(&h).unwrap() - 50.0).abs() < 1e-12);
        assert_eq!(
            center_frequency(&HalfSpectrum::zeros(1.0, 64)),
            Err(SpectralError::DegenerateSpectrum)
        );
    }

    #[test]
    fn short_or_bad_input_rejected() {
        let s = Signal {
            samples: vec![1.0, 2.0, 3.0],
            sample_rate_hz: 1.0,
            t0_s: 0.0,
        };
        assert!(analytic_spectrum(&s).is_err());
        let s = Signal {
            samples: vec![1.0, f64::NAN, 3.0, 4.0],
            sample_rate_hz: 1.0,
            t0_s: 0.0,
        };
        assert!(analytic_spectrum(&s).is_err());
        let h = HalfSpectrum {
            bins: vec![Complex64::new(0.0, 0.0); 3],
            df_hz: 1.0,
            n_time: 8,
        };
        assert!(inverse_to_time(&h).is_err());
    }

    #[test]
    fn odd_length_has_no_nyquist() {
        let s = Signal::new((0..7).map(|k| k as f64).collect(), 7.0).unwrap();
        let h = analytic_spectrum(&s).unwrap();
        assert_eq!(h.len(), 4);
        let back = inverse_to_time(&h).unwrap();
        for (a, b) in back.samples.iter().zip(&s.samples) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
