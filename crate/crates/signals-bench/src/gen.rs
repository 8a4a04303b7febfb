use std::f64::consts::PI;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use spectral::Signal;

use crate::{BenchError, Result};

pub const SAMPLE_RATE_HZ: f64 = 5000.0;
pub const N_SAMPLES: usize = 5000;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchSignal {
    pub id: u8,
    pub mixture: Signal,
    pub true_modes: Vec<Signal>,
    pub noise_sigma: f64,
    pub seed: u64,
}

/// Standard normal draws by the Box–Muller transform over a ChaCha8 stream.
pub struct GaussianNoise {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl GaussianNoise {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    fn uniform(&mut self) -> f64 {
        // 53 random bits in (0, 1]
        ((self.rng.next_u64() >> 11) + 1) as f64 / (1u64 << 53) as f64
    }

    pub fn next_standard(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let th = 2.0 * PI * u2;
        self.spare = Some(r * th.sin());
        r * th.cos()
    }
}

fn component_values(id: u8, t: f64) -> Result<Vec<f64>> {
    let v = match id {
        1 => vec![
            2.0 * t,
            (100.0 * PI * t - 10.0 * PI * t * t).sin(),
            0.5 * (-5.0 * (t - 0.5).powi(2)).exp() * (200.0 * PI * t).sin(),
        ],
        2 => vec![
            5.0 * t * t,
            (100.0 * PI * t + 20.0 * PI * t * t).sin(),
            (1.0 - (-5.0 * (t - 0.5).powi(2)).exp()) * (200.0 * PI * t).sin(),
        ],
        3 => vec![
            5.0 * (t - 0.5).powi(2),
            0.5 * (50.0 * PI * t + 10.0 * PI * t * t).sin(),
            0.3 * (1.0 + (5.0 * PI * t).sin()) * (120.0 * PI * t).sin(),
        ],
        4 => vec![
            2.0 * (-30.0 * (t - 0.5).powi(2)).exp(),
            if t < 0.5 { (160.0 * PI * t).cos() } else { 0.0 },
            if t >= 0.5 { (240.0 * PI * t).cos() } else { 0.0 },
            (0.5 + 0.5 * t * t) * (100.0 * PI * t - 10.0 * PI * t * t).sin(),
        ],
        _ => return Err(BenchError::UnknownSignal(id)),
    };
    Ok(v)
}

/// Number of true modes in benchmark `id`.
pub fn mode_count(id: u8) -> Result<usize> {
    Ok(component_values(id, 0.0)?.len())
}

/// Benchmark mixture `id` ∈ 1..=4 on t = k/5000, k < 5000, plus white
/// Gaussian noise of standard deviation `sigma` drawn from `seed`.
pub fn gen_signal(id: u8, sigma: f64, seed: u64) -> Result<BenchSignal> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(BenchError::InvalidInput(format!("sigma must be non-negative, got {sigma}")));
    }
    let k = mode_count(id)?;
    let mut modes = vec![Vec::with_capacity(N_SAMPLES); k];
    for j in 0..N_SAMPLES {
        let t = j as f64 / SAMPLE_RATE_HZ;
        for (m, v) in modes.iter_mut().zip(component_values(id, t)?) {
            m.push(v);
        }
    }
    let mut noise = GaussianNoise::new(seed);
    let mixture: Vec<f64> = (0..N_SAMPLES)
        .map(|j| {
            let clean: f64 = modes.iter().map(|m| m[j]).sum();
            clean + sigma * noise.next_standard()
        })
        .collect();
    Ok(BenchSignal {
        id,
        mixture: Signal::new(mixture, SAMPLE_RATE_HZ)?,
        true_modes: modes
            .into_iter()
            .map(|m| Signal::new(m, SAMPLE_RATE_HZ))
            .collect::<std::result::Result<_, _>>()?,
        noise_sigma: sigma,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signal_one_starts_at_zero() {
        let b = gen_signal(1, 0.0, 0).unwrap();
        assert_eq!(b.mixture.samples[0], 0.0);
        assert_eq!(b.mixture.len(), 5000);
        assert_eq!(b.true_modes.len(), 3);
    }

    #[test]
    fn signal_three_vertex() {
        let b = gen_signal(3, 0.0, 0).unwrap();
        assert_eq!(b.true_modes[0].samples[2500], 0.0);
    }

    #[test]
    fn signal_four_joint() {
        // both tones equal 1 at t = 0.5
        assert!(((160.0 * PI * 0.5f64).cos() - 1.0).abs() < 1e-12);
        assert!(((240.0 * PI * 0.5f64).cos() - 1.0).abs() < 1e-12);
        let b = gen_signal(4, 0.0, 0).unwrap();
        assert_eq!(b.true_modes.len(), 4);
        assert_eq!(b.true_modes[1].samples[2500], 0.0);
        assert!((b.true_modes[2].samples[2500] - 1.0).abs() < 1e-12);
        // one sample before the joint: cos(0.032π)
        assert!((b.true_modes[1].samples[2499] - (0.032 * PI).cos()).abs() < 1e-12);
    }

    #[test]
    fn unknown_id_rejected() {
        assert!(matches!(gen_signal(9, 0.1, 0), Err(BenchError::UnknownSignal(9))));
        assert!(gen_signal(1, -1.0, 0).is_err());
    }

    #[test]
    fn mixture_is_modes_plus_noise() {
        let b = gen_signal(2, 0.1, 7).unwrap();
        let mut noise = GaussianNoise::new(7);
        for j in 0..N_SAMPLES {
            let clean: f64 = b.true_modes.iter().map(|m| m.samples[j]).sum();
            assert_eq!(b.mixture.samples[j], clean + 0.1 * noise.next_standard());
        }
    }

    #[test]
    fn noise_statistics() {
        let mut g = GaussianNoise::new(1);
        let n = 200_000;
        let v: Vec<f64> = (0..n).map(|_| g.next_standard()).collect();
        let mean = v.iter().sum::<f64>() / n as f64;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.01);
        assert!((var - 1.0).abs() < 0.01);
    }
}
