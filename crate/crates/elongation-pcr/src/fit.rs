use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::{PcrError, Result, Sinusoid};

/// Polynomial trend plus sinusoids at fixed frequencies, as fitted on one
/// end window.
#[derive(Debug, Clone, PartialEq)]
pub struct EndModel {
    /// Ascending polynomial coefficients in absolute time.
    pub trend: Vec<f64>,
    /// (frequency, cosine coefficient, sine coefficient)
    pub waves: Vec<(f64, f64, f64)>,
}

impl EndModel {
    pub fn trend_at(&self, t: f64) -> f64 {
        self.trend.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    pub fn sinusoids(&self) -> Vec<Sinusoid> {
        // a·cos + b·sin == A·cos(x + φ) with A = |(a, b)|, φ = atan2(−b, a)
        self.waves
            .iter()
            .map(|&(f, a, b)| Sinusoid {
                amplitude: a.hypot(b),
                frequency_hz: f,
                phase: (-b).atan2(a),
            })
            .collect()
    }
}

pub fn eval_model(m: &EndModel, t: f64) -> f64 {
    let osc: f64 = m
        .waves
        .iter()
        .map(|&(f, a, b)| {
            let x = 2.0 * PI * f * t;
            a * x.cos() + b * x.sin()
        })
        .sum();
    m.trend_at(t) + osc
}

fn solve(a: DMatrix<f64>, y: DVector<f64>) -> Result<DVector<f64>> {
    a.svd(true, true)
        .solve(&y, 1e-12)
        .map_err(|e| PcrError::InvalidInput(format!("least squares failed: {e}")))
}

/// Ordinary least-squares polynomial, ascending coefficients.
pub fn polyfit(t: &[f64], y: &[f64], order: usize) -> Result<Vec<f64>> {
    let w = vec![1.0; t.len()];
    Ok(weighted_fit(t, y, &w, Some(order), &[])?.trend)
}

/// Weighted least squares over polynomial columns (if `order` is given) and
/// a cosine/sine pair for each frequency.
pub fn weighted_fit(
    t: &[f64],
    y: &[f64],
    w: &[f64],
    order: Option<usize>,
    freqs: &[f64],
) -> Result<EndModel> {
    let n_poly = order.map_or(0, |o| o + 1);
    let cols = n_poly + 2 * freqs.len();
    if t.len() != y.len() || t.len() != w.len() {
        return Err(PcrError::InvalidInput("fit inputs differ in length".into()));
    }
    if t.len() < cols.max(1) {
        return Err(PcrError::InvalidInput(format!(
            "{} samples cannot determine {cols} coefficients",
            t.len()
        )));
    }
    if cols == 0 {
        return Ok(EndModel {
            trend: Vec::new(),
            waves: Vec::new(),
        });
    }
    let mut a = DMatrix::zeros(t.len(), cols);
    let mut b = DVector::zeros(t.len());
    for (r, ((&t, &y), &w)) in t.iter().zip(y).zip(w).enumerate() {
        let sw = w.sqrt();
        let mut p = 1.0;
        for c in 0..n_poly {
            a[(r, c)] = p * sw;
            p *= t;
        }
        for (i, f) in freqs.iter().enumerate() {
            let x = 2.0 * PI * f * t;
            a[(r, n_poly + 2 * i)] = x.cos() * sw;
            a[(r, n_poly + 2 * i + 1)] = x.sin() * sw;
        }
        b[r] = y * sw;
    }
    let c = solve(a, b)?;
    Ok(EndModel {
        trend: c.iter().take(n_poly).copied().collect(),
        waves: freqs
            .iter()
            .enumerate()
            .map(|(i, &f)| (f, c[n_poly + 2 * i], c[n_poly + 2 * i + 1]))
            .collect(),
    })
}
