use serde::Serialize;
use spectral::Signal;

use crate::{BenchError, Result};

fn check_len(u: &[f64], f: &[f64]) -> Result<()> {
    if u.len() != f.len() {
        return Err(BenchError::InvalidInput(format!(
            "length mismatch: {} vs {}",
            u.len(),
            f.len()
        )));
    }
    Ok(())
}

/// Relative L2 error ‖u−f‖/‖f‖.
pub fn er(u: &Signal, f: &Signal) -> Result<f64> {
    er_slice(&u.samples, &f.samples)
}

pub fn er_slice(u: &[f64], f: &[f64]) -> Result<f64> {
    check_len(u, f)?;
    let den: f64 = f.iter().map(|v| v * v).sum();
    if den <= 0.0 {
        return Err(BenchError::Degenerate("reference has zero norm"));
    }
    let num: f64 = u.iter().zip(f).map(|(a, b)| (a - b).powi(2)).sum();
    Ok((num / den).sqrt())
}

/// Largest absolute deviation.
pub fn em(u: &Signal, f: &Signal) -> Result<f64> {
    check_len(&u.samples, &f.samples)?;
    Ok(u.samples
        .iter()
        .zip(&f.samples)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Mean deviation over the first and last ⌈end_frac·n⌉ samples divided by
/// the mean deviation over the whole record.
pub fn q_ee(u: &Signal, f: &Signal, end_frac: f64) -> Result<f64> {
    check_len(&u.samples, &f.samples)?;
    if !(end_frac > 0.0 && end_frac < 0.5) {
        return Err(BenchError::InvalidInput(format!("end fraction {end_frac} outside (0, 0.5)")));
    }
    let n = u.len();
    let m = ((end_frac * n as f64).ceil() as usize).max(1);
    let dev: Vec<f64> = u.samples.iter().zip(&f.samples).map(|(a, b)| (a - b).abs()).collect();
    // scaling by the largest deviation makes uniform deviation sum exactly
    let top = dev.iter().fold(0.0, |a: f64, &d| a.max(d));
    let dev: Vec<f64> = dev.iter().map(|d| if top > 0.0 { d / top } else { 0.0 }).collect();
    let whole = dev.iter().sum::<f64>() / n as f64;
    if whole <= 0.0 {
        return Err(BenchError::Degenerate("no deviation anywhere"));
    }
    let ends: f64 = dev[..m].iter().chain(&dev[n - m..]).sum::<f64>() / (2 * m) as f64;
    Ok(ends / whole)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QualityReport {
    pub er: f64,
    pub em: f64,
    pub q_ee: Option<f64>,
    pub d_c_hz: Option<f64>,
}

/// Index and ER of the recovered series closest (in ER) to `truth`.
pub fn best_match<'a>(candidates: impl IntoIterator<Item = &'a Signal>, truth: &Signal) -> Result<Option<(usize, f64)>> {
    let mut best: Option<(usize, f64)> = None;
    for (i, c) in candidates.into_iter().enumerate() {
        let e = er(c, truth)?;
        if best.is_none_or(|(_, b)| e < b) {
            best = Some((i, e));
        }
    }
    Ok(best)
}

pub fn quality(u: &Signal, f: &Signal, end_frac: f64) -> Result<QualityReport> {
    Ok(QualityReport {
        er: er(u, f)?,
        em: em(u, f)?,
        q_ee: q_ee(u, f, end_frac).ok(),
        d_c_hz: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: Vec<f64>) -> Signal {
        Signal::new(v, 1.0).unwrap()
    }

    #[test]
    fn er_values() {
        let f = s((1..=10).map(|k| k as f64).collect());
        assert_eq!(er(&f, &f).unwrap(), 0.0);
        assert!((er(&f.scaled(1.1), &f).unwrap() - 0.1).abs() < 1e-12);
        assert!((er(&f.scaled(0.0), &f).unwrap() - 1.0).abs() < 1e-12);
        assert!(er(&f, &f.scaled(0.0)).is_err());
    }

    #[test]
    fn em_values() {
        let f = s(vec![1.0, 2.0, 3.0]);
        assert_eq!(em(&f, &f).unwrap(), 0.0);
        assert_eq!(em(&s(vec![1.0, 2.5, 3.0]), &f).unwrap(), 0.5);
        assert!((em(&s(vec![0.7, 1.7, 2.7]), &f).unwrap() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn q_ee_values() {
        let n = 1000;
        let f = s(vec![0.0; n]);
        let mut ends = vec![0.0; n];
        for k in (0..20).chain(n - 20..n) {
            ends[k] = 1.0;
        }
        assert!((q_ee(&s(ends), &f, 0.02).unwrap() - 25.0).abs() < 1e-12);
        assert_eq!(q_ee(&s(vec![0.3; n]), &f, 0.02).unwrap(), 1.0);
        let mut mid = vec![0.0; n];
        mid[500] = 1.0;
        assert_eq!(q_ee(&s(mid), &f, 0.02).unwrap(), 0.0);
        assert!(q_ee(&f, &f, 0.02).is_err());
    }
}
