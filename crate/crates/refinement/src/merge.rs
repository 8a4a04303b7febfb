use spectral::HalfSpectrum;
use svmd_core::Mode;

use crate::count::profile_distance;
use crate::{ModeCountVerdict, RefineConfig, RefineError, Result};

fn sum_modes(members: &[&Mode]) -> Result<Mode> {
    let mut acc = members[0].spectrum.clone();
    for m in &members[1..] {
        acc.add_assign(&m.spectrum);
    }
    let iters = members.iter().map(|m| m.iterations_used).max().unwrap_or(0);
    Ok(Mode::from_spectrum(acc, iters)?)
}

fn merge_pass(modes: &[Mode], tol: f64) -> Result<(Vec<Mode>, bool)> {
    let mut by_power: Vec<usize> = (0..modes.len()).collect();
    by_power.sort_by(|&a, &b| modes[b].power.total_cmp(&modes[a].power));
    let mut owner: Vec<Option<usize>> = vec![None; modes.len()];
    for &a in &by_power {
        if owner[a].is_some() {
            continue;
        }
        owner[a] = Some(a);
        for &b in &by_power {
            if owner[b].is_none() && (modes[b].center_hz - modes[a].center_hz).abs() <= tol {
                owner[b] = Some(a);
            }
        }
    }
    // clusters listed by their earliest member so a no-op pass keeps order
    let mut out = Vec::new();
    let mut done = vec![false; modes.len()];
    let mut merged_any = false;
    for i in 0..modes.len() {
        let a = owner[i].expect("every mode is assigned");
        if done[a] {
            continue;
        }
        done[a] = true;
        let members: Vec<&Mode> = (0..modes.len())
            .filter(|&k| owner[k] == Some(a))
            .map(|k| &modes[k])
            .collect();
        if members.len() == 1 {
            out.push(members[0].clone());
        } else {
            merged_any = true;
            out.push(sum_modes(&members)?);
        }
    }
    Ok((out, merged_any))
}

/// Greedy merging of modes whose centers lie within `merge_tol_hz` of a
/// stronger mode. Repeated until nothing changes, so merging twice is the
/// same as merging once.
pub fn merge_modes(modes: &[Mode], cfg: &RefineConfig) -> Result<Vec<Mode>> {
    if !(cfg.merge_tol_hz > 0.0) {
        return Err(RefineError::InvalidConfig("merge tolerance must be positive".into()));
    }
    let mut cur = modes.to_vec();
    loop {
        let (next, changed) = merge_pass(&cur, cfg.merge_tol_hz)?;
        cur = next;
        if !changed {
            return Ok(cur);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Folded {
    pub modes: Vec<Mode>,
    /// Components that resembled no mode, summed.
    pub dropped: HalfSpectrum,
    /// For every input component, the output mode it went into.
    pub assignment: Vec<Option<usize>>,
}

/// Keep the first `verdict.count` components as the modes and add each later
/// component to the mode whose smoothed profile it is closest to.
pub fn fold_modes(all: &[Mode], verdict: &ModeCountVerdict, cfg: &RefineConfig) -> Result<Folded> {
    let Some(first) = all.first() else {
        return Err(RefineError::InvalidConfig("nothing to fold".into()));
    };
    let k = verdict.count.min(all.len());
    let mut sums: Vec<HalfSpectrum> = all[..k].iter().map(|m| m.spectrum.clone()).collect();
    let mut dropped = first.spectrum.zeros_like();
    let mut assignment: Vec<Option<usize>> = (0..k).map(Some).collect();
    for m in &all[k..] {
        let mut best: Option<(usize, f64)> = None;
        for (j, a) in all[..k].iter().enumerate() {
            let d = profile_distance(m, a, cfg.profile_smoothing_hz)?;
            if best.is_none_or(|(_, b)| d < b) {
                best = Some((j, d));
            }
        }
        match best {
            Some((j, d)) if d < cfg.fold_max_distance => {
                sums[j].add_assign(&m.spectrum);
                assignment.push(Some(j));
            }
            _ => {
                dropped.add_assign(&m.spectrum);
                assignment.push(None);
            }
        }
    }
    let modes = sums
        .into_iter()
        .zip(&all[..k])
        .enumerate()
        .map(|(j, (s, orig))| {
            if assignment[k..].contains(&Some(j)) {
                let iters = orig.iterations_used;
                Mode::from_spectrum(s, iters).map_err(RefineError::from)
            } else {
                Ok(orig.clone())
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Folded {
        modes,
        dropped,
        assignment,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn mode(bins: &[(usize, f64)]) -> Mode {
        let mut h = HalfSpectrum::zeros(1.0, 1000);
        for &(k, v) in bins {
            h.bins[k] = Complex64::new(v, 0.5 * v);
        }
        Mode::from_spectrum(h, 1).unwrap()
    }

    #[test]
    fn separated_modes_untouched() {
        let ms = vec![mode(&[(2, 1.0)]), mode(&[(45, 1.0)]), mode(&[(100, 1.0)])];
        let out = merge_modes(&ms, &RefineConfig::default()).unwrap();
        assert_eq!(out, ms);
    }

    #[test]
    fn close_pair_summed() {
        let ms = vec![mode(&[(45, 1.0)]), mode(&[(47, 0.5)])];
        let out = merge_modes(&ms, &RefineConfig::default()).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].spectrum, ms[0].spectrum.add(&ms[1].spectrum));
    }

    #[test]
    fn fold_follows_profile() {
        let ms = vec![
            mode(&[(3, 1.0)]),
            mode(&[(200, 1.0)]),
            mode(&[(205, 0.1)]),
            mode(&[(490, 0.1)]),
        ];
        let v = ModeCountVerdict {
            count: 2,
            distance_series: vec![],
            nearest: vec![],
        };
        let f = fold_modes(&ms, &v, &RefineConfig::default()).unwrap();
        assert_eq!(f.modes.len(), 2);
        assert_eq!(f.assignment, vec![Some(0), Some(1), Some(1), None]);
        assert_eq!(f.dropped, ms[3].spectrum);
        let total: f64 = f.modes.iter().map(|m| m.power).sum::<f64>() + f.dropped.power();
        let want: f64 = ms.iter().map(|m| m.power).sum();
        // disjoint supports, so power adds
        assert!((total - want).abs() < 1e-12 * want);
    }
}
