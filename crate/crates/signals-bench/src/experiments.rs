//! Experiment runners: convergence scans, noise sweeps, the refinement
//! comparison and the SVMD against VMD comparison.

use refinement::{run_pipeline, PipelineConfig};
use serde::Serialize;
use spectral::{analytic_spectrum, center_frequency, Signal};
use svmd_core::{decompose, extract_one, Mode};
use vmd_baseline::{vmd_decompose, VmdConfig};

use crate::{em, er, gen_signal, mode_count, q_ee, BenchError, BenchSignal, QualityReport, Result};

/// Nominal center (Hz) of every true mode, used as the origin of
/// convergence scans. Trends sit at 2 Hz, chirps at their mid frequency.
pub fn nominal_centers(id: u8) -> Result<Vec<f64>> {
    Ok(match id {
        1 => vec![2.0, 45.0, 100.0],
        2 => vec![2.0, 60.0, 100.0],
        3 => vec![2.0, 30.0, 60.0],
        4 => vec![2.0, 80.0, 120.0, 45.0],
        _ => return Err(BenchError::UnknownSignal(id)),
    })
}

/// Run `f` on every item on its own thread, keeping the input order.
pub fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    std::thread::scope(|s| {
        let handles: Vec<_> = items.iter().map(|x| s.spawn(|| f(x))).collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    })
}

fn mean(v: impl IntoIterator<Item = f64>) -> f64 {
    let (s, n) = v.into_iter().fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        s / n as f64
    }
}

fn true_center(f: &Signal) -> Result<f64> {
    Ok(center_frequency(&analytic_spectrum(f)?)?)
}

/// For every true mode, the recovered mode with the smallest ER and its
/// metrics. A recovered mode may serve more than one true mode.
pub fn score_modes(modes: &[Mode], truth: &[Signal], end_frac: f64) -> Result<Vec<QualityReport>> {
    truth
        .iter()
        .map(|f| {
            let mut best: Option<(f64, &Mode)> = None;
            for m in modes {
                let e = er(&m.time, f)?;
                if best.is_none_or(|(b, _)| e < b) {
                    best = Some((e, m));
                }
            }
            match best {
                Some((e, m)) => Ok(QualityReport {
                    er: e,
                    em: em(&m.time, f)?,
                    q_ee: q_ee(&m.time, f, end_frac).ok(),
                    d_c_hz: Some((m.center_hz - true_center(f)?).abs()),
                }),
                None => Ok(QualityReport {
                    er: 1.0,
                    em: f.samples.iter().fold(0.0, |a, v| f64::max(a, v.abs())),
                    q_ee: None,
                    d_c_hz: None,
                }),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanPoint {
    pub offset_hz: f64,
    pub converged: bool,
    pub er: f64,
    /// Final center minus the nominal center.
    pub d_c_hz: f64,
    pub iterations: usize,
}

/// ER below which a scan point counts as converged.
pub const CONVERGED_ER: f64 = 0.2;

/// Start one extraction from an impulse at `nominal + offset` for each
/// offset and score it against true mode `component` (0-based).
///
/// The extraction runs on the elongated spectrum minus the first-cycle modes
/// extracted before the one that recovers `component`.
pub fn run_convergence_scan(
    id: u8,
    sigma: f64,
    seed: u64,
    component: usize,
    offsets_hz: &[f64],
    cfg: &PipelineConfig,
) -> Result<Vec<ScanPoint>> {
    let b = gen_signal(id, sigma, seed)?;
    let centers = nominal_centers(id)?;
    let Some(&c0) = centers.get(component) else {
        return Err(BenchError::InvalidInput(format!("signal {id} has no component {}", component + 1)));
    };
    let truth = &b.true_modes[component];
    let (work, left, n) = match &cfg.pcr {
        Some(p) => {
            let e = elongation_pcr::elongate(&b.mixture, p).map_err(|e| BenchError::InvalidInput(e.to_string()))?;
            (e.extended.clone(), e.left_len, e.n_time)
        }
        None => (b.mixture.clone(), 0, b.mixture.len()),
    };
    let spec = analytic_spectrum(&work)?;
    let first = decompose(&work, &cfg.svmd).map_err(svmd_err)?;
    let crop = |m: &Mode| -> Result<Signal> { Ok(m.time.slice(left, n)?) };
    let mut best = (f64::INFINITY, 0);
    for (i, m) in first.modes.iter().enumerate() {
        let e = er(&crop(m)?, truth)?;
        if e < best.0 {
            best = (e, i);
        }
    }
    let mut fr = spec.clone();
    for m in &first.modes[..best.1.min(first.modes.len())] {
        fr = fr.sub(&m.spectrum);
    }
    let nyq = b.mixture.sample_rate_hz / 2.0;
    offsets_hz
        .iter()
        .filter(|o| (0.0..=nyq).contains(&(c0 + **o)))
        .map(|&off| {
            let j = fr.bin_of(c0 + off);
            let mut init = fr.zeros_like();
            init.bins[j] = fr.bins[j];
            let (m, trace) = extract_one(&fr, &init, &cfg.svmd).map_err(svmd_err)?;
            let e = er(&crop(&m)?, truth)?;
            Ok(ScanPoint {
                offset_hz: off,
                converged: e < CONVERGED_ER,
                er: e,
                d_c_hz: m.center_hz - c0,
                iterations: trace.iterations(),
            })
        })
        .collect()
}

/// The run of consecutive converged points around the converged point
/// nearest zero offset, as (lowest, highest) offset.
pub fn convergent_interval(points: &[ScanPoint]) -> Option<(f64, f64)> {
    let start = points
        .iter()
        .enumerate()
        .filter(|(_, p)| p.converged)
        .min_by(|a, b| a.1.offset_hz.abs().total_cmp(&b.1.offset_hz.abs()))?
        .0;
    let mut lo = start;
    while lo > 0 && points[lo - 1].converged {
        lo -= 1;
    }
    let mut hi = start;
    while hi + 1 < points.len() && points[hi + 1].converged {
        hi += 1;
    }
    Some((points[lo].offset_hz, points[hi].offset_hz))
}

fn svmd_err(e: svmd_core::SvmdError) -> BenchError {
    BenchError::InvalidInput(e.to_string())
}

fn refine_err(e: refinement::RefineError) -> BenchError {
    BenchError::InvalidInput(e.to_string())
}

fn vmd_err(e: vmd_baseline::VmdError) -> BenchError {
    BenchError::InvalidInput(e.to_string())
}

/// Scores of one pipeline run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SvmdRun {
    pub before_refinement: Vec<QualityReport>,
    pub after_refinement: Vec<QualityReport>,
    pub mode_count: usize,
}

pub fn run_svmd(b: &BenchSignal, cfg: &PipelineConfig, end_frac: f64) -> Result<SvmdRun> {
    let out = run_pipeline(&b.mixture, cfg).map_err(refine_err)?;
    Ok(SvmdRun {
        before_refinement: score_modes(&out.first_cycle, &b.true_modes, end_frac)?,
        after_refinement: score_modes(&out.modes, &b.true_modes, end_frac)?,
        mode_count: out.verdict.count,
    })
}

pub fn run_vmd(b: &BenchSignal, cfg: &VmdConfig, end_frac: f64) -> Result<Vec<QualityReport>> {
    let r = vmd_decompose(&b.mixture, cfg).map_err(vmd_err)?;
    score_modes(&r.modes, &b.true_modes, end_frac)
}

/// VMD settings used as the comparator: K equal to the true mode count.
pub fn vmd_for(id: u8, base: &VmdConfig) -> Result<VmdConfig> {
    Ok(VmdConfig {
        k_modes: mode_count(id)?,
        ..base.clone()
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub sigma: f64,
    pub method: &'static str,
    pub component: usize,
    pub mean_er: f64,
    pub mean_em: f64,
}

/// Mean first-cycle SVMD and VMD scores per noise level and component.
pub fn run_noise_sweep(
    id: u8,
    sigmas: &[f64],
    seeds: &[u64],
    cfg: &PipelineConfig,
    vmd: &VmdConfig,
) -> Result<Vec<SweepRow>> {
    let vcfg = vmd_for(id, vmd)?;
    let grid: Vec<(f64, u64)> = sigmas.iter().flat_map(|&s| seeds.iter().map(move |&k| (s, k))).collect();
    let runs = par_map(&grid, |&(s, k)| -> Result<(Vec<QualityReport>, Vec<QualityReport>)> {
        let b = gen_signal(id, s, k)?;
        let sv = run_svmd(&b, cfg, 0.02)?;
        Ok((sv.before_refinement, run_vmd(&b, &vcfg, 0.02)?))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let k = mode_count(id)?;
    let mut rows = Vec::new();
    for &s in sigmas {
        let at: Vec<&(Vec<QualityReport>, Vec<QualityReport>)> =
            grid.iter().zip(&runs).filter(|(g, _)| g.0 == s).map(|(_, r)| r).collect();
        for (method, pick) in [("svmd", 0), ("vmd", 1)] {
            for c in 0..k {
                let q = |r: &&(Vec<QualityReport>, Vec<QualityReport>)| if pick == 0 { r.0[c] } else { r.1[c] };
                rows.push(SweepRow {
                    sigma: s,
                    method,
                    component: c + 1,
                    mean_er: mean(at.iter().map(|r| q(r).er)),
                    mean_em: mean(at.iter().map(|r| q(r).em)),
                });
            }
        }
    }
    Ok(rows)
}

/// Fraction of (sigma, component) points where SVMD's mean EM is at most
/// VMD's.
pub fn em_win_fraction(rows: &[SweepRow]) -> f64 {
    let svmd: Vec<&SweepRow> = rows.iter().filter(|r| r.method == "svmd").collect();
    let wins = svmd
        .iter()
        .filter(|s| {
            rows.iter()
                .find(|v| v.method == "vmd" && v.sigma == s.sigma && v.component == s.component)
                .is_some_and(|v| s.mean_em <= v.mean_em)
        })
        .count();
    wins as f64 / svmd.len().max(1) as f64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefineRow {
    pub component: usize,
    pub er_before: f64,
    pub er_after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefineSummary {
    pub rows: Vec<RefineRow>,
    /// Detected mode count per seed.
    pub counts: Vec<usize>,
}

/// Mean ER of every component before and after refinement.
pub fn run_refine(id: u8, sigma: f64, seeds: &[u64], cfg: &PipelineConfig) -> Result<RefineSummary> {
    let runs = par_map(seeds, |&k| run_svmd(&gen_signal(id, sigma, k)?, cfg, 0.02))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let rows = (0..mode_count(id)?)
        .map(|c| RefineRow {
            component: c + 1,
            er_before: mean(runs.iter().map(|r| r.before_refinement[c].er)),
            er_after: mean(runs.iter().map(|r| r.after_refinement[c].er)),
        })
        .collect();
    Ok(RefineSummary {
        rows,
        counts: runs.iter().map(|r| r.mode_count).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub method: &'static str,
    pub component: usize,
    pub er: f64,
    pub em: f64,
    /// Mean over the seeds where it is defined.
    pub q_ee: Option<f64>,
}

/// Full SVMD pipeline against VMD with K equal to the true count, averaged
/// over seeds.
pub fn run_compare(
    id: u8,
    sigma: f64,
    seeds: &[u64],
    cfg: &PipelineConfig,
    vmd: &VmdConfig,
    end_frac: f64,
) -> Result<Vec<CompareRow>> {
    let vcfg = vmd_for(id, vmd)?;
    let runs = par_map(seeds, |&k| -> Result<(Vec<QualityReport>, Vec<QualityReport>)> {
        let b = gen_signal(id, sigma, k)?;
        Ok((run_svmd(&b, cfg, end_frac)?.after_refinement, run_vmd(&b, &vcfg, end_frac)?))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for (method, pick) in [("svmd", 0), ("vmd", 1)] {
        for c in 0..mode_count(id)? {
            let q: Vec<QualityReport> = runs.iter().map(|r| if pick == 0 { r.0[c] } else { r.1[c] }).collect();
            let qs: Vec<f64> = q.iter().filter_map(|x| x.q_ee).collect();
            rows.push(CompareRow {
                method,
                component: c + 1,
                er: mean(q.iter().map(|x| x.er)),
                em: mean(q.iter().map(|x| x.em)),
                q_ee: (!qs.is_empty()).then(|| mean(qs)),
            });
        }
    }
    Ok(rows)
}
