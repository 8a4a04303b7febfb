use std::io::Read;
use std::path::Path;
use std::time::Instant;

use elongation_pcr::PcrConfig;
use refinement::{run_pipeline, PipelineConfig, RefineConfig};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use spectral::{analytic_spectrum, center_frequency, Signal};
use svmd_core::{InitPolicy, Mode, SvmdConfig};
use vmd_baseline::{vmd_decompose, CenterInit, VmdConfig};

use crate::csv::{read_signal, read_truth, write_columns};
use crate::plot::{render, Panel};
use crate::{input_err, DecomposeArgs, Method, Result};

/// End-region width used for Q_ee in reports.
pub const END_FRAC: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeEntry {
    pub index: usize,
    pub center_hz: f64,
    pub power: f64,
    pub power_fraction: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub count: usize,
    pub distance_series: Vec<f64>,
    pub nearest: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metric {
    /// 1-based true mode.
    pub truth: usize,
    /// 1-based recovered mode matched to it (smallest ER).
    pub mode: usize,
    pub er: f64,
    pub em: f64,
    pub q_ee: Option<f64>,
    pub d_c_hz: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub method: Method,
    pub n_samples: usize,
    pub sample_rate_hz: f64,
    pub mode_count: usize,
    pub verdict: Option<Verdict>,
    pub modes: Vec<ModeEntry>,
    pub input_power: f64,
    pub residual_power: f64,
    pub metrics: Option<Vec<Metric>>,
}

fn read_input(path: &Path) -> Result<Vec<u8>> {
    if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        std::io::stdin().lock().read_to_end(&mut buf)?;
        Ok(buf)
    } else {
        std::fs::read(path).map_err(|e| crate::CliError::Input(format!("{}: {e}", path.display())))
    }
}

pub fn pipeline_config(a: &DecomposeArgs) -> PipelineConfig {
    let d = PipelineConfig::default();
    let svmd = SvmdConfig {
        alpha: a.alpha.unwrap_or(d.svmd.alpha),
        beta: a.beta.unwrap_or(d.svmd.beta),
        eps_outer: a.eps.unwrap_or(d.svmd.eps_outer),
        eta_inner: a.eta.unwrap_or(d.svmd.eta_inner),
        ..d.svmd
    };
    let refine = RefineConfig {
        // the second cycle follows --alpha unless told otherwise
        alpha: a.alpha_refine.or(a.alpha).unwrap_or(d.refine.alpha),
        beta: a.beta_refine.unwrap_or(d.refine.beta),
        eps_refine: a.eps_refine.unwrap_or(d.refine.eps_refine),
        ..d.refine
    };
    PipelineConfig {
        svmd,
        pcr: (!a.no_elongate).then(PcrConfig::default),
        refine,
        second_cycle: !a.no_refine,
    }
}

pub fn vmd_config(a: &DecomposeArgs) -> VmdConfig {
    let d = VmdConfig::default();
    VmdConfig {
        k_modes: a.k,
        alpha: a.alpha.unwrap_or(d.alpha),
        eta_inner: a.eta.unwrap_or(d.eta_inner),
        mirror_ends: !a.no_elongate,
        ..d
    }
}

fn svmd_json(c: &SvmdConfig) -> Value {
    json!({
        "alpha": c.alpha,
        "beta": c.beta,
        "eps_outer": c.eps_outer,
        "eta_inner": c.eta_inner,
        "max_outer": c.max_outer,
        "max_inner": c.max_inner,
        "init_policy": match &c.init_policy {
            InitPolicy::HighestPeak => json!("highest_peak"),
            InitPolicy::ExplicitFrequency(f) => json!({ "explicit_hz": f }),
        },
        "relative_inner_stop": c.relative_inner_stop,
        "peak_smoothing_bins": c.peak_smoothing_bins,
        "exclusion_radius_hz": c.exclusion_radius_hz,
        "peak_snr": c.peak_snr,
    })
}

fn pcr_json(c: &PcrConfig) -> Value {
    json!({
        "end_window_frac": c.end_window_frac,
        "extension_frac": c.extension_frac,
        "trend_order": c.trend_order,
        "n_principal": c.n_principal,
        "weighting_exponent": c.weighting_exponent,
        "component_snr": c.component_snr,
        "global_trend": c.global_trend,
        "far_end_taper": c.far_end_taper,
    })
}

fn refine_json(c: &RefineConfig) -> Value {
    json!({
        "eps_refine": c.eps_refine,
        "merge_tol_hz": c.merge_tol_hz,
        "jump_threshold": c.jump_threshold,
        "snr_stop": c.snr_stop,
        "alpha": c.alpha,
        "beta": c.beta,
        "profile_smoothing_hz": c.profile_smoothing_hz,
        "fold_max_distance": c.fold_max_distance,
        "min_mode_power": c.min_mode_power,
    })
}

pub fn config_json(a: &DecomposeArgs) -> Value {
    match a.method {
        Method::Svmd => {
            let c = pipeline_config(a);
            json!({
                "method": "svmd",
                "svmd": svmd_json(&c.svmd),
                "pcr": c.pcr.as_ref().map(pcr_json),
                "refine": refine_json(&c.refine),
                "second_cycle": c.second_cycle,
            })
        }
        Method::Vmd => {
            let c = vmd_config(a);
            json!({
                "method": "vmd",
                "k_modes": c.k_modes,
                "alpha": c.alpha,
                "eta_inner": c.eta_inner,
                "max_iter": c.max_iter,
                "mirror_ends": c.mirror_ends,
                "mirror_frac": c.mirror_frac,
                "init": match c.init { CenterInit::Uniform => "uniform", CenterInit::Peaks => "peaks" },
            })
        }
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn metrics(modes: &[Mode], truth: &[Signal]) -> Result<Vec<Metric>> {
    let mut out = Vec::new();
    for (i, f) in truth.iter().enumerate() {
        let Some((j, _)) = signals_bench::best_match(modes.iter().map(|m| &m.time), f).map_err(input_err)? else {
            continue;
        };
        let q = signals_bench::quality(&modes[j].time, f, END_FRAC).map_err(input_err)?;
        let d_c = analytic_spectrum(f)
            .ok()
            .and_then(|h| center_frequency(&h).ok())
            .map(|c| (modes[j].center_hz - c).abs());
        out.push(Metric {
            truth: i + 1,
            mode: j + 1,
            er: q.er,
            em: q.em,
            q_ee: q.q_ee,
            d_c_hz: d_c,
        });
    }
    Ok(out)
}

/// Decompose, write modes.csv, report.json, manifest.json and optionally
/// plot.svg into `a.out`.
pub fn cmd_decompose(a: &DecomposeArgs, argv: &[String]) -> Result<Report> {
    let started = Instant::now();
    let bytes = read_input(&a.input)?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| crate::CliError::Input("input is not UTF-8".into()))?;
    let s = read_signal(&text, a.rate)?;

    let truth = match &a.truth {
        Some(p) => {
            let t = std::fs::read_to_string(p).map_err(|e| crate::CliError::Input(format!("{}: {e}", p.display())))?;
            let cols = read_truth(&t, s.len())?;
            Some(
                cols.into_iter()
                    .map(|c| Signal::with_t0(c, s.sample_rate_hz, s.t0_s))
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(input_err)?,
            )
        }
        None => None,
    };

    let (modes, verdict, input_power) = match a.method {
        Method::Svmd => {
            let out = run_pipeline(&s, &pipeline_config(a)).map_err(input_err)?;
            let v = Verdict {
                count: out.verdict.count,
                distance_series: out.verdict.distance_series.clone(),
                nearest: out.verdict.nearest.clone(),
            };
            (out.modes, Some(v), out.input_power)
        }
        Method::Vmd => {
            let r = vmd_decompose(&s, &vmd_config(a)).map_err(input_err)?;
            (r.modes, None, r.input_power)
        }
    };

    let mut residual = s.samples.clone();
    for m in &modes {
        for (r, v) in residual.iter_mut().zip(&m.time.samples) {
            *r -= v;
        }
    }
    let residual_power = analytic_spectrum(&Signal::with_t0(residual.clone(), s.sample_rate_hz, s.t0_s).map_err(input_err)?)
        .map(|h| h.power())
        .unwrap_or(0.0);

    let report = Report {
        method: a.method,
        n_samples: s.len(),
        sample_rate_hz: s.sample_rate_hz,
        mode_count: verdict.as_ref().map_or(modes.len(), |v| v.count),
        verdict,
        modes: modes
            .iter()
            .enumerate()
            .map(|(i, m)| ModeEntry {
                index: i + 1,
                center_hz: m.center_hz,
                power: m.power,
                power_fraction: m.power / input_power,
                iterations: m.iterations_used,
            })
            .collect(),
        input_power,
        residual_power,
        metrics: truth.as_deref().map(|t| metrics(&modes, t)).transpose()?,
    };

    std::fs::create_dir_all(&a.out)?;
    let t = s.times();
    let mut header = vec!["t".to_string()];
    header.extend((1..=modes.len()).map(|i| format!("mode_{i}")));
    header.push("residual".into());
    let mut cols: Vec<&[f64]> = modes.iter().map(|m| m.time.samples.as_slice()).collect();
    cols.push(&residual);
    std::fs::write(a.out.join("modes.csv"), write_columns(&header, &t, &cols))?;
    let mut report_text = serde_json::to_string_pretty(&report).map_err(input_err)?;
    report_text.push('\n');
    std::fs::write(a.out.join("report.json"), report_text)?;

    if a.plot {
        let mut panels: Vec<Panel> = modes
            .iter()
            .enumerate()
            .map(|(i, m)| Panel {
                title: format!("mode {} ({:.1} Hz)", i + 1, m.center_hz),
                recovered: &m.time.samples,
                truth: report
                    .metrics
                    .as_ref()
                    .and_then(|ms| ms.iter().find(|x| x.mode == i + 1))
                    .zip(truth.as_ref())
                    .map(|(x, tr)| tr[x.truth - 1].samples.as_slice()),
            })
            .collect();
        panels.push(Panel {
            title: "residual".into(),
            recovered: &residual,
            truth: None,
        });
        std::fs::write(a.out.join("plot.svg"), render(&t, &panels))?;
    }

    let manifest = json!({
        "command": argv,
        "config": config_json(a),
        "input": {
            "path": a.input.display().to_string(),
            "sha256": hex(&Sha256::digest(&bytes)),
            "truth_sha256": match &a.truth {
                Some(p) => Some(hex(&Sha256::digest(std::fs::read(p)?))),
                None => None,
            },
        },
        "version": env!("CARGO_PKG_VERSION"),
        "duration_s": started.elapsed().as_secs_f64(),
    });
    let mut manifest_text = serde_json::to_string_pretty(&manifest).map_err(input_err)?;
    manifest_text.push('\n');
    std::fs::write(a.out.join("manifest.json"), manifest_text)?;
    Ok(report)
}
