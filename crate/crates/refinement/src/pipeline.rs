//! Elongation, first cycle, second cycle, cropping, mode count and folding.

use elongation_pcr::{elongate, truncate, Elongation, PcrConfig};
use spectral::{analytic_spectrum, HalfSpectrum, Signal};
use svmd_core::{decompose, DecompositionResult, ExtractionTrace, Mode, SvmdConfig};

use crate::{detect_mode_count, fold_modes, second_cycle, ModeCountVerdict, RefineConfig, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub svmd: SvmdConfig,
    /// `None` decomposes the record as is.
    pub pcr: Option<PcrConfig>,
    pub refine: RefineConfig,
    /// Without the second cycle the mode count is still detected over the
    /// first-cycle components.
    pub second_cycle: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            svmd: SvmdConfig::default(),
            pcr: Some(PcrConfig::default()),
            refine: RefineConfig::default(),
            second_cycle: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput {
    /// Final modes, on the original time range.
    pub modes: Vec<Mode>,
    pub residual: HalfSpectrum,
    pub verdict: ModeCountVerdict,
    /// First-cycle components cropped to the original range, before any
    /// pruning or folding.
    pub first_cycle: Vec<Mode>,
    /// Components that entered counting: surviving first-cycle ones, then
    /// surviving second-cycle ones.
    pub all_modes: Vec<Mode>,
    /// How many of `all_modes` come from the first cycle.
    pub n_first: usize,
    pub traces: Vec<ExtractionTrace>,
    pub input_power: f64,
    pub elongation: Option<Elongation>,
}

impl PipelineOutput {
    pub fn residual_time(&self) -> Result<Signal> {
        Ok(spectral::inverse_to_time(&self.residual)?)
    }
}

pub fn run_pipeline(s: &Signal, cfg: &PipelineConfig) -> Result<PipelineOutput> {
    cfg.svmd.validate()?;
    cfg.refine.validate()?;
    let elongation = match &cfg.pcr {
        Some(p) => Some(elongate(s, p)?),
        None => None,
    };
    let work = elongation.as_ref().map_or(s, |e| &e.extended);

    let first = decompose(work, &cfg.svmd)?;
    let second = if cfg.second_cycle {
        second_cycle(&first, &cfg.svmd, &cfg.refine)?
    } else {
        DecompositionResult {
            modes: Vec::new(),
            residual: first.residual.clone(),
            traces: Vec::new(),
            input_power: first.input_power,
        }
    };
    let n_first_raw = first.modes.len();
    let mut traces = first.traces.clone();
    traces.extend(second.traces.iter().cloned());
    let mut joined = DecompositionResult {
        modes: first.modes.iter().chain(&second.modes).cloned().collect(),
        residual: second.residual.clone(),
        traces,
        input_power: first.input_power,
    };
    if let Some(e) = &elongation {
        joined = truncate(&joined, e)?;
    } else {
        joined.input_power = analytic_spectrum(s)?.power();
    }
    let first_cycle = joined.modes[..n_first_raw].to_vec();

    let floor = cfg.refine.min_mode_power * joined.input_power;
    let mut residual = joined.residual.clone();
    let mut kept = Vec::new();
    let mut n_first = 0;
    for (i, m) in joined.modes.into_iter().enumerate() {
        if m.power < floor {
            residual.add_assign(&m.spectrum);
        } else {
            n_first += usize::from(i < n_first_raw);
            kept.push(m);
        }
    }

    if kept.is_empty() {
        return Ok(PipelineOutput {
            modes: Vec::new(),
            residual,
            verdict: ModeCountVerdict {
                count: 0,
                distance_series: Vec::new(),
                nearest: Vec::new(),
            },
            first_cycle,
            all_modes: kept,
            n_first,
            traces: joined.traces,
            input_power: joined.input_power,
            elongation,
        });
    }

    let verdict = detect_mode_count(&kept, &cfg.refine)?;
    let folded = fold_modes(&kept, &verdict, &cfg.refine)?;
    residual.add_assign(&folded.dropped);
    Ok(PipelineOutput {
        modes: folded.modes,
        residual,
        verdict,
        first_cycle,
        all_modes: kept,
        n_first,
        traces: joined.traces,
        input_power: joined.input_power,
        elongation,
    })
}
