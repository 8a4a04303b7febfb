//! Plain numeric CSV: optional header row, comma separated, UTF-8.

use std::fmt::Write as _;

use spectral::Signal;

use crate::{CliError, Result};

/// Shortest decimal form that reads back to the same f64 (at most 17
/// significant digits).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Option<Vec<String>>,
    pub columns: Vec<Vec<f64>>,
    /// 1-based source line of every data row.
    pub lines: Vec<usize>,
}

impl Table {
    pub fn n_rows(&self) -> usize {
        self.lines.len()
    }
}

fn parse_row(line: &str) -> Option<Vec<f64>> {
    line.split(',').map(|f| f.trim().parse::<f64>().ok()).collect()
}

/// Parse a numeric table. A first row that does not parse as numbers is
/// taken as the header. Blank lines are skipped.
pub fn parse_table(text: &str) -> Result<Table> {
    let mut header = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        match parse_row(line) {
            Some(v) => {
                if let Some(bad) = v.iter().position(|x| !x.is_finite()) {
                    return Err(CliError::Input(format!("line {lineno}: field {} is not finite", bad + 1)));
                }
                if let Some(first) = rows.first() {
                    if v.len() != first.len() {
                        return Err(CliError::Input(format!(
                            "line {lineno}: expected {} fields, found {}",
                            first.len(),
                            v.len()
                        )));
                    }
                }
                rows.push(v);
                lines.push(lineno);
            }
            None if rows.is_empty() && header.is_none() => {
                header = Some(line.split(',').map(|s| s.trim().to_string()).collect::<Vec<_>>());
            }
            None => {
                let field = line
                    .split(',')
                    .position(|f| f.trim().parse::<f64>().is_err())
                    .map_or(1, |p| p + 1);
                return Err(CliError::Input(format!("line {lineno}: field {field} is not a number: {line:?}")));
            }
        }
    }
    let width = rows.first().map_or(0, |r| r.len());
    if let Some(h) = &header {
        if width > 0 && h.len() != width {
            return Err(CliError::Input(format!(
                "header has {} columns but the data rows have {width}",
                h.len()
            )));
        }
    }
    let columns = (0..width).map(|c| rows.iter().map(|r| r[c]).collect()).collect();
    Ok(Table { header, columns, lines })
}

pub const MIN_SAMPLES: usize = 16;
/// Allowed spread of sample intervals, relative to their mean.
pub const TIME_JITTER: f64 = 1e-6;

/// Sample rate implied by a time column, rejecting uneven sampling.
pub fn rate_from_times(t: &[f64], lines: &[usize]) -> Result<f64> {
    let n = t.len();
    let dt = (t[n - 1] - t[0]) / (n - 1) as f64;
    if !(dt > 0.0) {
        return Err(CliError::Input("timestamps must increase".into()));
    }
    for k in 1..n {
        let d = t[k] - t[k - 1];
        if ((d - dt) / dt).abs() > TIME_JITTER {
            return Err(CliError::Input(format!(
                "line {}: timestamps are not uniformly spaced (step {d} against mean {dt})",
                lines[k]
            )));
        }
    }
    Ok(1.0 / dt)
}

/// Read a signal from "t,value" rows, or from a single value column with
/// `rate_hz` given.
pub fn read_signal(text: &str, rate_hz: Option<f64>) -> Result<Signal> {
    let table = parse_table(text)?;
    let n = table.n_rows();
    if n < MIN_SAMPLES {
        return Err(CliError::Input(format!("need at least {MIN_SAMPLES} samples, found {n}")));
    }
    let (values, rate, t0) = match table.columns.len() {
        1 => {
            let Some(r) = rate_hz else {
                return Err(CliError::Input("single-column input needs --rate".into()));
            };
            (table.columns[0].clone(), r, 0.0)
        }
        2 => {
            let r = rate_from_times(&table.columns[0], &table.lines)?;
            if let Some(given) = rate_hz {
                if ((given - r) / r).abs() > 1e-6 {
                    return Err(CliError::Input(format!(
                        "--rate {given} disagrees with the time column ({r} Hz)"
                    )));
                }
            }
            (table.columns[1].clone(), r, table.columns[0][0])
        }
        k => {
            return Err(CliError::Input(format!(
                "expected columns \"t,value\" or a single value column, found {k} columns"
            )))
        }
    };
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(CliError::Input(format!("sample rate must be positive, got {rate}")));
    }
    Signal::with_t0(values, rate, t0).map_err(|e| CliError::Input(e.to_string()))
}

/// Read true modes from "t,mode_1,...,mode_k" rows.
pub fn read_truth(text: &str, expect_len: usize) -> Result<Vec<Vec<f64>>> {
    let table = parse_table(text)?;
    if table.columns.len() < 2 {
        return Err(CliError::Input("truth file needs a time column and at least one mode column".into()));
    }
    if table.n_rows() != expect_len {
        return Err(CliError::Input(format!(
            "truth file has {} rows, input has {expect_len}",
            table.n_rows()
        )));
    }
    Ok(table.columns[1..].to_vec())
}

/// Header line plus one row per sample.
pub fn write_columns(header: &[String], t: &[f64], columns: &[&[f64]]) -> String {
    let mut out = String::with_capacity(t.len() * 24 * (columns.len() + 1));
    out.push_str(&header.join(","));
    out.push('\n');
    for (k, tk) in t.iter().enumerate() {
        out.push_str(&fmt_f64(*tk));
        for c in columns {
            out.push(',');
            out.push_str(&fmt_f64(c[k]));
        }
        out.push('\n');
    }
    out
}

/// "t,value" rows without a header.
pub fn write_signal(s: &Signal) -> String {
    let mut out = String::with_capacity(s.len() * 40);
    for (k, v) in s.samples.iter().enumerate() {
        let _ = writeln!(out, "{},{}", fmt_f64(s.time(k)), fmt_f64(*v));
    }
    out
}
