//! Stacked line charts as standalone SVG.

use std::fmt::Write as _;

const WIDTH: f64 = 900.0;
const PANEL: f64 = 140.0;
const MARGIN: f64 = 40.0;
const MAX_POINTS: usize = 1500;

pub struct Panel<'a> {
    pub title: String,
    pub recovered: &'a [f64],
    pub truth: Option<&'a [f64]>,
}

fn polyline(out: &mut String, t: &[f64], y: &[f64], top: f64, lo: f64, hi: f64, style: &str) {
    let (t0, t1) = (t[0], t[t.len() - 1]);
    let span_t = if t1 > t0 { t1 - t0 } else { 1.0 };
    let span_y = if hi > lo { hi - lo } else { 1.0 };
    let step = (y.len() / MAX_POINTS).max(1);
    out.push_str("<polyline fill=\"none\" ");
    out.push_str(style);
    out.push_str(" points=\"");
    for k in (0..y.len()).step_by(step) {
        let px = MARGIN + (t[k] - t0) / span_t * (WIDTH - 2.0 * MARGIN);
        let py = top + PANEL - 20.0 - (y[k] - lo) / span_y * (PANEL - 30.0);
        let _ = write!(out, "{px:.1},{py:.1} ");
    }
    out.push_str("\"/>\n");
}

/// One panel per series: recovered in solid blue, truth (if any) dashed red.
pub fn render(t: &[f64], panels: &[Panel]) -> String {
    let height = PANEL * panels.len() as f64 + MARGIN;
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{height}\" \
         viewBox=\"0 0 {WIDTH} {height}\" font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    );
    for (i, p) in panels.iter().enumerate() {
        let top = MARGIN / 2.0 + i as f64 * PANEL;
        let all = p.recovered.iter().chain(p.truth.into_iter().flatten());
        let (lo, hi) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        let _ = writeln!(
            out,
            "<text x=\"{MARGIN}\" y=\"{:.1}\">{} [{lo:.3}, {hi:.3}]</text>",
            top + 5.0,
            p.title
        );
        let _ = writeln!(
            out,
            "<rect x=\"{MARGIN}\" y=\"{:.1}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"none\" stroke=\"#ccc\"/>",
            top + 10.0,
            WIDTH - 2.0 * MARGIN,
            PANEL - 20.0
        );
        if let Some(tr) = p.truth {
            polyline(&mut out, t, tr, top, lo, hi, "stroke=\"#d62728\" stroke-dasharray=\"6,3\"");
        }
        polyline(&mut out, t, p.recovered, top, lo, hi, "stroke=\"#1f77b4\"");
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_every_panel() {
        let t: Vec<f64> = (0..10).map(f64::from).collect();
        let y: Vec<f64> = t.iter().map(|v| v * v).collect();
        let svg = render(
            &t,
            &[
                Panel {
                    title: "mode 1".into(),
                    recovered: &y,
                    truth: Some(&t),
                },
                Panel {
                    title: "residual".into(),
                    recovered: &t,
                    truth: None,
                },
            ],
        );
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<polyline").count(), 3);
        assert!(svg.contains("mode 1") && svg.contains("residual"));
    }
}
