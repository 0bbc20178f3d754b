//! Static SVG plot of a trace: log-scale gap and σ against `m`, plus the
//! fitted-rate overlay.

use std::fmt::Write as _;
use std::path::Path;

use crate::analysis::{default_floor, fit_rate, DEFAULT_BURN_IN};
use crate::error::{Error, Result};
use crate::greedy::TRACE_HEADER;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 50.0;
const MAX_POINTS: usize = 2000;
const OVERLAY_SAMPLES: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlotRow {
    pub m: usize,
    pub energy: f64,
    pub gap: Option<f64>,
    pub sigma: f64,
}

fn malformed(path: &Path, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("malformed trace {}: {msg}", path.display()))
}

/// Parse a trace CSV, checking the header and every numeric field.
pub fn read_trace(path: &Path) -> Result<Vec<PlotRow>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(std::io::BufReader::new(file));
    let header = reader.headers().map_err(|e| malformed(path, e))?.clone();
    if header.iter().ne(TRACE_HEADER.iter().copied()) {
        return Err(malformed(path, format!("header {:?} differs from {TRACE_HEADER:?}", header.iter().collect::<Vec<_>>())));
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| malformed(path, e))?;
        let num = |k: usize| -> Result<f64> {
            rec[k].parse::<f64>().map_err(|e| malformed(path, format!("row {i}, column {}: {e}", TRACE_HEADER[k])))
        };
        let m = rec[0].parse::<usize>().map_err(|e| malformed(path, format!("row {i}, column m: {e}")))?;
        if m != i {
            return Err(malformed(path, format!("row {i} has m = {m}")));
        }
        let gap = if rec[2].is_empty() { None } else { Some(num(2)?) };
        rows.push(PlotRow { m, energy: num(1)?, gap, sigma: num(3)? });
    }
    if rows.is_empty() {
        return Err(malformed(path, "no data rows"));
    }
    Ok(rows)
}

/// Gaps from the trace, or `E_m - E_M` when no reference energy was known.
fn gap_series(rows: &[PlotRow]) -> Vec<f64> {
    match rows.iter().map(|r| r.gap).collect::<Option<Vec<f64>>>() {
        Some(g) => g,
        None => {
            let last = rows.last().map_or(0.0, |r| r.energy);
            rows.iter().map(|r| r.energy - last).collect()
        }
    }
}

/// Replace non-positive values by `1e-13` of the first positive value so
/// they survive the log scale.
fn clip_to_floor(values: &[f64]) -> Vec<f64> {
    let first = values.iter().copied().find(|v| *v > 0.0).unwrap_or(1.0);
    let floor = 1e-13 * first;
    values.iter().map(|&v| if v > floor { v } else { floor }).collect()
}

/// Indices kept after decimation; the last index is always included.
fn decimate(len: usize) -> Vec<usize> {
    if len <= MAX_POINTS {
        return (0..len).collect();
    }
    let stride = len.div_ceil(MAX_POINTS - 1);
    let mut idx: Vec<usize> = (0..len).step_by(stride).collect();
    if *idx.last().unwrap() != len - 1 {
        idx.push(len - 1);
    }
    idx
}

struct Frame {
    m_max: f64,
    lo: f64,
    hi: f64,
}

impl Frame {
    fn x(&self, m: f64) -> f64 {
        MARGIN_LEFT + (WIDTH - MARGIN_LEFT - MARGIN_RIGHT) * m / self.m_max
    }

    fn y(&self, log10_v: f64) -> f64 {
        let t = ((log10_v - self.lo) / (self.hi - self.lo)).clamp(0.0, 1.0);
        HEIGHT - MARGIN_BOTTOM - (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM) * t
    }
}

fn polyline(frame: &Frame, class: &str, values: &[f64], idx: &[usize]) -> String {
    let mut pts = String::new();
    for (k, &i) in idx.iter().enumerate() {
        if k > 0 {
            pts.push(' ');
        }
        let _ = write!(pts, "{:.2},{:.2}", frame.x(i as f64), frame.y(values[i].log10()));
    }
    format!("<polyline class=\"{class}\" fill=\"none\" points=\"{pts}\"/>\n")
}

/// Render the SVG. Returns the document and any warnings.
pub fn render_svg(rows: &[PlotRow]) -> (String, Vec<String>) {
    let mut warnings = Vec::new();
    if rows.len() < 2 {
        warnings.push(format!("degenerate plot: trace has {} row(s)", rows.len()));
    }
    let raw_gaps = gap_series(rows);
    let gaps = clip_to_floor(&raw_gaps);
    let sigmas = clip_to_floor(&rows.iter().map(|r| r.sigma).collect::<Vec<_>>());

    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in gaps.iter().chain(&sigmas) {
        lo = lo.min(v.log10());
        hi = hi.max(v.log10());
    }
    let (lo, hi) = if hi - lo < 1e-9 { (lo - 1.0, hi + 1.0) } else { (lo.floor(), hi.ceil()) };
    let frame = Frame { m_max: (rows.len() - 1).max(1) as f64, lo, hi };
    let idx = decimate(rows.len());

    let fit = fit_rate(&raw_gaps, DEFAULT_BURN_IN, default_floor(&raw_gaps));
    let mut overlay = String::new();
    if fit.log_intercepts.is_some() {
        let start = fit.burn_in.max(1) as f64;
        let end = (fit.floor_index - 1) as f64;
        for k in 0..=OVERLAY_SAMPLES {
            let m = start + (end - start) * k as f64 / OVERLAY_SAMPLES as f64;
            let ly = fit.model_log_gap(m).unwrap_or(0.0) / std::f64::consts::LN_10;
            let _ = write!(overlay, "{}{:.2},{:.2} ", if k == 0 { "M" } else { "L" }, frame.x(m), frame.y(ly));
        }
    } else {
        // No fit: chord from the first to the last gap.
        let last = gaps.len() - 1;
        let _ = write!(
            overlay,
            "M{:.2},{:.2} L{:.2},{:.2} ",
            frame.x(0.0),
            frame.y(gaps[0].log10()),
            frame.x(last as f64),
            frame.y(gaps[last].log10())
        );
    }
    let label = match fit.kind {
        k if fit.log_intercepts.is_none() => format!("fit: {} (window {})", k.as_str(), fit.window),
        crate::analysis::RateKind::Exponential => format!("fit: exponential, factor {:.6}", fit.alpha.unwrap_or(f64::NAN)),
        crate::analysis::RateKind::Algebraic => format!("fit: algebraic, exponent {:.4}", fit.exponent.unwrap_or(f64::NAN)),
        crate::analysis::RateKind::Undetermined => "fit: undetermined".to_string(),
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    svg.push_str(
        "<style>.gap{stroke:#1f77b4;stroke-width:1.5}.sigma{stroke:#d62728;stroke-width:1.5}\
         .overlay{stroke:#2ca02c;stroke-width:1.2;stroke-dasharray:6 4;fill:none}\
         .axis{stroke:#333;stroke-width:1}.grid{stroke:#ddd;stroke-width:0.5}\
         text{font-family:sans-serif;font-size:12px}</style>\n",
    );
    let (x0, x1) = (MARGIN_LEFT, WIDTH - MARGIN_RIGHT);
    let (y0, y1) = (HEIGHT - MARGIN_BOTTOM, MARGIN_TOP);
    for d in (lo as i64)..=(hi as i64) {
        let y = frame.y(d as f64);
        let _ = writeln!(svg, "<line class=\"grid\" x1=\"{x0:.2}\" y1=\"{y:.2}\" x2=\"{x1:.2}\" y2=\"{y:.2}\"/>");
        let _ = writeln!(svg, "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">1e{d}</text>", x0 - 6.0, y + 4.0);
    }
    let _ = writeln!(svg, "<line class=\"axis\" x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{x1:.2}\" y2=\"{y0:.2}\"/>");
    let _ = writeln!(svg, "<line class=\"axis\" x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{x0:.2}\" y2=\"{y1:.2}\"/>");
    let _ = writeln!(svg, "<text x=\"{x0:.2}\" y=\"{:.2}\">0</text>", y0 + 18.0);
    let _ = writeln!(
        svg,
        "<text x=\"{x1:.2}\" y=\"{:.2}\" text-anchor=\"end\">m = {}</text>",
        y0 + 18.0,
        rows.len() - 1
    );
    svg.push_str(&polyline(&frame, "gap", &gaps, &idx));
    svg.push_str(&polyline(&frame, "sigma", &sigmas, &idx));
    let _ = writeln!(svg, "<path class=\"overlay\" d=\"{}\"/>", overlay.trim_end());
    let _ = writeln!(
        svg,
        "<text x=\"{:.2}\" y=\"{:.2}\">gap (blue), sigma (red); {label}</text>",
        x0 + 10.0,
        y1 - 10.0
    );
    if let Some(w) = warnings.first() {
        let _ = writeln!(svg, "<text x=\"{:.2}\" y=\"{:.2}\">{w}</text>", x0 + 10.0, y1 + 20.0);
    }
    svg.push_str("</svg>\n");
    (svg, warnings)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(gaps: &[f64]) -> Vec<PlotRow> {
        gaps.iter()
            .enumerate()
            .map(|(m, &g)| PlotRow { m, energy: g - 12.5, gap: Some(g), sigma: g.sqrt() })
            .collect()
    }

    #[test]
    fn structure_and_zero_clipping() {
        let (svg, warnings) = render_svg(&rows(&[12.5, 4.5, 0.0]));
        assert!(warnings.is_empty());
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg.matches("class=\"overlay\"").count(), 1);
        assert!(!svg.contains("NaN") && !svg.contains("inf"));
    }

    #[test]
    fn single_row_warns() {
        let (svg, warnings) = render_svg(&rows(&[1.0]));
        assert_eq!(warnings.len(), 1);
        assert!(svg.contains("degenerate"));
    }

    #[test]
    fn long_traces_are_decimated_and_fitted() {
        let g: Vec<f64> = (0..10_000).map(|m| 0.999f64.powi(m)).collect();
        let (svg, _) = render_svg(&rows(&g));
        let pts = svg.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
        assert!(pts.split(' ').count() <= MAX_POINTS);
        assert!(svg.contains("fit: exponential"));
    }
}
