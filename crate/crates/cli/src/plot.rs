//! Static SVG line charts from tabular CSV.

use std::fmt::Write as _;
use std::io::Read;

use crate::error::{CliError, CliResult};

const WIDTH: f64 = 800.0;
const PLOT_HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 50.0;
const AXIS_BAND: f64 = 50.0;
const LEGEND_ROW: f64 = 18.0;
const LEGEND_COLUMNS: usize = 5;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlotOptions {
    pub title: Option<String>,
    /// Column names; inferred from the header when absent.
    pub x_column: Option<String>,
    pub series_column: Option<String>,
    pub y_column: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub id: String,
    pub points: Vec<(f64, f64)>,
}

fn column(header: &[String], wanted: &Option<String>, preferred: &[&str], fallback: usize) -> CliResult<usize> {
    if let Some(name) = wanted {
        return header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Data(format!("line 1: no column named {name:?}")));
    }
    if let Some(i) = preferred.iter().find_map(|p| header.iter().position(|h| h == p)) {
        return Ok(i);
    }
    if fallback < header.len() {
        Ok(fallback)
    } else {
        Err(CliError::Data(format!("line 1: expected at least {} columns", fallback + 1)))
    }
}

/// Reads `(x, series, y)` rows. Series keep their order of first appearance.
pub fn read_series<R: Read>(input: R, opts: &PlotOptions) -> CliResult<Vec<Series>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::Data(format!("line 1: {e}")))?
        .iter()
        .map(str::to_string)
        .collect();
    let xi = column(&header, &opts.x_column, &["round", "x"], 0)?;
    let si = column(&header, &opts.series_column, &["node", "subset", "series"], 1)?;
    let yi = column(&header, &opts.y_column, &["accuracy", "mean", "y"], 2)?;

    let mut series: Vec<Series> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            CliError::Data(format!("line {line}: {e}"))
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let number = |i: usize, name: &str| -> CliResult<f64> {
            let raw = record.get(i).unwrap_or("");
            match raw.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(CliError::Data(format!("line {line}: {name} value {raw:?} is not a finite number"))),
            }
        };
        let x = number(xi, &header[xi])?;
        let y = number(yi, &header[yi])?;
        let id = record.get(si).unwrap_or("").to_string();
        match series.iter_mut().find(|s| s.id == id) {
            Some(s) => s.points.push((x, y)),
            None => series.push(Series { id, points: vec![(x, y)] }),
        }
    }
    Ok(series)
}

/// Evenly spaced ticks on a 1-2-5 grid covering `[lo, hi]`.
pub fn nice_ticks(lo: f64, hi: f64) -> (f64, f64, f64) {
    let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
    let rough = (hi - lo) / 5.0;
    let mag = 10f64.powf(rough.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|f| f * mag)
        .find(|&s| s >= rough)
        .unwrap_or(10.0 * mag);
    ((lo / step).floor() * step, (hi / step).ceil() * step, step)
}

fn decimals(step: f64) -> usize {
    (-step.log10().floor()).max(0.0) as usize
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn bounds(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    values.fold(None, |acc, v| match acc {
        None => Some((v, v)),
        Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
    })
}

/// Renders one polyline per series with gridlines, tick labels and a legend.
/// Identical input yields identical bytes.
pub fn render_svg(series: &[Series], opts: &PlotOptions) -> String {
    let points = || series.iter().flat_map(|s| s.points.iter());
    let (x_lo, x_hi, x_step) = match bounds(points().map(|p| p.0)) {
        Some((lo, hi)) => nice_ticks(lo, hi),
        None => (0.0, 1.0, 0.2),
    };
    let (y_lo, y_hi, y_step) = match bounds(points().map(|p| p.1)) {
        Some((lo, hi)) if lo >= 0.0 && hi <= 1.0 => (0.0, 1.0, 0.1),
        Some((lo, hi)) => nice_ticks(lo, hi),
        None => (0.0, 1.0, 0.1),
    };
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let legend_rows = series.len().div_ceil(LEGEND_COLUMNS);
    let height = MARGIN_TOP + PLOT_HEIGHT + AXIS_BAND + legend_rows as f64 * LEGEND_ROW + 10.0;
    let sx = |x: f64| MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |y: f64| MARGIN_TOP + (y_hi - y) / (y_hi - y_lo) * PLOT_HEIGHT;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if let Some(title) = &opts.title {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="28" text-anchor="middle" font-size="16">{}</text>"#,
            WIDTH / 2.0,
            escape(title)
        );
    }

    let _ = writeln!(svg, r##"<g class="grid" stroke="#dddddd" stroke-width="1">"##);
    let y_ticks = ((y_hi - y_lo) / y_step).round() as usize;
    for k in 0..=y_ticks {
        let y = sy(y_lo + k as f64 * y_step);
        let _ = writeln!(svg, r#"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}"/>"#, MARGIN_LEFT, MARGIN_LEFT + plot_w);
    }
    let x_ticks = ((x_hi - x_lo) / x_step).round() as usize;
    for k in 0..=x_ticks {
        let x = sx(x_lo + k as f64 * x_step);
        let _ = writeln!(svg, r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}"/>"#, MARGIN_TOP, MARGIN_TOP + PLOT_HEIGHT);
    }
    let _ = writeln!(svg, "</g>");

    let _ = writeln!(svg, r#"<g class="axes" stroke="black" stroke-width="1">"#);
    let base = MARGIN_TOP + PLOT_HEIGHT;
    let _ = writeln!(svg, r#"<line x1="{MARGIN_LEFT:.2}" y1="{base:.2}" x2="{:.2}" y2="{base:.2}"/>"#, MARGIN_LEFT + plot_w);
    let _ = writeln!(svg, r#"<line x1="{MARGIN_LEFT:.2}" y1="{MARGIN_TOP:.2}" x2="{MARGIN_LEFT:.2}" y2="{base:.2}"/>"#);
    let _ = writeln!(svg, "</g>");

    let _ = writeln!(svg, r#"<g class="ticks">"#);
    let (xd, yd) = (decimals(x_step), decimals(y_step));
    for k in 0..=y_ticks {
        let v = y_lo + k as f64 * y_step;
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{v:.yd$}</text>"#,
            MARGIN_LEFT - 6.0,
            sy(v) + 4.0
        );
    }
    for k in 0..=x_ticks {
        let v = x_lo + k as f64 * x_step;
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{v:.xd$}</text>"#, sx(v), base + 18.0);
    }
    let _ = writeln!(svg, "</g>");

    let _ = writeln!(svg, r#"<g class="series" fill="none" stroke-width="1.5">"#);
    for (k, s) in series.iter().enumerate() {
        let pts: Vec<String> = s.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(
            svg,
            r#"<polyline data-series="{}" stroke="{}" points="{}"/>"#,
            escape(&s.id),
            PALETTE[k % PALETTE.len()],
            pts.join(" ")
        );
    }
    let _ = writeln!(svg, "</g>");

    let _ = writeln!(svg, r#"<g class="legend">"#);
    let col_w = plot_w / LEGEND_COLUMNS as f64;
    for (k, s) in series.iter().enumerate() {
        let x = MARGIN_LEFT + (k % LEGEND_COLUMNS) as f64 * col_w;
        let y = base + AXIS_BAND - 10.0 + (k / LEGEND_COLUMNS) as f64 * LEGEND_ROW;
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{}" stroke-width="3"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            x + 18.0,
            PALETTE[k % PALETTE.len()],
            x + 24.0,
            y + 4.0,
            escape(&s.id)
        );
    }
    let _ = writeln!(svg, "</g>");
    svg.push_str("</svg>\n");
    svg
}

pub fn plot_lines<R: Read>(input: R, opts: &PlotOptions) -> CliResult<String> {
    Ok(render_svg(&read_series(input, opts)?, opts))
}
