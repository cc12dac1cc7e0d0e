//! Deterministic SVG line plots read from CSV columns.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{CliError, Result};
use crate::table::read_columns;

const WIDTH: f64 = 720.0;
const PANEL_HEIGHT: f64 = 320.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 36.0;
const MARGIN_BOTTOM: f64 = 48.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mark {
    Line,
    Points,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PanelSpec {
    pub title: String,
    pub x: String,
    pub ys: Vec<String>,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub mark: Mark,
}

impl PanelSpec {
    pub fn line(title: &str, x: &str, ys: &[&str]) -> Self {
        PanelSpec {
            title: title.into(),
            x: x.into(),
            ys: ys.iter().map(|s| s.to_string()).collect(),
            x_label: x.into(),
            y_label: ys.join(", "),
            log_x: false,
            log_y: false,
            mark: Mark::Line,
        }
    }

    pub fn log_log(mut self) -> Self {
        self.log_x = true;
        self.log_y = true;
        self
    }

    pub fn labels(mut self, x: &str, y: &str) -> Self {
        self.x_label = x.into();
        self.y_label = y.into();
        self
    }

    pub fn mark(mut self, mark: Mark) -> Self {
        self.mark = mark;
        self
    }
}

/// Panels are stacked top to bottom.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub title: String,
    pub panels: Vec<PanelSpec>,
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tick_label(v: f64, log: bool) -> String {
    if log {
        format!("1e{}", v.round() as i64)
    } else if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e4 || v.abs() < 1e-2 {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}").trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn range(values: impl Iterator<Item = f64>, log: bool) -> Option<(f64, f64)> {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return None;
    }
    if hi > lo {
        let pad = if log { 0.0 } else { 0.05 * (hi - lo) };
        let (lo, hi) = (lo - pad, hi + pad);
        if log {
            Some((lo.floor(), hi.ceil().max(lo.floor() + 1.0)))
        } else {
            Some((lo, hi))
        }
    } else {
        Some((lo - 0.5, hi + 0.5))
    }
}

fn transform(v: f64, log: bool) -> Option<f64> {
    let t = if log { if v > 0.0 { v.log10() } else { return None } } else { v };
    t.is_finite().then_some(t)
}

fn ticks(lo: f64, hi: f64, log: bool) -> Vec<f64> {
    if log {
        let step = ((hi - lo) / 6.0).ceil().max(1.0);
        let mut t = lo;
        let mut out = Vec::new();
        while t <= hi + 1e-9 {
            out.push(t);
            t += step;
        }
        out
    } else {
        (0..=4).map(|k| lo + (hi - lo) * k as f64 / 4.0).collect()
    }
}

fn panel(svg: &mut String, spec: &PanelSpec, xs: &[f64], ys: &[Vec<f64>], top: f64) -> Result<()> {
    let series: Vec<Vec<(f64, f64)>> = ys
        .iter()
        .map(|col| {
            xs.iter()
                .zip(col)
                .filter_map(|(&x, &y)| Some((transform(x, spec.log_x)?, transform(y, spec.log_y)?)))
                .collect()
        })
        .collect();
    let all = || series.iter().flatten();
    let (x0, x1) = range(all().map(|p| p.0), spec.log_x)
        .ok_or_else(|| CliError::usage(format!("panel `{}` has no plottable points", spec.title)))?;
    let (y0, y1) = range(all().map(|p| p.1), spec.log_y).unwrap_or((0.0, 1.0));
    let (left, right) = (MARGIN_LEFT, WIDTH - MARGIN_RIGHT);
    let (upper, lower) = (top + MARGIN_TOP, top + PANEL_HEIGHT - MARGIN_BOTTOM);
    let px = |x: f64| left + (x - x0) / (x1 - x0) * (right - left);
    let py = |y: f64| lower - (y - y0) / (y1 - y0) * (lower - upper);

    let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="14">{}</text>"#, (left + right) / 2.0, top + 22.0, esc(&spec.title));
    let _ = writeln!(svg, r#"<rect x="{left:.2}" y="{upper:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#, right - left, lower - upper);
    for t in ticks(x0, x1, spec.log_x) {
        let x = px(t);
        let _ = writeln!(svg, r#"<line x1="{x:.2}" y1="{lower:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#, lower + 5.0);
        let _ = writeln!(svg, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle" font-size="11">{}</text>"#, lower + 18.0, tick_label(t, spec.log_x));
    }
    for t in ticks(y0, y1, spec.log_y) {
        let y = py(t);
        let _ = writeln!(svg, r#"<line x1="{:.2}" y1="{y:.2}" x2="{left:.2}" y2="{y:.2}" stroke="black"/>"#, left - 5.0);
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-size="11">{}</text>"#, left - 8.0, y + 4.0, tick_label(t, spec.log_y));
    }
    let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="12">{}</text>"#, (left + right) / 2.0, lower + 36.0, esc(&spec.x_label));
    let (yl_x, yl_y) = (18.0, (upper + lower) / 2.0);
    let _ = writeln!(svg, r#"<text x="{yl_x:.2}" y="{yl_y:.2}" text-anchor="middle" font-size="12" transform="rotate(-90 {yl_x:.2} {yl_y:.2})">{}</text>"#, esc(&spec.y_label));

    for (k, (pts, name)) in series.iter().zip(&spec.ys).enumerate() {
        let color = COLORS[k % COLORS.len()];
        match spec.mark {
            Mark::Line => {
                let mut d = String::new();
                for (i, (x, y)) in pts.iter().enumerate() {
                    let _ = write!(d, "{}{:.2},{:.2}", if i == 0 { "" } else { " " }, px(*x), py(*y));
                }
                let _ = writeln!(svg, r#"<polyline points="{d}" fill="none" stroke="{color}" stroke-width="1.5"/>"#);
            }
            Mark::Points => {
                for (x, y) in pts {
                    let _ = writeln!(svg, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, px(*x), py(*y));
                }
            }
        }
        let ly = upper + 14.0 + 18.0 * k as f64;
        let _ = writeln!(svg, r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#, right + 10.0, right + 30.0);
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" font-size="11">{}</text>"#, right + 35.0, ly + 4.0, esc(name));
    }
    Ok(())
}

/// Renders `spec` from the columns of `csv_path` into an SVG document.
pub fn render_plot(csv_path: &Path, spec: &PlotSpec) -> Result<String> {
    if spec.panels.is_empty() {
        return Err(CliError::usage("plot spec has no panels"));
    }
    let height = MARGIN_TOP + PANEL_HEIGHT * spec.panels.len() as f64;
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif">"#);
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="16">{}</text>"#, WIDTH / 2.0, esc(&spec.title));
    for (i, p) in spec.panels.iter().enumerate() {
        let mut names = vec![p.x.as_str()];
        names.extend(p.ys.iter().map(String::as_str));
        let cols = read_columns(csv_path, &names)?;
        panel(&mut svg, p, &cols[0], &cols[1..], MARGIN_TOP + PANEL_HEIGHT * i as f64)?;
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn emit_plot(csv_path: &Path, spec: &PlotSpec, svg_path: &Path) -> Result<()> {
    let svg = render_plot(csv_path, spec)?;
    fs::write(svg_path, svg)?;
    Ok(())
}
