//! Static SVG line charts.

use std::fmt::Write;

const PANEL_WIDTH: f64 = 720.0;
const PANEL_HEIGHT: f64 = 380.0;
const MARGIN_LEFT: f64 = 78.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 36.0;
const MARGIN_BOTTOM: f64 = 52.0;

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stroke {
    Solid,
    Dashed,
    Dotted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Line {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub stroke: Stroke,
    /// Draw a marker at each point.
    pub markers: bool,
}

impl Line {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            label: label.into(),
            points,
            stroke: Stroke::Solid,
            markers: false,
        }
    }

    pub fn stroke(mut self, stroke: Stroke) -> Self {
        self.stroke = stroke;
        self
    }

    pub fn markers(mut self) -> Self {
        self.markers = true;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_y: bool,
    pub lines: Vec<Line>,
}

impl Chart {
    pub fn new(title: impl Into<String>, x_label: impl Into<String>, y_label: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            log_y: false,
            lines: Vec::new(),
        }
    }

    pub fn log_y(mut self) -> Self {
        self.log_y = true;
        self
    }

    pub fn line(mut self, line: Line) -> Self {
        self.lines.push(line);
        self
    }
}

/// Charts stacked vertically in one SVG document.
pub fn render(charts: &[Chart]) -> String {
    let height = PANEL_HEIGHT * charts.len().max(1) as f64;
    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{PANEL_WIDTH}" height="{height}" viewBox="0 0 {PANEL_WIDTH} {height}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    for (i, chart) in charts.iter().enumerate() {
        render_panel(&mut svg, chart, i as f64 * PANEL_HEIGHT);
    }
    svg.push_str("</svg>\n");
    svg
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn value(&self, v: f64) -> f64 {
        if self.log {
            v.log10()
        } else {
            v
        }
    }

    fn fraction(&self, v: f64) -> f64 {
        (self.value(v) - self.lo) / (self.hi - self.lo)
    }
}

fn usable(chart: &Chart, p: &(f64, f64)) -> bool {
    p.0.is_finite() && p.1.is_finite() && (!chart.log_y || p.1 > 0.0)
}

fn range(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    values.fold(None, |acc, v| match acc {
        None => Some((v, v)),
        Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
    })
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        (lo, hi)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { 0.5 * lo.abs() };
        (lo - pad, hi + pad)
    }
}

/// 1, 2 or 5 times a power of ten, about `span / 5`.
fn tick_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm < 1.5 {
        1.0
    } else if norm < 3.5 {
        2.0
    } else if norm < 7.5 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn ticks(axis: &Axis) -> Vec<(f64, String)> {
    if axis.log {
        let (lo, hi) = (axis.lo.ceil() as i32, axis.hi.floor() as i32);
        let stride = ((hi - lo) / 6 + 1).max(1);
        return (lo..=hi)
            .filter(|k| (k - lo) % stride == 0)
            .map(|k| (10f64.powi(k), format!("1e{k}")))
            .collect();
    }
    let step = tick_step(axis.hi - axis.lo);
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let first = (axis.lo / step).ceil() as i64;
    let last = (axis.hi / step).floor() as i64;
    (first..=last)
        .map(|i| {
            let v = i as f64 * step;
            let label = format!("{:.*}", decimals, v);
            (v, if label == "-0" { "0".into() } else { label })
        })
        .collect()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn render_panel(svg: &mut String, chart: &Chart, top: f64) {
    let left = MARGIN_LEFT;
    let right = PANEL_WIDTH - MARGIN_RIGHT;
    let plot_top = top + MARGIN_TOP;
    let bottom = top + PANEL_HEIGHT - MARGIN_BOTTOM;

    let points = || chart.lines.iter().flat_map(|l| l.points.iter()).filter(|p| usable(chart, p));
    let (x_lo, x_hi) = padded_or_unit(range(points().map(|p| p.0)));
    let y_range = range(points().map(|p| if chart.log_y { p.1.log10() } else { p.1 }));
    let (mut y_lo, mut y_hi) = padded_or_unit(y_range);
    if chart.log_y {
        y_lo = y_lo.floor();
        y_hi = y_hi.ceil().max(y_lo + 1.0);
    }
    let xa = Axis { lo: x_lo, hi: x_hi, log: false };
    let ya = Axis { lo: y_lo, hi: y_hi, log: chart.log_y };
    let px = |x: f64| left + xa.fraction(x) * (right - left);
    let py = |y: f64| bottom - ya.fraction(y) * (bottom - plot_top);

    writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="14">{}</text>"#,
        0.5 * (left + right),
        top + 22.0,
        escape(&chart.title)
    )
    .unwrap();
    writeln!(
        svg,
        r#"<rect x="{left:.2}" y="{plot_top:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        right - left,
        bottom - plot_top
    )
    .unwrap();

    for (v, label) in ticks(&xa) {
        let x = px(v);
        writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{bottom:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{label}</text>"##,
            bottom + 5.0,
            bottom + 18.0
        )
        .unwrap();
    }
    for (v, label) in ticks(&ya) {
        let y = py(v);
        writeln!(
            svg,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{left:.2}" y2="{y:.2}" stroke="black"/><line x1="{left:.2}" y1="{y:.2}" x2="{right:.2}" y2="{y:.2}" stroke="#dddddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"##,
            left - 5.0,
            left - 8.0,
            y + 4.0
        )
        .unwrap();
    }
    writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        0.5 * (left + right),
        bottom + 40.0,
        escape(&chart.x_label)
    )
    .unwrap();
    let mid = 0.5 * (plot_top + bottom);
    writeln!(
        svg,
        r#"<text x="{:.2}" y="{mid:.2}" text-anchor="middle" transform="rotate(-90 {:.2} {mid:.2})">{}</text>"#,
        left - 58.0,
        left - 58.0,
        escape(&chart.y_label)
    )
    .unwrap();

    for (i, line) in chart.lines.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let dash = match line.stroke {
            Stroke::Solid => "",
            Stroke::Dashed => r#" stroke-dasharray="8 4""#,
            Stroke::Dotted => r#" stroke-dasharray="2 3""#,
        };
        let coords: Vec<String> = line
            .points
            .iter()
            .filter(|p| usable(chart, p))
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        if !coords.is_empty() {
            writeln!(
                svg,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#,
                coords.join(" ")
            )
            .unwrap();
        }
        if line.markers {
            for c in &coords {
                let (x, y) = c.split_once(',').expect("formatted pair");
                writeln!(svg, r#"<circle cx="{x}" cy="{y}" r="2.5" fill="{color}"/>"#).unwrap();
            }
        }
        let ly = plot_top + 16.0 + 16.0 * i as f64;
        writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="1.5"{dash}/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            right - 34.0,
            ly - 4.0,
            right - 10.0,
            ly - 4.0,
            right - 40.0,
            ly,
            escape(&line.label)
        )
        .unwrap();
    }
}

fn padded_or_unit(r: Option<(f64, f64)>) -> (f64, f64) {
    match r {
        Some((lo, hi)) => padded(lo, hi),
        None => (0.0, 1.0),
    }
}
