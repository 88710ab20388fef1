//! Self-contained SVG plots: a polyline per density, a grayscale heatmap for
//! priority traces. Output depends only on the input values.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::priority::PriorityTrace;
use crate::spectral::RadialDensity;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 6] = ["#1f4e9c", "#c2410c", "#15803d", "#7e22ce", "#b91c1c", "#0f766e"];

/// What to draw.
#[derive(Debug, Clone, Copy)]
pub enum PlotData<'a> {
    Density(&'a RadialDensity),
    Trace(&'a PriorityTrace),
    /// Several labelled densities on shared axes.
    Overlay(&'a [(&'a str, &'a RadialDensity)]),
}

pub fn render_density_svg(data: PlotData<'_>) -> Result<String> {
    match data {
        PlotData::Density(d) => render_lines(&[("", d)]),
        PlotData::Overlay(series) => render_lines(series),
        PlotData::Trace(t) => render_trace(t),
    }
}

fn header(out: &mut String) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="11">"#,
        w = WIDTH,
        h = HEIGHT
    );
}

fn axis_ticks(count: usize) -> impl Iterator<Item = usize> {
    let step = count.div_ceil(10).max(1);
    (0..count).step_by(step)
}

fn render_lines(series: &[(&str, &RadialDensity)]) -> Result<String> {
    let Some((_, first)) = series.first() else {
        return Err(Error::Validation("nothing to plot".into()));
    };
    let bands = first.len();
    if bands == 0 {
        return Err(Error::Validation("density has no bands".into()));
    }
    if series.iter().any(|(_, d)| d.len() != bands) {
        return Err(Error::Shape("overlaid densities must share a band count".into()));
    }
    let ymax = series.iter().map(|(_, d)| d.max()).fold(0.0, f64::max);
    let ymax = if ymax > 0.0 { ymax } else { 1.0 };
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let x = |band: usize| {
        if bands == 1 {
            LEFT + plot_w / 2.0
        } else {
            LEFT + plot_w * band as f64 / (bands - 1) as f64
        }
    };
    let y = |v: f64| TOP + plot_h * (1.0 - v / ymax);

    let mut out = String::new();
    header(&mut out);
    let base = TOP + plot_h;
    let _ = writeln!(
        out,
        r#"<line class="axis" x1="{LEFT:.3}" y1="{base:.3}" x2="{:.3}" y2="{base:.3}" stroke="black"/>"#,
        LEFT + plot_w
    );
    let _ = writeln!(
        out,
        r#"<line class="axis" x1="{LEFT:.3}" y1="{TOP:.3}" x2="{LEFT:.3}" y2="{base:.3}" stroke="black"/>"#
    );
    for b in axis_ticks(bands) {
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">{b}</text>"#,
            x(b),
            base + 15.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">band</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    );
    for (v, label) in [(0.0, "0".to_string()), (ymax, format_value(ymax))] {
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{:.3}" text-anchor="end">{label}</text>"#,
            LEFT - 5.0,
            y(v) + 4.0
        );
    }

    for (i, (name, d)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let points: Vec<String> = d
            .bands()
            .iter()
            .enumerate()
            .map(|(b, &v)| format!("{:.3},{:.3}", x(b), y(v)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
        if !name.is_empty() {
            let _ = writeln!(
                out,
                r#"<text x="{:.3}" y="{:.3}" fill="{color}" text-anchor="end">{}</text>"#,
                WIDTH - RIGHT,
                TOP + 12.0 * (i + 1) as f64,
                escape(name)
            );
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn render_trace(trace: &PriorityTrace) -> Result<String> {
    let rows = trace.rows();
    if rows.is_empty() || rows[0].is_empty() {
        return Err(Error::Validation("trace is empty".into()));
    }
    let bands = trace.band_count();
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let cw = plot_w / bands as f64;
    let ch = plot_h / rows.len() as f64;

    let mut out = String::new();
    header(&mut out);
    for (r, row) in rows.iter().enumerate() {
        for (b, &v) in row.iter().enumerate() {
            let gray = (255.0 * (1.0 - v.clamp(0.0, 1.0))).round() as u8;
            let _ = writeln!(
                out,
                r#"<rect class="cell" x="{:.3}" y="{:.3}" width="{cw:.3}" height="{ch:.3}" fill="rgb({gray},{gray},{gray})"/>"#,
                LEFT + cw * b as f64,
                TOP + ch * r as f64
            );
        }
    }
    let base = TOP + plot_h;
    for b in axis_ticks(bands) {
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">{b}</text>"#,
            LEFT + cw * (b as f64 + 0.5),
            base + 15.0
        );
    }
    for r in axis_ticks(rows.len()) {
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{:.3}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            TOP + ch * (r as f64 + 0.5) + 4.0,
            trace.epochs()[r]
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">band</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        out,
        r#"<text x="15" y="{:.3}" text-anchor="middle" transform="rotate(-90 15 {:.3})">epoch</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );
    out.push_str("</svg>\n");
    Ok(out)
}

fn format_value(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
