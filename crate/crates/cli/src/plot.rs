//! Minimal SVG line charts with error bars, one file per metric.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use sunlab_core::analysis::{PlotSeries, ReportBundle};

use crate::error::CliError;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd"];

pub fn write_plots(bundle: &ReportBundle, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut by_metric: BTreeMap<&str, Vec<&PlotSeries>> = BTreeMap::new();
    for s in &bundle.series {
        by_metric.entry(s.metric.as_str()).or_default().push(s);
    }
    if by_metric.is_empty() {
        return Ok(Vec::new());
    }
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut written = Vec::new();
    for (metric, series) in by_metric {
        let path = dir.join(format!("{metric}.svg"));
        fs::write(&path, render(metric, &series)).map_err(|e| CliError::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

/// "Nice" tick step covering `span` in about five intervals.
fn tick_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0].into_iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag)
}

pub fn render(metric: &str, series: &[&PlotSeries]) -> String {
    let points = series.iter().flat_map(|s| s.x.iter().zip(&s.y).zip(&s.err));
    let (mut x_max, mut y_min, mut y_max) = (0f64, 0f64, 0f64);
    for ((&x, &y), err) in points {
        let e = err.unwrap_or(0.0);
        x_max = x_max.max(x);
        y_min = y_min.min(y - e);
        y_max = y_max.max(y + e);
    }
    let x_max = (x_max * 1.1).max(1.0);
    if y_max <= y_min {
        y_max = y_min + 1.0;
    }
    let y_step = tick_step(y_max - y_min);
    let (y_lo, y_hi) = ((y_min / y_step).floor() * y_step, (y_max / y_step).ceil() * y_step);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + x / x_max * plot_w;
    let sy = |y: f64| TOP + (y_hi - y) / (y_hi - y_lo) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{metric}</text>"#, LEFT + plot_w / 2.0);
    let _ = writeln!(
        svg,
        r#"<path d="M{LEFT},{TOP} V{} H{}" fill="none" stroke="black"/>"#,
        TOP + plot_h,
        LEFT + plot_w
    );
    let mut y = y_lo;
    while y <= y_hi + y_step * 1e-9 {
        let py = sy(y);
        let _ = writeln!(svg, r##"<line x1="{}" x2="{}" y1="{py:.2}" y2="{py:.2}" stroke="#ddd"/>"##, LEFT, LEFT + plot_w);
        let _ = writeln!(svg, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, LEFT - 6.0, py + 4.0, format_tick(y));
        y += y_step;
    }
    let x_step = tick_step(x_max);
    let mut x = 0.0;
    while x <= x_max {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
            sx(x),
            TOP + plot_h + 18.0,
            format_tick(x)
        );
        x += x_step;
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">distance (deg)</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    );
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let path: Vec<String> = s.x.iter().zip(&s.y).map(|(&x, &y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(svg, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#, path.join(" "));
        for ((&x, &y), err) in s.x.iter().zip(&s.y).zip(&s.err) {
            if let Some(e) = err {
                let _ = writeln!(
                    svg,
                    r#"<line x1="{0:.2}" x2="{0:.2}" y1="{1:.2}" y2="{2:.2}" stroke="{color}"/>"#,
                    sx(x),
                    sy(y - e),
                    sy(y + e)
                );
            }
            let _ = writeln!(svg, r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="{color}"/>"#, sx(x), sy(y));
        }
        let ly = TOP + 10.0 + 20.0 * i as f64;
        let lx = LEFT + plot_w + 15.0;
        let _ = writeln!(svg, r#"<line x1="{lx}" x2="{}" y1="{ly}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, lx + 20.0);
        let _ = writeln!(svg, r#"<text x="{}" y="{}">{}</text>"#, lx + 26.0, ly + 4.0, s.condition);
    }
    svg.push_str("</svg>\n");
    svg
}

fn format_tick(v: f64) -> String {
    let s = format!("{v:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}
