//! Minimal SVG 1.1 charts: bootstrap RMSE curves and the dominance region.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::evaluation::BootstrapCurve;
use crate::io::{create, fmt_sig};
use crate::theory::RegionGrid;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;

const PALETTE: [&str; 8] = [
    "#000000", "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#17becf", "#8c564b",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">
<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>
<text x="{:.1}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        (LEFT + WIDTH - RIGHT) / 2.0,
        escape(title)
    );
}

/// Axis frame with min/max tick labels and axis titles.
fn axes(out: &mut String, x: (f64, f64), y: (f64, f64), x_label: &str, y_label: &str) {
    let (x0, x1) = (LEFT, WIDTH - RIGHT);
    let (y0, y1) = (HEIGHT - BOTTOM, TOP);
    let _ = writeln!(
        out,
        r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>
<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>
<text x="{x0}" y="{:.1}" text-anchor="middle">{}</text>
<text x="{x1}" y="{:.1}" text-anchor="middle">{}</text>
<text x="{:.1}" y="{y0}" text-anchor="end">{}</text>
<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>
<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>
<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
        y0 + 16.0,
        fmt_sig(x.0),
        y0 + 16.0,
        fmt_sig(x.1),
        x0 - 6.0,
        fmt_sig(y.0),
        x0 - 6.0,
        y1 + 4.0,
        fmt_sig(y.1),
        (x0 + x1) / 2.0,
        HEIGHT - 14.0,
        escape(x_label),
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(y_label),
    );
}

/// Line chart of mean RMSE against crowd size, one polyline per method.
pub fn render_curve_svg(curve: &BootstrapCurve) -> String {
    let finite = curve
        .mean_rmse
        .iter()
        .flatten()
        .copied()
        .filter(|v| v.is_finite());
    let (mut y_min, mut y_max) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if !y_min.is_finite() {
        (y_min, y_max) = (0.0, 1.0);
    }
    if y_max - y_min <= f64::EPSILON * y_max.abs().max(1.0) {
        let pad = 0.05 * y_max.abs().max(1.0);
        y_min -= pad;
        y_max += pad;
    }
    let x_min = *curve.sizes.first().unwrap_or(&0) as f64;
    let mut x_max = *curve.sizes.last().unwrap_or(&1) as f64;
    if x_max <= x_min {
        x_max = x_min + 1.0;
    }

    let sx = |x: f64| LEFT + (x - x_min) / (x_max - x_min) * (WIDTH - LEFT - RIGHT);
    let sy = |y: f64| HEIGHT - BOTTOM - (y - y_min) / (y_max - y_min) * (HEIGHT - TOP - BOTTOM);

    let mut out = String::new();
    header(&mut out, &format!("Bootstrap RMSE: {}", curve.experiment));
    axes(&mut out, (x_min, x_max), (y_min, y_max), "crowd size", "mean RMSE");
    for (k, method) in curve.methods.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let points: Vec<String> = curve
            .sizes
            .iter()
            .zip(&curve.mean_rmse[k])
            .filter(|(_, v)| v.is_finite())
            .map(|(&s, &v)| format!("{:.2},{:.2}", sx(s as f64), sy(v)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            points.join(" ")
        );
        let ly = TOP + 18.0 * k as f64;
        let lx = WIDTH - RIGHT + 14.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx}" y1="{ly}" x2="{:.1}" y2="{ly}" stroke="{color}" stroke-width="2"/>
<text x="{:.1}" y="{:.1}">{}</text>"#,
            lx + 22.0,
            lx + 28.0,
            ly + 4.0,
            escape(&method.to_string())
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Filled grid over `(p, w)`; shaded cells are where the neutral pivot is
/// expected to beat the minimal pivot.
pub fn render_region_svg(grid: &RegionGrid) -> String {
    let n = grid.resolution as f64;
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let (cw, ch) = (plot_w / n, plot_h / n);
    let mut out = String::new();
    header(
        &mut out,
        &format!("pw <= 2/3 ({:.1}% of grid)", 100.0 * grid.fraction_inside()),
    );
    for pt in &grid.points {
        let i = (pt.p * (n - 1.0)).round();
        let k = (pt.w * (n - 1.0)).round();
        let fill = if pt.inside { "#4a7fc1" } else { "#eeeeee" };
        let _ = writeln!(
            out,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}"/>"#,
            LEFT + i * cw,
            TOP + (n - 1.0 - k) * ch,
            cw,
            ch
        );
    }
    axes(&mut out, (0.0, 1.0), (0.0, 1.0), "p (maven share)", "w (private weight)");
    let lx = WIDTH - RIGHT + 14.0;
    let _ = writeln!(
        out,
        r##"<rect x="{lx}" y="{TOP}" width="14" height="14" fill="#4a7fc1"/>
<text x="{:.1}" y="{:.1}">NP beats MP</text>
<rect x="{lx}" y="{:.1}" width="14" height="14" fill="#eeeeee" stroke="#999999"/>
<text x="{:.1}" y="{:.1}">MP beats NP</text>"##,
        lx + 20.0,
        TOP + 11.0,
        TOP + 22.0,
        lx + 20.0,
        TOP + 33.0
    );
    out.push_str("</svg>\n");
    out
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(text.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn write_curve_svg(path: impl AsRef<Path>, curve: &BootstrapCurve) -> Result<()> {
    write_text(path.as_ref(), &render_curve_svg(curve))
}

pub fn write_region_svg(path: impl AsRef<Path>, grid: &RegionGrid) -> Result<()> {
    write_text(path.as_ref(), &render_region_svg(grid))
}
