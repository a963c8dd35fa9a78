//! Sweep result export: a CSV table of every evaluated point and, for
//! two-dimensional spaces, an SVG scatter map in the usual convention:
//! green markers for positive robustness, orange for negative, darker for
//! larger magnitude.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use super::SweepResult;
use crate::monitor::format_robustness;

const POSITIVE_COLOR: &str = "#2ca02c";
const NEGATIVE_COLOR: &str = "#ff7f0e";
const FAILED_COLOR: &str = "#999999";

/// Writes `sweep.csv` (always) and `sweep.svg` (two-dimensional spaces)
/// into `dir`, returning the paths written.
pub fn export(result: &SweepResult, dir: &Path) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();

    let csv_path = dir.join("sweep.csv");
    write_csv(result, BufWriter::new(File::create(&csv_path)?))?;
    written.push(csv_path);

    if result.axes.len() == 2 {
        let svg_path = dir.join("sweep.svg");
        write_svg(result, BufWriter::new(File::create(&svg_path)?))?;
        written.push(svg_path);
    }
    Ok(written)
}

/// One row per point: parameter values, robustness (12 significant digits,
/// `inf`/`-inf`/`nan`), satisfied flag and refinement depth.
pub fn write_csv<W: Write>(result: &SweepResult, mut writer: W) -> io::Result<()> {
    let mut line = String::new();
    for name in &result.axes {
        let _ = write!(line, "{name},");
    }
    line.push_str("robustness,satisfied,depth");
    writeln!(writer, "{line}")?;
    for point in &result.points {
        line.clear();
        for value in &point.params {
            let _ = write!(line, "{value},");
        }
        let _ = write!(
            line,
            "{},{},{}",
            format_robustness(point.robustness),
            point.satisfied,
            point.depth
        );
        writeln!(writer, "{line}")?;
    }
    Ok(())
}

fn xml_escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Scatter map of a two-axis sweep. Marker opacity is proportional to
/// `|robustness| / max |robustness|` over the finite values; infinite
/// values are drawn fully opaque and failed points in grey.
pub fn write_svg<W: Write>(result: &SweepResult, mut writer: W) -> io::Result<()> {
    assert_eq!(result.axes.len(), 2, "SVG export needs a 2-D space");
    let (width, height) = (720.0, 560.0);
    let (left, right, top, bottom) = (80.0, 30.0, 50.0, 70.0);
    let plot_w = width - left - right;
    let plot_h = height - top - bottom;

    let min_max = |k: usize| {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for p in &result.points {
            lo = lo.min(p.params[k]);
            hi = hi.max(p.params[k]);
        }
        if lo == hi {
            (lo - 0.5, hi + 0.5)
        } else {
            (lo, hi)
        }
    };
    let (x_lo, x_hi) = min_max(0);
    let (y_lo, y_hi) = min_max(1);
    let max_abs = result
        .points
        .iter()
        .map(|p| p.robustness.abs())
        .filter(|v| v.is_finite())
        .fold(0.0_f64, f64::max);

    writeln!(
        writer,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    )?;
    writeln!(
        writer,
        r#"<rect width="{width}" height="{height}" fill="white"/>"#
    )?;
    writeln!(
        writer,
        r#"<text x="{}" y="28" font-family="sans-serif" font-size="15" text-anchor="middle">{}</text>"#,
        width / 2.0,
        xml_escape(&result.optimized_formula)
    )?;
    // axes
    writeln!(
        writer,
        r#"<line x1="{left}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        top + plot_h,
        left + plot_w,
        top + plot_h
    )?;
    writeln!(
        writer,
        r#"<line x1="{left}" y1="{top}" x2="{left}" y2="{}" stroke="black"/>"#,
        top + plot_h
    )?;
    let label = |v: f64| format!("{v:.4}");
    writeln!(
        writer,
        r#"<text x="{left}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
        top + plot_h + 18.0,
        label(x_lo)
    )?;
    writeln!(
        writer,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
        left + plot_w,
        top + plot_h + 18.0,
        label(x_hi)
    )?;
    writeln!(
        writer,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#,
        left + plot_w / 2.0,
        height - 22.0,
        xml_escape(&result.axes[0])
    )?;
    writeln!(
        writer,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
        left - 6.0,
        top + plot_h,
        label(y_lo)
    )?;
    writeln!(
        writer,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
        left - 6.0,
        top + 10.0,
        label(y_hi)
    )?;
    writeln!(
        writer,
        r#"<text x="18" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
        top + plot_h / 2.0,
        top + plot_h / 2.0,
        xml_escape(&result.axes[1])
    )?;

    for point in &result.points {
        let x = left + (point.params[0] - x_lo) / (x_hi - x_lo) * plot_w;
        let y = top + plot_h - (point.params[1] - y_lo) / (y_hi - y_lo) * plot_h;
        if point.error.is_some() || point.robustness.is_nan() {
            writeln!(
                writer,
                r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="{FAILED_COLOR}" fill-opacity="0.5"/>"#
            )?;
            continue;
        }
        let color = if point.robustness > 0.0 {
            POSITIVE_COLOR
        } else {
            NEGATIVE_COLOR
        };
        let opacity = if point.robustness.abs() == f64::INFINITY {
            1.0
        } else if max_abs > 0.0 {
            point.robustness.abs() / max_abs
        } else {
            1.0
        };
        writeln!(
            writer,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="{color}" fill-opacity="{opacity:.4}"/>"#
        )?;
    }
    writeln!(writer, "</svg>")
}
