//! Minimal SVG histogram emitter for step-count distributions.

use std::fmt::Write as _;

const WIDTH: f64 = 480.0;
const HEIGHT: f64 = 240.0;
const MARGIN: f64 = 40.0;

/// Bin counts over `[min, max]` in `bins` equal bins (the last bin is closed).
pub fn bin_counts(values: &[f64], bins: usize) -> (f64, f64, Vec<usize>) {
    let bins = bins.max(1);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut counts = vec![0; bins];
    if values.is_empty() {
        return (0.0, 0.0, counts);
    }
    let width = (hi - lo) / bins as f64;
    for &v in values {
        let k = if width > 0.0 { ((v - lo) / width) as usize } else { 0 };
        counts[k.min(bins - 1)] += 1;
    }
    (lo, hi, counts)
}

/// Histogram of `values` with a title and the value range under the axis.
pub fn histogram_svg(title: &str, values: &[f64], bins: usize) -> String {
    let (lo, hi, counts) = bin_counts(values, bins);
    let peak = counts.iter().copied().max().unwrap_or(0).max(1) as f64;
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let bar_w = plot_w / counts.len() as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="20" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    for (i, &c) in counts.iter().enumerate() {
        let h = c as f64 / peak * plot_h;
        let x = MARGIN + i as f64 * bar_w;
        let y = MARGIN + plot_h - h;
        let _ = writeln!(
            out,
            r##"<rect x="{x:.1}" y="{y:.1}" width="{:.1}" height="{h:.1}" fill="#4c72b0"><title>{c}</title></rect>"##,
            (bar_w - 1.0).max(0.5)
        );
    }
    let base = MARGIN + plot_h;
    let _ = writeln!(
        out,
        r#"<line x1="{MARGIN}" y1="{base}" x2="{}" y2="{base}" stroke="black"/>"#,
        MARGIN + plot_w
    );
    let label_y = base + 16.0;
    let _ = writeln!(
        out,
        r#"<text x="{MARGIN}" y="{label_y}" font-family="sans-serif" font-size="11">{lo}</text>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{label_y}" font-family="sans-serif" font-size="11" text-anchor="end">{hi}</text>"#,
        MARGIN + plot_w
    );
    let _ = writeln!(
        out,
        r#"<text x="{MARGIN}" y="{}" font-family="sans-serif" font-size="11">peak {}</text>"#,
        MARGIN - 6.0,
        peak as usize
    );
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
