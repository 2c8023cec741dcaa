//! SVG picture of a continuum trajectory: one polyline per agent, hollow
//! start markers and filled end markers. North is up.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::Sample;

const COLORS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"];

/// Renders the samples at `px_per_m` pixels per metre.
pub fn trajectory_svg(samples: &[Sample], px_per_m: f64) -> String {
    let mut paths: BTreeMap<usize, Vec<(f64, f64)>> = BTreeMap::new();
    for s in samples {
        paths.entry(s.agent).or_default().push((s.x, s.y));
    }
    let pts = || paths.values().flatten();
    let min_x = pts().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let max_x = pts().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let min_y = pts().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let max_y = pts().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let margin = 0.5;
    let (w, h) = if paths.is_empty() {
        (1.0, 1.0)
    } else {
        ((max_x - min_x + 2.0 * margin) * px_per_m, (max_y - min_y + 2.0 * margin) * px_per_m)
    };
    let map = |(x, y): (f64, f64)| ((x - min_x + margin) * px_per_m, (max_y - y + margin) * px_per_m);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.1} {h:.1}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let r = 0.08 * px_per_m;
    for (agent, path) in &paths {
        let color = COLORS[agent % COLORS.len()];
        let points: Vec<String> = path.iter().map(|&p| map(p)).map(|(x, y)| format!("{x:.1},{y:.1}")).collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
        let (sx, sy) = map(path[0]);
        let (ex, ey) = map(*path.last().expect("non-empty path"));
        let _ = writeln!(out, r#"<circle cx="{sx:.1}" cy="{sy:.1}" r="{r:.1}" fill="none" stroke="{color}"/>"#);
        let _ = writeln!(out, r#"<circle cx="{ex:.1}" cy="{ey:.1}" r="{r:.1}" fill="{color}"/>"#);
    }
    out.push_str("</svg>\n");
    out
}
