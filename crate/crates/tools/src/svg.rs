//! Deterministic SVG rendering of an [`AnalysisReport`].
//!
//! The plane is drawn with the second coordinate pointing up. Layers come in
//! a fixed order: the curve (with lightlike points marked by short segments
//! along the lightcone directions), the dashed caustic, the symmetry-set
//! branches in index order, then markers for cusps, endpoints and triple
//! points.

use std::fmt::Write;

use crate::report::{AnalysisReport, MssRecord};

/// Fixed six-decimal formatting, with negative zero folded into zero.
fn num(x: f64) -> String {
    let s = format!("{x:.6}");
    if s.trim_start_matches('-').bytes().all(|b| b == b'0' || b == b'.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn pt(p: [f64; 2]) -> String {
    format!("{},{}", num(p[0]), num(-p[1]))
}

fn path_data(points: &[[f64; 2]], closed: bool, break_at: f64) -> String {
    let mut d = String::new();
    let mut prev: Option<[f64; 2]> = None;
    for &p in points {
        let jump = prev.is_some_and(|q| (p[0] - q[0]).hypot(p[1] - q[1]) > break_at);
        let cmd = if prev.is_none() || jump { 'M' } else { 'L' };
        if !d.is_empty() {
            d.push(' ');
        }
        write!(d, "{cmd}{}", pt(p)).expect("writing to a String");
        prev = Some(p);
    }
    if closed && !d.is_empty() {
        d.push_str(" Z");
    }
    d
}

pub fn render(report: &AnalysisReport) -> String {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in &report.curve_polyline {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    if report.curve_polyline.is_empty() {
        (lo, hi) = ([-1.0, -1.0], [1.0, 1.0]);
    }
    let (w, h) = (hi[0] - lo[0], hi[1] - lo[1]);
    let (px, py) = (0.1 * w, 0.1 * h);
    let diag = w.hypot(h).max(f64::MIN_POSITIVE);
    let stroke = num(0.003 * diag);
    let tick = 0.015 * diag;
    let glyph = 0.008 * diag;

    let mut s = String::new();
    let mut line = |text: String| {
        s.push_str(&text);
        s.push('\n');
    };
    line(r#"<?xml version="1.0" encoding="UTF-8"?>"#.to_string());
    line(format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}">"#,
        num(lo[0] - px),
        num(-(hi[1] + py)),
        num(w + 2.0 * px),
        num(h + 2.0 * py)
    ));

    line(format!(r##"<g id="curve" fill="none" stroke="#000000" stroke-width="{stroke}">"##));
    line(format!(r#"<path d="{}"/>"#, path_data(&report.curve_polyline, true, f64::INFINITY)));
    for &p in &report.lightlike_points {
        for dir in [[1.0, 1.0], [1.0, -1.0]] {
            let r = tick / std::f64::consts::SQRT_2;
            let a = [p[0] - r * dir[0], p[1] - r * dir[1]];
            let b = [p[0] + r * dir[0], p[1] + r * dir[1]];
            line(format!(r#"<path class="lightlike" d="M{} L{}"/>"#, pt(a), pt(b)));
        }
    }
    line("</g>".to_string());

    line(format!(
        r##"<g id="caustic" fill="none" stroke="#7f7f7f" stroke-width="{stroke}" stroke-dasharray="{} {}">"##,
        num(0.02 * diag),
        num(0.01 * diag)
    ));
    for piece in &report.caustic_polyline {
        line(format!(r#"<path d="{}"/>"#, path_data(piece, false, f64::INFINITY)));
    }
    line("</g>".to_string());

    let branches: Vec<&Vec<MssRecord>> = report.mss_branches.iter().filter(|b| !b.is_empty()).collect();
    if !branches.is_empty() {
        line(format!(r##"<g id="mss" fill="none" stroke="#1f5fbf" stroke-width="{stroke}">"##));
        for (k, b) in report.mss_branches.iter().enumerate().filter(|(_, b)| !b.is_empty()) {
            let centers: Vec<[f64; 2]> = b.iter().map(|r| r.center).collect();
            // centres run off to infinity where the normals turn parallel
            line(format!(r#"<path class="branch" data-index="{k}" d="{}"/>"#, path_data(&centers, false, 0.5 * diag)));
        }
        line("</g>".to_string());
    }

    let markers: Vec<String> = report
        .mss_branches
        .iter()
        .flatten()
        .filter_map(|r| {
            let [x, y] = [r.center[0], -r.center[1]];
            match r.label.as_str() {
                "A2A1" => Some(format!(r#"<circle class="cusp" cx="{}" cy="{}" r="{}"/>"#, num(x), num(y), num(glyph))),
                "A3" => Some(format!(
                    r#"<rect class="endpoint" x="{}" y="{}" width="{}" height="{}"/>"#,
                    num(x - glyph),
                    num(y - glyph),
                    num(2.0 * glyph),
                    num(2.0 * glyph)
                )),
                "A1cubed" => Some(format!(
                    r#"<path class="triple" d="M{},{} L{},{} L{},{} Z"/>"#,
                    num(x),
                    num(y - glyph),
                    num(x + glyph),
                    num(y + glyph),
                    num(x - glyph),
                    num(y + glyph)
                )),
                _ => None,
            }
        })
        .collect();
    if !markers.is_empty() {
        line(r##"<g id="markers" fill="#c0392b" stroke="none">"##.to_string());
        for m in markers {
            line(m);
        }
        line("</g>".to_string());
    }
    line("</svg>".to_string());
    s
}

#[cfg(test)]
mod tests {
    use super::num;

    #[test]
    fn six_decimals_without_negative_zero() {
        assert_eq!(num(-0.0000001), "0.000000");
        assert_eq!(num(1.23456789), "1.234568");
        assert_eq!(num(-2.5), "-2.500000");
    }
}
