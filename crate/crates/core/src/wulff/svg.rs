//! Deterministic SVG rendering of a polygon against the envelope.

use std::fmt::Write as _;

use super::{envelope, ConvexPolygon};
use crate::error::Result;
use crate::scalar::{Real, Scalar};

fn fmt(x: f64) -> String {
    // Fixed precision keeps the output stable across platforms.
    let s = format!("{x:.9}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn points(pts: impl IntoIterator<Item = [f64; 2]>) -> String {
    pts.into_iter().map(|p| format!("{},{}", fmt(p[0]), fmt(p[1]))).collect::<Vec<_>>().join(" ")
}

/// Square of half-side `1/(8 alpha)`, the envelope arcs and the polygon.
///
/// The view box is the square with a 10% margin; the `y` axis points up.
pub fn render_svg<S: Real>(
    polygon: &ConvexPolygon<S>,
    theta: S,
    alpha: S,
    beta: S,
    arc_points: usize,
) -> Result<String> {
    let arcs = envelope(theta, alpha, beta, arc_points)?;
    let h = arcs[0].half_side.to_f64();
    let pad = 1.1 * h;
    let stroke = fmt(h * 0.006);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="600" height="600">"#,
        fmt(-pad),
        fmt(-pad),
        fmt(2.0 * pad),
        fmt(2.0 * pad)
    );
    let _ = writeln!(
        out,
        r#"<!-- theta={} alpha={} beta={} -->"#,
        fmt(theta.to_f64()),
        fmt(alpha.to_f64()),
        fmt(beta.to_f64())
    );
    let _ = writeln!(out, r#"<g transform="scale(1,-1)" fill="none" stroke-width="{stroke}">"#);
    let _ =
        writeln!(out, r##"<line class="axis" x1="{}" y1="0" x2="{}" y2="0" stroke="#bbbbbb"/>"##, fmt(-pad), fmt(pad));
    let _ =
        writeln!(out, r##"<line class="axis" x1="0" y1="{}" x2="0" y2="{}" stroke="#bbbbbb"/>"##, fmt(-pad), fmt(pad));
    let _ = writeln!(
        out,
        r##"<rect class="square" x="{}" y="{}" width="{}" height="{}" stroke="#000000"/>"##,
        fmt(-h),
        fmt(-h),
        fmt(2.0 * h),
        fmt(2.0 * h)
    );
    for arc in &arcs {
        if arc.is_empty() {
            continue;
        }
        let (class, color) = if arc.restricted { ("envelope-restricted", "#d62728") } else { ("envelope", "#1f77b4") };
        let _ = writeln!(
            out,
            r#"<polyline class="{class}" stroke="{color}" points="{}"/>"#,
            points(arc.points.iter().map(|p| p.map(Scalar::to_f64)))
        );
    }
    let _ = writeln!(
        out,
        r##"<polygon class="wulff" stroke="#2ca02c" points="{}"/>"##,
        points(polygon.vertices().iter().map(|p| p.map(Scalar::to_f64)))
    );
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}
