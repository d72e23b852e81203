//! Deterministic vector figures of webs: a fixed 1000×1000 frame, the
//! clipping circle, curve polylines in one stroke class per color, node
//! markers, and leaf labels.

use std::fmt::Write as _;

use num_complex::Complex64;
use webstrata::webtrace::{Color, Web};
use webstrata::NodeKind;

const SIZE: f64 = 1000.0;
const MARGIN: f64 = 60.0;

fn map(z: Complex64, radius: f64) -> (f64, f64) {
    let scale = (SIZE / 2.0 - MARGIN) / radius;
    (SIZE / 2.0 + z.re * scale, SIZE / 2.0 - z.im * scale)
}

fn stroke(color: Color) -> &'static str {
    match color {
        Color::Re => "#c0392b",
        Color::Im => "#2471a3",
    }
}

/// Render a web to a standalone SVG document.
pub fn web_to_svg(web: &Web) -> String {
    let r = web.radius;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">"
    );
    let _ = writeln!(svg, "<rect width=\"{SIZE}\" height=\"{SIZE}\" fill=\"#ffffff\"/>");
    let (cx, cy) = (SIZE / 2.0, SIZE / 2.0);
    let circle_r = SIZE / 2.0 - MARGIN;
    let _ = writeln!(
        svg,
        "<circle cx=\"{cx}\" cy=\"{cy}\" r=\"{circle_r}\" fill=\"none\" stroke=\"#888888\" stroke-width=\"1.5\"/>"
    );
    for curve in &web.curves {
        let mut points = String::new();
        for &z in &curve.points {
            let (x, y) = map(z, r);
            let _ = write!(points, "{x:.2},{y:.2} ");
        }
        let _ = writeln!(
            svg,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2.5\"/>",
            points.trim_end(),
            stroke(curve.color)
        );
    }
    for node in &web.nodes {
        let (x, y) = map(node.position, r);
        match node.kind {
            NodeKind::Root => {
                let _ = writeln!(
                    svg,
                    "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"7\" fill=\"#111111\"/>"
                );
            }
            NodeKind::Critical => {
                let _ = writeln!(
                    svg,
                    "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"7\" fill=\"#ffffff\" stroke=\"#111111\" stroke-width=\"2.5\"/>"
                );
            }
        }
    }
    for leaf in &web.leaves {
        let pos = Complex64::from_polar(r * 1.07, leaf.angle);
        let (x, y) = map(pos, r);
        let _ = writeln!(
            svg,
            "<text x=\"{x:.2}\" y=\"{y:.2}\" font-size=\"20\" font-family=\"monospace\" text-anchor=\"middle\" dominant-baseline=\"middle\" fill=\"{}\">{}</text>",
            stroke(leaf.color),
            leaf.index
        );
    }
    svg.push_str("</svg>\n");
    svg
}
