//! SVG overlay of a trinary image, its auxiliary points and the
//! reconstructed curve, in grid units with the y axis pointing up.

use std::fmt::Write as _;

use regurec::digitizer::{Cell, TrinaryImage};
use regurec::reconstruct::{AuxGraph, ReconstructedCurve};

pub fn render(img: &TrinaryImage, graph: Option<&AuxGraph>, curve: &ReconstructedCurve) -> String {
    let (w, h) = (img.width(), img.height());
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="-0.5 -0.5 {} {}" width="{}" height="{}">"#,
        w + 1,
        h + 1,
        (w + 1) * 16,
        (h + 1) * 16
    );
    let _ = writeln!(s, r#"<g transform="translate(0 {h}) scale(1 -1)">"#);
    let _ = writeln!(s, r##"<g id="pixels" stroke="#ccc" stroke-width="0.01">"##);
    for r in 0..h {
        for c in 0..w {
            let fill = match img.get(c, r) {
                Cell::Black => "#222",
                Cell::Grey => "#999",
                Cell::White => "#fff",
            };
            let _ = writeln!(s, r#"<rect x="{c}" y="{r}" width="1" height="1" fill="{fill}"/>"#);
        }
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r##"<g id="curve" fill="none" stroke="#1f6feb" stroke-width="0.06">"##);
    for pl in curve.polylines() {
        let mut d = String::new();
        for (i, p) in pl.vertices.iter().enumerate() {
            let _ = write!(d, "{}{} {} ", if i == 0 { "M" } else { "L" }, p.x, p.y);
        }
        d.push('Z');
        let _ = writeln!(s, r#"<path d="{d}"/>"#);
    }
    let _ = writeln!(s, "</g>");
    if let Some(g) = graph {
        let _ = writeln!(s, r##"<g id="aux" fill="#d73a49">"##);
        for p in &g.points {
            let _ = writeln!(s, r#"<circle cx="{}" cy="{}" r="0.08"/>"#, p.position.x, p.position.y);
        }
        let _ = writeln!(s, "</g>");
    }
    let _ = writeln!(s, "</g>\n</svg>");
    s
}
