//! SVG rendering of planar diagrams.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::scattering::{Diagram, WallTag};

const SIZE: f64 = 600.0;
const RADIUS: f64 = 260.0;

fn colour(tag: WallTag) -> &'static str {
    match tag {
        WallTag::Initial => "#1f4e9c",
        WallTag::Added => "#b3361b",
        WallTag::Central => "#777777",
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// One line segment per ray of every wall, labelled with the wall's direction
/// and at most `label_terms` terms of its function.
pub fn render(d: &Diagram, label_terms: usize) -> Result<String> {
    if d.context.ambient_rank() != 2 {
        return Err(Error::Unsupported("SVG export draws planar diagrams only".into()));
    }
    let c = SIZE / 2.0;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}" font-family="monospace" font-size="10">"#
    );
    let _ = writeln!(out, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    for (k, w) in d.walls.iter().enumerate() {
        for r in w.support.rays2() {
            let len = ((r[0] * r[0] + r[1] * r[1]) as f64).sqrt();
            let (ux, uy) = (r[0] as f64 / len, r[1] as f64 / len);
            let (x, y) = (c + RADIUS * ux, c - RADIUS * uy);
            let _ = writeln!(
                out,
                r#"<line x1="{c:.1}" y1="{c:.1}" x2="{x:.1}" y2="{y:.1}" stroke="{}" stroke-width="1.5"><title>wall {k}</title></line>"#,
                colour(w.tag)
            );
            let terms: Vec<String> = w
                .function
                .sorted_terms()
                .into_iter()
                .filter(|(e, _)| !e.is_zero())
                .take(label_terms)
                .map(|(e, q)| format!("{q}·z^{e}"))
                .collect();
            let label = format!("{:?}: 1+{}{}", w.direction, terms.join("+"), if w.function.len() > label_terms + 1 { "+…" } else { "" });
            let (lx, ly) = (c + (RADIUS + 8.0) * ux, c - (RADIUS + 8.0) * uy);
            let anchor = if ux < -0.2 { "end" } else if ux > 0.2 { "start" } else { "middle" };
            let _ = writeln!(out, r#"<text x="{lx:.1}" y="{ly:.1}" text-anchor="{anchor}">{}</text>"#, escape(&label));
        }
    }
    let _ = writeln!(out, r##"<circle cx="{c}" cy="{c}" r="2.5" fill="#000000"/>"##);
    out.push_str("</svg>\n");
    Ok(out)
}
