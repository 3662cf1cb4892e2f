//! Self-contained SVG rendering of the `D_φ + sI` figures.

use std::f64::consts::PI;
use std::fmt::Write as _;

use berezin_core::ranges::DphiBounds;
use berezin_core::C64;

const SIZE: f64 = 640.0;
const MARGIN: f64 = 40.0;
const BLUE: &str = "#2f6fdb";
const GREEN: &str = "#1e9e3a";
const RED: &str = "#d62728";

pub struct FigureData {
    pub number: u8,
    pub shift: f64,
    pub bounds: DphiBounds,
    /// Largest sampled `|T̃(λ) − s|`.
    pub berezin_radius: f64,
    pub nrange: Vec<C64>,
    pub berezin_index: Option<f64>,
    pub classical_index: Option<f64>,
    /// Recorded verbatim in a comment.
    pub command: String,
    pub version: &'static str,
}

struct View {
    half: f64,
}

impl View {
    fn scale(&self) -> f64 {
        (SIZE - 2.0 * MARGIN) / (2.0 * self.half)
    }

    fn x(&self, re: f64) -> f64 {
        SIZE / 2.0 + re * self.scale()
    }

    fn y(&self, im: f64) -> f64 {
        SIZE / 2.0 - im * self.scale()
    }

    fn len(&self, r: f64) -> f64 {
        r * self.scale()
    }
}

fn index_label(theta: Option<f64>) -> String {
    match theta {
        Some(t) if t > 0.0 => format!("pi/{:.2}", PI / t),
        Some(_) => "0".to_string(),
        None => "not sectorial".to_string(),
    }
}

fn xml_text(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn escape(s: &str) -> String {
    xml_text(s).replace("--", "- -")
}

pub fn render(d: &FigureData) -> String {
    let b = &d.bounds;
    let s = d.shift;
    let reach = d
        .nrange
        .iter()
        .map(|z| z.norm())
        .fold(s + b.r3.max(d.berezin_radius).max(b.r1), f64::max);
    let v = View {
        half: 1.1 * reach.max(0.5),
    };
    let mut o = String::new();
    let _ = writeln!(
        o,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    // Comments cannot hold "--", so the exact command also goes into <desc>.
    let _ = writeln!(
        o,
        "<!-- {} (berezin-lab {}) -->",
        escape(&d.command),
        d.version
    );
    let _ = writeln!(o, "<desc>{}</desc>", xml_text(&d.command));
    let _ = writeln!(o, r#"<rect width="100%" height="100%" fill="white"/>"#);

    // axes
    let (x0, y0) = (v.x(0.0), v.y(0.0));
    let _ = writeln!(
        o,
        r##"<g stroke="#888" stroke-width="1"><line x1="{:.3}" y1="{y0:.3}" x2="{:.3}" y2="{y0:.3}"/><line x1="{x0:.3}" y1="{:.3}" x2="{x0:.3}" y2="{:.3}"/></g>"##,
        MARGIN / 2.0,
        SIZE - MARGIN / 2.0,
        MARGIN / 2.0,
        SIZE - MARGIN / 2.0
    );
    for k in [-1.0, 1.0] {
        let _ = writeln!(
            o,
            r##"<text x="{:.3}" y="{:.3}" font-size="11" fill="#555">{k}</text>"##,
            v.x(k) - 4.0,
            y0 + 14.0
        );
    }

    // sector rays from the vertex at the origin
    let ray = 2.0 * v.half;
    for (theta, colour, dash) in [
        (d.berezin_index, BLUE, "6 4"),
        (d.classical_index, "#000", "2 3"),
    ] {
        if let Some(t) = theta {
            for sign in [1.0, -1.0] {
                let e = C64::from_polar(ray, sign * t);
                let _ = writeln!(
                    o,
                    r#"<line x1="{x0:.3}" y1="{y0:.3}" x2="{:.3}" y2="{:.3}" stroke="{colour}" stroke-width="1.2" stroke-dasharray="{dash}"/>"#,
                    v.x(e.re),
                    v.y(e.im)
                );
            }
        }
    }

    let (cx, cy) = (v.x(s), v.y(0.0));
    let _ = writeln!(
        o,
        r#"<circle cx="{cx:.3}" cy="{cy:.3}" r="{:.3}" fill="{BLUE}" fill-opacity="0.55" stroke="none"/>"#,
        v.len(b.r1)
    );
    let _ = writeln!(
        o,
        r#"<circle cx="{cx:.3}" cy="{cy:.3}" r="{:.3}" fill="none" stroke="{BLUE}" stroke-width="1.2" stroke-dasharray="4 3"/>"#,
        v.len(d.berezin_radius)
    );
    if !d.nrange.is_empty() {
        let pts: Vec<String> = d
            .nrange
            .iter()
            .map(|z| format!("{:.3},{:.3}", v.x(z.re), v.y(z.im)))
            .collect();
        let _ = writeln!(
            o,
            r##"<polygon points="{}" fill="none" stroke="#000" stroke-width="1"/>"##,
            pts.join(" ")
        );
    }
    let _ = writeln!(
        o,
        r#"<circle cx="{cx:.3}" cy="{cy:.3}" r="{:.3}" fill="none" stroke="{GREEN}" stroke-width="2"/>"#,
        v.len(b.r2)
    );
    let _ = writeln!(
        o,
        r#"<circle cx="{cx:.3}" cy="{cy:.3}" r="{:.3}" fill="none" stroke="{RED}" stroke-width="2"/>"#,
        v.len(b.r3)
    );
    let _ = writeln!(
        o,
        r##"<circle cx="{cx:.3}" cy="{cy:.3}" r="2.5" fill="#000"/>"##
    );

    let title = if s == 0.0 {
        format!("Figure {}: D_phi, rho = {}", d.number, b.rho)
    } else {
        format!("Figure {}: D_phi + {}I, rho = {}", d.number, s, b.rho)
    };
    let mut legend = vec![
        ("#000", title),
        (
            BLUE,
            format!("Berezin range disk r1 = {:.6} (closed form)", b.r1),
        ),
        (
            BLUE,
            format!("sampled Berezin radius {:.6} (dashed)", d.berezin_radius),
        ),
        (GREEN, format!("r2 = {:.6}, inside W", b.r2)),
        (RED, format!("r3 = {:.6}, containing W", b.r3)),
        ("#000", "numerical range of the truncation".to_string()),
    ];
    if d.number > 1 {
        legend.push((
            BLUE,
            format!("Berezin sector index {}", index_label(d.berezin_index)),
        ));
        legend.push((
            "#000",
            format!("classical sector index {}", index_label(d.classical_index)),
        ));
    }
    let _ = writeln!(
        o,
        r##"<rect x="8" y="8" width="330" height="{}" fill="white" fill-opacity="0.85" stroke="#bbb"/>"##,
        16 * legend.len() + 8
    );
    for (k, (colour, text)) in legend.iter().enumerate() {
        let _ = writeln!(
            o,
            r#"<text x="16" y="{}" font-family="sans-serif" font-size="12" fill="{colour}">{}</text>"#,
            26 + 16 * k,
            xml_text(text)
        );
    }
    o.push_str("</svg>\n");
    o
}
