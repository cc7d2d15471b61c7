//! SVG figures of windowed balls and cone covers.
//!
//! Every document carries its canvas mapping in a header comment: the
//! lattice point `(a, b)` is drawn at
//!
//! ```text
//! x = (a + maxA) * scale + MARGIN
//! y = (maxB - b) * scale + MARGIN
//! ```
//!
//! so `b` grows upwards and the origin sits at the bottom centre. Ball
//! members are `<circle class="member">`, cones are `<path class="cone">`
//! sectors from the origin, the lines `X+-` and `Y` are `<line class="line">`
//! and a safe cone is a pair of dashed `<line class="safe">` rays.

use std::fmt::Write;

use farey_core::cone::CoverReport;
use farey_core::{BallReport, ConeSector, Rational, Window};

pub const DEFAULT_SCALE: u32 = 8;
pub const MARGIN: f64 = 16.0;

const PALETTE: [&str; 8] = [
    "#000000", "#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2",
];

/// Fill colour for members at distance `d`.
pub fn color(d: u32) -> &'static str {
    PALETTE[(d as usize).min(PALETTE.len() - 1)]
}

struct Canvas {
    max_a: f64,
    max_b: f64,
    scale: f64,
}

impl Canvas {
    fn new(window: Window, scale: u32) -> Canvas {
        Canvas {
            max_a: window.max_a() as f64,
            max_b: window.max_b() as f64,
            scale: scale.max(1) as f64,
        }
    }

    fn x(&self, a: f64) -> f64 {
        (a + self.max_a) * self.scale + MARGIN
    }

    fn y(&self, b: f64) -> f64 {
        (self.max_b - b) * self.scale + MARGIN
    }

    fn width(&self) -> f64 {
        2.0 * self.max_a * self.scale + 2.0 * MARGIN
    }

    fn height(&self) -> f64 {
        self.max_b * self.scale + 2.0 * MARGIN
    }

    /// End of the ray from the origin in direction `v` on the given side,
    /// clipped to the window box.
    fn ray_end(&self, v: Rational, positive: bool) -> (f64, f64) {
        let v = v.numer() as f64 / v.denom() as f64;
        let (dx, dy): (f64, f64) = if positive { (1.0, v) } else { (-1.0, -v) };
        let t = if dy == 0.0 {
            self.max_a
        } else {
            self.max_a.min(self.max_b / dy.abs())
        };
        (self.x(dx * t), self.y(dy * t))
    }
}

fn open(out: &mut String, c: &Canvas, title: &str) {
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        "<!-- {title}. Canvas mapping: lattice (a, b) -> x = (a + {}) * {} + {}, y = ({} - b) * {} + {} -->",
        c.max_a, c.scale, MARGIN, c.max_b, c.scale, MARGIN
    );
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = c.width(),
        h = c.height()
    );
    let _ = writeln!(
        out,
        r#"<rect class="background" x="0" y="0" width="{}" height="{}" fill="white"/>"#,
        c.width(),
        c.height()
    );
}

fn lines(out: &mut String, c: &Canvas) {
    let style = r##"stroke="#888888" stroke-width="1""##;
    for (id, a) in [("X+", 1.0), ("X-", -1.0)] {
        let _ = writeln!(
            out,
            r#"<line class="line" id="{id}" x1="{x}" y1="{y0}" x2="{x}" y2="{y1}" {style}/>"#,
            x = c.x(a),
            y0 = c.y(0.0),
            y1 = c.y(c.max_b),
        );
    }
    let _ = writeln!(
        out,
        r#"<line class="line" id="Y" x1="{x0}" y1="{y}" x2="{x1}" y2="{y}" {style}/>"#,
        x0 = c.x(-c.max_a),
        x1 = c.x(c.max_a),
        y = c.y(1.0),
    );
}

fn members(out: &mut String, c: &Canvas, ball: &BallReport) {
    let r = (c.scale / 3.0).max(1.0);
    for m in &ball.members {
        let _ = writeln!(
            out,
            r#"<circle class="member" data-slope="{}" data-distance="{}" cx="{}" cy="{}" r="{r}" fill="{}"/>"#,
            m.slope,
            m.distance,
            c.x(m.slope.a() as f64),
            c.y(m.slope.b() as f64),
            color(m.distance)
        );
    }
}

fn sector(out: &mut String, c: &Canvas, s: &ConeSector) {
    let positive = s.lo() >= Rational::zero();
    let (x1, y1) = c.ray_end(s.lo(), positive);
    let (x2, y2) = c.ray_end(s.hi(), positive);
    let _ = writeln!(
        out,
        r##"<path class="cone" data-lo="{}" data-hi="{}" d="M {} {} L {x1} {y1} L {x2} {y2} Z" fill="#1f77b4" fill-opacity="0.2" stroke="none"/>"##,
        s.lo(),
        s.hi(),
        c.x(0.0),
        c.y(0.0),
    );
}

fn safe_rays(out: &mut String, c: &Canvas, s: &ConeSector) {
    for v in [s.lo(), s.hi()] {
        let (x, y) = c.ray_end(v, true);
        let _ = writeln!(
            out,
            r##"<line class="safe" data-direction="{v}" x1="{}" y1="{}" x2="{x}" y2="{y}" stroke="#2ca02c" stroke-width="1.5" stroke-dasharray="6 4"/>"##,
            c.x(0.0),
            c.y(0.0),
        );
    }
}

/// Ball members over the exceptional lines.
pub fn render_ball(ball: &BallReport, scale: u32) -> String {
    let c = Canvas::new(ball.window, scale);
    let mut out = String::new();
    open(
        &mut out,
        &c,
        &format!("Ball of radius {} around {}", ball.radius, ball.center),
    );
    lines(&mut out, &c);
    members(&mut out, &c, ball);
    out.push_str("</svg>\n");
    out
}

/// Cones of a cover and its safe cone, with the members of the covered ball.
pub fn render_cover(cover: &CoverReport, ball: &BallReport, scale: u32) -> String {
    let c = Canvas::new(cover.window, scale);
    let mut out = String::new();
    open(
        &mut out,
        &c,
        &format!("Cone cover of the ball of radius {} around 1/0", cover.n),
    );
    for cone in &cover.cones {
        sector(&mut out, &c, &cone.sector);
    }
    lines(&mut out, &c);
    if let Some(safe) = &cover.safe_cone {
        safe_rays(&mut out, &c, safe);
    }
    members(&mut out, &c, ball);
    out.push_str("</svg>\n");
    out
}
