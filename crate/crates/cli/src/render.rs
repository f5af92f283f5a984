//! Static SVG output. Interval unions become horizontal bars, one row per
//! depth; witness balls become annotated segments (d = 1) or circles (d ≥ 2,
//! projected to the first two coordinates).

use std::fmt::Write as _;

use anyhow::Result;

use hyperfrac_core::coded_family::{Code, CodedSystem};
use hyperfrac_core::formats::AnySet;
use hyperfrac_core::hutchinson::hutchinson_apply;
use hyperfrac_core::hyperspace::{CompactSet1D, CompactSetD};
use hyperfrac_core::maps::Ifs;
use hyperfrac_core::scalar::Scalar;
use hyperfrac_core::theorems::Certificate;

const WIDTH: f64 = 800.0;
const MARGIN: f64 = 60.0;
const ROW: f64 = 28.0;
const BAR: f64 = 14.0;

fn x_px(x: &Scalar) -> f64 {
    MARGIN + (WIDTH - 2.0 * MARGIN) * x.to_f64()
}

fn len_px(len: &Scalar) -> f64 {
    // sub-pixel intervals stay visible
    ((WIDTH - 2.0 * MARGIN) * len.to_f64()).max(0.5)
}

struct Svg {
    body: String,
    height: f64,
}

impl Svg {
    fn new() -> Self {
        Svg { body: String::new(), height: 20.0 }
    }

    fn label(&mut self, y: f64, text: &str) {
        let _ = writeln!(self.body, r#"<text x="4" y="{:.1}" font-size="11">{}</text>"#, y + BAR - 3.0, escape(text));
    }

    /// One row of bars and ticks; returns the row's top coordinate.
    fn set_row(&mut self, set: &CompactSet1D, class: &str, label: &str) -> f64 {
        let y = self.height;
        self.label(y, label);
        match set {
            CompactSet1D::Points(p) => {
                for x in p {
                    let _ = writeln!(
                        self.body,
                        r#"<line class="tick {class}" x1="{0:.3}" x2="{0:.3}" y1="{1:.1}" y2="{2:.1}" stroke="black"/>"#,
                        x_px(x),
                        y,
                        y + BAR
                    );
                }
            }
            CompactSet1D::Intervals(v) => {
                for iv in v {
                    let _ = writeln!(
                        self.body,
                        r#"<rect class="bar {class}" x="{:.3}" y="{:.1}" width="{:.3}" height="{BAR}" fill="steelblue"/>"#,
                        x_px(&iv.lo),
                        y,
                        len_px(&iv.length())
                    );
                }
            }
        }
        self.height += ROW;
        y
    }

    fn axis(&mut self) {
        let y = self.height;
        let _ = writeln!(
            self.body,
            r#"<line class="axis" x1="{MARGIN}" x2="{:.1}" y1="{y:.1}" y2="{y:.1}" stroke="gray"/>"#,
            WIDTH - MARGIN
        );
        for (x, t) in [(0.0, "0"), (0.5, "1/2"), (1.0, "1")] {
            let px = MARGIN + (WIDTH - 2.0 * MARGIN) * x;
            let _ = writeln!(self.body, r#"<text x="{px:.1}" y="{:.1}" font-size="10" text-anchor="middle">{t}</text>"#, y + 12.0);
        }
        self.height += ROW;
    }

    fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{:.0}\" viewBox=\"0 0 {WIDTH} {:.0}\">\n{}</svg>\n",
            self.height + 10.0,
            self.height + 10.0,
            self.body
        )
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Rows for depths `0..=depth`, bars classed `level-<n>`.
pub fn render_code(code: &Code, depth: usize) -> Result<String> {
    let sys = CodedSystem::build(code, depth)?;
    let mut svg = Svg::new();
    for n in 0..=depth {
        svg.set_row(&sys.expand(n)?, &format!("level-{n}"), &format!("depth {n}"));
    }
    svg.axis();
    Ok(svg.finish())
}

/// Hutchinson iterates of `[0,1]` (or of `{0, 1/2, 1}` for nonlinear maps).
pub fn render_ifs(ifs: &Ifs, depth: usize) -> Result<String> {
    let mut a = if ifs.maps().iter().all(|m| m.is_affine_like()) {
        CompactSet1D::unit_interval()
    } else {
        CompactSet1D::points(vec![Scalar::zero(), Scalar::one().half(), Scalar::one()])?
    };
    let mut svg = Svg::new();
    svg.set_row(&a, "level-0", "S^0");
    for n in 1..=depth {
        a = hutchinson_apply(ifs, &a)?;
        svg.set_row(&a, &format!("level-{n}"), &format!("S^{n}"));
    }
    svg.axis();
    Ok(svg.finish())
}

pub fn render_set(set: &AnySet) -> Result<String> {
    match set {
        AnySet::Line(s) => {
            let mut svg = Svg::new();
            svg.set_row(s, "level-0", "set");
            svg.axis();
            Ok(svg.finish())
        }
        AnySet::Space(s) => Ok(render_plane(s, &[])),
    }
}

/// Points of `s` in the unit square, with optional circles `(centre, r, label)`.
fn render_plane(s: &CompactSetD, balls: &[(Vec<Scalar>, Scalar, String)]) -> String {
    let side = WIDTH - 2.0 * MARGIN;
    let coord = |p: &[Scalar]| {
        let x = p[0].to_f64();
        let y = p.get(1).map_or(0.5, Scalar::to_f64);
        (MARGIN + side * x, MARGIN + side * (1.0 - y))
    };
    let mut body = String::new();
    let _ = writeln!(body, r#"<rect class="frame" x="{MARGIN}" y="{MARGIN}" width="{side}" height="{side}" fill="none" stroke="gray"/>"#);
    for p in s.points() {
        let (x, y) = coord(p);
        let _ = writeln!(body, r#"<circle class="point" cx="{x:.3}" cy="{y:.3}" r="2" fill="black"/>"#);
    }
    for (c, r, label) in balls {
        let (x, y) = coord(c);
        let _ = writeln!(
            body,
            r#"<circle class="ball" cx="{x:.3}" cy="{y:.3}" r="{:.3}" fill="none" stroke="crimson"/>"#,
            (side * r.to_f64()).max(0.5)
        );
        if !label.is_empty() {
            let _ = writeln!(body, r#"<text x="{x:.1}" y="{:.1}" font-size="9">{}</text>"#, y - 4.0, escape(label));
        }
    }
    let h = WIDTH;
    format!("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{h}\" viewBox=\"0 0 {WIDTH} {h}\">\n{body}</svg>\n")
}

pub fn render_certificate(cert: &Certificate) -> Result<String> {
    match cert {
        Certificate::Thm41(c) => {
            let mut svg = Svg::new();
            svg.set_row(&c.y, "y", "Y");
            if let Some(w) = &c.witness {
                let level = w.j + 2;
                svg.set_row(&CompactSet1D::Intervals(w.dilation.clone()), "dilation", "Y~0.99d");
                let e = CodedSystem::build(&c.e_code, level)?;
                let h = CodedSystem::build(&c.h_code, c.depth)?;
                svg.set_row(&e.expand(level)?, &format!("e level-{level}"), &format!("E_{level}"));
                svg.set_row(&h.expand(level)?, &format!("h level-{level}"), &format!("H_{level}"));
                svg.set_row(&h.expand(c.depth)?, &format!("h level-{}", c.depth), &format!("H_{}", c.depth));
            } else {
                let e = CodedSystem::build(&c.e_code, c.depth)?;
                svg.set_row(&e.expand(c.depth)?, "e", "E=H");
            }
            svg.axis();
            Ok(svg.finish())
        }
        Certificate::Prop32(c) => {
            let mut svg = Svg::new();
            svg.set_row(&c.construction.truncated_set(), "x", "X");
            let annuli = CompactSet1D::points(c.construction.t.clone())?;
            svg.set_row(&annuli, "annulus", "t_n");
            for (n, t) in c.construction.t.iter().enumerate() {
                let interval = CompactSet1D::intervals(vec![hyperfrac_core::Interval::new(Scalar::zero(), t.clone())?])?;
                svg.set_row(&interval, &format!("level-{}", n + 1), &format!("I_{}", n + 1));
            }
            svg.axis();
            Ok(svg.finish())
        }
        Certificate::Prop33(c) => {
            let w = &c.witness;
            if w.base.dim() >= 2 {
                let mut balls = Vec::new();
                for (n, s) in w.steps.iter().enumerate() {
                    let label = format!("r_{} = {}", n + 1, s.radius);
                    balls.push((s.y.clone(), s.radius.clone(), label));
                    balls.push((s.z.clone(), s.radius.clone(), String::new()));
                    for p in w.base.points().iter().filter(|p| **p != w.removed) {
                        balls.push((p.clone(), s.radius.clone(), String::new()));
                    }
                }
                return Ok(render_plane(&w.base, &balls));
            }
            let mut svg = Svg::new();
            let base = CompactSet1D::points(w.base.points().iter().map(|p| p[0].clone()).collect())?;
            svg.set_row(&base, "base", "F");
            for (n, s) in w.steps.iter().enumerate() {
                let g = w.g_set(n);
                let mut segs = Vec::new();
                for p in g.points() {
                    let lo = Scalar::max_of(&(&p[0] - &s.radius), &Scalar::zero());
                    let hi = Scalar::min_of(&(&p[0] + &s.radius), &Scalar::one());
                    segs.push(hyperfrac_core::Interval::new(lo, hi)?);
                }
                let row = CompactSet1D::Intervals(segs);
                let y = svg.set_row(&row, &format!("ball level-{}", n + 1), &format!("G_{}", n + 1));
                let _ = writeln!(
                    svg.body,
                    r#"<text x="{:.1}" y="{:.1}" font-size="9">r = {}</text>"#,
                    WIDTH - MARGIN + 4.0,
                    y + BAR - 3.0,
                    s.radius
                );
            }
            svg.axis();
            Ok(svg.finish())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_code_depth_three_has_eight_bars() {
        let svg = render_code(&Code::zero(3), 3).unwrap();
        assert_eq!(svg.matches(r#"class="bar level-3""#).count(), 8);
        assert_eq!(svg.matches(r#"class="bar level-0""#).count(), 1);
        assert!(svg.starts_with("<svg"));
    }
}
