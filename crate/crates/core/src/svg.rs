//! SVG 1.1 figures: cusp cellulations and horoball diagrams.

use std::fmt::Write as _;

use num_complex::Complex64 as C64;

use crate::ananas::{CuspLattice, LatticePoint};
use crate::canonical::{circumcircle, lattice_window, PackingScene, RestingBall};
use crate::farey::FareyTriangle;

const SIZE: f64 = 480.0;

struct Frame {
    center: C64,
    half: f64,
}

impl Frame {
    fn scale(&self) -> f64 {
        SIZE / (2.0 * self.half)
    }

    /// Screen coordinates; y grows downward.
    fn map(&self, z: C64) -> (f64, f64) {
        let s = self.scale();
        ((z.re - self.center.re + self.half) * s, (self.center.im + self.half - z.im) * s)
    }
}

fn header(out: &mut String, title: &str, width: f64, height: f64) {
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>"#);
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// The two triangles of the cellulation with edge slopes `t`, as lattice points.
pub fn triangle_cells(t: &FareyTriangle) -> [[LatticePoint; 3]; 2] {
    let [a, b, c] = t.slopes().clone().map(|s| LatticePoint::of_slope(&s));
    let o = LatticePoint::zero();
    let diff = a.sub(&b);
    if c == diff || c == diff.neg() {
        [[o, a.clone(), b.clone()], [a.clone(), a.add(&b), b]]
    } else {
        [[o.clone(), a.clone(), a.add(&b)], [o, a.add(&b), b]]
    }
}

/// Lattice points, the three edge directions of `t` through every lattice
/// point, and the circumcircles of both triangles.
pub fn cellulation_svg(lattice: &CuspLattice, t: &FareyTriangle) -> String {
    let w = lattice.omega();
    let frame = Frame { center: (1.0 + w) / 2.0, half: 1.5 * w.norm().max(1.0) };
    let s = frame.scale();
    let mut out = String::new();
    header(&mut out, &format!("cusp cellulation, omega = {}, triangle {}", crate::hypgeom::format_complex(w), t), SIZE, SIZE);
    let points = lattice_window(lattice, frame.center, 2.0 * frame.half);
    let _ = writeln!(out, r##"<g id="edges" stroke="#1f4e9c" stroke-width="1.2">"##);
    for slope in t.slopes() {
        let v = lattice.point(&LatticePoint::of_slope(slope));
        if v.norm() > 6.0 * frame.half {
            continue;
        }
        for (_, z) in &points {
            let (x1, y1) = frame.map(*z);
            let (x2, y2) = frame.map(*z + v);
            let _ = writeln!(out, r#"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}"/>"#);
        }
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r##"<g id="circumcircles" fill="none" stroke="#c0392b" stroke-dasharray="4 3">"##);
    for cell in triangle_cells(t) {
        let z = cell.map(|p| lattice.point(&p));
        let (c, r) = circumcircle(z[0], z[1], z[2]);
        let (cx, cy) = frame.map(c);
        let _ = writeln!(out, r#"<circle cx="{cx:.3}" cy="{cy:.3}" r="{:.3}"/>"#, r * s);
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r#"<g id="lattice" fill="black">"#);
    for (_, z) in &points {
        let (cx, cy) = frame.map(*z);
        let _ = writeln!(out, r#"<circle cx="{cx:.3}" cy="{cy:.3}" r="2.5"/>"#);
    }
    let _ = writeln!(out, "</g>\n</svg>");
    out
}

/// Top view (horoball footprints, resting ball, tangencies) and side view
/// (boundary plane, lattice horoballs near the slice, resting ball, plane of
/// the horoball at ∞).
pub fn horoball_svg(scene: &PackingScene, ball: &RestingBall) -> String {
    let lattice = &scene.lattice;
    let mut out = String::new();
    header(&mut out, &format!("resting ball, {} tangencies", ball.tangencies.len()), 2.0 * SIZE, SIZE);

    let top = Frame { center: ball.center, half: 2.0 * lattice.omega().norm().max(1.0) };
    let s = top.scale();
    let _ = writeln!(out, r#"<g id="top-view">"#);
    for (p, z) in lattice_window(lattice, top.center, 2.0 * top.half) {
        let (cx, cy) = top.map(z);
        let touched = ball.tangencies.contains(&p);
        let fill = if touched { "#f5b041" } else { "#d6eaf8" };
        let _ = writeln!(out, r##"<circle cx="{cx:.3}" cy="{cy:.3}" r="{:.3}" fill="{fill}" stroke="#2e4053"/>"##, 0.5 * s);
    }
    let (cx, cy) = top.map(ball.center);
    let _ = writeln!(out, r##"<circle id="resting-ball" cx="{cx:.3}" cy="{cy:.3}" r="{:.3}" fill="none" stroke="#c0392b" stroke-width="2"/>"##, ball.radius * s);
    let _ = writeln!(out, "</g>");

    // side view: horizontal axis along Re, vertical axis height
    let top_height = scene.full_height;
    let side = Frame { center: C64::new(ball.center.re, top_height / 2.0), half: 0.55 * top_height.max(2.0 * top.half) };
    let s = side.scale();
    let _ = writeln!(out, r#"<g id="side-view" transform="translate({SIZE},0)">"#);
    let (x0, y0) = side.map(C64::new(side.center.re - side.half, 0.0));
    let (x1, _) = side.map(C64::new(side.center.re + side.half, 0.0));
    let _ = writeln!(out, r#"<line id="boundary-plane" x1="{x0:.3}" y1="{y0:.3}" x2="{x1:.3}" y2="{y0:.3}" stroke="black"/>"#);
    let (_, yh) = side.map(C64::new(0.0, top_height));
    let _ = writeln!(out, r##"<line id="infinity-horoball" x1="{x0:.3}" y1="{yh:.3}" x2="{x1:.3}" y2="{yh:.3}" stroke="#2e4053" stroke-width="2"/>"##);
    for (p, z) in lattice_window(lattice, ball.center, side.half) {
        if (z.im - ball.center.im).abs() > 0.5 {
            continue;
        }
        let (cx, cy) = side.map(C64::new(z.re, 0.5));
        let fill = if ball.tangencies.contains(&p) { "#f5b041" } else { "#d6eaf8" };
        let _ = writeln!(out, r##"<circle cx="{cx:.3}" cy="{cy:.3}" r="{:.3}" fill="{fill}" fill-opacity="0.7" stroke="#2e4053"/>"##, 0.5 * s);
    }
    let (cx, cy) = side.map(C64::new(ball.center.re, ball.height));
    let _ = writeln!(out, r##"<circle cx="{cx:.3}" cy="{cy:.3}" r="{:.3}" fill="none" stroke="#c0392b" stroke-width="2"/>"##, ball.radius * s);
    let _ = writeln!(out, "</g>\n</svg>");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::farey::Slope;

    #[test]
    fn cells_cover_the_parallelogram() {
        let t = FareyTriangle::base();
        let cells = triangle_cells(&t);
        let pts: Vec<LatticePoint> = cells.iter().flatten().cloned().collect();
        assert!(pts.contains(&LatticePoint::new(1, 1)));
        let t = FareyTriangle::new(Slope::from_i64(0, 1).unwrap(), Slope::infinity(), Slope::from_i64(-1, 1).unwrap()).unwrap();
        let cells = triangle_cells(&t);
        assert_eq!(cells[0][0], LatticePoint::zero());
        assert!(cells[1].contains(&LatticePoint::new(1, 1)));
    }
}
