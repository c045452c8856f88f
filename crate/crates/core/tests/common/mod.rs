#![allow(dead_code)]

use std::f64::consts::PI;

use hyptri::ananas::CuspLattice;
use hyptri::hypgeom::{IdealPoint, ShapeParameter};
use hyptri::triangulation::{IdealTriangulation, MoveOptions, PachnerSite};
use num_bigint::BigInt;
use num_complex::Complex64 as C64;
use num_traits::Signed;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Л(θ) = ½ Σ sin(2nθ)/n², truncated.
pub fn lobachevsky_fourier(theta: f64) -> f64 {
    let n_max = 200_000;
    let mut s = 0.0;
    for n in (1..=n_max).rev() {
        let n = n as f64;
        s += (2.0 * n * theta).sin() / (n * n);
    }
    0.5 * s
}

/// Л(θ) = θ − θ log(2θ) + Σ_{n≥1} |B_{2n}| (2θ)^{2n+1} / (2n (2n+1)!), convergent for 0 < θ < π.
pub fn lobachevsky_bernoulli(theta: f64) -> f64 {
    if theta == 0.0 {
        return 0.0;
    }
    // ζ(2n) = |B_2n| (2π)^{2n} / (2 (2n)!) gives the term θ ζ(2n) (θ/π)^{2n} / (n (2n+1))
    let mut s = theta - theta * (2.0 * theta).ln();
    for n in 1..400 {
        let n2 = 2 * n;
        let zeta = zeta_even(n2);
        let term = theta * zeta * (theta / PI).powi(n2) / (n as f64 * (n2 + 1) as f64);
        s += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    s
}

/// ζ(s) by a partial sum with Euler–Maclaurin tail terms.
fn zeta_even(s: i32) -> f64 {
    let n = 2000.0f64;
    let head: f64 = (1..2000).map(|k| (k as f64).powi(-s)).sum();
    let sf = s as f64;
    head + n.powf(1.0 - sf) / (sf - 1.0) + 0.5 * n.powf(-sf) + sf * n.powf(-sf - 1.0) / 12.0
}

pub fn random_geometric_shape(rng: &mut ChaCha8Rng) -> ShapeParameter {
    loop {
        let z = C64::new(rng.gen_range(-3.0..4.0), rng.gen_range(1e-3..4.0));
        if (z - 1.0).norm() > 1e-3 && z.norm() > 1e-3 {
            return ShapeParameter::new(z);
        }
    }
}

pub fn random_point(rng: &mut ChaCha8Rng, scale: f64) -> C64 {
    C64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
}

pub fn random_omega(rng: &mut ChaCha8Rng) -> C64 {
    loop {
        let w = C64::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.6..2.5));
        if w.re.abs() > 0.02 {
            return w;
        }
    }
}

/// Orientation test by the sign of a 2×2 determinant, independent of cross-ratios.
pub fn ccw(a: C64, b: C64, c: C64) -> f64 {
    let (u, v) = (b - a, c - a);
    u.re * v.im - u.im * v.re
}

/// Random bipyramid over a triangle with apexes ∞ and a random finite point;
/// convex only when that point projects inside the triangle. Points are
/// indexed by vertex label: 0 = ∞, 1..=3 the triangle, 4 the lower apex.
pub fn random_bipyramid(rng: &mut ChaCha8Rng) -> Option<(IdealTriangulation, PachnerSite, Vec<IdealPoint>)> {
    let x = [random_point(rng, 2.0), random_point(rng, 2.0), random_point(rng, 2.0)];
    let x = if ccw(x[0], x[1], x[2]) > 0.0 { x } else { [x[0], x[2], x[1]] };
    if ccw(x[0], x[1], x[2]).abs() < 0.05 {
        return None;
    }
    let b = random_point(rng, 2.0);
    let pts = [IdealPoint::Infinity, IdealPoint::Finite(x[0]), IdealPoint::Finite(x[1]), IdealPoint::Finite(x[2]), IdealPoint::Finite(b)];
    let t = IdealTriangulation::from_ideal_cells(&pts, &[[0, 1, 2, 3], [4, 1, 3, 2]]).ok()?;
    if !t.shapes().ok()?.iter().all(|s| s.z.im > 1e-3) {
        return None;
    }
    Some((t, PachnerSite::Face { cell: 0, face: 0 }, pts.to_vec()))
}

/// Random octahedral star around the edge (∞, q): four cells (∞, q, y_k, y_{k+1})
/// with y_k in counterclockwise order around q. Points are indexed by vertex label.
pub fn random_octahedron(rng: &mut ChaCha8Rng) -> Option<(IdealTriangulation, Vec<IdealPoint>)> {
    let q = random_point(rng, 0.5);
    let mut angles: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
    angles.sort_by(f64::total_cmp);
    let ys: Vec<C64> = angles.iter().map(|&a| q + C64::from_polar(rng.gen_range(0.5..2.0), a)).collect();
    let mut pts = vec![IdealPoint::Infinity, IdealPoint::Finite(q)];
    pts.extend(ys.iter().map(|&y| IdealPoint::Finite(y)));
    let tuples: Vec<[usize; 4]> = (0..4).map(|k| [0, 1, 2 + k, 2 + (k + 1) % 4]).collect();
    for tu in &tuples {
        if ccw(q, ys[tu[2] - 2], ys[tu[3] - 2]) < 0.05 {
            return None;
        }
    }
    let t = IdealTriangulation::from_ideal_cells(&pts, &tuples).ok()?;
    Some((t, pts))
}

pub fn move_opts() -> MoveOptions {
    MoveOptions::default()
}

/// One sampled configuration: a ball D resting at bottom height `b` with
/// radius `r` above `x`, tangent to two diameter-`h` horoballs whose base
/// points are at least `w` apart, and disjoint from the unit lattice
/// horoballs and from the cusp plane at height `e^ℓ`.
pub struct TangentConfig {
    pub h: f64,
    pub r: f64,
    pub separation: f64,
}

/// Draws empty tangent-ball configurations by rejection, checking emptiness
/// against every unit horoball in a generous window.
pub fn sample_empty_config(rng: &mut ChaCha8Rng, lattice: &CuspLattice, ell: f64, w: f64) -> Option<TangentConfig> {
    let om = lattice.omega();
    let x = C64::new(rng.gen_range(0.0..1.0), 0.0) + om * rng.gen_range(0.0..1.0);
    let h = (rng.gen_range((0.05f64).ln()..0.0)).exp();
    let b = rng.gen_range(0.0..h);
    let r = rng.gen_range(0.0..0.8);
    let top = b + 2.0 * r;
    if top > ell.exp() {
        return None;
    }
    let zc = b + r;
    for n in -4..=5 {
        for m in -5..=6 {
            let p = m as f64 + om * n as f64;
            let dist = ((x - p).norm_sqr() + (zc - 0.5).powi(2)).sqrt();
            if dist < r + 0.5 {
                return None;
            }
        }
    }
    // horizontal offset of a diameter-h horoball tangent to D
    let d2 = (r + h / 2.0).powi(2) - (zc - h / 2.0).powi(2);
    if d2 <= 0.0 {
        return None;
    }
    let d = d2.sqrt();
    if 2.0 * d < w {
        return None;
    }
    let separation = rng.gen_range(w..=2.0 * d);
    Some(TangentConfig { h, r, separation })
}

/// `|p/q − φ| < 1/q²` for the golden ratio φ, decided exactly from
/// `N = (2p − q)² − 5q²`.
pub fn golden_close(p: &BigInt, q: &BigInt) -> bool {
    let a: BigInt = 2 * p - q;
    if !a.is_positive() {
        return false;
    }
    let n: BigInt = &a * &a - 5 * q * q;
    // |a − q√5| = |n| / (a + q√5) < 2/q
    let lhs: BigInt = n.abs() * q - 2 * &a;
    if !lhs.is_positive() {
        return true;
    }
    &lhs * &lhs < 20 * q * q
}
