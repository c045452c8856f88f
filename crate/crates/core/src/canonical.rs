//! Horoball packings over a lattice cusp: the resting ball, the Delaunay
//! cusp cellulation and the problematic-distance bound.
//!
//! The cusp horoball is the region above height `H = full_height`; the
//! lattice horoballs have diameter 1 and sit at the points of `ℤ + ℤω`.

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::ananas::{AnanasError, CuspLattice, DrilledAnanasState, LatticePoint};
use crate::farey::{FareyTriangle, Slope};

pub const DEFAULT_TANGENCY_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CanonicalError {
    #[error("full height {height} is not above the squared covering radius {threshold}")]
    HeightTooSmall { height: f64, threshold: f64 },
    #[error("invalid scene: {0}")]
    InvalidScene(String),
    #[error(transparent)]
    Ananas(#[from] AnanasError),
}

/// Circumcenter and circumradius of a triangle in ℂ.
pub fn circumcircle(a: C64, b: C64, c: C64) -> (C64, f64) {
    let (b1, c1) = (b - a, c - a);
    let d = 2.0 * (b1.re * c1.im - b1.im * c1.re);
    let (nb, nc) = (b1.norm_sqr(), c1.norm_sqr());
    let u = C64::new((c1.im * nb - b1.im * nc) / d, (b1.re * nc - c1.re * nb) / d);
    (a + u, u.norm())
}

/// All interior angles strictly below π/2 − tol.
pub fn is_acute(t: &[C64; 3], tol: f64) -> bool {
    (0..3).all(|i| {
        let (v, a, b) = (t[i], t[(i + 1) % 3], t[(i + 2) % 3]);
        ((b - v) / (a - v)).arg().abs() < std::f64::consts::FRAC_PI_2 - tol
    })
}

/// Lattice points `m + nω` within `radius` of `center`.
pub fn lattice_window(lattice: &CuspLattice, center: C64, radius: f64) -> Vec<(LatticePoint, C64)> {
    let w = lattice.omega();
    let nmax = (radius / w.im).ceil() as i64 + 1;
    let n0 = (center.im / w.im).round() as i64;
    let mut out = Vec::new();
    for n in n0 - nmax..=n0 + nmax {
        let row = n as f64 * w;
        let m0 = (center.re - row.re).round() as i64;
        let mmax = radius.ceil() as i64 + 1;
        for m in m0 - mmax..=m0 + mmax {
            let z = m as f64 + row;
            if (z - center).norm() <= radius {
                out.push((LatticePoint::new(m, n), z));
            }
        }
    }
    out
}

fn longest_basis(lattice: &CuspLattice) -> f64 {
    lattice.omega().norm().max(1.0)
}

/// A lattice point strictly inside the circumcircle of `t`, if any.
pub fn delaunay_violation(lattice: &CuspLattice, t: &[C64; 3], tol: f64) -> Option<LatticePoint> {
    let (c, r) = circumcircle(t[0], t[1], t[2]);
    lattice_window(lattice, c, r).into_iter().find(|(_, z)| (*z - c).norm() < r - tol).map(|(p, _)| p)
}

#[derive(Clone, Debug, PartialEq)]
pub enum CuspCellulation {
    /// Two triangles related by the point reflection through the midpoint of the third side.
    Triangles { triangle: FareyTriangle, cells: [[C64; 3]; 2] },
    Rectangle { corners: [C64; 4], diagonals: [Slope; 2] },
}

impl CuspCellulation {
    pub fn cell_count(&self) -> usize {
        match self {
            CuspCellulation::Triangles { .. } => 2,
            CuspCellulation::Rectangle { .. } => 1,
        }
    }
}

pub fn cusp_cellulation(lattice: &CuspLattice) -> CuspCellulation {
    let w = lattice.omega();
    if lattice.is_rectangular() {
        return CuspCellulation::Rectangle {
            corners: [C64::new(0.0, 0.0), C64::new(1.0, 0.0), 1.0 + w, w],
            diagonals: [Slope::from_i64(1, 1).unwrap(), Slope::from_i64(-1, 1).unwrap()],
        };
    }
    let triangle = lattice.delaunay_triangle(None);
    let (o, a, b) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0), w);
    let cells = if triangle.0[2] == Slope::from_i64(1, 1).unwrap() {
        [[o, a, a + b], [a + b, b, o]]
    } else {
        [[o, a, b], [a, a + b, b]]
    };
    CuspCellulation::Triangles { triangle, cells }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PackingScene {
    pub lattice: CuspLattice,
    pub full_height: f64,
    pub tangency_tol: f64,
}

impl PackingScene {
    pub fn new(lattice: CuspLattice, full_height: f64) -> Result<Self, CanonicalError> {
        if !(full_height.is_finite() && full_height > 1.0) {
            return Err(CanonicalError::InvalidScene(format!("full height {full_height} must exceed the ball diameter 1")));
        }
        Ok(PackingScene { lattice, full_height, tangency_tol: DEFAULT_TANGENCY_TOL })
    }

    pub fn with_tangency_tol(mut self, tol: f64) -> Self {
        self.tangency_tol = tol;
        self
    }

    pub fn ball_diameter(&self) -> f64 {
        1.0
    }

    /// Shortest lattice vector length.
    pub fn w(&self) -> f64 {
        self.lattice.omega().norm().min(1.0)
    }
}

/// Deepest hole of the lattice: circumcenter and circumradius of a Delaunay triangle.
pub fn deepest_hole(lattice: &CuspLattice) -> (C64, f64) {
    let t = lattice.delaunay_triangle(None);
    let u = lattice.point(&LatticePoint::of_slope(&t.0[2]));
    circumcircle(C64::new(0.0, 0.0), C64::new(1.0, 0.0), u)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RestingBall {
    pub center: C64,
    pub height: f64,
    pub radius: f64,
    pub touches_infinity: bool,
    pub tangencies: Vec<LatticePoint>,
    /// `(point, |center − (p, ½)| − (radius + ½))` for the nearest lattice balls, ascending.
    pub residuals: Vec<(LatticePoint, f64)>,
}

impl RestingBall {
    pub fn is_rectangular(&self) -> bool {
        self.tangencies.len() == 4
    }
}

pub fn resting_ball(s: &PackingScene) -> Result<RestingBall, CanonicalError> {
    let h = s.full_height;
    let (x, cr) = deepest_hole(&s.lattice);
    let threshold = cr * cr;
    if h <= threshold {
        return Err(CanonicalError::HeightTooSmall { height: h, threshold });
    }
    let radius = (threshold / h + h - 1.0) / 2.0;
    let height = h - radius;
    let window = 3.0 * longest_basis(&s.lattice) + cr;
    let mut residuals: Vec<(LatticePoint, f64)> = lattice_window(&s.lattice, x, window)
        .into_iter()
        .map(|(p, z)| {
            let d = ((z - x).norm_sqr() + (height - 0.5).powi(2)).sqrt();
            (p, d - (radius + 0.5))
        })
        .collect();
    residuals.sort_by(|a, b| a.1.total_cmp(&b.1));
    if residuals.first().is_some_and(|r| r.1 < -s.tangency_tol) {
        return Err(CanonicalError::InvalidScene("resting ball overlaps a lattice horoball".into()));
    }
    let tangencies: Vec<LatticePoint> = residuals.iter().filter(|r| r.1.abs() < s.tangency_tol).map(|r| r.0.clone()).collect();
    residuals.truncate(6);
    Ok(RestingBall { center: x, height, radius, touches_infinity: true, tangencies, residuals })
}

#[derive(Clone, Debug)]
pub struct ExtractedAnanas {
    pub state: DrilledAnanasState,
    /// Rectangular base: the other diagonal choice.
    pub alternative: Option<DrilledAnanasState>,
}

impl ExtractedAnanas {
    pub fn diagonal_free(&self) -> bool {
        self.alternative.is_some()
    }
}

/// Ananas dual to the resting ball's vertex, read off the tangency points.
pub fn extract_ananas(s: &PackingScene) -> Result<ExtractedAnanas, CanonicalError> {
    let ball = resting_ball(s)?;
    let pts = &ball.tangencies;
    let mut edges: Vec<Slope> = Vec::new();
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            let v = b.sub(a);
            let g = num_integer::Integer::gcd(&v.m, &v.n);
            if num_traits::One::is_one(&g) {
                let s = v.slope();
                if !edges.contains(&s) {
                    edges.push(s);
                }
            }
        }
    }
    edges.sort_by(|a, b| a.to_f64().total_cmp(&b.to_f64()));
    let zero = Slope::from_i64(0, 1).unwrap();
    let inf = Slope::infinity();
    match pts.len() {
        3 => {
            let third = edges.iter().find(|e| **e != zero && **e != inf).cloned().ok_or_else(|| CanonicalError::InvalidScene("degenerate tangency triangle".into()))?;
            let t = FareyTriangle::new(zero, inf, third).map_err(AnanasError::from)?;
            Ok(ExtractedAnanas { state: DrilledAnanasState::build(s.lattice, t)?, alternative: None })
        }
        4 => {
            let plus = Slope::from_i64(1, 1).unwrap();
            let minus = Slope::from_i64(-1, 1).unwrap();
            let a = DrilledAnanasState::build(s.lattice, FareyTriangle::new(zero.clone(), inf.clone(), plus).map_err(AnanasError::from)?)?;
            let b = DrilledAnanasState::build(s.lattice, FareyTriangle::new(zero, inf, minus).map_err(AnanasError::from)?)?;
            Ok(ExtractedAnanas { state: a, alternative: Some(b) })
        }
        n => Err(CanonicalError::InvalidScene(format!("{n} tangencies"))),
    }
}

/// Covering radius of the lattice by a grid search over the fundamental
/// parallelogram followed by local refinement.
pub fn covering_radius_search(lattice: &CuspLattice) -> f64 {
    let w = lattice.omega();
    let nearest = |x: C64| -> f64 {
        let n0 = (x.im / w.im).floor() as i64;
        let mut best = f64::INFINITY;
        for n in n0 - 1..=n0 + 2 {
            let row = n as f64 * w;
            let m0 = (x.re - row.re).floor() as i64;
            for m in m0 - 1..=m0 + 2 {
                best = best.min((x - (m as f64 + row)).norm());
            }
        }
        best
    };
    let grid = 48;
    let mut best = (0.0, C64::new(0.0, 0.0));
    for i in 0..grid {
        for j in 0..grid {
            let x = (i as f64 + 0.5) / grid as f64 + w * ((j as f64 + 0.5) / grid as f64);
            let d = nearest(x);
            if d > best.0 {
                best = (d, x);
            }
        }
    }
    let (mut d, mut x) = best;
    let mut step = 1.0 / grid as f64;
    while step > 1e-13 {
        let mut moved = false;
        for k in 0..8 {
            let y = x + C64::from_polar(step, k as f64 * std::f64::consts::FRAC_PI_4);
            let e = nearest(y);
            if e > d {
                d = e;
                x = y;
                moved = true;
            }
        }
        if !moved {
            step /= 2.0;
        }
    }
    d
}

/// Largest radius of a ball with lowest point at height `b` avoiding every
/// unit lattice horoball, given covering radius `cr`.
fn max_radius(cr: f64, b: f64) -> f64 {
    (cr * cr / (1.0 - b) - b) / 2.0
}

/// Whether some ball avoiding the unit lattice horoballs is tangent to two
/// diameter-`h` horoballs whose base points are `w` apart.
fn admissible(h: f64, w: f64, cr: f64) -> bool {
    let need = w * w / 4.0;
    let g = |b: f64| {
        let r = max_radius(cr, b);
        if r < 0.0 {
            f64::NEG_INFINITY
        } else {
            (h - b) * (2.0 * r + b)
        }
    };
    let n = 200;
    let mut best = (f64::NEG_INFINITY, 0.0);
    for k in 0..=n {
        let b = h * k as f64 / n as f64;
        let v = g(b);
        if v > best.0 {
            best = (v, b);
        }
    }
    let (mut lo, mut hi) = ((best.1 - h / n as f64).max(0.0), (best.1 + h / n as f64).min(h));
    for _ in 0..100 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if g(m1) < g(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    best.0.max(g((lo + hi) / 2.0)) >= need
}

/// Critical horoball diameter for shortest vector `w`.
pub fn critical_diameter(lattice: &CuspLattice, w: f64) -> f64 {
    let cr = covering_radius_search(lattice);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    if !admissible(hi, w, cr) {
        return 1.0;
    }
    while (hi - lo) > 1e-10 * hi {
        let mid = 0.5 * (lo + hi);
        if admissible(mid, w, cr) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Distance `L` from the cusp horoball beyond which no same-orbit pair of
/// horoballs admits an empty tangent ball.
pub fn problematic_bound(ell: f64, lattice: &CuspLattice) -> f64 {
    problematic_bound_with(ell, lattice, lattice.omega().norm().min(1.0))
}

pub fn problematic_bound_with(ell: f64, lattice: &CuspLattice, w: f64) -> f64 {
    ell - critical_diameter(lattice, w).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circumcircle_of_right_triangle() {
        let (c, r) = circumcircle(C64::new(0.0, 0.0), C64::new(2.0, 0.0), C64::new(0.0, 2.0));
        assert!((c - C64::new(1.0, 1.0)).norm() < 1e-15);
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn square_rests_on_four() {
        let s = PackingScene::new(CuspLattice::new(C64::new(0.0, 1.0)).unwrap(), 8.0).unwrap();
        let b = resting_ball(&s).unwrap();
        assert_eq!(b.tangencies.len(), 4);
    }

    #[test]
    fn low_ceiling_refused() {
        let lat = CuspLattice::new(C64::new(0.0, 3.0)).unwrap();
        let s = PackingScene::new(lat, 2.0).unwrap();
        assert!(matches!(resting_ball(&s), Err(CanonicalError::HeightTooSmall { .. })));
    }

    #[test]
    fn grid_search_finds_circumradius() {
        for w in [C64::new(0.0, 1.0), C64::new(-0.5, 0.75f64.sqrt()), C64::new(0.3, 1.7)] {
            let lat = CuspLattice::new(w).unwrap();
            assert!((covering_radius_search(&lat) - deepest_hole(&lat).1).abs() < 1e-9);
        }
    }
}
