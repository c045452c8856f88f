//! Drilled ananas: the two-cell triangulation over a lattice cusp, the peel
//! step along the Farey tree, tree walks and abelian covers.
//!
//! Lifts live in the upper half-space with the cusp at ∞ and the thorn orbit
//! at the lattice `ℤ + ℤω`; a lattice point `(m, n)` is `m + nω`, and the
//! slope `p/q` has vector `(q, p)`. Cells of the quotient are lifts glued by
//! matching faces modulo translations.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64 as C64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::farey::{det, FareyError, FareyTriangle, Slope, Turn};
use crate::hypgeom::{ShapeParameter, DEFAULT_TOL};
use crate::triangulation::{Cell, GeometricReport, IdealTriangulation, Perm4, TriangulationError, VerifyOptions};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnanasError {
    #[error("lattice modulus {0} is degenerate")]
    InvalidLattice(C64),
    #[error("slope {0} is not on the boundary triangle")]
    NotBoundarySlope(String),
    #[error("peeling {0} would backtrack")]
    ForbiddenEdge(String),
    #[error("boundary angle at {slope} is {angle}, not less than pi")]
    AngleAtLeastPi { slope: String, angle: f64 },
    #[error("produced shape {0} is not geometric")]
    NonGeometric(C64),
    #[error("cover matrix is singular")]
    SingularMatrix,
    #[error("lattice is not rectangular")]
    NotRectangular,
    #[error("node {step} failed geometric verification")]
    NotGeometric { step: usize },
    #[error("inconsistent face matching: {0}")]
    Assembly(String),
    #[error(transparent)]
    Farey(#[from] FareyError),
    #[error(transparent)]
    Triangulation(#[from] TriangulationError),
}

/// Lattice `ℤ + ℤω` with ω reduced to `−½ ≤ Re ω < ½`, `|ω| ≥ 1`, and
/// `Re ω ≤ 0` when `|ω| = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CuspLattice {
    omega: C64,
    tol: f64,
}

const EDGE_EPS: f64 = 1e-12;

fn reduce_modulus(mut w: C64) -> C64 {
    if w.im < 0.0 {
        w = -w;
    }
    for _ in 0..10_000 {
        w.re -= w.re.round();
        if w.norm_sqr() < 1.0 - EDGE_EPS {
            w = -1.0 / w;
        } else {
            break;
        }
    }
    if w.re >= 0.5 - EDGE_EPS {
        w.re -= 1.0;
    }
    if (w.norm_sqr() - 1.0).abs() <= EDGE_EPS && w.re > 0.0 {
        w = C64::new(-w.re, w.im);
    }
    w
}

impl CuspLattice {
    pub fn new(omega: C64) -> Result<Self, AnanasError> {
        CuspLattice::with_tol(omega, DEFAULT_TOL)
    }

    pub fn with_tol(omega: C64, tol: f64) -> Result<Self, AnanasError> {
        if !(omega.re.is_finite() && omega.im.is_finite()) || omega.im.abs() < 1e-12 {
            return Err(AnanasError::InvalidLattice(omega));
        }
        Ok(CuspLattice { omega: reduce_modulus(omega), tol })
    }

    pub fn omega(&self) -> C64 {
        self.omega
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn is_rectangular(&self) -> bool {
        self.omega.re.abs() < self.tol
    }

    pub fn point(&self, p: &LatticePoint) -> C64 {
        p.m.to_f64().unwrap() + self.omega * p.n.to_f64().unwrap()
    }

    /// Base triangle of the Delaunay cellulation; `diagonal` picks `1/1` or
    /// `−1/1` for rectangular lattices and is ignored otherwise.
    pub fn delaunay_triangle(&self, diagonal: Option<&Slope>) -> FareyTriangle {
        let plus = Slope::from_i64(1, 1).unwrap();
        let minus = Slope::from_i64(-1, 1).unwrap();
        let third = if self.is_rectangular() {
            match diagonal {
                Some(d) if *d == minus => minus,
                _ => plus,
            }
        } else if self.omega.re < 0.0 {
            plus
        } else {
            minus
        };
        FareyTriangle([Slope::from_i64(0, 1).unwrap(), Slope::infinity(), third])
    }

    /// Exact-sign ratio `u/v` of lattice vectors; the imaginary part uses the
    /// integer determinant so it keeps full relative precision.
    pub fn ratio(&self, u: &LatticePoint, v: &LatticePoint) -> C64 {
        let w = self.omega;
        let (u1, u2, v1, v2) = (u.m.to_f64().unwrap(), u.n.to_f64().unwrap(), v.m.to_f64().unwrap(), v.n.to_f64().unwrap());
        let norm_v = v1 * v1 + 2.0 * v1 * v2 * w.re + v2 * v2 * w.norm_sqr();
        let re = u1 * v1 + (u1 * v2 + u2 * v1) * w.re + u2 * v2 * w.norm_sqr();
        let d = (&v.m * &u.n - &u.m * &v.n).to_f64().unwrap();
        C64::new(re / norm_v, d * w.im / norm_v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint {
    pub m: BigInt,
    pub n: BigInt,
}

impl LatticePoint {
    pub fn new(m: impl Into<BigInt>, n: impl Into<BigInt>) -> Self {
        LatticePoint { m: m.into(), n: n.into() }
    }

    pub fn zero() -> Self {
        LatticePoint::new(0, 0)
    }

    pub fn of_slope(s: &Slope) -> Self {
        LatticePoint { m: s.q().clone(), n: s.p().clone() }
    }

    pub fn slope(&self) -> Slope {
        Slope::new(self.n.clone(), self.m.clone()).expect("nonzero vector")
    }

    pub fn add(&self, o: &LatticePoint) -> Self {
        LatticePoint { m: &self.m + &o.m, n: &self.n + &o.n }
    }

    pub fn sub(&self, o: &LatticePoint) -> Self {
        LatticePoint { m: &self.m - &o.m, n: &self.n - &o.n }
    }

    pub fn neg(&self) -> Self {
        LatticePoint { m: -&self.m, n: -&self.n }
    }

    fn det(&self, o: &LatticePoint) -> BigInt {
        det(&(self.m.clone(), self.n.clone()), &(o.m.clone(), o.n.clone()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LiftVertex {
    Infinity,
    Lattice(LatticePoint),
}

impl LiftVertex {
    fn translate(&self, t: &LatticePoint) -> LiftVertex {
        match self {
            LiftVertex::Infinity => LiftVertex::Infinity,
            LiftVertex::Lattice(p) => LiftVertex::Lattice(p.add(t)),
        }
    }
}

pub type LiftCell = [LiftVertex; 4];

/// Sublattice in Hermite normal form with basis `(a, 0)`, `(b, c)`, `0 ≤ b < a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sublattice {
    a: BigInt,
    b: BigInt,
    c: BigInt,
}

impl Sublattice {
    pub fn full() -> Self {
        Sublattice { a: BigInt::one(), b: BigInt::zero(), c: BigInt::one() }
    }

    /// From two basis vectors `(m, n)` of the sublattice.
    pub fn from_basis(v1: (i64, i64), v2: (i64, i64)) -> Result<Self, AnanasError> {
        let (x1, y1, x2, y2) = (BigInt::from(v1.0), BigInt::from(v1.1), BigInt::from(v2.0), BigInt::from(v2.1));
        let d = &x1 * &y2 - &x2 * &y1;
        if d.is_zero() {
            return Err(AnanasError::SingularMatrix);
        }
        let e = y1.extended_gcd(&y2);
        let g = e.gcd.clone();
        // w2 = s v1 + t v2 has second coordinate g; w1 has second coordinate 0
        let w2x = &e.x * &x1 + &e.y * &x2;
        let w1x = (&y2 * &x1 - &y1 * &x2) / &g;
        let a = w1x.abs();
        let c = g.abs();
        let w2x = if g.is_negative() { -w2x } else { w2x };
        let b = w2x.mod_floor(&a);
        Ok(Sublattice { a, b, c })
    }

    pub fn index(&self) -> BigInt {
        &self.a * &self.c
    }

    /// Canonical representative of `p` and the translation reaching it.
    pub fn reduce(&self, p: &LatticePoint) -> (LatticePoint, LatticePoint) {
        let k = p.n.div_floor(&self.c);
        let n1 = &p.n - &k * &self.c;
        let m1 = &p.m - &k * &self.b;
        let m2 = m1.mod_floor(&self.a);
        let rep = LatticePoint { m: m2, n: n1 };
        let shift = rep.sub(p);
        (rep, shift)
    }

    /// Coset representatives `(i, j)`, `0 ≤ i < a`, `0 ≤ j < c`.
    pub fn cosets(&self) -> Vec<LatticePoint> {
        let (a, c) = (self.a.to_i64().unwrap(), self.c.to_i64().unwrap());
        let mut out = Vec::new();
        for j in 0..c {
            for i in 0..a {
                out.push(self.reduce(&LatticePoint::new(i, j)).0);
            }
        }
        out
    }

    pub fn coset_index(&self, p: &LatticePoint) -> usize {
        let (rep, _) = self.reduce(p);
        (rep.n.to_i64().unwrap() * self.a.to_i64().unwrap() + rep.m.to_i64().unwrap()) as usize
    }
}

fn face_key(verts: &[LiftVertex; 3], sub: &Sublattice) -> ([LiftVertex; 3], LatticePoint) {
    let mut best: Option<([LiftVertex; 3], LatticePoint)> = None;
    for v in verts {
        let LiftVertex::Lattice(p) = v else { continue };
        let (_, shift) = sub.reduce(p);
        let mut key = verts.clone().map(|x| x.translate(&shift));
        key.sort();
        if best.as_ref().is_none_or(|(k, _)| key < *k) {
            best = Some((key, shift));
        }
    }
    best.expect("a face has a finite vertex")
}

/// Quotient triangulation of lifted cells modulo `sub`. Vertex class 0 is ∞,
/// class `1 + k` the lattice coset `k`.
pub fn assemble(cells: &[(LiftCell, ShapeParameter)], sub: &Sublattice) -> Result<IdealTriangulation, AnanasError> {
    let mut out = Vec::with_capacity(cells.len());
    for (lift, shape) in cells {
        let vertices = lift.clone().map(|v| match v {
            LiftVertex::Infinity => 0,
            LiftVertex::Lattice(p) => 1 + sub.coset_index(&p) as u32,
        });
        out.push(Cell::new(vertices, Some(*shape)));
    }
    let mut t = IdealTriangulation::new(out);
    let mut faces: BTreeMap<[LiftVertex; 3], Vec<(usize, usize, LatticePoint)>> = BTreeMap::new();
    for (i, (lift, _)) in cells.iter().enumerate() {
        for f in 0..4 {
            let s = crate::triangulation::face_slots(f);
            let verts = [lift[s[0]].clone(), lift[s[1]].clone(), lift[s[2]].clone()];
            let (key, shift) = face_key(&verts, sub);
            faces.entry(key).or_default().push((i, f, shift));
        }
    }
    for list in faces.values() {
        match list.as_slice() {
            [_] => {}
            [(a, f, sa), (b, g, sb)] => {
                let delta = sa.sub(sb);
                let (la, lb) = (&cells[*a].0, &cells[*b].0);
                let mut perm = [0u8; 4];
                for s in 0..4 {
                    perm[s] = if s == *f {
                        *g as u8
                    } else {
                        let img = la[s].translate(&delta);
                        lb.iter().position(|x| *x == img).ok_or_else(|| AnanasError::Assembly("face vertices do not match".into()))? as u8
                    };
                }
                let perm = Perm4::new(perm).ok_or_else(|| AnanasError::Assembly("not a permutation".into()))?;
                t.glue(*a, *f, *b, perm);
            }
            _ => return Err(AnanasError::Assembly(format!("face shared by {} cells", list.len()))),
        }
    }
    Ok(t)
}

fn lattice_shape(lattice: &CuspLattice, cell: &LiftCell) -> C64 {
    match cell {
        [LiftVertex::Infinity, LiftVertex::Lattice(p), LiftVertex::Lattice(q), LiftVertex::Lattice(r)] => lattice.ratio(&r.sub(p), &q.sub(p)),
        _ => unreachable!("core cells have ∞ first"),
    }
}

/// Shape of `(0, a, a+b, b)`: `1 − (a/b)²`.
fn parallelogram_shape(lattice: &CuspLattice, a: &LatticePoint, b: &LatticePoint) -> C64 {
    let t = lattice.ratio(a, b);
    C64::new(1.0 - t.re * t.re + t.im * t.im, -2.0 * t.re * t.im)
}

/// Signed vectors `u1, u2, u3 = u1 + u2` of a Farey triangle.
fn signed_vectors(t: &FareyTriangle) -> [LatticePoint; 3] {
    let u1 = LatticePoint::of_slope(&t.0[0]);
    let mut u2 = LatticePoint::of_slope(&t.0[1]);
    if u1.add(&u2).slope() != t.0[2] {
        u2 = u2.neg();
    }
    let u3 = u1.add(&u2);
    [u1, u2, u3]
}

/// Euclidean angle at `v` in the triangle `(v, a, b)`.
fn corner_angle(lattice: &CuspLattice, v: &LatticePoint, a: &LatticePoint, b: &LatticePoint) -> f64 {
    let r = lattice.ratio(&b.sub(v), &a.sub(v));
    r.im.abs().atan2(r.re)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DrilledAnanasState {
    lattice: CuspLattice,
    triangle: FareyTriangle,
    forbidden: Option<Slope>,
    peeled: Vec<ShapeParameter>,
    core_shapes: [ShapeParameter; 2],
    peeled_cells: Vec<LiftCell>,
    core_cells: [LiftCell; 2],
}

fn core_cells(t: &FareyTriangle) -> [LiftCell; 2] {
    let [u1, u2, u3] = signed_vectors(t);
    let o = LatticePoint::zero();
    let l = |p: &LatticePoint| LiftVertex::Lattice(p.clone());
    // second triangle is the point reflection of the first through u3/2
    if u1.det(&u2).is_positive() {
        [[LiftVertex::Infinity, l(&o), l(&u1), l(&u3)], [LiftVertex::Infinity, l(&u3), l(&u2), l(&o)]]
    } else {
        [[LiftVertex::Infinity, l(&o), l(&u3), l(&u1)], [LiftVertex::Infinity, l(&u3), l(&o), l(&u2)]]
    }
}

impl DrilledAnanasState {
    pub fn build(lattice: CuspLattice, triangle: FareyTriangle) -> Result<Self, AnanasError> {
        let triangle = FareyTriangle::new(triangle.0[0].clone(), triangle.0[1].clone(), triangle.0[2].clone())?;
        let cores = core_cells(&triangle);
        let mut shapes = [ShapeParameter::new(C64::new(0.0, 0.0)); 2];
        for k in 0..2 {
            let z = lattice_shape(&lattice, &cores[k]);
            if !(z.im > 0.0) {
                return Err(AnanasError::NonGeometric(z));
            }
            shapes[k] = ShapeParameter::new(z);
        }
        Ok(DrilledAnanasState { lattice, triangle, forbidden: None, peeled: vec![], core_shapes: shapes, peeled_cells: vec![], core_cells: cores })
    }

    /// Ananas over the Delaunay triangle; `diagonal` is used for rectangular lattices.
    pub fn delaunay(lattice: CuspLattice, diagonal: Option<&Slope>) -> Result<Self, AnanasError> {
        let t = lattice.delaunay_triangle(diagonal);
        DrilledAnanasState::build(lattice, t)
    }

    pub fn lattice(&self) -> &CuspLattice {
        &self.lattice
    }

    pub fn triangle(&self) -> &FareyTriangle {
        &self.triangle
    }

    pub fn forbidden(&self) -> Option<&Slope> {
        self.forbidden.as_ref()
    }

    pub fn peeled(&self) -> &[ShapeParameter] {
        &self.peeled
    }

    pub fn core_shapes(&self) -> &[ShapeParameter; 2] {
        &self.core_shapes
    }

    pub fn core_cells(&self) -> &[LiftCell; 2] {
        &self.core_cells
    }

    pub fn peeled_cells(&self) -> &[LiftCell] {
        &self.peeled_cells
    }

    /// Internal angles of ∂N at the edges of slopes `s1, s2, s3`.
    pub fn boundary_angles(&self) -> [f64; 3] {
        let [u1, u2, u3] = signed_vectors(&self.triangle);
        let _ = u2;
        let o = LatticePoint::zero();
        // triangle (0, u1, u3): s1 = [0,u1] faces u3, s2 = [u1,u3] faces 0, s3 = [0,u3] faces u1
        [
            2.0 * corner_angle(&self.lattice, &u3, &o, &u1),
            2.0 * corner_angle(&self.lattice, &o, &u1, &u3),
            2.0 * corner_angle(&self.lattice, &u1, &o, &u3),
        ]
    }

    pub fn core_volume(&self) -> f64 {
        self.core_shapes.iter().map(|s| s.volume().unwrap_or(f64::NAN)).sum()
    }

    pub fn peeled_volume(&self) -> f64 {
        self.peeled.iter().map(|s| s.volume().unwrap_or(f64::NAN)).sum()
    }

    /// Face of the first core cell lying over the boundary edge `s_k`,
    /// as `(cell index in triangulation(), face)`.
    pub fn core_face_over(&self, k: usize) -> (usize, usize) {
        let [u1, _, u3] = signed_vectors(&self.triangle);
        let opposite = LiftVertex::Lattice([u3, LatticePoint::zero(), u1][k].clone());
        let slot = self.core_cells[0].iter().position(|v| *v == opposite).expect("vertex of the core cell");
        (self.peeled.len(), slot)
    }

    pub fn peel(&self, s: &Slope) -> Result<(ShapeParameter, DrilledAnanasState), AnanasError> {
        let k = self.triangle.index_of(s).ok_or_else(|| AnanasError::NotBoundarySlope(s.to_string()))?;
        if self.forbidden.as_ref() == Some(s) {
            return Err(AnanasError::ForbiddenEdge(s.to_string()));
        }
        let angle = self.boundary_angles()[k];
        if angle >= PI - self.lattice.tol {
            return Err(AnanasError::AngleAtLeastPi { slope: s.to_string(), angle });
        }
        let [u1, u2, u3] = signed_vectors(&self.triangle);
        let (x, y) = match k {
            0 => (u3.clone(), u2.neg()),
            1 => (u3.clone(), u1.neg()),
            _ => (u1.clone(), u2.clone()),
        };
        let e = x.add(&y);
        let l = |p: &LatticePoint| LiftVertex::Lattice(p.clone());
        let o = LatticePoint::zero();
        let z = parallelogram_shape(&self.lattice, &x, &y);
        let (cell, z) = if z.im > 0.0 {
            ([l(&o), l(&x), l(&e), l(&y)], z)
        } else {
            ([l(&o), l(&x), l(&y), l(&e)], 1.0 / z)
        };
        if !(z.im > 0.0) {
            return Err(AnanasError::NonGeometric(z));
        }
        let delta = ShapeParameter::new(z);
        let new_slope = x.sub(&y).slope();
        let [s1, s2, s3] = self.triangle.0.clone();
        let next = match k {
            0 => FareyTriangle([s3, s2, new_slope.clone()]),
            1 => FareyTriangle([s1, s3, new_slope.clone()]),
            _ => FareyTriangle([s1, s2, new_slope.clone()]),
        };
        let mut state = DrilledAnanasState::build(self.lattice, next)?;
        state.forbidden = Some(new_slope);
        state.peeled = self.peeled.clone();
        state.peeled.push(delta);
        state.peeled_cells = self.peeled_cells.clone();
        state.peeled_cells.push(cell);
        Ok((delta, state))
    }

    pub fn step(&self, turn: Turn) -> Result<(ShapeParameter, DrilledAnanasState), AnanasError> {
        let k = match turn {
            Turn::L => 1,
            Turn::R => 0,
        };
        self.peel(&self.triangle.0[k].clone())
    }

    /// Lifted cells in triangulation order: peeled cells, then the two core cells.
    pub fn lift_cells(&self) -> Vec<(LiftCell, ShapeParameter)> {
        let mut v: Vec<(LiftCell, ShapeParameter)> = self.peeled_cells.iter().cloned().zip(self.peeled.iter().cloned()).collect();
        v.push((self.core_cells[0].clone(), self.core_shapes[0]));
        v.push((self.core_cells[1].clone(), self.core_shapes[1]));
        v
    }

    /// Triangulation of the original ananas `N₀` by `Δ₀ … Δ_{i−1}` and the core.
    pub fn triangulation(&self) -> Result<IdealTriangulation, AnanasError> {
        let mut t = assemble(&self.lift_cells(), &Sublattice::full())?;
        t.cusp_labels.insert(0, "cusp".into());
        t.cusp_labels.insert(1, "thorn".into());
        Ok(t)
    }

    /// Lift to the cover of `N₀` for the sublattice `sub`.
    pub fn lift_to_cover(&self, sub: &Sublattice) -> Result<CoverLift, AnanasError> {
        let base = self.lift_cells();
        let cosets = sub.cosets();
        let mut cells = Vec::with_capacity(base.len() * cosets.len());
        for t in &cosets {
            for (lift, shape) in &base {
                cells.push((lift.clone().map(|v| v.translate(t)), *shape));
            }
        }
        let mut tri = assemble(&cells, sub)?;
        tri.cusp_labels.insert(0, "cusp".into());
        for k in 0..cosets.len() {
            tri.cusp_labels.insert(1 + k as u32, format!("thorn.{k}"));
        }
        Ok(CoverLift { triangulation: tri, base_len: base.len(), cosets, sub: sub.clone() })
    }
}

/// Cover triangulation; cell `k * base_len + c` is copy `k` of base cell `c`.
#[derive(Clone, Debug)]
pub struct CoverLift {
    pub triangulation: IdealTriangulation,
    pub base_len: usize,
    pub cosets: Vec<LatticePoint>,
    pub sub: Sublattice,
}

impl CoverLift {
    /// Cell permutation induced by translation by coset `j`.
    pub fn deck_permutation(&self, j: usize) -> Vec<usize> {
        let n = self.cosets.len();
        let mut out = vec![0; n * self.base_len];
        for k in 0..n {
            let target = self.sub.coset_index(&self.cosets[k].add(&self.cosets[j]));
            for c in 0..self.base_len {
                out[k * self.base_len + c] = target * self.base_len + c;
            }
        }
        out
    }

    /// The deck translation `j` preserves every gluing.
    pub fn is_automorphism(&self, j: usize) -> bool {
        let sigma = self.deck_permutation(j);
        let t = &self.triangulation;
        t.cells.iter().enumerate().all(|(i, c)| {
            (0..4).all(|f| match (c.gluings[f], t.cells[sigma[i]].gluings[f]) {
                (None, None) => true,
                (Some(a), Some(b)) => b.cell == sigma[a.cell] && a.face == b.face && a.perm == b.perm,
                _ => false,
            }) && c.shape == t.cells[sigma[i]].shape
        })
    }
}

#[derive(Clone, Debug)]
pub struct AnanasNode {
    pub step: usize,
    pub state: DrilledAnanasState,
    pub triangulation: IdealTriangulation,
    pub report: GeometricReport,
}

/// Lazy walk along an L/R word; yields the start node, then one node per turn.
pub struct TreeWalk {
    state: Option<DrilledAnanasState>,
    turns: Vec<Turn>,
    step: usize,
    opts: VerifyOptions,
    failed: bool,
}

pub fn tree_walk(start: &DrilledAnanasState, turns: &[Turn]) -> TreeWalk {
    TreeWalk { state: Some(start.clone()), turns: turns.to_vec(), step: 0, opts: VerifyOptions::default(), failed: false }
}

impl TreeWalk {
    pub fn with_options(mut self, opts: VerifyOptions) -> Self {
        self.opts = opts;
        self
    }
}

impl Iterator for TreeWalk {
    type Item = Result<AnanasNode, AnanasError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed || self.step > self.turns.len() {
            return None;
        }
        let mut state = self.state.take()?;
        if self.step > 0 {
            match state.step(self.turns[self.step - 1]) {
                Ok((_, s)) => state = s,
                Err(e) => {
                    self.failed = true;
                    return Some(Err(e));
                }
            }
        }
        let step = self.step;
        self.step += 1;
        let node = (|| {
            let triangulation = state.triangulation()?;
            let report = triangulation.verify_geometric(&self.opts)?;
            if !report.passed {
                return Err(AnanasError::NotGeometric { step });
            }
            Ok(AnanasNode { step, state: state.clone(), triangulation, report })
        })();
        if node.is_err() {
            self.failed = true;
        }
        self.state = Some(state);
        Some(node)
    }
}

/// Rectangular ananas doubled across its base: the upper pyramid cells, their
/// mirror images through the hemisphere over the rectangle, glued along the
/// base. The diagonal edge has an octahedral star. Vertex classes: 0 cusp,
/// 1 thorn, 2 mirror apex.
pub fn doubled_rectangular(lattice: &CuspLattice, diagonal: &Slope) -> Result<IdealTriangulation, AnanasError> {
    use crate::hypgeom::IdealPoint;
    if !lattice.is_rectangular() {
        return Err(AnanasError::NotRectangular);
    }
    let w = lattice.omega();
    let pts = [IdealPoint::Infinity, IdealPoint::Finite((1.0 + w) / 2.0), IdealPoint::finite(0.0, 0.0), IdealPoint::finite(1.0, 0.0), IdealPoint::Finite(1.0 + w), IdealPoint::Finite(w)];
    let (a, b, c, d) = (2, 3, 4, 5);
    let plus = Slope::from_i64(1, 1).unwrap();
    let minus = Slope::from_i64(-1, 1).unwrap();
    let tris: [[usize; 3]; 2] = if *diagonal == plus {
        [[a, b, c], [a, c, d]]
    } else if *diagonal == minus {
        [[a, b, d], [b, c, d]]
    } else {
        return Err(AnanasError::NotBoundarySlope(diagonal.to_string()));
    };
    let mut tuples = Vec::new();
    for apex in [0, 1] {
        for tr in &tris {
            tuples.push([apex, tr[0], tr[1], tr[2]]);
        }
    }
    let mut t = IdealTriangulation::from_ideal_cells(&pts, &tuples)?;
    // upper lateral faces over the rectangle sides, glued by translation
    glue_by_vertex_map(&mut t, &[(2, 5), (3, 4)], 0)?;
    glue_by_vertex_map(&mut t, &[(2, 3), (5, 4)], 0)?;
    for c in t.cells.iter_mut() {
        for v in c.vertices.iter_mut() {
            *v = match *v {
                0 => 0,
                1 => 2,
                _ => 1,
            };
        }
    }
    t.cusp_labels.insert(0, "cusp".into());
    t.cusp_labels.insert(1, "thorn".into());
    t.cusp_labels.insert(2, "mirror".into());
    Ok(t)
}

/// Glues the face `{apex, x1, x2}` to `{apex, y1, y2}` where `pairs = [(x1, y1), (x2, y2)]`.
fn glue_by_vertex_map(t: &mut IdealTriangulation, pairs: &[(u32, u32); 2], apex: u32) -> Result<(), AnanasError> {
    let find = |t: &IdealTriangulation, verts: [u32; 3]| -> Option<(usize, usize)> {
        t.cells.iter().enumerate().find_map(|(i, c)| {
            (0..4).find(|&f| {
                let s = crate::triangulation::face_slots(f);
                let mut fv = [c.vertices[s[0]], c.vertices[s[1]], c.vertices[s[2]]];
                fv.sort_unstable();
                let mut w = verts;
                w.sort_unstable();
                fv == w
            })
            .map(|f| (i, f))
        })
    };
    let src = [apex, pairs[0].0, pairs[1].0];
    let dst = [apex, pairs[0].1, pairs[1].1];
    let (ca, fa) = find(t, src).ok_or_else(|| AnanasError::Assembly("face not found".into()))?;
    let (cb, fb) = find(t, dst).ok_or_else(|| AnanasError::Assembly("face not found".into()))?;
    let mut perm = [0u8; 4];
    for s in 0..4 {
        perm[s] = if s == fa {
            fb as u8
        } else {
            let v = t.cells[ca].vertices[s];
            let image = if v == apex { apex } else if v == pairs[0].0 { pairs[0].1 } else { pairs[1].1 };
            t.cells[cb].vertices.iter().position(|&x| x == image).unwrap() as u8
        };
    }
    t.glue(ca, fa, cb, Perm4(perm));
    Ok(())
}
