//! Upper half-space primitives: ideal points, horoballs, shapes, angles, volumes.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

/// Default tolerance for unimodularity and geometric predicates.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("degenerate input: points {0} and {1} coincide")]
    DegenerateInput(usize, usize),
    #[error("shape {0} is not geometric (Im z <= 0)")]
    NonGeometric(C64),
    #[error("horoballs overlap (signed length {0})")]
    OverlappingHoroballs(f64),
    #[error("matrix is not unimodular (det = {0})")]
    NonUnimodular(C64),
    #[error("invalid horoball size {0}")]
    InvalidSize(f64),
    #[error("non-finite coordinate")]
    NonFinite,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum IdealPoint {
    Finite(C64),
    Infinity,
}

impl IdealPoint {
    pub fn finite(re: f64, im: f64) -> Self {
        IdealPoint::Finite(C64::new(re, im))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, IdealPoint::Infinity)
    }

    pub fn as_finite(&self) -> Option<C64> {
        match self {
            IdealPoint::Finite(z) => Some(*z),
            IdealPoint::Infinity => None,
        }
    }

    /// Rejects NaN and infinite coordinates.
    pub fn checked(self) -> Result<Self, GeomError> {
        match self {
            IdealPoint::Finite(z) if !(z.re.is_finite() && z.im.is_finite()) => Err(GeomError::NonFinite),
            p => Ok(p),
        }
    }

    fn close_to(&self, other: &IdealPoint, tol: f64) -> bool {
        match (self, other) {
            (IdealPoint::Infinity, IdealPoint::Infinity) => true,
            (IdealPoint::Finite(a), IdealPoint::Finite(b)) => (a - b).norm() <= tol,
            _ => false,
        }
    }
}

impl From<C64> for IdealPoint {
    fn from(z: C64) -> Self {
        IdealPoint::Finite(z)
    }
}

impl fmt::Display for IdealPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IdealPoint::Infinity => write!(f, "inf"),
            IdealPoint::Finite(z) => write!(f, "{}", format_complex(*z)),
        }
    }
}

/// Formats as `a+bi`, round-trip safe.
pub fn format_complex(z: C64) -> String {
    if z.im < 0.0 || (z.im == 0.0 && z.im.is_sign_negative()) {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Parses `a+bi`, `a-bi`, `bi`, `a` or `i`.
pub fn parse_complex(s: &str) -> Option<C64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return None;
    }
    if let Some(body) = t.strip_suffix('i') {
        // find the split between real and imaginary part
        let bytes = body.as_bytes();
        let mut split = None;
        for k in (1..bytes.len()).rev() {
            let c = bytes[k] as char;
            if (c == '+' || c == '-') && !matches!(bytes[k - 1] as char, 'e' | 'E') {
                split = Some(k);
                break;
            }
        }
        let (re, im) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => 1.0,
            "-" => -1.0,
            x => x.parse::<f64>().ok()?,
        };
        let re = re.parse::<f64>().ok()?;
        Some(C64::new(re, im))
    } else {
        t.parse::<f64>().ok().map(|re| C64::new(re, 0.0))
    }
}

/// A horoball; `size` is the Euclidean diameter for finite bases and the
/// height of the bounding plane for the base at infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Horoball {
    pub base: IdealPoint,
    pub size: f64,
}

impl Horoball {
    pub fn new(base: IdealPoint, size: f64) -> Result<Self, GeomError> {
        if !(size > 0.0) || !size.is_finite() {
            return Err(GeomError::InvalidSize(size));
        }
        Ok(Horoball { base: base.checked()?, size })
    }
}

/// Shape of an ideal tetrahedron: the cross ratio of its vertices in slot order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShapeParameter {
    pub z: C64,
}

impl ShapeParameter {
    pub fn new(z: C64) -> Self {
        ShapeParameter { z }
    }

    pub fn is_geometric(&self) -> bool {
        self.z.im > 0.0
    }

    /// Shape seen from edge 02 (and 13).
    pub fn second(&self) -> C64 {
        C64::new(1.0, 0.0) / (C64::new(1.0, 0.0) - self.z)
    }

    /// Shape seen from edge 03 (and 12).
    pub fn third(&self) -> C64 {
        (self.z - 1.0) / self.z
    }

    pub fn conj(&self) -> Self {
        ShapeParameter { z: self.z.conj() }
    }

    pub fn angles(&self) -> Result<DihedralAngleTriple, GeomError> {
        dihedral_angles(*self)
    }

    pub fn volume(&self) -> Result<f64, GeomError> {
        tet_volume(*self)
    }
}

/// Dihedral angles at edges 01, 02, 03 (equal to those at 23, 13, 12).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DihedralAngleTriple(pub [f64; 3]);

impl DihedralAngleTriple {
    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn min(&self) -> f64 {
        self.0.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

pub fn cross_ratio(v0: IdealPoint, v1: IdealPoint, v2: IdealPoint, v3: IdealPoint) -> Result<ShapeParameter, GeomError> {
    let v = [v0, v1, v2, v3];
    for i in 0..4 {
        for j in (i + 1)..4 {
            if v[i].close_to(&v[j], 0.0) {
                return Err(GeomError::DegenerateInput(i, j));
            }
        }
    }
    use IdealPoint::*;
    let z = match v {
        [Infinity, Finite(b), Finite(c), Finite(d)] => (d - b) / (c - b),
        [Finite(a), Infinity, Finite(c), Finite(d)] => (c - a) / (d - a),
        [Finite(a), Finite(b), Infinity, Finite(d)] => (d - b) / (d - a),
        [Finite(a), Finite(b), Finite(c), Infinity] => (c - a) / (c - b),
        [Finite(a), Finite(b), Finite(c), Finite(d)] => ((c - a) * (d - b)) / ((c - b) * (d - a)),
        _ => unreachable!("at most one point is infinite after the distinctness check"),
    };
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(GeomError::NonFinite);
    }
    Ok(ShapeParameter { z })
}

pub fn dihedral_angles(s: ShapeParameter) -> Result<DihedralAngleTriple, GeomError> {
    if !s.is_geometric() {
        return Err(GeomError::NonGeometric(s.z));
    }
    Ok(DihedralAngleTriple([s.z.arg(), s.second().arg(), s.third().arg()]))
}

pub fn tet_volume(s: ShapeParameter) -> Result<f64, GeomError> {
    let a = dihedral_angles(s)?;
    Ok(a.0.iter().map(|&t| lobachevsky(t)).sum())
}

/// Lobachevsky function, Л(θ) = −∫₀^θ log|2 sin t| dt.
///
/// On (0, π/2] it is rewritten as θ(1 − log 2θ) − ∫₀^θ log(sin t / t) dt,
/// whose integrand is smooth, and integrated by adaptive Gauss–Kronrod.
pub fn lobachevsky(theta: f64) -> f64 {
    if !theta.is_finite() {
        return f64::NAN;
    }
    // odd and π-periodic
    let mut t = theta - PI * (theta / PI).round();
    let mut sign = 1.0;
    if t < 0.0 {
        t = -t;
        sign = -1.0;
    }
    if t == 0.0 {
        return 0.0;
    }
    // Л(π − t) = −Л(t), so fold (π/2, π) back
    if t > FRAC_PI_2 {
        t = PI - t;
        sign = -sign;
    }
    let integral = adaptive_gk(&|x: f64| (x.sin() / x).ln(), 0.0, t, 40);
    sign * (t * (1.0 - (2.0 * t).ln()) - integral)
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.000000000000000000000000000000000,
];
const GK_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const G_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = GK_WEIGHTS[7] * fc;
    let mut gauss = G_WEIGHTS[3] * fc;
    for k in 0..7 {
        let x = h * GK_NODES[k];
        let s = f(c - x) + f(c + x);
        kron += GK_WEIGHTS[k] * s;
        if k % 2 == 1 {
            gauss += G_WEIGHTS[k / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

// error budget proportional to interval length
fn adaptive_gk(f: &dyn Fn(f64) -> f64, a: f64, b: f64, depth: u32) -> f64 {
    let (val, err) = gk15(f, a, b);
    if depth == 0 || err <= 1e-15 * (b - a) + 4.0 * f64::EPSILON * val.abs() {
        return val;
    }
    let m = 0.5 * (a + b);
    adaptive_gk(f, a, m, depth - 1) + adaptive_gk(f, m, b, depth - 1)
}

/// Length of the orthogeodesic between two horoballs with disjoint interiors.
pub fn orthogeodesic_length(b1: &Horoball, b2: &Horoball) -> Result<f64, GeomError> {
    let len = match (b1.base, b2.base) {
        (IdealPoint::Finite(p), IdealPoint::Finite(q)) => {
            let d2 = (p - q).norm_sqr();
            if d2 == 0.0 {
                return Err(GeomError::OverlappingHoroballs(f64::NEG_INFINITY));
            }
            (d2 / (b1.size * b2.size)).ln()
        }
        (IdealPoint::Infinity, IdealPoint::Finite(_)) => (b1.size / b2.size).ln(),
        (IdealPoint::Finite(_), IdealPoint::Infinity) => (b2.size / b1.size).ln(),
        (IdealPoint::Infinity, IdealPoint::Infinity) => {
            return Err(GeomError::OverlappingHoroballs(f64::NEG_INFINITY))
        }
    };
    if len.abs() < 1e-12 {
        Ok(0.0)
    } else if len < 0.0 {
        Err(GeomError::OverlappingHoroballs(len))
    } else {
        Ok(len)
    }
}

/// An element of SL(2, C), rows `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mobius {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl Mobius {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mobius { a, b, c, d }
    }

    pub fn identity() -> Self {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        Mobius::new(one, zero, zero, one)
    }

    pub fn det(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    /// Scales to determinant 1; `None` if singular.
    pub fn normalized(&self) -> Option<Self> {
        let det = self.det();
        if det.norm() == 0.0 {
            return None;
        }
        let s = det.sqrt();
        Some(Mobius::new(self.a / s, self.b / s, self.c / s, self.d / s))
    }

    pub fn compose(&self, o: &Mobius) -> Mobius {
        Mobius::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }

    pub fn inverse(&self) -> Mobius {
        let det = self.det();
        Mobius::new(self.d / det, -self.b / det, -self.c / det, self.a / det)
    }

    /// Action without unimodularity check.
    pub fn act(&self, p: IdealPoint) -> IdealPoint {
        match p {
            IdealPoint::Infinity => {
                if self.c == C64::new(0.0, 0.0) {
                    IdealPoint::Infinity
                } else {
                    IdealPoint::Finite(self.a / self.c)
                }
            }
            IdealPoint::Finite(z) => {
                let den = self.c * z + self.d;
                if den == C64::new(0.0, 0.0) {
                    IdealPoint::Infinity
                } else {
                    IdealPoint::Finite((self.a * z + self.b) / den)
                }
            }
        }
    }

    /// The map sending `(a, b, c)` to `(∞, 0, 1)`, determinant 1.
    pub fn to_standard(a: IdealPoint, b: IdealPoint, c: IdealPoint) -> Result<Mobius, GeomError> {
        use IdealPoint::*;
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let m = match (a, b, c) {
            (Finite(a), Finite(b), Finite(c)) => Mobius::new(c - a, -b * (c - a), c - b, -a * (c - b)),
            (Infinity, Finite(b), Finite(c)) => Mobius::new(one, -b, zero, c - b),
            (Finite(a), Infinity, Finite(c)) => Mobius::new(zero, c - a, one, -a),
            (Finite(a), Finite(b), Infinity) => Mobius::new(one, -b, one, -a),
            _ => return Err(GeomError::DegenerateInput(0, 1)),
        };
        m.normalized().ok_or(GeomError::DegenerateInput(0, 1))
    }

    fn check(&self, tol: f64) -> Result<(), GeomError> {
        let det = self.det();
        if (det - 1.0).norm() > tol {
            return Err(GeomError::NonUnimodular(det));
        }
        Ok(())
    }
}

pub fn apply_mobius(m: &Mobius, p: IdealPoint) -> Result<IdealPoint, GeomError> {
    m.check(DEFAULT_TOL)?;
    Ok(m.act(p.checked()?))
}

/// Image of a horoball; diameters scale by |m'(p)| = 1/|cp + d|².
pub fn apply_mobius_horoball(m: &Mobius, b: &Horoball) -> Result<Horoball, GeomError> {
    m.check(DEFAULT_TOL)?;
    let zero = C64::new(0.0, 0.0);
    let out = match b.base {
        IdealPoint::Finite(p) => {
            let den = m.c * p + m.d;
            if den == zero {
                Horoball { base: IdealPoint::Infinity, size: 1.0 / (m.c.norm_sqr() * b.size) }
            } else {
                Horoball { base: m.act(b.base), size: b.size / den.norm_sqr() }
            }
        }
        IdealPoint::Infinity => {
            if m.c == zero {
                Horoball { base: IdealPoint::Infinity, size: b.size * m.a.norm_sqr() }
            } else {
                Horoball { base: IdealPoint::Finite(m.a / m.c), size: 1.0 / (m.c.norm_sqr() * b.size) }
            }
        }
    };
    Horoball::new(out.base, out.size)
}

/// Position of the fourth vertex of a tetrahedron with shape `z`, given the
/// positions of three of its slots.
pub fn place_fourth(z: C64, known: [(usize, IdealPoint); 3]) -> Result<IdealPoint, GeomError> {
    let canon = [IdealPoint::Infinity, IdealPoint::Finite(C64::new(0.0, 0.0)), IdealPoint::Finite(C64::new(1.0, 0.0)), IdealPoint::Finite(z)];
    let missing = (0..4).find(|s| known.iter().all(|(k, _)| k != s)).expect("three distinct slots");
    // m_c: canonical -> standard, m_p: actual -> standard
    let m_c = Mobius::to_standard(canon[known[0].0], canon[known[1].0], canon[known[2].0])?;
    let m_p = Mobius::to_standard(known[0].1, known[1].1, known[2].1)?;
    let m = m_p.inverse().compose(&m_c);
    Ok(m.act(canon[missing]))
}
