//! Slopes, Farey triangles, the dual trivalent tree and L/R path addressing.
//!
//! A triangle `(s1, s2, s3)` is entered through the edge `(s1, s2)`; `s3` is
//! the newest slope. `L` crosses `(s1, s3)` giving `(s1, s3, n)`, `R` crosses
//! `(s3, s2)` giving `(s3, s2, n)`, where `n` is the other Farey neighbor of the
//! crossed edge. Neither turn recrosses `(s1, s2)`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64 as C64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FareyError {
    #[error("slope 0/0 is undefined")]
    ZeroSlope,
    #[error("slopes {0} and {1} are not Farey adjacent")]
    NotAdjacent(String, String),
    #[error("lattice modulus must have nonzero imaginary part")]
    RealModulus,
    #[error("cannot parse `{0}`")]
    Parse(String),
    #[error("periodic part of the word is empty")]
    EmptyPeriod,
}

/// Reduced slope `p/q`: gcd 1, `q > 0`, or `1/0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slope {
    p: BigInt,
    q: BigInt,
}

impl Slope {
    pub fn new(p: BigInt, q: BigInt) -> Result<Self, FareyError> {
        if p.is_zero() && q.is_zero() {
            return Err(FareyError::ZeroSlope);
        }
        let g = p.gcd(&q);
        let (mut p, mut q) = (p / &g, q / &g);
        if q.is_negative() || (q.is_zero() && p.is_negative()) {
            p = -p;
            q = -q;
        }
        Ok(Slope { p, q })
    }

    pub fn from_i64(p: i64, q: i64) -> Result<Self, FareyError> {
        Slope::new(BigInt::from(p), BigInt::from(q))
    }

    pub fn infinity() -> Self {
        Slope { p: BigInt::one(), q: BigInt::zero() }
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn to_f64(&self) -> f64 {
        if self.q.is_zero() {
            f64::INFINITY
        } else {
            ratio_f64(&self.p, &self.q)
        }
    }

    /// Farey adjacency: `|p q' − p' q| = 1`.
    pub fn adjacent(&self, other: &Slope) -> bool {
        det(&self.vector(), &other.vector()).abs().is_one()
    }

    pub fn vector(&self) -> (BigInt, BigInt) {
        (self.p.clone(), self.q.clone())
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for Slope {
    type Err = FareyError;

    fn from_str(s: &str) -> Result<Self, FareyError> {
        let bad = || FareyError::Parse(s.to_string());
        let (p, q) = s.trim().split_once('/').ok_or_else(bad)?;
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        Slope::new(p, q)
    }
}

/// Quotient of big integers as `f64`, accurate for huge operands.
pub fn ratio_f64(a: &BigInt, b: &BigInt) -> f64 {
    let bits = a.bits().max(b.bits());
    if bits < 1000 {
        return a.to_f64().unwrap() / b.to_f64().unwrap();
    }
    let shift = bits - 900;
    (a >> shift).to_f64().unwrap() / (b >> shift).to_f64().unwrap()
}

pub fn det(u: &(BigInt, BigInt), v: &(BigInt, BigInt)) -> BigInt {
    &u.0 * &v.1 - &v.0 * &u.1
}

fn slope_of(v: &(BigInt, BigInt)) -> Slope {
    Slope::new(v.0.clone(), v.1.clone()).expect("nonzero vector")
}

/// Other Farey neighbor of the edge `(a, b)`, away from `c`.
fn other_neighbor(a: &Slope, b: &Slope, c: &Slope) -> Slope {
    let (u, v) = (a.vector(), b.vector());
    let plus = slope_of(&(&u.0 + &v.0, &u.1 + &v.1));
    if &plus != c {
        plus
    } else {
        slope_of(&(&u.0 - &v.0, &u.1 - &v.1))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FareyTriangle(pub [Slope; 3]);

impl FareyTriangle {
    pub fn new(s1: Slope, s2: Slope, s3: Slope) -> Result<Self, FareyError> {
        for (a, b) in [(&s1, &s2), (&s1, &s3), (&s2, &s3)] {
            if !a.adjacent(b) {
                return Err(FareyError::NotAdjacent(a.to_string(), b.to_string()));
            }
        }
        Ok(FareyTriangle([s1, s2, s3]))
    }

    /// `(0/1, 1/0, 1/1)`.
    pub fn base() -> Self {
        FareyTriangle([Slope::from_i64(0, 1).unwrap(), Slope::infinity(), Slope::from_i64(1, 1).unwrap()])
    }

    pub fn slopes(&self) -> &[Slope; 3] {
        &self.0
    }

    pub fn index_of(&self, s: &Slope) -> Option<usize> {
        self.0.iter().position(|x| x == s)
    }

    /// Triangle across the edge opposite `s_k`, with `s_k` replaced in place.
    pub fn reflect(&self, k: usize) -> FareyTriangle {
        let (i, j) = match k {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let mut out = self.0.clone();
        out[k] = other_neighbor(&self.0[i], &self.0[j], &self.0[k]);
        FareyTriangle(out)
    }

    pub fn neighbors(&self) -> [FareyTriangle; 3] {
        [self.reflect(0), self.reflect(1), self.reflect(2)]
    }

    pub fn step(&self, turn: Turn) -> FareyTriangle {
        let [s1, s2, s3] = &self.0;
        match turn {
            Turn::L => FareyTriangle([s1.clone(), s3.clone(), other_neighbor(s1, s3, s2)]),
            Turn::R => FareyTriangle([s3.clone(), s2.clone(), other_neighbor(s3, s2, s1)]),
        }
    }

    /// Order-independent identity.
    pub fn key(&self) -> [Slope; 3] {
        let mut k = self.0.clone();
        k.sort();
        k
    }

    pub fn parse(s: &str) -> Result<Self, FareyError> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 3 {
            return Err(FareyError::Parse(s.to_string()));
        }
        FareyTriangle::new(parts[0].parse()?, parts[1].parse()?, parts[2].parse()?)
    }
}

impl fmt::Display for FareyTriangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.0[0], self.0[1], self.0[2])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Turn {
    L,
    R,
}

pub fn parse_word(s: &str) -> Result<Vec<Turn>, FareyError> {
    s.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            'L' | 'l' => Ok(Turn::L),
            'R' | 'r' => Ok(Turn::R),
            _ => Err(FareyError::Parse(s.to_string())),
        })
        .collect()
}

pub fn path_to_slope_limit(start: &FareyTriangle, turns: &[Turn]) -> Vec<FareyTriangle> {
    let mut path = vec![start.clone()];
    for &t in turns {
        let next = path.last().unwrap().step(t);
        path.push(next);
    }
    path
}

/// The newest slope of each triangle after the start.
pub fn replaced_slopes(path: &[FareyTriangle]) -> Vec<Slope> {
    path.iter().skip(1).map(|t| t.0[2].clone()).collect()
}

/// `(a + b√d)/c` with `c > 0` and `d > 1` square-free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticIrrational {
    pub a: BigInt,
    pub b: BigInt,
    pub d: BigInt,
    pub c: BigInt,
}

/// Sign of `u + v√d` for `d > 0`.
fn sign_surd(u: &BigInt, v: &BigInt, d: &BigInt) -> Ordering {
    let su = u.sign();
    let sv = v.sign();
    use num_bigint::Sign::*;
    match (su, sv) {
        (NoSign, NoSign) => Ordering::Equal,
        (Plus | NoSign, Plus | NoSign) => Ordering::Greater,
        (Minus | NoSign, Minus | NoSign) => Ordering::Less,
        _ => {
            let uu = u * u;
            let vv = v * v * d;
            let mag = uu.cmp(&vv);
            if su == Plus {
                mag
            } else {
                mag.reverse()
            }
        }
    }
}

impl QuadraticIrrational {
    pub fn to_f64(&self) -> f64 {
        let d = self.d.to_f64().unwrap();
        (self.a.to_f64().unwrap() + self.b.to_f64().unwrap() * d.sqrt()) / self.c.to_f64().unwrap()
    }

    /// Exact comparison of `p/q` (q > 0) with this number.
    pub fn cmp_rational(&self, p: &BigInt, q: &BigInt) -> Ordering {
        // p/q − (a + b√d)/c has the sign of (pc − qa) − qb√d
        sign_surd(&(p * &self.c - q * &self.a), &(-(q * &self.b)), &self.d)
    }

    /// `|s − x| < 1/q²`, decided exactly.
    pub fn approximated_by(&self, s: &Slope) -> bool {
        if s.q().is_zero() {
            return false;
        }
        let (p, q) = (s.p(), s.q());
        let q2 = q * q;
        let w = p * q * &self.c - &q2 * &self.a;
        let z = -(&q2 * &self.b);
        sign_surd(&(&w - &self.c), &z, &self.d) == Ordering::Less && sign_surd(&(&w + &self.c), &z, &self.d) == Ordering::Greater
    }
}

impl fmt::Display for QuadraticIrrational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}*sqrt({}))/{}", self.a, self.b, self.d, self.c)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SlopeLimit {
    Rational(Slope),
    Quadratic(QuadraticIrrational),
}

type Mat = [[BigInt; 2]; 2];

fn mat_mul(x: &Mat, y: &Mat) -> Mat {
    let e = |i: usize, j: usize| &x[i][0] * &y[0][j] + &x[i][1] * &y[1][j];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn turn_matrix(t: Turn) -> Mat {
    let (o, z) = (BigInt::one(), BigInt::zero());
    match t {
        Turn::L => [[o.clone(), o.clone()], [z, o]],
        Turn::R => [[o.clone(), z], [o.clone(), o]],
    }
}

/// Columns `a`, `b` with `a + b = ±v3` for the triangle's vectors.
fn signed_basis(t: &FareyTriangle) -> Mat {
    let (u1, u2) = (t.0[0].vector(), t.0[1].vector());
    let sum = slope_of(&(&u1.0 + &u2.0, &u1.1 + &u2.1));
    let b = if sum == t.0[2] { u2 } else { (-u2.0, -u2.1) };
    [[u1.0, b.0], [u1.1, b.1]]
}

fn split_square(n: &BigInt) -> (BigInt, BigInt) {
    // n = s² · r
    let mut s = BigInt::one();
    let mut r = n.clone();
    let mut k = BigInt::from(2);
    while &k * &k <= r {
        let kk = &k * &k;
        while (&r % &kk).is_zero() {
            r /= &kk;
            s *= &k;
        }
        k += 1;
    }
    (s, r)
}

/// Limit slope of the word `prefix · period^∞`, exact.
pub fn periodic_limit(start: &FareyTriangle, prefix: &[Turn], period: &[Turn]) -> Result<SlopeLimit, FareyError> {
    if period.is_empty() {
        return Err(FareyError::EmptyPeriod);
    }
    let mut b = signed_basis(start);
    for &t in prefix {
        b = mat_mul(&b, &turn_matrix(t));
    }
    let mut p = turn_matrix(period[0]);
    for &t in &period[1..] {
        p = mat_mul(&p, &turn_matrix(t));
    }
    let trace = &p[0][0] + &p[1][1];
    if trace == BigInt::from(2) {
        // pure L^k fixes the first column, pure R^k the second
        let col = if period[0] == Turn::L { 0 } else { 1 };
        return Ok(SlopeLimit::Rational(slope_of(&(b[0][col].clone(), b[1][col].clone()))));
    }
    let disc = &trace * &trace - 4;
    let (alpha, beta, delta) = (&p[0][0], &p[0][1], &p[1][1]);
    // eigenvector (2β, δ − α + √D)
    let x1 = 2 * beta * &b[0][0] + (delta - alpha) * &b[0][1];
    let y1 = b[0][1].clone();
    let x2 = 2 * beta * &b[1][0] + (delta - alpha) * &b[1][1];
    let y2 = b[1][1].clone();
    let (s, d) = split_square(&disc);
    let mut a: BigInt = &x1 * &x2 - &y1 * &y2 * &disc;
    let mut bb: BigInt = (&y1 * &x2 - &x1 * &y2) * s;
    let mut c: BigInt = &x2 * &x2 - &y2 * &y2 * &disc;
    if c.is_negative() {
        a = -a;
        bb = -bb;
        c = -c;
    }
    let g = a.gcd(&bb).gcd(&c);
    if !g.is_zero() && !g.is_one() {
        a /= &g;
        bb /= &g;
        c /= &g;
    }
    Ok(SlopeLimit::Quadratic(QuadraticIrrational { a, b: bb, d, c }))
}

/// Lattice vector `q + pω` of the slope `p/q` in `ℤ + ℤω`.
pub fn slope_vector(s: &Slope, omega: C64) -> Result<C64, FareyError> {
    if omega.im == 0.0 || !omega.im.is_finite() {
        return Err(FareyError::RealModulus);
    }
    Ok(s.q().to_f64().unwrap() + omega * s.p().to_f64().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(p: i64, q: i64) -> Slope {
        Slope::from_i64(p, q).unwrap()
    }

    #[test]
    fn normalization() {
        assert_eq!(s(2, -4), s(-1, 2));
        assert_eq!(s(-3, 0), Slope::infinity());
        assert_eq!(Slope::from_i64(0, 0), Err(FareyError::ZeroSlope));
        assert_eq!("-6/4".parse::<Slope>().unwrap(), s(-3, 2));
        assert_eq!(s(0, -5).to_string(), "0/1");
    }

    #[test]
    fn base_neighbors() {
        let n = FareyTriangle::base().neighbors();
        let new: Vec<Slope> = (0..3).map(|k| n[k].0[k].clone()).collect();
        assert_eq!(new, vec![s(2, 1), s(1, 2), s(-1, 1)]);
        for t in &n {
            FareyTriangle::new(t.0[0].clone(), t.0[1].clone(), t.0[2].clone()).unwrap();
        }
    }

    #[test]
    fn reflection_is_involution() {
        let t = FareyTriangle::parse("2/5,1/3,3/8").unwrap();
        for k in 0..3 {
            assert_eq!(t.reflect(k).reflect(k), t);
        }
    }

    #[test]
    fn rejects_non_adjacent() {
        assert!(matches!(FareyTriangle::parse("0/1,1/3,1/1"), Err(FareyError::NotAdjacent(..))));
        assert!(matches!(FareyTriangle::parse("0/1,1/0"), Err(FareyError::Parse(_))));
    }

    #[test]
    fn golden_limit_is_exact() {
        let lim = periodic_limit(&FareyTriangle::base(), &[], &[Turn::R, Turn::L]).unwrap();
        let SlopeLimit::Quadratic(x) = lim else { panic!() };
        assert!((x.to_f64() - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-15);
        assert_eq!(x.cmp_rational(&BigInt::from(8), &BigInt::from(5)), Ordering::Less);
        assert_eq!(x.cmp_rational(&BigInt::from(13), &BigInt::from(8)), Ordering::Greater);
    }

    #[test]
    fn pure_turns_have_rational_limits() {
        let b = FareyTriangle::base();
        assert_eq!(periodic_limit(&b, &[], &[Turn::L]).unwrap(), SlopeLimit::Rational(s(0, 1)));
        assert_eq!(periodic_limit(&b, &[], &[Turn::R]).unwrap(), SlopeLimit::Rational(Slope::infinity()));
    }

    #[test]
    fn slope_vectors() {
        let w = C64::new(-0.5, 0.8);
        assert_eq!(slope_vector(&Slope::infinity(), w).unwrap(), w);
        assert_eq!(slope_vector(&s(0, 1), w).unwrap(), C64::new(1.0, 0.0));
        let m = slope_vector(&s(3, 5), w).unwrap();
        assert!((m - slope_vector(&s(1, 2), w).unwrap() - slope_vector(&s(2, 3), w).unwrap()).norm() < 1e-14);
        assert_eq!(slope_vector(&s(1, 1), C64::new(2.0, 0.0)), Err(FareyError::RealModulus));
    }
}
