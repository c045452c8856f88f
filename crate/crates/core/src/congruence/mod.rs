//! Number fields, residue field reductions, multiplicative-order prime
//! searches and the coset trace separation checks.
//!
//! Search procedures return certificates. A search that runs out of primes
//! reports [`CongruenceError::SearchExhausted`], which is inconclusive.

pub mod fp;
pub mod numfield;
pub mod sl2;

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

pub use fp::{FfElem, FiniteField, FpPoly};
pub use numfield::{NFElem, NumberField, Q};

pub const DEFAULT_PRIME_BOUND: u64 = 100_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CongruenceError {
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("degree {0} exceeds the supported bound of 8")]
    DegreeTooLarge(usize),
    #[error("polynomial is reducible (factor {0})")]
    Reducible(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("expected {expected} coordinates, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("division by zero")]
    ZeroDivision,
    #[error("denominator divisible by {p}")]
    BadDenominator { p: u64 },
    #[error("minimal polynomial is not squarefree modulo {p}")]
    NotSquarefree { p: u64 },
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("factor does not divide the minimal polynomial modulo p or is not irreducible")]
    NotAFactor,
    #[error("1 and omega are linearly dependent over Q")]
    DependentBasis,
    #[error("lower-left entry c is zero")]
    ZeroC,
    #[error("element is zero or a root of unity")]
    RootOfUnity,
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("matrix is not unimodular")]
    NonUnimodular,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("search exhausted up to prime bound {bound} (inconclusive)")]
    SearchExhausted { bound: u64 },
    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

/// Primes in `[from, to]`.
pub fn primes_between(from: u64, to: u64) -> impl Iterator<Item = u64> {
    (from.max(2)..=to).filter(|&n| fp::is_prime_u64(n))
}

fn rational_mod(c: &Q, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let den = c.denom().mod_floor(&pb).to_u64().unwrap();
    if den == 0 {
        return None;
    }
    let num = c.numer().mod_floor(&pb).to_u64().unwrap();
    Some(((num as u128 * fp::inv_mod(den, p) as u128) % p as u128) as u64)
}

/// Ring homomorphism from the `p`-integral elements of a number field onto
/// F_p[x]/(h), with `h` a monic irreducible factor of the minimal polynomial
/// modulo `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidueMap {
    field: NumberField,
    p: u64,
    codomain: FiniteField,
}

impl ResidueMap {
    pub fn new(field: &NumberField, p: u64, factor: FpPoly) -> Result<Self, CongruenceError> {
        let f = Self::minpoly_mod(field, p)?;
        let codomain = FiniteField::new(p, factor).ok_or(CongruenceError::NotAFactor)?;
        if !fp::rem(&f, codomain.modulus(), p).is_empty() {
            return Err(CongruenceError::NotAFactor);
        }
        Ok(ResidueMap { field: field.clone(), p, codomain })
    }

    fn minpoly_mod(field: &NumberField, p: u64) -> Result<FpPoly, CongruenceError> {
        if !fp::is_prime_u64(p) {
            return Err(CongruenceError::NotPrime(p));
        }
        let f: Option<Vec<u64>> = field.minpoly().iter().map(|c| rational_mod(c, p)).collect();
        let f = f.ok_or(CongruenceError::BadDenominator { p })?;
        if !fp::is_squarefree(&f, p) {
            return Err(CongruenceError::NotSquarefree { p });
        }
        Ok(f)
    }

    /// One map per irreducible factor of the minimal polynomial modulo `p`.
    pub fn all(field: &NumberField, p: u64) -> Result<Vec<ResidueMap>, CongruenceError> {
        let f = Self::minpoly_mod(field, p)?;
        let factors = fp::factor(&f, p).ok_or(CongruenceError::NotSquarefree { p })?;
        Ok(factors.into_iter().map(|h| ResidueMap { field: field.clone(), p, codomain: FiniteField::new(p, h).expect("irreducible factor") }).collect())
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn factor(&self) -> &[u64] {
        self.codomain.modulus()
    }

    pub fn codomain(&self) -> &FiniteField {
        &self.codomain
    }

    pub fn reduce(&self, x: &NFElem) -> Result<FfElem, CongruenceError> {
        let c: Option<Vec<u64>> = x.coeffs.iter().map(|c| rational_mod(c, self.p)).collect();
        let c = c.ok_or(CongruenceError::BadDenominator { p: self.p })?;
        Ok(self.codomain.elem(&c))
    }

    pub fn describe(&self) -> String {
        format!("p = {}, factor = {}", self.p, fp::format_fp_poly(self.factor()))
    }
}

/// `{1, reduce(ω)}` is linearly independent over F_p.
pub fn omega_independent(omega: &NFElem, r: &ResidueMap) -> Result<bool, CongruenceError> {
    Ok(!r.codomain.in_prime_field(&r.reduce(omega)?))
}

/// `y = (m + n ω) / v` in lowest terms, `v > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaCoords {
    pub m: BigInt,
    pub n: BigInt,
    pub v: BigInt,
}

impl OmegaCoords {
    pub fn new(m: i64, n: i64, v: i64) -> Result<Self, CongruenceError> {
        if v <= 0 || m.gcd(&n).gcd(&v) != 1 {
            return Err(CongruenceError::PreconditionViolated("coordinates must satisfy v > 0 and gcd(m, n, v) = 1".into()));
        }
        Ok(OmegaCoords { m: m.into(), n: n.into(), v: v.into() })
    }

    /// The element `(m + n ω) / v`.
    pub fn value(&self, k: &NumberField, omega: &NFElem) -> NFElem {
        let mq = k.rational(Q::from_integer(self.m.clone()));
        let nw = k.scale(omega, &Q::from_integer(self.n.clone()));
        k.scale(&k.add(&mq, &nw), &Q::new(BigInt::one(), self.v.clone()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OmegaClass {
    NotInQOmega,
    Coords(OmegaCoords),
}

pub fn classify_in_qomega(k: &NumberField, y: &NFElem, omega: &NFElem) -> Result<OmegaClass, CongruenceError> {
    let j = (1..k.degree()).find(|&j| !omega.coeffs[j].is_zero()).ok_or(CongruenceError::DependentBasis)?;
    let b = &y.coeffs[j] / &omega.coeffs[j];
    let a = &y.coeffs[0] - &b * &omega.coeffs[0];
    if k.add(&k.rational(a.clone()), &k.scale(omega, &b)) != *y {
        return Ok(OmegaClass::NotInQOmega);
    }
    let v = a.denom().lcm(b.denom());
    let m = (&a * Q::from_integer(v.clone())).to_integer();
    let n = (&b * Q::from_integer(v.clone())).to_integer();
    Ok(OmegaClass::Coords(OmegaCoords { m, n, v }))
}

pub type Matrix = [[NFElem; 2]; 2];

/// Solutions `y₊ = (2 − a − d)/c` and `y₋ = (−2 − a − d)/c` of tr(g·[[1, y], [0, 1]]) = ±2.
pub fn trace_targets(k: &NumberField, g: &Matrix) -> Result<(NFElem, NFElem), CongruenceError> {
    let c = &g[1][0];
    if k.is_zero(c) {
        return Err(CongruenceError::ZeroC);
    }
    let t = k.add(&g[0][0], &g[1][1]);
    let yp = k.div(&k.sub(&k.int(2), &t), c)?;
    let ym = k.div(&k.sub(&k.int(-2), &t), c)?;
    Ok((yp, ym))
}

/// Structured certificate: a kind plus ordered `key: value` records.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Certificate {
    pub kind: String,
    pub records: Vec<(String, String)>,
}

impl Certificate {
    fn new(kind: &str) -> Self {
        Certificate { kind: kind.into(), records: vec![] }
    }

    fn push(&mut self, k: &str, v: impl ToString) {
        self.records.push((k.into(), v.to_string()));
    }

    pub fn get(&self, k: &str) -> Option<&str> {
        self.records.iter().find(|(a, _)| a == k).map(|(_, b)| b.as_str())
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("certificate {}\n", self.kind);
        for (k, v) in &self.records {
            let _ = writeln!(s, "{k}: {v}");
        }
        s.push_str("end\n");
        s
    }
}

#[derive(Clone, Debug)]
pub struct OrderWitness {
    pub map: ResidueMap,
    pub image: FfElem,
    pub certificate: Certificate,
}

fn check_not_torsion(k: &NumberField, x: &NFElem) -> Result<(), CongruenceError> {
    if k.is_zero(x) || k.is_root_of_unity(x) {
        return Err(CongruenceError::RootOfUnity);
    }
    Ok(())
}

/// Scans primes `ℓ ≤ bound` and factors for σ with σ(λ) of order exactly `q`
/// and σ(x) ≠ 0 for each listed `x`.
pub fn find_prime_with_order(k: &NumberField, lambda: &NFElem, q: u64, nonzero: &[NFElem], bound: u64) -> Result<OrderWitness, CongruenceError> {
    find_prime_with_order_excluding(k, lambda, q, nonzero, bound, &[])
}

fn find_prime_with_order_excluding(k: &NumberField, lambda: &NFElem, q: u64, nonzero: &[NFElem], bound: u64, skip: &[u64]) -> Result<OrderWitness, CongruenceError> {
    check_not_torsion(k, lambda)?;
    if q == 0 {
        return Err(CongruenceError::PreconditionViolated("order must be positive".into()));
    }
    for l in primes_between(2, bound) {
        if skip.contains(&l) {
            continue;
        }
        let Ok(maps) = ResidueMap::all(k, l) else { continue };
        for map in maps {
            // q must divide |F|^× = ℓ^e − 1
            let e = map.codomain.degree() as u32;
            if num_bigint::BigUint::from(l).modpow(&e.into(), &q.into()) != num_bigint::BigUint::one() % q {
                continue;
            }
            let Ok(img) = map.reduce(lambda) else { continue };
            if !map.codomain.has_order(&img, q) {
                continue;
            }
            let ok = nonzero.iter().all(|x| map.reduce(x).is_ok_and(|v| !v.is_empty()));
            if !ok {
                continue;
            }
            let mut cert = Certificate::new("multiplicative-order");
            cert.push("minpoly", numfield::format_poly(k.minpoly(), 'x'));
            cert.push("lambda", k.format_elem(lambda));
            cert.push("prime", l);
            cert.push("factor", fp::format_fp_poly(map.factor()));
            cert.push("image", map.codomain.format(&img));
            cert.push("order", q);
            cert.push("nonzero-conditions", nonzero.len());
            return Ok(OrderWitness { map, image: img, certificate: cert });
        }
    }
    Err(CongruenceError::SearchExhausted { bound })
}

/// Brute-force order of an element of a small field, by repeated multiplication.
pub fn brute_force_order(f: &FiniteField, x: &FfElem, limit: u64) -> Option<u64> {
    if x.is_empty() {
        return None;
    }
    let mut y = x.clone();
    for k in 1..=limit {
        if y == f.one() {
            return Some(k);
        }
        y = f.mul(&y, x);
    }
    None
}

/// A map ρ = (ρ₁, …, ρₖ) into a product of residue fields at one prime.
#[derive(Clone, Debug)]
pub struct SeparationWitness {
    pub maps: Vec<ResidueMap>,
    pub certificate: Certificate,
}

impl SeparationWitness {
    pub fn p(&self) -> u64 {
        self.maps[0].p
    }
}

/// Rank of vectors over F_p.
fn rank_mod_p(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let width = rows.iter().map(Vec::len).max().unwrap_or(0);
    for r in rows.iter_mut() {
        r.resize(width, 0);
    }
    let mut rank = 0;
    for col in 0..width {
        let Some(piv) = (rank..rows.len()).find(|&i| rows[i][col] != 0) else { continue };
        rows.swap(rank, piv);
        let inv = fp::inv_mod(rows[rank][col], p);
        for i in 0..rows.len() {
            if i != rank && rows[i][col] != 0 {
                let f = (rows[i][col] as u128 * inv as u128 % p as u128) as u64;
                for j in 0..width {
                    let sub = (f as u128 * rows[rank][j] as u128 % p as u128) as u64;
                    rows[i][j] = (rows[i][j] + p - sub) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Enumerates `m + n ρ(ω)` over all residues `m, n` and reports whether `ρ(y)` is hit.
pub fn zomega_image_contains(maps: &[ResidueMap], y: &NFElem, omega: &NFElem) -> Result<bool, CongruenceError> {
    let p = maps[0].p;
    let mut images = Vec::new();
    for map in maps {
        images.push((map.reduce(y)?, map.reduce(omega)?));
    }
    for n in 0..p {
        for m in 0..p {
            let hit = maps.iter().zip(&images).all(|(map, (ry, rw))| {
                let f = &map.codomain;
                f.add(&f.int(m as i64), &f.mul(&f.int(n as i64), rw)) == *ry
            });
            if hit {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Coordinates of the images under every map, concatenated.
fn stacked(maps: &[ResidueMap], x: &NFElem) -> Result<Vec<u64>, CongruenceError> {
    let mut out = Vec::new();
    for map in maps {
        let mut v = map.reduce(x)?;
        v.resize(map.codomain.degree(), 0);
        out.extend(v);
    }
    Ok(out)
}

/// A map ρ with ρ(y) outside ρ(ℤ + ℤω), for `y ∉ ℚ + ℚω`. Each prime is
/// tried with single residue fields first and then with the product of all
/// residue fields above it.
pub fn separate_from_zomega(k: &NumberField, y: &NFElem, omega: &NFElem, bound: u64) -> Result<SeparationWitness, CongruenceError> {
    if classify_in_qomega(k, y, omega)? != OmegaClass::NotInQOmega {
        return Err(CongruenceError::PreconditionViolated("y lies in Q + Q omega".into()));
    }
    for p in primes_between(2, bound) {
        let Ok(all) = ResidueMap::all(k, p) else { continue };
        let mut candidates: Vec<Vec<ResidueMap>> = all.iter().map(|m| vec![m.clone()]).collect();
        if all.len() > 1 {
            candidates.push(all.clone());
        }
        for maps in candidates {
            let (Ok(ry), Ok(rw)) = (stacked(&maps, y), stacked(&maps, omega)) else { continue };
            let one = stacked(&maps, &k.one())?;
            let span = rank_mod_p(vec![one.clone(), rw.clone()], p);
            if rank_mod_p(vec![one, rw, ry], p) == span {
                continue;
            }
            let describe: Vec<String> = maps.iter().map(|m| fp::format_fp_poly(m.factor())).collect();
            if zomega_image_contains(&maps, y, omega)? {
                return Err(CongruenceError::VerificationFailed(format!("enumeration found y in the image at p = {p}")));
            }
            let mut cert = Certificate::new("zomega-separation");
            cert.push("minpoly", numfield::format_poly(k.minpoly(), 'x'));
            cert.push("y", k.format_elem(y));
            cert.push("omega", k.format_elem(omega));
            cert.push("prime", p);
            cert.push("factors", describe.join("; "));
            cert.push("verified", format!("all {} residues m + n omega differ from y", p * p));
            return Ok(SeparationWitness { maps, certificate: cert });
        }
    }
    Err(CongruenceError::SearchExhausted { bound })
}

/// Which generator survives the filling: `M` pairs λ with the coordinate m*, `N` with n*.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Track {
    M,
    N,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObstructionCase {
    /// λ^{2c} is not a root of X² − S X + P (ζ^{2v}, ξ^{2v}); order 2p.
    One,
    /// λ^{2c} = ζ^{2v} but λ^{2vc} ≠ ξ^{2v²}; order 2vp.
    TwoA,
    /// λ^{2c} = ζ^{2v} and λ^{2vc} = ξ^{2v²}; order divisible by 2v².
    TwoB,
}

/// Input of the loxodromic obstruction: coset data over the field of ω and
/// the filled images `r`, `u`, `λ` over a second field.
#[derive(Clone, Debug)]
pub struct LoxodromicData {
    pub omega_field: NumberField,
    pub omega: NFElem,
    pub coords: OmegaCoords,
    pub track: Track,
    pub field: NumberField,
    pub r: NFElem,
    pub u: NFElem,
    pub lambda: NFElem,
}

#[derive(Clone, Debug)]
pub struct ObstructionWitness {
    pub case: ObstructionCase,
    pub eta: ResidueMap,
    pub sigma: ResidueMap,
    /// Order of σ(λ).
    pub order: u64,
    /// Exponents checked in the exhaustive scan.
    pub scanned: u64,
    pub certificate: Certificate,
}

impl LoxodromicData {
    fn coordinate(&self) -> &BigInt {
        match self.track {
            Track::M => &self.coords.m,
            Track::N => &self.coords.n,
        }
    }

    /// Case tag and the elements whose images must be nonzero.
    pub fn classify(&self) -> Result<(ObstructionCase, Vec<NFElem>), CongruenceError> {
        let k = &self.field;
        let pre = |m: &str| Err(CongruenceError::PreconditionViolated(m.into()));
        if k.is_zero(&self.lambda) || k.is_root_of_unity(&self.lambda) {
            return pre("lambda is zero or a root of unity");
        }
        if !k.embed(&self.lambda).iter().any(|z| (z.norm() - 1.0).abs() > 1e-9) {
            return pre("|lambda| = 1 in every complex embedding");
        }
        if k.is_zero(&self.r) {
            return pre("r = 0");
        }
        let ru = k.mul(&self.r, &self.u);
        if ru == k.one() {
            return pre("r u = 1");
        }
        if self.omega_field.is_rational(&self.omega) {
            return pre("omega is rational");
        }
        let v = self.coords.v.to_i64().ok_or(CongruenceError::PreconditionViolated("v too large".into()))?;
        let c = self.coordinate().to_i64().ok_or(CongruenceError::PreconditionViolated("coordinate too large".into()))?;
        if v > 1 && c % v == 0 {
            return pre("v divides the tracked coordinate");
        }
        // ζ, ξ roots of r x² − 2x + u: ζ + ξ = 2/r, ζξ = u/r
        let s1 = k.div(&k.int(2), &self.r)?;
        let p1 = k.div(&self.u, &self.r)?;
        // e_j = ζ^j + ξ^j
        let (mut e0, mut e1) = (k.int(2), s1.clone());
        for _ in 1..2 * v {
            let e2 = k.sub(&k.mul(&s1, &e1), &k.mul(&p1, &e0));
            e0 = std::mem::replace(&mut e1, e2);
        }
        let s = e1;
        let p = k.pow(&p1, 2 * v)?;
        let x = k.pow(&self.lambda, 2 * c)?;
        let qx = k.add(&k.sub(&k.mul(&x, &x), &k.mul(&s, &x)), &p);
        let disc = k.sub(&k.one(), &ru);
        if !k.is_zero(&qx) {
            return Ok((ObstructionCase::One, vec![self.r.clone(), disc, qx]));
        }
        if v == 1 {
            return pre("lambda^(2c) = zeta^2 with v = 1: the coset contains a parabolic element");
        }
        let other = k.sub(&s, &x);
        let cond = k.sub(&k.pow(&self.lambda, 2 * v * c)?, &k.pow(&other, v)?);
        if !k.is_zero(&cond) {
            Ok((ObstructionCase::TwoA, vec![self.r.clone(), disc, cond]))
        } else {
            Ok((ObstructionCase::TwoB, vec![self.r.clone(), disc]))
        }
    }

    /// Residues mod p of the tracked coordinate over all `(m, n)` with η(m + nω) = η(y).
    pub fn compatible_residues(&self, eta: &ResidueMap) -> Result<Vec<u64>, CongruenceError> {
        let y = self.coords.value(&self.omega_field, &self.omega);
        let f = &eta.codomain;
        let (ry, rw) = (eta.reduce(&y)?, eta.reduce(&self.omega)?);
        let mut out = Vec::new();
        for m in 0..eta.p {
            for n in 0..eta.p {
                if f.add(&f.int(m as i64), &f.mul(&f.int(n as i64), &rw)) == ry {
                    out.push(match self.track {
                        Track::M => m,
                        Track::N => n,
                    });
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }
}

/// Exhaustive check of a witness: every exponent `c` whose residue mod p is
/// compatible with η (all `c` in case 2B) gives σ(r λ^c + u λ^{−c}) ≠ ±2,
/// over one full period lcm(p, ord σ(λ)). Returns the number of exponents checked.
pub fn verify_obstruction(data: &LoxodromicData, w: &ObstructionWitness) -> Result<u64, CongruenceError> {
    let f = &w.sigma.codomain;
    let lam = w.sigma.reduce(&data.lambda)?;
    let ord = brute_force_order(f, &lam, 10_000_000).ok_or(CongruenceError::VerificationFailed("order of sigma(lambda) not found".into()))?;
    let (r, u) = (w.sigma.reduce(&data.r)?, w.sigma.reduce(&data.u)?);
    let lam_inv = f.inv(&lam).unwrap();
    let p = w.eta.p;
    let residues = data.compatible_residues(&w.eta)?;
    let period = if w.case == ObstructionCase::TwoB { ord } else { ord.lcm(&p) };
    let (two, mtwo) = (f.int(2), f.int(-2));
    let (mut pos, mut neg) = (f.one(), f.one());
    let mut checked = 0;
    for c in 0..period {
        if w.case == ObstructionCase::TwoB || residues.binary_search(&(c % p)).is_ok() {
            let t = f.add(&f.mul(&r, &pos), &f.mul(&u, &neg));
            if t == two || t == mtwo {
                return Err(CongruenceError::VerificationFailed(format!("trace +-2 at exponent {c}")));
            }
            checked += 1;
        }
        pos = f.mul(&pos, &lam);
        neg = f.mul(&neg, &lam_inv);
    }
    Ok(checked)
}

/// Prime search of the loxodromic case: η_p with {1, η_p(ω)} independent
/// and σ on the filled field with the case's order and nonvanishing
/// conditions, followed by the exhaustive exponent scan.
pub fn loxodromic_obstruction(data: &LoxodromicData, bound: u64) -> Result<ObstructionWitness, CongruenceError> {
    let (case, nonzero) = data.classify()?;
    let v = data.coords.v.to_u64().unwrap();
    let y = data.coords.value(&data.omega_field, &data.omega);
    let mut sigma_2b: Option<(ResidueMap, u64)> = None;
    for p in primes_between(3, bound) {
        if v.is_multiple_of(p) {
            continue;
        }
        let Ok(etas) = ResidueMap::all(&data.omega_field, p) else { continue };
        for eta in etas {
            if !omega_independent(&data.omega, &eta).unwrap_or(false) || eta.reduce(&y).is_err() {
                continue;
            }
            if p * p > 10_000_000 {
                return Err(CongruenceError::SearchExhausted { bound });
            }
            let (sigma, order) = match case {
                ObstructionCase::One | ObstructionCase::TwoA => {
                    let q = if case == ObstructionCase::One { 2 * p } else { 2 * v * p };
                    match find_prime_with_order_excluding(&data.field, &data.lambda, q, &nonzero, bound, &[]) {
                        Ok(w) => (w.map, q),
                        Err(CongruenceError::SearchExhausted { .. }) => continue,
                        Err(e) => return Err(e),
                    }
                }
                ObstructionCase::TwoB => {
                    if sigma_2b.is_none() {
                        sigma_2b = Some(find_divisible_order(&data.field, &data.lambda, 2 * v * v, &nonzero, bound)?);
                    }
                    sigma_2b.clone().unwrap()
                }
            };
            let mut w = ObstructionWitness { case, eta, sigma, order, scanned: 0, certificate: Certificate::new("loxodromic-obstruction") };
            w.scanned = verify_obstruction(data, &w)?;
            let c = &mut w.certificate;
            c.push("case", format!("{case:?}"));
            c.push("track", format!("{:?}", data.track));
            c.push("coords", format!("m* = {}, n* = {}, v* = {}", data.coords.m, data.coords.n, data.coords.v));
            c.push("eta", w.eta.describe());
            c.push("sigma", w.sigma.describe());
            c.push("order", w.order);
            c.push("verified", format!("{} exponents scanned, no trace +-2", w.scanned));
            return Ok(w);
        }
    }
    Err(CongruenceError::SearchExhausted { bound })
}

/// σ with ord σ(λ) divisible by `k` and the listed elements nonzero.
fn find_divisible_order(field: &NumberField, lambda: &NFElem, k: u64, nonzero: &[NFElem], bound: u64) -> Result<(ResidueMap, u64), CongruenceError> {
    for l in primes_between(2, bound) {
        let Ok(maps) = ResidueMap::all(field, l) else { continue };
        for map in maps {
            let Ok(img) = map.reduce(lambda) else { continue };
            let Some(ord) = map.codomain.order(&img) else { continue };
            if ord % k == 0 && ord <= 10_000_000 && nonzero.iter().all(|x| map.reduce(x).is_ok_and(|v| !v.is_empty())) {
                return Ok((map, ord));
            }
        }
    }
    Err(CongruenceError::SearchExhausted { bound })
}
