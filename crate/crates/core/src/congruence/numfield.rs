use num_bigint::BigInt;
use num_complex::Complex64 as C64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::CongruenceError;

pub type Q = BigRational;

pub const MAX_DEGREE: usize = 8;

fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

fn trim(mut v: Vec<Q>) -> Vec<Q> {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

/// Remainder and quotient of `a` by `b` over ℚ (coefficients low to high).
fn divrem(a: &[Q], b: &[Q]) -> (Vec<Q>, Vec<Q>) {
    let b = trim(b.to_vec());
    let mut r = trim(a.to_vec());
    if r.len() < b.len() {
        return (vec![], r);
    }
    let lead = b.last().expect("nonzero divisor").clone();
    let mut quo = vec![Q::zero(); r.len() - b.len() + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let c = r.last().unwrap() / &lead;
        for (i, bi) in b.iter().enumerate() {
            r[shift + i] -= &c * bi;
        }
        quo[shift] = c;
        r = trim(r);
    }
    (trim(quo), r)
}

fn mul(a: &[Q], b: &[Q]) -> Vec<Q> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Q::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn sub(a: &[Q], b: &[Q]) -> Vec<Q> {
    let n = a.len().max(b.len());
    trim((0..n).map(|i| a.get(i).cloned().unwrap_or_else(Q::zero) - b.get(i).cloned().unwrap_or_else(Q::zero)).collect())
}

/// Parses a polynomial in `var` with rational coefficients, e.g. `x^3 - 2x + 1/2`.
pub fn parse_poly(s: &str, var: char) -> Result<Vec<Q>, CongruenceError> {
    let bad = |m: &str| CongruenceError::Parse(format!("`{s}`: {m}"));
    let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if text.is_empty() {
        return Err(bad("empty polynomial"));
    }
    let mut terms = Vec::new();
    let mut start = 0;
    let chars: Vec<char> = text.chars().collect();
    for i in 1..chars.len() {
        if (chars[i] == '+' || chars[i] == '-') && chars[i - 1] != '^' {
            terms.push(chars[start..i].iter().collect::<String>());
            start = i;
        }
    }
    terms.push(chars[start..].iter().collect::<String>());
    let mut out: Vec<Q> = Vec::new();
    for term in terms {
        let (sign, body) = match term.strip_prefix('-') {
            Some(b) => (-1, b.to_string()),
            None => (1, term.strip_prefix('+').unwrap_or(&term).to_string()),
        };
        if body.is_empty() {
            return Err(bad("dangling sign"));
        }
        let (coef, exp) = match body.find(var) {
            Some(k) => {
                let c = body[..k].trim_end_matches('*');
                let rest = &body[k + var.len_utf8()..];
                let e: usize = if rest.is_empty() { 1 } else { rest.strip_prefix('^').and_then(|x| x.parse().ok()).ok_or_else(|| bad("bad exponent"))? };
                (if c.is_empty() { q(1) } else { parse_rational(c).ok_or_else(|| bad("bad coefficient"))? }, e)
            }
            None => (parse_rational(&body).ok_or_else(|| bad("bad constant"))?, 0),
        };
        if out.len() <= exp {
            out.resize(exp + 1, Q::zero());
        }
        out[exp] += coef * q(sign);
    }
    Ok(trim(out))
}

pub fn parse_rational(s: &str) -> Option<Q> {
    match s.split_once('/') {
        Some((a, b)) => {
            let (a, b): (BigInt, BigInt) = (a.parse().ok()?, b.parse().ok()?);
            (!b.is_zero()).then(|| Q::new(a, b))
        }
        None => s.parse::<BigInt>().ok().map(Q::from_integer),
    }
}

pub fn format_poly(c: &[Q], var: char) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (k, x) in c.iter().enumerate().rev() {
        if x.is_zero() {
            continue;
        }
        let mag = x.abs();
        let body = match (k, mag.is_one()) {
            (0, _) => mag.to_string(),
            (1, true) => var.to_string(),
            (1, false) => format!("{mag}*{var}"),
            (_, true) => format!("{var}^{k}"),
            (_, false) => format!("{mag}*{var}^{k}"),
        };
        let sign = if x.is_negative() { "-" } else { "+" };
        if parts.is_empty() {
            parts.push(if x.is_negative() { format!("-{body}") } else { body });
        } else {
            parts.push(format!("{sign} {body}"));
        }
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" ")
    }
}

/// Complex roots of a real polynomial (coefficients low to high) by the
/// Aberth iteration followed by Newton polishing.
pub fn complex_roots(c: &[f64]) -> Vec<C64> {
    let n = c.len() - 1;
    let lead = c[n];
    let a: Vec<f64> = c.iter().map(|x| x / lead).collect();
    let eval = |z: C64| -> (C64, C64) {
        let mut p = C64::new(0.0, 0.0);
        let mut dp = C64::new(0.0, 0.0);
        for &k in a.iter().rev() {
            dp = dp * z + p;
            p = p * z + k;
        }
        (p, dp)
    };
    let bound = 1.0 + a[..n].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut z: Vec<C64> = (0..n).map(|k| C64::from_polar(0.5 * bound, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4)).collect();
    for _ in 0..500 {
        let mut moved: f64 = 0.0;
        for i in 0..n {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: C64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let w = ratio / (1.0 - ratio * s);
            z[i] -= w;
            moved = moved.max(w.norm() / (1.0 + z[i].norm()));
        }
        if moved < 1e-15 {
            break;
        }
    }
    for r in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = eval(*r);
            if dp.norm() > 0.0 {
                *r -= p / dp;
            }
        }
    }
    z
}

/// Monic integer polynomial `D^d f(x/D)` with the same splitting behaviour as monic `f`.
fn integral_model(f: &[Q]) -> Vec<BigInt> {
    let d = f.len() - 1;
    let den = f.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    (0..=d).map(|i| (&f[i] * Q::from_integer(num_traits::pow(den.clone(), d - i))).to_integer()).collect()
}

/// A proper monic factor of `f`, if one exists. Candidate factors are
/// products of numerically computed roots whose coefficients round to
/// integers; each candidate is confirmed by exact division.
pub fn find_factor(f: &[Q]) -> Option<Vec<Q>> {
    let d = f.len() - 1;
    if d <= 1 {
        return None;
    }
    let g = integral_model(f);
    let gq: Vec<Q> = g.iter().cloned().map(Q::from_integer).collect();
    let roots = complex_roots(&g.iter().map(|x| x.to_f64().unwrap()).collect::<Vec<_>>());
    for mask in 1u32..(1 << d) {
        let k = mask.count_ones() as usize;
        if k > d / 2 {
            continue;
        }
        let mut prod = vec![C64::new(1.0, 0.0)];
        for (i, r) in roots.iter().enumerate() {
            if mask & (1 << i) != 0 {
                let mut next = vec![C64::new(0.0, 0.0); prod.len() + 1];
                for (j, c) in prod.iter().enumerate() {
                    next[j + 1] += c;
                    next[j] -= c * r;
                }
                prod = next;
            }
        }
        let near = prod.iter().all(|c| c.im.abs() < 1e-6 * (1.0 + c.re.abs()) && (c.re - c.re.round()).abs() < 1e-6 * (1.0 + c.re.abs()));
        if !near {
            continue;
        }
        let h: Vec<Q> = prod.iter().map(|c| q(c.re.round() as i64)).collect();
        if divrem(&gq, &h).1.is_empty() {
            // undo the scaling x ↦ D x
            let den = f.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
            let dq = Q::from_integer(den);
            let hk = h.len() - 1;
            let scaled: Vec<Q> = h.iter().enumerate().map(|(i, c)| c / num_traits::pow(dq.clone(), hk - i)).collect();
            return Some(scaled);
        }
    }
    None
}

/// Element of a number field in the power basis `1, a, …, a^{d−1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NFElem {
    pub coeffs: Vec<Q>,
}

/// ℚ(a) with `a` a root of a monic irreducible polynomial of degree ≤ 8.
#[derive(Clone, Debug)]
pub struct NumberField {
    minpoly: Vec<Q>,
    embeddings: Vec<C64>,
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        self.minpoly == other.minpoly
    }
}

impl NumberField {
    pub fn new(minpoly: Vec<Q>) -> Result<Self, CongruenceError> {
        let f = trim(minpoly);
        if f.len() < 2 {
            return Err(CongruenceError::InvalidPolynomial("degree must be at least 1".into()));
        }
        if !f.last().unwrap().is_one() {
            return Err(CongruenceError::InvalidPolynomial("minimal polynomial must be monic".into()));
        }
        let d = f.len() - 1;
        if d > MAX_DEGREE {
            return Err(CongruenceError::DegreeTooLarge(d));
        }
        if let Some(h) = find_factor(&f) {
            return Err(CongruenceError::Reducible(format_poly(&h, 'x')));
        }
        let embeddings = complex_roots(&f.iter().map(|c| c.to_f64().unwrap()).collect::<Vec<_>>());
        Ok(NumberField { minpoly: f, embeddings })
    }

    pub fn parse(s: &str) -> Result<Self, CongruenceError> {
        NumberField::new(parse_poly(s, 'x')?)
    }

    pub fn rationals() -> Self {
        NumberField::new(vec![q(0), q(1)]).expect("x is irreducible")
    }

    /// ℚ(i).
    pub fn gaussian() -> Self {
        NumberField::new(vec![q(1), q(0), q(1)]).expect("x^2 + 1 is irreducible")
    }

    pub fn degree(&self) -> usize {
        self.minpoly.len() - 1
    }

    pub fn minpoly(&self) -> &[Q] {
        &self.minpoly
    }

    pub fn embeddings(&self) -> &[C64] {
        &self.embeddings
    }

    fn reduce_poly(&self, p: Vec<Q>) -> NFElem {
        let mut r = divrem(&p, &self.minpoly).1;
        r.resize(self.degree(), Q::zero());
        NFElem { coeffs: r }
    }

    pub fn elem(&self, coeffs: Vec<Q>) -> Result<NFElem, CongruenceError> {
        if coeffs.len() > self.degree() {
            return Err(CongruenceError::LengthMismatch { expected: self.degree(), got: coeffs.len() });
        }
        Ok(self.reduce_poly(coeffs))
    }

    pub fn rational(&self, x: Q) -> NFElem {
        self.reduce_poly(vec![x])
    }

    pub fn int(&self, n: i64) -> NFElem {
        self.rational(q(n))
    }

    pub fn zero(&self) -> NFElem {
        self.int(0)
    }

    pub fn one(&self) -> NFElem {
        self.int(1)
    }

    /// The generator `a`.
    pub fn gen(&self) -> NFElem {
        self.reduce_poly(vec![q(0), q(1)])
    }

    /// Parses a polynomial in `a`, reduced modulo the minimal polynomial.
    pub fn parse_elem(&self, s: &str) -> Result<NFElem, CongruenceError> {
        Ok(self.reduce_poly(parse_poly(s, 'a')?))
    }

    pub fn format_elem(&self, x: &NFElem) -> String {
        format_poly(&trim(x.coeffs.clone()), 'a')
    }

    pub fn add(&self, x: &NFElem, y: &NFElem) -> NFElem {
        NFElem { coeffs: x.coeffs.iter().zip(&y.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, x: &NFElem, y: &NFElem) -> NFElem {
        NFElem { coeffs: x.coeffs.iter().zip(&y.coeffs).map(|(a, b)| a - b).collect() }
    }

    pub fn neg(&self, x: &NFElem) -> NFElem {
        NFElem { coeffs: x.coeffs.iter().map(|a| -a).collect() }
    }

    pub fn mul(&self, x: &NFElem, y: &NFElem) -> NFElem {
        self.reduce_poly(mul(&x.coeffs, &y.coeffs))
    }

    pub fn scale(&self, x: &NFElem, c: &Q) -> NFElem {
        NFElem { coeffs: x.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn is_zero(&self, x: &NFElem) -> bool {
        x.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_rational(&self, x: &NFElem) -> bool {
        x.coeffs.iter().skip(1).all(Zero::is_zero)
    }

    pub fn inv(&self, x: &NFElem) -> Result<NFElem, CongruenceError> {
        // extended Euclid: s·x + t·f = g with g a nonzero constant
        let (mut r0, mut r1) = (self.minpoly.clone(), trim(x.coeffs.clone()));
        if r1.is_empty() {
            return Err(CongruenceError::ZeroDivision);
        }
        let (mut s0, mut s1): (Vec<Q>, Vec<Q>) = (vec![], vec![q(1)]);
        while r1.len() > 1 {
            let (quo, rem) = divrem(&r0, &r1);
            let s2 = sub(&s0, &mul(&quo, &s1));
            r0 = std::mem::replace(&mut r1, rem);
            s0 = std::mem::replace(&mut s1, s2);
            if r1.is_empty() {
                return Err(CongruenceError::ZeroDivision);
            }
        }
        let c = r1[0].clone();
        Ok(self.reduce_poly(s1.iter().map(|a| a / &c).collect()))
    }

    pub fn div(&self, x: &NFElem, y: &NFElem) -> Result<NFElem, CongruenceError> {
        Ok(self.mul(x, &self.inv(y)?))
    }

    pub fn pow(&self, x: &NFElem, e: i64) -> Result<NFElem, CongruenceError> {
        let base = if e < 0 { self.inv(x)? } else { x.clone() };
        let mut acc = self.one();
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            k >>= 1;
        }
        Ok(acc)
    }

    /// Images of `x` under every complex embedding.
    pub fn embed(&self, x: &NFElem) -> Vec<C64> {
        self.embeddings
            .iter()
            .map(|&r| x.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * r + c.to_f64().unwrap()))
            .collect()
    }

    /// Roots of unity in a field of degree ≤ 8 have order ≤ 30.
    pub fn is_root_of_unity(&self, x: &NFElem) -> bool {
        let one = self.one();
        let mut y = x.clone();
        for _ in 1..=60 {
            if y == one {
                return true;
            }
            y = self.mul(&y, x);
        }
        false
    }

    /// Least common multiple of the coordinate denominators.
    pub fn denominator(&self, x: &NFElem) -> BigInt {
        x.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        let p = parse_poly("x^3 - 2x + 1/2", 'x').unwrap();
        assert_eq!(p, vec![Q::new(1.into(), 2.into()), q(-2), q(0), q(1)]);
        assert_eq!(parse_poly(&format_poly(&p, 'x'), 'x').unwrap(), p);
        assert!(parse_poly("x^", 'x').is_err());
    }

    #[test]
    fn field_inverse() {
        let k = NumberField::parse("x^3 - x - 1").unwrap();
        let y = k.parse_elem("2 + a - 3a^2").unwrap();
        assert_eq!(k.mul(&y, &k.inv(&y).unwrap()), k.one());
    }

    #[test]
    fn reducible_detected() {
        assert!(matches!(NumberField::parse("x^4 + 4"), Err(CongruenceError::Reducible(_))));
        assert!(matches!(NumberField::parse("x^2 - 1/4"), Err(CongruenceError::Reducible(_))));
        assert!(NumberField::parse("x^4 + 1").is_ok());
    }
}
