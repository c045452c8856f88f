//! Polynomials over F_p, their factorization, and the fields F_p[x]/(h).

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

/// Polynomial over F_p, coefficients low to high, no trailing zeros.
pub type FpPoly = Vec<u64>;

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn powmod_u64(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, p);
        }
        b = mulmod(b, b, p);
        e >>= 1;
    }
    acc
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    powmod_u64(a, p - 2, p)
}

fn trim(mut v: FpPoly) -> FpPoly {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

pub fn degree(a: &[u64]) -> Option<usize> {
    a.len().checked_sub(1)
}

pub fn add(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let n = a.len().max(b.len());
    trim((0..n).map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % p).collect())
}

pub fn sub(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let n = a.len().max(b.len());
    trim((0..n).map(|i| (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p).collect())
}

pub fn mul(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mulmod(x, y, p)) % p;
        }
    }
    trim(out)
}

pub fn divrem(a: &[u64], b: &[u64], p: u64) -> (FpPoly, FpPoly) {
    let b = trim(b.to_vec());
    let inv_lead = inv_mod(*b.last().expect("nonzero divisor"), p);
    let mut r = trim(a.to_vec());
    if r.len() < b.len() {
        return (vec![], r);
    }
    let mut quo = vec![0u64; r.len() - b.len() + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let c = mulmod(*r.last().unwrap(), inv_lead, p);
        for (i, &bi) in b.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - mulmod(c, bi, p)) % p;
        }
        quo[shift] = c;
        r = trim(r);
    }
    (trim(quo), r)
}

pub fn rem(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    divrem(a, b, p).1
}

pub fn monic(a: &[u64], p: u64) -> FpPoly {
    match a.last() {
        None => vec![],
        Some(&l) => {
            let k = inv_mod(l, p);
            a.iter().map(|&c| mulmod(c, k, p)).collect()
        }
    }
}

pub fn gcd(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let (mut x, mut y) = (trim(a.to_vec()), trim(b.to_vec()));
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = std::mem::replace(&mut y, r);
    }
    monic(&x, p)
}

pub fn derivative(a: &[u64], p: u64) -> FpPoly {
    trim(a.iter().enumerate().skip(1).map(|(i, &c)| mulmod(c, i as u64 % p, p)).collect())
}

pub fn powmod(base: &[u64], e: &BigUint, m: &[u64], p: u64) -> FpPoly {
    let mut acc = rem(&[1], m, p);
    let b = rem(base, m, p);
    for i in (0..e.bits()).rev() {
        acc = rem(&mul(&acc, &acc, p), m, p);
        if e.bit(i) {
            acc = rem(&mul(&acc, &b, p), m, p);
        }
    }
    acc
}

/// Reduces integer coefficients modulo `p`.
pub fn from_i64(c: &[i64], p: u64) -> FpPoly {
    trim(c.iter().map(|&x| x.rem_euclid(p as i64) as u64).collect())
}

pub fn is_squarefree(f: &[u64], p: u64) -> bool {
    gcd(f, &derivative(f, p), p).len() == 1
}

/// Deterministic pseudo-random polynomials of degree below `n`.
struct PolyStream {
    state: u64,
}

impl PolyStream {
    fn next(&mut self, n: usize, p: u64) -> FpPoly {
        let mut v = Vec::with_capacity(n);
        for _ in 0..n {
            self.state ^= self.state << 13;
            self.state ^= self.state >> 7;
            self.state ^= self.state << 17;
            v.push(self.state % p);
        }
        trim(v)
    }
}

fn equal_degree(g: &[u64], k: usize, p: u64, rng: &mut PolyStream, out: &mut Vec<FpPoly>) {
    let n = g.len() - 1;
    if n == k {
        out.push(g.to_vec());
        return;
    }
    let big_e = (BigUint::from(p).pow(k as u32) - 1u32) / 2u32;
    loop {
        let a = rng.next(n, p);
        if a.len() < 2 {
            continue;
        }
        let b = if p == 2 {
            // trace from F_{2^k} to F_2
            let mut t = a.clone();
            let mut s = a.clone();
            for _ in 1..k {
                s = rem(&mul(&s, &s, p), g, p);
                t = add(&t, &s, p);
            }
            t
        } else {
            sub(&powmod(&a, &big_e, g, p), &[1], p)
        };
        let d = gcd(&b, g, p);
        if d.len() > 1 && d.len() < g.len() {
            let other = monic(&divrem(g, &d, p).0, p);
            equal_degree(&d, k, p, rng, out);
            equal_degree(&other, k, p, rng, out);
            return;
        }
    }
}

/// Monic irreducible factors of a squarefree polynomial over F_p, sorted;
/// `None` when `f` is not squarefree.
pub fn factor(f: &[u64], p: u64) -> Option<Vec<FpPoly>> {
    let f = monic(&trim(f.to_vec()), p);
    if f.len() <= 1 {
        return Some(vec![]);
    }
    if !is_squarefree(&f, p) {
        return None;
    }
    let mut out = Vec::new();
    let mut rng = PolyStream { state: 0x9e37_79b9_7f4a_7c15 ^ p };
    let x: FpPoly = vec![0, 1];
    let mut rest = f.clone();
    let mut h = x.clone();
    let mut i = 0;
    while rest.len() > 2 * (i + 1) {
        i += 1;
        h = powmod(&h, &BigUint::from(p), &rest, p);
        let g = gcd(&sub(&h, &x, p), &rest, p);
        if g.len() > 1 {
            equal_degree(&g, i, p, &mut rng, &mut out);
            rest = monic(&divrem(&rest, &g, p).0, p);
            h = rem(&h, &rest, p);
        }
    }
    if rest.len() > 1 {
        out.push(rest);
    }
    out.sort();
    Some(out)
}

pub fn is_irreducible(f: &[u64], p: u64) -> bool {
    factor(f, p).is_some_and(|v| v.len() == 1)
}

/// Prime factorization of a u64 by trial division and Pollard's rho.
pub fn factor_u64(n: u64) -> BTreeMap<u64, u32> {
    let mut out = BTreeMap::new();
    let mut n = n;
    for t in [2u64, 3, 5, 7, 11, 13] {
        while n.is_multiple_of(t) && n > 1 {
            *out.entry(t).or_default() += 1;
            n /= t;
        }
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime_u64(m) {
            *out.entry(m).or_default() += 1;
            continue;
        }
        let d = rho(m);
        stack.push(d);
        stack.push(m / d);
    }
    out
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn rho(n: u64) -> u64 {
    for c in 1u64.. {
        let f = |x: u64| (mulmod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = num_integer::gcd(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
    }
    unreachable!()
}

/// Element of F_p[x]/(h), as a reduced polynomial.
pub type FfElem = FpPoly;

/// The finite field F_p[x]/(h) for a monic irreducible `h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteField {
    p: u64,
    modulus: FpPoly,
}

impl FiniteField {
    pub fn new(p: u64, modulus: FpPoly) -> Option<Self> {
        (is_prime_u64(p) && modulus.last() == Some(&1) && is_irreducible(&modulus, p)).then_some(FiniteField { p, modulus })
    }

    /// F_q with modulus the least irreducible monic polynomial of degree e in
    /// lexicographic order of coefficients.
    pub fn of_order(q: u64) -> Option<Self> {
        let f = factor_u64(q);
        if f.len() != 1 {
            return None;
        }
        let (&p, &e) = f.iter().next().unwrap();
        let e = e as usize;
        let count = p.checked_pow(e as u32)?;
        for code in 0..count {
            let mut m: FpPoly = (0..e).map(|k| (code / p.pow(k as u32)) % p).collect();
            m.push(1);
            if is_irreducible(&m, p) {
                return Some(FiniteField { p, modulus: m });
            }
        }
        None
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn size(&self) -> BigUint {
        BigUint::from(self.p).pow(self.degree() as u32)
    }

    pub fn elem(&self, a: &[u64]) -> FfElem {
        rem(&a.iter().map(|c| c % self.p).collect::<Vec<_>>(), &self.modulus, self.p)
    }

    pub fn int(&self, n: i64) -> FfElem {
        trim(vec![n.rem_euclid(self.p as i64) as u64])
    }

    pub fn zero(&self) -> FfElem {
        vec![]
    }

    pub fn one(&self) -> FfElem {
        vec![1]
    }

    pub fn add(&self, a: &FfElem, b: &FfElem) -> FfElem {
        add(a, b, self.p)
    }

    pub fn sub(&self, a: &FfElem, b: &FfElem) -> FfElem {
        sub(a, b, self.p)
    }

    pub fn neg(&self, a: &FfElem) -> FfElem {
        sub(&[], a, self.p)
    }

    pub fn mul(&self, a: &FfElem, b: &FfElem) -> FfElem {
        rem(&mul(a, b, self.p), &self.modulus, self.p)
    }

    pub fn pow(&self, a: &FfElem, e: &BigUint) -> FfElem {
        powmod(a, e, &self.modulus, self.p)
    }

    pub fn pow_i64(&self, a: &FfElem, e: i64) -> Option<FfElem> {
        let b = if e < 0 { self.inv(a)? } else { a.clone() };
        Some(self.pow(&b, &BigUint::from(e.unsigned_abs())))
    }

    pub fn inv(&self, a: &FfElem) -> Option<FfElem> {
        if a.is_empty() {
            return None;
        }
        Some(self.pow(a, &(self.size() - 2u32)))
    }

    /// Element lies in the prime subfield F_p.
    pub fn in_prime_field(&self, a: &FfElem) -> bool {
        a.len() <= 1
    }

    /// `a` has multiplicative order exactly `q`.
    pub fn has_order(&self, a: &FfElem, q: u64) -> bool {
        if a.is_empty() || q == 0 || self.pow(a, &BigUint::from(q)) != self.one() {
            return false;
        }
        factor_u64(q).keys().all(|&t| self.pow(a, &BigUint::from(q / t)) != self.one())
    }

    /// Multiplicative order, when |F|−1 fits in a u64.
    pub fn order(&self, a: &FfElem) -> Option<u64> {
        if a.is_empty() {
            return None;
        }
        let n = (self.size() - 1u32).to_u64()?;
        let mut ord = n;
        for (t, k) in factor_u64(n) {
            for _ in 0..k {
                if self.pow(a, &BigUint::from(ord / t)) == self.one() {
                    ord /= t;
                } else {
                    break;
                }
            }
        }
        Some(ord)
    }

    /// All elements, for small fields.
    pub fn elements(&self) -> Vec<FfElem> {
        let size = self.size().to_u64().expect("small field");
        let e = self.degree();
        (0..size).map(|code| trim((0..e).map(|k| (code / self.p.pow(k as u32)) % self.p).collect())).collect()
    }

    pub fn format(&self, a: &FfElem) -> String {
        if a.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = a
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(k, &c)| match k {
                0 => c.to_string(),
                1 if c == 1 => "t".into(),
                1 => format!("{c}t"),
                _ if c == 1 => format!("t^{k}"),
                _ => format!("{c}t^{k}"),
            })
            .collect();
        parts.join(" + ")
    }
}

pub fn format_fp_poly(a: &[u64]) -> String {
    if a.is_empty() {
        return "0".into();
    }
    let parts: Vec<String> = a
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &c)| c != 0)
        .map(|(k, &c)| match k {
            0 => c.to_string(),
            1 if c == 1 => "x".into(),
            1 => format!("{c}x"),
            _ if c == 1 => format!("x^{k}"),
            _ => format!("{c}x^{k}"),
        })
        .collect();
    parts.join(" + ")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn expand(fs: &[FpPoly], p: u64) -> FpPoly {
        fs.iter().fold(vec![1], |acc, f| mul(&acc, f, p))
    }

    #[test]
    fn factor_products() {
        // x^8 - 1 over F_17 splits into linear factors
        let mut f = vec![16u64];
        f.extend([0; 7]);
        f.push(1);
        let fs = factor(&f, 17).unwrap();
        assert_eq!(fs.len(), 8);
        assert_eq!(expand(&fs, 17), f);
        // x^4 + 1 over F_3: two quadratics
        let fs = factor(&[1, 0, 0, 0, 1], 3).unwrap();
        assert_eq!(fs.iter().map(|f| f.len() - 1).collect::<Vec<_>>(), vec![2, 2]);
        // over F_2 x^4 + 1 = (x+1)^4 is not squarefree
        assert!(factor(&[1, 0, 0, 0, 1], 2).is_none());
        let fs = factor(&[1, 1, 0, 1, 1, 0, 1], 2).unwrap();
        assert_eq!(expand(&fs, 2), vec![1, 1, 0, 1, 1, 0, 1]);
    }

    #[test]
    fn u64_factorization() {
        let n = 600_851_475_143u64;
        let f = factor_u64(n);
        assert_eq!(f.iter().map(|(p, k)| p.pow(*k)).product::<u64>(), n);
        assert!(f.keys().all(|&p| is_prime_u64(p)));
        assert!(is_prime_u64(1_000_000_007) && !is_prime_u64(1_000_000_007 * 3));
    }

    #[test]
    fn small_fields() {
        let f9 = FiniteField::of_order(9).unwrap();
        assert_eq!(f9.modulus(), &[1, 0, 1]);
        assert_eq!(f9.elements().len(), 9);
        let f8 = FiniteField::of_order(8).unwrap();
        for a in f8.elements().into_iter().skip(1) {
            assert_eq!(f8.mul(&a, &f8.inv(&a).unwrap()), f8.one());
            assert_eq!(7 % f8.order(&a).unwrap(), 0);
        }
        assert!(FiniteField::of_order(12).is_none());
    }
}
