//! SL(2, F_q) by enumeration.

use super::fp::{FfElem, FiniteField};
use super::CongruenceError;

/// Row-major `[a, b, c, d]`.
pub type Mat2 = [FfElem; 4];

pub fn mat_mul(f: &FiniteField, x: &Mat2, y: &Mat2) -> Mat2 {
    let e = |a: &FfElem, b: &FfElem, c: &FfElem, d: &FfElem| f.add(&f.mul(a, b), &f.mul(c, d));
    [e(&x[0], &y[0], &x[1], &y[2]), e(&x[0], &y[1], &x[1], &y[3]), e(&x[2], &y[0], &x[3], &y[2]), e(&x[2], &y[1], &x[3], &y[3])]
}

pub fn det(f: &FiniteField, x: &Mat2) -> FfElem {
    f.sub(&f.mul(&x[0], &x[3]), &f.mul(&x[1], &x[2]))
}

pub fn trace(f: &FiniteField, x: &Mat2) -> FfElem {
    f.add(&x[0], &x[3])
}

/// Inverse of a determinant-one matrix.
pub fn inverse(f: &FiniteField, x: &Mat2) -> Mat2 {
    [x[3].clone(), f.neg(&x[1]), f.neg(&x[2]), x[0].clone()]
}

pub fn is_unimodular(f: &FiniteField, x: &Mat2) -> bool {
    det(f, x) == f.one()
}

/// Every element of SL(2, F).
pub fn elements(f: &FiniteField) -> Vec<Mat2> {
    let all = f.elements();
    let mut out = Vec::new();
    for a in &all {
        for b in &all {
            for c in &all {
                for d in &all {
                    let m = [a.clone(), b.clone(), c.clone(), d.clone()];
                    if is_unimodular(f, &m) {
                        out.push(m);
                    }
                }
            }
        }
    }
    out
}

/// Distinct traces certify non-conjugacy; equal traces are inconclusive.
pub fn sl2_trace_separation(f: &FiniteField, x: &Mat2, y: &Mat2) -> Result<bool, CongruenceError> {
    if !is_unimodular(f, x) || !is_unimodular(f, y) {
        return Err(CongruenceError::NonUnimodular);
    }
    Ok(trace(f, x) != trace(f, y))
}

/// Exhaustive conjugacy test over all conjugators in SL(2, F).
pub fn are_conjugate(f: &FiniteField, group: &[Mat2], x: &Mat2, y: &Mat2) -> bool {
    group.iter().any(|g| mat_mul(f, &mat_mul(f, g, x), &inverse(f, g)) == *y)
}

/// Conjugacy classes of SL(2, F), each as indices into `group`.
pub fn conjugacy_classes(f: &FiniteField, group: &[Mat2]) -> Vec<Vec<usize>> {
    let index: std::collections::HashMap<&Mat2, usize> = group.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut class = vec![usize::MAX; group.len()];
    let mut out: Vec<Vec<usize>> = Vec::new();
    for i in 0..group.len() {
        if class[i] != usize::MAX {
            continue;
        }
        let mut members: Vec<usize> = group.iter().map(|g| index[&mat_mul(f, &mat_mul(f, g, &group[i]), &inverse(f, g))]).collect();
        members.sort_unstable();
        members.dedup();
        for &m in &members {
            class[m] = out.len();
        }
        out.push(members);
    }
    out
}
