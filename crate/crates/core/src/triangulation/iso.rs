use std::collections::VecDeque;

use super::{IdealTriangulation, Perm4};
use crate::hypgeom::{cross_ratio, IdealPoint, ShapeParameter};

/// Cell `i` of the source maps to `cells[i]` with slot permutation `perms[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Isomorphism {
    pub cells: Vec<usize>,
    pub perms: Vec<Perm4>,
}

/// Shape of a cell after relabeling its slots by `sigma`.
pub fn relabel_shape(s: &ShapeParameter, sigma: &Perm4) -> ShapeParameter {
    let canon = [IdealPoint::Infinity, IdealPoint::finite(0.0, 0.0), IdealPoint::finite(1.0, 0.0), IdealPoint::Finite(s.z)];
    let inv = sigma.inverse();
    cross_ratio(canon[inv.apply(0)], canon[inv.apply(1)], canon[inv.apply(2)], canon[inv.apply(3)]).expect("distinct canonical points")
}

impl Isomorphism {
    /// Shapes of `b` equal the transported shapes of `a` within `tol`.
    pub fn shapes_agree(&self, a: &IdealTriangulation, b: &IdealTriangulation, tol: f64) -> bool {
        a.cells.iter().enumerate().all(|(i, c)| match (c.shape, b.cells[self.cells[i]].shape) {
            (Some(sa), Some(sb)) => (relabel_shape(&sa, &self.perms[i]).z - sb.z).norm() <= tol,
            (None, None) => true,
            _ => false,
        })
    }
}

fn extend(a: &IdealTriangulation, b: &IdealTriangulation, target: usize, sigma: Perm4) -> Option<Isomorphism> {
    let n = a.len();
    let mut cells = vec![usize::MAX; n];
    let mut perms = vec![Perm4::IDENTITY; n];
    let mut used = vec![false; n];
    cells[0] = target;
    perms[0] = sigma;
    used[target] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(c) = queue.pop_front() {
        let (tc, sc) = (cells[c], perms[c]);
        for f in 0..4 {
            match (a.cells[c].gluings[f], b.cells[tc].gluings[sc.apply(f)]) {
                (None, None) => {}
                (Some(ga), Some(gb)) => {
                    let s2 = gb.perm.compose(&sc).compose(&ga.perm.inverse());
                    if cells[ga.cell] == usize::MAX {
                        if used[gb.cell] {
                            return None;
                        }
                        cells[ga.cell] = gb.cell;
                        perms[ga.cell] = s2;
                        used[gb.cell] = true;
                        queue.push_back(ga.cell);
                    } else if cells[ga.cell] != gb.cell || perms[ga.cell] != s2 {
                        return None;
                    }
                }
                _ => return None,
            }
        }
    }
    if cells.contains(&usize::MAX) {
        return None;
    }
    Some(Isomorphism { cells, perms })
}

/// Combinatorial isomorphism of connected triangulations, if any.
pub fn find_isomorphism(a: &IdealTriangulation, b: &IdealTriangulation) -> Option<Isomorphism> {
    if a.len() != b.len() {
        return None;
    }
    if a.is_empty() {
        return Some(Isomorphism { cells: vec![], perms: vec![] });
    }
    for target in 0..b.len() {
        for sigma in Perm4::all() {
            if let Some(iso) = extend(a, b, target, sigma) {
                return Some(iso);
            }
        }
    }
    None
}

/// An isomorphism that also matches shapes, if any.
pub fn find_geometric_isomorphism(a: &IdealTriangulation, b: &IdealTriangulation, tol: f64) -> Option<Isomorphism> {
    if a.len() != b.len() || a.is_empty() {
        return find_isomorphism(a, b);
    }
    for target in 0..b.len() {
        for sigma in Perm4::all() {
            if let Some(iso) = extend(a, b, target, sigma) {
                if iso.shapes_agree(a, b, tol) {
                    return Some(iso);
                }
            }
        }
    }
    None
}
