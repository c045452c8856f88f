//! Pachner 2–3, 3–2 and 4–4 moves.
//!
//! Every move is a retriangulation of a small region. The region's vertices get
//! local labels; new cells are label tuples obtained from an old cell by
//! replacing one vertex, which keeps orientations positive.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use super::{edge_index, edge_parameter, face_slots, Cell, IdealTriangulation, Perm4, TriangulationError};
use crate::hypgeom::{cross_ratio, place_fourth, IdealPoint, ShapeParameter, DEFAULT_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PachnerSite {
    /// Face shared by two distinct cells (2–3).
    Face { cell: usize, face: usize },
    /// Valence-3 edge given by two slots of a cell (3–2).
    Edge { cell: usize, edge: (usize, usize) },
    /// Valence-4 edge; `diagonal` 0 joins link vertices y0, y2 and 1 joins y1, y3 (4–4).
    Octahedron { cell: usize, edge: (usize, usize), diagonal: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MoveOptions {
    /// Topological move only; new cells carry no shapes.
    pub force: bool,
    pub tol: f64,
}

impl Default for MoveOptions {
    fn default() -> Self {
        MoveOptions { force: false, tol: DEFAULT_TOL }
    }
}

/// One cell in the star of an edge `pq`: slots of `p`, `q` and of the link
/// vertices `y_k`, `y_{k+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StarEntry {
    pub cell: usize,
    pub p: usize,
    pub q: usize,
    pub y: usize,
    pub y_next: usize,
}

/// Walks around the edge `(i, j)` of `cell`, crossing the face opposite `y` each step.
pub fn edge_star(t: &IdealTriangulation, cell: usize, edge: (usize, usize)) -> Result<Vec<StarEntry>, TriangulationError> {
    let (i, j) = edge;
    if cell >= t.len() {
        return Err(TriangulationError::NoSuchCell(cell));
    }
    if i == j || i > 3 || j > 3 {
        return Err(TriangulationError::BadSite);
    }
    let rest: Vec<usize> = (0..4).filter(|&s| s != i && s != j).collect();
    let first = StarEntry { cell, p: i, q: j, y: rest[0], y_next: rest[1] };
    let mut star = vec![first];
    let cap = 6 * t.len() + 6;
    loop {
        let cur = *star.last().unwrap();
        let g = t.cells[cur.cell].gluings[cur.y].ok_or(TriangulationError::BoundaryEdge)?;
        let next = StarEntry { cell: g.cell, p: g.perm.apply(cur.p), q: g.perm.apply(cur.q), y: g.perm.apply(cur.y_next), y_next: g.face };
        if next == first {
            return Ok(star);
        }
        if star.len() >= cap {
            return Err(TriangulationError::BadSite);
        }
        star.push(next);
    }
}

struct Region {
    /// Old cell and the local label at each of its slots.
    old: Vec<(usize, [u8; 4])>,
    /// Old `(region index, face)` pairs interior to the region.
    internal: Vec<(usize, usize)>,
    new_cells: Vec<[u8; 4]>,
}

fn sorted_triple(labels: &[u8; 4], f: usize) -> [u8; 3] {
    let s = face_slots(f);
    let mut tr = [labels[s[0]], labels[s[1]], labels[s[2]]];
    tr.sort_unstable();
    tr
}

fn slot_of(labels: &[u8; 4], l: u8) -> usize {
    labels.iter().position(|&x| x == l).expect("label present")
}

fn retriangulate(t: &IdealTriangulation, region: &Region, positions: Option<&BTreeMap<u8, IdealPoint>>) -> Result<IdealTriangulation, TriangulationError> {
    let removed: Vec<usize> = region.old.iter().map(|o| o.0).collect();
    let mut vertex_of: BTreeMap<u8, u32> = BTreeMap::new();
    for &(c, labels) in &region.old {
        for s in 0..4 {
            vertex_of.insert(labels[s], t.cells[c].vertices[s]);
        }
    }
    // renumber kept cells
    let mut new_index = vec![usize::MAX; t.len()];
    let mut kept = Vec::new();
    for i in 0..t.len() {
        if !removed.contains(&i) {
            new_index[i] = kept.len();
            kept.push(i);
        }
    }
    let base = kept.len();
    let mut out = IdealTriangulation { cells: Vec::with_capacity(base + region.new_cells.len()), cusp_labels: t.cusp_labels.clone() };
    for &i in &kept {
        let mut c = t.cells[i].clone();
        for g in c.gluings.iter_mut() {
            if let Some(gl) = g {
                if new_index[gl.cell] == usize::MAX {
                    *g = None;
                } else {
                    gl.cell = new_index[gl.cell];
                }
            }
        }
        out.cells.push(c);
    }
    for labels in &region.new_cells {
        let vertices = labels.map(|l| vertex_of[&l]);
        let shape = match positions {
            Some(pos) => Some(cross_ratio(pos[&labels[0]], pos[&labels[1]], pos[&labels[2]], pos[&labels[3]])?),
            None => None,
        };
        out.cells.push(Cell::new(vertices, shape));
    }
    // faces of new cells, grouped by label triple
    let mut by_triple: BTreeMap<[u8; 3], Vec<(usize, usize)>> = BTreeMap::new();
    for (k, labels) in region.new_cells.iter().enumerate() {
        for f in 0..4 {
            by_triple.entry(sorted_triple(labels, f)).or_default().push((k, f));
        }
    }
    let mut outer_new: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
    for (r, (_, labels)) in region.old.iter().enumerate() {
        for f in 0..4 {
            if region.internal.contains(&(r, f)) {
                continue;
            }
            let tr = sorted_triple(labels, f);
            match by_triple.get(&tr).map(|v| v.as_slice()) {
                Some([nf]) => {
                    outer_new.insert((r, f), *nf);
                }
                _ => return Err(TriangulationError::BadSite),
            }
        }
    }
    for faces in by_triple.values() {
        match faces.as_slice() {
            [(k1, f1), (k2, f2)] => {
                let (l1, l2) = (&region.new_cells[*k1], &region.new_cells[*k2]);
                let mut perm = [0u8; 4];
                for s in 0..4 {
                    perm[s] = if s == *f1 { *f2 as u8 } else { slot_of(l2, l1[s]) as u8 };
                }
                out.glue(base + k1, *f1, base + k2, Perm4(perm));
            }
            [_] => {}
            _ => return Err(TriangulationError::BadSite),
        }
    }
    for (&(r, f), &(k, nf)) in &outer_new {
        let (oc, ref olabels) = region.old[r];
        let Some(g) = t.cells[oc].gluings[f] else { continue };
        let nlabels = &region.new_cells[k];
        // new slot -> old slot -> partner slot
        let to_partner = |s: usize| -> usize { g.perm.apply(slot_of(olabels, nlabels[s])) };
        if let Some(r2) = removed.iter().position(|&x| x == g.cell) {
            let &(k2, nf2) = outer_new.get(&(r2, g.face)).ok_or(TriangulationError::BadSite)?;
            let (l2, n2) = (&region.old[r2].1, &region.new_cells[k2]);
            let mut perm = [0u8; 4];
            for s in 0..4 {
                perm[s] = if s == nf { nf2 as u8 } else { slot_of(n2, l2[to_partner(s)]) as u8 };
            }
            out.glue(base + k, nf, base + k2, Perm4(perm));
        } else {
            let mut perm = [0u8; 4];
            for s in 0..4 {
                perm[s] = if s == nf { g.face as u8 } else { to_partner(s) as u8 };
            }
            out.glue(base + k, nf, new_index[g.cell], Perm4(perm));
        }
    }
    Ok(out)
}

fn canonical_positions(z: C64) -> [IdealPoint; 4] {
    [IdealPoint::Infinity, IdealPoint::finite(0.0, 0.0), IdealPoint::finite(1.0, 0.0), IdealPoint::Finite(z)]
}

fn angle(shape: &ShapeParameter, i: usize, j: usize) -> f64 {
    edge_parameter(shape, edge_index(i, j)).arg()
}

fn geometric(t: &IdealTriangulation, opts: &MoveOptions) -> bool {
    !opts.force && t.has_shapes()
}

fn check_new_cells(out: &IdealTriangulation, count: usize, tol: f64) -> bool {
    out.cells[out.len() - count..].iter().all(|c| match c.shape {
        Some(s) => s.angles().map(|a| a.min() > tol).unwrap_or(false),
        None => false,
    })
}

pub fn pachner_23(t: &IdealTriangulation, site: PachnerSite, opts: &MoveOptions) -> Result<IdealTriangulation, TriangulationError> {
    let PachnerSite::Face { cell: a, face: f } = site else { return Err(TriangulationError::BadSite) };
    if a >= t.len() || f > 3 {
        return Err(TriangulationError::BadSite);
    }
    let g = t.cells[a].gluings[f].ok_or(TriangulationError::BadSite)?;
    let b = g.cell;
    if b == a {
        return Err(TriangulationError::SameCell(a));
    }
    let fs = face_slots(f);
    let mut la = [0u8; 4];
    let mut lb = [0u8; 4];
    la[f] = 0;
    lb[g.face] = 1;
    for (k, &s) in fs.iter().enumerate() {
        la[s] = 2 + k as u8;
        lb[g.perm.apply(s)] = 2 + k as u8;
    }
    let new_cells: Vec<[u8; 4]> = (2..5u8).map(|x| la.map(|l| if l == x { 1 } else { l })).collect();
    let region = Region { old: vec![(a, la), (b, lb)], internal: vec![(0, f), (1, g.face)], new_cells };
    if !geometric(t, opts) {
        let mut out = retriangulate(t, &region, None)?;
        if opts.force {
            out.strip_shapes();
        }
        return Ok(out);
    }
    let (sa, sb) = (t.cells[a].shape.unwrap(), t.cells[b].shape.unwrap());
    if !sa.is_geometric() || !sb.is_geometric() {
        return Err(TriangulationError::NotConvex);
    }
    for x in 0..3 {
        for y in (x + 1)..3 {
            let (i, j) = (fs[x], fs[y]);
            if angle(&sa, i, j) + angle(&sb, g.perm.apply(i), g.perm.apply(j)) >= PI - opts.tol {
                return Err(TriangulationError::NotConvex);
            }
        }
    }
    let canon = canonical_positions(sa.z);
    let mut pos = BTreeMap::new();
    for s in 0..4 {
        pos.insert(la[s], canon[s]);
    }
    let known = fs.map(|s| (g.perm.apply(s), canon[s]));
    pos.insert(1, place_fourth(sb.z, known)?);
    let out = retriangulate(t, &region, Some(&pos))?;
    if !check_new_cells(&out, 3, opts.tol) {
        return Err(TriangulationError::NotConvex);
    }
    Ok(out)
}

fn star_positions(t: &IdealTriangulation, star: &[StarEntry], labels: &[[u8; 4]]) -> Result<BTreeMap<u8, IdealPoint>, TriangulationError> {
    let s0 = t.cells[star[0].cell].shape.ok_or(TriangulationError::MissingShapes(star[0].cell))?;
    let canon = canonical_positions(s0.z);
    let mut pos = BTreeMap::new();
    for s in 0..4 {
        pos.insert(labels[0][s], canon[s]);
    }
    for (k, e) in star.iter().enumerate().skip(1) {
        let l = &labels[k];
        if pos.contains_key(&l[e.y_next]) {
            continue;
        }
        let sh = t.cells[e.cell].shape.ok_or(TriangulationError::MissingShapes(e.cell))?;
        let known = [e.p, e.q, e.y].map(|s| (s, pos[&l[s]]));
        pos.insert(l[e.y_next], place_fourth(sh.z, known)?);
    }
    Ok(pos)
}

fn star_region(star: &[StarEntry]) -> (Vec<(usize, [u8; 4])>, Vec<(usize, usize)>, Vec<[u8; 4]>) {
    let n = star.len();
    let mut old = Vec::new();
    let mut internal = Vec::new();
    let mut labels = Vec::new();
    for (k, e) in star.iter().enumerate() {
        let mut l = [0u8; 4];
        l[e.p] = 0;
        l[e.q] = 1;
        l[e.y] = 2 + k as u8;
        l[e.y_next] = 2 + ((k + 1) % n) as u8;
        old.push((e.cell, l));
        labels.push(l);
        internal.push((k, e.y));
        internal.push((k, e.y_next));
    }
    (old, internal, labels)
}

fn replace(l: &[u8; 4], from: u8, to: u8) -> [u8; 4] {
    l.map(|x| if x == from { to } else { x })
}

pub fn pachner_32(t: &IdealTriangulation, site: PachnerSite, opts: &MoveOptions) -> Result<IdealTriangulation, TriangulationError> {
    let PachnerSite::Edge { cell, edge } = site else { return Err(TriangulationError::BadSite) };
    let star = edge_star(t, cell, edge)?;
    if star.len() != 3 {
        return Err(TriangulationError::BadValence(star.len()));
    }
    for k in 0..3 {
        if star[..k].iter().any(|e| e.cell == star[k].cell) {
            return Err(TriangulationError::DuplicateCell(star[k].cell));
        }
    }
    let (old, internal, labels) = star_region(&star);
    let new_cells = vec![replace(&labels[0], 0, 4), replace(&labels[0], 1, 4)];
    let region = Region { old, internal, new_cells };
    if !geometric(t, opts) {
        let mut out = retriangulate(t, &region, None)?;
        if opts.force {
            out.strip_shapes();
        }
        return Ok(out);
    }
    let pos = star_positions(t, &star, &labels)?;
    let out = retriangulate(t, &region, Some(&pos))?;
    if !check_new_cells(&out, 2, opts.tol) {
        return Err(TriangulationError::NotConvex);
    }
    Ok(out)
}

pub fn pachner_44(t: &IdealTriangulation, site: PachnerSite, opts: &MoveOptions) -> Result<IdealTriangulation, TriangulationError> {
    let PachnerSite::Octahedron { cell, edge, diagonal } = site else { return Err(TriangulationError::BadSite) };
    if diagonal > 1 {
        return Err(TriangulationError::BadSite);
    }
    let star = edge_star(t, cell, edge)?;
    if star.len() != 4 {
        return Err(TriangulationError::BadValence(star.len()));
    }
    for k in 0..4 {
        if star[..k].iter().any(|e| e.cell == star[k].cell) {
            return Err(TriangulationError::NotOctahedron);
        }
    }
    let (old, internal, labels) = star_region(&star);
    let (d, e) = (diagonal, diagonal + 2);
    let (yd, ye) = (2 + d as u8, 2 + e as u8);
    let new_cells = vec![
        replace(&labels[d], 1, ye),
        replace(&labels[d], 0, ye),
        replace(&labels[e], 1, yd),
        replace(&labels[e], 0, yd),
    ];
    let region = Region { old, internal, new_cells };
    if !geometric(t, opts) {
        let mut out = retriangulate(t, &region, None)?;
        if opts.force {
            out.strip_shapes();
        }
        return Ok(out);
    }
    let pos = star_positions(t, &star, &labels)?;
    let out = retriangulate(t, &region, Some(&pos))?;
    if !check_new_cells(&out, 4, opts.tol) {
        return Err(TriangulationError::NonGeometricResult);
    }
    Ok(out)
}
