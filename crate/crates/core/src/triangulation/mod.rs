//! Ideal triangulations: cells with four vertex slots, face gluings,
//! edge classes, geometric verification, Pachner moves and file I/O.
//!
//! Face `f` of a cell is the face opposite slot `f`. A cell's shape is the
//! cross ratio of its vertices taken in slot order.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::hypgeom::{cross_ratio, GeomError, IdealPoint, ShapeParameter};

mod io;
mod iso;
mod moves;
pub mod perm;

pub use io::{from_text, read_triangulation, to_text, write_triangulation, ParseError, ReadError};
pub use iso::{find_geometric_isomorphism, find_isomorphism, relabel_shape, Isomorphism};
pub use moves::{edge_star, pachner_23, pachner_32, pachner_44, MoveOptions, PachnerSite, StarEntry};
pub use perm::{edge_index, face_slots, Perm4, EDGES};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TriangulationError {
    #[error("shapes missing on cell {0}")]
    MissingShapes(usize),
    #[error("invalid gluing at cell {cell} face {face}: {reason}")]
    InvalidGluing { cell: usize, face: usize, reason: String },
    #[error("cell index {0} out of range")]
    NoSuchCell(usize),
    #[error("both sides of the face belong to cell {0}")]
    SameCell(usize),
    #[error("site is not strictly convex")]
    NotConvex,
    #[error("edge has valence {0}")]
    BadValence(usize),
    #[error("cell {0} appears more than once around the edge")]
    DuplicateCell(usize),
    #[error("edge star is not an octahedron")]
    NotOctahedron,
    #[error("move would produce a non-geometric cell")]
    NonGeometricResult,
    #[error("edge lies on the boundary")]
    BoundaryEdge,
    #[error("site does not match the move")]
    BadSite,
    #[error(transparent)]
    Geom(#[from] GeomError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gluing {
    pub cell: usize,
    pub face: usize,
    pub perm: Perm4,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    /// Vertex class (cusp) id per slot.
    pub vertices: [u32; 4],
    pub gluings: [Option<Gluing>; 4],
    pub shape: Option<ShapeParameter>,
}

impl Cell {
    pub fn new(vertices: [u32; 4], shape: Option<ShapeParameter>) -> Self {
        Cell { vertices, gluings: [None; 4], shape }
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct IdealTriangulation {
    pub cells: Vec<Cell>,
    pub cusp_labels: BTreeMap<u32, String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeClass {
    /// `(cell, edge index)` pairs.
    pub members: Vec<(usize, usize)>,
    pub boundary: bool,
}

impl EdgeClass {
    pub fn valence(&self) -> usize {
        self.members.len()
    }
}

/// Edge parameter of `shape` at the edge with index `e` (see [`EDGES`]).
pub fn edge_parameter(shape: &ShapeParameter, e: usize) -> C64 {
    match EDGES[e] {
        (0, 1) | (2, 3) => shape.z,
        (0, 2) | (1, 3) => shape.second(),
        _ => shape.third(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    pub angle_tol: f64,
    pub strict: bool,
    pub product_tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { angle_tol: 1e-8, strict: false, product_tol: 1e-8 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeReport {
    pub class: usize,
    pub valence: usize,
    pub boundary: bool,
    pub angle_sum: f64,
    pub product: C64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeometricReport {
    pub nongeometric_cells: Vec<usize>,
    pub edges: Vec<EdgeReport>,
    pub passed: bool,
}

impl GeometricReport {
    pub fn max_interior_error(&self) -> f64 {
        self.edges.iter().filter(|e| !e.boundary).map(|e| (e.angle_sum - 2.0 * PI).abs()).fold(0.0, f64::max)
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

impl IdealTriangulation {
    pub fn new(cells: Vec<Cell>) -> Self {
        IdealTriangulation { cells, cusp_labels: BTreeMap::new() }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Glues face `f` of `a` to face `g` of `b`; `perm` sends slots of `a` to slots of `b`.
    pub fn glue(&mut self, a: usize, f: usize, b: usize, perm: Perm4) {
        let g = perm.apply(f);
        self.cells[a].gluings[f] = Some(Gluing { cell: b, face: g, perm });
        self.cells[b].gluings[g] = Some(Gluing { cell: a, face: f, perm: perm.inverse() });
    }

    /// Builds cells on labelled ideal points, reordering each tuple (swap of
    /// the last two slots) to positive orientation, and glues faces that share
    /// the same three labels. Vertex class of slot = point label.
    pub fn from_ideal_cells(points: &[IdealPoint], tuples: &[[usize; 4]]) -> Result<Self, TriangulationError> {
        let mut cells = Vec::new();
        let mut ordered = Vec::new();
        for tup in tuples {
            let mut tup = *tup;
            let s = cross_ratio(points[tup[0]], points[tup[1]], points[tup[2]], points[tup[3]])?;
            let shape = if s.z.im < 0.0 {
                tup.swap(2, 3);
                cross_ratio(points[tup[0]], points[tup[1]], points[tup[2]], points[tup[3]])?
            } else {
                s
            };
            cells.push(Cell::new(tup.map(|x| x as u32), Some(shape)));
            ordered.push(tup);
        }
        let mut t = IdealTriangulation::new(cells);
        t.glue_by_labels(&ordered)?;
        Ok(t)
    }

    /// Glues faces whose label triples coincide; at most two faces per triple.
    pub fn glue_by_labels(&mut self, tuples: &[[usize; 4]]) -> Result<(), TriangulationError> {
        let mut faces: BTreeMap<[usize; 3], Vec<(usize, usize)>> = BTreeMap::new();
        for (i, tup) in tuples.iter().enumerate() {
            for f in 0..4 {
                let s = face_slots(f);
                let mut key = [tup[s[0]], tup[s[1]], tup[s[2]]];
                key.sort_unstable();
                faces.entry(key).or_default().push((i, f));
            }
        }
        for list in faces.values() {
            match list.as_slice() {
                [_] => {}
                [(a, f), (b, g)] => {
                    let mut perm = [0u8; 4];
                    for s in 0..4 {
                        perm[s] = if s == *f { *g as u8 } else { tuples[*b].iter().position(|&x| x == tuples[*a][s]).unwrap() as u8 };
                    }
                    self.glue(*a, *f, *b, Perm4(perm));
                }
                _ => return Err(TriangulationError::InvalidGluing { cell: list[0].0, face: list[0].1, reason: "face shared by more than two cells".into() }),
            }
        }
        Ok(())
    }

    pub fn has_shapes(&self) -> bool {
        self.cells.iter().all(|c| c.shape.is_some())
    }

    pub fn shapes(&self) -> Result<Vec<ShapeParameter>, TriangulationError> {
        self.cells.iter().enumerate().map(|(i, c)| c.shape.ok_or(TriangulationError::MissingShapes(i))).collect()
    }

    pub fn strip_shapes(&mut self) {
        for c in &mut self.cells {
            c.shape = None;
        }
    }

    /// Checks the gluing involution and vertex-class consistency.
    pub fn validate(&self) -> Result<(), TriangulationError> {
        let n = self.cells.len();
        for (i, cell) in self.cells.iter().enumerate() {
            for f in 0..4 {
                let Some(g) = cell.gluings[f] else { continue };
                let bad = |reason: &str| TriangulationError::InvalidGluing { cell: i, face: f, reason: reason.to_string() };
                if g.cell >= n {
                    return Err(bad("target cell out of range"));
                }
                if g.perm.apply(f) != g.face {
                    return Err(bad("permutation does not map face to face"));
                }
                if g.cell == i && g.face == f {
                    return Err(bad("face glued to itself"));
                }
                match self.cells[g.cell].gluings[g.face] {
                    Some(back) if back.cell == i && back.face == f && back.perm == g.perm.inverse() => {}
                    _ => return Err(bad("gluing is not an involution")),
                }
                for s in 0..4 {
                    if s != f && cell.vertices[s] != self.cells[g.cell].vertices[g.perm.apply(s)] {
                        return Err(bad("vertex classes disagree across the face"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn edge_classes(&self) -> Vec<EdgeClass> {
        let n = self.cells.len();
        let mut uf = UnionFind::new(6 * n);
        for (i, cell) in self.cells.iter().enumerate() {
            for f in 0..4 {
                let Some(g) = cell.gluings[f] else { continue };
                for &(a, b) in &EDGES {
                    if a == f || b == f {
                        continue;
                    }
                    let e2 = edge_index(g.perm.apply(a), g.perm.apply(b));
                    uf.union(6 * i + edge_index(a, b), 6 * g.cell + e2);
                }
            }
        }
        let mut by_root: BTreeMap<usize, EdgeClass> = BTreeMap::new();
        for i in 0..n {
            for (e, &(a, b)) in EDGES.iter().enumerate() {
                let root = uf.find(6 * i + e);
                let class = by_root.entry(root).or_insert(EdgeClass { members: vec![], boundary: false });
                class.members.push((i, e));
                // the two faces containing edge ab are opposite the other two slots
                for f in 0..4 {
                    if f != a && f != b && self.cells[i].gluings[f].is_none() {
                        class.boundary = true;
                    }
                }
            }
        }
        by_root.into_values().collect()
    }

    pub fn face_count(&self) -> usize {
        let mut glued = 0;
        let mut boundary = 0;
        for c in &self.cells {
            for g in &c.gluings {
                if g.is_some() {
                    glued += 1;
                } else {
                    boundary += 1;
                }
            }
        }
        glued / 2 + boundary
    }

    pub fn vertex_classes(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.cells.iter().flat_map(|c| c.vertices).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// V − E + F − C of the ideal cell complex.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_classes().len() as i64 - self.edge_classes().len() as i64 + self.face_count() as i64 - self.cells.len() as i64
    }

    pub fn volume(&self) -> Result<f64, TriangulationError> {
        let mut v = 0.0;
        for s in self.shapes()? {
            v += s.volume()?;
        }
        Ok(v)
    }

    pub fn verify_geometric(&self, opts: &VerifyOptions) -> Result<GeometricReport, TriangulationError> {
        let shapes = self.shapes()?;
        let nongeometric_cells: Vec<usize> = shapes.iter().enumerate().filter(|(_, s)| !s.is_geometric()).map(|(i, _)| i).collect();
        let mut edges = Vec::new();
        for (k, class) in self.edge_classes().into_iter().enumerate() {
            let mut angle_sum = 0.0;
            let mut product = C64::new(1.0, 0.0);
            for &(c, e) in &class.members {
                let w = edge_parameter(&shapes[c], e);
                angle_sum += w.arg();
                product *= w;
            }
            let ok = if class.boundary {
                true
            } else {
                let angle_ok = (angle_sum - 2.0 * PI).abs() <= opts.angle_tol;
                let product_ok = !opts.strict || (product - 1.0).norm() <= opts.product_tol;
                angle_ok && product_ok
            };
            edges.push(EdgeReport { class: k, valence: class.valence(), boundary: class.boundary, angle_sum, product, ok });
        }
        let passed = nongeometric_cells.is_empty() && edges.iter().all(|e| e.ok);
        Ok(GeometricReport { nongeometric_cells, edges, passed })
    }
}
