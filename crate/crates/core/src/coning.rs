//! Iterated coning of ideal polyhedral complexes under a strict partial order
//! on cusps.
//!
//! Poly-complex text format:
//!
//! ```text
//! polycomplex v1
//! cells <N>
//! cell <i> vertices <k>
//! vertex <i> <j> <label> [pos <re> <im> | pos inf]
//! face <i> <f> <v0> <v1> ... <vn>
//! glue <i> <f> <j> <g> <w0> <w1> ... <wn>
//! end
//! ```
//!
//! In a `glue` line, `wk` is the local vertex of cell `j` matched with the
//! `k`-th vertex of face `f` of cell `i`.
//!
//! Order format: one relation `a < b` per line; `#` starts a comment.
//! Diagonal format: `diag <cell> <face> <vertex>` fans the face from the
//! given local vertex.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::hypgeom::{cross_ratio, IdealPoint};
use crate::triangulation::{face_slots, Cell, IdealTriangulation, Perm4};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConingError {
    #[error("cell {0} has no unique minimal vertex")]
    NoUniqueMinimum(usize),
    #[error("order relation is cyclic at `{0}`")]
    CyclicOrder(String),
    #[error("invalid complex: {0}")]
    InvalidComplex(String),
    #[error("face subdivisions disagree across gluing {0}")]
    InconsistentFace(usize),
    #[error("inconsistent input: {0}")]
    InconsistentInput(String),
    #[error("degenerate tetrahedron in cell {0}")]
    Degenerate(usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Strict partial order on cusp labels, stored as the transitive closure of a DAG.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CuspOrder {
    below: BTreeMap<String, BTreeSet<String>>,
}

impl CuspOrder {
    pub fn new(relations: &[(&str, &str)]) -> Result<Self, ConingError> {
        let pairs: Vec<(String, String)> = relations.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
        CuspOrder::from_pairs(&pairs)
    }

    pub fn from_pairs(relations: &[(String, String)]) -> Result<Self, ConingError> {
        let mut up: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (a, b) in relations {
            up.entry(a.clone()).or_default().insert(b.clone());
            up.entry(b.clone()).or_default();
        }
        // closure[x] = everything strictly above x
        let mut above: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for start in up.keys() {
            let mut seen = BTreeSet::new();
            let mut stack: Vec<&String> = up[start].iter().collect();
            while let Some(x) = stack.pop() {
                if seen.insert(x.clone()) {
                    stack.extend(up[x].iter());
                }
            }
            if seen.contains(start) {
                return Err(ConingError::CyclicOrder(start.clone()));
            }
            above.insert(start.clone(), seen);
        }
        let mut below: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (x, ups) in &above {
            below.entry(x.clone()).or_default();
            for y in ups {
                below.entry(y.clone()).or_default().insert(x.clone());
            }
        }
        Ok(CuspOrder { below })
    }

    /// Total order `labels[0] < labels[1] < …`.
    pub fn total(labels: &[&str]) -> Self {
        let rel: Vec<(&str, &str)> = labels.windows(2).map(|w| (w[0], w[1])).collect();
        CuspOrder::new(&rel).expect("a chain is acyclic")
    }

    /// Non-blue labels totally ordered and all below every blue label; blue labels incomparable.
    pub fn blue(non_blue: &[&str], blue: &[&str]) -> Self {
        let mut rel: Vec<(&str, &str)> = non_blue.windows(2).map(|w| (w[0], w[1])).collect();
        if let Some(top) = non_blue.last() {
            for b in blue {
                rel.push((top, b));
            }
        }
        CuspOrder::new(&rel).expect("acyclic by construction")
    }

    pub fn less(&self, a: &str, b: &str) -> bool {
        self.below.get(b).is_some_and(|s| s.contains(a))
    }

    pub fn parse(text: &str) -> Result<Self, ConingError> {
        let mut rel = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split('<').map(str::trim).collect();
            if parts.len() != 2 || parts.iter().any(|p| p.is_empty() || p.contains(char::is_whitespace)) {
                return Err(ConingError::Parse { line: i + 1, message: "expected `a < b`".into() });
            }
            rel.push((parts[0].to_string(), parts[1].to_string()));
        }
        CuspOrder::from_pairs(&rel)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (b, lows) in &self.below {
            for a in lows {
                let _ = writeln!(s, "{a} < {b}");
            }
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Polyhedron {
    pub labels: Vec<String>,
    pub positions: Option<Vec<IdealPoint>>,
    /// Faces as cyclic sequences of local vertex indices.
    pub faces: Vec<Vec<usize>>,
}

impl Polyhedron {
    pub fn edges(&self) -> BTreeSet<(usize, usize)> {
        let mut e = BTreeSet::new();
        for f in &self.faces {
            for k in 0..f.len() {
                let (a, b) = (f[k], f[(k + 1) % f.len()]);
                e.insert((a.min(b), a.max(b)));
            }
        }
        e
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FaceGluing {
    pub a: (usize, usize),
    pub b: (usize, usize),
    /// `map[k]` is the vertex of cell `b.0` matched with the `k`-th vertex of face `a`.
    pub map: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PolyComplex {
    pub cells: Vec<Polyhedron>,
    pub gluings: Vec<FaceGluing>,
}

/// Local vertices of `subset` whose label has nothing strictly below it in `subset`.
fn minimal_among(labels: &[String], subset: &[usize], o: &CuspOrder) -> Vec<usize> {
    subset.iter().copied().filter(|&v| !subset.iter().any(|&u| u != v && o.less(&labels[u], &labels[v]))).collect()
}

fn unique_minimum(labels: &[String], subset: &[usize], o: &CuspOrder) -> Option<usize> {
    match minimal_among(labels, subset, o).as_slice() {
        [v] => Some(*v),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MinimalVertex {
    Unique(usize),
    NotUnique(Vec<usize>),
}

pub fn minimal_vertex(p: &Polyhedron, o: &CuspOrder) -> MinimalVertex {
    let all: Vec<usize> = (0..p.labels.len()).collect();
    let m = minimal_among(&p.labels, &all, o);
    if m.len() == 1 {
        MinimalVertex::Unique(m[0])
    } else {
        MinimalVertex::NotUnique(m)
    }
}

impl PolyComplex {
    pub fn validate(&self) -> Result<(), ConingError> {
        let bad = |m: String| Err(ConingError::InvalidComplex(m));
        for (i, c) in self.cells.iter().enumerate() {
            let n = c.labels.len();
            if let Some(p) = &c.positions {
                if p.len() != n {
                    return bad(format!("cell {i}: {} positions for {n} vertices", p.len()));
                }
            }
            let mut count: BTreeMap<(usize, usize), usize> = BTreeMap::new();
            for (f, face) in c.faces.iter().enumerate() {
                let distinct: BTreeSet<_> = face.iter().collect();
                if face.len() < 3 || distinct.len() != face.len() || face.iter().any(|&v| v >= n) {
                    return bad(format!("cell {i} face {f} is not a polygon on the cell's vertices"));
                }
                for k in 0..face.len() {
                    let (a, b) = (face[k], face[(k + 1) % face.len()]);
                    *count.entry((a.min(b), a.max(b))).or_default() += 1;
                }
            }
            if let Some((e, _)) = count.iter().find(|(_, &k)| k != 2) {
                return bad(format!("cell {i} edge {e:?} is not in exactly two faces"));
            }
        }
        let mut used = BTreeSet::new();
        for (k, g) in self.gluings.iter().enumerate() {
            for side in [g.a, g.b] {
                if side.0 >= self.cells.len() || side.1 >= self.cells[side.0].faces.len() {
                    return bad(format!("gluing {k} refers to a missing face"));
                }
                if !used.insert(side) {
                    return bad(format!("face {side:?} glued twice"));
                }
            }
            let fa = &self.cells[g.a.0].faces[g.a.1];
            let fb = &self.cells[g.b.0].faces[g.b.1];
            if g.map.len() != fa.len() || fb.len() != fa.len() {
                return bad(format!("gluing {k}: face sizes differ"));
            }
            let image: BTreeSet<usize> = g.map.iter().copied().collect();
            let target: BTreeSet<usize> = fb.iter().copied().collect();
            if image != target {
                return bad(format!("gluing {k}: map is not onto the target face"));
            }
            let n = fa.len();
            let pos = |v: usize| fb.iter().position(|&x| x == v).unwrap();
            let step = (pos(g.map[1]) + n - pos(g.map[0])) % n;
            if !(step == 1 || step == n - 1) || (0..n).any(|k| (pos(g.map[(k + 1) % n]) + n - pos(g.map[k])) % n != step) {
                return bad(format!("gluing {k}: map does not preserve the face cycle"));
            }
            for (kk, &v) in fa.iter().enumerate() {
                if self.cells[g.a.0].labels[v] != self.cells[g.b.0].labels[g.map[kk]] {
                    return bad(format!("gluing {k}: cusp labels differ"));
                }
            }
        }
        Ok(())
    }

    fn gluing_of(&self, cell: usize, face: usize) -> Option<(usize, bool)> {
        self.gluings.iter().enumerate().find_map(|(k, g)| {
            if g.a == (cell, face) {
                Some((k, true))
            } else if g.b == (cell, face) {
                Some((k, false))
            } else {
                None
            }
        })
    }

    /// Maps a local vertex of one side of gluing `k` to the other side.
    fn across(&self, k: usize, from_a: bool, v: usize) -> usize {
        let g = &self.gluings[k];
        if from_a {
            let idx = self.cells[g.a.0].faces[g.a.1].iter().position(|&x| x == v).unwrap();
            g.map[idx]
        } else {
            let idx = g.map.iter().position(|&x| x == v).unwrap();
            self.cells[g.a.0].faces[g.a.1][idx]
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("polycomplex v1\ncells {}\n", self.cells.len());
        for (i, c) in self.cells.iter().enumerate() {
            let _ = writeln!(s, "cell {} vertices {}", i, c.labels.len());
            for (j, l) in c.labels.iter().enumerate() {
                let _ = write!(s, "vertex {i} {j} {l}");
                match c.positions.as_ref().map(|p| p[j]) {
                    Some(IdealPoint::Infinity) => s.push_str(" pos inf"),
                    Some(IdealPoint::Finite(z)) => {
                        let _ = write!(s, " pos {:?} {:?}", z.re, z.im);
                    }
                    None => {}
                }
                s.push('\n');
            }
            for (f, face) in c.faces.iter().enumerate() {
                let vs: Vec<String> = face.iter().map(|v| v.to_string()).collect();
                let _ = writeln!(s, "face {i} {f} {}", vs.join(" "));
            }
        }
        for g in &self.gluings {
            let vs: Vec<String> = g.map.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(s, "glue {} {} {} {} {}", g.a.0, g.a.1, g.b.0, g.b.1, vs.join(" "));
        }
        s.push_str("end\n");
        s
    }

    pub fn parse(text: &str) -> Result<Self, ConingError> {
        let perr = |line: usize, m: &str| ConingError::Parse { line, message: m.to_string() };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (ln, h) = lines.next().ok_or_else(|| perr(1, "empty file"))?;
        if h != "polycomplex v1" {
            return Err(perr(ln, "expected `polycomplex v1`"));
        }
        let (ln, c) = lines.next().ok_or_else(|| perr(ln + 1, "truncated file"))?;
        let n: usize = c.strip_prefix("cells ").and_then(|x| x.trim().parse().ok()).ok_or_else(|| perr(ln, "expected `cells <N>`"))?;
        let mut cx = PolyComplex { cells: vec![Polyhedron { labels: vec![], positions: None, faces: vec![] }; n], gluings: vec![] };
        let mut npos = vec![0usize; n];
        let mut ended = false;
        for (ln, line) in lines {
            if ended {
                return Err(perr(ln, "content after `end`"));
            }
            let tok: Vec<&str> = line.split_whitespace().collect();
            let int = |k: usize| -> Result<usize, ConingError> { tok.get(k).and_then(|t| t.parse().ok()).ok_or_else(|| perr(ln, &format!("field {k} is not an index"))) };
            match tok[0] {
                "cell" => {
                    let i = int(1)?;
                    if i >= n || tok.get(2) != Some(&"vertices") {
                        return Err(perr(ln, "expected `cell <i> vertices <k>`"));
                    }
                    cx.cells[i].labels = vec![String::new(); int(3)?];
                }
                "vertex" => {
                    let (i, j) = (int(1)?, int(2)?);
                    if i >= n || j >= cx.cells[i].labels.len() {
                        return Err(perr(ln, "vertex index out of range"));
                    }
                    let label = tok.get(3).ok_or_else(|| perr(ln, "missing label"))?;
                    cx.cells[i].labels[j] = label.to_string();
                    match tok.get(4) {
                        None => {}
                        Some(&"pos") => {
                            let p = match tok.get(5) {
                                Some(&"inf") => IdealPoint::Infinity,
                                _ => {
                                    let re: f64 = tok.get(5).and_then(|t| t.parse().ok()).ok_or_else(|| perr(ln, "bad position"))?;
                                    let im: f64 = tok.get(6).and_then(|t| t.parse().ok()).ok_or_else(|| perr(ln, "bad position"))?;
                                    IdealPoint::finite(re, im)
                                }
                            };
                            let k = cx.cells[i].labels.len();
                            cx.cells[i].positions.get_or_insert_with(|| vec![IdealPoint::Infinity; k])[j] = p;
                            npos[i] += 1;
                        }
                        Some(_) => return Err(perr(ln, "expected `pos`")),
                    }
                }
                "face" => {
                    let (i, f) = (int(1)?, int(2)?);
                    if i >= n || f != cx.cells[i].faces.len() {
                        return Err(perr(ln, "faces must be listed in order"));
                    }
                    let vs: Result<Vec<usize>, _> = (3..tok.len()).map(int).collect();
                    cx.cells[i].faces.push(vs?);
                }
                "glue" => {
                    let (i, f, j, g) = (int(1)?, int(2)?, int(3)?, int(4)?);
                    let vs: Result<Vec<usize>, _> = (5..tok.len()).map(int).collect();
                    cx.gluings.push(FaceGluing { a: (i, f), b: (j, g), map: vs? });
                }
                "end" => ended = true,
                other => return Err(perr(ln, &format!("unknown keyword `{other}`"))),
            }
        }
        if !ended {
            return Err(perr(text.lines().count() + 1, "truncated file"));
        }
        for (i, c) in cx.cells.iter().enumerate() {
            if c.positions.is_some() && npos[i] != c.labels.len() {
                return Err(perr(0, &format!("cell {i}: positions must be given for all vertices or none")));
            }
        }
        cx.validate()?;
        Ok(cx)
    }
}

/// A pyramid over a face of a cell; a triangular base makes it a tetrahedron.
#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub cell: usize,
    pub apex: usize,
    pub base: Vec<usize>,
    /// Face of the cell containing the base.
    pub face: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaceSubdivision {
    Undivided,
    Coned(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaceCase {
    /// No unique minimal vertex: the face stays whole on both sides.
    Undivided,
    /// Coned from the face's minimal vertex on both sides.
    Coned,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FaceCheck {
    pub gluing: usize,
    pub case: FaceCase,
    pub agree: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PyramidDecomposition {
    pub pieces: Vec<Piece>,
    /// Induced subdivision of every face of every cell.
    pub faces: Vec<Vec<FaceSubdivision>>,
    pub checks: Vec<FaceCheck>,
}

impl PyramidDecomposition {
    pub fn tetrahedra_only(&self) -> bool {
        self.pieces.iter().all(|p| p.base.len() == 3)
    }
}

/// Fan triangles of a polygon from position `k`.
fn fan(poly: &[usize], k: usize) -> Vec<[usize; 3]> {
    let n = poly.len();
    (1..n - 1).map(|i| [poly[k], poly[(k + i) % n], poly[(k + i + 1) % n]]).collect()
}

pub fn iterated_cone(c: &PolyComplex, o: &CuspOrder) -> Result<PyramidDecomposition, ConingError> {
    c.validate()?;
    let mut pieces = Vec::new();
    let mut faces = Vec::new();
    for (i, p) in c.cells.iter().enumerate() {
        let MinimalVertex::Unique(v) = minimal_vertex(p, o) else { return Err(ConingError::NoUniqueMinimum(i)) };
        let mut subs = Vec::new();
        for (f, face) in p.faces.iter().enumerate() {
            if face.contains(&v) {
                subs.push(FaceSubdivision::Coned(v));
                continue;
            }
            match unique_minimum(&p.labels, face, o) {
                Some(w) => {
                    subs.push(FaceSubdivision::Coned(w));
                    let k = face.iter().position(|&x| x == w).unwrap();
                    for t in fan(face, k) {
                        pieces.push(Piece { cell: i, apex: v, base: t.to_vec(), face: f });
                    }
                }
                None => {
                    subs.push(FaceSubdivision::Undivided);
                    pieces.push(Piece { cell: i, apex: v, base: face.clone(), face: f });
                }
            }
        }
        faces.push(subs);
    }
    let mut checks = Vec::new();
    for (k, g) in c.gluings.iter().enumerate() {
        let sa = faces[g.a.0][g.a.1];
        let sb = faces[g.b.0][g.b.1];
        let (agree, case) = match (sa, sb) {
            (FaceSubdivision::Undivided, FaceSubdivision::Undivided) => (true, FaceCase::Undivided),
            (FaceSubdivision::Coned(x), FaceSubdivision::Coned(y)) => (c.across(k, true, x) == y, FaceCase::Coned),
            _ => (false, FaceCase::Coned),
        };
        if !agree {
            return Err(ConingError::InconsistentFace(k));
        }
        checks.push(FaceCheck { gluing: k, case, agree });
    }
    Ok(PyramidDecomposition { pieces, faces, checks })
}

/// Fan apex (local vertex) for each undivided glued face; keyed by `(cell, face)`.
pub type DiagonalChoices = BTreeMap<(usize, usize), usize>;

pub fn parse_diagonals(text: &str) -> Result<DiagonalChoices, ConingError> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let tok: Vec<&str> = line.split_whitespace().collect();
        let nums: Option<Vec<usize>> = tok.get(1..).map(|t| t.iter().filter_map(|x| x.parse().ok()).collect());
        match (tok.first(), nums) {
            (Some(&"diag"), Some(v)) if v.len() == 3 && tok.len() == 4 => {
                out.insert((v[0], v[1]), v[2]);
            }
            _ => return Err(ConingError::Parse { line: i + 1, message: "expected `diag <cell> <face> <vertex>`".into() }),
        }
    }
    Ok(out)
}

/// Triangulation from a pyramid decomposition, splitting each undivided face
/// (a bipyramid between two cells) by the chosen fan. With positions on every
/// cell, tetrahedra are oriented positively and carry shapes.
pub fn choose_diagonals(c: &PolyComplex, pyr: &PyramidDecomposition, choices: &DiagonalChoices) -> Result<IdealTriangulation, ConingError> {
    // tetrahedra as (cell, [apex, a, b, d]) in local vertices
    let mut tets: Vec<(usize, [usize; 4])> = Vec::new();
    for piece in &pyr.pieces {
        if piece.base.len() == 3 {
            tets.push((piece.cell, [piece.apex, piece.base[0], piece.base[1], piece.base[2]]));
            continue;
        }
        let Some((k, from_a)) = c.gluing_of(piece.cell, piece.face) else {
            return Err(ConingError::InconsistentInput(format!("face {} of cell {} is the base of only one pyramid", piece.face, piece.cell)));
        };
        let g = &c.gluings[k];
        let other = if from_a { g.b } else { g.a };
        let across = pyr.pieces.iter().filter(|p| (p.cell, p.face) == other && p.base.len() > 3).count();
        if across != 1 {
            return Err(ConingError::InconsistentInput(format!("face {} of cell {} is not shared by exactly two pyramids", piece.face, piece.cell)));
        }
        let own = choices.get(&(piece.cell, piece.face)).copied();
        let mirrored = choices.get(&other).map(|&v| c.across(k, !from_a, v));
        let apex = match (own, mirrored) {
            (Some(x), Some(y)) if x != y => return Err(ConingError::InconsistentInput(format!("conflicting diagonals on gluing {k}"))),
            (Some(x), _) | (None, Some(x)) => x,
            (None, None) => {
                let first = c.cells[g.a.0].faces[g.a.1][0];
                if from_a {
                    first
                } else {
                    c.across(k, true, first)
                }
            }
        };
        let pos = piece.base.iter().position(|&x| x == apex).ok_or_else(|| ConingError::InconsistentInput(format!("diagonal vertex {apex} not on face {} of cell {}", piece.face, piece.cell)))?;
        for t in fan(&piece.base, pos) {
            tets.push((piece.cell, [piece.apex, t[0], t[1], t[2]]));
        }
    }

    let with_positions = c.cells.iter().all(|p| p.positions.is_some());
    let mut shapes = Vec::with_capacity(tets.len());
    if with_positions {
        for (cell, t) in tets.iter_mut() {
            let pos = c.cells[*cell].positions.as_ref().unwrap();
            let z = cross_ratio(pos[t[0]], pos[t[1]], pos[t[2]], pos[t[3]]).map_err(|_| ConingError::Degenerate(*cell))?;
            let z = if z.z.im < 0.0 {
                t.swap(2, 3);
                crate::hypgeom::ShapeParameter::new(1.0 / z.z)
            } else {
                z
            };
            if z.z.im.abs() < 1e-12 {
                return Err(ConingError::Degenerate(*cell));
            }
            shapes.push(Some(z));
        }
    } else {
        shapes.resize(tets.len(), None);
    }

    let mut label_ids: BTreeMap<String, u32> = BTreeMap::new();
    for p in &c.cells {
        for l in &p.labels {
            let next = label_ids.len() as u32;
            label_ids.entry(l.clone()).or_insert(next);
        }
    }
    let cells: Vec<Cell> = tets.iter().zip(&shapes).map(|((cell, t), s)| Cell::new(t.map(|v| label_ids[&c.cells[*cell].labels[v]]), *s)).collect();
    let mut tri = IdealTriangulation::new(cells);
    for (l, id) in &label_ids {
        tri.cusp_labels.insert(*id, l.clone());
    }

    // each tetrahedron face is keyed by its triangle, written in side-`a`
    // coordinates when it lies on a glued face of the cell
    let face_of = |cell: usize, tri3: &[usize; 3]| -> Option<usize> { c.cells[cell].faces.iter().position(|f| tri3.iter().all(|v| f.contains(v))) };
    type Key = (Option<usize>, usize, [usize; 3]);
    let mut slots: HashMap<Key, Vec<(usize, usize, [usize; 3])>> = HashMap::new();
    for (ti, (cell, t)) in tets.iter().enumerate() {
        for f in 0..4 {
            let s = face_slots(f);
            let local = [t[s[0]], t[s[1]], t[s[2]]];
            let (glue, canon) = match face_of(*cell, &local).and_then(|fi| c.gluing_of(*cell, fi)) {
                Some((k, true)) => (Some(k), local),
                Some((k, false)) => (Some(k), local.map(|v| c.across(k, false, v))),
                None => (None, local),
            };
            let mut sorted = canon;
            sorted.sort_unstable();
            let owner = if glue.is_some() { 0 } else { *cell };
            slots.entry((glue, owner, sorted)).or_default().push((ti, f, canon));
        }
    }
    let mut keys: Vec<&Key> = slots.keys().collect();
    keys.sort();
    for key in keys {
        match slots[key].as_slice() {
            [_] => {}
            [(ta, fa, ca), (tb, fb, cb)] => {
                let (sa, sb) = (face_slots(*fa), face_slots(*fb));
                let mut perm = [0u8; 4];
                perm[*fa] = *fb as u8;
                for i in 0..3 {
                    let j = cb.iter().position(|&x| x == ca[i]).unwrap();
                    perm[sa[i]] = sb[j] as u8;
                }
                let perm = Perm4::new(perm).ok_or_else(|| ConingError::InconsistentInput("not a permutation".into()))?;
                tri.glue(*ta, *fa, *tb, perm);
            }
            _ => return Err(ConingError::InconsistentInput("triangle shared by more than two tetrahedra".into())),
        }
    }
    tri.validate().map_err(|e| ConingError::InconsistentInput(e.to_string()))?;
    Ok(tri)
}

/// Vertex pairs of a cell, not joined by an edge, with the same cusp label.
pub fn returning_diagonals(c: &PolyComplex) -> BTreeSet<(usize, usize, usize)> {
    let mut out = BTreeSet::new();
    for (i, p) in c.cells.iter().enumerate() {
        let edges = p.edges();
        for a in 0..p.labels.len() {
            for b in a + 1..p.labels.len() {
                if p.labels[a] == p.labels[b] && !edges.contains(&(a, b)) {
                    out.insert((i, a, b));
                }
            }
        }
    }
    out
}

/// Faces of the ideal octahedron with vertices `0 = ∞, 1 = 0, 2 = 1, 3 = i, 4 = −1, 5 = −i`
/// (antipodal pairs (0,1), (2,4), (3,5)).
pub fn octahedron_faces() -> Vec<Vec<usize>> {
    let mut faces = Vec::new();
    for a in [0, 1] {
        for b in [2, 4] {
            for d in [3, 5] {
                faces.push(vec![a, b, d]);
            }
        }
    }
    faces
}

/// Square pyramid: apex 0 and base cycle 1, 2, 3, 4; face 0 is the base.
pub fn square_pyramid_faces() -> Vec<Vec<usize>> {
    vec![vec![1, 2, 3, 4], vec![0, 1, 2], vec![0, 2, 3], vec![0, 3, 4], vec![0, 4, 1]]
}
