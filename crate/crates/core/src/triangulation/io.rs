//! Plain-text triangulation format.
//!
//! ```text
//! triangulation v1
//! cells <N>
//! cell <i> vertices <a> <b> <c> <d> [shape <re> <im>]
//! glue <i> <f> <j> <g> <perm>
//! cusp <class> <label>
//! end
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Each glued face pair
//! appears once; faces without a `glue` line are boundary. `perm` is four
//! digits, the images of slots 0..3 of cell `i` in cell `j`.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64 as C64;
use thiserror::Error;

use super::{Cell, IdealTriangulation, Perm4};
use crate::hypgeom::ShapeParameter;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}, field `{field}`: {message}")]
pub struct ParseError {
    pub line: usize,
    pub field: String,
    pub message: String,
}

fn err(line: usize, field: &str, message: &str) -> ParseError {
    ParseError { line, field: field.to_string(), message: message.to_string() }
}

pub fn to_text(t: &IdealTriangulation) -> String {
    let mut s = String::from("triangulation v1\n");
    let _ = writeln!(s, "cells {}", t.len());
    for (i, c) in t.cells.iter().enumerate() {
        let v = c.vertices;
        let _ = write!(s, "cell {} vertices {} {} {} {}", i, v[0], v[1], v[2], v[3]);
        if let Some(sh) = c.shape {
            let _ = write!(s, " shape {:?} {:?}", sh.z.re, sh.z.im);
        }
        s.push('\n');
    }
    for (i, c) in t.cells.iter().enumerate() {
        for (f, g) in c.gluings.iter().enumerate() {
            if let Some(g) = g {
                if (i, f) < (g.cell, g.face) {
                    let _ = writeln!(s, "glue {} {} {} {} {}", i, f, g.cell, g.face, g.perm);
                }
            }
        }
    }
    for (k, label) in &t.cusp_labels {
        let _ = writeln!(s, "cusp {} {}", k, label);
    }
    s.push_str("end\n");
    s
}

fn num<T: std::str::FromStr>(tok: Option<&str>, line: usize, field: &str) -> Result<T, ParseError> {
    let tok = tok.ok_or_else(|| err(line, field, "missing"))?;
    tok.parse::<T>().map_err(|_| err(line, field, &format!("cannot parse `{tok}`")))
}

pub fn from_text(text: &str) -> Result<IdealTriangulation, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (n0, header) = lines.next().ok_or_else(|| err(1, "header", "empty file"))?;
    if header != "triangulation v1" {
        return Err(err(n0, "header", "expected `triangulation v1`"));
    }
    let (n1, count_line) = lines.next().ok_or_else(|| err(n0 + 1, "cells", "truncated file"))?;
    let mut tok = count_line.split_whitespace();
    if tok.next() != Some("cells") {
        return Err(err(n1, "cells", "expected `cells <N>`"));
    }
    let n: usize = num(tok.next(), n1, "cells")?;
    let mut cells: Vec<Option<Cell>> = vec![None; n];
    let mut t = IdealTriangulation::default();
    let mut glues = Vec::new();
    let mut ended = false;
    for (ln, line) in lines {
        if ended {
            return Err(err(ln, "end", "content after `end`"));
        }
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("cell") => {
                let i: usize = num(tok.next(), ln, "cell index")?;
                if i >= n {
                    return Err(err(ln, "cell index", "out of range"));
                }
                if tok.next() != Some("vertices") {
                    return Err(err(ln, "vertices", "expected `vertices`"));
                }
                let mut v = [0u32; 4];
                for slot in v.iter_mut() {
                    *slot = num(tok.next(), ln, "vertex")?;
                }
                let shape = match tok.next() {
                    None => None,
                    Some("shape") => {
                        let re: f64 = num(tok.next(), ln, "shape re")?;
                        let im: f64 = num(tok.next(), ln, "shape im")?;
                        Some(ShapeParameter::new(C64::new(re, im)))
                    }
                    Some(other) => return Err(err(ln, "shape", &format!("unexpected `{other}`"))),
                };
                if tok.next().is_some() {
                    return Err(err(ln, "cell", "trailing fields"));
                }
                if cells[i].is_some() {
                    return Err(err(ln, "cell index", "duplicate cell"));
                }
                cells[i] = Some(Cell::new(v, shape));
            }
            Some("glue") => {
                let i: usize = num(tok.next(), ln, "glue cell")?;
                let f: usize = num(tok.next(), ln, "glue face")?;
                let j: usize = num(tok.next(), ln, "glue target cell")?;
                let g: usize = num(tok.next(), ln, "glue target face")?;
                let ptok = tok.next().ok_or_else(|| err(ln, "glue perm", "missing"))?;
                let perm = Perm4::parse(ptok).ok_or_else(|| err(ln, "glue perm", "not a permutation"))?;
                if i >= n || j >= n || f > 3 || g > 3 {
                    return Err(err(ln, "glue", "index out of range"));
                }
                if perm.apply(f) != g {
                    return Err(err(ln, "glue perm", "does not send face to face"));
                }
                glues.push((ln, i, f, j, perm));
            }
            Some("cusp") => {
                let k: u32 = num(tok.next(), ln, "cusp class")?;
                let label: Vec<&str> = tok.collect();
                if label.is_empty() {
                    return Err(err(ln, "cusp label", "missing"));
                }
                t.cusp_labels.insert(k, label.join(" "));
            }
            Some("end") => ended = true,
            Some(other) => return Err(err(ln, "keyword", &format!("unknown `{other}`"))),
            None => {}
        }
    }
    if !ended {
        return Err(err(text.lines().count() + 1, "end", "truncated file"));
    }
    for (i, c) in cells.into_iter().enumerate() {
        t.cells.push(c.ok_or_else(|| err(0, "cell", &format!("cell {i} missing")))?);
    }
    for (ln, i, f, j, perm) in glues {
        if t.cells[i].gluings[f].is_some() || t.cells[j].gluings[perm.apply(f)].is_some() {
            return Err(err(ln, "glue", "face glued twice"));
        }
        if i == j && f == perm.apply(f) {
            return Err(err(ln, "glue", "face glued to itself"));
        }
        t.glue(i, f, j, perm);
    }
    t.validate().map_err(|e| err(0, "gluing", &e.to_string()))?;
    Ok(t)
}

pub fn write_triangulation(t: &IdealTriangulation, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, to_text(t))
}

#[derive(Debug, Error)]
pub enum ReadError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub fn read_triangulation(path: &Path) -> Result<IdealTriangulation, ReadError> {
    let text = std::fs::read_to_string(path)?;
    Ok(from_text(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "triangulation v1
cells 2
cell 0 vertices 0 0 0 0 shape 0.5 0.8660254037844386
cell 1 vertices 0 0 0 0 shape 0.5 0.8660254037844386
glue 0 0 1 1 1023
glue 0 1 1 0 1023
glue 0 2 1 3 0132
glue 0 3 1 2 0132
cusp 0 main
end
";

    #[test]
    fn parses_and_round_trips() {
        let t = from_text(SAMPLE).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.cusp_labels[&0], "main");
        let again = from_text(&to_text(&t)).unwrap();
        assert_eq!(t, again);
    }

    #[test]
    fn float_round_trip_is_exact() {
        let mut t = from_text(SAMPLE).unwrap();
        t.cells[0].shape = Some(ShapeParameter::new(C64::new(0.1 + 0.2, 1.0 / 3.0)));
        t.cells[1].shape = Some(ShapeParameter::new(C64::new(1e-300, 7.25e-61)));
        assert_eq!(from_text(&to_text(&t)).unwrap(), t);
    }

    #[test]
    fn truncated_file_is_rejected() {
        let cut: String = SAMPLE.lines().take(5).map(|l| format!("{l}\n")).collect();
        let e = from_text(&cut).unwrap_err();
        assert_eq!(e.field, "end");
    }

    #[test]
    fn diagnostics_name_line_and_field() {
        let bad = SAMPLE.replace("glue 0 1 1 0 1023", "glue 0 1 1 0 1123");
        let e = from_text(&bad).unwrap_err();
        assert_eq!((e.line, e.field.as_str()), (6, "glue perm"));
        let bad = SAMPLE.replace("shape 0.5 0.8660254037844386\ncell 1", "shape x 0.8\ncell 1");
        let e = from_text(&bad).unwrap_err();
        assert_eq!((e.line, e.field.as_str()), (3, "shape re"));
    }
}
