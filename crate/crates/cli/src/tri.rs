use anyhow::{anyhow, bail, Context as _, Result};

use hyptri::coning::{choose_diagonals, iterated_cone, parse_diagonals, CuspOrder, DiagonalChoices, FaceCase, PolyComplex};
use hyptri::triangulation::{pachner_23, pachner_32, pachner_44, read_triangulation, to_text, IdealTriangulation, MoveOptions, PachnerSite};

use crate::geometry::verify_options;
use crate::{read, ConeCmd, Context, MoveKind, Report, Status, TriCmd};

/// `cell:face`, `cell:i-j` or `cell:i-j:d`.
pub(crate) fn parse_site(s: &str, kind: MoveKind) -> Result<PachnerSite> {
    let bad = || anyhow!("cannot parse site `{s}` for this move kind");
    let parts: Vec<&str> = s.split(':').collect();
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    let edge = |t: &str| -> Result<(usize, usize)> {
        let (i, j) = t.split_once('-').ok_or_else(bad)?;
        Ok((num(i)?, num(j)?))
    };
    match (kind, parts.as_slice()) {
        (MoveKind::TwoThree, [c, f]) => Ok(PachnerSite::Face { cell: num(c)?, face: num(f)? }),
        (MoveKind::ThreeTwo, [c, e]) => Ok(PachnerSite::Edge { cell: num(c)?, edge: edge(e)? }),
        (MoveKind::FourFour, [c, e, d]) => Ok(PachnerSite::Octahedron { cell: num(c)?, edge: edge(e)?, diagonal: num(d)? }),
        _ => Err(bad()),
    }
}

fn describe(ctx: &Context, t: &IdealTriangulation, report: &mut Report) -> Result<()> {
    t.validate()?;
    let edges = t.edge_classes();
    report.push("cells", t.len());
    report.push("edge classes", edges.len());
    report.push("interior edges", edges.iter().filter(|e| !e.boundary).count());
    report.push("vertex classes", t.vertex_classes().len());
    report.push("euler characteristic", t.euler_characteristic());
    if !t.has_shapes() {
        report.push("geometric", "unknown (no shapes)");
        report.status = Status::Inconclusive;
        return Ok(());
    }
    let check = t.verify_geometric(&verify_options(ctx))?;
    report.push("volume", format!("{:.12}", t.volume()?));
    report.push("max interior angle error", format!("{:.3e}", check.max_interior_error()));
    report.push("geometric", check.passed);
    if !check.nongeometric_cells.is_empty() {
        report.push("nongeometric cells", format!("{:?}", check.nongeometric_cells));
    }
    if !check.passed {
        bail!("triangulation is not geometric");
    }
    Ok(())
}

pub(crate) fn tri(ctx: &Context, cmd: &TriCmd, report: &mut Report) -> Result<()> {
    match cmd {
        TriCmd::Verify { file } => {
            let t = read_triangulation(file).with_context(|| format!("reading {}", file.display()))?;
            report.push("file", file.display());
            describe(ctx, &t, report)?;
        }
        TriCmd::Move { file, site, kind, force, output } => {
            let t = read_triangulation(file).with_context(|| format!("reading {}", file.display()))?;
            let site = parse_site(site, *kind)?;
            let opts = MoveOptions { force: *force, tol: ctx.config.geometric_tol };
            let moved = match kind {
                MoveKind::TwoThree => pachner_23(&t, site, &opts)?,
                MoveKind::ThreeTwo => pachner_32(&t, site, &opts)?,
                MoveKind::FourFour => pachner_44(&t, site, &opts)?,
            };
            if t.has_shapes() && moved.has_shapes() {
                let change = (moved.volume()? - t.volume()?).abs();
                report.push("volume change", format!("{change:.3e}"));
            }
            ctx.write(report, output, &to_text(&moved))?;
            describe(ctx, &moved, report)?;
        }
    }
    Ok(())
}

pub(crate) fn cone(ctx: &Context, cmd: &ConeCmd, report: &mut Report) -> Result<()> {
    let ConeCmd::Run { complex, order, diagonals } = cmd;
    let c = PolyComplex::parse(&read(complex)?)?;
    let o = CuspOrder::parse(&read(order)?)?;
    let choices: DiagonalChoices = match diagonals {
        Some(p) => parse_diagonals(&read(p)?)?,
        None => DiagonalChoices::new(),
    };
    let pyr = iterated_cone(&c, &o)?;
    report.push("pieces", pyr.pieces.len());
    report.push("tetrahedra only", pyr.tetrahedra_only());
    for check in &pyr.checks {
        let g = &c.gluings[check.gluing];
        let case = match check.case {
            FaceCase::Undivided => "undivided",
            FaceCase::Coned => "coned",
        };
        report.push(&format!("glue {}", check.gluing), format!("cell {} face {} / cell {} face {}: {case}, agree {}", g.a.0, g.a.1, g.b.0, g.b.1, check.agree));
    }
    let t = choose_diagonals(&c, &pyr, &choices)?;
    ctx.write(report, "coned.tri", &to_text(&t))?;
    describe(ctx, &t, report)?;
    if !t.has_shapes() {
        // combinatorial output is still a verified decomposition
        report.status = Status::Verified;
    }
    Ok(())
}
