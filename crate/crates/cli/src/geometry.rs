use anyhow::{anyhow, bail, Context as _, Result};
use num_complex::Complex64 as C64;

use hyptri::ananas::{tree_walk, CuspLattice, DrilledAnanasState, LatticePoint};
use hyptri::canonical::{critical_diameter, cusp_cellulation, delaunay_violation, is_acute, problematic_bound, resting_ball, CuspCellulation, PackingScene};
use hyptri::farey::{parse_word, path_to_slope_limit, FareyTriangle, Slope};
use hyptri::hypgeom::{format_complex, parse_complex};
use hyptri::svg::{cellulation_svg, horoball_svg};
use hyptri::triangulation::{read_triangulation, to_text, VerifyOptions};

use crate::{AnanasCmd, CanonicalCmd, Context, Emit, FareyCmd, LatticeArgs, Report, Status};

pub(crate) fn parse_omega(s: &str) -> Result<C64> {
    parse_complex(s).ok_or_else(|| anyhow!("cannot parse complex number `{s}`; expected a+bi"))
}

fn lattice(args: &LatticeArgs) -> Result<CuspLattice> {
    Ok(CuspLattice::new(parse_omega(&args.omega)?)?)
}

pub(crate) fn verify_options(ctx: &Context) -> VerifyOptions {
    VerifyOptions { angle_tol: ctx.config.geometric_tol, product_tol: ctx.config.geometric_tol, ..VerifyOptions::default() }
}

fn start_state(lat: CuspLattice, triangle: &Option<String>, diagonal: &Option<String>) -> Result<DrilledAnanasState> {
    if let Some(t) = triangle {
        let t = FareyTriangle::parse(t).with_context(|| format!("triangle `{t}`"))?;
        return Ok(DrilledAnanasState::build(lat, t)?);
    }
    let d: Option<Slope> = match diagonal {
        Some(d) => Some(d.parse().with_context(|| format!("diagonal `{d}`"))?),
        None => None,
    };
    if let Some(d) = &d {
        let ok = [Slope::from_i64(1, 1)?, Slope::from_i64(-1, 1)?].contains(d);
        if !ok {
            bail!("diagonal must be 1/1 or -1/1, got {d}");
        }
    }
    Ok(DrilledAnanasState::delaunay(lat, d.as_ref())?)
}

fn fmt_angles(a: [f64; 3]) -> String {
    a.map(|x| format!("{x:.12}")).join(" ")
}

pub(crate) fn ananas(ctx: &Context, cmd: &AnanasCmd, report: &mut Report) -> Result<()> {
    match cmd {
        AnanasCmd::Build { lattice: l, triangle, diagonal } => {
            let lat = lattice(l)?;
            let state = start_state(lat, triangle, diagonal)?;
            let tri = state.triangulation()?;
            let check = tri.verify_geometric(&verify_options(ctx))?;
            report.push("omega", format_complex(lat.omega()));
            report.push("rectangular", lat.is_rectangular());
            report.push("triangle", state.triangle());
            report.push("boundary angles", fmt_angles(state.boundary_angles()));
            for (i, s) in state.core_shapes().iter().enumerate() {
                report.push(&format!("shape {i}"), format_complex(s.z));
            }
            report.push("volume", format!("{:.12}", tri.volume()?));
            report.push("geometric", check.passed);
            ctx.write(report, "ananas.tri", &to_text(&tri))?;
            if !check.passed {
                bail!("triangulation failed geometric verification");
            }
        }
        AnanasCmd::Walk { lattice: l, triangle, diagonal, path, emit } => {
            let lat = lattice(l)?;
            let turns = parse_word(path)?;
            if turns.len() > ctx.config.max_depth {
                bail!("path length {} exceeds max_depth {}", turns.len(), ctx.config.max_depth);
            }
            let start = start_state(lat, triangle, diagonal)?;
            report.push("omega", format_complex(lat.omega()));
            report.push("start", start.triangle());
            let opts = verify_options(ctx);
            let mut worst = 0.0f64;
            let mut nodes = 0;
            for node in tree_walk(&start, &turns).with_options(opts) {
                let node = node?;
                worst = worst.max(node.report.max_interior_error());
                if node.step == 0 {
                    continue;
                }
                nodes += 1;
                let stem = format!("node-{:03}", node.step);
                report.push(&stem, format!("{} volume {:.12}", node.state.triangle(), node.triangulation.volume()?));
                if matches!(emit, Emit::Tri | Emit::Both) {
                    let path = ctx.write(report, &format!("{stem}.tri"), &to_text(&node.triangulation))?;
                    let back = read_triangulation(&path)?;
                    if back != node.triangulation || !back.verify_geometric(&opts)?.passed {
                        bail!("{} does not round-trip to a geometric triangulation", path.display());
                    }
                }
                if matches!(emit, Emit::Svg | Emit::Both) {
                    ctx.write(report, &format!("{stem}.svg"), &cellulation_svg(&lat, node.state.triangle()))?;
                }
            }
            report.push("nodes", nodes);
            report.push("max interior angle error", format!("{worst:.3e}"));
        }
    }
    Ok(())
}

pub(crate) fn canonical(ctx: &Context, cmd: &CanonicalCmd, report: &mut Report) -> Result<()> {
    match cmd {
        CanonicalCmd::Rest { lattice: l, height } => {
            let lat = lattice(l)?;
            let scene = PackingScene::new(lat, *height)?.with_tangency_tol(ctx.config.tangency_tol);
            let ball = resting_ball(&scene)?;
            let n = ball.tangencies.len();
            let kind = match n {
                4 => "rectangular",
                3 => "triangular",
                _ => "degenerate",
            };
            report.push("omega", format_complex(lat.omega()));
            report.push("tangencies", format!("{n} ({kind})"));
            report.push("center", format_complex(ball.center));
            report.push("height", ball.height);
            report.push("radius", ball.radius);
            let pts: Vec<String> = ball.tangencies.iter().map(|p| format_complex(lat.point(p))).collect();
            report.push("tangency points", pts.join(" "));
            let res: Vec<String> = ball.residuals.iter().map(|(p, r)| format!("{}:{r:.3e}", format_complex(lat.point(p)))).collect();
            report.push("residuals", res.join(" "));
            ctx.write(report, "resting-ball.svg", &horoball_svg(&scene, &ball))?;
            if n != 3 && n != 4 {
                report.status = Status::Inconclusive;
            }
        }
        CanonicalCmd::Cellulation { lattice: l } => {
            let lat = lattice(l)?;
            let tol = ctx.config.tangency_tol;
            report.push("omega", format_complex(lat.omega()));
            let c = cusp_cellulation(&lat);
            let triangle = match &c {
                CuspCellulation::Rectangle { corners, diagonals } => {
                    report.push("cells", "1 (rectangle)");
                    report.push("corners", corners.map(format_complex).join(" "));
                    report.push("free diagonals", format!("{} {}", diagonals[0], diagonals[1]));
                    lat.delaunay_triangle(Some(&diagonals[0]))
                }
                CuspCellulation::Triangles { triangle, cells } => {
                    report.push("cells", "2 (triangles)");
                    for (i, t) in cells.iter().enumerate() {
                        report.push(&format!("cell {i}"), t.map(format_complex).join(" "));
                        if !is_acute(t, 0.0) {
                            bail!("cell {i} is not acute");
                        }
                        if let Some(p) = delaunay_violation(&lat, t, tol) {
                            bail!("lattice point {} lies inside the circumcircle of cell {i}", format_complex(lat.point(&p)));
                        }
                    }
                    triangle.clone()
                }
            };
            report.push("triangle", &triangle);
            ctx.write(report, "cellulation.svg", &cellulation_svg(&lat, &triangle))?;
        }
        CanonicalCmd::Bound { ell, lattice: l } => {
            let lat = lattice(l)?;
            if !(ell.is_finite() && *ell >= 0.0) {
                bail!("ell must be a nonnegative length, got {ell}");
            }
            let w = lat.omega().norm().min(1.0);
            report.push("omega", format_complex(lat.omega()));
            report.push("shortest vector", w);
            report.push("critical diameter", critical_diameter(&lat, w));
            report.push("L", problematic_bound(*ell, &lat));
        }
    }
    Ok(())
}

pub(crate) fn farey(cmd: &FareyCmd, report: &mut Report) -> Result<()> {
    let FareyCmd::Path { start, turns } = cmd;
    let start = FareyTriangle::parse(start).with_context(|| format!("start triangle `{start}`"))?;
    let word = parse_word(turns)?;
    let path = path_to_slope_limit(&start, &word);
    for (i, t) in path.iter().enumerate() {
        report.push(&format!("triangle {i}"), t);
    }
    let last = path.last().unwrap();
    let newest = LatticePoint::of_slope(&last.slopes()[2]);
    report.push("newest vector", format!("({}, {})", newest.m, newest.n));
    Ok(())
}
