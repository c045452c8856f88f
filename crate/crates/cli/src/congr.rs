use anyhow::{anyhow, bail, Context as _, Result};

use hyptri::congruence::{
    find_prime_with_order, loxodromic_obstruction, separate_from_zomega, trace_targets, verify_obstruction, zomega_image_contains, Certificate, CongruenceError, LoxodromicData, NFElem,
    NumberField, OmegaCoords, Track,
};

use crate::{CongrCmd, Context, Report, Status, TrackArg};

fn field(minpoly: &str) -> Result<NumberField> {
    NumberField::parse(minpoly).with_context(|| format!("minimal polynomial `{minpoly}`"))
}

fn elem(k: &NumberField, s: &str) -> Result<NFElem> {
    k.parse_elem(s).with_context(|| format!("element `{s}`"))
}

fn certify(ctx: &Context, report: &mut Report, name: &str, c: &Certificate) -> Result<()> {
    for (k, v) in &c.records {
        report.push(k, v);
    }
    ctx.write(report, name, &c.to_text())?;
    Ok(())
}

/// Search exhaustion is inconclusive; other errors propagate.
fn settle<T>(r: Result<T, CongruenceError>, report: &mut Report) -> Result<Option<T>> {
    match r {
        Ok(x) => Ok(Some(x)),
        Err(CongruenceError::SearchExhausted { bound }) => {
            report.push("search", format!("no witness among primes below {bound}"));
            report.status = Status::Inconclusive;
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

fn parse_matrix(k: &NumberField, s: &str) -> Result<[[NFElem; 2]; 2]> {
    let rows: Vec<&str> = s.split(';').collect();
    let entries: Vec<Vec<&str>> = rows.iter().map(|r| r.split(',').collect()).collect();
    if entries.len() != 2 || entries.iter().any(|r| r.len() != 2) {
        bail!("matrix must be `a,b;c,d`, got `{s}`");
    }
    let e = |i: usize, j: usize| elem(k, entries[i][j].trim());
    Ok([[e(0, 0)?, e(0, 1)?], [e(1, 0)?, e(1, 1)?]])
}

pub(crate) fn congr(ctx: &Context, cmd: &CongrCmd, report: &mut Report) -> Result<()> {
    match cmd {
        CongrCmd::Order { field: f, lambda, q, nonzero } => {
            let k = field(&f.minpoly)?;
            let lam = elem(&k, lambda)?;
            let nz = nonzero.iter().map(|s| elem(&k, s)).collect::<Result<Vec<_>>>()?;
            let bound = f.bound.unwrap_or(ctx.config.prime_bound);
            if let Some(w) = settle(find_prime_with_order(&k, &lam, *q, &nz, bound), report)? {
                certify(ctx, report, "congr-order.cert", &w.certificate)?;
            }
        }
        CongrCmd::Separate { field: f, y, omega } => {
            let k = field(&f.minpoly)?;
            let (y, w) = (elem(&k, y)?, elem(&k, omega)?);
            let bound = f.bound.unwrap_or(ctx.config.prime_bound);
            if let Some(sep) = settle(separate_from_zomega(&k, &y, &w, bound), report)? {
                if zomega_image_contains(&sep.maps, &y, &w)? {
                    bail!("re-verification found y in the image");
                }
                certify(ctx, report, "congr-separate.cert", &sep.certificate)?;
            }
        }
        CongrCmd::Targets { field: f, matrix } => {
            let k = field(&f.minpoly)?;
            let g = parse_matrix(&k, matrix)?;
            let (plus, minus) = trace_targets(&k, &g)?;
            report.push("y+", k.format_elem(&plus));
            report.push("y-", k.format_elem(&minus));
        }
        CongrCmd::Obstruct { field: f, omega_minpoly, omega, coords, track, r, u, lambda } => {
            let ok = field(omega_minpoly)?;
            let w = elem(&ok, omega)?;
            let c: Vec<i64> = coords.split(',').map(|t| t.trim().parse::<i64>()).collect::<Result<_, _>>().map_err(|_| anyhow!("coords must be `m,n,v`, got `{coords}`"))?;
            let [m, n, v] = c[..] else { bail!("coords must be `m,n,v`, got `{coords}`") };
            let k = field(&f.minpoly)?;
            let data = LoxodromicData {
                omega_field: ok,
                omega: w,
                coords: OmegaCoords::new(m, n, v)?,
                track: match track {
                    TrackArg::M => Track::M,
                    TrackArg::N => Track::N,
                },
                r: elem(&k, r)?,
                u: elem(&k, u)?,
                lambda: elem(&k, lambda)?,
                field: k,
            };
            let bound = f.bound.unwrap_or(ctx.config.prime_bound);
            if let Some(wit) = settle(loxodromic_obstruction(&data, bound), report)? {
                let scanned = verify_obstruction(&data, &wit)?;
                report.push("rescanned exponents", scanned);
                certify(ctx, report, "congr-obstruct.cert", &wit.certificate)?;
            }
        }
    }
    Ok(())
}
