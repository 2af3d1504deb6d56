//! One function per subcommand, each turning resolved arguments into a
//! [`Report`].

use orbitlab_core::analysis::{
    binary_correlation, concentration_diagnostic, correlation_table, min_twisted_distance,
    pretentious_distance_sq, values_along, ConcentrationArgument, LinearForm, TGrid,
};
use orbitlab_core::arith::{SpfTable, MAX_SIEVE_LIMIT};
use orbitlab_core::beurling::{
    beurling_polynomial, interval_indicator, interval_majorant, interval_minorant, offset_grid,
    sawtooth,
};
use orbitlab_core::discrepancy::{
    discrepancy_report, erdos_turan_bound, full_discrepancy_bound, r_weight, BinnedStar,
    CoverageAccumulator, CoverageReport, WeightedSample, STAR_CAP_1D, STAR_CAP_2D,
};
use orbitlab_core::scenarios::{
    counterexample_i, counterexample_ii, cross_violations, kronecker_search, kronecker_search_fast,
    orbit_for_each, orbit_scan, ppower_search, ratratio_family, ratratio_irrational, Direction,
    KroneckerQuery, PPowerQuery, Preset, SQRT2_MINUS_1, SQRT3_MINUS_1,
};
use orbitlab_core::sievecount::{
    delta_density, levelset_logmass, levelset_members, phi_count, ratio_to_f64, LevelSetQuery,
    SieveParams,
};
use orbitlab_core::sum::KahanSum;
use orbitlab_core::torus::{chord, e};
use orbitlab_core::{Angle, MultFnSpec};
use serde_json::{json, Value};

use crate::cli::*;
use crate::error::{CliError, CliResult};
use crate::report::{Cell, Report};
use crate::spec::{parse_angle, spec_from_value, FnSpecDoc};

fn preset(name: &str) -> CliResult<Preset> {
    Preset::from_name(name).ok_or_else(|| {
        let names: Vec<&str> = Preset::ALL.iter().map(|p| p.name()).collect();
        CliError::config(
            "preset",
            format!(
                "unknown preset `{name}`; choose one of {}",
                names.join(", ")
            ),
        )
    })
}

/// `f` and `g` from a preset, overridden by explicit specs.
fn functions(args: &FnArgs) -> CliResult<(Option<MultFnSpec>, Option<MultFnSpec>)> {
    let (mut f, mut g) = match &args.preset {
        Some(name) => {
            let (f, g) = preset(name)?.functions()?;
            (Some(f), Some(g))
        }
        None => (None, None),
    };
    if let Some(v) = &args.f {
        f = Some(spec_from_value(v, "f")?);
    }
    if let Some(v) = &args.g {
        g = Some(spec_from_value(v, "g")?);
    }
    Ok((f, g))
}

fn need<T>(v: Option<T>, field: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::config(field, "required"))
}

fn pair(args: &FnArgs, report: &mut Report) -> CliResult<(MultFnSpec, MultFnSpec)> {
    let (f, g) = functions(args)?;
    let (f, g) = (need(f, "f")?, need(g, "g")?);
    report.note(
        "functions",
        json!({"f": FnSpecDoc::from_spec(&f), "g": FnSpecDoc::from_spec(&g)}),
    );
    Ok((f, g))
}

fn x_grid(xs: &[Count], default: &[u64], min: u64) -> CliResult<Vec<u64>> {
    let xs: Vec<u64> = if xs.is_empty() {
        default.to_vec()
    } else {
        xs.iter().map(|c| c.0).collect()
    };
    if xs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::config("x", "grid must be strictly increasing"));
    }
    if xs[0] < min {
        return Err(CliError::config("x", format!("values must be ≥ {min}")));
    }
    Ok(xs)
}

/// A sieve reaching `limit`, reporting overflow against `name`.
fn table_for(name: &str, value: u64, limit: u64) -> CliResult<SpfTable> {
    if limit > MAX_SIEVE_LIMIT {
        return Err(CliError::Reach {
            name: name.into(),
            value,
            reach: MAX_SIEVE_LIMIT - (limit - value),
        });
    }
    Ok(SpfTable::new(limit.max(2))?)
}

fn direction(d: Option<DirectionArg>) -> Direction {
    match d.unwrap_or_default() {
        DirectionArg::Forward => Direction::Forward,
        DirectionArg::Backward => Direction::Backward,
    }
}

fn positive(v: Option<usize>, default: usize, field: &str, min: usize) -> CliResult<usize> {
    let v = v.unwrap_or(default);
    if v < min {
        return Err(CliError::config(field, format!("must be ≥ {min}")));
    }
    Ok(v)
}

fn ln(x: u64) -> f64 {
    (x as f64).ln()
}

fn coverage_json<const D: usize>(x: u64, cov: &CoverageReport<D>) -> Value {
    let off_cross = cov
        .empty_cells
        .iter()
        .filter(|c| c.iter().all(|&i| i != 0))
        .count();
    json!({
        "x": x,
        "empty_cells": cov.empty_cells.len(),
        "off_cross_empty": off_cross,
        "empty": cov.empty_cells.iter().map(|c| c.to_vec()).collect::<Vec<_>>(),
        "min_mass": cov.min_mass,
        "max_mass": cov.max_mass,
        "total_mass": cov.total_mass,
    })
}

fn orbit_coverage(
    f: &MultFnSpec,
    g: &MultFnSpec,
    x: u64,
    dir: Direction,
    grid: usize,
    table: &SpfTable,
) -> CliResult<CoverageReport<2>> {
    let mut acc = CoverageAccumulator::<2>::new(grid)?;
    orbit_for_each(f, g, x, dir, table, |n, p| acc.add(p, 1.0 / n as f64))?;
    Ok(acc.finish(ln(x)))
}

fn marginal_coverage(
    f: &MultFnSpec,
    x: u64,
    grid: usize,
    table: &SpfTable,
) -> CliResult<CoverageReport<1>> {
    let values = values_along(f, 1, 0, x, table)?;
    let mut acc = CoverageAccumulator::<1>::new(grid)?;
    for (n, &v) in values.iter().enumerate().skip(2) {
        acc.add([v], 1.0 / n as f64);
    }
    Ok(acc.finish(ln(x)))
}

pub fn scan(a: &ScanArgs, config: Value) -> CliResult<Report> {
    let columns: &[&str] = if a.dump {
        &["n", "first", "second", "weight"]
    } else {
        &[
            "x",
            "points",
            "total_mass",
            "harmonic_mass",
            "d_star_lower",
            "d_star_upper",
            "d_star_exact",
            "empty_cells",
        ]
    };
    let mut report = Report::new("scan", config, columns);
    let (f, g) = pair(&a.functions, &mut report)?;
    let xs = x_grid(&a.x, &[1_000_000], 2)?;
    let top = *xs.last().unwrap_or(&2);
    let dir = direction(a.direction);
    let grid = positive(a.grid, 8, "grid", 2)?;
    let bins = positive(a.bins, 64, "bins", 1)?;
    let table = table_for("x", top, top + 1)?;
    if a.dump {
        let mut rows = Vec::new();
        orbit_for_each(&f, &g, top, dir, &table, |n, p| {
            rows.push(vec![
                n.into(),
                p[0].into(),
                p[1].into(),
                (1.0 / n as f64).into(),
            ]);
        })?;
        report.rows = rows;
        report.note("norm", ln(top));
        return Ok(report);
    }
    for &x in &xs {
        let mut cov = CoverageAccumulator::<2>::new(grid)?;
        let mut binned = BinnedStar::new(bins)?;
        let mut mass = KahanSum::new();
        orbit_for_each(&f, &g, x, dir, &table, |n, p| {
            let w = 1.0 / n as f64;
            cov.add(p, w);
            binned.add(p, w);
            mass.add(w);
        })?;
        let points = x - 1;
        let (lo, hi, exact) = if points as usize <= STAR_CAP_2D {
            let d = discrepancy_report(&orbit_scan(&f, &g, x, dir, &table)?.sample)?.d_star;
            (d, d, true)
        } else {
            let (lo, hi) = binned.bounds(ln(x));
            (lo, hi, false)
        };
        let harmonic = (2..=x)
            .map(|n| 1.0 / n as f64)
            .collect::<KahanSum>()
            .value()
            / ln(x);
        report.row(vec![
            x.into(),
            points.into(),
            (mass.value() / ln(x)).into(),
            harmonic.into(),
            lo.into(),
            hi.into(),
            exact.into(),
            cov.finish(ln(x)).empty_cells.len().into(),
        ]);
    }
    Ok(report)
}

pub fn coverage(a: &CoverageArgs, config: Value) -> CliResult<Report> {
    let mut report = Report::new("coverage", config, &["x", "i", "j", "mass", "empty"]);
    let xs = x_grid(&a.x, &[1_000_000], 2)?;
    let top = *xs.last().unwrap_or(&2);
    let grid = positive(a.grid, 8, "grid", 2)?;
    let dim = a.dim.unwrap_or(2);
    let table = table_for("x", top, top + 1)?;
    let mut runs = Vec::new();
    match dim {
        2 => {
            let (f, g) = pair(&a.functions, &mut report)?;
            for &x in &xs {
                let cov = orbit_coverage(&f, &g, x, direction(a.direction), grid, &table)?;
                for i in 0..grid {
                    for j in 0..grid {
                        let m = cov.mass([i, j]);
                        report.row(vec![
                            x.into(),
                            i.into(),
                            j.into(),
                            m.into(),
                            (m == 0.0).into(),
                        ]);
                    }
                }
                runs.push(coverage_json(x, &cov));
            }
        }
        1 => {
            let (f, _) = functions(&a.functions)?;
            let f = need(f, "f")?;
            report.note("functions", json!({"f": FnSpecDoc::from_spec(&f)}));
            for &x in &xs {
                let cov = marginal_coverage(&f, x, grid, &table)?;
                for i in 0..grid {
                    let m = cov.mass([i]);
                    report.row(vec![
                        x.into(),
                        i.into(),
                        Cell::Missing,
                        m.into(),
                        (m == 0.0).into(),
                    ]);
                }
                runs.push(coverage_json(x, &cov));
            }
        }
        _ => return Err(CliError::config("dim", "must be 1 or 2")),
    }
    report.note("runs", runs);
    Ok(report)
}

pub fn discrepancy(a: &DiscrepancyArgs, config: Value) -> CliResult<Report> {
    let mut report = Report::new(
        "discrepancy",
        config,
        &[
            "x",
            "points",
            "d_star_lower",
            "d_star_upper",
            "d_full",
            "full_lower",
            "full_upper",
        ],
    );
    let xs = x_grid(&a.x, &[10_000], 2)?;
    let top = *xs.last().unwrap_or(&2);
    let table = table_for("x", top, top + 1)?;
    match a.dim.unwrap_or(2) {
        1 => {
            let (f, _) = functions(&a.functions)?;
            let f = need(f, "f")?;
            report.note("functions", json!({"f": FnSpecDoc::from_spec(&f)}));
            for &x in &xs {
                if x - 1 > STAR_CAP_1D as u64 {
                    return Err(CliError::config(
                        "x",
                        format!("d = 1 is exact only up to {} points", STAR_CAP_1D),
                    ));
                }
                let values = values_along(&f, 1, 0, x, &table)?;
                let sample =
                    WeightedSample::logarithmic(values[2..].iter().map(|&v| [v]).collect(), 2)?;
                let r = discrepancy_report(&sample)?;
                let b = full_discrepancy_bound(&sample)?;
                report.row(vec![
                    x.into(),
                    sample.len().into(),
                    r.d_star.into(),
                    r.d_star.into(),
                    r.d_full.into(),
                    b.lower.into(),
                    b.upper.into(),
                ]);
            }
        }
        2 => {
            let (f, g) = pair(&a.functions, &mut report)?;
            let bins = positive(a.bins, 256, "bins", 1)?;
            for &x in &xs {
                let (lo, hi) = if (x - 1) as usize <= STAR_CAP_2D {
                    let d = discrepancy_report(
                        &orbit_scan(&f, &g, x, Direction::Forward, &table)?.sample,
                    )?
                    .d_star;
                    (d, d)
                } else {
                    let mut binned = BinnedStar::new(bins)?;
                    orbit_for_each(&f, &g, x, Direction::Forward, &table, |n, p| {
                        binned.add(p, 1.0 / n as f64)
                    })?;
                    binned.bounds(ln(x))
                };
                report.row(vec![
                    x.into(),
                    (x - 1).into(),
                    lo.into(),
                    hi.into(),
                    Cell::Missing,
                    lo.into(),
                    (4.0 * hi).into(),
                ]);
            }
        }
        _ => return Err(CliError::config("dim", "must be 1 or 2")),
    }
    Ok(report)
}

pub fn et_bound(a: &EtBoundArgs, config: Value) -> CliResult<Report> {
    let columns: &[&str] = if a.coeffs {
        &["m1", "m2", "re", "im", "abs", "R"]
    } else {
        &["x", "K", "bound", "grid_term"]
    };
    let mut report = Report::new("et-bound", config, columns);
    let (f, g) = pair(&a.functions, &mut report)?;
    let xs = x_grid(&a.x, &[1_000_000], 2)?;
    let top = *xs.last().unwrap_or(&2);
    let k = positive(a.k, 8, "K", 1)?;
    let table = table_for("x", top, top + 1)?;
    if a.coeffs {
        let coeffs = correlation_table(&f, &g, k, top, &table)?;
        for (&(m1, m2), c) in &coeffs {
            report.row(vec![
                m1.into(),
                m2.into(),
                c.re.into(),
                c.im.into(),
                c.norm().into(),
                r_weight(m1, m2).into(),
            ]);
        }
        report.note("bound", erdos_turan_bound(&coeffs, k, ln(top))?);
        return Ok(report);
    }
    for &x in &xs {
        let coeffs = correlation_table(&f, &g, k, x, &table)?;
        let bound = erdos_turan_bound(&coeffs, k, ln(x))?;
        report.row(vec![
            x.into(),
            k.into(),
            bound.into(),
            (1.0 / (k + 1) as f64).into(),
        ]);
    }
    Ok(report)
}

pub fn distance(a: &DistanceArgs, config: Value) -> CliResult<Report> {
    let mut report = Report::new(
        "distance",
        config,
        &[
            "x",
            "squared_distance",
            "distance",
            "prime_terms",
            "best_t",
            "best_squared_distance",
        ],
    );
    let (f, g) = pair(&a.functions, &mut report)?;
    let xs = x_grid(&a.x, &[1_000_000], 2)?;
    let top = *xs.last().unwrap_or(&2);
    let table = table_for("x", top, top)?;
    let grid = a.t_max.map(|t_max| TGrid {
        t_min: a.t_min.unwrap_or(0.01),
        t_max,
        per_decade: a.per_decade.unwrap_or(10),
    });
    for &x in &xs {
        let d = pretentious_distance_sq(&f, &g, a.n_low.unwrap_or(0), x, &table)?;
        let best = match &grid {
            Some(grid) => Some(min_twisted_distance(&f, &g, grid, x, &table)?),
            None => None,
        };
        report.row(vec![
            x.into(),
            d.squared_distance.into(),
            d.distance().into(),
            d.prime_terms.into(),
            best.map(|b| b.0).into(),
            best.map(|b| b.1).into(),
        ]);
    }
    Ok(report)
}

pub fn correlation(a: &CorrelationArgs, config: Value) -> CliResult<Report> {
    let mut report = Report::new("correlation", config, &["x", "re", "im", "abs"]);
    let (f, g) = pair(&a.functions, &mut report)?;
    let xs = x_grid(&a.x, &[1_000_000], 2)?;
    let top = *xs.last().unwrap_or(&2);
    let first = LinearForm::new(a.a1.unwrap_or(1), a.b1.unwrap_or(0));
    let second = LinearForm::new(a.a2.unwrap_or(1), a.b2.unwrap_or(1));
    let reach = (first.a * top + first.b).max(second.a * top + second.b);
    let table = table_for("x", top, reach.min(MAX_SIEVE_LIMIT).max(top))?;
    let mut degenerate = false;
    for &x in &xs {
        let c = binary_correlation(&f, &g, first, second, x, &table)?;
        degenerate = c.degenerate;
        report.row(vec![
            x.into(),
            c.value.re.into(),
            c.value.im.into(),
            c.value.norm().into(),
        ]);
    }
    report.note("degenerate", degenerate);
    Ok(report)
}

pub fn sieve(a: &SieveArgs, config: Value) -> CliResult<Report> {
    let mut report = Report::new(
        "sieve",
        config,
        &[
            "x",
            "count",
            "delta",
            "delta_exact",
            "main_term",
            "residual",
        ],
    );
    let n = need(a.n, "N")?;
    let params = SieveParams::new(n, a.b.unwrap_or(1), a.q.unwrap_or(1), a.a.unwrap_or(0))?;
    let xs = x_grid(&a.x, &[1_000_000], 1)?;
    let top = *xs.last().unwrap_or(&1);
    let table = table_for("x", top, top.max(n))?;
    let delta = delta_density(&params);
    let d = ratio_to_f64(&delta);
    let pi_n = table.prime_count(n)?;
    for &x in &xs {
        let count = phi_count(&params, x, &table)?;
        report.row(vec![
            x.into(),
            count.into(),
            d.into(),
            format!("{}/{}", delta.numer(), delta.denom()).into(),
            (d * x as f64).into(),
            ((count as f64 - d * x as f64) / 4f64.powi(pi_n as i32)).into(),
        ]);
    }
    report.note("admissible", params.is_admissible());
    report.note("pi_N", pi_n);
    Ok(report)
}

pub fn levelset(a: &LevelsetArgs, config: Value) -> CliResult<Report> {
    let mut report = Report::new("levelset", config, &["x", "count", "logmass"]);
    let h1 = spec_from_value(&need(a.h1.clone(), "h1")?, "h1")?;
    let h2 = spec_from_value(&need(a.h2.clone(), "h2")?, "h2")?;
    let angle = |s: &Option<String>, field: &str| -> CliResult<Angle> {
        parse_angle(s.as_deref().unwrap_or("0")).map_err(|r| CliError::config(field, r))
    };
    let n = need(a.n, "N")?;
    let params = SieveParams::new(n, a.b.unwrap_or(1), a.q.unwrap_or(1), a.a.unwrap_or(0))?;
    let query = LevelSetQuery::new(
        params,
        h1,
        h2,
        angle(&a.alpha, "alpha")?,
        angle(&a.beta, "beta")?,
    );
    let xs = x_grid(&a.x, &[100_000], 2)?;
    let top = *xs.last().unwrap_or(&2);
    let table = table_for("x", top, top.max(n))?;
    for &x in &xs {
        let members = levelset_members(&query, x, &table)?;
        report.row(vec![
            x.into(),
            members.len().into(),
            levelset_logmass(&query, x, &table)?.into(),
        ]);
        if a.members && x == top {
            report.note("members", members);
        }
    }
    Ok(report)
}

pub fn beurling(a: &BeurlingArgs, config: Value) -> CliResult<Report> {
    let k = positive(a.k, 8, "K", 1)?;
    let samples = positive(a.samples, 1000, "samples", 1)?;
    if a.coeffs {
        let mut report = Report::new("beurling", config, &["m", "re", "im"]);
        let bk = beurling_polynomial(k)?;
        for (m, c) in bk.coefficients() {
            report.row(vec![m.into(), c.re.into(), c.im.into()]);
        }
        report.note("mean", bk.mean().re);
        return Ok(report);
    }
    match a.interval.as_slice() {
        [] => {
            let mut report = Report::new("beurling", config, &["t", "psi", "majorant", "minorant"]);
            let bk = beurling_polynomial(k)?;
            for t in offset_grid(samples) {
                report.row(vec![
                    t.into(),
                    sawtooth(t).into(),
                    bk.eval_real(t).into(),
                    (-bk.eval_real(-t)).into(),
                ]);
            }
            Ok(report)
        }
        &[lo, hi] => {
            let mut report = Report::new(
                "beurling",
                config,
                &["t", "indicator", "minorant", "majorant"],
            );
            let upper = interval_majorant(k, lo, hi)?;
            let lower = interval_minorant(k, lo, hi)?;
            for t in offset_grid(samples) {
                report.row(vec![
                    t.into(),
                    interval_indicator(lo, hi, t).into(),
                    lower.poly.eval_real(t).into(),
                    upper.poly.eval_real(t).into(),
                ]);
            }
            report.note("majorant_mean", upper.poly.mean().re);
            report.note("minorant_mean", lower.poly.mean().re);
            report.note("minorant_degenerate", lower.degenerate);
            Ok(report)
        }
        _ => Err(CliError::config(
            "interval",
            "give exactly two endpoints a,b",
        )),
    }
}

pub fn counterexample(a: &CounterexampleArgs, config: Value) -> CliResult<Report> {
    let xs = x_grid(&a.x, &[1_000_000], 2)?;
    let top = *xs.last().unwrap_or(&2);
    let grid = positive(a.grid, 8, "grid", 2)?;
    match a.which.unwrap_or_default() {
        Family::I => {
            let mut report = Report::new(
                "counterexample",
                config,
                &["x", "empty_cells", "marginal_f_empty", "marginal_g_empty"],
            );
            let (k, l, t) = (a.k.unwrap_or(2), a.l.unwrap_or(2), a.t.unwrap_or(1.0));
            let (f, g) = counterexample_i(k, l, t)?;
            report.note(
                "functions",
                json!({"f": FnSpecDoc::from_spec(&f), "g": FnSpecDoc::from_spec(&g)}),
            );
            let check = a.check_x.map_or(10_000, |c| c.0).max(1);
            let table = table_for("x", top.max(check), top.max(check) + 1)?;
            let mut worst: f64 = 0.0;
            for n in 1..=check {
                let lhs = f.eval(&table, n)?.scale(k as i64);
                let rhs = orbitlab_core::torus::archimedean_angle(n, k as f64 * t)?;
                worst = worst.max(lhs.circular_distance(rhs));
                let lhs = g.eval(&table, n)?.scale(l as i64);
                let rhs = orbitlab_core::torus::archimedean_angle(n, l as f64 * t)?;
                worst = worst.max(lhs.circular_distance(rhs));
            }
            report.note("identity_error", worst);
            report.note("check_x", check);
            let mut runs = Vec::new();
            for &x in &xs {
                let cov = orbit_coverage(&f, &g, x, Direction::Forward, grid, &table)?;
                let mf = marginal_coverage(&f, x, 2 * grid, &table)?
                    .empty_cells
                    .len();
                let mg = marginal_coverage(&g, x, 2 * grid, &table)?
                    .empty_cells
                    .len();
                report.row(vec![
                    x.into(),
                    cov.empty_cells.len().into(),
                    mf.into(),
                    mg.into(),
                ]);
                runs.push(coverage_json(x, &cov));
            }
            report.note("runs", runs);
            Ok(report)
        }
        Family::Ii => {
            let mut report = Report::new(
                "counterexample",
                config,
                &["x", "empty_cells", "off_cross_empty"],
            );
            let p = a.p.unwrap_or(2);
            let (f, g) = counterexample_ii(
                p,
                Angle::real(a.alpha.unwrap_or(SQRT2_MINUS_1)),
                Angle::real(a.beta.unwrap_or(SQRT3_MINUS_1)),
            )?;
            report.note(
                "functions",
                json!({"f": FnSpecDoc::from_spec(&f), "g": FnSpecDoc::from_spec(&g)}),
            );
            let check = a.check_x.map_or(top, |c| c.0).max(1);
            let table = table_for("x", top.max(check), top.max(check) + 1)?;
            report.note("cross_violations", cross_violations(&f, &g, check, &table)?);
            report.note("check_x", check);
            let mut runs = Vec::new();
            for &x in &xs {
                let cov = orbit_coverage(&f, &g, x, Direction::Forward, grid, &table)?;
                let json = coverage_json(x, &cov);
                report.row(vec![
                    x.into(),
                    cov.empty_cells.len().into(),
                    json["off_cross_empty"].as_u64().into(),
                ]);
                runs.push(json);
            }
            report.note("runs", runs);
            Ok(report)
        }
    }
}

pub fn ratratio(a: &RatratioArgs, config: Value) -> CliResult<Report> {
    let mut report = Report::new(
        "ratratio",
        config,
        &["x", "diagonal_violations", "max_scaled_gap", "empty_cells"],
    );
    let (k, l) = (a.k.unwrap_or(2), a.l.unwrap_or(3));
    let family = if a.irrational {
        ratratio_irrational(k, l, a.t_prime.unwrap_or(5.0))?
    } else {
        ratratio_family(
            k,
            l,
            a.r1.unwrap_or(2),
            a.s1.unwrap_or(3),
            a.t_prime.unwrap_or(1.0),
        )?
    };
    let (pf, pg) = family.powered();
    let u = family.powered_twists().0;
    report.note(
        "family",
        json!({
            "f": FnSpecDoc::from_spec(&family.f),
            "g": FnSpecDoc::from_spec(&family.g),
            "t": family.t,
            "t_prime": family.t_prime,
            "exponents": [family.exponents.0, family.exponents.1],
            "u": u,
        }),
    );
    let xs = x_grid(&a.x, &[1_000_000], 2)?;
    let top = *xs.last().unwrap_or(&2);
    let grid = positive(a.grid, 8, "grid", 2)?;
    let table = table_for("x", top, top + 1)?;
    for &x in &xs {
        let mut cov = CoverageAccumulator::<2>::new(grid)?;
        let mut violations = 0u64;
        let mut worst: f64 = 0.0;
        orbit_for_each(&pf, &pg, x, Direction::Forward, &table, |n, p| {
            cov.add(p, 1.0 / n as f64);
            let gap = (e(p[0]) - e(p[1])).norm();
            let scaled = gap * n as f64 / u.abs();
            worst = worst.max(scaled);
            violations += (scaled > 1.0) as u64;
        })?;
        let (violations, worst) = if a.irrational {
            (None, None)
        } else {
            (Some(violations), Some(worst))
        };
        report.row(vec![
            x.into(),
            violations.into(),
            worst.into(),
            cov.finish(ln(x)).empty_cells.len().into(),
        ]);
    }
    Ok(report)
}

pub fn kronecker(a: &KroneckerArgs, config: Value) -> CliResult<Report> {
    if let Some(spec) = &a.f {
        let mut report = Report::new("kronecker", config, &["p", "m", "value_gap", "arc_gap"]);
        let f = spec_from_value(spec, "f")?;
        let z = parse_angle(a.z.as_deref().unwrap_or("0")).map_err(|r| CliError::config("z", r))?;
        let bound = a.prime_bound.map_or(10_000, |c| c.0);
        let query = PPowerQuery {
            f,
            z,
            u: a.u.unwrap_or(0.0),
            delta: a.delta.unwrap_or(0.1),
            eta: a.eta.unwrap_or(0.05),
            k: a.k.unwrap_or(1),
            n: a.n.unwrap_or(1),
            prime_bound: bound,
            m_max: a.m.map_or(1000, |c| c.0),
        };
        let table = table_for("prime_bound", bound, bound)?;
        match ppower_search(&query, &table)? {
            Some(hit) => {
                report.row(vec![
                    hit.p.into(),
                    hit.m.into(),
                    hit.value_gap.into(),
                    hit.arc_gap.into(),
                ]);
                report.note("found", true);
                report.note("certified", query.certify(&hit, &table)?);
            }
            None => report.note("found", false),
        }
        return Ok(report);
    }
    let mut report = Report::new("kronecker", config, &["j", "alpha", "target", "distance"]);
    let angles = |v: &[String], field: &str| -> CliResult<Vec<Angle>> {
        v.iter()
            .map(|s| parse_angle(s).map_err(|r| CliError::config(field, r)))
            .collect()
    };
    let alphas = angles(&a.alpha, "alpha")?;
    let targets = angles(&a.target, "target")?;
    let query = KroneckerQuery::new(
        alphas.clone(),
        targets.clone(),
        a.eta.unwrap_or(0.01),
        a.m.map_or(100_000, |c| c.0),
        a.k.unwrap_or(1),
    )?;
    let found = if a.fast {
        kronecker_search_fast(&query)?
    } else {
        kronecker_search(&query)?
    };
    if alphas.len() == 1 {
        let other = if a.fast {
            kronecker_search(&query)?
        } else {
            kronecker_search_fast(&query)?
        };
        report.note("modes_agree", other == found);
    }
    report.note("m", found);
    if let Some(m) = found {
        for (j, (&al, &ta)) in alphas.iter().zip(&targets).enumerate() {
            let d = al.scale(m as i64).circular_distance(ta);
            report.row(vec![
                j.into(),
                al.to_f64().into(),
                ta.to_f64().into(),
                d.into(),
            ]);
        }
        report.note(
            "chord",
            alphas
                .iter()
                .zip(&targets)
                .map(|(&al, &ta)| chord(al.scale(m as i64), ta))
                .collect::<Vec<_>>(),
        );
    }
    Ok(report)
}

pub fn concentration(a: &ConcentrationArgs, config: Value) -> CliResult<Report> {
    let mut report = Report::new(
        "concentration",
        config,
        &[
            "x",
            "lhs",
            "phi",
            "distance_sq",
            "inv_n",
            "drift",
            "main_term",
            "error_term",
            "ratio",
            "main_ratio",
        ],
    );
    let (f, _) = functions(&a.functions)?;
    let f = need(f, "f")?;
    report.note("functions", json!({"f": FnSpecDoc::from_spec(&f)}));
    let n = need(a.n, "N")?;
    let b = a.b.unwrap_or(2);
    let xs = x_grid(&a.x, &[100_000], 3)?;
    let top = *xs.last().unwrap_or(&3);
    let arg = match a.argument.unwrap_or_default() {
        ArgumentArg::N => ConcentrationArgument::N,
        ArgumentArg::Shifted => ConcentrationArgument::Shifted,
    };
    let reach = match arg {
        ConcentrationArgument::N => top,
        ConcentrationArgument::Shifted => {
            top.saturating_mul(b).saturating_add(1).min(MAX_SIEVE_LIMIT)
        }
    };
    let table = table_for("x", top, reach.max(top))?;
    for &x in &xs {
        let r = concentration_diagnostic(&f, n, b, x, arg, &table)?;
        report.row(vec![
            x.into(),
            r.lhs.into(),
            r.phi.into(),
            r.distance_sq.into(),
            r.inv_n.into(),
            r.drift.into(),
            r.main_term().into(),
            r.error_term.into(),
            r.ratio().into(),
            r.main_ratio().into(),
        ]);
    }
    Ok(report)
}
