//! Subcommand bodies. Each resolves its settings, computes, and hands an
//! [`Outcome`] to the writer.

use crate::config::{Heights, ManifoldRef, RunConfig};
use crate::output::{emit, failed, invalid, CsvRow, Failure, Invocation, Outcome};
use bubble_tower::acceptance::{CriterionReport, Profile, SuiteReport, CRITERIA};
use bubble_tower::constants::{compute_constants, exponent_schedule, EnergyConstants};
use bubble_tower::geometry::{
    builtin_catalog, curvature_at, load_catalog, sample_points, symmetry_check, weyl_norm, Catalog, CatalogEntry,
    WeylExpectation, DEFAULT_FD_STEP, FLAT_WEYL_TOL, NONZERO_WEYL,
};
use bubble_tower::reduced::{hessian_check, maximize_sequential, InteractionSource, ReducedModel};
use bubble_tower::tower::{
    eps_grid, flat_energy, slope_fit, SlopeFit, SweepPoint, SweepQuantity, SweepSeries, TowerConfig,
};
use bubble_tower::{Error, Scaled};
use rayon::prelude::*;
use serde::Serialize;

const CONSTANTS_TOL: f64 = 1e-10;
const QUICK_MAX_POINTS: usize = 12;
const QUICK_MAX_HEIGHT: usize = 3;

/// Input problems map to exit code 2, everything else to 1.
fn classify(e: Error) -> Failure {
    match e {
        Error::DimensionTooLow { .. }
        | Error::Invalid(_)
        | Error::IndexOutOfRange { .. }
        | Error::NonMonotoneScales
        | Error::DegenerateWeyl(_)
        | Error::StepTooSmall(_) => invalid(e),
        _ => failed(e),
    }
}

pub fn dispatch(inv: &Invocation, c: RunConfig) -> Result<bool, Failure> {
    match inv.name {
        "constants" => emit(inv, constants(c)?),
        "schedule" => emit(inv, schedule(c)?),
        "sweep-interaction" => emit(inv, sweep(c, false)?),
        "sweep-error" => emit(inv, sweep(c, true)?),
        "energy-check" => emit(inv, energy_check(c)?),
        "maximize" => emit(inv, maximize(c)?),
        "weyl" => emit(inv, weyl(c)?),
        "symmetry" => emit(inv, symmetry(c)?),
        "accept" => emit(inv, accept(c, inv)?),
        "catalog" => {
            let text = serde_json::to_string_pretty(&catalog(&c)?).map_err(failed)?;
            println!("{text}");
            Ok(true)
        }
        other => Err(Failure::Config(format!("unknown command {other}"))),
    }
}

fn constants_for(dim: usize) -> Result<EnergyConstants, Failure> {
    compute_constants(dim, CONSTANTS_TOL).map_err(classify)
}

fn constants(mut c: RunConfig) -> Result<Outcome<EnergyConstants>, Failure> {
    let dim = *c.dim.get_or_insert(7);
    let tol = *c.rel_tol.get_or_insert(CONSTANTS_TOL);
    let k = compute_constants(dim, tol).map_err(classify)?;
    let mut out = Outcome::new(c, k);
    let k = &out.result;
    out.summary = vec![
        format!("N = {dim}"),
        format!("kn_pow = {:.12e}", k.kn_pow),
        format!("c0     = {:.12e}", k.c0),
        format!("A = {:.9e}  B = {:.9e}  C = {:.9e}", k.a_n, k.b_n, k.c_n),
        format!("B (quadrature) = {:.9e}  C (quadrature) = {:.9e}", k.b_hat, k.c_hat),
        k.convention_note.clone(),
    ];
    Ok(out)
}

#[derive(Serialize)]
struct ScheduleResult {
    dim: usize,
    rows: Vec<bubble_tower::constants::ScheduleRow>,
}

fn schedule(mut c: RunConfig) -> Result<Outcome<ScheduleResult>, Failure> {
    let dim = *c.dim.get_or_insert(7);
    let k = *c.k.get_or_insert(3);
    let rows = exponent_schedule(dim, k).map_err(classify)?.rows();
    let mut summary = vec![format!("{:>5}  {:>24}  {:>24}", "level", "gamma", "theta")];
    summary.extend(rows.iter().map(|r| format!("{:>5}  {:>24}  {:>24}", r.level, r.gamma, r.theta)));
    let mut out = Outcome::new(c, ScheduleResult { dim, rows });
    out.summary = summary;
    Ok(out)
}

fn catalog(c: &RunConfig) -> Result<Catalog, Failure> {
    match &c.catalog {
        Some(p) => load_catalog(p).map_err(invalid),
        None => Ok(builtin_catalog()),
    }
}

fn manifold(c: &RunConfig) -> Result<(String, CatalogEntry), Failure> {
    match &c.manifold {
        None => Err(Failure::Config("no manifold given".into())),
        Some(ManifoldRef::Inline(e)) => {
            e.spec.validate().map_err(invalid)?;
            Ok(("inline".into(), (**e).clone()))
        }
        Some(ManifoldRef::Key(k)) => {
            let cat = catalog(c)?;
            let e = cat.get(k).cloned().ok_or_else(|| {
                let known: Vec<&str> = cat.keys().map(String::as_str).collect();
                Failure::Config(format!("unknown manifold {k:?}; known: {}", known.join(", ")))
            })?;
            Ok((k.clone(), e))
        }
    }
}

/// `|W|^2` at the entry's fixed point, or at its first sample point.
fn point_weyl(e: &CatalogEntry, fd_step: f64) -> Result<f64, Failure> {
    let p = match &e.fixed_point {
        Some(p) => p.clone(),
        None => sample_points(&e.spec, 1, e.seed).remove(0),
    };
    weyl_norm(&curvature_at(&e.spec, &p, fd_step).map_err(failed)?).map_err(classify)
}

fn resolve_weyl(c: &mut RunConfig) -> Result<Option<f64>, Failure> {
    if c.weyl_sq.is_none() && c.manifold.is_some() {
        let (_, e) = manifold(c)?;
        c.weyl_sq = Some(point_weyl(&e, c.fd_step.unwrap_or(DEFAULT_FD_STEP))?);
    }
    Ok(c.weyl_sq)
}

/// Tower heights, with `k` defaulting to the number of heights given.
fn resolve_heights(c: &mut RunConfig, dim: usize, default_k: usize) -> Result<Vec<f64>, Failure> {
    let d = match c.d.clone() {
        None => vec![1.0; c.k.unwrap_or(default_k)],
        Some(Heights::Values(v)) => {
            if let Some(k) = c.k.filter(|&k| k != v.len()) {
                return Err(Failure::Config(format!("k = {k} but {} heights given", v.len())));
            }
            v
        }
        Some(Heights::Keyword(w)) if w == "auto" => {
            let weyl =
                resolve_weyl(c)?.ok_or_else(|| Failure::Config("d = auto needs weyl_sq or a manifold".into()))?;
            let k = c.k.unwrap_or(default_k);
            let m =
                ReducedModel::new(&constants_for(dim)?, k, weyl, InteractionSource::ClosedForm).map_err(classify)?;
            maximize_sequential(&m).map_err(classify)?.0
        }
        Some(Heights::Keyword(w)) => return Err(Failure::Config(format!("unknown heights keyword {w:?}"))),
    };
    c.k = Some(d.len());
    c.d = Some(Heights::Values(d.clone()));
    Ok(d)
}

fn resolve_grid(c: &mut RunConfig) -> Result<Vec<f64>, Failure> {
    let profile = *c.profile.get_or_insert(Profile::Full);
    let per_decade = *c.per_decade.get_or_insert(match profile {
        Profile::Quick => 3,
        Profile::Full => 8,
    });
    let lo = *c.eps_lo.get_or_insert(1e-6);
    let hi = *c.eps_hi.get_or_insert(1e-3);
    let grid = eps_grid(lo, hi, per_decade).map_err(classify)?;
    if profile == Profile::Quick {
        if grid.len() > QUICK_MAX_POINTS {
            return Err(Failure::Config(format!(
                "quick profile allows {QUICK_MAX_POINTS} eps points, grid has {}",
                grid.len()
            )));
        }
        if let Some(k) = c.k.filter(|&k| k > QUICK_MAX_HEIGHT) {
            return Err(Failure::Config(format!("quick profile allows towers of height {QUICK_MAX_HEIGHT}, got {k}")));
        }
    }
    Ok(grid)
}

#[derive(Serialize)]
struct PointFailure {
    eps: f64,
    error: String,
}

#[derive(Serialize)]
struct SweepResult {
    series: SweepSeries,
    failures: Vec<PointFailure>,
    fit: Option<SlopeFit>,
    expected_slope: f64,
    /// Relative slope deviation for the interaction, `slope - expected` otherwise.
    slope_deviation: Option<f64>,
    /// Interaction only: prefactor at the smallest eps and its reference.
    prefactor: Option<f64>,
    reference_prefactor: Option<f64>,
    warnings: Vec<String>,
}

/// Evaluates every grid point independently, keeping the ones that succeed.
fn sweep_points(base: &TowerConfig, q: SweepQuantity, grid: &[f64], tol: f64) -> (Vec<SweepPoint>, Vec<PointFailure>) {
    let ell = q.ratio_level();
    let results: Vec<(f64, bubble_tower::Result<SweepPoint>)> = grid
        .par_iter()
        .map(|&eps| {
            let cfg = base.with_eps(eps);
            let point =
                q.evaluate(&cfg, tol).and_then(|value| Ok(SweepPoint { eps, ln_ratio: cfg.ln_ratio(ell)?, value }));
            (eps, point)
        })
        .collect();
    let mut points = Vec::new();
    let mut failures = Vec::new();
    for (eps, r) in results {
        match r {
            Ok(p) => points.push(p),
            Err(e) => failures.push(PointFailure { eps, error: e.to_string() }),
        }
    }
    (points, failures)
}

fn sweep(mut c: RunConfig, error_term: bool) -> Result<Outcome<SweepResult>, Failure> {
    let dim = *c.dim.get_or_insert(7);
    let d = resolve_heights(&mut c, dim, 2)?;
    let ell = *c.ell.get_or_insert(2);
    let r0 = *c.r0.get_or_insert(1.0);
    let tol = *c.rel_tol.get_or_insert(1e-8);
    let grid = resolve_grid(&mut c)?;
    let base = TowerConfig::new(dim, d, grid[0], r0).map_err(classify)?;
    base.ln_ratio(ell).map_err(classify)?;
    let n = dim as f64;
    let (q, expected) = if error_term {
        (SweepQuantity::ErrorII { ell }, (n + 2.0) / 4.0)
    } else {
        (SweepQuantity::Interaction { ell }, (n - 2.0) / 2.0)
    };
    let reference = if error_term { None } else { Some(constants_for(dim)?.c_hat) };
    let (points, failures) = sweep_points(&base, q, &grid, tol);
    let series = SweepSeries { quantity: q, points };
    let fit = slope_fit(&series);

    let ln_ref = reference.map_or(0.0, f64::ln);
    let rows = series
        .points
        .iter()
        .map(|p| CsvRow::new(p.eps, Some(p.ln_ratio.exp()), p.value, Some((ln_ref + expected * p.ln_ratio).exp())))
        .collect();
    let prefactor =
        (!error_term).then(|| series.points.last().map(|p| (p.value.ln_abs() - expected * p.ln_ratio).exp())).flatten();

    let mut summary = vec![format!(
        "{} of level {ell}, N = {dim}, {} of {} points evaluated",
        if error_term { "cross-term norm" } else { "interaction" },
        series.points.len(),
        grid.len()
    )];
    let (pass, slope_deviation) = match &fit {
        Ok(f) if error_term => {
            let required = expected - 0.1;
            summary.push(format!("slope {:.5} +/- {:.1e}, required >= {required:.4}", f.slope, f.stderr));
            (f.slope >= required, Some(f.slope - expected))
        }
        Ok(f) => {
            let ds = (f.slope - expected).abs() / expected;
            let dp = match (prefactor, reference) {
                (Some(p), Some(r)) => (p - r).abs() / r,
                _ => f64::INFINITY,
            };
            summary.push(format!(
                "slope {:.5} +/- {:.1e} vs {expected} (dev {ds:.2e}, limit 2%); prefactor {:.6e} vs {:.6e} (dev {dp:.2e}, limit 5%)",
                f.slope,
                f.stderr,
                prefactor.unwrap_or(f64::NAN),
                reference.unwrap_or(f64::NAN)
            ));
            (ds <= 0.02 && dp <= 0.05, Some(ds))
        }
        Err(e) => {
            summary.push(format!("no slope fit: {e}"));
            (false, None)
        }
    };
    let warnings = base.warnings();
    summary.extend(warnings.iter().map(|w| format!("warning: {w}")));
    let error = (!failures.is_empty()).then(|| format!("{} of {} eps points failed", failures.len(), grid.len()));
    summary.extend(failures.iter().map(|f| format!("eps = {:e}: {}", f.eps, f.error)));
    let result = SweepResult {
        series,
        failures,
        fit: fit.ok(),
        expected_slope: expected,
        slope_deviation,
        prefactor,
        reference_prefactor: reference,
        warnings,
    };
    Ok(Outcome { config: c, result, pass: Some(pass), error, summary, rows })
}

#[derive(Serialize)]
struct EnergyPoint {
    eps: f64,
    excess: Scaled,
    model: Scaled,
    rel_dev: f64,
    /// Per level, flat energy against the model term.
    level_rel_dev: Vec<f64>,
    total: f64,
}

/// A finished point and the single-bubble energy.
type EnergyOutcome = Result<(EnergyPoint, f64), Failure>;

#[derive(Serialize)]
struct EnergyResult {
    kn_pow: f64,
    bubble_energy: f64,
    points: Vec<EnergyPoint>,
    failures: Vec<PointFailure>,
    max_rel_dev: f64,
    warnings: Vec<String>,
}

/// `eps^{theta_l}` times the level-`l` model term.
fn model_terms(k: &EnergyConstants, cfg: &TowerConfig) -> Result<Vec<Scaled>, Failure> {
    let theta = exponent_schedule(cfg.dim, cfg.k()).map_err(classify)?.theta_f64();
    let e = (cfg.dim as f64 - 2.0) / 2.0;
    let ln_eps = cfg.eps.ln();
    Ok((0..cfg.k())
        .map(|l| {
            let d = cfg.d[l];
            let g = if l == 0 { k.b_hat * d * d } else { -k.c_hat * (d / cfg.d[l - 1]).powf(e) + k.b_hat * d * d };
            Scaled::from_ln(theta[l] * ln_eps) * Scaled::from_f64(g)
        })
        .collect())
}

fn rel_dev(a: Scaled, b: Scaled) -> f64 {
    (a - b).abs().ratio(&b.abs())
}

fn energy_check(mut c: RunConfig) -> Result<Outcome<EnergyResult>, Failure> {
    let dim = *c.dim.get_or_insert(7);
    let d = resolve_heights(&mut c, dim, 2)?;
    let r0 = *c.r0.get_or_insert(10.0);
    let tol = *c.rel_tol.get_or_insert(1e-9);
    let grid = if c.eps_lo.is_some() || c.eps_hi.is_some() || c.per_decade.is_some() {
        c.eps = None;
        resolve_grid(&mut c)?
    } else {
        vec![*c.eps.get_or_insert(1e-5)]
    };
    let base = TowerConfig::new(dim, d, grid[0], r0).map_err(classify)?;
    let k = constants_for(dim)?;
    let results: Vec<(f64, EnergyOutcome)> = grid
        .par_iter()
        .map(|&eps| {
            let cfg = base.with_eps(eps);
            let r = (|| {
                let fe = flat_energy(&cfg, tol).map_err(failed)?;
                let terms = model_terms(&k, &cfg)?;
                let model = Scaled::sum(terms.iter().copied());
                let level_rel_dev = fe.levels.iter().zip(&terms).map(|(l, m)| rel_dev(l.total, *m)).collect();
                let point = EnergyPoint {
                    eps,
                    excess: fe.excess,
                    model,
                    rel_dev: rel_dev(fe.excess, model),
                    level_rel_dev,
                    total: fe.total,
                };
                Ok((point, fe.bubble_energy))
            })();
            (eps, r)
        })
        .collect();
    let mut points = Vec::new();
    let mut failures = Vec::new();
    let mut bubble_energy = f64::NAN;
    for (eps, r) in results {
        match r {
            Ok((p, b)) => {
                bubble_energy = b;
                points.push(p);
            }
            Err(e) => failures.push(PointFailure { eps, error: e.to_string() }),
        }
    }
    let rows = points
        .iter()
        .map(|p| {
            let ratio = (base.k() >= 2).then(|| base.with_eps(p.eps).ln_ratio(2).map(f64::exp).unwrap_or(f64::NAN));
            CsvRow::new(p.eps, ratio, p.excess, Some(p.model.to_f64()))
        })
        .collect();
    let max_rel_dev = points.iter().map(|p| p.rel_dev).fold(0.0, f64::max);
    let pass = !points.is_empty() && max_rel_dev <= 0.1;
    let mut summary: Vec<String> = points
        .iter()
        .map(|p| {
            let (x, m) = (p.excess.decimal(), p.model.decimal());
            format!(
                "eps = {:e}: excess {:.6}e{} vs model {:.6}e{} (dev {:.2e})",
                p.eps, x.mantissa, x.log10, m.mantissa, m.log10, p.rel_dev
            )
        })
        .collect();
    summary.push(format!("max deviation {max_rel_dev:.2e}, limit 10%"));
    let warnings = base.warnings();
    summary.extend(warnings.iter().map(|w| format!("warning: {w}")));
    let error = (!failures.is_empty()).then(|| format!("{} of {} eps points failed", failures.len(), grid.len()));
    let result = EnergyResult { kn_pow: k.kn_pow, bubble_energy, points, failures, max_rel_dev, warnings };
    Ok(Outcome { config: c, result, pass: Some(pass), error, summary, rows })
}

#[derive(Serialize)]
struct MaximizeResult {
    weyl_sq: f64,
    d_star: Vec<f64>,
    report: bubble_tower::reduced::MaximizationReport,
    hessian_negative_definite: bool,
    hessian: bubble_tower::reduced::EigenSummary,
}

fn maximize(mut c: RunConfig) -> Result<Outcome<MaximizeResult>, Failure> {
    let dim = *c.dim.get_or_insert(7);
    let k = *c.k.get_or_insert(3);
    let eps = *c.eps.get_or_insert(1e-3);
    let fd_step = *c.fd_step.get_or_insert(1e-3);
    let weyl_sq =
        resolve_weyl(&mut c)?.ok_or_else(|| Failure::Config("maximize needs weyl_sq or a manifold".into()))?;
    let m = ReducedModel::new(&constants_for(dim)?, k, weyl_sq, InteractionSource::ClosedForm).map_err(classify)?;
    let (d_star, report) = maximize_sequential(&m).map_err(classify)?;
    let (negdef, hessian) = hessian_check(&m, &d_star, eps, fd_step).map_err(classify)?;
    let pass = report.max_rel_diff <= 1e-8 && report.all_concave && negdef;
    let mut summary: Vec<String> = report
        .levels
        .iter()
        .map(|l| format!("d_{} = {:.12e} (oracle dev {:.1e}, concave {})", l.level, l.d_closed, l.rel_diff, l.concave))
        .collect();
    summary.push(format!(
        "Hessian eigenvalues in [{:.3e}, {:.3e}], negative definite: {negdef}",
        hessian.min, hessian.max
    ));
    let result = MaximizeResult { weyl_sq, d_star, report, hessian_negative_definite: negdef, hessian };
    let mut out = Outcome::new(c, result);
    out.pass = Some(pass);
    out.summary = summary;
    Ok(out)
}

#[derive(Serialize)]
struct WeylPoint {
    point: Vec<f64>,
    weyl_sq: f64,
    scalar: f64,
}

#[derive(Serialize)]
struct WeylResult {
    manifold: String,
    description: String,
    dim: usize,
    points: Vec<WeylPoint>,
    min: f64,
    max: f64,
    locally_conformally_flat: bool,
    verdict: Option<WeylExpectation>,
    expect: Option<WeylExpectation>,
}

/// Sampling settings, defaulting to the entry's own.
fn sampling(c: &mut RunConfig, e: &CatalogEntry) -> (Vec<Vec<f64>>, f64) {
    let samples = *c.samples.get_or_insert(e.samples);
    let seed = *c.seed.get_or_insert(e.seed);
    let fd_step = *c.fd_step.get_or_insert(DEFAULT_FD_STEP);
    (sample_points(&e.spec, samples, seed), fd_step)
}

fn weyl(mut c: RunConfig) -> Result<Outcome<WeylResult>, Failure> {
    let (name, e) = manifold(&c)?;
    let (pts, fd_step) = sampling(&mut c, &e);
    let tol = *c.tol.get_or_insert(FLAT_WEYL_TOL);
    let dim = bubble_tower::geometry::Chart::dim(&e.spec);
    if dim < 4 {
        return Err(classify(Error::DimensionTooLow { dim, min: 4 }));
    }
    let points = pts
        .into_par_iter()
        .map(|p| {
            let cur = curvature_at(&e.spec, &p, fd_step).map_err(failed)?;
            Ok(WeylPoint { weyl_sq: cur.weyl_norm_sq, scalar: cur.scalar, point: p })
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    let min = points.iter().map(|p| p.weyl_sq).fold(f64::INFINITY, f64::min);
    let max = points.iter().map(|p| p.weyl_sq).fold(0.0, f64::max);
    let lcf = max <= tol;
    let verdict = if lcf {
        Some(WeylExpectation::Vanishing)
    } else if min >= NONZERO_WEYL {
        Some(WeylExpectation::NonVanishing)
    } else if max >= NONZERO_WEYL {
        Some(WeylExpectation::NonFlat)
    } else {
        None
    };
    let pass = e.expect.map(|x| x.holds(min, max, tol));
    let summary = vec![
        format!("{name}: {} (dimension {dim})", e.description),
        format!(
            "|W|^2 over {} points in [{min:.6e}, {max:.6e}]; verdict {verdict:?} (vanishing <= {tol:e}, non-vanishing >= {NONZERO_WEYL:e})",
            points.len()
        ),
    ];
    let result = WeylResult {
        manifold: name,
        description: e.description.clone(),
        dim,
        points,
        min,
        max,
        locally_conformally_flat: lcf,
        verdict,
        expect: e.expect,
    };
    let mut out = Outcome::new(c, result);
    out.pass = pass;
    out.summary = summary;
    Ok(out)
}

#[derive(Serialize)]
struct SymmetryResult {
    manifold: String,
    isometry: bubble_tower::geometry::Isometry,
    fixed_point: Vec<f64>,
    report: bubble_tower::geometry::SymmetryReport,
}

fn symmetry(mut c: RunConfig) -> Result<Outcome<SymmetryResult>, Failure> {
    let (name, e) = manifold(&c)?;
    let (iso, p) = match (&e.isometry, &e.fixed_point) {
        (Some(i), Some(p)) => (i.clone(), p.clone()),
        _ => return Err(Failure::Config(format!("manifold {name:?} has no isometry and fixed point"))),
    };
    let (pts, fd_step) = sampling(&mut c, &e);
    let tol = *c.tol.get_or_insert(1e-8);
    let h = |u: &[f64]| iso.apply(&p, u);
    let report = symmetry_check(&e.spec, &h, &p, &pts, fd_step, tol).map_err(classify)?;
    let summary = vec![format!(
        "{name}: metric defect {:.2e}, |dH_p + Id| {:.2e}, fixed-point defect {:.1e} (tol {tol:e}): {}",
        report.max_metric_defect,
        report.dh_plus_identity,
        report.fixed_point_defect,
        if report.pass { "isometry" } else { "not an isometry" }
    )];
    let pass = report.pass;
    let mut out = Outcome::new(c, SymmetryResult { manifold: name, isometry: iso, fixed_point: p, report });
    out.pass = Some(pass);
    out.summary = summary;
    Ok(out)
}

fn accept(mut c: RunConfig, inv: &Invocation) -> Result<Outcome<SuiteReport>, Failure> {
    let profile = *c.profile.get_or_insert(Profile::Full);
    let only = &inv.only;
    let to_stderr = inv.json.as_deref() == Some(std::path::Path::new("-"));
    if let Some(bad) = only.iter().find(|&&i| i == 0 || i as usize > CRITERIA.len()) {
        return Err(Failure::Config(format!("no criterion {bad}; valid ids are 1..={}", CRITERIA.len())));
    }
    let mut summary = Vec::new();
    let mut criteria: Vec<CriterionReport> = Vec::new();
    for (i, f) in CRITERIA.iter().enumerate() {
        if only.is_empty() || only.contains(&(i as u32 + 1)) {
            let r = f(profile);
            if to_stderr {
                eprintln!("{}", r.line());
            } else {
                println!("{}", r.line());
            }
            criteria.push(r);
        }
    }
    let pass = criteria.iter().all(|r| r.pass);
    summary.push(format!("{} of {} criteria passed", criteria.iter().filter(|r| r.pass).count(), criteria.len()));
    let mut out = Outcome::new(c, SuiteReport { profile, criteria, pass });
    out.pass = Some(pass);
    out.summary = summary;
    Ok(out)
}
