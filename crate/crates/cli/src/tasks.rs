//! One function per subcommand.

use crate::config::{Discriminants, JobConfig, MomentChoice};
use crate::output::{sig12, Artifact, Table};
use crate::CliError;
use qtwist::arith::{
    coefficient_table, enumerate_fundamental_discriminants, twisted_conductor, DiscriminantFilter, TableCache,
};
use qtwist::gauss::{gauss_sum_closed, gauss_sum_direct, poisson_check, PoissonVariant};
use qtwist::lfunc::sign::Zone;
use qtwist::lfunc::{
    inverse_gamma_derivative, l_derivatives_from_lambda, sign_survey, truncation_length, DerivativeVector, TwistEngine,
};
use qtwist::moments::{
    engine_for, moment_from_store, nonvanishing_from_store, FamilySpec, JetStore, MomentConstants, MomentKind,
};
use qtwist::special::EULER_GAMMA;
use qtwist::{Error, Exec};
use serde_json::{json, Value};
use std::f64::consts::PI;

pub struct Context {
    pub exec: Exec,
    pub cache: Option<TableCache>,
}

fn discriminant_list(cfg: &JobConfig, default_coprime: u64) -> Vec<i64> {
    match cfg.discriminants.as_ref() {
        Some(Discriminants::List(ds)) => ds.clone(),
        Some(Discriminants::Range(lo, hi)) => {
            let filter = DiscriminantFilter { coprime_to: cfg.coprime_to.unwrap_or(default_coprime), ..Default::default() };
            enumerate_fundamental_discriminants(*lo, *hi, &filter)
        }
        None => Vec::new(),
    }
}

/// Exact-kernel engine long enough for every `d` at order `r`.
fn engine(cfg: &JobConfig, ctx: &Context, ds: &[i64], r: usize) -> Result<(TwistEngine, usize), CliError> {
    let q = cfg.curve.conductor_q;
    let mut need = 1000;
    for &d in ds {
        let n = twisted_conductor(q, d).map_err(|e| CliError::config("d", e))?;
        need = need.max(truncation_length(n, r));
    }
    let (table, hit) = match &ctx.cache {
        Some(c) => c.load_or_build(&cfg.curve, need, ctx.exec)?,
        None => (coefficient_table(&cfg.curve, need, ctx.exec)?, false),
    };
    Ok((TwistEngine::from_table(&cfg.curve, table)?, usize::from(hit)))
}

pub fn taylor(cfg: &JobConfig, ctx: &Context) -> Result<Artifact, CliError> {
    let r = cfg.order;
    let ds = discriminant_list(cfg, 2 * cfg.curve.conductor_q);
    let (engine, hits) = engine(cfg, ctx, &ds, r)?;
    for &d in &ds {
        engine.descriptor(d).map_err(|e| CliError::config("d", e))?;
    }
    let results = ctx.exec.try_map(&ds, |&d| engine.taylor(d, r))?;
    let mut header = vec!["d".to_string(), "N".into(), "omega".into(), "rank".into()];
    header.extend((0..=r).map(|i| format!("c{i}")));
    let mut table = Table::new(header);
    let mut rows = Vec::new();
    for t in &results {
        let desc = &t.descriptor;
        let mut row = vec![
            desc.d.to_string(),
            desc.twisted_conductor.to_string(),
            desc.omega.to_string(),
            t.taylor.analytic_rank.to_string(),
        ];
        row.extend(t.taylor.c.iter().map(|&c| sig12(c)));
        table.push(row);
        rows.push(json!({
            "d": desc.d,
            "N": desc.twisted_conductor,
            "omega": desc.omega,
            "rank": t.taylor.analytic_rank,
            "rank_tolerance": t.taylor.rank_tolerance,
            "c": t.taylor.c,
            "lambda_derivatives": t.lambda.values,
            "l_derivatives": t.l_derivatives,
            "terms": t.terms,
            "truncation_error_bound": t.lambda.truncation_error_bound,
            "fe_residual": t.lambda.fe_residual,
        }));
    }
    Ok(Artifact { table, json: json!({ "task": "taylor", "eta": engine.eta(), "rows": rows }), cache_hits: hits })
}

pub fn survey(cfg: &JobConfig, ctx: &Context) -> Result<Artifact, CliError> {
    let h = cfg.h as usize;
    let ds = discriminant_list(cfg, 2 * cfg.curve.conductor_q);
    let (engine, hits) = engine(cfg, ctx, &ds, h)?;
    let survey = sign_survey(&engine, &ds, cfg.h, cfg.nonzero_tol, ctx.exec)?;
    let mut header = vec!["d".to_string(), "omega".into(), "rank".into(), "zone".into()];
    header.extend((0..=h).map(|i| format!("c{i}")));
    header.extend(["violations".to_string(), "all_nonvanishing".into(), "fe_residual".into()]);
    let mut table = Table::new(header);
    let mut rows = Vec::new();
    for row in &survey.rows {
        let t = &row.result;
        let zone = match row.zone {
            Zone::Assertion => "assertion",
            Zone::Report => "report",
        };
        let violations: Vec<String> = row.violations.iter().map(|m| m.to_string()).collect();
        let mut cells = vec![
            t.descriptor.d.to_string(),
            t.descriptor.omega.to_string(),
            t.taylor.analytic_rank.to_string(),
            zone.to_string(),
        ];
        cells.extend(t.taylor.c.iter().map(|&c| sig12(c)));
        cells.push(violations.join(";"));
        cells.push(row.all_nonvanishing.to_string());
        cells.push(sig12(t.lambda.fe_residual));
        table.push(cells);
        rows.push(json!({
            "d": t.descriptor.d,
            "omega": t.descriptor.omega,
            "rank": t.taylor.analytic_rank,
            "zone": zone,
            "c": t.taylor.c,
            "violations": row.violations,
            "all_nonvanishing": row.all_nonvanishing,
            "fe_residual": t.lambda.fe_residual,
        }));
    }
    let json = json!({
        "task": "sign-survey",
        "h": cfg.h,
        "threshold": survey.threshold.value,
        "threshold_overflow": survey.threshold.overflow,
        "rows": rows,
    });
    let artifact = Artifact { table, json, cache_hits: hits };
    match survey.assertion_violations().first() {
        Some(&(d, m)) => Err(CliError::Violation { artifact: Box::new(artifact), d, m }),
        None => Ok(artifact),
    }
}

fn family_spec(cfg: &JobConfig) -> FamilySpec {
    let mut spec = FamilySpec::eight_d(cfg.curve.clone(), cfg.x_values.clone());
    spec.family = cfg.family;
    if let MomentChoice::Second(a, b) = cfg.moment {
        spec.orders = (a, b);
    }
    spec
}

pub fn moments(cfg: &JobConfig, ctx: &Context) -> Result<Artifact, CliError> {
    let spec = family_spec(cfg);
    let (kind, order) = match cfg.moment {
        MomentChoice::First(i) => (MomentKind::First(i), i),
        MomentChoice::Second(a, b) => (MomentKind::Second(a, b), a.max(b)),
    };
    let ds = spec.all_members();
    let (engine, hit) = engine_for(&cfg.curve, &ds, order, cfg.prime_cutoff as usize, ctx.exec, ctx.cache.as_ref())?;
    let constants = MomentConstants::compute(engine.base(), engine.eta(), &spec.weight, cfg.prime_cutoff, cfg.weight_index)?;
    let mut store = JetStore::new(cfg.curve.conductor_q, order);
    store.fill(&engine, &ds, ctx.exec, cfg.checkpoint.as_deref())?;
    let report = moment_from_store(&store, &spec, kind, &constants)?;

    let (l1, l2) = match kind {
        MomentKind::First(i) => (i.to_string(), String::new()),
        MomentKind::Second(a, b) => (a.to_string(), b.to_string()),
    };
    let fit = report.exponent_fit.map(sig12).unwrap_or_default();
    let mut table = Table::new(["X", "l1", "l2", "empirical", "predicted", "ratio", "exponent_fit", "cutoffs"]);
    for k in 0..report.x_values.len() {
        table.push(vec![
            sig12(report.x_values[k]),
            l1.clone(),
            l2.clone(),
            sig12(report.empirical[k]),
            sig12(report.predicted_leading[k]),
            sig12(report.ratios[k]),
            fit.clone(),
            cfg.prime_cutoff.to_string(),
        ]);
    }
    let json = json!({
        "task": "moments",
        "kind": match kind { MomentKind::First(_) => "first", MomentKind::Second(..) => "second" },
        "orders": match kind { MomentKind::First(i) => vec![i], MomentKind::Second(a, b) => vec![a, b] },
        "x_values": report.x_values,
        "family_sizes": report.family_sizes,
        "empirical": report.empirical,
        "predicted": report.predicted_leading,
        "ratios": report.ratios,
        "exponent_fit": report.exponent_fit,
        "constants": {
            "eta": constants.eta,
            "jtilde_1": constants.jtilde_1,
            "l1_sym2": constants.l1_sym2,
            "z1_0": constants.z1_0,
            "zq_0": constants.zq_0,
            "zstar_1": constants.zstar_1,
            "zstar_q": constants.zstar_q,
            "prime_cutoff": constants.prime_cutoff,
            "relative_tail": constants.relative_tail,
        },
        "twists": report.stats.twists,
        "terms": report.stats.terms,
        "max_fe_residual": report.stats.max_fe_residual,
    });
    Ok(Artifact { table, json, cache_hits: usize::from(hit) })
}

pub fn nonvanish(cfg: &JobConfig, ctx: &Context) -> Result<Artifact, CliError> {
    let spec = family_spec(cfg);
    let i = cfg.i;
    let order = cfg.joint.map_or(i, |(a, b)| i.max(a).max(b));
    let ds = spec.all_members();
    let (engine, hit) = engine_for(&cfg.curve, &ds, order, 1000, ctx.exec, ctx.cache.as_ref())?;
    let mut store = JetStore::new(cfg.curve.conductor_q, order);
    store.fill(&engine, &ds, ctx.exec, None)?;
    let mut table = Table::new(["X", "i", "family_size", "count", "baseline", "joint_i", "joint_j", "joint_count"]);
    let mut rows = Vec::new();
    for &x in &cfg.x_values {
        let r = nonvanishing_from_store(&store, &spec, x, i, cfg.nonzero_tol, cfg.joint)?;
        let (ji, jj, jc) = match r.joint {
            Some(((a, b), c)) => (a.to_string(), b.to_string(), c.to_string()),
            None => Default::default(),
        };
        table.push(vec![
            sig12(x),
            i.to_string(),
            r.family_size.to_string(),
            r.count.to_string(),
            sig12(r.baseline),
            ji,
            jj,
            jc,
        ]);
        rows.push(json!({
            "X": x,
            "i": i,
            "family_size": r.family_size,
            "count": r.count,
            "baseline": r.baseline,
            "joint": r.joint.map(|((a, b), c)| json!({ "i": a, "j": b, "count": c })),
        }));
    }
    let json = json!({ "task": "nonvanish", "rows": rows, "max_fe_residual": store.max_fe_residual() });
    Ok(Artifact { table, json, cache_hits: usize::from(hit) })
}

struct Check {
    name: &'static str,
    value: f64,
    limit: f64,
}

fn gauss_check() -> Result<f64, Error> {
    let mut worst: f64 = 0.0;
    for n in (1..=99u64).step_by(2) {
        for k in -10..=10 {
            let a = gauss_sum_direct(k, n)?.value;
            let b = gauss_sum_closed(k, n)?.value;
            worst = worst.max((a - b).norm());
        }
    }
    Ok(worst)
}

fn poisson() -> Result<f64, Error> {
    let mut worst: f64 = 0.0;
    for (n, z) in [(1u64, 1.0), (15, 3.5), (105, 12.0), (999, 20.0)] {
        for v in [PoissonVariant::AllD, PoissonVariant::OddD] {
            worst = worst.max(poisson_check(n, z, v)?);
        }
    }
    Ok(worst)
}

fn fe_residuals(ctx: &Context) -> Result<f64, Error> {
    use qtwist::arith::WeierstrassCurve;
    let mut worst: f64 = 0.0;
    for (curve, ds) in [(WeierstrassCurve::congruent_32a(), vec![5i64, -3, 193]), (WeierstrassCurve::curve_11a(), vec![5, -3, -8])] {
        let need = ds
            .iter()
            .map(|&d| Ok(truncation_length(twisted_conductor(curve.conductor_q, d)?, 4)))
            .collect::<Result<Vec<_>, Error>>()?;
        let engine = TwistEngine::new(&curve, need.into_iter().max().unwrap_or(1000), ctx.exec)?;
        for d in ds {
            worst = worst.max(engine.jet(d, 4)?.1.fe_residual);
        }
    }
    Ok(worst)
}

fn inverse_gamma() -> f64 {
    let g1 = (inverse_gamma_derivative(1) - EULER_GAMMA).abs();
    let g2 = (inverse_gamma_derivative(2) - (EULER_GAMMA * EULER_GAMMA - PI * PI / 6.0)).abs();
    g1.max(g2)
}

/// The Leibniz conversion refuses to return when it disagrees with its oracle.
fn conversion() -> f64 {
    let values: Vec<f64> = (0..=10).map(|k| 1.0 + 0.37 * k as f64 - 0.05 * (k * k) as f64).collect();
    let vec = DerivativeVector { r_max: 10, values, truncation_error_bound: 0.0, fe_residual: 0.0 };
    match l_derivatives_from_lambda(&vec, 11 * 25, 10) {
        Ok(_) => 0.0,
        Err(_) => f64::INFINITY,
    }
}

pub fn selftest(ctx: &Context) -> Result<Artifact, CliError> {
    let checks = [
        Check { name: "gauss_closed_vs_direct", value: gauss_check()?, limit: 1e-6 },
        Check { name: "poisson_gaussian", value: poisson()?, limit: 1e-8 },
        Check { name: "functional_equation", value: fe_residuals(ctx)?, limit: 1e-8 },
        Check { name: "inverse_gamma", value: inverse_gamma(), limit: 1e-12 },
        Check { name: "conversion_paths", value: conversion(), limit: 1e-9 },
    ];
    let mut table = Table::new(["check", "status", "value", "limit"]);
    let mut rows: Vec<Value> = Vec::new();
    let mut failed = Vec::new();
    for c in &checks {
        let pass = c.value <= c.limit;
        if !pass {
            failed.push(c.name);
        }
        let status = if pass { "PASS" } else { "FAIL" };
        table.push(vec![c.name.to_string(), status.to_string(), sig12(c.value), sig12(c.limit)]);
        rows.push(json!({ "check": c.name, "status": status, "value": c.value, "limit": c.limit }));
    }
    let artifact = Artifact { table, json: json!({ "task": "selftest", "checks": rows }), cache_hits: 0 };
    if failed.is_empty() {
        Ok(artifact)
    } else {
        Err(CliError::SelftestFailed { artifact: Box::new(artifact), failed: failed.join(", ") })
    }
}
