//! Regeneration of the published result tables, row-parallel.

use crate::output::Record;
use anyhow::{bail, Result};
use psi_bound::{
    asymptotic_a, epsilon3, epsilon4_on_grid, epsilon_asm, normalize, small_x_bound,
    to_scientific_up, BoundParams, Engine, IntervalConstants, PerronVariant, Real,
};
use rayon::prelude::*;

/// Reference strip-split parameters (log x0, sigma2) for the numeric table;
/// injected as mandatory optimizer probes so a regenerated row can never do
/// worse than the reference at its own parameter point.
pub const REFERENCE_SIGMA2: &[(f64, &str)] = &[
    (1000.0, "0.99130"),
    (2000.0, "0.99221"),
    (2100.0, "0.99227"),
    (2200.0, "0.99232"),
    (2300.0, "0.99236"),
    (2400.0, "0.99241"),
    (2500.0, "0.99245"),
    (2600.0, "0.99249"),
    (2700.0, "0.99253"),
    (2800.0, "0.99256"),
    (2900.0, "0.99260"),
    (3000.0, "0.99263"),
    (4000.0, "0.99289"),
    (5000.0, "0.99311"),
    (6000.0, "0.99334"),
    (7000.0, "0.99356"),
    (8000.0, "0.99379"),
    (9000.0, "0.99417"),
    (10000.0, "0.99449"),
    (20000.0, "0.99619"),
    (30000.0, "0.99693"),
    (40000.0, "0.99736"),
    (50000.0, "0.99766"),
    (60000.0, "0.99787"),
    (70000.0, "0.99804"),
    (80000.0, "0.99817"),
    (90000.0, "0.99828"),
    (100000.0, "0.99838"),
    (200000.0, "0.99887"),
    (300000.0, "0.99908"),
    (400000.0, "0.99921"),
    (500000.0, "0.99929"),
    (600000.0, "0.99935"),
    (700000.0, "0.99940"),
    (800000.0, "0.99944"),
    (900000.0, "0.99947"),
    (1000000.0, "0.99950"),
];

pub fn reference_sigma2(log_x0: f64) -> Option<f64> {
    REFERENCE_SIGMA2
        .iter()
        .find(|(l, _)| (*l - log_x0).abs() < 1e-9)
        .map(|(_, s)| s.parse().unwrap())
}

pub struct TableOptions {
    pub rows: Vec<f64>,
    pub c: f64,
    pub k: Option<u64>,
    pub n: Option<u64>,
    pub sigma2: Option<f64>,
    pub opt_digits: u32,
    pub perron: PerronVariant,
    pub sig_digits: usize,
    pub full: bool,
}

fn sci(v: &Real, d: usize) -> String {
    // table values are upper bounds: print with the final digit rounded up
    to_scientific_up(v, d)
}

pub const NUMERIC_SCHEMA: &[&str] =
    &["log_x0", "sigma2", "eps1", "eps2", "eps3", "eps4", "epsilon"];

/// Numeric-bound table: optimized sigma2 and the four terms per row.
pub fn table_numeric(engine: &Engine, opts: &TableOptions) -> Result<Vec<Record>> {
    let results: Vec<Result<Record>> = opts
        .rows
        .par_iter()
        .map(|&log_x0| -> Result<Record> {
            let mut base = BoundParams::new(log_x0, 0.99);
            base.c = opts.c;
            base.n = opts.n;
            if let Some(k) = opts.k {
                base.k = k;
            }
            base.perron = opts.perron.clone();
            let probes: Vec<f64> = reference_sigma2(log_x0).into_iter().collect();
            let r = engine
                .optimize_sigma2(log_x0, opts.opt_digits, &base, &probes)
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            let b = &r.breakdown;
            let mut rec = Record::new();
            rec.push("log_x0", format_logx(log_x0));
            rec.push("sigma2", format!("{:.7}", r.sigma2_opt));
            rec.push("eps1", sci(&b.eps1, opts.sig_digits));
            rec.push("eps2", sci(&b.eps2, opts.sig_digits));
            rec.push("eps3", sci(&b.eps3, opts.sig_digits));
            rec.push("eps4", sci(&b.eps4, opts.sig_digits));
            rec.push("epsilon", sci(&b.total, opts.sig_digits));
            Ok(rec)
        })
        .collect();
    let mut out = Vec::new();
    for r in results {
        out.push(r?);
    }
    Ok(out)
}

pub const ASYMPTOTIC_SCHEMA: &[&str] = &["log_x0", "A", "eps_asm"];
pub const ASYMPTOTIC_SCHEMA_FULL: &[&str] = &["log_x0", "A", "eps_asm", "epsilon", "normalized"];

/// Asymptotic-envelope table: A(x0) and the bound at x0; with `full`, also
/// the optimized bound and its normalized value.
pub fn table_asymptotic(engine: &Engine, opts: &TableOptions) -> Result<Vec<Record>> {
    let k_grid = opts.k.unwrap_or(BoundParams::DEFAULT_K);
    let results: Vec<Result<Record>> = opts
        .rows
        .par_iter()
        .map(|&log_x0| -> Result<Record> {
            let a = asymptotic_a(engine.prec, log_x0, k_grid, &engine.globals, &IntervalConstants::wide_09_10(engine.prec))
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            let easm = epsilon_asm(engine.prec, log_x0, log_x0, &a, &engine.globals)
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            let mut rec = Record::new();
            rec.push("log_x0", format_logx(log_x0));
            rec.push("A", format!("{:.4}", a.to_f64()));
            rec.push("eps_asm", sci(&easm, opts.sig_digits));
            if opts.full {
                let mut base = BoundParams::new(log_x0, 0.99);
                base.c = opts.c;
                base.n = opts.n;
                if let Some(k) = opts.k {
                    base.k = k;
                }
                let probes: Vec<f64> = reference_sigma2(log_x0).into_iter().collect();
                let r = engine
                    .optimize_sigma2(log_x0, opts.opt_digits, &base, &probes)
                    .map_err(|e| anyhow::anyhow!("{e}"))?;
                rec.push("epsilon", sci(&r.epsilon_opt, opts.sig_digits));
                let aa = normalize(engine.prec, log_x0, &r.epsilon_opt, &engine.globals);
                rec.push("normalized", format!("{:.2}", aa.to_f64()));
            }
            Ok(rec)
        })
        .collect();
    let mut out = Vec::new();
    for r in results {
        out.push(r?);
    }
    Ok(out)
}

/// Near-one-line grid study: one value per (c, K) at fixed sigma2 (default
/// 0.993, per-sigma constants), on the pure exponential grid origin.
pub fn table_eps4(engine: &Engine, log_x: f64, opts: &TableOptions) -> Result<Vec<Record>> {
    let prec = engine.prec;
    let wp = prec.with_guard(24);
    let sigma2 = wp.real(opts.sigma2.unwrap_or(0.993));
    let pair = engine
        .density
        .constants(&sigma2)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    let log_xr = wp.real(log_x);
    let l0 = wp.real(wp.real(&log_xr / &engine.globals.r).sqrt_ref());
    let log_t = wp.real(&l0 * wp.real(opts.c));
    let k = opts.k.unwrap_or(BoundParams::DEFAULT_K);
    let v = epsilon4_on_grid(
        prec,
        &log_xr,
        &sigma2,
        k,
        &l0,
        &log_t,
        &engine.globals,
        (&pair.0, &pair.1),
    )
    .map_err(|e| anyhow::anyhow!("{e}"))?;
    let mut rec = Record::new();
    rec.push("log_x", format_logx(log_x));
    rec.push("sigma2", format!("{}", sigma2.to_f64()));
    rec.push("c", format!("{}", opts.c));
    rec.push("K", format!("{k}"));
    rec.push("eps4", sci(&v, opts.sig_digits));
    Ok(vec![rec])
}

/// Middle-strip grid study at fixed sigma2 (default 0.993).
pub fn table_sigma12(engine: &Engine, log_x: f64, opts: &TableOptions) -> Result<Vec<Record>> {
    let prec = engine.prec;
    let wp = prec.with_guard(24);
    let sigma1 = wp.parse("0.9").unwrap();
    let sigma2 = wp.real(opts.sigma2.unwrap_or(0.993));
    let log_xr = wp.real(log_x);
    let l0 = wp.real(wp.real(&log_xr / &engine.globals.r).sqrt_ref());
    let t = wp.real(wp.real(&l0 * wp.real(opts.c)).exp_ref());
    let n = opts.n.unwrap_or(10);
    let v = epsilon3(
        prec,
        &log_xr,
        &sigma1,
        &sigma2,
        n,
        &t,
        &engine.globals,
        &engine.density,
    )
    .map_err(|e| anyhow::anyhow!("{e}"))?;
    let mut rec = Record::new();
    rec.push("log_x", format_logx(log_x));
    rec.push("sigma2", format!("{}", sigma2.to_f64()));
    rec.push("c", format!("{}", opts.c));
    rec.push("N", format!("{n}"));
    rec.push("eps3", sci(&v, opts.sig_digits));
    Ok(vec![rec])
}

/// Small-x bounds at heights below the verification limit, both formula
/// variants side by side.
pub fn table_smallx(engine: &Engine, opts: &TableOptions) -> Result<Vec<Record>> {
    let prec = engine.prec;
    let rows = if opts.rows.is_empty() {
        (1..=10).map(|i| 100.0 * i as f64).collect()
    } else {
        opts.rows.clone()
    };
    // stay strictly below the verification height
    let t = prec.parse("2999999999999").unwrap();
    let mut out = Vec::new();
    for log_x in rows {
        let lx = prec.real(log_x);
        let du = small_x_bound(
            prec,
            &lx,
            &t,
            &PerronVariant::Dudek,
            &engine.globals,
            &engine.zero_count,
        )
        .map_err(|e| anyhow::anyhow!("{e}"))?;
        let cj = small_x_bound(
            prec,
            &lx,
            &t,
            &PerronVariant::cj_default(),
            &engine.globals,
            &engine.zero_count,
        )
        .map_err(|e| anyhow::anyhow!("{e}"))?;
        let mut rec = Record::new();
        rec.push("log_x", format_logx(log_x));
        rec.push("eps_dudek", to_scientific_up(&du, 6));
        rec.push("eps_cj", to_scientific_up(&cj, 6));
        out.push(rec);
    }
    Ok(out)
}

pub const SMALLX_SCHEMA: &[&str] = &["log_x", "eps_dudek", "eps_cj"];

pub fn format_logx(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

pub fn parse_rows(s: Option<&str>) -> Result<Vec<f64>> {
    let Some(s) = s else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        match part.parse::<f64>() {
            Ok(v) => out.push(v),
            Err(e) => bail!("bad row value {part:?}: {e}"),
        }
    }
    Ok(out)
}
