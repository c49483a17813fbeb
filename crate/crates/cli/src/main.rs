//! Command-line front end: single-bound evaluation, table generation,
//! sigma2 optimization, interval certification, and zero-sum computation.

mod config;
mod output;
mod tables;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use config::{OutputFormat, RunConfig};
use output::Record;
use psi_bound::{
    butinterp_check, to_scientific_up, BoundParams, InterpolationPlan, PerronVariant, Precision,
    ZerosList,
};
use std::path::PathBuf;
use std::process::ExitCode;
use tables::{parse_rows, reference_sigma2, TableOptions};

#[derive(Parser)]
#[command(
    name = "psi-bound",
    about = "High-precision explicit bounds for the Chebyshev prime-counting error term",
    version
)]
struct Cli {
    /// Config file (key = value); PSI_BOUND_CONFIG is consulted when absent
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output format: text, csv, or json
    #[arg(long, global = true)]
    format: Option<String>,

    /// Significant digits for printed values
    #[arg(long, global = true)]
    sig_digits: Option<usize>,

    /// Worker threads for row-parallel commands
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the total bound at one x0 (optimizes sigma2 when not given)
    Bound {
        #[arg(long = "log-x0")]
        log_x0: f64,
        /// Fixed sigma2 in (0.9, 1); omit to optimize
        #[arg(long)]
        sigma2: Option<f64>,
        /// Height exponent (T = t0^c)
        #[arg(long, default_value_t = 3.0)]
        c: f64,
        /// Sigma-grid count (default: 100000 (sigma2 - 0.9), rounded up)
        #[arg(long)]
        n: Option<u64>,
        /// Height-grid count
        #[arg(long, default_value_t = 100_000)]
        k: u64,
        /// Formula-truncation variant: dudek or cj
        #[arg(long, default_value = "dudek")]
        perron: String,
        /// Sigma2 search resolution (digits) when optimizing
        #[arg(long, default_value_t = 5)]
        opt_digits: u32,
    },
    /// Regenerate a published table: numeric, asymptotic, eps4, sigma12, smallx
    Table {
        kind: String,
        /// Comma-separated log x0 values (header only when empty)
        #[arg(long)]
        rows: Option<String>,
        #[arg(long = "log-x")]
        log_x: Option<f64>,
        #[arg(long, default_value_t = 3.0)]
        c: f64,
        #[arg(long)]
        k: Option<u64>,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        sigma2: Option<f64>,
        #[arg(long, default_value_t = 5)]
        opt_digits: u32,
        /// Also compute the optimized bound columns of the asymptotic table
        #[arg(long)]
        full: bool,
    },
    /// Search sigma2 minimizing the total bound
    Optimize {
        #[arg(long = "log-x0")]
        log_x0: f64,
        #[arg(long, default_value_t = 5)]
        digits: u32,
        #[arg(long, default_value_t = 3.0)]
        c: f64,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long, default_value_t = 100_000)]
        k: u64,
    },
    /// Certify an admissible envelope constant over a plan of intervals
    Verify {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long, default_value_t = 5)]
        digits: u32,
        /// Height-grid count per evaluation (full table depth by default)
        #[arg(long)]
        k: Option<u64>,
        /// Sigma-grid count per evaluation
        #[arg(long)]
        n: Option<u64>,
        /// Skip the low-range handoff checks
        #[arg(long)]
        skip_handoff: bool,
    },
    /// Reciprocal sum of zero ordinates up to a height, rounded up at 1e-10
    SumZeros {
        /// Zeros file (one ascending ordinate per line); config default otherwise
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long)]
        t0: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .ok();
    }
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    if let Some(f) = &cli.format {
        cfg.format = OutputFormat::parse(f)?;
    }
    if let Some(d) = cli.sig_digits {
        cfg.sig_digits = d;
    }

    match cli.cmd {
        Cmd::Bound {
            log_x0,
            sigma2,
            c,
            n,
            k,
            perron,
            opt_digits,
        } => {
            let engine = cfg.build_engine()?;
            let mut base = BoundParams::new(log_x0, sigma2.unwrap_or(0.99));
            base.c = c;
            base.n = n;
            base.k = k;
            base.perron = parse_perron(&perron)?;
            let (sigma2_used, breakdown) = match sigma2 {
                Some(s2) => {
                    base.sigma2 = s2;
                    (s2, engine.total_epsilon(&base).map_err(|e| anyhow::anyhow!("{e}"))?)
                }
                None => {
                    let probes: Vec<f64> = reference_sigma2(log_x0).into_iter().collect();
                    let r = engine
                        .optimize_sigma2(log_x0, opt_digits, &base, &probes)
                        .map_err(|e| anyhow::anyhow!("{e}"))?;
                    (r.sigma2_opt, r.breakdown)
                }
            };
            let mut rec = Record::new();
            rec.push("log_x0", tables::format_logx(log_x0));
            rec.push("sigma2", format!("{sigma2_used:.7}"));
            rec.push("c", format!("{c}"));
            rec.push("N", format!("{}", breakdown.n_used));
            rec.push("K", format!("{}", breakdown.k_used));
            rec.push("eps1", to_scientific_up(&breakdown.eps1, cfg.sig_digits));
            rec.push("eps2", to_scientific_up(&breakdown.eps2, cfg.sig_digits));
            rec.push("eps3", to_scientific_up(&breakdown.eps3, cfg.sig_digits));
            rec.push("eps4", to_scientific_up(&breakdown.eps4, cfg.sig_digits));
            rec.push("epsilon", to_scientific_up(&breakdown.total, cfg.sig_digits));
            print!("{}", output::render(&[rec], &cfg.format));
        }
        Cmd::Table {
            kind,
            rows,
            log_x,
            c,
            k,
            n,
            sigma2,
            opt_digits,
            full,
        } => {
            let engine = cfg.build_engine()?;
            let opts = TableOptions {
                rows: parse_rows(rows.as_deref())?,
                c,
                k,
                n,
                sigma2,
                opt_digits,
                perron: PerronVariant::Dudek,
                sig_digits: cfg.sig_digits,
                full,
            };
            match kind.as_str() {
                "numeric" => {
                    let records = tables::table_numeric(&engine, &opts)?;
                    print!("{}", output::render_table(tables::NUMERIC_SCHEMA, &records, &cfg.format));
                }
                "asymptotic" => {
                    let records = tables::table_asymptotic(&engine, &opts)?;
                    let schema = if opts.full {
                        tables::ASYMPTOTIC_SCHEMA_FULL
                    } else {
                        tables::ASYMPTOTIC_SCHEMA
                    };
                    print!("{}", output::render_table(schema, &records, &cfg.format));
                }
                "eps4" => {
                    let log_x = log_x.context("table eps4 needs --log-x")?;
                    let records = tables::table_eps4(&engine, log_x, &opts)?;
                    print!("{}", output::render(&records, &cfg.format));
                }
                "sigma12" => {
                    let log_x = log_x.context("table sigma12 needs --log-x")?;
                    let records = tables::table_sigma12(&engine, log_x, &opts)?;
                    print!("{}", output::render(&records, &cfg.format));
                }
                "smallx" => {
                    let records = tables::table_smallx(&engine, &opts)?;
                    print!("{}", output::render_table(tables::SMALLX_SCHEMA, &records, &cfg.format));
                }
                other => bail!("unknown table kind {other:?} (numeric, asymptotic, eps4, sigma12, smallx)"),
            }
        }
        Cmd::Optimize {
            log_x0,
            digits,
            c,
            n,
            k,
        } => {
            let engine = cfg.build_engine()?;
            let mut base = BoundParams::new(log_x0, 0.99);
            base.c = c;
            base.n = n;
            base.k = k;
            let probes: Vec<f64> = reference_sigma2(log_x0).into_iter().collect();
            let r = engine
                .optimize_sigma2(log_x0, digits, &base, &probes)
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            let mut rec = Record::new();
            rec.push("log_x0", tables::format_logx(log_x0));
            rec.push("sigma2_opt", format!("{:.*}", digits as usize, r.sigma2_opt));
            rec.push("epsilon_opt", to_scientific_up(&r.epsilon_opt, cfg.sig_digits));
            rec.push("probes", format!("{}", r.probes));
            rec.push("eps4_share", format!(
                "{:.3}",
                (r.breakdown.eps4.clone() / &r.breakdown.total).to_f64()
            ));
            print!("{}", output::render(&[rec], &cfg.format));
        }
        Cmd::Verify {
            plan,
            digits,
            k,
            n,
            skip_handoff,
        } => {
            let engine = cfg.build_engine()?;
            let plan = InterpolationPlan::load(&plan).map_err(|e| anyhow::anyhow!("{e}"))?;
            let mut base = BoundParams::new(3000.0, 0.99);
            base.n = n;
            if let Some(k) = k {
                base.k = k;
            }
            let summary = engine
                .verify_interval(&plan, digits, &base)
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            let mut records = Vec::new();
            for r in &summary.reports {
                let mut rec = Record::new();
                rec.push("b_lo", tables::format_logx(r.row.b_lo));
                rec.push("b_hi", tables::format_logx(r.row.b_hi));
                rec.push("step", format!("{}", r.row.step));
                rec.push("points", format!("{}", r.points));
                rec.push("max_aa", format!("{:.4}", r.max_aa.to_f64()));
                rec.push("argmax_aa", format!("{}", r.argmax_aa));
                rec.push("max_bb", format!("{:.6}", r.max_bb.to_f64()));
                rec.push("a_bound", format!("{:.3}", r.a_bound.to_f64()));
                rec.push("certified", format!("{}", r.certified));
                records.push(rec);
            }
            print!("{}", output::render(&records, &cfg.format));
            if !skip_handoff {
                let handoff = butinterp_check(engine.prec, &engine.globals);
                for (desc, ok) in &handoff.checks {
                    println!("handoff: {} [{}]", desc, if *ok { "ok" } else { "FAIL" });
                }
                if !handoff.ok {
                    bail!("low-range handoff checks failed");
                }
            }
            println!(
                "A <= {:.3}, coefficient <= {:.5}{}",
                summary.global_a.to_f64(),
                summary.coefficient.to_f64(),
                if summary.certified { "" } else { "  [NOT CERTIFIED]" }
            );
            if !summary.certified {
                bail!("certification incomplete: some grid evaluations failed");
            }
        }
        Cmd::SumZeros { file, t0 } => {
            let path = match file {
                Some(f) => f,
                None => cfg
                    .zeros_file
                    .clone()
                    .context("no --file given and no zeros_file in config")?,
            };
            let prec = Precision::new(cfg.precision).map_err(|e| anyhow::anyhow!("{e}"))?;
            let zeros = ZerosList::load(prec, &path).map_err(|e| anyhow::anyhow!("{e}"))?;
            let s0 = zeros.compute_s0(prec, t0).map_err(|e| anyhow::anyhow!("{e}"))?;
            let mut rec = Record::new();
            rec.push("file", path.display().to_string());
            rec.push("count_below_t0", format!("{}", zeros.ordinates().iter().filter(|g| g.to_f64() < t0).count()));
            rec.push("t0", tables::format_logx(t0));
            rec.push("s0", s0.to_string());
            print!("{}", output::render(&[rec], &cfg.format));
        }
    }
    Ok(())
}

fn parse_perron(s: &str) -> Result<PerronVariant> {
    match s {
        "dudek" => Ok(PerronVariant::Dudek),
        "cj" => Ok(PerronVariant::cj_default()),
        other => bail!("unknown perron variant {other:?} (expected dudek or cj)"),
    }
}
