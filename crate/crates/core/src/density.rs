//! Zero-density upper bounds of the shape
//! c1 T^{p(sigma)} (log T)^{q(sigma)} + c2 (log T)^2 with
//! p = 8/3 (1 - sigma), q = 5 - 2 sigma, plus constant-table ingestion and
//! interval-constant resolution.

use crate::error::{Error, Result};
use crate::numerics::{gamma3_closed, upper_incomplete_gamma, Precision, Real};
use std::io::{BufRead, BufReader};
use std::path::Path;

/// One tabulated (sigma, c1, c2) triple.
#[derive(Clone, Debug)]
pub struct DensityRow {
    pub sigma: Real,
    pub c1: Real,
    pub c2: Real,
}

/// Constants valid for every sigma in [sigma_lo, sigma_hi].
#[derive(Clone, Debug)]
pub struct IntervalConstants {
    pub sigma_lo: Real,
    pub sigma_hi: Real,
    pub c1: Real,
    pub c2: Real,
}

impl IntervalConstants {
    /// The wide-interval pair valid on all of [0.9, 1.0]. Slightly larger
    /// than any narrow-row pair, usable whenever sigma varies over the whole
    /// window (the asymptotic-envelope evaluations do).
    pub fn wide_09_10(prec: Precision) -> Self {
        IntervalConstants {
            sigma_lo: prec.parse("0.9").unwrap(),
            sigma_hi: prec.parse("1.0").unwrap(),
            c1: prec.parse("17.4194").unwrap(),
            c2: prec.parse("2.9089").unwrap(),
        }
    }

    /// Coverage test with the same 1e-9 snap window as the density lookup.
    pub fn covers(&self, sigma_lo: &Real, sigma_hi: &Real) -> bool {
        const SNAP: f64 = 1e-9;
        self.sigma_lo.to_f64() <= sigma_lo.to_f64() + SNAP
            && sigma_hi.to_f64() <= self.sigma_hi.to_f64() + SNAP
    }
}

/// Ordered (sigma, c1, c2) rows with a conservative between-row lookup.
#[derive(Clone, Debug)]
pub struct DensityTable {
    rows: Vec<DensityRow>,
    provenance: String,
    /// Covers sigma above the last row, up to `tail.sigma_hi`.
    tail: Option<IntervalConstants>,
}

fn parse_fields<const N: usize>(
    prec: Precision,
    path: &Path,
    lineno: usize,
    line: &str,
) -> Result<[Real; N]> {
    let parts: Vec<&str> = line.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(Error::Parse {
            path: path.display().to_string(),
            line: lineno,
            msg: format!("expected {N} comma-separated fields, got {}", parts.len()),
        });
    }
    let mut out = Vec::with_capacity(N);
    for part in parts {
        out.push(prec.parse(part).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            line: lineno,
            msg: e.to_string(),
        })?);
    }
    Ok(out.try_into().unwrap())
}

fn read_data_lines(path: &Path, header: &str) -> Result<Vec<(usize, String)>> {
    let file = std::fs::File::open(path)?;
    let mut lines = Vec::new();
    let mut saw_header = false;
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let s = line.trim();
        if s.is_empty() || s.starts_with('#') {
            continue;
        }
        if !saw_header && s.eq_ignore_ascii_case(header) {
            saw_header = true;
            continue;
        }
        lines.push((i + 1, s.to_string()));
    }
    if lines.is_empty() {
        return Err(Error::Parse {
            path: path.display().to_string(),
            line: 0,
            msg: "no data rows".into(),
        });
    }
    Ok(lines)
}

/// Load a density table from a `sigma,c1,c2` text file and validate its
/// monotonicity invariants.
pub fn load_density_table(prec: Precision, path: &Path) -> Result<DensityTable> {
    let mut rows = Vec::new();
    for (lineno, s) in read_data_lines(path, "sigma,c1,c2")? {
        let [sigma, c1, c2] = parse_fields::<3>(prec, path, lineno, &s)?;
        if !(sigma > 0.5f64) || !(sigma < 1u32) {
            return Err(Error::InvariantViolation(format!(
                "{}:{lineno}: sigma must lie in (1/2, 1), got {sigma}",
                path.display()
            )));
        }
        rows.push(DensityRow { sigma, c1, c2 });
    }
    let table = DensityTable {
        rows,
        provenance: path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default(),
        tail: None,
    };
    table.validate(path)?;
    Ok(table)
}

/// Load an interval-constant table from a `sigma_lo,sigma_hi,c1,c2` file.
pub fn load_interval_table(prec: Precision, path: &Path) -> Result<Vec<IntervalConstants>> {
    let mut rows: Vec<IntervalConstants> = Vec::new();
    for (lineno, s) in read_data_lines(path, "sigma_lo,sigma_hi,c1,c2")? {
        let [sigma_lo, sigma_hi, c1, c2] = parse_fields::<4>(prec, path, lineno, &s)?;
        if !(sigma_lo < sigma_hi) {
            return Err(Error::InvariantViolation(format!(
                "{}:{lineno}: interval must have sigma_lo < sigma_hi",
                path.display()
            )));
        }
        if let Some(prev) = rows.last() {
            if sigma_lo < prev.sigma_lo {
                return Err(Error::InvariantViolation(format!(
                    "{}:{lineno}: interval rows must be sorted by sigma_lo",
                    path.display()
                )));
            }
        }
        rows.push(IntervalConstants {
            sigma_lo,
            sigma_hi,
            c1,
            c2,
        });
    }
    Ok(rows)
}

impl DensityTable {
    pub fn from_rows(rows: Vec<DensityRow>, provenance: &str) -> Result<Self> {
        let t = DensityTable {
            rows,
            provenance: provenance.to_string(),
            tail: None,
        };
        t.validate(Path::new(provenance))?;
        Ok(t)
    }

    fn validate(&self, path: &Path) -> Result<()> {
        for (i, w) in self.rows.windows(2).enumerate() {
            let (a, b) = (&w[0], &w[1]);
            if !(b.sigma > a.sigma) {
                return Err(Error::InvariantViolation(format!(
                    "{}: sigma must be strictly ascending at row {} (sigma {})",
                    path.display(),
                    i + 2,
                    b.sigma
                )));
            }
            if b.c1 < a.c1 {
                return Err(Error::InvariantViolation(format!(
                    "{}: c1 must be non-decreasing in sigma, violated at row {} (sigma {})",
                    path.display(),
                    i + 2,
                    b.sigma
                )));
            }
            if b.c2 > a.c2 {
                return Err(Error::InvariantViolation(format!(
                    "{}: c2 must be non-increasing in sigma, violated at row {} (sigma {})",
                    path.display(),
                    i + 2,
                    b.sigma
                )));
            }
        }
        Ok(())
    }

    pub fn rows(&self) -> &[DensityRow] {
        &self.rows
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// Extend coverage above the last row with an interval pair (used for
    /// sigma between the last tabulated value and the interval's upper end).
    pub fn set_tail(&mut self, tail: IntervalConstants) {
        self.tail = Some(tail);
    }

    pub fn coverage(&self) -> (f64, f64) {
        let lo = self.rows.first().map(|r| r.sigma.to_f64()).unwrap_or(1.0);
        let hi = match &self.tail {
            Some(t) => t.sigma_hi.to_f64(),
            None => self.rows.last().map(|r| r.sigma.to_f64()).unwrap_or(0.0),
        };
        (lo, hi)
    }

    /// Conservative lookup: c1 from the nearest row at or above sigma, c2
    /// from the nearest row at or below sigma. An exact sigma match returns
    /// that row's pair. Monotonicity of the columns makes the mixed pair a
    /// valid coefficient pair at sigma.
    ///
    /// A sigma within 1e-9 of a row snaps to that row: tabulated sigmas
    /// carry three or four decimals, so the window is unambiguous, and it
    /// keeps binary round-off in caller-supplied values from skipping past
    /// an intended exact row.
    pub fn constants(&self, sigma: &Real) -> Result<(Real, Real)> {
        const SNAP: f64 = 1e-9;
        let (lo, hi) = self.coverage();
        let out_of_coverage = || Error::OutOfCoverage {
            sigma: sigma.to_f64(),
            lo,
            hi,
        };
        let first = self.rows.first().ok_or_else(out_of_coverage)?;
        let s = sigma.to_f64();
        if s < first.sigma.to_f64() - SNAP || s >= 1.0 {
            return Err(out_of_coverage());
        }
        let last = self.rows.last().unwrap();
        if s > last.sigma.to_f64() + SNAP {
            let tail = self.tail.as_ref().ok_or_else(out_of_coverage)?;
            if s > tail.sigma_hi.to_f64() + SNAP {
                return Err(out_of_coverage());
            }
            return Ok((tail.c1.clone(), tail.c2.clone()));
        }
        let up = self
            .rows
            .iter()
            .find(|r| r.sigma.to_f64() >= s - SNAP)
            .unwrap();
        let down = self
            .rows
            .iter()
            .rev()
            .find(|r| r.sigma.to_f64() <= s + SNAP)
            .unwrap();
        Ok((up.c1.clone(), down.c2.clone()))
    }
}

/// Resolve constants valid on the whole interval [sigma1, sigma2]: prefer a
/// covering row of the interval table (narrowest, then smallest c1); fall
/// back to the density table with c1 taken at the right end and c2 at the
/// left end.
pub fn interval_constants(
    intervals: &[IntervalConstants],
    density: Option<&DensityTable>,
    sigma1: &Real,
    sigma2: &Real,
) -> Result<IntervalConstants> {
    if !(sigma1 < sigma2) {
        return Err(Error::Domain(format!(
            "interval constants need sigma1 < sigma2, got [{sigma1}, {sigma2}]"
        )));
    }
    let mut best: Option<&IntervalConstants> = None;
    for row in intervals.iter().filter(|r| r.covers(sigma1, sigma2)) {
        best = Some(match best {
            None => row,
            Some(b) => {
                let wb = b.sigma_hi.clone() - &b.sigma_lo;
                let wr = row.sigma_hi.clone() - &row.sigma_lo;
                if wr < wb || (wr == wb && row.c1 < b.c1) {
                    row
                } else {
                    b
                }
            }
        });
    }
    if let Some(row) = best {
        return Ok(row.clone());
    }
    if let Some(table) = density {
        let (c1, _) = table.constants(sigma2)?;
        let (_, c2) = table.constants(sigma1)?;
        return Ok(IntervalConstants {
            sigma_lo: sigma1.clone(),
            sigma_hi: sigma2.clone(),
            c1,
            c2,
        });
    }
    Err(Error::OutOfCoverage {
        sigma: sigma2.to_f64(),
        lo: intervals.first().map(|r| r.sigma_lo.to_f64()).unwrap_or(1.0),
        hi: intervals.last().map(|r| r.sigma_hi.to_f64()).unwrap_or(0.0),
    })
}

/// The zero-density upper bound at (sigma, T):
/// c1 T^{8/3 (1-sigma)} (log T)^{5-2 sigma} + c2 (log T)^2.
pub fn n_tilde(prec: Precision, sigma: &Real, t: &Real, c: (&Real, &Real)) -> Result<Real> {
    if !(*t >= 2u32) {
        return Err(Error::Domain(format!("n_tilde needs T >= 2, got {t}")));
    }
    if !(*sigma > 0.5f64) || !(*sigma < 1u32) {
        return Err(Error::Domain(format!(
            "n_tilde needs sigma in (1/2, 1), got {sigma}"
        )));
    }
    let wp = prec.with_guard(16);
    let log_t = wp.real(t.ln_ref());
    Ok(prec.real(n_tilde_log(wp, sigma, &log_t, c)))
}

/// Same bound with log T supplied directly (heights live in log space).
pub fn n_tilde_log(prec: Precision, sigma: &Real, log_t: &Real, c: (&Real, &Real)) -> Real {
    let p = exponent_p(prec, sigma);
    let q = exponent_q(prec, sigma);
    let lt_ln = prec.real(log_t.ln_ref());
    // c1 e^{p log T + q log log T} + c2 (log T)^2
    let main = prec.real(prec.real(&p * log_t) + prec.real(&q * &lt_ln)).exp();
    prec.real(c.0 * main) + prec.real(c.1 * prec.real(log_t.square_ref()))
}

pub fn exponent_p(prec: Precision, sigma: &Real) -> Real {
    prec.real(prec.real(1u32) - sigma) * prec.real(8u32) / 3u32
}

pub fn exponent_q(prec: Precision, sigma: &Real) -> Real {
    prec.real(5u32) - prec.real(sigma * 2u32)
}

/// Upper bound for the reciprocal sum over zeros with real part at least
/// sigma and ordinate in [U, V): boundary terms at V plus incomplete-gamma
/// integrals. `None` for V means +infinity, where the V terms vanish.
pub fn b0_bound(
    prec: Precision,
    sigma: &Real,
    u: &Real,
    v: Option<&Real>,
    c: (&Real, &Real),
) -> Result<Real> {
    let five_eighths = 0.625f64;
    if !(*sigma > five_eighths) || !(*sigma < 1u32) {
        return Err(Error::Domain(format!(
            "b0_bound needs sigma in (5/8, 1), got {sigma}"
        )));
    }
    if !(*u >= 2u32) {
        return Err(Error::Domain(format!("b0_bound needs U >= 2, got {u}")));
    }
    if let Some(v) = v {
        if v < u {
            return Err(Error::Domain(format!(
                "b0_bound needs U <= V, got U={u}, V={v}"
            )));
        }
    }
    let wp = prec.with_guard(24);
    let log_u = wp.real(u.ln_ref());
    let log_v = v.map(|v| wp.real(v.ln_ref()));
    Ok(prec.real(b0_bound_log(wp, sigma, &log_u, log_v.as_ref(), c)?))
}

/// b0_bound with heights given in log space (callers already hold log U,
/// log V; heights reach e^{1272}).
pub fn b0_bound_log(
    prec: Precision,
    sigma: &Real,
    log_u: &Real,
    log_v: Option<&Real>,
    c: (&Real, &Real),
) -> Result<Real> {
    let wp = prec.with_guard(8);
    let (c1, c2) = c;
    let p = exponent_p(wp, sigma);
    let q = exponent_q(wp, sigma);
    let one_minus_p = wp.real(1u32) - &p;
    let qp1 = wp.real(&q + 1u32);

    let mut total = wp.zero();
    if let Some(lv) = log_v {
        // c1 (log V)^q / V^{1-p} + c2 (log V)^2 / V
        let lv_ln = wp.real(lv.ln_ref());
        let t1 = wp.real(wp.real(&q * &lv_ln) - wp.real(&one_minus_p * lv)).exp();
        let t2 = wp.real(wp.real(&lv_ln * 2u32) - lv).exp();
        total += wp.real(c1 * t1) + wp.real(c2 * t2);
    }
    // c1 / (1-p)^{q+1} * (Gamma(q+1, (1-p) log U) - Gamma(q+1, (1-p) log V))
    let mut g_main = upper_incomplete_gamma(wp, &qp1, &wp.real(&one_minus_p * log_u))?;
    if let Some(lv) = log_v {
        g_main -= upper_incomplete_gamma(wp, &qp1, &wp.real(&one_minus_p * lv))?;
    }
    let scale = wp
        .real(wp.real(one_minus_p.ln_ref()) * &qp1)
        .exp()
        .recip();
    total += wp.real(c1 * g_main) * scale;
    // c2 * (Gamma(3, log U) - Gamma(3, log V)), via the closed form
    let mut g3 = gamma3_closed(wp, log_u)?;
    if let Some(lv) = log_v {
        g3 -= gamma3_closed(wp, lv)?;
    }
    total += wp.real(c2 * g3);
    Ok(prec.real(total))
}
