//! The four epsilon terms of the prime-counting error bound, their total,
//! the asymptotic envelope constant A(x0), and the small-x bound.
//!
//! Heights are handled in log space throughout: T reaches e^{3800} and the
//! strip heights reach e^{360}, so nothing ever materializes x or T when a
//! logarithm suffices.

use crate::density::{b0_bound_log, n_tilde_log, DensityTable, IntervalConstants};
use crate::error::{Error, Result};
use crate::numerics::{Precision, Real};
use crate::zeros::{b1_bound, GlobalConstants, ZeroCountConstants};

/// Which explicit truncated-formula error term to use for epsilon_1.
#[derive(Clone, Debug, PartialEq)]
pub enum PerronVariant {
    /// 2 (log x)^2 / T, for x > e^50 and 3 log x < T < sqrt(x)/3.
    Dudek,
    /// m_eff (log x)^{1-omega} / T, for T > max(51, log x).
    CullyHugillJohnston { m_eff: f64, omega: f64 },
}

impl PerronVariant {
    pub const CJ_DEFAULT_M_EFF: f64 = 5.12295;

    pub fn cj_default() -> Self {
        PerronVariant::CullyHugillJohnston {
            m_eff: Self::CJ_DEFAULT_M_EFF,
            omega: 0.0,
        }
    }
}

/// Parameter bundle for one total-bound evaluation.
#[derive(Clone, Debug)]
pub struct BoundParams {
    pub log_x0: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    /// Height exponent: T = t0^c.
    pub c: f64,
    /// Sigma-grid count; default rounds 100000 (sigma2 - sigma1) up.
    pub n: Option<u64>,
    /// Height-grid count.
    pub k: u64,
    pub perron: PerronVariant,
}

impl BoundParams {
    pub const DEFAULT_K: u64 = 100_000;
    pub const DEFAULT_N_SCALE: f64 = 100_000.0;

    pub fn new(log_x0: f64, sigma2: f64) -> Self {
        BoundParams {
            log_x0,
            sigma1: 0.9,
            sigma2,
            c: 3.0,
            n: None,
            k: Self::DEFAULT_K,
            perron: PerronVariant::Dudek,
        }
    }

    pub fn resolved_n(&self) -> u64 {
        match self.n {
            Some(n) => n,
            None => {
                let m = Self::DEFAULT_N_SCALE * (self.sigma2 - self.sigma1);
                let nearest = m.round();
                let n = if (m - nearest).abs() < 1e-6 { nearest } else { m.ceil() };
                (n as u64).max(1)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.log_x0 >= 1000.0) {
            return Err(Error::Domain(format!(
                "total bound needs log x0 >= 1000, got {}",
                self.log_x0
            )));
        }
        if !(self.sigma2 > 0.9 && self.sigma2 < 1.0) {
            return Err(Error::Domain(format!(
                "sigma2 must lie in (0.9, 1), got {}",
                self.sigma2
            )));
        }
        if !(self.sigma1 >= 0.625 && self.sigma1 < self.sigma2) {
            return Err(Error::Domain(format!(
                "sigma1 must lie in [5/8, sigma2), got {}",
                self.sigma1
            )));
        }
        if !(self.c >= 2.0 && self.c <= 30.0) {
            return Err(Error::Domain(format!(
                "height exponent c must lie in [2, 30], got {}",
                self.c
            )));
        }
        if self.k == 0 {
            return Err(Error::Domain("K must be at least 1".into()));
        }
        Ok(())
    }
}

/// The four epsilon terms, their total, and the resolved evaluation scalars.
#[derive(Clone, Debug)]
pub struct BoundBreakdown {
    pub eps1: Real,
    pub eps2: Real,
    pub eps3: Real,
    pub eps4: Real,
    pub total: Real,
    pub sigma2: f64,
    pub n_used: u64,
    pub k_used: u64,
    /// log T actually used (T = exp(c sqrt(log x0 / R))).
    pub log_t: Real,
    /// log of the pure height-grid origin, sqrt(log x0 / R).
    pub log_t0_pure: Real,
    /// log of the grid origin after flooring at H_sigma2.
    pub log_t0_grid: Real,
    /// log H_sigma2.
    pub log_h_sigma2: Real,
}

/// H_sigma = max(H0, exp(1/(R(1-sigma)))): below this height no zero has
/// real part >= sigma.
pub fn h_sigma(prec: Precision, sigma: &Real, globals: &GlobalConstants) -> Result<Real> {
    Ok(prec.real(h_sigma_log(prec, sigma, globals)?.exp_ref()))
}

/// log H_sigma (the strip heights reach e^360, so callers stay in log space).
pub fn h_sigma_log(prec: Precision, sigma: &Real, globals: &GlobalConstants) -> Result<Real> {
    if !(*sigma < 1u32) {
        return Err(Error::Domain(format!("H_sigma needs sigma < 1, got {sigma}")));
    }
    let wp = prec.with_guard(16);
    let log_h0 = wp.real(globals.h0.ln_ref());
    let inv = wp.real(wp.real(wp.real(1u32) - sigma) * &globals.r).recip();
    Ok(prec.real(log_h0.max(&inv)))
}

/// Truncation error of the explicit formula at height T.
pub fn epsilon1(prec: Precision, log_x: &Real, t: &Real, variant: &PerronVariant) -> Result<Real> {
    let wp = prec.with_guard(16);
    match variant {
        PerronVariant::Dudek => {
            if !(*log_x > 50u32) {
                return Err(Error::Domain(format!(
                    "variant requires log x > 50, got log x = {log_x}"
                )));
            }
            let three_logx = wp.real(log_x * 3u32);
            if !(*t > three_logx) {
                return Err(Error::Domain(format!(
                    "variant requires 3 log x < T: 3 log x = {three_logx}, T = {t}"
                )));
            }
            // T < sqrt(x)/3  <=>  log 3 + log T < (log x)/2
            let lhs = wp.real(3u32).ln() + wp.real(t.ln_ref());
            let rhs = wp.real(log_x / 2u32);
            if !(lhs < rhs) {
                return Err(Error::Domain(format!(
                    "variant requires T < sqrt(x)/3: log(3T) = {lhs}, (log x)/2 = {rhs}"
                )));
            }
            Ok(prec.real(wp.real(log_x.square_ref()) * 2u32 / t))
        }
        PerronVariant::CullyHugillJohnston { m_eff, omega } => {
            let floor = wp.real(51u32).max(&wp.real(log_x));
            if !(*t > floor) {
                return Err(Error::Domain(format!(
                    "variant requires T > max(51, log x) = {floor}, T = {t}"
                )));
            }
            // m_eff (log x)^{1-omega} / T
            let lx_pow = if *omega == 0.0 {
                wp.real(log_x)
            } else {
                wp.real(wp.real(log_x.ln_ref()) * wp.real(1.0 - omega)).exp()
            };
            Ok(prec.real(wp.real(lx_pow * *m_eff) / t))
        }
    }
}

/// Contribution of zeros with real part below sigma1:
/// 2 x^{-1/2} (S0 + B1(T0, T)) + (x^{sigma1 - 1} - x^{-1/2}) B1(H0, T).
pub fn epsilon2(
    prec: Precision,
    log_x: &Real,
    sigma1: &Real,
    t: &Real,
    globals: &GlobalConstants,
    zk: &ZeroCountConstants,
) -> Result<Real> {
    if !(*sigma1 >= 0.5f64) || !(*sigma1 < 1u32) {
        return Err(Error::Domain(format!(
            "epsilon2 needs sigma1 in [1/2, 1), got {sigma1}"
        )));
    }
    if !(*t > globals.h0) {
        return Err(Error::Domain(format!(
            "epsilon2 needs T > H0 = {}, got T = {t}",
            globals.h0
        )));
    }
    let wp = prec.with_guard(16);
    let x_mhalf = wp.real(-&wp.real(log_x / 2u32)).exp();
    let x_s1 = wp.real(wp.real(sigma1 - 1u32) * log_x).exp();
    let full_sum = wp.real(&globals.s0 + b1_bound(wp, &globals.t0, t, zk)?);
    let high_sum = b1_bound(wp, &globals.h0, t, zk)?;
    Ok(prec.real(
        wp.real(&x_mhalf * &full_sum) * 2u32 + wp.real(x_s1 - &x_mhalf) * high_sum,
    ))
}

/// Middle-strip contribution: a telescoped Riemann-Stieltjes upper sum over
/// the sigma grid sigma1 + (sigma2 - sigma1) n / N.
pub fn epsilon3(
    prec: Precision,
    log_x: &Real,
    sigma1: &Real,
    sigma2: &Real,
    n: u64,
    t: &Real,
    globals: &GlobalConstants,
    density: &DensityTable,
) -> Result<Real> {
    if !(*sigma1 < *sigma2) || !(*sigma2 <= 1u32) {
        return Err(Error::Domain(format!(
            "epsilon3 needs sigma1 < sigma2 <= 1, got [{sigma1}, {sigma2}]"
        )));
    }
    if n == 0 {
        return Err(Error::Domain("epsilon3 needs N >= 1".into()));
    }
    if !(*t >= globals.h0) {
        return Err(Error::Domain(format!(
            "epsilon3 needs T >= H0 = {}, got T = {t}",
            globals.h0
        )));
    }
    let wp = prec.with_guard(24);
    let log_t = wp.real(t.ln_ref());
    epsilon3_log(wp, log_x, sigma1, sigma2, n, &log_t, globals, density).map(|v| prec.real(v))
}

#[allow(clippy::too_many_arguments)]
pub fn epsilon3_log(
    prec: Precision,
    log_x: &Real,
    sigma1: &Real,
    sigma2: &Real,
    n: u64,
    log_t: &Real,
    globals: &GlobalConstants,
    density: &DensityTable,
) -> Result<Real> {
    let wp = prec.with_guard(8);
    let dsig = wp.real(sigma2 - sigma1) / wp.real(n);

    let h_log = |s: &Real| h_sigma_log(wp, s, globals);

    let sigma1_r = wp.real(sigma1);
    let h1 = h_log(&sigma1_r)?;
    if !(h1 < *log_t) {
        return Err(Error::Domain(format!(
            "epsilon3 grid height exceeds T: log H = {h1}, log T = {log_t}"
        )));
    }
    let b0_first = b0_bound_log(
        wp,
        &sigma1_r,
        &h1,
        Some(log_t),
        two_ref(&density.constants(&sigma1_r)?),
    )?;
    // 2 x^{-(1 - sigma1) + dsig} B0(sigma1, H_sigma1, T)
    let exp_first = wp
        .real(wp.real(wp.real(sigma1 - 1u32) + &dsig) * log_x)
        .exp();
    let mut total = wp.real(exp_first * b0_first) * 2u32;

    if n > 1 {
        // 2 x^{-(1-sigma1)} (1 - x^{-dsig}) sum_n B0(sigma_n, H_n, T) x^{width (n+1)/N}
        let rho = wp.real(wp.real(&dsig * log_x)).exp();
        let one_minus = wp.real(1u32) - wp.real(rho.recip_ref());
        let front = wp.real(wp.real(wp.real(sigma1 - 1u32) * log_x).exp_ref());
        let fac = wp.real(front * one_minus) * 2u32;
        // weight at n = 1: x^{width * 2 / N} = rho^2
        let mut weight = wp.real(rho.square_ref());
        let mut sum = wp.zero();
        for i in 1..n {
            let sn = wp.real(wp.real(&dsig * wp.real(i)) + sigma1);
            let hn = h_log(&sn)?;
            if !(hn < *log_t) {
                return Err(Error::Domain(format!(
                    "epsilon3 grid height exceeds T at sigma = {sn}: log H = {hn}, log T = {log_t}"
                )));
            }
            let b0 = b0_bound_log(wp, &sn, &hn, Some(log_t), two_ref(&density.constants(&sn)?))?;
            sum += wp.real(b0 * &weight);
            weight *= &rho;
        }
        total += fac * sum;
    }
    Ok(prec.real(total))
}

fn two_ref(pair: &(Real, Real)) -> (&Real, &Real) {
    (&pair.0, &pair.1)
}

/// Near-one-line contribution on a geometric height grid from t0 to T,
/// telescoped. The public form floors the grid origin at H_sigma2; the
/// asymptotic-envelope path uses the pure exponential origin via
/// [`epsilon4_on_grid`].
pub fn epsilon4(
    prec: Precision,
    log_x: &Real,
    sigma2: &Real,
    k: u64,
    t: &Real,
    globals: &GlobalConstants,
    c: (&Real, &Real),
) -> Result<Real> {
    let wp = prec.with_guard(24);
    let log_t = wp.real(t.ln_ref());
    let log_t0 = grid_origin_log(wp, log_x, sigma2, globals)?;
    if !(log_t0 < log_t) {
        return Err(Error::Domain(format!(
            "epsilon4 needs T > t0: log t0 = {log_t0}, log T = {log_t}"
        )));
    }
    epsilon4_on_grid(wp, log_x, sigma2, k, &log_t0, &log_t, globals, c).map(|v| prec.real(v))
}

/// max(log H_sigma2, sqrt(log x / R)).
pub fn grid_origin_log(
    prec: Precision,
    log_x: &Real,
    sigma2: &Real,
    globals: &GlobalConstants,
) -> Result<Real> {
    let wp = prec.with_guard(8);
    let pure = wp.real(wp.real(log_x / &globals.r).sqrt_ref());
    let h = h_sigma_log(wp, sigma2, globals)?;
    Ok(prec.real(pure.max(&h)))
}

/// Telescoped evaluation on the grid log t_k = log t0 + k (log T - log t0)/K:
/// 2 sum_k h(t_k) (N(t_{k+1}) - N(t_k)) + 2 N(t_1) h(t_0),
/// where h(t) = x^{-1/(R log t)} / t and N is the density bound.
#[allow(clippy::too_many_arguments)]
pub fn epsilon4_on_grid(
    prec: Precision,
    log_x: &Real,
    sigma2: &Real,
    k: u64,
    log_t0: &Real,
    log_t_end: &Real,
    globals: &GlobalConstants,
    c: (&Real, &Real),
) -> Result<Real> {
    if k == 0 {
        return Err(Error::Domain("epsilon4 needs K >= 1".into()));
    }
    if !(*sigma2 > 0.625f64) || !(*sigma2 <= 1u32) {
        return Err(Error::Domain(format!(
            "epsilon4 needs sigma2 in (5/8, 1], got {sigma2}"
        )));
    }
    if !(log_t0 < log_t_end) {
        return Err(Error::Domain(format!(
            "epsilon4 needs T > t0: log t0 = {log_t0}, log T = {log_t_end}"
        )));
    }
    let wp = prec.with_guard(16);
    let dl = wp.real(log_t_end - log_t0) / wp.real(k);
    let xr = wp.real(log_x / &globals.r);
    // h(L) = exp(-log x / (R L) - L)
    let h = |l: &Real| -> Real {
        let e = wp.real(wp.real(&xr / l) + l);
        wp.real(-&e).exp()
    };
    let grid = |i: u64| -> Real { wp.real(wp.real(&dl * wp.real(i)) + log_t0) };

    let mut n_prev = n_tilde_log(wp, sigma2, &grid(1), c);
    let mut total = wp.real(&n_prev * h(log_t0)) * 2u32;
    for i in 1..k {
        let n_next = n_tilde_log(wp, sigma2, &grid(i + 1), c);
        let diff = wp.real(&n_next - &n_prev);
        total += wp.real(h(&grid(i)) * diff) * 2u32;
        n_prev = n_next;
    }
    Ok(prec.real(total))
}

/// The pre-telescoped form of the same sum (equal mathematically; used to
/// pin the telescoping rearrangement numerically).
#[allow(clippy::too_many_arguments)]
pub fn epsilon4_untelescoped_on_grid(
    prec: Precision,
    log_x: &Real,
    sigma2: &Real,
    k: u64,
    log_t0: &Real,
    log_t_end: &Real,
    globals: &GlobalConstants,
    c: (&Real, &Real),
) -> Result<Real> {
    if k < 2 {
        return Err(Error::Domain("untelescoped form needs K >= 2".into()));
    }
    let wp = prec.with_guard(16);
    let dl = wp.real(log_t_end - log_t0) / wp.real(k);
    let xr = wp.real(log_x / &globals.r);
    let h = |l: &Real| -> Real {
        let e = wp.real(wp.real(&xr / l) + l);
        wp.real(-&e).exp()
    };
    let grid = |i: u64| -> Real { wp.real(wp.real(&dl * wp.real(i)) + log_t0) };

    let mut total = wp.zero();
    for i in 1..k {
        let n_i = n_tilde_log(wp, sigma2, &grid(i), c);
        let drop = wp.real(h(&grid(i - 1)) - h(&grid(i)));
        total += wp.real(n_i * drop);
    }
    let n_end = n_tilde_log(wp, sigma2, log_t_end, c);
    total += wp.real(h(&grid(k - 1)) * n_end);
    Ok(prec.real(total * 2u32))
}

/// Evaluate all four terms and their sum at T = exp(c sqrt(log x0 / R)).
pub fn total_epsilon(
    prec: Precision,
    params: &BoundParams,
    globals: &GlobalConstants,
    zk: &ZeroCountConstants,
    density: &DensityTable,
) -> Result<BoundBreakdown> {
    params.validate()?;
    let wp = prec.with_guard(24);
    let log_x = wp.real(params.log_x0);
    let sigma1 = wp.real(params.sigma1);
    let sigma2 = wp.real(params.sigma2);

    let log_t0_pure = wp.real(wp.real(&log_x / &globals.r).sqrt_ref());
    let log_t = wp.real(&log_t0_pure * wp.real(params.c));
    let t = wp.real(log_t.exp_ref());
    let n = params.resolved_n();

    let eps1 = epsilon1(prec, &log_x, &t, &params.perron)?;
    let eps2 = epsilon2(prec, &log_x, &sigma1, &t, globals, zk)?;
    let eps3 = epsilon3_log(prec, &log_x, &sigma1, &sigma2, n, &log_t, globals, density)?;

    let pair = density.constants(&sigma2)?;
    let log_h2 = h_sigma_log(wp, &sigma2, globals)?;
    let log_t0_grid = wp.real(log_t0_pure.clone().max(&log_h2));
    if !(log_t0_grid < log_t) {
        return Err(Error::Domain(format!(
            "T must exceed the grid origin: log t0 = {log_t0_grid}, log T = {log_t}"
        )));
    }
    let eps4 = epsilon4_on_grid(
        prec,
        &log_x,
        &sigma2,
        params.k,
        &log_t0_grid,
        &log_t,
        globals,
        two_ref(&pair),
    )?;

    let mut total = prec.real(&eps1 + &eps2);
    total += &eps3;
    total += &eps4;
    Ok(BoundBreakdown {
        eps1,
        eps2,
        eps3,
        eps4,
        total,
        sigma2: params.sigma2,
        n_used: n,
        k_used: params.k,
        log_t: prec.real(log_t),
        log_t0_pure: prec.real(log_t0_pure),
        log_t0_grid: prec.real(log_t0_grid),
        log_h_sigma2: prec.real(log_h2),
    })
}

/// The asymptotic-envelope constant:
/// A(x0) = eps4(x0) t0^2 / (log t0)^3 + 1.92998e-9 + 1e-10 + 6.8979e-6,
/// evaluated with t0 = exp(sqrt(log x0 / R)), T = t0^4 and
/// sigma2 = 1 - 2/(R log t0). The grid keeps the pure origin here: that is
/// the parameterization under which the normalized term is decreasing in x.
pub fn asymptotic_a(
    prec: Precision,
    log_x0: f64,
    k: u64,
    globals: &GlobalConstants,
    interval: &IntervalConstants,
) -> Result<Real> {
    if !(log_x0 >= 1000.0) {
        return Err(Error::Domain(format!(
            "asymptotic constant needs log x0 >= 1000, got {log_x0}"
        )));
    }
    let wp = prec.with_guard(24);
    let log_x = wp.real(log_x0);
    let l0 = wp.real(wp.real(&log_x / &globals.r).sqrt_ref());
    let sigma2 = wp.real(1u32) - wp.real(wp.real(&globals.r * &l0).recip_ref()) * 2u32;
    if sigma2 < interval.sigma_lo || interval.sigma_hi < 1u32 {
        return Err(Error::Domain(format!(
            "interval constants [{}, {}] do not cover sigma2 = {sigma2} through 1",
            interval.sigma_lo, interval.sigma_hi
        )));
    }
    let log_t = wp.real(&l0 * 4u32);
    let eps4 = epsilon4_on_grid(
        wp,
        &log_x,
        &sigma2,
        k,
        &l0,
        &log_t,
        globals,
        (&interval.c1, &interval.c2),
    )?;
    // eps4 * t0^2 / (log t0)^3
    let lead = wp.real(eps4 * wp.real(wp.real(&l0 * 2u32).exp_ref())) / wp.real(wp.real(l0.square_ref()) * &l0);
    let consts = wp.parse("1.92998e-9").unwrap()
        + wp.parse("1e-10").unwrap()
        + wp.parse("6.8979e-6").unwrap();
    Ok(prec.real(lead + consts))
}

/// A (log x / R)^{3/2} exp(-2 sqrt(log x / R)).
pub fn epsilon_asm(
    prec: Precision,
    log_x0: f64,
    log_x: f64,
    a: &Real,
    globals: &GlobalConstants,
) -> Result<Real> {
    if !(log_x0 >= 1000.0) || !(log_x >= log_x0) {
        return Err(Error::Domain(format!(
            "asymptotic bound needs log x >= log x0 >= 1000, got log x0 = {log_x0}, log x = {log_x}"
        )));
    }
    let wp = prec.with_guard(16);
    let u = wp.real(wp.real(log_x) / &globals.r);
    let root = wp.real(u.sqrt_ref());
    let env = wp
        .real(wp.real(wp.real(u.ln_ref()) * 1.5f64) - wp.real(&root * 2u32))
        .exp();
    Ok(prec.real(wp.real(a * env)))
}

/// Leading asymptotic coefficient of the near-one-line term:
/// C = 2 c1 e^{16 w1 / (3R)} w1^3 with w1 = 1 + (c-1)/K.
pub fn asymptotic_constant_c(
    prec: Precision,
    c: f64,
    k: u64,
    c1: &Real,
    globals: &GlobalConstants,
) -> Result<Real> {
    if !(c > 1.0) || k == 0 {
        return Err(Error::Domain(format!(
            "asymptotic coefficient needs c > 1 and K >= 1, got c = {c}, K = {k}"
        )));
    }
    let wp = prec.with_guard(16);
    let w1 = wp.real(1u32) + wp.real(c - 1.0) / wp.real(k);
    let e = wp.real(wp.real(&w1 * 16u32) / wp.real(wp.real(3u32) * &globals.r)).exp();
    Ok(prec.real(wp.real(c1 * e) * wp.real(wp.real(w1.square_ref()) * &w1) * 2u32))
}

/// Bound at a single x for heights below the RH verification limit:
/// eps1(x, T) + 2 (S0 + B1(T0, T)) x^{-1/2}. Valid at x only, not beyond.
pub fn small_x_bound(
    prec: Precision,
    log_x: &Real,
    t: &Real,
    variant: &PerronVariant,
    globals: &GlobalConstants,
    zk: &ZeroCountConstants,
) -> Result<Real> {
    if !(*t < globals.h0) {
        return Err(Error::Domain(format!(
            "small-x bound needs T < H0 = {}, got T = {t}",
            globals.h0
        )));
    }
    let wp = prec.with_guard(16);
    let e1 = epsilon1(wp, log_x, t, variant)?;
    let x_mhalf = wp.real(-&wp.real(log_x / 2u32)).exp();
    let sum = wp.real(&globals.s0 + b1_bound(wp, &globals.t0, t, zk)?);
    Ok(prec.real(e1 + wp.real(x_mhalf * sum) * 2u32))
}
