//! Extended-precision arithmetic and the special functions the bound
//! formulas need, chiefly the upper incomplete gamma function.
//!
//! Everything runs on MPFR floats (`rug::Float`) with a configurable
//! significand precision and an effectively unbounded exponent, so
//! magnitudes like 1e-43000 are routine.

use crate::error::{Error, Result};
use rug::float::Special;
use rug::Float;

/// Extended-precision real number. Carries its own significand precision.
pub type Real = Float;

/// Significand precision in bits. Minimum 64, default 200.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Precision(u32);

impl Precision {
    pub const MIN_BITS: u32 = 64;

    pub fn new(bits: u32) -> Result<Self> {
        if bits < Self::MIN_BITS {
            return Err(Error::Domain(format!(
                "precision must be at least {} bits, got {bits}",
                Self::MIN_BITS
            )));
        }
        Ok(Precision(bits))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// Same precision plus guard bits for intermediate work.
    pub fn with_guard(self, extra: u32) -> Precision {
        Precision(self.0 + extra)
    }

    pub fn real<T>(self, value: T) -> Real
    where
        Real: rug::Assign<T>,
    {
        Float::with_val(self.0, value)
    }

    pub fn zero(self) -> Real {
        Float::with_val(self.0, 0)
    }

    /// Parse a decimal literal at this precision (exact decimal reading,
    /// one rounding at the end).
    pub fn parse(self, s: &str) -> Result<Real> {
        let incomplete = Float::parse(s)
            .map_err(|e| Error::Domain(format!("cannot parse {s:?} as a real: {e}")))?;
        Ok(Float::with_val(self.0, incomplete))
    }

    pub fn pi(self) -> Real {
        Float::with_val(self.0, rug::float::Constant::Pi)
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision(200)
    }
}

fn check_finite(name: &str, v: &Real) -> Result<()> {
    if !v.is_finite() {
        return Err(Error::Domain(format!("{name} must be finite, got {v}")));
    }
    Ok(())
}

/// Upper incomplete gamma via the defining integral's standard evaluation
/// split: a regularized power series on x <= s+1, a continued fraction on
/// x > s+1. Relative error <= 2^(8-precision).
pub fn upper_incomplete_gamma(prec: Precision, s: &Real, x: &Real) -> Result<Real> {
    check_finite("s", s)?;
    check_finite("x", x)?;
    if !(s.cmp0() == Some(std::cmp::Ordering::Greater)) {
        return Err(Error::Domain(format!("s must be positive, got {s}")));
    }
    if x.cmp0() == Some(std::cmp::Ordering::Less) {
        return Err(Error::Domain(format!("x must be nonnegative, got {x}")));
    }
    let wp = prec.with_guard(24);
    let s = wp.real(s);
    let x = wp.real(x);

    if x.is_zero() {
        return Ok(prec.real(s.gamma()));
    }

    let split = wp.real(&s + 1u32);
    let value = if x <= split {
        // Gamma(s) - gamma_lower(s, x), series for the lower function:
        // gamma(s,x) = x^s e^{-x} sum_{n>=0} x^n / (s (s+1) ... (s+n))
        let mut term = wp.real(1u32) / &s;
        let mut sum = term.clone();
        let mut n = 0u64;
        let tol = Float::with_val(8, Float::i_exp(1, -((wp.bits() as i32) + 8)));
        loop {
            n += 1;
            let denom = wp.real(&s + n);
            term *= &x;
            term /= denom;
            sum += &term;
            if wp.real(&term / &sum).abs() < tol {
                break;
            }
            if n > 1_000_000 {
                return Err(Error::Domain(
                    "incomplete gamma series failed to converge".into(),
                ));
            }
        }
        // x^s e^{-x} = exp(s ln x - x)
        let front = (wp.real(x.ln_ref()) * &s - &x).exp();
        wp.real(s.gamma_ref()) - front * sum
    } else {
        // Modified Lentz on the classical continued fraction
        //   Gamma(s,x) = e^{-x} x^s / (x+1-s - 1(1-s)/(x+3-s - 2(2-s)/(...)))
        let tiny = Float::with_val(wp.bits(), Float::i_exp(1, -((wp.bits() as i32) * 4)));
        let tol = Float::with_val(8, Float::i_exp(1, -((wp.bits() as i32) + 8)));
        let mut b = wp.real(&x + 1u32) - &s;
        let mut c = wp.real(1u32) / &tiny;
        let mut d = wp.real(b.recip_ref());
        let mut h = d.clone();
        let mut i = 1u64;
        loop {
            let an = wp.real(&s - i) * i; // -i(i-s)
            b += 2u32;
            d = an.clone() * &d + &b;
            if d.cmp0() == Some(std::cmp::Ordering::Equal) {
                d = tiny.clone();
            }
            c = wp.real(&an / &c) + &b;
            if c.cmp0() == Some(std::cmp::Ordering::Equal) {
                c = tiny.clone();
            }
            d = d.recip();
            let del = wp.real(&d * &c);
            h *= &del;
            if wp.real(&del - 1u32).abs() < tol {
                break;
            }
            i += 1;
            if i > 1_000_000 {
                return Err(Error::Domain(
                    "incomplete gamma continued fraction failed to converge".into(),
                ));
            }
        }
        let front = (wp.real(x.ln_ref()) * &s - &x).exp();
        front * h
    };
    Ok(prec.real(value))
}

/// Closed form (x^2 + 2(x+1)) e^{-x}; equals the upper incomplete gamma at
/// s = 3 and serves as an independent cross-check of it.
pub fn gamma3_closed(prec: Precision, x: &Real) -> Result<Real> {
    check_finite("x", x)?;
    if x.cmp0() == Some(std::cmp::Ordering::Less) {
        return Err(Error::Domain(format!("x must be nonnegative, got {x}")));
    }
    let wp = prec.with_guard(16);
    let x = wp.real(x);
    let poly = wp.real(x.square_ref()) + wp.real(&x + 1u32) * 2u32;
    let e = wp.real(-&x).exp();
    Ok(prec.real(poly * e))
}

/// Format a real in decimal scientific notation with the given number of
/// significant digits, e.g. `4.9678e-15`. Round to nearest.
pub fn to_scientific(v: &Real, sig_digits: usize) -> String {
    format_scientific(v, sig_digits, false)
}

/// Scientific notation with the final digit rounded up in magnitude, the
/// convention for printing values that are upper bounds.
pub fn to_scientific_up(v: &Real, sig_digits: usize) -> String {
    format_scientific(v, sig_digits, true)
}

fn format_scientific(v: &Real, sig_digits: usize, round_up: bool) -> String {
    if v.is_zero() {
        return "0.0000e0".to_string();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".to_string()
        } else if v.is_sign_negative() {
            "-inf".to_string()
        } else {
            "inf".to_string()
        };
    }
    let sig = sig_digits.max(1);
    let (sign, digits, exp) = if round_up {
        // read two guard digits, then ceil on the decimal digit string
        let (sign, mut ds, mut exp) = v.to_sign_string_exp(10, Some(sig + 2));
        ds.truncate(sig + 2);
        let head = &ds[..sig];
        let tail = &ds[sig..];
        let mut digits: Vec<u8> = head.bytes().map(|b| b - b'0').collect();
        if !sign && tail.bytes().any(|b| b != b'0') {
            // round away from zero only for positive values; bounds are
            // positive, negatives keep truncation toward zero conservative
            let mut i = sig;
            loop {
                if i == 0 {
                    digits.insert(0, 1);
                    exp = exp.map(|e| e + 1);
                    digits.truncate(sig);
                    break;
                }
                i -= 1;
                if digits[i] == 9 {
                    digits[i] = 0;
                } else {
                    digits[i] += 1;
                    break;
                }
            }
        }
        let s: String = digits.iter().map(|d| (d + b'0') as char).collect();
        (sign, s, exp)
    } else {
        v.to_sign_string_exp(10, Some(sig))
    };
    let mut out = String::new();
    if sign {
        out.push('-');
    }
    let digits = digits.trim_end_matches('@');
    let first = &digits[..1];
    let rest = &digits[1..];
    out.push_str(first);
    if !rest.is_empty() {
        out.push('.');
        out.push_str(rest);
    }
    // to_sign_string_exp's exponent is for the digit string read as 0.ddd
    out.push('e');
    out.push_str(&(exp.unwrap_or(1) - 1).to_string());
    out
}

/// Parse special float states for completeness when reading serialized reals.
pub fn real_from_special(prec: Precision, s: Special) -> Real {
    Float::with_val(prec.bits(), s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::default()
    }

    fn rel_close(a: &Real, b: &Real, tol: f64) -> bool {
        if a.is_zero() && b.is_zero() {
            return true;
        }
        let prec = a.prec().max(b.prec());
        let diff = Float::with_val(prec, a - b).abs();
        let scale = Float::with_val(prec, b.abs_ref());
        Float::with_val(prec, diff / scale).to_f64() <= tol
    }

    #[test]
    fn gamma_at_zero_is_plain_gamma() {
        let g = upper_incomplete_gamma(p(), &p().real(3), &p().zero()).unwrap();
        assert!(rel_close(&g, &p().real(2), 1e-55), "Gamma(3,0) = 2! = 2, got {g}");
    }

    #[test]
    fn gamma_3_1_closed_form() {
        let g = upper_incomplete_gamma(p(), &p().real(3), &p().real(1)).unwrap();
        let want = p().real(5) / p().real(1).exp();
        assert!(rel_close(&g, &want, 1e-55), "Gamma(3,1) = 5/e, got {g}");
    }

    #[test]
    fn gamma_4_2_21_07_frozen_oracle() {
        // Frozen from 95-digit adaptive quadrature of the defining integral,
        // cross-checked against the recurrence Gamma(s+1,x) = s Gamma(s,x) + x^s e^{-x}.
        let g = upper_incomplete_gamma(p(), &p().parse("4.2").unwrap(), &p().parse("21.07").unwrap())
            .unwrap();
        let want = p()
            .parse("1.4217524828749103800096416028655138370121603e-5")
            .unwrap();
        assert!(rel_close(&g, &want, 1e-40), "got {g}");
    }

    #[test]
    fn gamma_matches_mpfr_builtin() {
        // rug exposes MPFR's own incomplete gamma; an implementation-independent check.
        for (s, x) in [(1.5, 0.25), (3.0, 10.0), (4.2, 21.07), (4.75, 300.0), (2.9, 2.0)] {
            let mine = upper_incomplete_gamma(p(), &p().real(s), &p().real(x)).unwrap();
            let theirs = p().real(s).gamma_inc(&p().real(x));
            assert!(rel_close(&mine, &theirs, 1e-55), "s={s} x={x}: {mine} vs {theirs}");
        }
    }

    #[test]
    fn closed_form_agreement_grid() {
        for x in ["0", "0.5", "1", "10", "28.7", "100", "1272"] {
            let xr = p().parse(x).unwrap();
            let a = upper_incomplete_gamma(p(), &p().real(3), &xr).unwrap();
            let b = gamma3_closed(p(), &xr).unwrap();
            assert!(rel_close(&a, &b, 1e-30), "x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn recurrence_step_up() {
        for s in ["1.5", "3.2", "4.2"] {
            for x in ["1", "21.07", "100"] {
                let sr = p().parse(s).unwrap();
                let xr = p().parse(x).unwrap();
                let lhs =
                    upper_incomplete_gamma(p(), &p().real(&sr + 1u32), &xr).unwrap();
                let g = upper_incomplete_gamma(p(), &sr, &xr).unwrap();
                let front = (p().real(xr.ln_ref()) * &sr - &xr).exp();
                let rhs = p().real(&sr * &g) + front;
                assert!(rel_close(&lhs, &rhs, 1e-30), "s={s} x={x}");
            }
        }
    }

    #[test]
    fn monotone_decreasing_in_x() {
        for s in ["1.5", "3.0", "4.2"] {
            let sr = p().parse(s).unwrap();
            let mut prev: Option<Real> = None;
            for x in ["0", "0.5", "1", "2", "5", "10", "20", "50", "100"] {
                let g = upper_incomplete_gamma(p(), &sr, &p().parse(x).unwrap()).unwrap();
                if let Some(pv) = prev {
                    assert!(g < pv, "s={s}: not strictly decreasing at x={x}");
                }
                prev = Some(g);
            }
        }
    }

    #[test]
    fn domain_errors() {
        assert!(upper_incomplete_gamma(p(), &p().zero(), &p().real(1)).is_err());
        assert!(upper_incomplete_gamma(p(), &p().real(-1), &p().real(1)).is_err());
        assert!(upper_incomplete_gamma(p(), &p().real(1), &p().real(-0.5)).is_err());
        assert!(gamma3_closed(p(), &p().real(-1)).is_err());
    }

    #[test]
    fn gamma3_closed_at_log_3e12_frozen() {
        // direct high-precision evaluation at x = log(3e12)
        let x = p().real(3e12f64).ln();
        let g = gamma3_closed(p(), &x).unwrap();
        let want = p().parse("2.9495036745723648948747860449667861442566e-10").unwrap();
        assert!(rel_close(&g, &want, 1e-36), "got {g}");
    }

    #[test]
    fn scientific_formatting() {
        let v = p().parse("4.9678e-15").unwrap();
        assert_eq!(to_scientific(&v, 5), "4.9678e-15");
        let v = p().parse("338.3058").unwrap();
        assert_eq!(to_scientific(&v, 7), "3.383058e2");
        let v = p().parse("-1.25e-3").unwrap();
        assert_eq!(to_scientific(&v, 3), "-1.25e-3");
    }

    #[test]
    fn scientific_round_up() {
        let v = p().parse("3.45761e-20").unwrap();
        assert_eq!(to_scientific_up(&v, 5), "3.4577e-20");
        let v = p().parse("1.0212448e-23").unwrap();
        assert_eq!(to_scientific_up(&v, 5), "1.0213e-23");
        // exact at the printed precision stays put
        let v = p().parse("2.5e-3").unwrap();
        assert_eq!(to_scientific_up(&v, 2), "2.5e-3");
        // carries propagate through nines
        let v = p().parse("9.99991e4").unwrap();
        assert_eq!(to_scientific_up(&v, 5), "1.0000e5");
        // round-trip: parsing printed output and re-printing is stable
        let v = p().parse("4.9678e-15").unwrap();
        let printed = to_scientific_up(&v, 5);
        let re = p().parse(&printed).unwrap();
        assert_eq!(to_scientific_up(&re, 5), printed);
    }

    #[test]
    fn precision_floor_enforced() {
        assert!(Precision::new(32).is_err());
        assert!(Precision::new(64).is_ok());
    }

    #[test]
    fn huge_negative_exponents_survive() {
        // e^{-500000} must not underflow to zero
        let v = p().real(-500000).exp();
        assert!(v.cmp0() == Some(std::cmp::Ordering::Greater));
        let lg = v.ln();
        assert!((lg.to_f64() + 500000.0).abs() < 1e-9);
    }
}
