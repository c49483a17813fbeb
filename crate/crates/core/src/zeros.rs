//! Zero-counting estimates, reciprocal sums of zero ordinates, and
//! ingestion of verified-zero data files.

use crate::error::{Error, Result};
use crate::numerics::{Precision, Real};
use rug::ops::Pow;
use rug::Integer;
use std::fmt;
use std::io::{BufRead, BufReader};
use std::path::Path;

/// Constants (b1, b2, b3) in the zero-count error term
/// R(T) = b1 log T + b2 log log T + b3.
#[derive(Clone, Debug)]
pub struct ZeroCountConstants {
    pub b1: Real,
    pub b2: Real,
    pub b3: Real,
}

impl ZeroCountConstants {
    /// Default constants (Hasanalizade–Shen–Wong).
    pub fn hsw(prec: Precision) -> Self {
        ZeroCountConstants {
            b1: prec.parse("0.1038").unwrap(),
            b2: prec.parse("0.2573").unwrap(),
            b3: prec.parse("9.3675").unwrap(),
        }
    }

    /// Rosser's classical constants, selectable via config.
    pub fn rosser(prec: Precision) -> Self {
        ZeroCountConstants {
            b1: prec.parse("0.137").unwrap(),
            b2: prec.parse("0.443").unwrap(),
            b3: prec.parse("1.588").unwrap(),
        }
    }
}

/// Global analytic constants: RH verification height H0, zero-free-region
/// constant R, and the (T0, S0) reciprocal-sum pair.
#[derive(Clone, Debug)]
pub struct GlobalConstants {
    pub h0: Real,
    pub r: Real,
    pub t0: Real,
    pub s0: Real,
}

impl GlobalConstants {
    pub const R_MAX: &'static str = "5.573412";

    pub fn new(prec: Precision) -> Self {
        GlobalConstants {
            h0: prec.parse("3e12").unwrap(),
            r: prec.parse("5.5666305").unwrap(),
            t0: prec.parse("30610046000").unwrap(),
            s0: prec.parse("39.5797647802").unwrap(),
        }
    }

    pub fn with_r(mut self, prec: Precision, r: &str) -> Result<Self> {
        self.r = prec.parse(r)?;
        self.validate(prec)?;
        Ok(self)
    }

    pub fn with_height_pair(mut self, prec: Precision, t0: &str, s0: &str) -> Result<Self> {
        self.t0 = prec.parse(t0)?;
        self.s0 = prec.parse(s0)?;
        self.validate(prec)?;
        Ok(self)
    }

    pub fn validate(&self, prec: Precision) -> Result<()> {
        let rmax = prec.parse(Self::R_MAX).unwrap();
        if !(self.r.cmp0() == Some(std::cmp::Ordering::Greater)) || self.r > rmax {
            return Err(Error::Domain(format!(
                "R must lie in (0, {}], got {}",
                Self::R_MAX,
                self.r
            )));
        }
        if !(self.h0 > self.t0) || !(self.t0 > 2u32) {
            return Err(Error::Domain(
                "height constants must satisfy H0 > T0 > 2".into(),
            ));
        }
        Ok(())
    }
}

/// R(T) = b1 log T + b2 log log T + b3. Valid for T >= 2.
pub fn zero_count_error(prec: Precision, t: &Real, k: &ZeroCountConstants) -> Result<Real> {
    if !(*t >= 2u32) {
        return Err(Error::Domain(format!("zero-count error needs T >= 2, got {t}")));
    }
    let wp = prec.with_guard(16);
    let lt = wp.real(t.ln_ref());
    let llt = wp.real(lt.ln_ref());
    Ok(prec.real(wp.real(&k.b1 * &lt) + wp.real(&k.b2 * &llt) + &k.b3))
}

/// Upper bound for the reciprocal sum of zero ordinates between U and V:
/// (1/2pi + (b1 log U + b2)/(U log U log(U/2pi))) log(V/U) log(sqrt(UV)/2pi)
/// + 2 R(U)/U.
pub fn b1_bound(prec: Precision, u: &Real, v: &Real, k: &ZeroCountConstants) -> Result<Real> {
    if !(*u > 1u32) {
        return Err(Error::Domain(format!("b1_bound needs U > 1, got {u}")));
    }
    if v < u {
        return Err(Error::Domain(format!("b1_bound needs V >= U, got U={u}, V={v}")));
    }
    let wp = prec.with_guard(16);
    let two_pi = wp.real(wp.pi() * 2u32);
    let lu = wp.real(u.ln_ref());
    let lv = wp.real(v.ln_ref());
    let lu2pi = wp.real(&lu - wp.real(two_pi.ln_ref()));

    let lead = wp.real(1u32) / &two_pi
        + wp.real(wp.real(&k.b1 * &lu) + &k.b2) / wp.real(wp.real(u * &lu) * &lu2pi);
    // log(V/U) * log(sqrt(UV)/(2pi))
    let factor = wp.real(&lv - &lu) * (wp.real(wp.real(&lu + &lv) / 2u32) - two_pi.ln());
    let tail = wp.real(zero_count_error(wp, u, k)? * 2u32) / u;
    Ok(prec.real(lead * factor + tail))
}

/// S0 + B1(T0, V): upper bound for the full reciprocal sum up to V.
pub fn reciprocal_sum_bound(
    prec: Precision,
    t0: &Real,
    s0: &Real,
    v: &Real,
    k: &ZeroCountConstants,
) -> Result<Real> {
    if v < t0 {
        return Err(Error::Domain(format!(
            "reciprocal_sum_bound needs V >= T0, got T0={t0}, V={v}"
        )));
    }
    Ok(prec.real(s0 + b1_bound(prec, t0, v, k)?))
}

/// Reciprocal-sum upper bound rounded up at the 10th decimal place.
/// `value - 1e-10` is strictly below the true sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct S0Bound {
    /// The bound times 10^10, an integer.
    scaled: Integer,
}

impl S0Bound {
    pub fn to_real(&self, prec: Precision) -> Real {
        prec.real(&self.scaled) / prec.real(10u32).pow(10)
    }
}

impl fmt::Display for S0Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ten10 = Integer::from(10u32).pow(10);
        let (q, r) = self.scaled.clone().div_rem_euc(ten10);
        write!(f, "{}.{:010}", q, r)
    }
}

/// Ascending imaginary parts of verified zeta zeros.
#[derive(Clone, Debug)]
pub struct ZerosList {
    ordinates: Vec<Real>,
    declared_height: Option<f64>,
}

impl ZerosList {
    pub fn from_ordinates(ordinates: Vec<Real>, declared_height: Option<f64>) -> Result<Self> {
        for w in ordinates.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvariantViolation(format!(
                    "zero ordinates must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        if let Some(first) = ordinates.first() {
            if !(*first > 0u32) {
                return Err(Error::InvariantViolation(
                    "zero ordinates must be positive".into(),
                ));
            }
        }
        Ok(ZerosList {
            ordinates,
            declared_height,
        })
    }

    /// Load from a plain text file: one decimal ordinate per line, ascending.
    /// `#`-prefixed comment lines are skipped; a `# height=H` header declares
    /// the coverage height used by the truncation check in [`Self::compute_s0`].
    pub fn load(prec: Precision, path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let reader = BufReader::new(file);
        let mut ordinates = Vec::new();
        let mut declared_height = None;
        let wp = prec.with_guard(16);
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let s = line.trim();
            if s.is_empty() {
                continue;
            }
            if let Some(comment) = s.strip_prefix('#') {
                let comment = comment.trim();
                if let Some(h) = comment.strip_prefix("height=") {
                    declared_height = h.trim().parse::<f64>().ok();
                }
                continue;
            }
            let v = wp.parse(s).map_err(|e| Error::Parse {
                path: path.display().to_string(),
                line: i + 1,
                msg: e.to_string(),
            })?;
            ordinates.push(v);
        }
        Self::from_ordinates(ordinates, declared_height)
    }

    pub fn len(&self) -> usize {
        self.ordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordinates.is_empty()
    }

    pub fn ordinates(&self) -> &[Real] {
        &self.ordinates
    }

    pub fn declared_height(&self) -> Option<f64> {
        self.declared_height
    }

    /// Strict upper bound for sum of 1/gamma over 0 < gamma < T0, rounded up
    /// at the 10th decimal place (ascending-order accumulation).
    pub fn compute_s0(&self, prec: Precision, t0: f64) -> Result<S0Bound> {
        if !(t0 > 0.0) {
            return Err(Error::Domain(format!("T0 must be positive, got {t0}")));
        }
        if let Some(last) = self.ordinates.last() {
            if last.to_f64() < t0 {
                match self.declared_height {
                    Some(h) if h >= t0 => {}
                    _ => {
                        return Err(Error::ZerosTruncated {
                            last: last.to_f64(),
                            requested: t0,
                        })
                    }
                }
            }
        } else if self.declared_height.map_or(true, |h| h < t0) {
            return Err(Error::ZerosTruncated {
                last: 0.0,
                requested: t0,
            });
        }
        let wp = prec.with_guard(64);
        let mut sum = wp.zero();
        let limit = wp.real(t0);
        for g in &self.ordinates {
            if !(*g < limit) {
                break;
            }
            sum += wp.real(g.recip_ref());
        }
        // ceil at the 10th decimal: exact multiples stay put (the empty sum
        // reports 0.0000000000), everything else rounds up.
        let scaled = wp.real(&sum * wp.real(10u32).pow(10)).ceil();
        let scaled = scaled
            .to_integer()
            .ok_or_else(|| Error::Domain("reciprocal sum not finite".into()))?;
        Ok(S0Bound { scaled })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::default()
    }

    fn close(a: &Real, b: f64, tol: f64) -> bool {
        (a.to_f64() - b).abs() <= tol
    }

    #[test]
    fn zero_count_error_examples() {
        let k = ZeroCountConstants::hsw(p());
        let at_e = zero_count_error(p(), &p().real(1).exp(), &k).unwrap();
        assert!(close(&at_e, 9.4713, 1e-10), "R(e) = b1 + b3, got {at_e}");
        let at_2 = zero_count_error(p(), &p().real(2), &k).unwrap();
        assert!(close(&at_2, 9.345144903, 1e-8), "got {at_2}");
        let at_h0 = zero_count_error(p(), &p().real(3e12), &k).unwrap();
        assert!(close(&at_h0, 13.2136311081, 1e-9), "got {at_h0}");
        assert!(zero_count_error(p(), &p().real(1.5), &k).is_err());
    }

    #[test]
    fn b1_bound_degenerate_interval() {
        let k = ZeroCountConstants::hsw(p());
        let u = p().real(1000);
        let b = b1_bound(p(), &u, &u, &k).unwrap();
        let want = p().real(zero_count_error(p(), &u, &k).unwrap() * 2u32) / &u;
        let diff = p().real(&b - &want).abs();
        assert!(diff.to_f64() < 1e-40, "B1(U,U) = 2R(U)/U, got {b} vs {want}");
    }

    #[test]
    fn b1_bound_dominates_table_difference() {
        // reciprocal sums between consecutive tabulated heights give a lower
        // bound oracle: S(1000) - S(100) <= B1(100, 1000)
        let k = ZeroCountConstants::hsw(p());
        let b = b1_bound(p(), &p().real(100), &p().real(1000), &k).unwrap();
        assert!(close(&b, 1.64601083862, 1e-8), "frozen value, got {b}");
        assert!(b.to_f64() >= 2.0286569752 - 0.5922435112);
    }

    #[test]
    fn b1_bound_frozen_h0_span() {
        let k = ZeroCountConstants::hsw(p());
        let g = GlobalConstants::new(p());
        let b = b1_bound(p(), &g.t0, &g.h0, &k).unwrap();
        assert!(close(&b, 17.950842084447829246, 1e-12), "got {b}");
    }

    #[test]
    fn b1_bound_domain_errors() {
        let k = ZeroCountConstants::hsw(p());
        assert!(b1_bound(p(), &p().real(1), &p().real(10), &k).is_err());
        assert!(b1_bound(p(), &p().real(100), &p().real(99), &k).is_err());
    }

    #[test]
    fn b1_bound_monotone_in_v() {
        let k = ZeroCountConstants::hsw(p());
        let u = p().real(500);
        let mut prev = p().zero();
        for v in [500.0, 600.0, 1e3, 1e6, 1e12] {
            let b = b1_bound(p(), &u, &p().real(v), &k).unwrap();
            assert!(b >= prev, "B1 not monotone at V={v}");
            prev = b;
        }
    }

    #[test]
    fn reciprocal_sum_bound_frozen() {
        let k = ZeroCountConstants::hsw(p());
        let g = GlobalConstants::new(p());
        let v = reciprocal_sum_bound(p(), &g.t0, &g.s0, &g.h0, &k).unwrap();
        assert!(close(&v, 57.530606864647829246, 1e-12), "got {v}");
        // lower-bound oracle from the printed table: row T0 = 10^4
        let v2 = reciprocal_sum_bound(
            p(),
            &p().real(1000),
            &p().parse("2.0286569752").unwrap(),
            &p().real(10000),
            &k,
        )
        .unwrap();
        assert!(v2.to_f64() >= 4.3080354951, "got {v2}");
    }

    #[test]
    fn s0_empty_below_first_zero() {
        let zeros = ZerosList::from_ordinates(
            vec![p().parse("14.134725141734").unwrap(), p().real(21.02)],
            None,
        )
        .unwrap();
        let s0 = zeros.compute_s0(p(), 14.0).unwrap();
        assert_eq!(s0.to_string(), "0.0000000000");
    }

    #[test]
    fn s0_truncation_detection() {
        let zeros =
            ZerosList::from_ordinates(vec![p().real(14.1347), p().real(21.0220)], None).unwrap();
        assert!(matches!(
            zeros.compute_s0(p(), 100.0),
            Err(Error::ZerosTruncated { .. })
        ));
        let declared = ZerosList::from_ordinates(
            vec![p().real(14.1347), p().real(21.0220)],
            Some(25.0),
        )
        .unwrap();
        assert!(declared.compute_s0(p(), 25.0).is_ok());
        assert!(declared.compute_s0(p(), 100.0).is_err());
    }

    #[test]
    fn s0_rounds_up_at_tenth_decimal() {
        // 1/4 = 0.25 exactly: stays; 1/3 rounds up at the 10th place
        let zeros = ZerosList::from_ordinates(vec![p().real(4)], Some(10.0)).unwrap();
        assert_eq!(zeros.compute_s0(p(), 10.0).unwrap().to_string(), "0.2500000000");
        let zeros = ZerosList::from_ordinates(vec![p().real(3)], Some(10.0)).unwrap();
        assert_eq!(zeros.compute_s0(p(), 10.0).unwrap().to_string(), "0.3333333334");
    }

    #[test]
    fn s0_monotone_in_t0() {
        let zeros = ZerosList::from_ordinates(
            vec![p().real(14.13), p().real(21.02), p().real(25.01)],
            Some(30.0),
        )
        .unwrap();
        let a = zeros.compute_s0(p(), 15.0).unwrap().to_real(p());
        let b = zeros.compute_s0(p(), 22.0).unwrap().to_real(p());
        let c = zeros.compute_s0(p(), 26.0).unwrap().to_real(p());
        assert!(a <= b && b <= c);
    }

    #[test]
    fn zeros_list_rejects_disorder() {
        assert!(ZerosList::from_ordinates(vec![p().real(21.0), p().real(14.0)], None).is_err());
    }

    #[test]
    fn r_constant_window_enforced() {
        let g = GlobalConstants::new(p());
        assert!(g.validate(p()).is_ok());
        assert!(g.clone().with_r(p(), "5.58").is_err());
        assert!(g.with_r(p(), "5.5").is_ok());
    }
}
