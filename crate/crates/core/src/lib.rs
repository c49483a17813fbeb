//! High-precision evaluation, optimization, and certification of explicit
//! upper bounds for the relative error of the Chebyshev prime-counting
//! function psi(x).
//!
//! The engine evaluates the four additive bound terms (formula truncation,
//! near-half-line zeros, middle strip, near-one-line strip) on top of
//! tabulated zero-density constants, optimizes the strip split, derives the
//! asymptotic envelope constant, and certifies an admissible envelope
//! constant over log-x intervals by step interpolation.

pub mod bounds;
pub mod density;
pub mod error;
pub mod numerics;
pub mod optimizer;
pub mod verify;
pub mod zeros;

pub use bounds::{
    asymptotic_a, asymptotic_constant_c, epsilon1, epsilon2, epsilon3, epsilon4,
    epsilon4_on_grid, epsilon4_untelescoped_on_grid, epsilon_asm, grid_origin_log, h_sigma,
    small_x_bound, total_epsilon, BoundBreakdown, BoundParams, PerronVariant,
};
pub use density::{
    b0_bound, interval_constants, load_density_table, load_interval_table, n_tilde, DensityRow,
    DensityTable, IntervalConstants,
};
pub use error::{Error, Result};
pub use numerics::{
    gamma3_closed, to_scientific, to_scientific_up, upper_incomplete_gamma, Precision, Real,
};
pub use optimizer::{optimize_sigma2, refine_sigma2, OptimizationResult};
pub use verify::{
    butinterp_check, normalize, normalized_eps, ratio_bound, verify_interval, HandoffChecks,
    InterpolationPlan, IntervalReport, PlanRow, VerifySummary,
};
pub use zeros::{
    b1_bound, reciprocal_sum_bound, zero_count_error, GlobalConstants, S0Bound,
    ZeroCountConstants, ZerosList,
};

use std::path::Path;

/// Precision context plus the loaded constant tables: everything a bound
/// evaluation needs except the per-evaluation parameters.
#[derive(Clone, Debug)]
pub struct Engine {
    pub prec: Precision,
    pub globals: GlobalConstants,
    pub zero_count: ZeroCountConstants,
    pub density: DensityTable,
    pub intervals: Vec<IntervalConstants>,
}

impl Engine {
    /// Build from table files. The density table's coverage is extended
    /// above its last row by the wide-interval pair, which is also appended
    /// to the interval list so whole-window lookups resolve.
    pub fn from_files(prec: Precision, density_path: &Path, interval_path: &Path) -> Result<Self> {
        let mut density = load_density_table(prec, density_path)?;
        let wide = IntervalConstants::wide_09_10(prec);
        density.set_tail(wide.clone());
        let mut intervals = load_interval_table(prec, interval_path)?;
        intervals.push(wide);
        Ok(Engine {
            prec,
            globals: GlobalConstants::new(prec),
            zero_count: ZeroCountConstants::hsw(prec),
            density,
            intervals,
        })
    }

    pub fn total_epsilon(&self, params: &BoundParams) -> Result<BoundBreakdown> {
        total_epsilon(self.prec, params, &self.globals, &self.zero_count, &self.density)
    }

    pub fn optimize_sigma2(
        &self,
        log_x0: f64,
        digits: u32,
        base: &BoundParams,
        extra_probes: &[f64],
    ) -> Result<OptimizationResult> {
        optimize_sigma2(
            self.prec,
            log_x0,
            digits,
            base,
            &self.globals,
            &self.zero_count,
            &self.density,
            extra_probes,
        )
    }

    pub fn asymptotic_a(&self, log_x0: f64, k: u64) -> Result<Real> {
        let wide = IntervalConstants::wide_09_10(self.prec);
        asymptotic_a(self.prec, log_x0, k, &self.globals, &wide)
    }

    pub fn verify_interval(
        &self,
        plan: &InterpolationPlan,
        digits: u32,
        base: &BoundParams,
    ) -> Result<VerifySummary> {
        verify_interval(
            self.prec,
            plan,
            digits,
            base,
            &self.globals,
            &self.zero_count,
            &self.density,
        )
    }

    pub fn interval_constants(&self, sigma1: &Real, sigma2: &Real) -> Result<IntervalConstants> {
        interval_constants(&self.intervals, Some(&self.density), sigma1, sigma2)
    }
}
