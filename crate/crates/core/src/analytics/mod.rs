//! Closed-form performance predictions: deflection ratios of every
//! detector family, the equivalent training length after iteration, and
//! `Q(sqrt D)` BER estimates.
//!
//! Each deflection ratio is the squared gap between the conditional means
//! of a decision statistic under two adjacent hypotheses, divided by the
//! average of its two conditional variances.

mod deflection;
mod sweep;

pub use deflection::{
    deflection_cw, deflection_dt, deflection_opt, deflection_sub, DeflectionReport, DeflectionVariant, DoubleTraining,
};
pub use sweep::{phi_sweep, write_sweep_csv, SweepRow, SweepSettings};

use statrs::function::erf::erfc;
use std::f64::consts::SQRT_2;

/// Gaussian tail probability `Q(x) = P(N(0,1) > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / SQRT_2)
}

/// Effective training length after `iteration` refinement passes, given the
/// decision errors `n_err_prev` of the previous pass.
pub fn equivalent_training(n_t: usize, n_d: usize, n_err_prev: usize, iteration: usize) -> f64 {
    if iteration == 0 {
        return n_t as f64;
    }
    let total = (n_t + n_d) as f64;
    let good = total - n_err_prev as f64;
    good * good / total
}
