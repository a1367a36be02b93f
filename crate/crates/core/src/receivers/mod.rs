//! Symbol detectors.
//!
//! Every detector produces four log-likelihood values, one per hypothesis in
//! [`HYPOTHESES`](crate::symbol::HYPOTHESES) order, and decides by argmax.
//! The linear combiners share one evaluation kernel: with the four
//! correlations `a = <w_I, r_I>`, `b = <w_Q, r_Q>`, `c = <w_I, r_Q>`,
//! `d = <w_Q, r_I>` the hypotheses score `a+b`, `c-d`, `d-c`, `-(a+b)`.

mod chips;
mod double;
mod iterative;
mod linear;
mod optimal;
mod phase8;

pub use chips::{
    chip_error_probs, chip_error_probs_imbalanced, chip_error_probs_phase8, ChipErrorProbs, DoubleChips, EPS_MIN,
};
pub use double::{
    combinational_weights, cw_llf, double_training_llf, estimate_double_weights, estimate_sign_factors,
    matched_filter_double_weights, prune_double_weights, true_sign_factors, DoubleWeights, SignFactors,
};
pub use iterative::{
    iterate_with, iterative_demodulate, CombinationalModel, DoubleTrainingModel, IterationConfig, IterativeOutcome,
    PhaseQuadModel, TaylorModel, TrainedModel,
};
pub use linear::{
    estimate_weights, linear_llf, matched_filter_weights, prune_small_weights, suboptimal_llf, WeightSet,
};
pub use optimal::{ml_detect, optimal_llf, MlDetector};
pub use phase8::{estimate_phase8_weights, phase8_llf, PhaseQuadWeights};

use crate::symbol::{SymbolPair, HYPOTHESES};

/// Four symbol log-likelihoods in hypothesis order.
pub type Llf = [f64; 4];

/// A symbol decision with the values it was taken from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub symbol: SymbolPair,
    /// Refinement passes performed before this decision (0 for one-shot).
    pub iteration_count: usize,
    pub llf_values: Llf,
}

impl Decision {
    pub fn from_llf(llf_values: Llf) -> Self {
        Self {
            symbol: HYPOTHESES[argmax(&llf_values)],
            iteration_count: 0,
            llf_values,
        }
    }
}

/// Index of the first maximum.
pub fn argmax(values: &Llf) -> usize {
    let mut best = 0;
    for k in 1..4 {
        if values[k] > values[best] {
            best = k;
        }
    }
    best
}

/// Converts the four branch correlations into hypothesis scores.
#[inline]
pub(crate) fn combine(a: f64, b: f64, c: f64, d: f64) -> Llf {
    let same = a + b;
    let cross = c - d;
    [same, cross, -cross, -same]
}
