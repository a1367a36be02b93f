//! Bit LLRs from symbol log-likelihoods and a rate-1/2 convolutional code.
//!
//! Bit convention: bit 0 is sent as `+1`, and a positive LLR favors `+1`.

mod convolutional;

pub use convolutional::{conv_encode, hard_decode, soft_decode, CONSTRAINT_LENGTH, GENERATORS, TAIL_BITS};

use crate::receivers::Llf;

/// Log-likelihood ratios of the two bits of one symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BitLlr {
    /// LLR of `d_k0`.
    pub llr0: f64,
    /// LLR of `d_k1`.
    pub llr1: f64,
}

/// How symbol log-likelihoods are turned into decoder input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LlrMode {
    Exact,
    MaxLog,
    Hard,
}

impl LlrMode {
    pub fn label(self) -> &'static str {
        match self {
            Self::Exact => "LLR-Opt",
            Self::MaxLog => "LLR-Sub",
            Self::Hard => "LLR-Hard",
        }
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Marginal bit LLRs with a stable log-sum-exp.
pub fn llr_exact(llf: &Llf) -> BitLlr {
    BitLlr {
        llr0: log_add(llf[0], llf[2]) - log_add(llf[1], llf[3]),
        llr1: log_add(llf[0], llf[1]) - log_add(llf[2], llf[3]),
    }
}

/// Max-log approximation of [`llr_exact`].
pub fn llr_maxlog(llf: &Llf) -> BitLlr {
    BitLlr {
        llr0: llf[0].max(llf[2]) - llf[1].max(llf[3]),
        llr1: llf[0].max(llf[1]) - llf[2].max(llf[3]),
    }
}
