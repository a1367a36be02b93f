use crate::channel::PhaseDifference;
use crate::frontend::QuantizedFrame;
use crate::waveform::ReferenceWaveform;
use crate::{Error, Result};

use super::linear::BranchMean;
use super::{DoubleChips, Llf, WeightSet};
use crate::SymbolPair;

/// Weights learnt from the two training classes: `w0` from symbol (1,1),
/// `w1` from symbol (1,-1).
#[derive(Debug, Clone, PartialEq)]
pub struct DoubleWeights {
    pub w0: WeightSet,
    pub w1: WeightSet,
}

impl DoubleWeights {
    /// Exact weights `1 - 2 eps` of both classes.
    pub fn from_chips(chips: &DoubleChips) -> Self {
        Self {
            w0: WeightSet::from_eps(&chips.eps_i0, &chips.eps_q0),
            w1: WeightSet::from_eps(&chips.eps_i1, &chips.eps_q1),
        }
    }

    pub fn len(&self) -> usize {
        self.w0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w0.is_empty()
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            w0: self.w0.scaled(k),
            w1: self.w1.scaled(k),
        }
    }
}

/// Sign relations `w_I^0 ~ A w_Q^1`, `w_Q^0 ~ B w_I^1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignFactors {
    pub a: i8,
    pub b: i8,
}

/// `w^0` averaged over the (1,1) sequence, `w^1` over the (1,-1) sequence.
pub fn estimate_double_weights(training0: &[QuantizedFrame], training1: &[QuantizedFrame]) -> Result<DoubleWeights> {
    let mean = |frames: &[QuantizedFrame]| -> Result<WeightSet> {
        let first = frames.first().ok_or(Error::EmptyTrainingSet)?;
        let mut acc = BranchMean::new(first.len());
        for f in frames {
            acc.add(&f.i_bits, &f.q_bits, SymbolPair::REFERENCE);
        }
        acc.mean()
    };
    Ok(DoubleWeights {
        w0: mean(training0)?,
        w1: mean(training1)?,
    })
}

#[inline]
fn class_correlations(frame: &QuantizedFrame, dw: &DoubleWeights) -> (f64, f64) {
    let (mut c0, mut c1) = (0.0, 0.0);
    for l in 0..dw.len() {
        let (ri, rq) = (f64::from(frame.i_bits[l]), f64::from(frame.q_bits[l]));
        c0 += ri * dw.w0.w_i[l] + rq * dw.w0.w_q[l];
        c1 += ri * dw.w1.w_i[l] + rq * dw.w1.w_q[l];
    }
    (c0, c1)
}

/// Double-training log-likelihood:
/// `sum_i sum_l (d1+d0)/2 r_i w_i^0 + (d1-d0)/2 r_i w_i^1`.
pub fn double_training_llf(frame: &QuantizedFrame, dw: &DoubleWeights) -> Llf {
    let (c0, c1) = class_correlations(frame, dw);
    [c0, c1, -c1, -c0]
}

fn sgn(x: f64) -> i8 {
    if x < 0.0 {
        -1
    } else {
        1
    }
}

/// `A = sgn(sum w_I^0 w_Q^1)`, `B = sgn(sum w_Q^0 w_I^1)`, with `sgn(0) = +1`.
pub fn estimate_sign_factors(dw: &DoubleWeights) -> SignFactors {
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    SignFactors {
        a: sgn(dot(&dw.w0.w_i, &dw.w1.w_q)),
        b: sgn(dot(&dw.w0.w_q, &dw.w1.w_i)),
    }
}

/// Sign factors implied by the true carrier phase and phase imbalance.
pub fn true_sign_factors(phi: PhaseDifference, theta: f64) -> SignFactors {
    let plus = phi.radians() + theta / 2.0;
    let minus = phi.radians() - theta / 2.0;
    SignFactors {
        a: sgn(plus.cos() * minus.cos()),
        b: sgn(-minus.sin() * plus.sin()),
    }
}

/// `w_I^cw = (w_I^0 + A w_Q^1)/2`, `w_Q^cw = (w_Q^0 + B w_I^1)/2`.
pub fn combinational_weights(dw: &DoubleWeights, sf: SignFactors) -> WeightSet {
    let (a, b) = (f64::from(sf.a), f64::from(sf.b));
    WeightSet::new(
        dw.w0
            .w_i
            .iter()
            .zip(&dw.w1.w_q)
            .map(|(x, y)| 0.5 * x + 0.5 * a * y)
            .collect(),
        dw.w0
            .w_q
            .iter()
            .zip(&dw.w1.w_i)
            .map(|(x, y)| 0.5 * x + 0.5 * b * y)
            .collect(),
    )
}

/// Combinational-weight log-likelihood:
/// `sum_l (d1+d0)/2 (w_I r_I + w_Q r_Q) + (d1-d0)/2 (B w_Q r_I + A w_I r_Q)`.
pub fn cw_llf(frame: &QuantizedFrame, cw: &WeightSet, sf: SignFactors) -> Llf {
    let (a, b) = (f64::from(sf.a), f64::from(sf.b));
    let (mut c0, mut c1) = (0.0, 0.0);
    for l in 0..cw.len() {
        let (ri, rq) = (f64::from(frame.i_bits[l]), f64::from(frame.q_bits[l]));
        c0 += cw.w_i[l] * ri + cw.w_q[l] * rq;
        c1 += b * cw.w_q[l] * ri + a * cw.w_i[l] * rq;
    }
    [c0, c1, -c1, -c0]
}

/// Full-CSI double weights: matched-filter projections of both training
/// classes under phase imbalance, jointly scaled to unit peak.
pub fn matched_filter_double_weights(
    reference: &ReferenceWaveform,
    phi: PhaseDifference,
    theta: f64,
) -> Result<DoubleWeights> {
    let plus = phi.radians() + theta / 2.0;
    let minus = phi.radians() - theta / 2.0;
    let proj = |f: f64| -> Vec<f64> { reference.samples.iter().map(|p| p * f).collect() };
    let dw = DoubleWeights {
        w0: WeightSet::new(proj(plus.cos()), proj(-minus.sin())),
        w1: WeightSet::new(proj(plus.sin()), proj(minus.cos())),
    };
    let peak = dw.w0.max_abs().max(dw.w1.max_abs());
    if !(peak > 0.0) {
        return Err(Error::ZeroEnergyWaveform);
    }
    Ok(dw.scaled(1.0 / peak))
}

/// Joint small-weight removal across all four weight vectors.
pub fn prune_double_weights(dw: &DoubleWeights, threshold_frac: f64) -> DoubleWeights {
    let threshold = threshold_frac * dw.w0.max_abs().max(dw.w1.max_abs());
    let mut out = dw.clone();
    for l in 0..dw.len() {
        let m = [dw.w0.w_i[l], dw.w0.w_q[l], dw.w1.w_i[l], dw.w1.w_q[l]]
            .iter()
            .fold(0.0f64, |m, x| m.max(x.abs()));
        if m < threshold {
            out.w0.w_i[l] = 0.0;
            out.w0.w_q[l] = 0.0;
            out.w1.w_i[l] = 0.0;
            out.w1.w_q[l] = 0.0;
        }
    }
    out
}
