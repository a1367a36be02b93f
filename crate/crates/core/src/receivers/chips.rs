use std::f64::consts::FRAC_PI_4;

use crate::analytics::q_function;
use crate::channel::PhaseDifference;
use crate::waveform::ReferenceWaveform;

/// Lower clamp for every chip error probability.
pub const EPS_MIN: f64 = 1e-12;

#[inline]
fn clamp(eps: f64) -> f64 {
    eps.clamp(EPS_MIN, 1.0 - EPS_MIN)
}

fn q_vec<F: Fn(f64) -> f64>(reference: &ReferenceWaveform, arg: F) -> Vec<f64> {
    reference.samples.iter().map(|&p| clamp(q_function(arg(p)))).collect()
}

/// Per-sample error probabilities of the two training classes under phase
/// imbalance: `^0` for symbol (1,1), `^1` for symbol (1,-1).
#[derive(Debug, Clone, PartialEq)]
pub struct DoubleChips {
    pub eps_i0: Vec<f64>,
    pub eps_q0: Vec<f64>,
    pub eps_i1: Vec<f64>,
    pub eps_q1: Vec<f64>,
}

/// Per-sample binary error probabilities; the sufficient statistics of all
/// detectors and deflection formulas.
#[derive(Debug, Clone, PartialEq)]
pub struct ChipErrorProbs {
    pub eps_i: Vec<f64>,
    pub eps_q: Vec<f64>,
    pub double: Option<DoubleChips>,
    /// `(eps_{I-Q}, eps_{I+Q})` for the phase-quantization branches.
    pub aux: Option<(Vec<f64>, Vec<f64>)>,
}

impl ChipErrorProbs {
    /// Builds from raw vectors, clamping into `[EPS_MIN, 1 - EPS_MIN]`.
    pub fn new(eps_i: Vec<f64>, eps_q: Vec<f64>) -> Self {
        assert_eq!(eps_i.len(), eps_q.len());
        Self {
            eps_i: eps_i.into_iter().map(clamp).collect(),
            eps_q: eps_q.into_iter().map(clamp).collect(),
            double: None,
            aux: None,
        }
    }

    pub fn len(&self) -> usize {
        self.eps_i.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eps_i.is_empty()
    }
}

impl DoubleChips {
    pub fn new(eps_i0: Vec<f64>, eps_q0: Vec<f64>, eps_i1: Vec<f64>, eps_q1: Vec<f64>) -> Self {
        let c = |v: Vec<f64>| v.into_iter().map(clamp).collect();
        Self {
            eps_i0: c(eps_i0),
            eps_q0: c(eps_q0),
            eps_i1: c(eps_i1),
            eps_q1: c(eps_q1),
        }
    }
}

/// `eps_I = Q(p cos phi)`, `eps_Q = Q(p sin(-phi))`.
pub fn chip_error_probs(reference: &ReferenceWaveform, phi: PhaseDifference) -> ChipErrorProbs {
    let (s, c) = phi.radians().sin_cos();
    ChipErrorProbs {
        eps_i: q_vec(reference, |p| p * c),
        eps_q: q_vec(reference, |p| -p * s),
        double: None,
        aux: None,
    }
}

/// Adds the four imbalance variants; `eps_i`/`eps_q` hold the `^0` pair.
///
/// `eps_I^0 = Q(p cos(phi + theta/2))`, `eps_Q^0 = Q(-p sin(phi - theta/2))`,
/// `eps_I^1 = Q(p sin(phi + theta/2))`, `eps_Q^1 = Q(p cos(phi - theta/2))`.
pub fn chip_error_probs_imbalanced(reference: &ReferenceWaveform, phi: PhaseDifference, theta: f64) -> ChipErrorProbs {
    let plus = phi.radians() + theta / 2.0;
    let minus = phi.radians() - theta / 2.0;
    let double = DoubleChips {
        eps_i0: q_vec(reference, |p| p * plus.cos()),
        eps_q0: q_vec(reference, |p| -p * minus.sin()),
        eps_i1: q_vec(reference, |p| p * plus.sin()),
        eps_q1: q_vec(reference, |p| p * minus.cos()),
    };
    ChipErrorProbs {
        eps_i: double.eps_i0.clone(),
        eps_q: double.eps_q0.clone(),
        double: Some(double),
        aux: None,
    }
}

/// Adds the `(I-Q, I+Q)` branch probabilities. Those branches see the
/// reference rotated by 45 degrees.
pub fn chip_error_probs_phase8(reference: &ReferenceWaveform, phi: PhaseDifference) -> ChipErrorProbs {
    let mut eps = chip_error_probs(reference, phi);
    let rotated = chip_error_probs(reference, PhaseDifference::new(phi.radians() - FRAC_PI_4));
    eps.aux = Some((rotated.eps_i, rotated.eps_q));
    eps
}
