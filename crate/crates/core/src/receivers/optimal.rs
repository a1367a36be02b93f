use crate::frontend::QuantizedFrame;
use crate::symbol::HYPOTHESES;

use super::{linear_llf, ChipErrorProbs, Decision, Llf, WeightSet};

/// Exact monobit log-likelihood of the four hypotheses (natural log),
/// including the `-2N log 2` constant.
///
/// Under each hypothesis every sign bit either agrees with its noise-free
/// sign (probability `1 - eps`) or not (`eps`), so each term
/// `log(1 +- (1 - 2 eps)) - log 2` is evaluated as `log(1 - eps)` or
/// `log(eps)`, which stays accurate for `eps` near the clamp.
pub fn optimal_llf(frame: &QuantizedFrame, eps: &ChipErrorProbs) -> Llf {
    let mut out = [0.0; 4];
    for (k, h) in HYPOTHESES.iter().enumerate() {
        let s = h.d1 + h.d0;
        let t = h.d1 - h.d0;
        let mut acc = 0.0;
        for l in 0..eps.len() {
            let (ri, rq) = (frame.i_bits[l], frame.q_bits[l]);
            let agree_i = s * ri + t * rq > 0;
            let agree_q = s * rq - t * ri > 0;
            acc += if agree_i {
                (1.0 - eps.eps_i[l]).ln()
            } else {
                eps.eps_i[l].ln()
            };
            acc += if agree_q {
                (1.0 - eps.eps_q[l]).ln()
            } else {
                eps.eps_q[l].ln()
            };
        }
        out[k] = acc;
    }
    out
}

/// Precomputed ML detector.
///
/// Each log term equals `log 2 + 1/2 log(eps(1-eps)) +- 1/2 log((1-eps)/eps)`,
/// so the log-likelihood is a constant plus a linear combiner with weights
/// `1/2 log((1-eps)/eps)`.
#[derive(Debug, Clone)]
pub struct MlDetector {
    half_llr: WeightSet,
    offset: f64,
}

impl MlDetector {
    pub fn new(eps: &ChipErrorProbs) -> Self {
        let half = |e: &[f64]| -> Vec<f64> { e.iter().map(|&x| 0.5 * ((1.0 - x).ln() - x.ln())).collect() };
        let offset = eps
            .eps_i
            .iter()
            .chain(&eps.eps_q)
            .map(|&x| 0.5 * (x.ln() + (1.0 - x).ln()))
            .sum();
        Self {
            half_llr: WeightSet::new(half(&eps.eps_i), half(&eps.eps_q)),
            offset,
        }
    }

    pub fn llf(&self, frame: &QuantizedFrame) -> Llf {
        linear_llf(&frame.i_bits, &frame.q_bits, &self.half_llr).map(|v| v + self.offset)
    }

    pub fn detect(&self, frame: &QuantizedFrame) -> Decision {
        Decision::from_llf(self.llf(frame))
    }
}

/// Maximum-likelihood decision with first-maximum tie-breaking.
pub fn ml_detect(frame: &QuantizedFrame, eps: &ChipErrorProbs) -> Decision {
    Decision::from_llf(optimal_llf(frame, eps))
}
