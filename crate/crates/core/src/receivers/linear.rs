use crate::channel::PhaseDifference;
use crate::frontend::QuantizedFrame;
use crate::waveform::ReferenceWaveform;
use crate::{Error, Result, SymbolPair};

use super::{combine, Llf};

/// Per-sample combining weights of the I and Q branches.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSet {
    pub w_i: Vec<f64>,
    pub w_q: Vec<f64>,
}

impl WeightSet {
    pub fn new(w_i: Vec<f64>, w_q: Vec<f64>) -> Self {
        assert_eq!(w_i.len(), w_q.len(), "branch weight lengths differ");
        Self { w_i, w_q }
    }

    pub fn zeros(n: usize) -> Self {
        Self::new(vec![0.0; n], vec![0.0; n])
    }

    /// Exact weights `1 - 2 eps`.
    pub fn from_eps(eps_i: &[f64], eps_q: &[f64]) -> Self {
        let w = |e: &[f64]| e.iter().map(|x| 1.0 - 2.0 * x).collect();
        Self::new(w(eps_i), w(eps_q))
    }

    pub fn len(&self) -> usize {
        self.w_i.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w_i.is_empty()
    }

    /// `max_l max(|w_I,l|, |w_Q,l|)`.
    pub fn max_abs(&self) -> f64 {
        self.w_i
            .iter()
            .zip(&self.w_q)
            .fold(0.0f64, |m, (a, b)| m.max(a.abs()).max(b.abs()))
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self::new(
            self.w_i.iter().map(|w| w * k).collect(),
            self.w_q.iter().map(|w| w * k).collect(),
        )
    }
}

/// Linear combiner on any real-valued branch pair.
///
/// Scores `sum_l { w_I ((d1+d0)/2 r_I + (d1-d0)/2 r_Q) - w_Q ((d1-d0)/2 r_I - (d1+d0)/2 r_Q) }`
/// for the four hypotheses.
pub fn linear_llf<T: Copy + Into<f64>>(r_i: &[T], r_q: &[T], w: &WeightSet) -> Llf {
    let (mut a, mut b, mut c, mut d) = (0.0, 0.0, 0.0, 0.0);
    for l in 0..w.len() {
        let (ri, rq): (f64, f64) = (r_i[l].into(), r_q[l].into());
        let (wi, wq) = (w.w_i[l], w.w_q[l]);
        a += wi * ri;
        b += wq * rq;
        c += wi * rq;
        d += wq * ri;
    }
    combine(a, b, c, d)
}

/// Taylor-expanded (linear) log-likelihood of a monobit frame.
pub fn suboptimal_llf(frame: &QuantizedFrame, w: &WeightSet) -> Llf {
    linear_llf(&frame.i_bits, &frame.q_bits, w)
}

/// Running mean of branch samples rotated back to the reference symbol.
#[derive(Debug, Clone)]
pub(crate) struct BranchMean {
    sum_i: Vec<f64>,
    sum_q: Vec<f64>,
    count: usize,
}

impl BranchMean {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            sum_i: vec![0.0; n],
            sum_q: vec![0.0; n],
            count: 0,
        }
    }

    /// Adds `(r_i, r_q)` observed under `symbol`, rotated to (1,1).
    pub(crate) fn add(&mut self, r_i: &[i8], r_q: &[i8], symbol: SymbolPair) {
        for (l, (&i, &q)) in r_i.iter().zip(r_q).enumerate() {
            let (i0, q0) = symbol.derotate(i as i32, q as i32);
            self.sum_i[l] += f64::from(i0);
            self.sum_q[l] += f64::from(q0);
        }
        self.count += 1;
    }

    pub(crate) fn mean(&self) -> Result<WeightSet> {
        if self.count == 0 {
            return Err(Error::EmptyTrainingSet);
        }
        let k = 1.0 / self.count as f64;
        Ok(WeightSet::new(
            self.sum_i.iter().map(|s| s * k).collect(),
            self.sum_q.iter().map(|s| s * k).collect(),
        ))
    }
}

/// ML weight estimates from training frames that all carry symbol (1,1):
/// the per-sample average of the sign bits.
pub fn estimate_weights(training: &[QuantizedFrame]) -> Result<WeightSet> {
    let first = training.first().ok_or(Error::EmptyTrainingSet)?;
    let mut acc = BranchMean::new(first.len());
    for f in training {
        if f.len() != first.len() {
            return Err(Error::LengthMismatch {
                expected: first.len(),
                actual: f.len(),
            });
        }
        acc.add(&f.i_bits, &f.q_bits, SymbolPair::REFERENCE);
    }
    acc.mean()
}

/// Matched-filter weights: projection of the rotated reference,
/// `w_I ~ p cos phi`, `w_Q ~ -p sin phi`, scaled to unit peak.
pub fn matched_filter_weights(reference: &ReferenceWaveform, phi: PhaseDifference) -> Result<WeightSet> {
    let (s, c) = phi.radians().sin_cos();
    let raw = WeightSet::new(
        reference.samples.iter().map(|p| p * c).collect(),
        reference.samples.iter().map(|p| -p * s).collect(),
    );
    let peak = raw.max_abs();
    if !(peak > 0.0) {
        return Err(Error::ZeroEnergyWaveform);
    }
    Ok(raw.scaled(1.0 / peak))
}

/// Zeroes both branch weights wherever the larger of the two is below
/// `threshold_frac` times the overall peak.
pub fn prune_small_weights(w: &WeightSet, threshold_frac: f64) -> WeightSet {
    let threshold = threshold_frac * w.max_abs();
    let mut out = w.clone();
    for l in 0..w.len() {
        if w.w_i[l].abs().max(w.w_q[l].abs()) < threshold {
            out.w_i[l] = 0.0;
            out.w_q[l] = 0.0;
        }
    }
    out
}
