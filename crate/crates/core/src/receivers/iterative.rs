//! Training-based receivers with optional small-weight removal and
//! decision-directed refinement.

use crate::frontend::QuantizedFrame;
use crate::symbol::SymbolPair;
use crate::{Error, Result};

use super::double::{
    combinational_weights, cw_llf, double_training_llf, estimate_sign_factors, prune_double_weights, DoubleWeights,
    SignFactors,
};
use super::linear::BranchMean;
use super::phase8::{phase8_llf, PhaseQuadMean, PhaseQuadWeights};
use super::{prune_small_weights, suboptimal_llf, Decision, Llf, WeightSet};

/// A detector whose weights are fitted from frames with known symbols.
pub trait TrainedModel: Sized {
    /// Fits from `(frame, symbol)` pairs, then removes small weights.
    fn fit(labeled: &[(&QuantizedFrame, SymbolPair)], threshold_frac: f64) -> Result<Self>;

    fn llf(&self, frame: &QuantizedFrame) -> Llf;
}

/// Single-sequence Taylor-expansion receiver.
#[derive(Debug, Clone)]
pub struct TaylorModel {
    pub weights: WeightSet,
}

impl TrainedModel for TaylorModel {
    fn fit(labeled: &[(&QuantizedFrame, SymbolPair)], threshold_frac: f64) -> Result<Self> {
        let (first, _) = labeled.first().ok_or(Error::EmptyTrainingSet)?;
        let mut acc = BranchMean::new(first.len());
        for (f, s) in labeled {
            acc.add(&f.i_bits, &f.q_bits, *s);
        }
        Ok(Self {
            weights: prune_small_weights(&acc.mean()?, threshold_frac),
        })
    }

    fn llf(&self, frame: &QuantizedFrame) -> Llf {
        suboptimal_llf(frame, &self.weights)
    }
}

/// Splits symbols into the `w^0` class {(1,1), (-1,-1)} and the `w^1` class
/// {(1,-1), (-1,1)}; the second member of each class is the negation of the
/// first, so no quadrature rotation is involved.
fn double_weights(labeled: &[(&QuantizedFrame, SymbolPair)]) -> Result<DoubleWeights> {
    let (first, _) = labeled.first().ok_or(Error::EmptyTrainingSet)?;
    let n = first.len();
    let mut class0 = BranchMean::new(n);
    let mut class1 = BranchMean::new(n);
    for (f, s) in labeled {
        let negate = if s.d1 > 0 {
            SymbolPair::REFERENCE
        } else {
            SymbolPair::new(-1, -1)
        };
        if s.d1 == s.d0 {
            class0.add(&f.i_bits, &f.q_bits, negate);
        } else {
            class1.add(&f.i_bits, &f.q_bits, negate);
        }
    }
    Ok(DoubleWeights {
        w0: class0.mean()?,
        w1: class1.mean()?,
    })
}

/// Double-training receiver.
#[derive(Debug, Clone)]
pub struct DoubleTrainingModel {
    pub weights: DoubleWeights,
}

impl TrainedModel for DoubleTrainingModel {
    fn fit(labeled: &[(&QuantizedFrame, SymbolPair)], threshold_frac: f64) -> Result<Self> {
        Ok(Self {
            weights: prune_double_weights(&double_weights(labeled)?, threshold_frac),
        })
    }

    fn llf(&self, frame: &QuantizedFrame) -> Llf {
        double_training_llf(frame, &self.weights)
    }
}

/// Combinational-weight receiver; sign factors are re-estimated on every fit.
#[derive(Debug, Clone)]
pub struct CombinationalModel {
    pub weights: WeightSet,
    pub sign_factors: SignFactors,
}

impl TrainedModel for CombinationalModel {
    fn fit(labeled: &[(&QuantizedFrame, SymbolPair)], threshold_frac: f64) -> Result<Self> {
        let dw = prune_double_weights(&double_weights(labeled)?, threshold_frac);
        let sign_factors = estimate_sign_factors(&dw);
        Ok(Self {
            weights: combinational_weights(&dw, sign_factors),
            sign_factors,
        })
    }

    fn llf(&self, frame: &QuantizedFrame) -> Llf {
        cw_llf(frame, &self.weights, self.sign_factors)
    }
}

/// Four-branch phase-quantization receiver.
#[derive(Debug, Clone)]
pub struct PhaseQuadModel {
    pub weights: PhaseQuadWeights,
}

impl TrainedModel for PhaseQuadModel {
    fn fit(labeled: &[(&QuantizedFrame, SymbolPair)], threshold_frac: f64) -> Result<Self> {
        let (first, _) = labeled.first().ok_or(Error::EmptyTrainingSet)?;
        let mut acc = PhaseQuadMean::new(first.len());
        for (f, s) in labeled {
            acc.add(f, *s)?;
        }
        let w = acc.mean()?;
        Ok(Self {
            weights: PhaseQuadWeights {
                main: prune_small_weights(&w.main, threshold_frac),
                aux: prune_small_weights(&w.aux, threshold_frac),
            },
        })
    }

    fn llf(&self, frame: &QuantizedFrame) -> Llf {
        phase8_llf(frame, &self.weights.main, &self.weights.aux).unwrap_or([0.0; 4])
    }
}

/// Refinement loop settings. `max_iter = 0` with `threshold_frac = 0`
/// gives the plain one-shot receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationConfig {
    pub max_iter: usize,
    pub threshold_frac: f64,
}

impl IterationConfig {
    pub const ONE_SHOT: Self = Self {
        max_iter: 0,
        threshold_frac: 0.0,
    };
}

impl Default for IterationConfig {
    fn default() -> Self {
        Self {
            max_iter: 5,
            threshold_frac: 0.2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct IterativeOutcome<M> {
    pub decisions: Vec<Decision>,
    /// Refinement passes performed.
    pub passes: usize,
    /// Model fitted in the last pass.
    pub model: M,
}

/// Fits on training, detects, then refits on training plus decided data
/// until decisions stop changing or `max_iter` passes have run.
pub fn iterate_with<M: TrainedModel>(
    training: &[QuantizedFrame],
    training_symbols: &[SymbolPair],
    data: &[QuantizedFrame],
    config: IterationConfig,
) -> Result<IterativeOutcome<M>> {
    if training.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    if training.len() != training_symbols.len() {
        return Err(Error::LengthMismatch {
            expected: training.len(),
            actual: training_symbols.len(),
        });
    }
    let mut labeled: Vec<(&QuantizedFrame, SymbolPair)> =
        training.iter().zip(training_symbols.iter().copied()).collect();
    let mut model = M::fit(&labeled, config.threshold_frac)?;
    let detect = |m: &M| -> Vec<Decision> { data.iter().map(|f| Decision::from_llf(m.llf(f))).collect() };
    let mut decisions = detect(&model);
    let mut passes = 0;
    while passes < config.max_iter {
        labeled.truncate(training.len());
        labeled.extend(data.iter().zip(decisions.iter().map(|d| d.symbol)));
        model = M::fit(&labeled, config.threshold_frac)?;
        let next = detect(&model);
        passes += 1;
        let unchanged = next.iter().zip(&decisions).all(|(a, b)| a.symbol == b.symbol);
        decisions = next;
        if unchanged {
            break;
        }
    }
    for d in &mut decisions {
        d.iteration_count = passes;
    }
    Ok(IterativeOutcome {
        decisions,
        passes,
        model,
    })
}

/// Taylor-expansion receiver trained on (1,1) symbols with iterative refinement.
pub fn iterative_demodulate(
    frames: &[QuantizedFrame],
    training_frames: &[QuantizedFrame],
    config: IterationConfig,
) -> Result<Vec<Decision>> {
    let symbols = vec![SymbolPair::REFERENCE; training_frames.len()];
    Ok(iterate_with::<TaylorModel>(training_frames, &symbols, frames, config)?.decisions)
}
