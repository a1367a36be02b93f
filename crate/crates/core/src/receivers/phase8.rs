use crate::frontend::QuantizedFrame;
use crate::{Error, Result, SymbolPair};

use super::linear::BranchMean;
use super::{linear_llf, suboptimal_llf, ChipErrorProbs, Llf, WeightSet};

/// Weights of the four-branch receiver: `main` on (I, Q), `aux` on (I-Q, I+Q).
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseQuadWeights {
    pub main: WeightSet,
    pub aux: WeightSet,
}

impl PhaseQuadWeights {
    /// Exact weights `1 - 2 eps` on all four branches.
    pub fn from_chips(eps: &ChipErrorProbs) -> Result<Self> {
        let (diff, sum) = eps.aux.as_ref().ok_or(Error::MissingAuxBranches)?;
        Ok(Self {
            main: WeightSet::from_eps(&eps.eps_i, &eps.eps_q),
            aux: WeightSet::from_eps(diff, sum),
        })
    }
}

pub(crate) struct PhaseQuadMean {
    main: BranchMean,
    aux: BranchMean,
}

impl PhaseQuadMean {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            main: BranchMean::new(n),
            aux: BranchMean::new(n),
        }
    }

    pub(crate) fn add(&mut self, frame: &QuantizedFrame, symbol: SymbolPair) -> Result<()> {
        let (diff, sum) = frame.aux()?;
        self.main.add(&frame.i_bits, &frame.q_bits, symbol);
        self.aux.add(diff, sum, symbol);
        Ok(())
    }

    pub(crate) fn mean(&self) -> Result<PhaseQuadWeights> {
        Ok(PhaseQuadWeights {
            main: self.main.mean()?,
            aux: self.aux.mean()?,
        })
    }
}

/// Trains both branch pairs from frames that carry symbol (1,1).
pub fn estimate_phase8_weights(training: &[QuantizedFrame]) -> Result<PhaseQuadWeights> {
    let first = training.first().ok_or(Error::EmptyTrainingSet)?;
    let mut acc = PhaseQuadMean::new(first.len());
    for f in training {
        acc.add(f, SymbolPair::REFERENCE)?;
    }
    acc.mean()
}

/// Sum of the linear combiners on the (I, Q) and (I-Q, I+Q) pairs.
pub fn phase8_llf(frame: &QuantizedFrame, w_main: &WeightSet, w_aux: &WeightSet) -> Result<Llf> {
    let (diff, sum) = frame.aux()?;
    let main = suboptimal_llf(frame, w_main);
    let aux = linear_llf(diff, sum, w_aux);
    Ok([main[0] + aux[0], main[1] + aux[1], main[2] + aux[2], main[3] + aux[3]])
}
