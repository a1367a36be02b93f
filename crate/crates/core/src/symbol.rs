//! Gray-coded QPSK symbols.

use std::f64::consts::{FRAC_PI_2, PI};

/// One QPSK symbol as the bit pair `(d1, d0)`, each `+1` or `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SymbolPair {
    pub d1: i8,
    pub d0: i8,
}

/// Hypothesis order used for every four-valued log-likelihood array and
/// for argmax tie-breaking.
pub const HYPOTHESES: [SymbolPair; 4] = [
    SymbolPair::new(1, 1),
    SymbolPair::new(1, -1),
    SymbolPair::new(-1, 1),
    SymbolPair::new(-1, -1),
];

impl SymbolPair {
    /// Training symbol for single-sequence training and the first sequence
    /// of double training.
    pub const REFERENCE: SymbolPair = SymbolPair::new(1, 1);
    /// Symbol carried by the second double-training sequence.
    pub const QUADRATURE: SymbolPair = SymbolPair::new(1, -1);

    pub const fn new(d1: i8, d0: i8) -> Self {
        Self { d1, d0 }
    }

    /// Gray mapping: (1,1) -> 0, (1,-1) -> pi/2, (-1,1) -> -pi/2, (-1,-1) -> pi.
    pub fn phase(self) -> f64 {
        match (self.d1 > 0, self.d0 > 0) {
            (true, true) => 0.0,
            (true, false) => FRAC_PI_2,
            (false, true) => -FRAC_PI_2,
            (false, false) => PI,
        }
    }

    /// Position of this symbol in [`HYPOTHESES`].
    pub fn index(self) -> usize {
        match (self.d1 > 0, self.d0 > 0) {
            (true, true) => 0,
            (true, false) => 1,
            (false, true) => 2,
            (false, false) => 3,
        }
    }

    /// Builds a symbol from two bits (`0 -> +1`, `1 -> -1`).
    pub fn from_bits(b1: u8, b0: u8) -> Self {
        let m = |b: u8| if b == 0 { 1 } else { -1 };
        Self::new(m(b1), m(b0))
    }

    /// Number of differing bits between two symbols.
    pub fn bit_errors(self, other: SymbolPair) -> u32 {
        u32::from(self.d1 != other.d1) + u32::from(self.d0 != other.d0)
    }

    /// Maps a complex-valued sample `(i, q)` observed under this symbol back
    /// to what the reference symbol (1,1) would have produced, i.e. multiplies
    /// by `exp(-j g(d1, d0))` using exact sign relations.
    #[inline]
    pub fn derotate<T>(self, i: T, q: T) -> (T, T)
    where
        T: std::ops::Neg<Output = T>,
    {
        match (self.d1 > 0, self.d0 > 0) {
            (true, true) => (i, q),
            (true, false) => (q, -i),
            (false, true) => (-q, i),
            (false, false) => (-i, -q),
        }
    }
}
