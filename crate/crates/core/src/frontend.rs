//! Receiver front end: IQ imbalance and quantizers.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;

use crate::channel::{fill_noise, PhaseDifference};
use crate::rng;
use crate::waveform::ReferenceWaveform;
use crate::{Error, Result, SymbolPair};

/// Amplitude and phase mismatch between the I and Q branches.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ImbalanceParams {
    /// Amplitude imbalance `(a_I - a_Q)/(a_I + a_Q)`, in `(-1, 1)`.
    pub alpha: f64,
    /// Deviation from quadrature, radians.
    pub theta: f64,
}

impl ImbalanceParams {
    pub const NONE: ImbalanceParams = ImbalanceParams { alpha: 0.0, theta: 0.0 };

    pub fn new(alpha: f64, theta: f64) -> Result<Self> {
        if !(alpha.abs() < 1.0) {
            return Err(Error::Config(format!(
                "amplitude imbalance must lie in (-1, 1), got {alpha}"
            )));
        }
        if !theta.is_finite() {
            return Err(Error::Config("phase imbalance must be finite".into()));
        }
        Ok(Self { alpha, theta })
    }

    pub fn from_degrees(alpha: f64, theta_deg: f64) -> Result<Self> {
        Self::new(alpha, theta_deg.to_radians())
    }

    /// `mu = cos(theta/2) - j alpha sin(theta/2)`.
    pub fn mu(&self) -> Complex64 {
        let (s, c) = (self.theta / 2.0).sin_cos();
        Complex64::new(c, -self.alpha * s)
    }

    /// `nu = alpha cos(theta/2) + j sin(theta/2)`.
    pub fn nu(&self) -> Complex64 {
        let (s, c) = (self.theta / 2.0).sin_cos();
        Complex64::new(self.alpha * c, s)
    }

    pub fn is_none(&self) -> bool {
        self.alpha == 0.0 && self.theta == 0.0
    }

    #[inline]
    fn distort(&self, mu: Complex64, nu: Complex64, r: Complex64) -> Complex64 {
        if self.is_none() {
            r
        } else {
            mu * r + nu * r.conj()
        }
    }
}

/// `r_d = mu r + nu conj(r)` per sample.
pub fn apply_iq_imbalance(baseband: &[Complex64], p: &ImbalanceParams) -> Vec<Complex64> {
    let (mu, nu) = (p.mu(), p.nu());
    baseband.iter().map(|&r| p.distort(mu, nu, r)).collect()
}

/// `+1` for strictly positive input, `-1` otherwise.
#[inline]
pub fn sign_bit(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else {
        -1
    }
}

pub fn quantize_monobit(samples: &[f64]) -> Vec<i8> {
    samples.iter().map(|&x| sign_bit(x)).collect()
}

/// Sign-bit samples of one symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizedFrame {
    pub i_bits: Vec<i8>,
    pub q_bits: Vec<i8>,
    /// Sign of `(I+Q)/sqrt 2`, phase-quantization mode only.
    pub sum_bits: Option<Vec<i8>>,
    /// Sign of `(I-Q)/sqrt 2`, phase-quantization mode only.
    pub diff_bits: Option<Vec<i8>>,
}

impl QuantizedFrame {
    pub fn monobit(i_bits: Vec<i8>, q_bits: Vec<i8>) -> Self {
        Self {
            i_bits,
            q_bits,
            sum_bits: None,
            diff_bits: None,
        }
    }

    pub fn len(&self) -> usize {
        self.i_bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.i_bits.is_empty()
    }

    /// The `(I-Q, I+Q)` pair, which behaves like an I/Q pair rotated by 45 degrees.
    pub fn aux(&self) -> Result<(&[i8], &[i8])> {
        match (&self.diff_bits, &self.sum_bits) {
            (Some(d), Some(s)) => Ok((d, s)),
            _ => Err(Error::MissingAuxBranches),
        }
    }
}

/// Unquantized samples of one symbol after the front end.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalogFrame {
    pub i: Vec<f64>,
    pub q: Vec<f64>,
}

impl AnalogFrame {
    pub fn monobit(&self) -> QuantizedFrame {
        QuantizedFrame::monobit(quantize_monobit(&self.i), quantize_monobit(&self.q))
    }

    pub fn phase8(&self) -> QuantizedFrame {
        quantize_phase8(&self.i, &self.q).expect("branches share a length")
    }
}

/// Four sign bits per sample (I, Q, I+Q, I-Q) identifying one of eight
/// 45-degree phase sectors.
pub fn quantize_phase8(i_samples: &[f64], q_samples: &[f64]) -> Result<QuantizedFrame> {
    if i_samples.len() != q_samples.len() {
        return Err(Error::LengthMismatch {
            expected: i_samples.len(),
            actual: q_samples.len(),
        });
    }
    let (sum, diff) = i_samples
        .iter()
        .zip(q_samples)
        .map(|(&i, &q)| (sign_bit((i + q) * FRAC_1_SQRT_2), sign_bit((i - q) * FRAC_1_SQRT_2)))
        .unzip();
    Ok(QuantizedFrame {
        i_bits: quantize_monobit(i_samples),
        q_bits: quantize_monobit(q_samples),
        sum_bits: Some(sum),
        diff_bits: Some(diff),
    })
}

/// Output format of [`sample_symbol_stream`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SamplingMode {
    Monobit,
    Phase8,
    FullResolution,
}

/// One received symbol in the requested format.
#[derive(Debug, Clone, PartialEq)]
pub enum Frame {
    Quantized(QuantizedFrame),
    Analog(AnalogFrame),
}

/// Noisy, imbalanced baseband samples for a burst of symbols.
///
/// Per symbol `k` and sample `l`: `exp(j(g(d) - phi)) p_ref(lT)` plus unit
/// complex noise, then `mu r + nu conj(r)`. Noise is drawn from `rng` in
/// symbol order.
pub fn synthesize_burst<R: Rng>(
    reference: &ReferenceWaveform,
    symbols: &[SymbolPair],
    phi: PhaseDifference,
    imbalance: &ImbalanceParams,
    rng: &mut R,
) -> Vec<AnalogFrame> {
    let n = reference.symbol_len();
    let (mu, nu) = (imbalance.mu(), imbalance.nu());
    let mut noise = Vec::with_capacity(n);
    symbols
        .iter()
        .map(|s| {
            noise.clear();
            fill_noise(rng, n, &mut noise);
            let rot = Complex64::from_polar(1.0, s.phase() - phi.radians());
            let (i, q) = reference
                .samples
                .iter()
                .zip(&noise)
                .map(|(&p, &w)| {
                    let r = imbalance.distort(mu, nu, rot * p + w);
                    (r.re, r.im)
                })
                .unzip();
            AnalogFrame { i, q }
        })
        .collect()
}

/// Generates and quantizes a burst of symbols with noise seeded by `noise_seed`.
pub fn sample_symbol_stream(
    reference: &ReferenceWaveform,
    symbols: &[SymbolPair],
    phi: PhaseDifference,
    imbalance: &ImbalanceParams,
    noise_seed: u64,
    mode: SamplingMode,
) -> Result<Vec<Frame>> {
    if symbols.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let analog = synthesize_burst(reference, symbols, phi, imbalance, &mut rng::seeded(noise_seed));
    Ok(analog
        .into_iter()
        .map(|f| match mode {
            SamplingMode::Monobit => Frame::Quantized(f.monobit()),
            SamplingMode::Phase8 => Frame::Quantized(f.phase8()),
            SamplingMode::FullResolution => Frame::Analog(f),
        })
        .collect())
}
