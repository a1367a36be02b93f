//! Transmit pulse and the sampled reference response.
//!
//! The reference `p_ref(lT)` is the raised-cosine pulse convolved with the
//! channel and the receive low-pass filter, sampled once per Nyquist period
//! `T = 1/(2B)`. The filter gain `1/sqrt(N0 B)` makes the sampled noise unit
//! variance per branch, so reference samples are expressed in noise standard
//! deviations and their energy is the per-symbol SNR.

use std::f64::consts::PI;

use crate::channel::ChannelRealization;
use crate::{Error, Result};

/// Raised-cosine pulse parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec {
    /// Time constant in seconds.
    pub tau: f64,
    /// Roll-off factor in `[0, 1]`.
    pub beta: f64,
    /// Fine-grid points per Nyquist sample used for the filter convolution.
    pub oversample: usize,
}

impl Default for PulseSpec {
    fn default() -> Self {
        Self {
            tau: 0.5e-9,
            beta: 1.0,
            oversample: 16,
        }
    }
}

impl PulseSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::InvalidPulse(format!("tau must be > 0, got {}", self.tau)));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::InvalidPulse(format!(
                "beta must lie in [0, 1], got {}",
                self.beta
            )));
        }
        if self.oversample < 4 {
            return Err(Error::InvalidPulse(format!(
                "oversample must be >= 4, got {}",
                self.oversample
            )));
        }
        Ok(())
    }
}

/// Placement of the N samples of one symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymbolWindow {
    /// Samples per symbol, `N = T_s / T`.
    pub symbol_len: usize,
    /// Index at which the peak of a zero-delay pulse lands.
    pub peak_index: usize,
}

impl SymbolWindow {
    /// Window with the zero-delay peak centred at `floor(N/2)`.
    pub fn centered(symbol_len: usize) -> Self {
        Self {
            symbol_len,
            peak_index: symbol_len / 2,
        }
    }
}

/// Sampled reference response of one symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceWaveform {
    pub samples: Vec<f64>,
    /// Nyquist sampling period `T` in seconds.
    pub sample_period: f64,
}

impl ReferenceWaveform {
    pub fn new(samples: Vec<f64>, sample_period: f64) -> Self {
        Self { samples, sample_period }
    }

    /// Samples per symbol.
    pub fn symbol_len(&self) -> usize {
        self.samples.len()
    }

    /// `sum p_ref(lT)^2`, which is also the linear Eb/N0.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s * s).sum()
    }

    /// Energy in dB.
    pub fn snr_db(&self) -> f64 {
        10.0 * self.energy().log10()
    }
}

#[inline]
fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = PI * x;
        px.sin() / px
    }
}

/// Raised-cosine pulse `sinc(t/tau) cos(pi beta t/tau) / (1 - 4 beta^2 t^2/tau^2)`.
///
/// At `|t| = tau/(2 beta)` the removable singularity is replaced by its
/// limit `(pi/4) sinc(1/(2 beta))`.
pub fn raised_cosine(t: f64, spec: &PulseSpec) -> f64 {
    let x = t / spec.tau;
    let bx = 2.0 * spec.beta * x;
    let denom = 1.0 - bx * bx;
    if denom.abs() < 1e-12 {
        return PI / 4.0 * sinc(1.0 / (2.0 * spec.beta));
    }
    sinc(x) * (PI * spec.beta * x).cos() / denom
}

/// Truncated receive low-pass filter with unit passband gain.
///
/// An ideal `sin(2 pi B t)/(pi t)` kernel limited to `|t| < 8/B` by a
/// raised-cosine (Hann) taper.
#[derive(Debug, Clone)]
struct LowPass {
    taps: Vec<f64>,
    half_len: usize,
}

impl LowPass {
    const SPAN_BANDWIDTHS: f64 = 8.0;

    fn new(bandwidth: f64, dt: f64) -> Self {
        let span = Self::SPAN_BANDWIDTHS / bandwidth;
        let half_len = (span / dt).round() as usize;
        let taps = (0..=2 * half_len)
            .map(|m| {
                let u = (m as f64 - half_len as f64) * dt;
                let ideal = 2.0 * bandwidth * sinc(2.0 * bandwidth * u);
                let taper = 0.5 * (1.0 + (PI * u / span).cos());
                ideal * taper * dt
            })
            .collect();
        Self { taps, half_len }
    }
}

/// Builds the sampled reference `p_tr * h * p_rec` for one symbol window.
///
/// The channel convolution is evaluated exactly (each tap shifts and scales
/// the analytic pulse); the filter convolution runs on a grid
/// `spec.oversample` times finer than the Nyquist grid.
pub fn build_reference(
    spec: &PulseSpec,
    channel: &ChannelRealization,
    window: SymbolWindow,
    bandwidth: f64,
    noise_psd: f64,
) -> Result<ReferenceWaveform> {
    spec.validate()?;
    if !(bandwidth > 0.0) || !(noise_psd > 0.0) {
        return Err(Error::InvalidPulse("bandwidth and noise PSD must be positive".into()));
    }
    if channel.taps.is_empty() {
        return Err(Error::EmptyChannel);
    }
    if let Some(index) = channel.taps.iter().position(|t| t.gain.im != 0.0) {
        return Err(Error::ComplexGain { index });
    }
    let period = 1.0 / (2.0 * bandwidth);
    let symbol_s = window.symbol_len as f64 * period;
    let spread_s = channel.delay_spread();
    if spread_s >= symbol_s {
        return Err(Error::DelaySpreadExceedsSymbol { spread_s, symbol_s });
    }

    let dt = period / spec.oversample as f64;
    let lpf = LowPass::new(bandwidth, dt);
    let gain = 1.0 / (noise_psd * bandwidth).sqrt();

    let samples = (0..window.symbol_len)
        .map(|l| {
            let t = (l as f64 - window.peak_index as f64) * period;
            let filtered: f64 = lpf
                .taps
                .iter()
                .enumerate()
                .map(|(m, &h)| {
                    let u = (m as f64 - lpf.half_len as f64) * dt;
                    let x: f64 = channel
                        .taps
                        .iter()
                        .map(|tap| tap.gain.re * raised_cosine(t - u - tap.delay, spec))
                        .sum();
                    h * x
                })
                .sum();
            gain * filtered
        })
        .collect();
    Ok(ReferenceWaveform::new(samples, period))
}

/// Rescales `reference` so that its energy equals `10^(target_db/10)`.
pub fn scale_to_snr(reference: &ReferenceWaveform, target_db: f64) -> Result<ReferenceWaveform> {
    let energy = reference.energy();
    if !(energy > 0.0) || !energy.is_finite() {
        return Err(Error::ZeroEnergyWaveform);
    }
    let k = (10f64.powf(target_db / 10.0) / energy).sqrt();
    Ok(ReferenceWaveform::new(
        reference.samples.iter().map(|s| s * k).collect(),
        reference.sample_period,
    ))
}
