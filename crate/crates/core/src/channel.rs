//! Channel realizations, carrier phase and receiver noise.
//!
//! Multipath generators are parameterized stand-ins for the dense (UWB
//! indoor) and sparse (clustered mm-wave) cases. Their taps are real-valued
//! with random polarity, as in the impulse-radio channel models, so the
//! sampled reference stays real. Externally generated realizations can be
//! loaded from a plain-text tap file.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp, Poisson, StandardNormal};

use crate::rng;
use crate::{Error, Result};

/// One multipath component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tap {
    /// Delay in seconds.
    pub delay: f64,
    pub gain: Complex64,
}

impl Tap {
    pub fn new(delay: f64, gain: Complex64) -> Self {
        Self { delay, gain }
    }

    fn real(delay: f64, gain: f64) -> Self {
        Self::new(delay, Complex64::new(gain, 0.0))
    }
}

/// A static channel impulse response.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub taps: Vec<Tap>,
    /// Free-form provenance.
    pub label: String,
}

impl ChannelRealization {
    pub fn new(taps: Vec<Tap>, label: impl Into<String>) -> Self {
        Self {
            taps,
            label: label.into(),
        }
    }

    /// Delay of the last tap in seconds.
    pub fn delay_spread(&self) -> f64 {
        self.taps.last().map_or(0.0, |t| t.delay)
    }

    /// `sum |gain|^2`.
    pub fn power(&self) -> f64 {
        self.taps.iter().map(|t| t.gain.norm_sqr()).sum()
    }

    fn normalized(mut self) -> Self {
        let p = self.power();
        if p > 0.0 {
            let k = 1.0 / p.sqrt();
            for t in &mut self.taps {
                t.gain *= k;
            }
        }
        self
    }
}

/// Single unit tap at zero delay.
pub fn awgn_channel() -> ChannelRealization {
    ChannelRealization::new(vec![Tap::real(0.0, 1.0)], "awgn")
}

/// Exponential power-delay-profile generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenseProfile {
    /// Power decay constant in ns (`f64::INFINITY` gives a flat profile).
    pub decay_ns: f64,
    pub num_taps: usize,
    pub spacing_ns: f64,
}

impl Default for DenseProfile {
    fn default() -> Self {
        Self {
            decay_ns: 4.0,
            num_taps: 24,
            spacing_ns: 0.5,
        }
    }
}

/// Uniformly spaced taps with zero-mean Gaussian gains whose variance
/// follows `exp(-delay/decay)`, normalized to unit power.
pub fn dense_multipath(seed: u64, profile: &DenseProfile) -> Result<ChannelRealization> {
    if profile.num_taps == 0 || !(profile.decay_ns > 0.0) || !(profile.spacing_ns > 0.0) {
        return Err(Error::InvalidProfile(format!("{profile:?}")));
    }
    let mut rng = rng::seeded(seed);
    let taps = (0..profile.num_taps)
        .map(|k| {
            let delay_ns = k as f64 * profile.spacing_ns;
            let sigma = (-delay_ns / profile.decay_ns).exp().sqrt();
            let g: f64 = rng.sample(StandardNormal);
            Tap::real(delay_ns * 1e-9, sigma * g)
        })
        .collect();
    Ok(ChannelRealization::new(taps, format!("dense/{seed}")).normalized())
}

/// Clustered generator with few rays per cluster.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SparseProfile {
    pub num_clusters: usize,
    /// Window over which cluster arrival times are drawn.
    pub cluster_span_ns: f64,
    /// Mean number of rays per cluster in addition to the first one.
    pub ray_rate: f64,
}

impl Default for SparseProfile {
    fn default() -> Self {
        Self {
            num_clusters: 3,
            cluster_span_ns: 10.0,
            ray_rate: 0.5,
        }
    }
}

impl SparseProfile {
    const RAY_SPACING_NS: f64 = 0.5;
    const RAY_DECAY_NS: f64 = 1.0;
    const FIRST_RAY_POWER: f64 = 10.0;
}

/// Clusters at uniform random offsets within the span (the first at zero),
/// each with `1 + Poisson(ray_rate)` rays. The very first ray has a fixed,
/// dominant amplitude; the remaining gains are Gaussian with cluster and ray
/// exponential decay. Normalized to unit power.
pub fn sparse_multipath(seed: u64, profile: &SparseProfile) -> Result<ChannelRealization> {
    if profile.num_clusters == 0 || !(profile.cluster_span_ns > 0.0) || !(profile.ray_rate >= 0.0) {
        return Err(Error::InvalidProfile(format!("{profile:?}")));
    }
    let mut rng = rng::seeded(seed);
    let cluster_decay = profile.cluster_span_ns / 2.0;
    let gaps = Exp::new(1.0 / SparseProfile::RAY_SPACING_NS).expect("positive rate");
    let poisson = (profile.ray_rate > 0.0).then(|| Poisson::new(profile.ray_rate).expect("positive rate"));

    let mut taps = Vec::new();
    for c in 0..profile.num_clusters {
        let start = if c == 0 {
            0.0
        } else {
            rng.random_range(0.0..profile.cluster_span_ns)
        };
        let extra = poisson.as_ref().map_or(0, |p| p.sample(&mut rng) as usize);
        let mut offset = 0.0;
        for r in 0..=extra {
            if r > 0 {
                offset += gaps.sample(&mut rng);
            }
            let power = (-start / cluster_decay).exp() * (-offset / SparseProfile::RAY_DECAY_NS).exp();
            let gain = if c == 0 && r == 0 {
                SparseProfile::FIRST_RAY_POWER.sqrt()
            } else {
                power.sqrt() * rng.sample::<f64, _>(StandardNormal)
            };
            taps.push(Tap::real((start + offset) * 1e-9, gain));
        }
    }
    taps.sort_by(|a, b| a.delay.total_cmp(&b.delay));
    let mut merged: Vec<Tap> = Vec::with_capacity(taps.len());
    for t in taps {
        match merged.last_mut() {
            Some(last) if last.delay == t.delay => last.gain += t.gain,
            _ => merged.push(t),
        }
    }
    Ok(ChannelRealization::new(merged, format!("sparse/{seed}")).normalized())
}

/// Reads a tap file: one `delay_seconds,real_gain,imag_gain` per line,
/// `#` comments, strictly increasing delays. Taps are returned as stored.
pub fn load_channel_file(path: &Path) -> Result<ChannelRealization> {
    let text = std::fs::read_to_string(path)?;
    let parse_err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut taps: Vec<Tap> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(parse_err(line_no, format!("expected 3 fields, found {}", fields.len())));
        }
        let mut vals = [0.0f64; 3];
        for (v, f) in vals.iter_mut().zip(&fields) {
            *v = f.parse().map_err(|e| parse_err(line_no, format!("`{f}`: {e}")))?;
        }
        if !(vals[0] >= 0.0) {
            return Err(parse_err(line_no, "delay must be non-negative".into()));
        }
        if taps.last().is_some_and(|t| t.delay >= vals[0]) {
            return Err(Error::NonMonotoneDelays { line: line_no });
        }
        taps.push(Tap::new(vals[0], Complex64::new(vals[1], vals[2])));
    }
    if taps.is_empty() {
        return Err(parse_err(0, "no taps found".into()));
    }
    Ok(ChannelRealization::new(taps, path.display().to_string()))
}

/// Writes a tap file readable by [`load_channel_file`]; values round-trip
/// exactly.
pub fn save_channel_file(channel: &ChannelRealization, path: &Path) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "# {}", channel.label.replace('\n', " "));
    let _ = writeln!(out, "# delay_seconds,real_gain,imag_gain");
    for t in &channel.taps {
        let _ = writeln!(out, "{:?},{:?},{:?}", t.delay, t.gain.re, t.gain.im);
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Carrier phase difference between transmitter and receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseDifference {
    phi: f64,
}

impl PhaseDifference {
    /// Reduces `radians` into `[0, 2 pi)`.
    pub fn new(radians: f64) -> Self {
        let mut phi = radians.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        Self { phi }
    }

    pub fn radians(self) -> f64 {
        self.phi
    }

    pub fn degrees(self) -> f64 {
        self.phi.to_degrees()
    }
}

/// Uniform draw on `[0, 2 pi)`.
pub fn draw_phase(seed: u64) -> PhaseDifference {
    draw_phase_with(&mut rng::seeded(seed))
}

pub(crate) fn draw_phase_with<R: Rng>(rng: &mut R) -> PhaseDifference {
    PhaseDifference::new(rng.random_range(0.0..TAU))
}

pub fn fixed_phase(degrees: f64) -> PhaseDifference {
    PhaseDifference::new(degrees.to_radians())
}

/// `n` i.i.d. complex samples with unit-variance real and imaginary parts.
pub fn noise_frame(seed: u64, n: usize) -> Vec<Complex64> {
    let mut rng = rng::seeded(seed);
    let mut out = Vec::with_capacity(n);
    fill_noise(&mut rng, n, &mut out);
    out
}

pub(crate) fn fill_noise<R: Rng>(rng: &mut R, n: usize, out: &mut Vec<Complex64>) {
    out.extend((0..n).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))));
}
