use std::fmt;

use crate::receivers::{ChipErrorProbs, SignFactors};

use super::q_function;

/// Which detector a deflection ratio describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeflectionVariant {
    Optimal,
    Suboptimal,
    DoubleTraining,
    Combinational,
}

impl DeflectionVariant {
    pub const ALL: [Self; 4] = [
        Self::Optimal,
        Self::Suboptimal,
        Self::DoubleTraining,
        Self::Combinational,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Self::Optimal => "opt",
            Self::Suboptimal => "sub",
            Self::DoubleTraining => "dt",
            Self::Combinational => "cw",
        }
    }
}

impl fmt::Display for DeflectionVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeflectionReport {
    pub variant: DeflectionVariant,
    pub d_value: f64,
    /// `Q(sqrt(d_value))`.
    pub predicted_ber: f64,
}

impl DeflectionReport {
    fn new(variant: DeflectionVariant, num_sq: f64, den: f64) -> Self {
        let d_value = if num_sq == 0.0 || den <= 0.0 { 0.0 } else { num_sq / den };
        Self {
            variant,
            d_value,
            predicted_ber: q_function(d_value.sqrt()),
        }
    }
}

/// Training lengths of the two double-training sequences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleTraining {
    pub n_t0: f64,
    pub n_t1: f64,
}

impl DoubleTraining {
    /// Splits `n_t` symbols evenly.
    pub fn split(n_t: usize) -> Self {
        let half = n_t as f64 / 2.0;
        Self { n_t0: half, n_t1: half }
    }
}

fn m(x: f64) -> f64 {
    (1.0 - 2.0 * x) * (1.0 - 2.0 * x)
}

fn v(x: f64) -> f64 {
    x * (1.0 - x)
}

fn llr(x: f64) -> f64 {
    ((1.0 - x) / x).ln()
}

/// Deflection of the exact monobit log-likelihood.
pub fn deflection_opt(eps: &ChipErrorProbs) -> DeflectionReport {
    let (mut num, mut den) = (0.0, 0.0);
    for (&ei, &eq) in eps.eps_i.iter().zip(&eps.eps_q) {
        let (li, lq) = (llr(ei), llr(eq));
        num += (1.0 - ei - eq) * li + (ei - eq) * lq;
        den += (v(ei) + v(eq)) * (li * li + lq * lq);
    }
    DeflectionReport::new(DeflectionVariant::Optimal, 2.0 * num * num, den)
}

/// Deflection of the Taylor-expansion receiver with weights averaged over
/// `n_t_eq` training symbols. The subtracted square is taken per sample.
pub fn deflection_sub(eps: &ChipErrorProbs, n_t_eq: f64) -> DeflectionReport {
    let (mut num, mut den) = (0.0, 0.0);
    for (&ei, &eq) in eps.eps_i.iter().zip(&eps.eps_q) {
        let mm = m(ei) + m(eq);
        num += mm;
        den += mm + 4.0 * (v(ei) + v(eq)) / n_t_eq - 0.5 * mm * mm;
    }
    DeflectionReport::new(DeflectionVariant::Suboptimal, num * num, den)
}

fn double(eps: &ChipErrorProbs) -> &crate::receivers::DoubleChips {
    eps.double
        .as_ref()
        .expect("double-training deflection needs imbalance chip probabilities")
}

/// Deflection of the double-training receiver. Only the first sequence's
/// weights enter the (1,1) statistic, so only `n_t0` matters.
///
/// # Panics
/// If `eps` lacks the imbalance variants.
pub fn deflection_dt(eps: &ChipErrorProbs, training: DoubleTraining) -> DeflectionReport {
    let d = double(eps);
    let (mut num, mut den) = (0.0, 0.0);
    for l in 0..eps.len() {
        let (ei0, eq0, ei1, eq1) = (d.eps_i0[l], d.eps_q0[l], d.eps_i1[l], d.eps_q1[l]);
        let (wi0, wq0, wi1, wq1) = (1.0 - 2.0 * ei0, 1.0 - 2.0 * eq0, 1.0 - 2.0 * ei1, 1.0 - 2.0 * eq1);
        num += wi0 * (ei1 - ei0) + wq0 * (eq1 - eq0);
        den += 4.0 * (v(ei0) + v(eq0)) / training.n_t0 + wi0 * wi0 + wq0 * wq0
            - 0.5 * (wi0.powi(4) + (wi0 * wi1).powi(2) + wq0.powi(4) + (wq0 * wq1).powi(2));
    }
    DeflectionReport::new(DeflectionVariant::DoubleTraining, 4.0 * num * num, den)
}

/// Deflection of the combinational-weight receiver with sign factors `sf`.
///
/// The per-sample numerator terms sum to twice the mean gap between the
/// (1,1) and (-1,1) hypotheses and the denominator terms sum to the average
/// conditional variance, hence `D = (sum num)^2 / (4 sum den)`.
///
/// # Panics
/// If `eps` lacks the imbalance variants.
pub fn deflection_cw(eps: &ChipErrorProbs, sf: SignFactors, training: DoubleTraining) -> DeflectionReport {
    let d = double(eps);
    let (a, b) = (f64::from(sf.a), f64::from(sf.b));
    let (mut num, mut den) = (0.0, 0.0);
    for l in 0..eps.len() {
        let (ei0, eq0, ei1, eq1) = (d.eps_i0[l], d.eps_q0[l], d.eps_i1[l], d.eps_q1[l]);
        let (wi0, wq0, wi1, wq1) = (1.0 - 2.0 * ei0, 1.0 - 2.0 * eq0, 1.0 - 2.0 * ei1, 1.0 - 2.0 * eq1);
        num += wi0 * wi0 + wq0 * wq0 + (a + b) * wi1 * wq1 + a * wi0 * wq1 + b * wi1 * wq0 + wi0 * wi1 + wq0 * wq1;
        den += (v(ei0) + v(eq0)) / training.n_t0
            + (v(ei1) + v(eq1)) / training.n_t1
            + 0.5 * (wi0 + a * wq1).powi(2) * (v(ei0) + v(ei1))
            + 0.5 * (wq0 + b * wi1).powi(2) * (v(eq0) + v(eq1));
    }
    DeflectionReport::new(DeflectionVariant::Combinational, num * num, 4.0 * den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::fixed_phase;
    use crate::receivers::{chip_error_probs, chip_error_probs_imbalanced, true_sign_factors};
    use crate::waveform::ReferenceWaveform;
    use approx::assert_relative_eq;

    #[test]
    fn uninformative_chips_give_zero() {
        let eps = ChipErrorProbs::new(vec![0.5; 4], vec![0.5; 4]);
        assert_eq!(deflection_opt(&eps).d_value, 0.0);
        assert_eq!(deflection_opt(&eps).predicted_ber, 0.5);
        assert_eq!(deflection_sub(&eps, 100.0).d_value, 0.0);
        let r = ReferenceWaveform::new(vec![0.0; 4], 1e-10);
        let eps = chip_error_probs_imbalanced(&r, fixed_phase(30.0), 0.05);
        let sf = SignFactors { a: 1, b: -1 };
        assert_eq!(deflection_dt(&eps, DoubleTraining::split(100)).d_value, 0.0);
        assert_eq!(deflection_cw(&eps, sf, DoubleTraining::split(100)).d_value, 0.0);
    }

    #[test]
    fn symmetric_single_sample() {
        let eps = ChipErrorProbs::new(vec![0.25], vec![0.25]);
        assert_relative_eq!(deflection_opt(&eps).d_value, 2.0 / 3.0, max_relative = 1e-12);
    }

    #[test]
    fn sub_increases_with_training() {
        let r = ReferenceWaveform::new(vec![0.3, 1.1, 0.7, -0.2], 1e-10);
        let eps = chip_error_probs(&r, fixed_phase(20.0));
        let d: Vec<f64> = [10.0, 100.0, 1000.0]
            .iter()
            .map(|&n| deflection_sub(&eps, n).d_value)
            .collect();
        assert!(d[0] < d[1] && d[1] < d[2], "{d:?}");
    }

    #[test]
    fn double_training_never_beats_single_training() {
        let r = ReferenceWaveform::new(vec![0.3, 1.1, 2.0, 0.7, -0.2], 1e-10);
        for k in 0..=6 {
            let phi = fixed_phase(15.0 * k as f64);
            let eps = chip_error_probs_imbalanced(&r, phi, 0.0);
            let dt = deflection_dt(&eps, DoubleTraining { n_t0: 1e9, n_t1: 1e9 }).d_value;
            let sub = deflection_sub(&eps, 1e9).d_value;
            assert!(dt <= sub * (1.0 + 1e-9), "phi={} dt={dt} sub={sub}", phi.degrees());
        }
    }

    #[test]
    fn without_imbalance_cw_halves_training_variance() {
        // With theta = 0 and correct sign factors the combinational weights
        // equal the single-training weights averaged over both sequences.
        let r = ReferenceWaveform::new(vec![0.3, 1.1, 2.0, 0.7, -0.2], 1e-10);
        let phi = fixed_phase(35.0);
        let eps = chip_error_probs_imbalanced(&r, phi, 0.0);
        let sf = true_sign_factors(phi, 0.0);
        let cw = deflection_cw(&eps, sf, DoubleTraining::split(100)).d_value;
        let sub = deflection_sub(&eps, 100.0).d_value;
        assert_relative_eq!(cw, sub, max_relative = 1e-12);
        let dt = deflection_dt(&eps, DoubleTraining::split(100)).d_value;
        assert_relative_eq!(dt, deflection_sub(&eps, 50.0).d_value, max_relative = 1e-12);
    }
}
