use std::io::Write;

use crate::channel::fixed_phase;
use crate::receivers::{chip_error_probs_imbalanced, true_sign_factors};
use crate::waveform::ReferenceWaveform;

use super::{deflection_cw, deflection_dt, deflection_opt, deflection_sub, DeflectionReport, DoubleTraining};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSettings {
    pub theta_deg: f64,
    /// Training length used by the single-training ratio.
    pub n_t_eq: f64,
    pub double: DoubleTraining,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self {
            theta_deg: 0.0,
            n_t_eq: 100.0,
            double: DoubleTraining::split(100),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub phi_deg: f64,
    pub theta_deg: f64,
    pub snr_db: f64,
    pub report: DeflectionReport,
}

/// All four deflection ratios at every phase in `phis_deg`. The
/// double-training ratios use the true sign factors.
pub fn phi_sweep(reference: &ReferenceWaveform, phis_deg: &[f64], settings: &SweepSettings) -> Vec<SweepRow> {
    let theta = settings.theta_deg.to_radians();
    let snr_db = reference.snr_db();
    let mut rows = Vec::with_capacity(phis_deg.len() * 4);
    for &phi_deg in phis_deg {
        let phi = fixed_phase(phi_deg);
        let eps = chip_error_probs_imbalanced(reference, phi, theta);
        let reports = [
            deflection_opt(&eps),
            deflection_sub(&eps, settings.n_t_eq),
            deflection_dt(&eps, settings.double),
            deflection_cw(&eps, true_sign_factors(phi, theta), settings.double),
        ];
        rows.extend(reports.into_iter().map(|report| SweepRow {
            phi_deg,
            theta_deg: settings.theta_deg,
            snr_db,
            report,
        }));
    }
    rows
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "phi_deg,theta_deg,snr_db,variant,d,predicted_ber")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{:e},{:e}",
            r.phi_deg, r.theta_deg, r.snr_db, r.report.variant, r.report.d_value, r.report.predicted_ber
        )?;
    }
    Ok(())
}
