use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::Result;

/// One point of a BER curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerRecord {
    pub receiver: String,
    pub channel: String,
    pub snr_db: f64,
    pub bits: u64,
    pub errors: u64,
    pub ber: f64,
    pub seed: u64,
}

impl BerRecord {
    pub fn new(
        receiver: impl Into<String>,
        channel: impl Into<String>,
        snr_db: f64,
        bits: u64,
        errors: u64,
        seed: u64,
    ) -> Self {
        Self {
            receiver: receiver.into(),
            channel: channel.into(),
            snr_db,
            bits,
            errors,
            ber: errors as f64 / bits as f64,
            seed,
        }
    }
}

pub const CSV_HEADER: [&str; 7] = ["receiver", "channel", "snr_db", "bits", "errors", "ber", "seed"];

pub fn write_results<W: Write>(records: &[BerRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_results_file(records: &[BerRecord], path: &Path) -> Result<()> {
    write_results(records, std::fs::File::create(path)?)
}

pub fn read_results<R: Read>(input: R) -> Result<Vec<BerRecord>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(Into::into))
        .collect()
}

/// `(snr_db, ber)` points of one receiver label, in file order.
pub fn curve(records: &[BerRecord], receiver: &str) -> Vec<(f64, f64)> {
    records
        .iter()
        .filter(|r| r.receiver == receiver)
        .map(|r| (r.snr_db, r.ber))
        .collect()
}

/// SNR at which a curve first falls to `target`, interpolating `log10(BER)`
/// linearly between the bracketing grid points. A zero-error point counts
/// as half an error.
pub fn snr_at_ber(records: &[BerRecord], receiver: &str, target: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.receiver == receiver)
        .map(|r| (r.snr_db, if r.errors == 0 { 0.5 / r.bits as f64 } else { r.ber }))
        .collect();
    if pts.first()?.1 <= target {
        return Some(pts[0].0);
    }
    pts.windows(2).find_map(|w| {
        let ((s0, b0), (s1, b1)) = (w[0], w[1]);
        (b0 > target && b1 <= target).then(|| {
            let (l0, l1, lt) = (b0.log10(), b1.log10(), target.log10());
            s0 + (s1 - s0) * (l0 - lt) / (l0 - l1)
        })
    })
}

/// Writes a standalone matplotlib script with the curves embedded; running
/// it saves a PNG next to the script.
pub fn emit_plot_script(records: &[BerRecord], path: &Path) -> Result<()> {
    let mut labels: Vec<(&str, &str)> = Vec::new();
    for r in records {
        if !labels.contains(&(&r.receiver, &r.channel)) {
            labels.push((&r.receiver, &r.channel));
        }
    }
    let multi_channel = labels.iter().any(|l| l.1 != labels[0].1);
    let png = path.with_extension("png");
    let mut s = String::from("#!/usr/bin/env python3\n\"\"\"BER versus SNR curves.\"\"\"\nimport matplotlib\nmatplotlib.use(\"Agg\")\nimport matplotlib.pyplot as plt\n\nfig, ax = plt.subplots(figsize=(7, 5))\n");
    for (rx, ch) in &labels {
        let pts: Vec<&BerRecord> = records
            .iter()
            .filter(|r| r.receiver == *rx && r.channel == *ch && r.errors > 0)
            .collect();
        let xs: Vec<String> = pts.iter().map(|r| format!("{}", r.snr_db)).collect();
        let ys: Vec<String> = pts.iter().map(|r| format!("{:e}", r.ber)).collect();
        let label = if multi_channel {
            format!("{rx} ({ch})")
        } else {
            rx.to_string()
        };
        let _ = writeln!(
            s,
            "ax.semilogy([{}], [{}], marker=\"o\", label={:?})",
            xs.join(", "),
            ys.join(", "),
            label
        );
    }
    let _ = write!(
        s,
        "ax.set_xlabel(\"SNR (dB)\")\nax.set_ylabel(\"BER\")\nax.grid(True, which=\"both\", alpha=0.3)\nax.legend()\nfig.tight_layout()\nfig.savefig({:?}, dpi=150)\n",
        png.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default()
    );
    std::fs::write(path, s)?;
    Ok(())
}
