use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use monobit::analytics::{phi_sweep, write_sweep_csv, DoubleTraining, SweepRow, SweepSettings};
use monobit::harness::{
    channel_references, emit_plot_script, preset, write_results, write_results_file, ExperimentConfig, ReceiverId,
    PRESETS,
};
use monobit::waveform::scale_to_snr;
use monobit::Error;

#[derive(Parser)]
#[command(name = "sim", version, about = "Monobit QPSK receiver simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a BER experiment from a preset or a TOML config file.
    Run(RunArgs),
    /// Closed-form performance analysis.
    Analyze(AnalyzeArgs),
    /// List the receiver identifiers.
    ListReceivers,
    /// List the preset identifiers.
    ListPresets,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    preset: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Results CSV; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a matplotlib script plotting the results.
    #[arg(long)]
    plot: Option<PathBuf>,
    #[arg(long)]
    max_bits: Option<u64>,
    #[arg(long)]
    min_errors: Option<u64>,
    #[arg(long)]
    realizations: Option<usize>,
    /// Print each SNR point to standard error as it completes.
    #[arg(long, short)]
    verbose: bool,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Deflection ratios of the four detector variants.
    #[arg(long, required = true)]
    deflection: bool,
    /// Sweep the carrier phase difference over [0, 90] degrees.
    #[arg(long, required = true)]
    phi_sweep: bool,
    /// Channel and pulse taken from this config (AWGN defaults otherwise).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "6,12,18")]
    snr_db: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    step_deg: f64,
    #[arg(long, default_value_t = 0.0)]
    theta_deg: f64,
    /// Training symbols (split evenly between the two double-training sequences).
    #[arg(long, default_value_t = 100)]
    n_training: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn is_config_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Config(_)
            | Error::UnknownPreset(_)
            | Error::Parse { .. }
            | Error::NonMonotoneDelays { .. }
            | Error::InvalidProfile(_)
            | Error::InvalidPulse(_)
            | Error::ComplexGain { .. }
            | Error::EmptyChannel
    )
}

fn load_config(path: &PathBuf) -> monobit::Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    ExperimentConfig::from_toml_str(&text)
}

fn run(args: RunArgs) -> monobit::Result<()> {
    let mut config = match (&args.preset, &args.config) {
        (Some(id), _) => preset(id)?,
        (None, Some(path)) => load_config(path)?,
        (None, None) => unreachable!("clap requires one source"),
    };
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    if let Some(bits) = args.max_bits {
        config.max_bits = bits;
    }
    if let Some(errors) = args.min_errors {
        config.min_bit_errors = errors;
    }
    if let Some(r) = args.realizations {
        config.realizations = r;
    }
    config.validate()?;
    let records = monobit::harness::run_experiment_with(&config, |point| {
        if args.verbose {
            for r in point {
                eprintln!(
                    "{:>16} {:>6.1} dB  {:>9} bits  {:>7} errors  BER {:.3e}",
                    r.receiver, r.snr_db, r.bits, r.errors, r.ber
                );
            }
        }
    })?;
    match &args.out {
        Some(path) => write_results_file(&records, path)?,
        None => write_results(&records, io::stdout().lock())?,
    }
    if let Some(path) = &args.plot {
        emit_plot_script(&records, path)?;
    }
    Ok(())
}

fn analyze(args: AnalyzeArgs) -> monobit::Result<()> {
    let config = match &args.config {
        Some(path) => load_config(path)?,
        None => ExperimentConfig::default(),
    };
    if args.step_deg.is_nan() || args.step_deg <= 0.0 {
        return Err(Error::Config("step_deg must be positive".into()));
    }
    let base = channel_references(&config)?.swap_remove(0);
    let settings = SweepSettings {
        theta_deg: args.theta_deg,
        n_t_eq: args.n_training as f64,
        double: DoubleTraining::split(args.n_training),
    };
    let steps = (90.0 / args.step_deg).round() as usize;
    let phis: Vec<f64> = (0..=steps).map(|k| (k as f64 * args.step_deg).min(90.0)).collect();
    let mut rows = Vec::new();
    for &snr in &args.snr_db {
        let sweep = phi_sweep(&scale_to_snr(&base, snr)?, &phis, &settings);
        rows.extend(sweep.into_iter().map(|row| SweepRow { snr_db: snr, ..row }));
    }
    match &args.out {
        Some(path) => write_sweep_csv(&rows, fs::File::create(path)?)?,
        None => write_sweep_csv(&rows, io::stdout().lock())?,
    }
    Ok(())
}

fn list_receivers() -> io::Result<()> {
    let mut out = io::stdout().lock();
    for id in ReceiverId::ALL {
        writeln!(out, "{:<12} {}", id.name(), id.description())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => run(args),
        Command::Analyze(args) => analyze(args),
        Command::ListReceivers => list_receivers().map_err(Error::from),
        Command::ListPresets => PRESETS
            .iter()
            .try_for_each(|p| writeln!(io::stdout(), "{p}"))
            .map_err(Error::from),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if is_config_error(&e) { 2 } else { 1 })
        }
    }
}
