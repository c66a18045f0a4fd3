//! `ppv`: evaluates converse and reference bounds over parameter grids and
//! writes CSV, or runs the self-check suites.

mod plot;
mod sweep;

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ppv_core::presets::{Preset, Sweep, DEFAULT_N, DEFAULT_PE, DEFAULT_RATE, DEFAULT_SNR_DB};
use ppv_core::validate::{self, Level};

use crate::sweep::{MethodName, SnrKind, SweepConfig};

#[derive(Parser)]
#[command(name = "ppv", version, about = "Finite block-length converse bounds for the AWGN channel")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Converse rate against per-symbol SNR.
    RateVsSnr(SweepArgs),
    /// Converse rate against Eb/N0, resolving Eb/N0 = SNR / (2 R).
    RateVsEbn0(SweepArgs),
    /// Error-probability lower bound at a fixed rate against SNR.
    PerVsSnr(SweepArgs),
    /// Excess power over capacity, in dB.
    ExcessPower(SweepArgs),
    /// Large-SNR limit of the excess power and its linear approximation.
    HighSnrAsymptote(SweepArgs),
    /// Run the self-check suites; exit status 1 when a required check fails.
    Validate {
        #[arg(value_enum, default_value_t = LevelArg::Quick)]
        level: LevelArg,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

#[derive(Args, Clone)]
struct SweepArgs {
    /// Block lengths, comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<u64>>,
    #[arg(long, allow_hyphen_values = true)]
    snr_start: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    snr_stop: Option<f64>,
    #[arg(long)]
    snr_step: Option<f64>,
    /// Whether the grid is per-symbol SNR or per-bit Eb/N0.
    #[arg(long, value_enum)]
    snr_kind: Option<SnrKind>,
    /// Target error probability for rate sweeps.
    #[arg(long)]
    pe: Option<f64>,
    /// Rate in bits per channel use for error sweeps.
    #[arg(long)]
    rate: Option<f64>,
    #[arg(long, value_enum, value_delimiter = ',')]
    methods: Option<Vec<MethodName>>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long, env = "PPV_THREADS")]
    threads: Option<usize>,
    #[arg(long)]
    grid_preset: Option<Preset>,
    /// Also write a matplotlib script that plots the CSV.
    #[arg(long)]
    plot_script: Option<PathBuf>,
}

fn resolve(sweep: Sweep, a: &SweepArgs) -> Result<SweepConfig, String> {
    let preset = match a.grid_preset {
        Some(p) if p.sweep != sweep => {
            return Err(format!("preset {} belongs to the {} subcommand", p.name, p.sweep.name()));
        }
        p => p,
    };
    let (start, stop, step) = preset.map_or(DEFAULT_SNR_DB, |p| p.snr_db);
    let default_kind = if sweep == Sweep::RateVsEbn0 { SnrKind::Bit } else { SnrKind::Symbol };
    let methods = match &a.methods {
        Some(m) => m.clone(),
        None => match preset {
            Some(p) => p
                .methods
                .iter()
                .map(|m| MethodName::from_str(m, true))
                .collect::<Result<_, _>>()?,
            None => vec![MethodName::Auto],
        },
    };
    let cfg = SweepConfig {
        sweep,
        n_list: a.n.clone().unwrap_or_else(|| preset.map_or(DEFAULT_N.to_vec(), |p| p.n_list.to_vec())),
        snr_start: a.snr_start.unwrap_or(start),
        snr_stop: a.snr_stop.unwrap_or(stop),
        snr_step: a.snr_step.unwrap_or(step),
        snr_kind: a.snr_kind.unwrap_or(default_kind),
        pe: a.pe.unwrap_or(preset.map_or(DEFAULT_PE, |p| p.pe)),
        rate: a.rate.unwrap_or(preset.map_or(DEFAULT_RATE, |p| p.rate)),
        methods,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn run_sweep(sweep: Sweep, a: &SweepArgs) -> Result<(), String> {
    let cfg = resolve(sweep, a)?;
    if let Some(t) = a.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    let t0 = Instant::now();
    let rows = sweep::evaluate(&cfg);
    let sink: Box<dyn Write> = match &a.out {
        Some(p) => Box::new(File::create(p).map_err(|e| format!("{}: {e}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    };
    sweep::write_csv(sink, &rows).map_err(|e| e.to_string())?;
    if let Some(p) = &a.plot_script {
        let csv = a.out.as_ref().map_or("sweep.csv".to_string(), |o| o.display().to_string());
        std::fs::write(p, plot::script(sweep, &csv)).map_err(|e| format!("{}: {e}", p.display()))?;
    }
    let failed = rows.iter().filter(|r| r.status.starts_with("error")).count();
    eprintln!(
        "{}: {} rows, {} failed points, {:.1} s",
        sweep.name(),
        rows.len(),
        failed,
        t0.elapsed().as_secs_f64()
    );
    Ok(())
}

fn run_validate(level: LevelArg, out: Option<&PathBuf>) -> Result<bool, String> {
    let level = match level {
        LevelArg::Quick => Level::Quick,
        LevelArg::Full => Level::Full,
    };
    let t0 = Instant::now();
    let report = validate::run(level);
    let text = report.emit();
    match out {
        Some(p) => std::fs::write(p, &text).map_err(|e| format!("{}: {e}", p.display()))?,
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string())?,
    }
    let failed = report.failures().count();
    eprintln!(
        "validate: {} checks, {} failed, {:.1} s",
        report.checks.len(),
        failed,
        t0.elapsed().as_secs_f64()
    );
    Ok(failed == 0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::RateVsSnr(a) => run_sweep(Sweep::RateVsSnr, a).map(|_| true),
        Command::RateVsEbn0(a) => run_sweep(Sweep::RateVsEbn0, a).map(|_| true),
        Command::PerVsSnr(a) => run_sweep(Sweep::PerVsSnr, a).map(|_| true),
        Command::ExcessPower(a) => run_sweep(Sweep::ExcessPower, a).map(|_| true),
        Command::HighSnrAsymptote(a) => run_sweep(Sweep::HighSnrAsymptote, a).map(|_| true),
        Command::Validate { level, out } => run_validate(*level, out.as_ref()),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
