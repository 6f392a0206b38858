//! `hybrid-bell` — sweeps and searches over Bell-CHSH maxima for hybrid
//! qubit/coherent-state entanglement with lossy detectors.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure.

mod commands;
mod config;
mod figures;
mod output;

use std::fmt::Display;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use commands::{
    run_alpha_scan, run_bell_max, run_contour, run_crossover, run_eta_scan, run_threshold,
    run_verify, thread_pool, CliError, ContourAxes, ModeArg, SchemeArg, Sink, Vary,
};
use config::{ConfigFile, Grid, Range};
use output::Format;

#[derive(Parser)]
#[command(name = "hybrid-bell", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every subcommand. Typed values are parsed after merging
/// with the config file so both sources get identical validation.
#[derive(Args, Default)]
struct Common {
    /// Config file with a [command] section supplying defaults
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output encoding: csv or json
    #[arg(long)]
    format: Option<String>,
    /// Worker threads; defaults to HYBRID_BELL_THREADS or all cores
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Maximize the Bell value at a fixed amplitude and efficiencies
    BellMax {
        #[command(flatten)]
        common: Common,
        /// Scheme: onoff, parity, or both
        #[arg(long)]
        scheme: Option<String>,
        /// Coherent amplitude alpha
        #[arg(long)]
        alpha: Option<String>,
        /// Polarization detector efficiency
        #[arg(long)]
        eta_a: Option<String>,
        /// Field detector efficiency
        #[arg(long)]
        eta_b: Option<String>,
    },
    /// Maximize over settings for each amplitude on a grid
    AlphaScan {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        scheme: Option<String>,
        /// Amplitude grid start:stop:step
        #[arg(long)]
        alpha_grid: Option<String>,
        #[arg(long)]
        eta_a: Option<String>,
        #[arg(long)]
        eta_b: Option<String>,
    },
    /// Amplitude-optimized maxima along an efficiency grid
    EtaScan {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        scheme: Option<String>,
        /// Efficiency grid start:stop:step
        #[arg(long)]
        eta_grid: Option<String>,
        /// Which efficiency the grid drives: symmetric, eta-b, or eta-a
        #[arg(long)]
        vary: Option<String>,
        /// Value of the non-varied efficiency
        #[arg(long)]
        fixed_eta: Option<String>,
        /// Amplitude search interval lo:hi
        #[arg(long)]
        alpha_range: Option<String>,
    },
    /// Two-axis sheet: (alpha, eta) at fixed amplitude, or amplitude-optimized
    /// (eta_A, eta_B)
    Contour {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        scheme: Option<String>,
        #[arg(long)]
        alpha_grid: Option<String>,
        #[arg(long)]
        eta_grid: Option<String>,
        #[arg(long)]
        vary: Option<String>,
        #[arg(long)]
        fixed_eta: Option<String>,
        #[arg(long)]
        eta_a_grid: Option<String>,
        #[arg(long)]
        eta_b_grid: Option<String>,
        #[arg(long)]
        alpha_range: Option<String>,
    },
    /// Bisect for the efficiency at which Bell violation first appears
    Threshold {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        scheme: Option<String>,
        /// symmetric, eta-b-only, fixed-eta-a, or fixed-eta-b
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        fixed_eta: Option<String>,
        #[arg(long)]
        alpha_range: Option<String>,
        /// Bisection tolerance on eta
        #[arg(long)]
        tol: Option<String>,
    },
    /// Symmetric efficiency where parity overtakes on/off
    Crossover {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        alpha_range: Option<String>,
        #[arg(long)]
        tol: Option<String>,
    },
    /// Cross-validate closed forms against the truncated-Fock oracle
    Verify {
        #[command(flatten)]
        common: Common,
        /// Number of random tuples
        #[arg(long)]
        samples: Option<String>,
        /// PRNG seed
        #[arg(long)]
        seed: Option<String>,
        /// Fock-space truncation dimension
        #[arg(long)]
        dim: Option<String>,
        /// Admissible truncated probability mass
        #[arg(long)]
        tail_tol: Option<String>,
    },
    /// Regenerate one figure's data from a named preset (fig1..fig9)
    Figures {
        #[command(flatten)]
        common: Common,
        /// Preset name
        id: String,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::BellMax { .. } => "bell-max",
            Command::AlphaScan { .. } => "alpha-scan",
            Command::EtaScan { .. } => "eta-scan",
            Command::Contour { .. } => "contour",
            Command::Threshold { .. } => "threshold",
            Command::Crossover { .. } => "crossover",
            Command::Verify { .. } => "verify",
            Command::Figures { .. } => "figures",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::BellMax { common, .. }
            | Command::AlphaScan { common, .. }
            | Command::EtaScan { common, .. }
            | Command::Contour { common, .. }
            | Command::Threshold { common, .. }
            | Command::Crossover { common, .. }
            | Command::Verify { common, .. }
            | Command::Figures { common, .. } => common,
        }
    }
}

/// One merged argument source: CLI flag first, then the config file.
struct Resolver<'a> {
    cfg: &'a ConfigFile,
}

impl Resolver<'_> {
    fn get<T>(&self, cli: &Option<String>, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        let source = match cli {
            Some(text) => Some((text.as_str(), format!("--{}", key.replace('_', "-")))),
            None => self.cfg.raw(key).map(|text| (text, format!("key {key}"))),
        };
        match source {
            None => Ok(None),
            Some((text, place)) => text
                .parse::<T>()
                .map(Some)
                .map_err(|e| CliError::Config(format!("{place}: {e}"))),
        }
    }

    fn or<T>(&self, cli: &Option<String>, key: &str, default: T) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.get(cli, key)?.unwrap_or(default))
    }

    fn require<T>(&self, cli: &Option<String>, key: &str) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.get(cli, key)?.ok_or_else(|| {
            CliError::Config(format!(
                "missing required value: pass --{} or set {key} in the config",
                key.replace('_', "-")
            ))
        })
    }
}

const DEFAULT_ALPHA_RANGE: Range = Range { lo: 1e-3, hi: 3.0 };

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let common = cli.command.common();
    let cfg = match &common.config {
        Some(path) => ConfigFile::load(path).map_err(|e| CliError::Config(e.to_string()))?,
        None => ConfigFile::empty(),
    };
    cfg.expect_section(cli.command.name())
        .map_err(|e| CliError::Config(e.to_string()))?;
    let r = Resolver { cfg: &cfg };

    let format: Format = r.or(&common.format, "format", Format::Csv)?;
    let out = match &common.out {
        Some(path) => Some(path.clone()),
        None => r.get::<PathBuf>(&None, "out")?,
    };
    let sink = Sink { out, format };
    let threads = match common.threads {
        Some(n) => Some(n),
        None => r.get::<usize>(&None, "threads")?,
    };
    let pool = thread_pool(threads)?;

    match &cli.command {
        Command::BellMax {
            scheme,
            alpha,
            eta_a,
            eta_b,
            ..
        } => run_bell_max(
            &pool,
            r.or(scheme, "scheme", SchemeArg::Both)?,
            r.require::<f64>(alpha, "alpha")?,
            r.or(eta_a, "eta_a", 1.0)?,
            r.or(eta_b, "eta_b", 1.0)?,
            &sink,
        ),
        Command::AlphaScan {
            scheme,
            alpha_grid,
            eta_a,
            eta_b,
            ..
        } => run_alpha_scan(
            &pool,
            r.or(scheme, "scheme", SchemeArg::Both)?,
            r.require::<Grid>(alpha_grid, "alpha_grid")?,
            r.or(eta_a, "eta_a", 1.0)?,
            r.or(eta_b, "eta_b", 1.0)?,
            &sink,
        ),
        Command::EtaScan {
            scheme,
            eta_grid,
            vary,
            fixed_eta,
            alpha_range,
            ..
        } => run_eta_scan(
            &pool,
            r.or(scheme, "scheme", SchemeArg::Both)?,
            r.require::<Grid>(eta_grid, "eta_grid")?,
            r.or(vary, "vary", Vary::Symmetric)?,
            r.or(fixed_eta, "fixed_eta", 1.0)?,
            r.or(alpha_range, "alpha_range", DEFAULT_ALPHA_RANGE)?,
            &sink,
        ),
        Command::Contour {
            scheme,
            alpha_grid,
            eta_grid,
            vary,
            fixed_eta,
            eta_a_grid,
            eta_b_grid,
            alpha_range,
            ..
        } => {
            let alpha_grid = r.get::<Grid>(alpha_grid, "alpha_grid")?;
            let eta_grid = r.get::<Grid>(eta_grid, "eta_grid")?;
            let eta_a_grid = r.get::<Grid>(eta_a_grid, "eta_a_grid")?;
            let eta_b_grid = r.get::<Grid>(eta_b_grid, "eta_b_grid")?;
            let axes = match (alpha_grid, eta_grid, eta_a_grid, eta_b_grid) {
                (Some(alpha_grid), Some(eta_grid), None, None) => ContourAxes::AlphaEta {
                    alpha_grid,
                    eta_grid,
                    vary: r.or(vary, "vary", Vary::Symmetric)?,
                    fixed_eta: r.or(fixed_eta, "fixed_eta", 1.0)?,
                },
                (None, None, Some(eta_a_grid), Some(eta_b_grid)) => ContourAxes::EtaEta {
                    eta_a_grid,
                    eta_b_grid,
                    alpha_range: r.or(alpha_range, "alpha_range", DEFAULT_ALPHA_RANGE)?,
                },
                _ => {
                    return Err(CliError::Config(
                        "contour needs either --alpha-grid with --eta-grid, or --eta-a-grid \
                         with --eta-b-grid"
                            .to_string(),
                    ))
                }
            };
            run_contour(&pool, r.or(scheme, "scheme", SchemeArg::Both)?, axes, &sink)
        }
        Command::Threshold {
            scheme,
            mode,
            fixed_eta,
            alpha_range,
            tol,
            ..
        } => run_threshold(
            &pool,
            r.or(scheme, "scheme", SchemeArg::Both)?,
            r.or(mode, "mode", ModeArg::Symmetric)?,
            r.get::<f64>(fixed_eta, "fixed_eta")?,
            r.or(alpha_range, "alpha_range", Range { lo: 1e-3, hi: 1.5 })?,
            r.or(tol, "tol", 1e-4)?,
            &sink,
        ),
        Command::Crossover {
            alpha_range, tol, ..
        } => run_crossover(
            r.or(alpha_range, "alpha_range", DEFAULT_ALPHA_RANGE)?,
            r.or(tol, "tol", 1e-4)?,
            &sink,
        ),
        Command::Verify {
            samples,
            seed,
            dim,
            tail_tol,
            ..
        } => run_verify(
            &pool,
            r.or(samples, "samples", 200usize)?,
            r.or(seed, "seed", 1u64)?,
            r.or(dim, "dim", 64usize)?,
            r.or(tail_tol, "tail_tol", 1e-10)?,
            &sink,
        ),
        Command::Figures { id, .. } => figures::run_figure(&pool, id, &sink),
    }
}

fn main() {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {}", e.message());
            std::process::exit(e.exit_code());
        }
    }
}
