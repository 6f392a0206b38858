//! Command implementations. Every scan evaluates its grid on a worker pool
//! and collects results in grid order, so output is deterministic regardless
//! of thread count.

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use hybrid_bell_core::closed_form::expectation_effective;
use hybrid_bell_core::fock::{joint_expectation_oracle, TruncationConfig};
use hybrid_bell_core::optimize::{
    find_crossover, find_threshold, maximize_bell, maximize_over_alpha, ThresholdMode,
    ThresholdQuery,
};
use hybrid_bell_core::{
    DisplacementSetting, EfficiencyPair, QubitSetting, Scheme,
};

use crate::config::{Grid, Range};
use crate::output::{
    emit, CrossoverRow, DiffRow, Format, ScanRow, ThresholdRow, VerifyReport,
};

/// Failures split by exit code: 2 for bad input, 3 for numerical trouble.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Numeric(m) => m,
        }
    }
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn numeric_err(msg: impl std::fmt::Display) -> CliError {
    CliError::Numeric(msg.to_string())
}

/// Scheme selector; `both` expands to on/off then parity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeArg {
    OnOff,
    Parity,
    Both,
}

impl SchemeArg {
    pub fn schemes(self) -> Vec<Scheme> {
        match self {
            SchemeArg::OnOff => vec![Scheme::OnOff],
            SchemeArg::Parity => vec![Scheme::Parity],
            SchemeArg::Both => vec![Scheme::OnOff, Scheme::Parity],
        }
    }
}

impl std::str::FromStr for SchemeArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "onoff" | "on-off" => Ok(SchemeArg::OnOff),
            "parity" => Ok(SchemeArg::Parity),
            "both" => Ok(SchemeArg::Both),
            other => Err(format!("scheme '{other}' must be onoff, parity, or both")),
        }
    }
}

/// Which efficiency an eta grid drives; the other one is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Vary {
    Symmetric,
    EtaB,
    EtaA,
}

impl Vary {
    fn pair(self, eta: f64, fixed: f64) -> Result<EfficiencyPair<f64>, CliError> {
        let (a, b) = match self {
            Vary::Symmetric => (eta, eta),
            Vary::EtaB => (fixed, eta),
            Vary::EtaA => (eta, fixed),
        };
        EfficiencyPair::new(a, b).map_err(|e| config_err(e.to_string()))
    }
}

impl std::str::FromStr for Vary {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "symmetric" => Ok(Vary::Symmetric),
            "eta-b" => Ok(Vary::EtaB),
            "eta-a" => Ok(Vary::EtaA),
            other => Err(format!("vary '{other}' must be symmetric, eta-b, or eta-a")),
        }
    }
}

/// Threshold bisection mode selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeArg {
    Symmetric,
    EtaBOnly,
    FixedEtaA,
    FixedEtaB,
}

impl ModeArg {
    fn to_mode(self, fixed_eta: Option<f64>) -> Result<ThresholdMode<f64>, CliError> {
        let need_fixed = || {
            fixed_eta.ok_or_else(|| config_err("this threshold mode requires --fixed-eta"))
        };
        Ok(match self {
            ModeArg::Symmetric => ThresholdMode::SymmetricEta,
            ModeArg::EtaBOnly => ThresholdMode::EtaBOnly,
            ModeArg::FixedEtaA => ThresholdMode::FixedEtaA(need_fixed()?),
            ModeArg::FixedEtaB => ThresholdMode::FixedEtaB(need_fixed()?),
        })
    }

    fn name(self) -> &'static str {
        match self {
            ModeArg::Symmetric => "symmetric",
            ModeArg::EtaBOnly => "eta-b-only",
            ModeArg::FixedEtaA => "fixed-eta-a",
            ModeArg::FixedEtaB => "fixed-eta-b",
        }
    }
}

impl std::str::FromStr for ModeArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "symmetric" => Ok(ModeArg::Symmetric),
            "eta-b-only" | "eta-b" => Ok(ModeArg::EtaBOnly),
            "fixed-eta-a" => Ok(ModeArg::FixedEtaA),
            "fixed-eta-b" => Ok(ModeArg::FixedEtaB),
            other => Err(format!(
                "mode '{other}' must be symmetric, eta-b-only, fixed-eta-a, or fixed-eta-b"
            )),
        }
    }
}

/// Default thread count: `--threads`, else HYBRID_BELL_THREADS, else all cores.
pub fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    let n = match threads {
        Some(n) => n,
        None => match std::env::var("HYBRID_BELL_THREADS") {
            Ok(text) => text
                .parse::<usize>()
                .map_err(|e| config_err(format!("HYBRID_BELL_THREADS: {e}")))?,
            Err(_) => 0,
        },
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| config_err(e.to_string()))
}

/// Output destination and encoding shared by all commands.
pub struct Sink {
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Sink {
    fn emit<T: serde::Serialize>(&self, rows: &[T]) -> Result<(), CliError> {
        emit(rows, self.out.as_deref(), self.format).map_err(CliError::Numeric)
    }
}

fn check_eta(value: f64, what: &str) -> Result<f64, CliError> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(config_err(format!("{what} = {value} outside [0, 1]")))
    }
}

fn check_eta_grid(grid: &Grid, what: &str) -> Result<(), CliError> {
    check_eta(grid.start, what)?;
    check_eta(grid.stop, what)?;
    Ok(())
}

fn fixed_point_row(
    scheme: Scheme,
    alpha: f64,
    effs: &EfficiencyPair<f64>,
) -> Result<ScanRow, CliError> {
    let opt = maximize_bell(scheme, alpha, effs).map_err(numeric_err)?;
    ScanRow::from_optimum(alpha, None, effs, &opt).map_err(CliError::Numeric)
}

fn optimized_row(
    scheme: Scheme,
    effs: &EfficiencyPair<f64>,
    alpha_range: Range,
) -> Result<ScanRow, CliError> {
    let (alpha_opt, opt) =
        maximize_over_alpha(scheme, effs, (alpha_range.lo, alpha_range.hi)).map_err(numeric_err)?;
    ScanRow::from_optimum(alpha_opt, Some(alpha_opt), effs, &opt).map_err(CliError::Numeric)
}

fn collect_rows<I, F>(pool: &rayon::ThreadPool, points: Vec<I>, f: F) -> Result<Vec<ScanRow>, CliError>
where
    I: Send + Sync,
    F: Fn(&I) -> Result<ScanRow, CliError> + Sync,
{
    pool.install(|| points.par_iter().map(&f).collect::<Result<Vec<_>, _>>())
}

pub fn run_bell_max(
    pool: &rayon::ThreadPool,
    schemes: SchemeArg,
    alpha: f64,
    eta_a: f64,
    eta_b: f64,
    sink: &Sink,
) -> Result<(), CliError> {
    let effs = EfficiencyPair::new(check_eta(eta_a, "eta_a")?, check_eta(eta_b, "eta_b")?)
        .map_err(|e| config_err(e.to_string()))?;
    if !(alpha >= 0.0) {
        return Err(config_err(format!("alpha = {alpha} must be nonnegative")));
    }
    let points: Vec<Scheme> = schemes.schemes();
    let rows = collect_rows(pool, points, |&scheme| fixed_point_row(scheme, alpha, &effs))?;
    sink.emit(&rows)
}

pub fn run_alpha_scan(
    pool: &rayon::ThreadPool,
    schemes: SchemeArg,
    alpha_grid: Grid,
    eta_a: f64,
    eta_b: f64,
    sink: &Sink,
) -> Result<(), CliError> {
    let effs = EfficiencyPair::new(check_eta(eta_a, "eta_a")?, check_eta(eta_b, "eta_b")?)
        .map_err(|e| config_err(e.to_string()))?;
    let mut points = Vec::new();
    for scheme in schemes.schemes() {
        for alpha in alpha_grid.values() {
            points.push((scheme, alpha));
        }
    }
    let rows = collect_rows(pool, points, |&(scheme, alpha)| {
        fixed_point_row(scheme, alpha, &effs)
    })?;
    sink.emit(&rows)
}

pub fn run_eta_scan(
    pool: &rayon::ThreadPool,
    schemes: SchemeArg,
    eta_grid: Grid,
    vary: Vary,
    fixed_eta: f64,
    alpha_range: Range,
    sink: &Sink,
) -> Result<(), CliError> {
    check_eta_grid(&eta_grid, "eta grid")?;
    check_eta(fixed_eta, "fixed_eta")?;
    let mut points = Vec::new();
    for scheme in schemes.schemes() {
        for eta in eta_grid.values() {
            points.push((scheme, eta));
        }
    }
    let rows = collect_rows(pool, points, |&(scheme, eta)| {
        let effs = vary.pair(eta, fixed_eta)?;
        optimized_row(scheme, &effs, alpha_range)
    })?;
    sink.emit(&rows)
}

/// The two contour layouts: a fixed-amplitude (alpha, eta) sheet, or an
/// amplitude-optimized (eta_A, eta_B) sheet.
pub enum ContourAxes {
    AlphaEta {
        alpha_grid: Grid,
        eta_grid: Grid,
        vary: Vary,
        fixed_eta: f64,
    },
    EtaEta {
        eta_a_grid: Grid,
        eta_b_grid: Grid,
        alpha_range: Range,
    },
}

pub fn run_contour(
    pool: &rayon::ThreadPool,
    schemes: SchemeArg,
    axes: ContourAxes,
    sink: &Sink,
) -> Result<(), CliError> {
    let rows = match axes {
        ContourAxes::AlphaEta {
            alpha_grid,
            eta_grid,
            vary,
            fixed_eta,
        } => {
            check_eta_grid(&eta_grid, "eta grid")?;
            check_eta(fixed_eta, "fixed_eta")?;
            let mut points = Vec::new();
            for scheme in schemes.schemes() {
                for alpha in alpha_grid.values() {
                    for eta in eta_grid.values() {
                        points.push((scheme, alpha, eta));
                    }
                }
            }
            collect_rows(pool, points, |&(scheme, alpha, eta)| {
                let effs = vary.pair(eta, fixed_eta)?;
                fixed_point_row(scheme, alpha, &effs)
            })?
        }
        ContourAxes::EtaEta {
            eta_a_grid,
            eta_b_grid,
            alpha_range,
        } => {
            check_eta_grid(&eta_a_grid, "eta_a grid")?;
            check_eta_grid(&eta_b_grid, "eta_b grid")?;
            let mut points = Vec::new();
            for scheme in schemes.schemes() {
                for eta_a in eta_a_grid.values() {
                    for eta_b in eta_b_grid.values() {
                        points.push((scheme, eta_a, eta_b));
                    }
                }
            }
            collect_rows(pool, points, |&(scheme, eta_a, eta_b)| {
                let effs =
                    EfficiencyPair::new(eta_a, eta_b).map_err(|e| config_err(e.to_string()))?;
                optimized_row(scheme, &effs, alpha_range)
            })?
        }
    };
    sink.emit(&rows)
}

pub fn run_threshold(
    pool: &rayon::ThreadPool,
    schemes: SchemeArg,
    mode: ModeArg,
    fixed_eta: Option<f64>,
    alpha_range: Range,
    tol: f64,
    sink: &Sink,
) -> Result<(), CliError> {
    if let Some(eta) = fixed_eta {
        check_eta(eta, "fixed_eta")?;
    }
    let threshold_mode = mode.to_mode(fixed_eta)?;
    let points: Vec<Scheme> = schemes.schemes();
    let rows = pool.install(|| {
        points
            .par_iter()
            .map(|&scheme| {
                let query = ThresholdQuery {
                    scheme,
                    mode: threshold_mode,
                    alpha_range: (alpha_range.lo, alpha_range.hi),
                    tol,
                };
                query.validate().map_err(|e| config_err(e.to_string()))?;
                let threshold = find_threshold(&query).map_err(numeric_err)?;
                Ok(ThresholdRow {
                    scheme: scheme.name().to_string(),
                    mode: mode.name().to_string(),
                    fixed_eta,
                    threshold,
                    tol,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()
    })?;
    sink.emit(&rows)
}

pub fn run_crossover(alpha_range: Range, tol: f64, sink: &Sink) -> Result<(), CliError> {
    if !(tol > 0.0) {
        return Err(config_err(format!("tol = {tol} must be positive")));
    }
    let crossover =
        find_crossover((alpha_range.lo, alpha_range.hi), tol).map_err(numeric_err)?;
    sink.emit(&[CrossoverRow {
        mode: "symmetric".to_string(),
        crossover,
        tol,
    }])
}

/// Scheme-difference map over an efficiency grid (both maxima per cell).
pub fn run_diff_map(
    pool: &rayon::ThreadPool,
    eta_a_grid: Grid,
    eta_b_grid: Grid,
    alpha_range: Range,
    sink: &Sink,
) -> Result<(), CliError> {
    check_eta_grid(&eta_a_grid, "eta_a grid")?;
    check_eta_grid(&eta_b_grid, "eta_b grid")?;
    let mut points = Vec::new();
    for eta_a in eta_a_grid.values() {
        for eta_b in eta_b_grid.values() {
            points.push((eta_a, eta_b));
        }
    }
    let rows = pool.install(|| {
        points
            .par_iter()
            .map(|&(eta_a, eta_b)| {
                let effs =
                    EfficiencyPair::new(eta_a, eta_b).map_err(|e| config_err(e.to_string()))?;
                let range = (alpha_range.lo, alpha_range.hi);
                let (_, onoff) =
                    maximize_over_alpha(Scheme::OnOff, &effs, range).map_err(numeric_err)?;
                let (_, parity) =
                    maximize_over_alpha(Scheme::Parity, &effs, range).map_err(numeric_err)?;
                Ok(DiffRow {
                    eta_a,
                    eta_b,
                    bell_max_onoff: onoff.value,
                    bell_max_parity: parity.value,
                    parity_minus_onoff: parity.value - onoff.value,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()
    })?;
    sink.emit(&rows)
}

/// One random verification tuple.
#[derive(Debug, Clone, Copy)]
struct VerifyTuple {
    alpha: f64,
    theta: f64,
    phi: f64,
    beta_mag: f64,
    beta_phase: f64,
    eta_a: f64,
    eta_b: f64,
}

fn draw_tuples(samples: usize, seed: u64, max_amp: f64) -> Vec<VerifyTuple> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| VerifyTuple {
            alpha: rng.gen_range(0.0..max_amp),
            theta: rng.gen_range(0.0..std::f64::consts::PI),
            phi: rng.gen_range(0.0..std::f64::consts::TAU),
            beta_mag: rng.gen_range(0.0..max_amp),
            beta_phase: rng.gen_range(0.0..std::f64::consts::TAU),
            eta_a: rng.gen_range(0.0..=1.0),
            eta_b: rng.gen_range(0.0..=1.0),
        })
        .collect()
}

/// Cross-validate the closed forms against the truncated-Fock oracle on
/// seeded random tuples; any deviation above `tolerance` fails the run.
pub fn run_verify(
    pool: &rayon::ThreadPool,
    samples: usize,
    seed: u64,
    dim: usize,
    tail_tol: f64,
    sink: &Sink,
) -> Result<(), CliError> {
    if samples == 0 {
        return Err(config_err("samples must be >= 1"));
    }
    let trunc = TruncationConfig::new(dim, tail_tol).map_err(|e| config_err(e.to_string()))?;
    let tolerance = 1e-7;
    let tuples = draw_tuples(samples, seed, 1.5);

    let results: Vec<Result<(f64, f64), String>> = pool.install(|| {
        tuples
            .par_iter()
            .enumerate()
            .map(|(i, t)| {
                let xi = QubitSetting::new(t.theta, t.phi);
                let beta = DisplacementSetting::new(t.beta_mag, t.beta_phase);
                let effs = EfficiencyPair::new(t.eta_a, t.eta_b)
                    .map_err(|e| format!("sample {i}: {e}"))?;
                let mut devs = [0.0f64; 2];
                for (k, scheme) in [Scheme::OnOff, Scheme::Parity].into_iter().enumerate() {
                    let closed = expectation_effective(scheme, t.alpha, &xi, &beta, &effs);
                    let oracle =
                        joint_expectation_oracle(t.alpha, &xi, &beta, scheme, &effs, &trunc)
                            .map_err(|e| format!("sample {i} ({scheme}): {e}"))?;
                    devs[k] = (closed - oracle).abs();
                }
                Ok((devs[0], devs[1]))
            })
            .collect()
    });

    let mut max_onoff = 0.0f64;
    let mut max_parity = 0.0f64;
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok((d_on, d_par)) => {
                max_onoff = max_onoff.max(d_on);
                max_parity = max_parity.max(d_par);
            }
            Err(msg) => failures.push(msg),
        }
    }
    let passed =
        failures.is_empty() && max_onoff <= tolerance && max_parity <= tolerance;
    for msg in &failures {
        eprintln!("verify: {msg}");
    }
    let report = VerifyReport {
        samples,
        seed,
        dim,
        max_deviation_onoff: max_onoff,
        max_deviation_parity: max_parity,
        tolerance,
        failure_count: failures.len(),
        passed,
    };
    sink.emit(&[report])?;
    if !passed {
        return Err(CliError::Numeric(format!(
            "verification failed: max deviation onoff {max_onoff:.3e}, parity {max_parity:.3e}, {} errors",
            failures.len()
        )));
    }
    Ok(())
}
