//! Row types and deterministic CSV/JSON emission.
//!
//! CSV dialect: comma separator, mandatory header, `.` decimal point, LF line
//! endings. Floats are written in shortest round-trip form, so parsing a row
//! back reproduces the stored value bit-exactly.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use hybrid_bell_core::optimize::BellOptimum;
use hybrid_bell_core::EfficiencyPair;

/// One evaluated grid point. `alpha_opt` is populated only when the amplitude
/// itself was optimized rather than prescribed.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ScanRow {
    pub scheme: String,
    pub alpha: f64,
    pub eta_a: f64,
    pub eta_b: f64,
    pub bell_max: f64,
    pub alpha_opt: Option<f64>,
    pub theta1: f64,
    pub phi1: f64,
    pub theta2: f64,
    pub phi2: f64,
    pub beta1_mag: f64,
    pub beta1_phase: f64,
    pub beta2_mag: f64,
    pub beta2_phase: f64,
    pub regime: String,
    pub residual_norm: Option<f64>,
}

impl ScanRow {
    /// Build a row from an optimum, re-evaluating the Bell value through the
    /// plain closed form as a self-check.
    pub fn from_optimum(
        alpha: f64,
        alpha_opt: Option<f64>,
        effs: &EfficiencyPair<f64>,
        opt: &BellOptimum<f64>,
    ) -> Result<Self, String> {
        let check = hybrid_bell_core::optimize::reevaluate(alpha, opt, effs)
            .map_err(|e| e.to_string())?;
        if (check - opt.value).abs() > 1e-9 {
            return Err(format!(
                "reported optimum {} does not re-evaluate ({}) at alpha = {alpha}",
                opt.value, check
            ));
        }
        let s = &opt.settings;
        Ok(ScanRow {
            scheme: s.scheme.name().to_string(),
            alpha,
            eta_a: effs.eta_a(),
            eta_b: effs.eta_b(),
            bell_max: opt.value,
            alpha_opt,
            theta1: s.xi1.theta(),
            phi1: s.xi1.phi(),
            theta2: s.xi2.theta(),
            phi2: s.xi2.phi(),
            beta1_mag: s.beta1.magnitude(),
            beta1_phase: s.beta1.phase(),
            beta2_mag: s.beta2.magnitude(),
            beta2_phase: s.beta2.phase(),
            regime: opt.regime.name().to_string(),
            residual_norm: opt.residual_norm,
        })
    }
}

/// Result of a threshold bisection.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub scheme: String,
    pub mode: String,
    pub fixed_eta: Option<f64>,
    pub threshold: f64,
    pub tol: f64,
}

/// Result of the parity/on-off crossover search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrossoverRow {
    pub mode: String,
    pub crossover: f64,
    pub tol: f64,
}

/// One (eta_A, eta_B) cell of the scheme-difference map.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiffRow {
    pub eta_a: f64,
    pub eta_b: f64,
    pub bell_max_onoff: f64,
    pub bell_max_parity: f64,
    pub parity_minus_onoff: f64,
}

/// Oracle-validation report; per-sample failure details go to stderr.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub samples: usize,
    pub seed: u64,
    pub dim: usize,
    pub max_deviation_onoff: f64,
    pub max_deviation_parity: f64,
    pub tolerance: f64,
    pub failure_count: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("format '{other}' must be csv or json")),
        }
    }
}

fn render<T: Serialize>(rows: &[T], format: Format) -> Result<Vec<u8>, String> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(Vec::new());
            for row in rows {
                w.serialize(row).map_err(|e| e.to_string())?;
            }
            w.into_inner().map_err(|e| e.to_string())
        }
        Format::Json => {
            let mut buf = serde_json::to_vec_pretty(rows).map_err(|e| e.to_string())?;
            buf.push(b'\n');
            Ok(buf)
        }
    }
}

/// Emit rows to `out` (or stdout). File output goes through a temporary
/// sibling and a rename, so a failed run leaves no partial file behind.
pub fn emit<T: Serialize>(rows: &[T], out: Option<&Path>, format: Format) -> Result<(), String> {
    let bytes = render(rows, format)?;
    match out {
        None => std::io::stdout()
            .write_all(&bytes)
            .map_err(|e| e.to_string()),
        Some(path) => {
            let tmp = path.with_extension("partial");
            let write = std::fs::write(&tmp, &bytes)
                .and_then(|()| std::fs::rename(&tmp, path));
            if let Err(e) = write {
                let _ = std::fs::remove_file(&tmp);
                return Err(format!("cannot write {}: {e}", path.display()));
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn demo_row() -> ScanRow {
        ScanRow {
            scheme: "onoff".into(),
            alpha: 0.1 + 0.2, // deliberately non-representable
            eta_a: 1.0,
            eta_b: 0.75,
            bell_max: 2.609,
            alpha_opt: None,
            theta1: std::f64::consts::FRAC_PI_2,
            phi1: 0.0,
            theta2: 0.0,
            phi2: 0.0,
            beta1_mag: 0.478,
            beta1_phase: std::f64::consts::PI,
            beta2_mag: 0.478,
            beta2_phase: 0.0,
            regime: "onoff-real".into(),
            residual_norm: Some(1e-12),
        }
    }

    #[test]
    fn csv_round_trips_exactly() {
        let rows = vec![demo_row()];
        let bytes = render(&rows, Format::Csv).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        assert!(text.starts_with("scheme,alpha,eta_a,eta_b,bell_max,alpha_opt,"));
        assert!(!text.contains('\r'));
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let back: Vec<ScanRow> = reader.deserialize().map(|r| r.unwrap()).collect();
        assert_eq!(back, rows);
    }

    #[test]
    fn json_round_trips_exactly() {
        let rows = vec![demo_row()];
        let bytes = render(&rows, Format::Json).unwrap();
        let back: Vec<ScanRow> = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn empty_alpha_opt_is_blank_in_csv() {
        let bytes = render(&[demo_row()], Format::Csv).unwrap();
        let line = String::from_utf8(bytes).unwrap();
        let data = line.lines().nth(1).unwrap().to_string();
        assert!(data.contains(",,"), "{data}");
    }
}
