//! Named presets over the generic scan commands. Each preset pins the grids
//! used to regenerate one figure's data; expected landmarks are noted so a
//! regenerated file can be sanity-checked at a glance.

use crate::commands::{
    run_alpha_scan, run_contour, run_diff_map, run_eta_scan, CliError, ContourAxes, SchemeArg,
    Sink, Vary,
};
use crate::config::{Grid, Range};

const FULL_ALPHA: Range = Range { lo: 1e-3, hi: 3.0 };

fn grid(start: f64, stop: f64, step: f64) -> Grid {
    Grid { start, stop, step }
}

pub const FIGURE_IDS: [&str; 9] = [
    "fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9",
];

/// Run one preset. Landmarks per figure:
///
/// * fig1 — |B|max vs alpha at perfect efficiency; on/off peaks at
///   (0.664, 2.61), parity rises monotonically toward 2*sqrt(2).
/// * fig2 — alpha-optimized maxima vs eta_B (eta_A = 1); violation persists
///   down to eta_B = 0.5, alpha_opt between 0.66 and 0.71 for on/off.
/// * fig3 — (alpha, symmetric eta) sheet; the bell_max > 2 region starts
///   near eta = 0.67 at small alpha.
/// * fig4 — on/off maxima vs symmetric eta for alpha in 0.1..0.5; lower
///   alpha violates at lower eta but by less.
/// * fig5 — same sheet for parity.
/// * fig6 — alpha-optimized maxima vs symmetric eta, both schemes; the
///   curves cross at eta = 0.9868, alpha_opt stays below 1.0 for parity
///   between eta = 0.68 and 0.97.
/// * fig7 — alpha-optimized maxima over the (eta_A, eta_B) square, both
///   schemes; the violation regions of the two schemes nearly coincide.
/// * fig8 — parity-minus-on/off difference map; positive only in a strip
///   with eta_B close to 1.
/// * fig9 — parity regime map over (eta_A, eta_B): the `regime` column
///   flips from region I (real settings) to region II (pure-imaginary
///   displacements) as both efficiencies grow.
pub fn run_figure(pool: &rayon::ThreadPool, id: &str, sink: &Sink) -> Result<(), CliError> {
    match id {
        "fig1" => run_alpha_scan(
            pool,
            SchemeArg::Both,
            grid(0.05, 3.0, 0.05),
            1.0,
            1.0,
            sink,
        ),
        "fig2" => run_eta_scan(
            pool,
            SchemeArg::Both,
            grid(0.5, 1.0, 0.01),
            Vary::EtaB,
            1.0,
            FULL_ALPHA,
            sink,
        ),
        "fig3" => run_contour(
            pool,
            SchemeArg::Both,
            ContourAxes::AlphaEta {
                alpha_grid: grid(0.1, 1.5, 0.1),
                eta_grid: grid(0.5, 1.0, 0.02),
                vary: Vary::Symmetric,
                fixed_eta: 1.0,
            },
            sink,
        ),
        "fig4" | "fig5" => run_contour(
            pool,
            if id == "fig4" {
                SchemeArg::OnOff
            } else {
                SchemeArg::Parity
            },
            ContourAxes::AlphaEta {
                alpha_grid: grid(0.1, 0.5, 0.1),
                eta_grid: grid(0.4, 1.0, 0.01),
                vary: Vary::Symmetric,
                fixed_eta: 1.0,
            },
            sink,
        ),
        "fig6" => run_eta_scan(
            pool,
            SchemeArg::Both,
            grid(0.6, 1.0, 0.005),
            Vary::Symmetric,
            1.0,
            FULL_ALPHA,
            sink,
        ),
        "fig7" => run_contour(
            pool,
            SchemeArg::Both,
            ContourAxes::EtaEta {
                eta_a_grid: grid(0.5, 1.0, 0.025),
                eta_b_grid: grid(0.5, 1.0, 0.025),
                alpha_range: FULL_ALPHA,
            },
            sink,
        ),
        "fig8" => run_diff_map(
            pool,
            grid(0.5, 1.0, 0.025),
            grid(0.5, 1.0, 0.025),
            FULL_ALPHA,
            sink,
        ),
        "fig9" => run_contour(
            pool,
            SchemeArg::Parity,
            ContourAxes::EtaEta {
                eta_a_grid: grid(0.5, 1.0, 0.025),
                eta_b_grid: grid(0.5, 1.0, 0.025),
                alpha_range: FULL_ALPHA,
            },
            sink,
        ),
        other => Err(CliError::Config(format!(
            "unknown figure '{other}'; expected one of {}",
            FIGURE_IDS.join(", ")
        ))),
    }
}
