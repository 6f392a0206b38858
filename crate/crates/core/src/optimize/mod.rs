//! Optimizing settings and maximum Bell values: transcendental solvers for
//! the known optimality conditions, a multi-start simplex maximizer with a
//! Newton polish on the stationarity system, scans over the coherent
//! amplitude, and efficiency-threshold searches.

mod golden;
mod nelder_mead;
mod roots;
mod stationarity;

pub use golden::golden_max;
pub use nelder_mead::{maximize as nelder_mead_maximize, NelderMeadOptions, NelderMeadResult};
pub use roots::{bisect, bisect_expanding};
pub use stationarity::{
    regime_bell, regime_to_settings, residual_norm, stationarity_residuals, Regime,
};

use crate::closed_form::{bell_value, exp_sinh};
use crate::error::{BellError, Result};
use crate::scalar::Scalar;
use crate::types::{
    DisplacementSetting, EfficiencyPair, HybridParams, MeasurementSettings, QubitSetting, Scheme,
};

/// A maximized Bell value together with how it was found.
#[derive(Debug, Clone)]
pub struct BellOptimum<S> {
    pub value: S,
    pub settings: MeasurementSettings<S>,
    pub regime: Regime,
    /// Norm of the stationarity residuals; `None` when no regime system
    /// applies (degenerate points).
    pub residual_norm: Option<S>,
    pub evaluations: usize,
}

/// Which efficiencies a threshold bisection varies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdMode<S> {
    /// eta_A = eta_B = eta.
    SymmetricEta,
    /// eta_A = 1, vary eta_B.
    EtaBOnly,
    /// eta_A fixed, vary eta_B.
    FixedEtaA(S),
    /// eta_B fixed, vary eta_A.
    FixedEtaB(S),
}

/// Threshold-search request.
#[derive(Debug, Clone, Copy)]
pub struct ThresholdQuery<S> {
    pub scheme: Scheme,
    pub mode: ThresholdMode<S>,
    pub alpha_range: (S, S),
    pub tol: S,
}

impl<S: Scalar> ThresholdQuery<S> {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.alpha_range;
        if !(lo > S::zero() && hi > lo && hi <= S::of(3.0)) {
            return Err(BellError::InvalidArgument(format!(
                "alpha_range ({lo}, {hi}) must satisfy 0 < lo < hi <= 3"
            )));
        }
        if !(self.tol > S::zero()) {
            return Err(BellError::InvalidArgument(format!(
                "tol = {} must be positive",
                self.tol
            )));
        }
        Ok(())
    }
}

/// Root of |b| e^{-2(1-eta_B) a^2} + |b| sinh(2 eta_B a b) - a cosh(2 eta_B a b)
/// — the on/off optimality condition for beta1 = -beta2 at eta_A = 1.
pub fn solve_beta_onoff<S: Scalar>(alpha: S, eta_b: S) -> Result<S> {
    if alpha == S::zero() {
        return Ok(S::zero());
    }
    if !(alpha > S::zero()) || !(eta_b > S::zero() && eta_b <= S::one()) {
        return Err(BellError::InvalidArgument(format!(
            "solve_beta_onoff needs alpha > 0 and eta_B in (0, 1]; got ({alpha}, {eta_b})"
        )));
    }
    let two = S::of(2.0);
    let decay = (-two * (S::one() - eta_b) * alpha * alpha).exp();
    let f = |b: S| {
        let y = two * eta_b * alpha * b;
        b * decay + b * y.sinh() - alpha * y.cosh()
    };
    // f(0) = -alpha < 0 and the b sinh term dominates for large b
    bisect_expanding(f, S::zero(), alpha.max(S::one()), S::of(1e6), "onoff beta")
}

/// Smallest positive root of tan(4 eta_B a b) = (a - b)/(a + b), restricted to
/// 4 eta_B a b in (0, pi/2) where the crossing is guaranteed.
pub fn solve_beta_parity<S: Scalar>(alpha: S, eta_b: S) -> Result<S> {
    if alpha == S::zero() {
        return Ok(S::zero());
    }
    if !(alpha > S::zero()) || !(eta_b > S::zero() && eta_b <= S::one()) {
        return Err(BellError::InvalidArgument(format!(
            "solve_beta_parity needs alpha > 0 and eta_B in (0, 1]; got ({alpha}, {eta_b})"
        )));
    }
    let four = S::of(4.0);
    // cross-multiplied: sin(4 eta a b)(a + b) - cos(4 eta a b)(a - b)
    let f = |b: S| {
        let arg = four * eta_b * alpha * b;
        arg.sin() * (alpha + b) - arg.cos() * (alpha - b)
    };
    let hi = S::FRAC_PI_2() / (four * eta_b * alpha) * S::of(1.0 - 1e-12);
    bisect(f, S::zero(), hi, "parity beta")
}

/// Closed-form maximum Bell value at eta_A = 1 for the known optimizing
/// settings, with |beta| from the matching solver.
pub fn bell_max_eta_b<S: Scalar>(scheme: Scheme, alpha: S, eta_b: S) -> Result<S> {
    let two = S::of(2.0);
    match scheme {
        Scheme::OnOff => {
            let b = solve_beta_onoff(alpha, eta_b)?;
            let x = eta_b * (alpha * alpha + b * b);
            let y = two * eta_b * alpha * b;
            // exponent is 2(1-eta_B) a^2, consistent with the stationarity
            // condition and with the general expectation values
            let decay = (-two * (S::one() - eta_b) * alpha * alpha).exp();
            Ok(S::of(4.0) * (decay * (-x).exp() + exp_sinh(x, y)) - two * (-two * alpha * alpha).exp())
        }
        Scheme::Parity => {
            let b = solve_beta_parity(alpha, eta_b)?;
            let arg = S::of(4.0) * eta_b * alpha * b;
            let amp =
                (-two * (S::one() - eta_b) * alpha * alpha - two * eta_b * b * b).exp();
            Ok(two * amp * (arg.cos() + arg.sin()))
        }
    }
}

/// Candidate point inside one regime.
#[derive(Debug, Clone)]
struct Candidate<S> {
    regime: Regime,
    params: [S; 4],
    value: S,
    evals: usize,
}

fn start_grid<S: Scalar>(regime: Regime, alpha: S, effs: &EfficiencyPair<S>) -> Vec<[S; 4]> {
    let eta_b = effs.eta_b().max(S::of(0.05));
    let scale = match regime {
        Regime::OnOffReal => solve_beta_onoff(alpha, eta_b).unwrap_or(S::of(0.1)),
        _ => solve_beta_parity(alpha, eta_b).unwrap_or(S::of(0.1)),
    }
    .max(S::of(0.02));
    let half = S::of(0.5);
    let angle_pairs: [(S, S); 3] = match regime {
        Regime::ParityRegionII => [
            (S::zero(), S::FRAC_PI_2()),
            (S::of(0.4), S::of(1.2)),
            (-S::of(0.3), S::of(1.9)),
        ],
        _ => [
            (S::FRAC_PI_2(), S::zero()),
            (S::of(2.0), S::of(0.5)),
            (S::of(1.1), -S::of(0.4)),
        ],
    };
    let beta_pairs: [(S, S); 3] = [
        (-scale, scale),
        (-half * scale, S::of(1.4) * scale),
        (-S::of(0.1), S::of(0.3)),
    ];
    let mut starts = Vec::with_capacity(9);
    for &(x1, x2) in &angle_pairs {
        for &(b1, b2) in &beta_pairs {
            starts.push([x1, x2, b1, b2]);
        }
    }
    starts
}

/// Newton iteration on the stationarity residuals; returns an improved point
/// or the input if the polish does not help.
fn newton_polish<S: Scalar>(
    scheme: Scheme,
    regime: Regime,
    start: &[S; 4],
    alpha: S,
    effs: &EfficiencyPair<S>,
) -> [S; 4] {
    let grad = |p: &[S; 4]| stationarity_residuals(scheme, regime, p, alpha, effs).unwrap();
    let mut p = *start;
    let mut g = grad(&p);
    let mut gn = residual_norm(&g);
    let h = S::of(1e-7);
    for _ in 0..25 {
        if gn < S::of(1e-14) {
            break;
        }
        // finite-difference Jacobian of the analytic gradient
        let mut jac = [[S::zero(); 4]; 4];
        for j in 0..4 {
            let mut up = p;
            let mut dn = p;
            up[j] = up[j] + h;
            dn[j] = dn[j] - h;
            let gu = grad(&up);
            let gd = grad(&dn);
            for i in 0..4 {
                jac[i][j] = (gu[i] - gd[i]) / (S::of(2.0) * h);
            }
        }
        let rhs = [-g[0], -g[1], -g[2], -g[3]];
        let Some(step) = solve4(&jac, &rhs) else { break };
        // damped acceptance on the residual norm
        let mut lambda = S::one();
        let mut accepted = false;
        for _ in 0..8 {
            let trial = [
                p[0] + lambda * step[0],
                p[1] + lambda * step[1],
                p[2] + lambda * step[2],
                p[3] + lambda * step[3],
            ];
            let gt = grad(&trial);
            let gtn = residual_norm(&gt);
            if gtn < gn {
                p = trial;
                g = gt;
                gn = gtn;
                accepted = true;
                break;
            }
            lambda = lambda * S::of(0.5);
        }
        if !accepted {
            break;
        }
    }
    p
}

/// Gaussian elimination with partial pivoting on a 4x4 system.
fn solve4<S: Scalar>(a: &[[S; 4]; 4], b: &[S; 4]) -> Option<[S; 4]> {
    let mut m = *a;
    let mut rhs = *b;
    for col in 0..4 {
        let mut pivot = col;
        for row in col + 1..4 {
            if m[row][col].abs() > m[pivot][col].abs() {
                pivot = row;
            }
        }
        if m[pivot][col].abs() < S::of(1e-300) {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..4 {
            let factor = m[row][col] / m[col][col];
            for k in col..4 {
                m[row][k] = m[row][k] - factor * m[col][k];
            }
            rhs[row] = rhs[row] - factor * rhs[col];
        }
    }
    let mut x = [S::zero(); 4];
    for row in (0..4).rev() {
        let mut acc = rhs[row];
        for k in row + 1..4 {
            acc = acc - m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    if x.iter().all(|v| v.is_finite()) {
        Some(x)
    } else {
        None
    }
}

fn degenerate_optimum<S: Scalar>(scheme: Scheme) -> BellOptimum<S> {
    let xi = QubitSetting::new(S::FRAC_PI_2(), S::zero());
    let beta = DisplacementSetting::new(S::zero(), S::zero());
    BellOptimum {
        value: S::of(2.0),
        settings: MeasurementSettings {
            xi1: xi,
            xi2: xi,
            beta1: beta,
            beta2: beta,
            scheme,
        },
        regime: Regime::Degenerate,
        residual_norm: None,
        evaluations: 0,
    }
}

/// Maximize the Bell function over the local settings at fixed alpha and
/// detector efficiencies: deterministic multi-start simplex search in each
/// applicable regime, polished by Newton on the stationarity system.
pub fn maximize_bell<S: Scalar>(
    scheme: Scheme,
    alpha: S,
    effs: &EfficiencyPair<S>,
) -> Result<BellOptimum<S>> {
    if !(alpha >= S::zero()) {
        return Err(BellError::InvalidArgument(format!(
            "alpha = {alpha} must be nonnegative"
        )));
    }
    // alpha = 0 is a product state and fully blind detectors see nothing:
    // the classical bound 2 is attained exactly, not exceeded
    if alpha == S::zero() || (effs.eta_a() == S::zero() && effs.eta_b() == S::zero()) {
        return Ok(degenerate_optimum(scheme));
    }

    let regimes: &[Regime] = match scheme {
        Scheme::OnOff => &[Regime::OnOffReal],
        Scheme::Parity => &[Regime::ParityRegionI, Regime::ParityRegionII],
    };

    let nm_opts = NelderMeadOptions::default();
    let mut candidates: Vec<Candidate<S>> = Vec::new();
    for &regime in regimes {
        let objective =
            |p: &[S]| regime_bell(scheme, regime, &[p[0], p[1], p[2], p[3]], alpha, effs).unwrap();
        for start in start_grid(regime, alpha, effs) {
            let step = [
                S::of(0.2),
                S::of(0.2),
                (start[2].abs() * S::of(0.3)).max(S::of(0.05)),
                (start[3].abs() * S::of(0.3)).max(S::of(0.05)),
            ];
            let res = nelder_mead_maximize(&objective, &start, &step, &nm_opts);
            let raw = [res.x[0], res.x[1], res.x[2], res.x[3]];
            let polished = newton_polish(scheme, regime, &raw, alpha, effs);
            let polished_value = regime_bell(scheme, regime, &polished, alpha, effs)?;
            let (params, value) = if polished_value >= res.value - S::of(1e-12) {
                (polished, polished_value)
            } else {
                (raw, res.value)
            };
            candidates.push(Candidate {
                regime,
                params,
                value,
                evals: res.evals,
            });
        }
    }

    let total_evals: usize = candidates.iter().map(|c| c.evals).sum();
    // best value wins; among ties, smallest |b1| + |b2|, then smallest theta1
    let best_value = candidates
        .iter()
        .map(|c| c.value)
        .fold(S::neg_infinity(), S::max);
    let tie_tol = S::of(1e-10);
    let best = candidates
        .iter()
        .filter(|c| c.value >= best_value - tie_tol)
        .min_by(|a, b| {
            let key = |c: &Candidate<S>| {
                let settings = regime_to_settings(scheme, c.regime, &c.params);
                (
                    settings.beta1.magnitude() + settings.beta2.magnitude(),
                    settings.xi1.theta(),
                )
            };
            let (ka, kb) = (key(a), key(b));
            ka.0.partial_cmp(&kb.0)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(ka.1.partial_cmp(&kb.1).unwrap_or(std::cmp::Ordering::Equal))
        })
        .expect("at least one candidate");

    let residuals = stationarity_residuals(scheme, best.regime, &best.params, alpha, effs)?;
    let settings = regime_to_settings(scheme, best.regime, &best.params);
    Ok(BellOptimum {
        value: best.value,
        settings,
        regime: best.regime,
        residual_norm: Some(residual_norm(&residuals)),
        evaluations: total_evals,
    })
}

/// Outer golden-section search of [`maximize_bell`] over the coherent
/// amplitude, refined to |delta alpha| < 1e-4.
pub fn maximize_over_alpha<S: Scalar>(
    scheme: Scheme,
    effs: &EfficiencyPair<S>,
    alpha_range: (S, S),
) -> Result<(S, BellOptimum<S>)> {
    let (lo, hi) = alpha_range;
    if !(lo >= S::zero() && hi > lo && hi <= S::of(3.0)) {
        return Err(BellError::InvalidArgument(format!(
            "alpha_range ({lo}, {hi}) must satisfy 0 <= lo < hi <= 3"
        )));
    }
    let f = |a: S| {
        maximize_bell(scheme, a, effs)
            .map(|opt| opt.value)
            .unwrap_or(S::neg_infinity())
    };
    let (alpha_opt, _) = golden_max(f, lo, hi, S::of(1e-4));
    let optimum = maximize_bell(scheme, alpha_opt, effs)?;
    Ok((alpha_opt, optimum))
}

fn efficiencies_for<S: Scalar>(mode: ThresholdMode<S>, eta: S) -> Result<EfficiencyPair<S>> {
    match mode {
        ThresholdMode::SymmetricEta => EfficiencyPair::symmetric(eta),
        ThresholdMode::EtaBOnly => EfficiencyPair::new(S::one(), eta),
        ThresholdMode::FixedEtaA(a) => EfficiencyPair::new(a, eta),
        ThresholdMode::FixedEtaB(b) => EfficiencyPair::new(eta, b),
    }
}

/// Detection-efficiency threshold: bisection on eta of the alpha-optimized
/// Bell maximum minus 2. Asserts that the margin changes sign exactly once
/// across the points it samples.
pub fn find_threshold<S: Scalar>(query: &ThresholdQuery<S>) -> Result<S> {
    query.validate()?;
    let samples = std::cell::RefCell::new(Vec::<(S, S)>::new());
    let margin = |eta: S| -> Result<S> {
        let effs = efficiencies_for(query.mode, eta)?;
        let (_, opt) = maximize_over_alpha(query.scheme, &effs, query.alpha_range)?;
        let m = opt.value - S::of(2.0);
        samples.borrow_mut().push((eta, m));
        Ok(m)
    };

    let hi = S::one();
    if margin(hi)? <= S::zero() {
        return Err(BellError::NoBracket {
            what: format!("{} threshold: no violation at eta = 1", query.scheme),
            lo: 0.0,
            hi: 1.0,
        });
    }
    let mut lo = S::of(0.3);
    while margin(lo)? > S::zero() {
        lo = lo * S::of(0.5);
        if lo < S::of(1e-3) {
            return Err(BellError::NoBracket {
                what: format!("{} threshold: violation persists as eta -> 0", query.scheme),
                lo: lo.to_f64_lossy(),
                hi: 1.0,
            });
        }
    }
    let mut hi = S::one();
    while hi - lo > query.tol {
        let mid = (lo + hi) * S::of(0.5);
        if margin(mid)? > S::zero() {
            hi = mid;
        } else {
            lo = mid;
        }
    }

    // The margin values themselves need not grow monotonically (below
    // threshold the amplitude search can land on different shallow branches),
    // but the sign must: once a violation appears it must persist as eta
    // increases, or the bisection root is not the threshold.
    let mut pts = samples.into_inner();
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    let tol = S::of(1e-9);
    let mut violated = false;
    for (eta, m) in &pts {
        if *m > tol {
            violated = true;
        } else if violated && *m < -tol {
            return Err(BellError::InvalidArgument(format!(
                "Bell margin changes sign more than once in eta near {eta}"
            )));
        }
    }
    Ok((lo + hi) * S::of(0.5))
}

/// Symmetric efficiency at which the parity scheme overtakes on/off:
/// bisection on the difference of alpha-optimized maxima.
pub fn find_crossover<S: Scalar>(alpha_range: (S, S), tol: S) -> Result<S> {
    let diff = |eta: S| -> Result<S> {
        let effs = EfficiencyPair::symmetric(eta)?;
        let (_, parity) = maximize_over_alpha(Scheme::Parity, &effs, alpha_range)?;
        let (_, onoff) = maximize_over_alpha(Scheme::OnOff, &effs, alpha_range)?;
        Ok(parity.value - onoff.value)
    };
    let mut lo = S::of(0.95);
    let mut hi = S::one();
    if !(diff(lo)? < S::zero() && diff(hi)? > S::zero()) {
        return Err(BellError::NoBracket {
            what: "parity/onoff crossover".to_string(),
            lo: 0.95,
            hi: 1.0,
        });
    }
    while hi - lo > tol {
        let mid = (lo + hi) * S::of(0.5);
        if diff(mid)? > S::zero() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo + hi) * S::of(0.5))
}

/// Convenience: the Bell value of an optimum's settings through the general
/// closed form (used to cross-check reported optima).
pub fn reevaluate<S: Scalar>(
    alpha: S,
    optimum: &BellOptimum<S>,
    effs: &EfficiencyPair<S>,
) -> Result<S> {
    let params = HybridParams::new(alpha)?;
    Ok(bell_value(&params, &optimum.settings, effs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn onoff_beta_solver_landmark() {
        let b = solve_beta_onoff(0.664f64, 1.0).unwrap();
        assert!((b - 0.478).abs() < 2e-3, "beta = {b}");
        let residual =
            b * 1.0 + b * (2.0 * 0.664 * b).sinh() - 0.664 * (2.0 * 0.664 * b).cosh();
        assert!(residual.abs() < 1e-12);
    }

    #[test]
    fn onoff_beta_solver_small_alpha_limit() {
        for alpha in [1e-3f64, 1e-2] {
            let b = solve_beta_onoff(alpha, 1.0).unwrap();
            assert!(b > 0.0 && b < 2.5 * alpha, "alpha={alpha} -> beta={b}");
        }
        assert_eq!(solve_beta_onoff(0.0f64, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn onoff_beta_solver_lossy_residual() {
        let (alpha, eta) = (0.664f64, 0.5);
        let b = solve_beta_onoff(alpha, eta).unwrap();
        let residual = b * (-2.0 * (1.0 - eta) * alpha * alpha).exp()
            + b * (2.0 * eta * alpha * b).sinh()
            - alpha * (2.0 * eta * alpha * b).cosh();
        assert!(residual.abs() < 1e-12, "residual {residual:e}");
    }

    #[test]
    fn parity_beta_solver_landmark() {
        let b = solve_beta_parity(2.0f64, 1.0).unwrap();
        assert!((b - 0.0924).abs() < 5e-4, "beta = {b}");
        assert!(((4.0 * 2.0 * b).tan() - (2.0 - b) / (2.0 + b)).abs() < 1e-10);
    }

    #[test]
    fn parity_beta_solver_small_alpha_tends_to_alpha() {
        // expanding tan to first order gives b -> a as a -> 0
        for alpha in [1e-3f64, 1e-2] {
            let b = solve_beta_parity(alpha, 1.0).unwrap();
            assert!((b / alpha - 1.0).abs() < 0.05, "alpha={alpha} -> beta={b}");
        }
    }

    #[test]
    fn parity_beta_solver_stays_on_first_branch() {
        let (alpha, eta) = (0.5f64, 0.8);
        let b = solve_beta_parity(alpha, eta).unwrap();
        assert!(4.0 * eta * alpha * b < std::f64::consts::FRAC_PI_2);
        let arg = 4.0 * eta * alpha * b;
        let residual = arg.sin() * (alpha + b) - arg.cos() * (alpha - b);
        assert!(residual.abs() < 1e-12);
    }

    #[test]
    fn bell_max_landmarks() {
        let onoff = bell_max_eta_b(Scheme::OnOff, 0.664f64, 1.0).unwrap();
        assert!((onoff - 2.61).abs() < 0.005, "onoff {onoff}");
        let parity = bell_max_eta_b(Scheme::Parity, 2.0f64, 1.0).unwrap();
        assert!((parity - 2.778).abs() < 0.005, "parity {parity}");
    }

    #[test]
    fn bell_max_matches_explicit_settings() {
        // the closed formula must agree with the general Bell function at the
        // optimizing settings it implies
        for (alpha, eta_b) in [(0.664f64, 1.0), (0.5, 0.8), (1.2, 0.7)] {
            let b = solve_beta_onoff(alpha, eta_b).unwrap();
            let settings = MeasurementSettings {
                xi1: QubitSetting::new(std::f64::consts::FRAC_PI_2, 0.0),
                xi2: QubitSetting::new(0.0, 0.0),
                beta1: DisplacementSetting::from_signed_real(-b),
                beta2: DisplacementSetting::from_signed_real(b),
                scheme: Scheme::OnOff,
            };
            let effs = EfficiencyPair::new(1.0, eta_b).unwrap();
            let via_formula = bell_max_eta_b(Scheme::OnOff, alpha, eta_b).unwrap();
            let via_settings = bell_value(&HybridParams::new(alpha).unwrap(), &settings, &effs);
            assert!(
                (via_formula - via_settings).abs() < 1e-10,
                "alpha={alpha} eta_b={eta_b}: {via_formula} vs {via_settings}"
            );

            let bp = solve_beta_parity(alpha, eta_b).unwrap();
            let settings = MeasurementSettings {
                xi1: QubitSetting::new(std::f64::consts::FRAC_PI_2, 0.0),
                xi2: QubitSetting::new(
                    std::f64::consts::FRAC_PI_2,
                    std::f64::consts::FRAC_PI_2,
                ),
                beta1: DisplacementSetting::from_signed_imag(-bp),
                beta2: DisplacementSetting::from_signed_imag(bp),
                scheme: Scheme::Parity,
            };
            let via_formula = bell_max_eta_b(Scheme::Parity, alpha, eta_b).unwrap();
            let via_settings = bell_value(&HybridParams::new(alpha).unwrap(), &settings, &effs);
            assert!(
                (via_formula - via_settings).abs() < 1e-10,
                "parity alpha={alpha} eta_b={eta_b}: {via_formula} vs {via_settings}"
            );
        }
    }

    #[test]
    fn perfect_detector_conditions_satisfy_general_system() {
        let alpha = 0.664f64;
        let b = solve_beta_onoff(alpha, 1.0).unwrap();
        let params = [std::f64::consts::FRAC_PI_2, 0.0, -b, b];
        let r = stationarity_residuals(
            Scheme::OnOff,
            Regime::OnOffReal,
            &params,
            alpha,
            &EfficiencyPair::perfect(),
        )
        .unwrap();
        assert!(residual_norm(&r) < 1e-8, "residuals {r:?}");
    }

    #[test]
    fn fourth_equation_reduces_to_beta_condition_at_perfect_eta_a() {
        // at eta_A = 1 the b2 gradient is proportional to the solver's
        // residual function; at the solver root it must vanish
        let (alpha, eta_b) = (0.8f64, 0.9);
        let b = solve_beta_onoff(alpha, eta_b).unwrap();
        let params = [std::f64::consts::FRAC_PI_2, 0.0, -b, b];
        let r = stationarity_residuals(
            Scheme::OnOff,
            Regime::OnOffReal,
            &params,
            alpha,
            &EfficiencyPair::new(1.0, eta_b).unwrap(),
        )
        .unwrap();
        assert!(r[3].abs() < 1e-12, "r[3] = {:e}", r[3]);
    }

    #[test]
    fn maximize_bell_is_stationary_and_consistent() {
        let effs = EfficiencyPair::new(0.9f64, 0.85).unwrap();
        for scheme in [Scheme::OnOff, Scheme::Parity] {
            let opt = maximize_bell(scheme, 0.5, &effs).unwrap();
            assert!(opt.residual_norm.unwrap() < 1e-6, "{scheme}: {opt:?}");
            let re = reevaluate(0.5, &opt, &effs).unwrap();
            assert!((re - opt.value).abs() < 1e-10);
            assert!(opt.value >= 2.0 - 1e-9 && opt.value <= 2.0 * 2.0f64.sqrt() + 1e-9);
        }
    }

    #[test]
    fn maximize_bell_matches_closed_form_at_perfect_eta_a() {
        for (scheme, alpha, eta_b) in [
            (Scheme::OnOff, 0.664f64, 1.0),
            (Scheme::OnOff, 0.5, 0.8),
            (Scheme::Parity, 1.0, 1.0),
            (Scheme::Parity, 0.5, 0.9),
        ] {
            let effs = EfficiencyPair::new(1.0, eta_b).unwrap();
            let opt = maximize_bell(scheme, alpha, &effs).unwrap();
            let closed = bell_max_eta_b(scheme, alpha, eta_b).unwrap();
            assert!(
                (opt.value - closed).abs() < 1e-6,
                "{scheme} alpha={alpha} eta_b={eta_b}: {} vs {closed}",
                opt.value
            );
        }
    }

    #[test]
    fn degenerate_points_return_exactly_two() {
        for scheme in [Scheme::OnOff, Scheme::Parity] {
            let opt = maximize_bell(scheme, 0.0f64, &EfficiencyPair::new(0.8, 0.7).unwrap())
                .unwrap();
            assert_eq!(opt.value, 2.0);
            assert_eq!(opt.regime, Regime::Degenerate);
            let opt =
                maximize_bell(scheme, 0.7f64, &EfficiencyPair::new(0.0, 0.0).unwrap()).unwrap();
            assert_eq!(opt.value, 2.0);
            assert_eq!(opt.regime, Regime::Degenerate);
        }
    }

    #[test]
    fn parity_regime_selection_follows_efficiency() {
        // deep region II: both efficiencies high
        let high = EfficiencyPair::new(0.98f64, 0.98).unwrap();
        let opt = maximize_bell(Scheme::Parity, 1.0, &high).unwrap();
        assert_eq!(opt.regime, Regime::ParityRegionII, "value {}", opt.value);
        // deep region I: both efficiencies low
        let low = EfficiencyPair::new(0.72f64, 0.72).unwrap();
        let opt = maximize_bell(Scheme::Parity, 0.15, &low).unwrap();
        assert_eq!(opt.regime, Regime::ParityRegionI, "value {}", opt.value);
    }

    #[test]
    fn threshold_query_validation() {
        let bad = ThresholdQuery {
            scheme: Scheme::OnOff,
            mode: ThresholdMode::<f64>::SymmetricEta,
            alpha_range: (0.0, 3.5),
            tol: 0.01,
        };
        assert!(bad.validate().is_err());
    }
}
