//! Regime-restricted Bell functions and their stationarity systems.
//!
//! On/off optima live in a real parameterization (theta1, theta2, b1, b2)
//! with signed real displacements; parity optima use either the same real
//! parameterization (region I, low efficiency) or fixed theta = pi/2 with
//! pure-imaginary displacements parameterized by (phi1, phi2, b1, b2)
//! (region II, high efficiency). Residuals are the analytic partial
//! derivatives of the Bell function in the regime's own coordinates,
//! written without divisions so no cosine in a denominator can blow up.

use crate::closed_form::{exp_cosh, exp_sinh};
use crate::error::{BellError, Result};
use crate::scalar::Scalar;
use crate::types::{
    DisplacementSetting, EfficiencyPair, MeasurementSettings, QubitSetting, Scheme,
};

/// Which optimizing parameterization produced (or applies to) a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// Real xi and beta, on/off scheme.
    OnOffReal,
    /// Real xi and beta, parity scheme (low efficiencies).
    ParityRegionI,
    /// |xi| = pi/4 with free phases, pure-imaginary beta (high efficiencies).
    ParityRegionII,
    /// No structured parameterization claimed.
    General,
    /// alpha = 0 or fully blind detectors; Bell value is exactly 2.
    Degenerate,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::OnOffReal => "onoff-real",
            Regime::ParityRegionI => "parity-region-i",
            Regime::ParityRegionII => "parity-region-ii",
            Regime::General => "general",
            Regime::Degenerate => "degenerate",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Joint term, its partials, and the marginal for the real-parameter regimes.
/// `b` is a signed real displacement.
struct RealScheme<S> {
    eta_b: S,
    alpha: S,
    scheme: Scheme,
}

impl<S: Scalar> RealScheme<S> {
    fn new(scheme: Scheme, alpha: S, eta_b: S) -> Self {
        Self {
            eta_b,
            alpha,
            scheme,
        }
    }

    // On/off: J = 2 cos(t) f(b) + sin(t) (2 g(b) - e0)
    //   f(b) = e^{-eta (a^2+b^2)} sinh(2 eta a b)
    //   g(b) = e^{-(2-eta) a^2 - eta b^2}
    //   M(b) = 2 e^{-eta (a^2+b^2)} cosh(2 eta a b) - 1
    // Parity: J = cos(t) F(b) + sin(t) G(b)
    //   F(b) = e^{-2 eta (a^2+b^2)} sinh(4 eta a b)
    //   G(b) = e^{-2(1-eta) a^2 - 2 eta b^2}
    //   M(b) = e^{-2 eta (a^2+b^2)} cosh(4 eta a b)

    fn joint(&self, theta: S, b: S) -> S {
        let (a, eta) = (self.alpha, self.eta_b);
        let two = S::of(2.0);
        match self.scheme {
            Scheme::OnOff => {
                let f = exp_sinh(eta * (a * a + b * b), two * eta * a * b);
                let g = (-(two - eta) * a * a - eta * b * b).exp();
                let e0 = (-two * a * a).exp();
                two * theta.cos() * f + theta.sin() * (two * g - e0)
            }
            Scheme::Parity => {
                let f = exp_sinh(two * eta * (a * a + b * b), S::of(4.0) * eta * a * b);
                let g = (-two * (S::one() - eta) * a * a - two * eta * b * b).exp();
                theta.cos() * f + theta.sin() * g
            }
        }
    }

    fn joint_dtheta(&self, theta: S, b: S) -> S {
        let (a, eta) = (self.alpha, self.eta_b);
        let two = S::of(2.0);
        match self.scheme {
            Scheme::OnOff => {
                let f = exp_sinh(eta * (a * a + b * b), two * eta * a * b);
                let g = (-(two - eta) * a * a - eta * b * b).exp();
                let e0 = (-two * a * a).exp();
                -two * theta.sin() * f + theta.cos() * (two * g - e0)
            }
            Scheme::Parity => {
                let f = exp_sinh(two * eta * (a * a + b * b), S::of(4.0) * eta * a * b);
                let g = (-two * (S::one() - eta) * a * a - two * eta * b * b).exp();
                -theta.sin() * f + theta.cos() * g
            }
        }
    }

    fn joint_db(&self, theta: S, b: S) -> S {
        let (a, eta) = (self.alpha, self.eta_b);
        let two = S::of(2.0);
        match self.scheme {
            Scheme::OnOff => {
                let x = eta * (a * a + b * b);
                let y = two * eta * a * b;
                let fp = two * eta * (a * exp_cosh(x, y) - b * exp_sinh(x, y));
                let g = (-(two - eta) * a * a - eta * b * b).exp();
                let gp = -two * eta * b * g;
                two * theta.cos() * fp + two * theta.sin() * gp
            }
            Scheme::Parity => {
                let x = two * eta * (a * a + b * b);
                let y = S::of(4.0) * eta * a * b;
                let fp = S::of(4.0) * eta * (a * exp_cosh(x, y) - b * exp_sinh(x, y));
                let g = (-two * (S::one() - eta) * a * a - two * eta * b * b).exp();
                let gp = -S::of(4.0) * eta * b * g;
                theta.cos() * fp + theta.sin() * gp
            }
        }
    }

    fn marginal(&self, b: S) -> S {
        let (a, eta) = (self.alpha, self.eta_b);
        let two = S::of(2.0);
        match self.scheme {
            Scheme::OnOff => {
                two * exp_cosh(eta * (a * a + b * b), two * eta * a * b) - S::one()
            }
            Scheme::Parity => exp_cosh(two * eta * (a * a + b * b), S::of(4.0) * eta * a * b),
        }
    }

    fn marginal_db(&self, b: S) -> S {
        let (a, eta) = (self.alpha, self.eta_b);
        let two = S::of(2.0);
        match self.scheme {
            Scheme::OnOff => {
                let x = eta * (a * a + b * b);
                let y = two * eta * a * b;
                S::of(4.0) * eta * (a * exp_sinh(x, y) - b * exp_cosh(x, y))
            }
            Scheme::Parity => {
                let x = two * eta * (a * a + b * b);
                let y = S::of(4.0) * eta * a * b;
                S::of(4.0) * eta * (a * exp_sinh(x, y) - b * exp_cosh(x, y))
            }
        }
    }
}

/// Region II pieces: theta fixed at pi/2, displacement i*b, free qubit phases.
/// J(phi, b) = K(b) cos(4 eta a b - phi), K(b) = e^{-2(1-eta) a^2 - 2 eta b^2},
/// M(b) = e^{-2 eta (a^2 + b^2)}.
struct ImagParity<S> {
    eta_b: S,
    alpha: S,
}

impl<S: Scalar> ImagParity<S> {
    fn k(&self, b: S) -> S {
        let (a, eta) = (self.alpha, self.eta_b);
        let two = S::of(2.0);
        (-two * (S::one() - eta) * a * a - two * eta * b * b).exp()
    }

    fn joint(&self, phi: S, b: S) -> S {
        let arg = S::of(4.0) * self.eta_b * self.alpha * b - phi;
        self.k(b) * arg.cos()
    }

    fn joint_dphi(&self, phi: S, b: S) -> S {
        let arg = S::of(4.0) * self.eta_b * self.alpha * b - phi;
        self.k(b) * arg.sin()
    }

    fn joint_db(&self, phi: S, b: S) -> S {
        let (a, eta) = (self.alpha, self.eta_b);
        let four = S::of(4.0);
        let arg = four * eta * a * b - phi;
        let k = self.k(b);
        -four * eta * b * k * arg.cos() - four * eta * a * k * arg.sin()
    }

    fn marginal(&self, b: S) -> S {
        let (a, eta) = (self.alpha, self.eta_b);
        (-S::of(2.0) * eta * (a * a + b * b)).exp()
    }

    fn marginal_db(&self, b: S) -> S {
        -S::of(4.0) * self.eta_b * b * self.marginal(b)
    }
}

fn check_regime(scheme: Scheme, regime: Regime) -> Result<()> {
    let ok = matches!(
        (scheme, regime),
        (Scheme::OnOff, Regime::OnOffReal)
            | (Scheme::Parity, Regime::ParityRegionI)
            | (Scheme::Parity, Regime::ParityRegionII)
    );
    if ok {
        Ok(())
    } else {
        Err(BellError::RegimeMismatch {
            regime: regime.name().to_string(),
            scheme: scheme.name().to_string(),
        })
    }
}

/// Bell function in the regime's own coordinates.
///
/// Real regimes: params = (theta1, theta2, b1, b2). Region II:
/// params = (phi1, phi2, b1, b2) with displacement i*b.
pub fn regime_bell<S: Scalar>(
    scheme: Scheme,
    regime: Regime,
    params: &[S; 4],
    alpha: S,
    effs: &EfficiencyPair<S>,
) -> Result<S> {
    check_regime(scheme, regime)?;
    let [x1, x2, b1, b2] = *params;
    let eta_a = effs.eta_a();
    let one_m = S::one() - eta_a;
    Ok(match regime {
        Regime::ParityRegionII => {
            let m = ImagParity {
                eta_b: effs.eta_b(),
                alpha,
            };
            let e = |phi: S, b: S| eta_a * m.joint(phi, b) + one_m * m.marginal(b);
            e(x1, b1) + e(x1, b2) + e(x2, b2) - e(x2, b1)
        }
        _ => {
            let m = RealScheme::new(scheme, alpha, effs.eta_b());
            let e = |theta: S, b: S| eta_a * m.joint(theta, b) + one_m * m.marginal(b);
            e(x1, b1) + e(x1, b2) + e(x2, b2) - e(x2, b1)
        }
    })
}

/// Residuals of the regime's 4-equation stationarity system: the gradient of
/// [`regime_bell`] with respect to the regime parameters.
pub fn stationarity_residuals<S: Scalar>(
    scheme: Scheme,
    regime: Regime,
    params: &[S; 4],
    alpha: S,
    effs: &EfficiencyPair<S>,
) -> Result<[S; 4]> {
    check_regime(scheme, regime)?;
    let [x1, x2, b1, b2] = *params;
    let eta_a = effs.eta_a();
    let one_m = S::one() - eta_a;
    Ok(match regime {
        Regime::ParityRegionII => {
            let m = ImagParity {
                eta_b: effs.eta_b(),
                alpha,
            };
            [
                eta_a * (m.joint_dphi(x1, b1) + m.joint_dphi(x1, b2)),
                eta_a * (m.joint_dphi(x2, b2) - m.joint_dphi(x2, b1)),
                eta_a * (m.joint_db(x1, b1) - m.joint_db(x2, b1)),
                eta_a * (m.joint_db(x1, b2) + m.joint_db(x2, b2))
                    + S::of(2.0) * one_m * m.marginal_db(b2),
            ]
        }
        _ => {
            let m = RealScheme::new(scheme, alpha, effs.eta_b());
            [
                eta_a * (m.joint_dtheta(x1, b1) + m.joint_dtheta(x1, b2)),
                eta_a * (m.joint_dtheta(x2, b2) - m.joint_dtheta(x2, b1)),
                eta_a * (m.joint_db(x1, b1) - m.joint_db(x2, b1)),
                eta_a * (m.joint_db(x1, b2) + m.joint_db(x2, b2))
                    + S::of(2.0) * one_m * m.marginal_db(b2),
            ]
        }
    })
}

/// Euclidean norm of a residual vector.
pub fn residual_norm<S: Scalar>(r: &[S; 4]) -> S {
    r.iter().map(|v| *v * *v).sum::<S>().sqrt()
}

/// Translate regime coordinates into general measurement settings.
pub fn regime_to_settings<S: Scalar>(
    scheme: Scheme,
    regime: Regime,
    params: &[S; 4],
) -> MeasurementSettings<S> {
    let [x1, x2, b1, b2] = *params;
    match regime {
        Regime::ParityRegionII => MeasurementSettings {
            xi1: QubitSetting::new(S::FRAC_PI_2(), x1),
            xi2: QubitSetting::new(S::FRAC_PI_2(), x2),
            beta1: DisplacementSetting::from_signed_imag(b1),
            beta2: DisplacementSetting::from_signed_imag(b2),
            scheme,
        },
        _ => MeasurementSettings {
            xi1: QubitSetting::new(x1, S::zero()),
            xi2: QubitSetting::new(x2, S::zero()),
            beta1: DisplacementSetting::from_signed_real(b1),
            beta2: DisplacementSetting::from_signed_real(b2),
            scheme,
        },
    }
}
