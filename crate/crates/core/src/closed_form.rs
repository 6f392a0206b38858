//! Analytic expectation values and Bell functions for the hybrid state under
//! on/off and parity measurements, with and without detector loss.
//!
//! These are the fast evaluation path used by the optimizer; the Fock oracle
//! in [`crate::fock`] recomputes the same quantities by brute force.

use crate::scalar::Scalar;
use crate::types::{
    DisplacementSetting, EfficiencyPair, HybridParams, MeasurementSettings, QubitSetting, Scheme,
};

/// e^{-x} * sinh(y), evaluated as (e^{y-x} - e^{-y-x})/2 so that large-|alpha|
/// scans never overflow (the physical arguments always satisfy |y| <= x).
#[inline]
pub(crate) fn exp_sinh<S: Scalar>(x: S, y: S) -> S {
    let half = S::of(0.5);
    half * ((y - x).exp() - (-y - x).exp())
}

/// e^{-x} * cosh(y), same log-space evaluation as [`exp_sinh`].
#[inline]
pub(crate) fn exp_cosh<S: Scalar>(x: S, y: S) -> S {
    let half = S::of(0.5);
    half * ((y - x).exp() + (-y - x).exp())
}

/// Joint term <O_A x O_B,eff> for the given scheme and field efficiency.
fn joint_term<S: Scalar>(
    scheme: Scheme,
    alpha: S,
    xi: &QubitSetting<S>,
    beta: &DisplacementSetting<S>,
    eta_b: S,
) -> S {
    let two = S::of(2.0);
    let (theta, phi) = (xi.theta(), xi.phi());
    let (b, cap_phi) = (beta.magnitude(), beta.phase());
    let a2 = alpha * alpha;
    let b2 = b * b;
    match scheme {
        Scheme::OnOff => {
            let x = eta_b * (a2 + b2);
            let y = two * eta_b * alpha * b;
            two * theta.cos() * exp_sinh(x, y * cap_phi.cos())
                + two
                    * theta.sin()
                    * (-(two - eta_b) * a2 - eta_b * b2).exp()
                    * (y * cap_phi.sin() - phi).cos()
                - theta.sin() * (-two * a2).exp() * phi.cos()
        }
        Scheme::Parity => {
            let x = two * eta_b * (a2 + b2);
            let y = S::of(4.0) * eta_b * alpha * b;
            theta.cos() * exp_sinh(x, y * cap_phi.cos())
                + theta.sin()
                    * (-two * (S::one() - eta_b) * a2 - two * eta_b * b2).exp()
                    * (y * cap_phi.sin() - phi).cos()
        }
    }
}

/// Marginal term Tr_B[O_B,eff rho_B]; independent of the qubit setting.
fn marginal_term<S: Scalar>(
    scheme: Scheme,
    alpha: S,
    beta: &DisplacementSetting<S>,
    eta_b: S,
) -> S {
    let two = S::of(2.0);
    let (b, cap_phi) = (beta.magnitude(), beta.phase());
    let a2 = alpha * alpha;
    let b2 = b * b;
    match scheme {
        Scheme::OnOff => {
            let x = eta_b * (a2 + b2);
            let y = two * eta_b * alpha * b * cap_phi.cos();
            two * exp_cosh(x, y) - S::one()
        }
        Scheme::Parity => {
            let x = two * eta_b * (a2 + b2);
            let y = S::of(4.0) * eta_b * alpha * b * cap_phi.cos();
            exp_cosh(x, y)
        }
    }
}

/// Expectation value of the joint measurement with perfect detectors.
pub fn expectation_ideal<S: Scalar>(
    scheme: Scheme,
    alpha: S,
    xi: &QubitSetting<S>,
    beta: &DisplacementSetting<S>,
) -> S {
    joint_term(scheme, alpha, xi, beta, S::one())
}

/// Expectation value with detector efficiencies (eta_A, eta_B), counting a
/// missing polarization detection as the +1 outcome.
pub fn expectation_effective<S: Scalar>(
    scheme: Scheme,
    alpha: S,
    xi: &QubitSetting<S>,
    beta: &DisplacementSetting<S>,
    effs: &EfficiencyPair<S>,
) -> S {
    let eta_a = effs.eta_a();
    eta_a * joint_term(scheme, alpha, xi, beta, effs.eta_b())
        + (S::one() - eta_a) * marginal_term(scheme, alpha, beta, effs.eta_b())
}

/// CHSH combination E(xi1,b1) + E(xi1,b2) + E(xi2,b2) - E(xi2,b1).
pub fn bell_value<S: Scalar>(
    params: &HybridParams<S>,
    settings: &MeasurementSettings<S>,
    effs: &EfficiencyPair<S>,
) -> S {
    let alpha = params.alpha();
    let e = |xi: &QubitSetting<S>, beta: &DisplacementSetting<S>| {
        expectation_effective(settings.scheme, alpha, xi, beta, effs)
    };
    e(&settings.xi1, &settings.beta1) + e(&settings.xi1, &settings.beta2)
        + e(&settings.xi2, &settings.beta2)
        - e(&settings.xi2, &settings.beta1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn qs(theta: f64, phi: f64) -> QubitSetting<f64> {
        QubitSetting::new(theta, phi)
    }

    fn ds(mag: f64, phase: f64) -> DisplacementSetting<f64> {
        DisplacementSetting::new(mag, phase)
    }

    #[test]
    fn ideal_onoff_at_origin_is_one() {
        let e = expectation_ideal(Scheme::OnOff, 0.0, &qs(FRAC_PI_2, 0.0), &ds(0.0, 0.0));
        assert!((e - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ideal_parity_vanishes_at_theta_zero_beta_zero() {
        for phi in [0.0, 1.0, 4.0] {
            let e = expectation_ideal(Scheme::Parity, 0.7, &qs(0.0, phi), &ds(0.0, 0.0));
            assert!(e.abs() < 1e-14);
        }
    }

    #[test]
    fn ideal_parity_unit_correlation_at_beta_zero() {
        for alpha in [0.0, 0.4, 1.3, 2.0] {
            let e = expectation_ideal(Scheme::Parity, alpha, &qs(FRAC_PI_2, 0.0), &ds(0.0, 0.0));
            assert!((e - 1.0).abs() < 1e-14, "alpha={alpha}: {e}");
        }
    }

    #[test]
    fn marginal_only_closed_forms_at_beta_zero() {
        for (alpha, eta_b) in [(0.3, 0.6), (1.1, 0.85), (2.0, 1.0)] {
            let effs = EfficiencyPair::new(0.0, eta_b).unwrap();
            let xi = qs(1.0, 0.3);
            let beta = ds(0.0, 0.0);
            let onoff = expectation_effective(Scheme::OnOff, alpha, &xi, &beta, &effs);
            let parity = expectation_effective(Scheme::Parity, alpha, &xi, &beta, &effs);
            assert!((onoff - (2.0 * (-eta_b * alpha * alpha).exp() - 1.0)).abs() < 1e-14);
            assert!((parity - (-2.0 * eta_b * alpha * alpha).exp()).abs() < 1e-14);
        }
    }

    // Known optimal on/off settings: xi1 = -pi/4, xi2 = 0, beta1 = -beta2 real.
    #[test]
    fn onoff_landmark_bell_value() {
        let params = HybridParams::new(0.664).unwrap();
        let settings = MeasurementSettings {
            xi1: qs(FRAC_PI_2, 0.0),
            xi2: qs(0.0, 0.0),
            beta1: ds(0.478, PI),
            beta2: ds(0.478, 0.0),
            scheme: Scheme::OnOff,
        };
        let b = bell_value(&params, &settings, &EfficiencyPair::perfect());
        assert!((b - 2.61).abs() < 0.005, "B = {b}");
    }

    // Known optimal parity settings: xi1 = -pi/4, xi2 = i pi/4, beta1 = -beta2 = -i 0.0924.
    #[test]
    fn parity_landmark_bell_value() {
        let params = HybridParams::new(2.0).unwrap();
        let settings = MeasurementSettings {
            xi1: qs(FRAC_PI_2, 0.0),
            xi2: qs(FRAC_PI_2, FRAC_PI_2),
            beta1: DisplacementSetting::from_signed_imag(-0.0924),
            beta2: DisplacementSetting::from_signed_imag(0.0924),
            scheme: Scheme::Parity,
        };
        let b = bell_value(&params, &settings, &EfficiencyPair::perfect());
        assert!((b - 2.778).abs() < 0.005, "B = {b}");
    }

    #[test]
    fn degenerate_settings_bound_by_two() {
        let params = HybridParams::new(0.9).unwrap();
        for scheme in [Scheme::OnOff, Scheme::Parity] {
            let settings = MeasurementSettings {
                xi1: qs(1.2, 0.4),
                xi2: qs(1.2, 0.4),
                beta1: ds(0.5, 1.0),
                beta2: ds(0.5, 1.0),
                scheme,
            };
            let b = bell_value(
                &params,
                &settings,
                &EfficiencyPair::new(0.8, 0.9).unwrap(),
            );
            assert!(b.abs() <= 2.0 + 1e-12);
        }
    }

    #[test]
    fn large_amplitude_does_not_overflow() {
        let xi = qs(1.0, 0.5);
        let beta = ds(30.0, 0.0);
        for scheme in [Scheme::OnOff, Scheme::Parity] {
            let e = expectation_ideal(scheme, 30.0, &xi, &beta);
            assert!(e.is_finite());
            assert!(e.abs() <= 1.0 + 1e-12);
        }
    }

    proptest::proptest! {
        #[test]
        fn effective_reduces_to_ideal_at_unit_efficiency(
            alpha in 0.0f64..2.0,
            theta in 0.0f64..PI,
            phi in 0.0f64..(2.0 * PI),
            mag in 0.0f64..2.0,
            phase in 0.0f64..(2.0 * PI),
            scheme in proptest::bool::ANY,
        ) {
            let scheme = if scheme { Scheme::OnOff } else { Scheme::Parity };
            let xi = qs(theta, phi);
            let beta = ds(mag, phase);
            let ideal = expectation_ideal(scheme, alpha, &xi, &beta);
            let eff = expectation_effective(scheme, alpha, &xi, &beta, &EfficiencyPair::perfect());
            proptest::prop_assert!((ideal - eff).abs() < 1e-12);
            proptest::prop_assert!(ideal.abs() <= 1.0 + 1e-12);
        }

        #[test]
        fn affine_in_eta_a(
            alpha in 0.0f64..2.0,
            theta in 0.0f64..PI,
            phi in 0.0f64..(2.0 * PI),
            mag in 0.0f64..2.0,
            phase in 0.0f64..(2.0 * PI),
            eta_a in 0.0f64..1.0,
            eta_b in 0.0f64..1.0,
        ) {
            let xi = qs(theta, phi);
            let beta = ds(mag, phase);
            for scheme in [Scheme::OnOff, Scheme::Parity] {
                let at = |ea: f64| {
                    expectation_effective(
                        scheme, alpha, &xi, &beta,
                        &EfficiencyPair::new(ea, eta_b).unwrap(),
                    )
                };
                let lhs = at(eta_a);
                let rhs = eta_a * at(1.0) + (1.0 - eta_a) * at(0.0);
                proptest::prop_assert!((lhs - rhs).abs() < 1e-12);
            }
        }

        #[test]
        fn bell_value_respects_cirelson(
            alpha in 0.0f64..2.0,
            t1 in 0.0f64..PI, p1 in 0.0f64..(2.0 * PI),
            t2 in 0.0f64..PI, p2 in 0.0f64..(2.0 * PI),
            m1 in 0.0f64..2.0, q1 in 0.0f64..(2.0 * PI),
            m2 in 0.0f64..2.0, q2 in 0.0f64..(2.0 * PI),
            eta_a in 0.0f64..1.0,
            eta_b in 0.0f64..1.0,
        ) {
            let params = HybridParams::new(alpha).unwrap();
            let effs = EfficiencyPair::new(eta_a, eta_b).unwrap();
            for scheme in [Scheme::OnOff, Scheme::Parity] {
                let settings = MeasurementSettings {
                    xi1: qs(t1, p1),
                    xi2: qs(t2, p2),
                    beta1: ds(m1, q1),
                    beta2: ds(m2, q2),
                    scheme,
                };
                let b = bell_value(&params, &settings, &effs);
                proptest::prop_assert!(b.abs() <= 2.0 * 2.0f64.sqrt() + 1e-9);
            }
        }
    }
}
