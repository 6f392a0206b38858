//! Domain types shared by the closed forms, the Fock oracle and the optimizer.

use crate::error::{BellError, Result};
use crate::scalar::Scalar;

/// Dichotomic measurement applied to the coherent-field mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Vacuum (+1) vs. any photons (-1).
    OnOff,
    /// Even (+1) vs. odd (-1) photon number.
    Parity,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::OnOff => "onoff",
            Scheme::Parity => "parity",
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Qubit-side unitary setting, xi = -(theta/2) e^{-i phi}.
///
/// Stored canonically with `theta` in `[0, pi]` and `phi` in `[0, 2 pi)`; any
/// real pair is accepted and folded onto an equivalent canonical one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitSetting<S> {
    theta: S,
    phi: S,
}

impl<S: Scalar> QubitSetting<S> {
    pub fn new(theta: S, phi: S) -> Self {
        let two_pi = S::TAU();
        let mut theta = theta % two_pi;
        if theta < S::zero() {
            theta = theta + two_pi;
        }
        let mut phi = phi;
        if theta > S::PI() {
            // (theta, phi) and (2 pi - theta, phi + pi) give the same observable
            theta = two_pi - theta;
            phi = phi + S::PI();
        }
        let mut phi = phi % two_pi;
        if phi < S::zero() {
            phi = phi + two_pi;
        }
        Self { theta, phi }
    }

    pub fn theta(&self) -> S {
        self.theta
    }

    pub fn phi(&self) -> S {
        self.phi
    }
}

/// Field-side displacement setting, beta = |beta| e^{i Phi}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacementSetting<S> {
    magnitude: S,
    phase: S,
}

impl<S: Scalar> DisplacementSetting<S> {
    pub fn new(magnitude: S, phase: S) -> Self {
        let (mut magnitude, mut phase) = (magnitude, phase);
        if magnitude < S::zero() {
            magnitude = -magnitude;
            phase = phase + S::PI();
        }
        let two_pi = S::TAU();
        phase = phase % two_pi;
        if phase < S::zero() {
            phase = phase + two_pi;
        }
        Self { magnitude, phase }
    }

    /// Real displacement: phase 0 for `b >= 0`, pi otherwise.
    pub fn from_signed_real(b: S) -> Self {
        Self::new(b, S::zero())
    }

    /// Pure-imaginary displacement i*b: phase pi/2 for `b >= 0`, 3 pi/2 otherwise.
    pub fn from_signed_imag(b: S) -> Self {
        Self::new(b, S::FRAC_PI_2())
    }

    pub fn magnitude(&self) -> S {
        self.magnitude
    }

    pub fn phase(&self) -> S {
        self.phase
    }
}

/// Detector efficiencies for the polarization (A) and coherent-field (B) sides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyPair<S> {
    eta_a: S,
    eta_b: S,
}

impl<S: Scalar> EfficiencyPair<S> {
    pub fn new(eta_a: S, eta_b: S) -> Result<Self> {
        for (label, eta) in [("eta_A", eta_a), ("eta_B", eta_b)] {
            if !(eta >= S::zero() && eta <= S::one()) {
                return Err(BellError::InvalidArgument(format!(
                    "{label} = {eta} outside [0, 1]"
                )));
            }
        }
        Ok(Self { eta_a, eta_b })
    }

    pub fn perfect() -> Self {
        Self {
            eta_a: S::one(),
            eta_b: S::one(),
        }
    }

    pub fn symmetric(eta: S) -> Result<Self> {
        Self::new(eta, eta)
    }

    pub fn eta_a(&self) -> S {
        self.eta_a
    }

    pub fn eta_b(&self) -> S {
        self.eta_b
    }
}

/// The four local settings of a CHSH run plus the field measurement scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSettings<S> {
    pub xi1: QubitSetting<S>,
    pub xi2: QubitSetting<S>,
    pub beta1: DisplacementSetting<S>,
    pub beta2: DisplacementSetting<S>,
    pub scheme: Scheme,
}

/// Shared-state parameter: the coherent amplitude, taken real and nonnegative
/// (its phase can be absorbed into the displacement phases).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridParams<S> {
    alpha: S,
}

impl<S: Scalar> HybridParams<S> {
    pub fn new(alpha: S) -> Result<Self> {
        if !(alpha >= S::zero()) {
            return Err(BellError::InvalidArgument(format!(
                "alpha = {alpha} must be nonnegative"
            )));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> S {
        self.alpha
    }
}
