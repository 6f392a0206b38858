//! Bell-CHSH values for hybrid entanglement between a polarization qubit and
//! a coherent-state field under imperfect photodetection.
//!
//! The crate has three layers:
//!
//! * [`closed_form`] — analytic expectation values and Bell functions, the
//!   fast path;
//! * [`fock`] — a truncated-Fock-space oracle that recomputes everything by
//!   brute force, used to cross-validate the closed forms;
//! * [`optimize`] — root solvers for the known optimality conditions, a
//!   multi-start simplex maximizer with stationarity polishing, amplitude
//!   scans, and efficiency-threshold searches.
//!
//! All numerics are generic over the scalar type via [`scalar::Scalar`]
//! (`f32` or `f64`); the `*64` aliases below are the concrete types most
//! callers want.

pub mod closed_form;
pub mod error;
pub mod fock;
pub mod optimize;
pub mod scalar;
pub mod types;

pub use error::{BellError, Result};
pub use scalar::Scalar;
pub use types::{
    DisplacementSetting, EfficiencyPair, HybridParams, MeasurementSettings, QubitSetting, Scheme,
};

/// Default scalar for concrete use.
pub type Real = f64;

pub type QubitSetting64 = QubitSetting<f64>;
pub type DisplacementSetting64 = DisplacementSetting<f64>;
pub type EfficiencyPair64 = EfficiencyPair<f64>;
pub type MeasurementSettings64 = MeasurementSettings<f64>;
pub type HybridParams64 = HybridParams<f64>;
pub type BellOptimum64 = optimize::BellOptimum<f64>;
