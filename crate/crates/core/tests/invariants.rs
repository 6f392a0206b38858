//! Cross-cutting optimizer invariants that are too slow for unit tests:
//! monotonicity of the amplitude-optimized maximum in the symmetric
//! efficiency, and a full-parameter check that the restricted on/off
//! parameterization loses nothing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hybrid_bell_core::closed_form::bell_value;
use hybrid_bell_core::optimize::{
    maximize_bell, maximize_over_alpha, nelder_mead_maximize, NelderMeadOptions,
};
use hybrid_bell_core::{
    DisplacementSetting, EfficiencyPair, HybridParams, MeasurementSettings, QubitSetting, Scheme,
};

#[test]
fn alpha_optimized_maximum_is_monotone_in_symmetric_eta() {
    for scheme in [Scheme::OnOff, Scheme::Parity] {
        let mut prev = f64::NEG_INFINITY;
        for i in 0..30 {
            let eta = 0.68 + (1.0 - 0.68) * i as f64 / 29.0;
            let effs = EfficiencyPair::symmetric(eta).unwrap();
            let (_, opt) = maximize_over_alpha(scheme, &effs, (1e-3, 3.0)).unwrap();
            assert!(
                opt.value >= prev - 1e-6,
                "{scheme}: B_max decreased at eta = {eta}: {} < {prev}",
                opt.value
            );
            prev = opt.value;
        }
    }
}

/// Map a free 8-parameter point (angles unrestricted, signed displacement
/// magnitudes) onto general measurement settings.
fn settings_from(p: &[f64], scheme: Scheme) -> MeasurementSettings<f64> {
    let displacement = |mag: f64, phase: f64| {
        if mag < 0.0 {
            DisplacementSetting::new(-mag, phase + std::f64::consts::PI)
        } else {
            DisplacementSetting::new(mag, phase)
        }
    };
    MeasurementSettings {
        xi1: QubitSetting::new(p[0], p[1]),
        xi2: QubitSetting::new(p[2], p[3]),
        beta1: displacement(p[4], p[5]),
        beta2: displacement(p[6], p[7]),
        scheme,
    }
}

#[test]
fn onoff_real_parameterization_is_not_improved_by_free_phases() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let opts = NelderMeadOptions {
        max_evals: 4000,
        ..Default::default()
    };
    for _ in 0..20 {
        let alpha = rng.gen_range(0.1..1.2);
        let effs = EfficiencyPair::new(rng.gen_range(0.5..=1.0), rng.gen_range(0.5..=1.0)).unwrap();
        let params = HybridParams::new(alpha).unwrap();
        let restricted = maximize_bell(Scheme::OnOff, alpha, &effs).unwrap();

        let objective = |p: &[f64]| {
            let settings = settings_from(p, Scheme::OnOff);
            bell_value(&params, &settings, &effs)
        };
        // seed the free search at the restricted optimum and at phase-kicked
        // copies of it
        let s = &restricted.settings;
        let base = [
            s.xi1.theta(),
            s.xi1.phi(),
            s.xi2.theta(),
            s.xi2.phi(),
            s.beta1.magnitude(),
            s.beta1.phase(),
            s.beta2.magnitude(),
            s.beta2.phase(),
        ];
        let mut best = restricted.value;
        for kick in [0.0, 0.3, -0.7] {
            let mut x0 = base;
            x0[1] += kick;
            x0[3] -= kick;
            x0[5] += 0.5 * kick;
            x0[7] -= 0.5 * kick;
            let res = nelder_mead_maximize(&objective, &x0, &[0.1; 8], &opts);
            best = best.max(res.value);
        }
        assert!(
            best <= restricted.value + 1e-6,
            "free-phase search improved on/off optimum at alpha = {alpha}, \
             eta = ({}, {}): {best} > {}",
            effs.eta_a(),
            effs.eta_b(),
            restricted.value
        );
    }
}
