//! Reference values computed independently at 40-digit precision and frozen.

use std::f64::consts::PI;

use approx::assert_relative_eq;
use decoherence::kernel::coarse_grain;
use decoherence::propagator::{milburn_factor, propagator_factor, EvolutionMethod, FactorSource};
use decoherence::scenarios::oscillator::{oscillator_amplitude, OscillatorParams};
use decoherence::scenarios::rabi::RabiParams;
use decoherence::{KernelParams, C64};

// (ω, τ1, τ2, t, Re, Im) of (1 + iωτ1)^{-t/τ2}
const CLOSED_FORM: [(f64, f64, f64, f64, f64, f64); 4] = [
    (1.0, 1.0, 1.0, 2.5, -0.160_898_563_226_395_66, -0.388_443_493_507_509_33),
    (10.0, 1.0, 1.0, 0.5, 0.233_885_344_902_164_42, -0.211_663_328_096_754_89),
    (0.1, 0.5, 2.0, 7.0, 0.980_458_355_338_013_77, -0.173_206_257_176_113_47),
    (3.0, 0.2, 0.7, 1.3, 0.403_800_724_697_067_07, -0.633_940_746_514_405_13),
];

#[test]
fn closed_form_reference() {
    for (w, t1, t2, t, re, im) in CLOSED_FORM {
        let f = propagator_factor(w, &KernelParams::new(t1, t2).unwrap(), t);
        assert!((f - C64::new(re, im)).norm() < 1e-14, "ω={w}: {f}");
    }
}

#[test]
fn quadrature_reference() {
    for (w, t1, t2, t, re, im) in CLOSED_FORM {
        let k = KernelParams::new(t1, t2).unwrap();
        let q = coarse_grain(&k, t, |tp| C64::new(0.0, -w * tp).exp(), 1e-12).unwrap();
        assert!((q - C64::new(re, im)).norm() < 1e-11, "ω={w}: {q}");
        let src = FactorSource::new(EvolutionMethod::Quadrature { tol: 1e-12 }, &k, t).unwrap();
        assert_eq!(src.factor(w).unwrap().0, q);
    }
}

#[test]
fn milburn_reference() {
    let f = milburn_factor(2.0, &KernelParams::new(0.5, 1.0).unwrap(), 3.0);
    assert!((f - C64::new(-0.205_351_962_766_668_29, -0.145_730_040_702_926_04)).norm() < 1e-14);
}

#[test]
fn scenario_reference_values() {
    let rabi = RabiParams::new(1.0, 0, KernelParams::symmetric(0.05).unwrap()).unwrap();
    assert_relative_eq!(rabi.damping_rate(), 10.0 * 0.0025f64.ln_1p(), max_relative = 1e-15);
    assert_relative_eq!(rabi.damping_rate(), 0.024_968_801_985_871_990, max_relative = 1e-15);

    let osc = OscillatorParams::new(1.0, C64::new(0.6, 0.8), KernelParams::new(1.0, 1.0).unwrap()).unwrap();
    let traj = oscillator_amplitude(&osc, &[0.0, 2.0]).unwrap();
    assert_eq!(traj.values[0], C64::new(0.6, 0.8));
    assert_relative_eq!(traj.values[1].norm(), 0.5, max_relative = 1e-14);

    let frozen = propagator_factor(2.0 * PI, &KernelParams::new(1.0, 1.0).unwrap(), 1.0);
    assert_relative_eq!(frozen.norm(), (1.0 + 4.0 * PI * PI).powf(-0.5), max_relative = 1e-14);
}
