use std::f64::consts::E;

use cascade_core::front::{drift_rms, LOG_CORRECTION};
use cascade_core::{
    front_constancy_probe, log_correction_fit, richardson_velocity, run_recursion, velocity_estimate,
    FrontTrace, Quadrature, RecursionConfig,
};
use proptest::prelude::*;

fn all_generations(delta: f64, n_max: usize, q: Quadrature) -> cascade_core::RecursionResult {
    let c = RecursionConfig::for_horizon(delta, n_max, q).unwrap();
    let all: Vec<usize> = (0..=n_max).collect();
    run_recursion(&c, &all).unwrap()
}

#[test]
fn probe_flattens_at_published_alpha() {
    let r = all_generations(0.01, 100, Quadrature::RightRiemann);
    let s = front_constancy_probe(&r, 0.9855).unwrap();
    let last = s.last().unwrap().1;
    let dev = s.iter().filter(|(n, _)| *n >= 60).map(|(_, p)| (p - last).abs()).fold(0.0, f64::max);
    assert!(dev < 0.05, "{dev}");
}

#[test]
fn probe_flattens_at_fine_grid_alpha() {
    let r = all_generations(0.001, 100, Quadrature::RightRiemann);
    let s = front_constancy_probe(&r, 0.9977).unwrap();
    let last = s.last().unwrap().1;
    let dev = s.iter().filter(|(n, _)| *n >= 60).map(|(_, p)| (p - last).abs()).fold(0.0, f64::max);
    assert!(dev < 0.05, "{dev}");
}

#[test]
fn unscaled_probe_drifts_downward() {
    let r = all_generations(0.01, 100, Quadrature::RightRiemann);
    let flat = front_constancy_probe(&r, 0.9855).unwrap();
    let raw = front_constancy_probe(&r, 1.0).unwrap();
    // the probe outruns the slower discrete front, so P_{n-1} keeps falling
    let late: Vec<f64> = raw.iter().filter(|(n, _)| *n >= 30).map(|(_, p)| *p).collect();
    assert!(late.windows(2).all(|w| w[1] < w[0]));
    assert!(drift_rms(&raw) > 10.0 * drift_rms(&flat));
}

#[test]
fn log_coefficient_is_level_independent() {
    let c = RecursionConfig::for_horizon(0.01, 1200, Quadrature::Trapezoid).unwrap();
    let traces = FrontTrace::many_from_recursion(&c, &[0.25, 0.75]).unwrap();
    let b: Vec<f64> = traces
        .iter()
        .map(|t| {
            let v = richardson_velocity(t, 300).unwrap();
            log_correction_fit(t, (300, 1200), Some(v)).unwrap().b
        })
        .collect();
    assert!((b[0] - b[1]).abs() < 0.05 * LOG_CORRECTION, "{b:?}");
    // and the velocities agree with 1/e
    for t in &traces {
        assert!((richardson_velocity(t, 300).unwrap() * E - 1.0).abs() < 1e-3);
    }
}

proptest! {
    #[test]
    fn equal_gaps_give_exact_velocity(d in 0.01f64..2.0, x0 in -5.0f64..5.0, len in 10usize..200) {
        let t = FrontTrace::from_entries(0.5, (0..len).map(|n| (n, x0 + d * n as f64)).collect()).unwrap();
        let fit = velocity_estimate(&t, (0, len)).unwrap();
        prop_assert!((fit.v - d).abs() < 1e-12);
    }

    #[test]
    fn log_fit_recovers_its_own_model(v in 0.1f64..1.0, b in -1.0f64..1.0, a in -3.0f64..3.0, lo in 20usize..200) {
        let hi = 4 * lo;
        let t = FrontTrace::from_entries(
            0.5,
            (lo..=hi).map(|n| (n, v * n as f64 + b * (n as f64).ln() + a)).collect(),
        ).unwrap();
        let joint = log_correction_fit(&t, (lo, hi), None).unwrap();
        prop_assert!((joint.v - v).abs() < 1e-9);
        prop_assert!((joint.b - b).abs() < 1e-9);
        prop_assert!((joint.a - a).abs() < 1e-9);
        let fixed = log_correction_fit(&t, (lo, hi), Some(v)).unwrap();
        prop_assert!((fixed.b - b).abs() < 1e-9);
        prop_assert!((fixed.a - a).abs() < 1e-9);
    }
}
