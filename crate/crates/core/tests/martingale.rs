use cascade_core::brw::{equivalence_check, simulate_trajectories, MartingaleTrajectory};
use cascade_core::sim::ks_statistic;
use cascade_core::{run_recursion, Quadrature, RecursionConfig};

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

fn survivors_at(trajs: &[MartingaleTrajectory], n: usize) -> Vec<f64> {
    trajs.iter().filter(|t| !t.truncated && t.generation_sizes[n] > 0).map(|t| t.values[n]).collect()
}

/// Doubling the displacement cutoff leaves the law of D_n unchanged within
/// Monte Carlo error. The population grows like ((v_max + 1)/e)^n, so this
/// runs at n = 3 rather than deeper generations.
#[test]
fn displacement_cutoff_is_negligible() {
    let n = 3;
    let trials = 3_000;
    let a = simulate_trajectories(n, trials, 20.0, 2_000_000, 1).unwrap();
    let b = simulate_trajectories(n, trials, 40.0, 2_000_000, 2).unwrap();
    let (da, db) = (survivors_at(&a, n), survivors_at(&b, n));
    assert!(da.len() > trials * 99 / 100);
    assert!(db.len() > trials * 99 / 100);
    let ks = ks_statistic(&da, &db);
    let crit = cascade_core::sim::ks_critical_value(da.len(), db.len(), 0.01);
    assert!(ks < crit, "ks {ks} vs {crit}");
}

/// Median of D_n over surviving trees stabilises between n = 40 and n = 80.
/// Without pruning the population at generation 40 is about 7.7^40
/// particles, so every trial hits any feasible particle cap.
#[test]
#[ignore = "needs ~7.7^80 particles per tree; not computable by direct simulation"]
fn derivative_martingale_median_stabilises() {
    let trials = 10_000;
    let t = simulate_trajectories(80, trials, 20.0, 10_000_000, 3).unwrap();
    let d40 = survivors_at(&t, 40);
    let d80 = survivors_at(&t, 80);
    assert!(!d40.is_empty() && !d80.is_empty(), "every trajectory was truncated");
    let (m40, m80) = (median(d40), median(d80));
    assert!((m40 - m80).abs() < 0.1 * m80);
}

#[test]
fn limit_probe_tails() {
    let c = RecursionConfig::for_horizon(0.001, 200, Quadrature::Trapezoid).unwrap();
    let r = run_recursion(&c, &[99, 149, 199]).unwrap();
    let z: Vec<f64> = (-8..=8).map(|k| k as f64).collect();
    let table = equivalence_check(&r, &z, &[100, 150, 200]).unwrap();
    for n_idx in 0..3 {
        let col: Vec<f64> = table.rows.iter().map(|row| row.values[n_idx].1).collect();
        assert!(col.windows(2).all(|w| w[1] <= w[0]), "not monotone in z");
        assert!(col[0] > 0.999);
        assert!(*col.last().unwrap() < 1e-3);
    }
}
