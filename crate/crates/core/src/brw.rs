//! Boundary-case branching random walk behind the front asymptotics.
//!
//! Rescaling the killed Poisson process so that each particle has offspring
//! given by a Poisson point process of intensity `1/e` on `[-1, ∞)` puts the
//! walk in the boundary case `E[Σ e^{-V}] = 1`, `E[Σ V e^{-V}] = 0`. The
//! derivative martingale is `D_n = Σ_{|x| = n} V(x) e^{-V(x)}`.

use std::f64::consts::E;
use std::io::{self, Write};

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadrature::integrate;
use crate::recursion::{estimated_front, RecursionResult};
use crate::rng::{trial_rng, StreamDomain};
use crate::sum::NeumaierSum;

pub const DEFAULT_V_MAX: f64 = 20.0;

/// Offspring point process: intensity `1/e` on `[-1, v_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedOffspringLaw {
    v_max: f64,
}

impl NormalizedOffspringLaw {
    pub const INTENSITY: f64 = 1.0 / E;
    pub const SUPPORT_LO: f64 = -1.0;

    pub fn new(v_max: f64) -> Result<Self> {
        if !(v_max.is_finite() && v_max >= Self::SUPPORT_LO) {
            return Err(Error::Config(format!("v_max must be finite and >= -1, got {v_max}")));
        }
        Ok(Self { v_max })
    }

    pub fn v_max(&self) -> f64 {
        self.v_max
    }

    pub fn mean_offspring(&self) -> f64 {
        (self.v_max - Self::SUPPORT_LO) * Self::INTENSITY
    }

    /// Bound on the intensity-weighted mass `∫_{v_max}^∞ (1 + |y|) e^{-y} dy / e`
    /// dropped by the truncation, i.e. the per-parent bias in `E[Σ e^{-V}]`
    /// plus that in `E[Σ V e^{-V}]`.
    pub fn truncation_bound(&self) -> f64 {
        (-self.v_max).exp() * (self.v_max + 2.0)
    }

    pub fn sample_displacements<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mean = self.mean_offspring();
        if mean <= 0.0 {
            return Vec::new();
        }
        let k = Poisson::new(mean).expect("finite positive Poisson mean").sample(rng) as usize;
        let width = self.v_max - Self::SUPPORT_LO;
        (0..k).map(|_| Self::SUPPORT_LO + width * rng.random::<f64>()).collect()
    }
}

/// Child positions of a particle at `parent_position`.
pub fn sample_normalized_offspring<R: Rng + ?Sized>(parent_position: f64, rng: &mut R, v_max: f64) -> Vec<f64> {
    match NormalizedOffspringLaw::new(v_max) {
        Ok(law) => law.sample_displacements(rng).into_iter().map(|d| parent_position + d).collect(),
        Err(_) => Vec::new(),
    }
}

/// `Σ V e^{-V}` over the given positions.
pub fn derivative_martingale(positions: &[f64]) -> f64 {
    positions.iter().map(|&v| v * (-v).exp()).collect::<NeumaierSum>().value()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MartingaleTrajectory {
    /// `D_0 … D_k`; shorter than requested only when truncated.
    pub values: Vec<f64>,
    pub generation_sizes: Vec<usize>,
    pub survived: bool,
    pub truncated: bool,
}

/// One generation of the walk together with its streaming `D` value.
pub fn grow_generation<R: Rng + ?Sized>(
    parents: &[f64],
    law: &NormalizedOffspringLaw,
    particle_cap: usize,
    rng: &mut R,
) -> Option<(Vec<f64>, f64)> {
    let mut children = Vec::new();
    let mut d = NeumaierSum::new();
    for &p in parents {
        let offspring = law.sample_displacements(rng);
        if children.len() + offspring.len() > particle_cap {
            return None;
        }
        for disp in offspring {
            let v = p + disp;
            d.add(v * (-v).exp());
            children.push(v);
        }
    }
    Some((children, d.value()))
}

pub fn simulate_dn<R: Rng + ?Sized>(n: usize, rng: &mut R, v_max: f64, particle_cap: usize) -> Result<MartingaleTrajectory> {
    let law = NormalizedOffspringLaw::new(v_max)?;
    let mut particles = vec![0.0_f64];
    let mut values = vec![0.0];
    let mut generation_sizes = vec![1];
    for _ in 0..n {
        if particles.is_empty() {
            values.push(0.0);
            generation_sizes.push(0);
            continue;
        }
        match grow_generation(&particles, &law, particle_cap, rng) {
            None => {
                return Ok(MartingaleTrajectory { values, generation_sizes, survived: true, truncated: true });
            }
            Some((children, d)) => {
                particles = children;
                values.push(d);
                generation_sizes.push(particles.len());
            }
        }
    }
    Ok(MartingaleTrajectory { values, generation_sizes, survived: !particles.is_empty(), truncated: false })
}

/// Independent trajectories; trial `i` draws from its own stream.
pub fn simulate_trajectories(
    n: usize,
    trials: usize,
    v_max: f64,
    particle_cap: usize,
    seed: u64,
) -> Result<Vec<MartingaleTrajectory>> {
    (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, StreamDomain::Martingale, i);
            simulate_dn(n, &mut rng, v_max, particle_cap)
        })
        .collect()
}

/// CSV `trial,generation,D,alive_count,truncated`.
pub fn write_trajectories_csv<W: Write>(trajectories: &[MartingaleTrajectory], mut out: W) -> io::Result<()> {
    writeln!(out, "trial,generation,D,alive_count,truncated")?;
    for (trial, t) in trajectories.iter().enumerate() {
        for (g, (d, size)) in t.values.iter().zip(&t.generation_sizes).enumerate() {
            writeln!(out, "{trial},{g},{},{size},{}", crate::fmt_float(*d), u8::from(t.truncated))?;
        }
    }
    Ok(())
}

/// Boundary-case moment checks, closed form against quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentReport {
    /// `|∫_{-1}^∞ e^{-y} dy/e - 1|` from quadrature.
    pub m1_residual: f64,
    /// `|∫_{-1}^∞ y e^{-y} dy/e|` from quadrature.
    pub m2_residual: f64,
    /// `E[Σ V² e^{-V}] = ∫_{-1}^∞ y² e^{-y} dy/e` from quadrature (exactly 1).
    pub m4_value: f64,
    /// `∫_{-1}^∞ x² e^{-x} dx` from quadrature (exactly e).
    pub second_moment_integral: f64,
    /// Largest gap between a closed-form value and its quadrature.
    pub closed_form_gap: f64,
    /// Upper limit used for the quadrature.
    pub upper_limit: f64,
}

impl MomentReport {
    /// Single-row CSV.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "m1_residual,m2_residual,m4_value,second_moment_integral,closed_form_gap,upper_limit")?;
        writeln!(
            out,
            "{},{},{},{},{},{}",
            crate::fmt_float(self.m1_residual),
            crate::fmt_float(self.m2_residual),
            crate::fmt_float(self.m4_value),
            crate::fmt_float(self.second_moment_integral),
            crate::fmt_float(self.closed_form_gap),
            crate::fmt_float(self.upper_limit)
        )
    }
}

const MOMENT_TAIL: f64 = 1e-12;
const MOMENT_TOL: f64 = 1e-14;

/// Smallest integer upper limit where every neglected tail is below `1e-12`.
/// The `y²` tail `(V² + 2V + 2) e^{-V}` dominates `e^{-V}(V + 2)`.
fn moment_upper_limit() -> f64 {
    let mut v = 1.0_f64;
    while (v * v + 2.0 * v + 2.0) * (-v).exp() >= MOMENT_TAIL || (-v).exp() * (v + 2.0) >= MOMENT_TAIL {
        v += 1.0;
    }
    v
}

pub fn verify_boundary_conditions() -> Result<MomentReport> {
    let hi = moment_upper_limit();
    let lo = NormalizedOffspringLaw::SUPPORT_LO;
    let w = NormalizedOffspringLaw::INTENSITY;

    let m1 = integrate(|y| (-y).exp() * w, lo, hi, MOMENT_TOL)?;
    let m2 = integrate(|y| y * (-y).exp() * w, lo, hi, MOMENT_TOL)?;
    let m4 = integrate(|y| y * y * (-y).exp() * w, lo, hi, MOMENT_TOL)?;
    let second = integrate(|y| y * y * (-y).exp(), lo, hi, MOMENT_TOL)?;

    // Antiderivatives: -e^{-y}, -(y + 1) e^{-y}, -(y² + 2y + 2) e^{-y}.
    let closed = |anti: &dyn Fn(f64) -> f64| anti(hi) - anti(lo);
    let c1 = w * closed(&|y: f64| -(-y).exp());
    let c2 = w * closed(&|y: f64| -(y + 1.0) * (-y).exp());
    let c4 = w * closed(&|y: f64| -(y * y + 2.0 * y + 2.0) * (-y).exp());
    let c_second = closed(&|y: f64| -(y * y + 2.0 * y + 2.0) * (-y).exp());
    let gap = [(m1, c1), (m2, c2), (m4, c4), (second, c_second)]
        .iter()
        .map(|(q, c)| (q - c).abs())
        .fold(0.0, f64::max);

    Ok(MomentReport {
        m1_residual: (m1 - 1.0).abs(),
        m2_residual: m2.abs(),
        m4_value: m4,
        second_moment_integral: second,
        closed_form_gap: gap,
        upper_limit: hi,
    })
}

/// `P_{n-1}(z + n/e + 3/(2e) ln n)` for one `z` across several `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceRow {
    pub z: f64,
    pub values: Vec<(usize, f64)>,
    pub spread: f64,
    pub strictly_inside_unit: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceTable {
    pub rows: Vec<EquivalenceRow>,
}

impl EquivalenceTable {
    pub fn max_spread(&self) -> f64 {
        self.rows.iter().map(|r| r.spread).fold(0.0, f64::max)
    }

    /// CSV `z,n,p`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "z,n,p")?;
        for r in &self.rows {
            for (n, p) in &r.values {
                writeln!(out, "{},{n},{}", crate::fmt_float(r.z), crate::fmt_float(*p))?;
            }
        }
        Ok(())
    }
}

pub const EQUIVALENCE_MAX_DELTA: f64 = 0.001;
pub const EQUIVALENCE_MIN_GENERATIONS: usize = 200;

/// Tabulates the recentred probe of the limit law for each `z` and each `n`
/// in `generations`. Snapshots of generation `n - 1` must be present.
pub fn equivalence_check(recursion: &RecursionResult, z_grid: &[f64], generations: &[usize]) -> Result<EquivalenceTable> {
    let cfg = &recursion.config;
    if cfg.delta() > EQUIVALENCE_MAX_DELTA * (1.0 + 1e-9) {
        return Err(Error::Config(format!(
            "equivalence check needs delta <= {EQUIVALENCE_MAX_DELTA}, got {}",
            cfg.delta()
        )));
    }
    if cfg.n_max() < EQUIVALENCE_MIN_GENERATIONS {
        return Err(Error::Config(format!(
            "equivalence check needs n_max >= {EQUIVALENCE_MIN_GENERATIONS}, got {}",
            cfg.n_max()
        )));
    }
    if generations.is_empty() {
        return Err(Error::Config("equivalence check needs at least one generation".into()));
    }

    let mut rows = Vec::with_capacity(z_grid.len());
    for &z in z_grid {
        let mut values = Vec::with_capacity(generations.len());
        for &n in generations {
            if n == 0 {
                return Err(Error::Config("generations must be >= 1".into()));
            }
            let g = recursion
                .snapshot(n - 1)
                .ok_or_else(|| Error::Config(format!("recursion result lacks generation {}", n - 1)))?;
            let x = z + estimated_front(n);
            let p = g.eval(x).map_err(|_| Error::ProbeDomain { n, x, x_max: g.x_max() })?;
            values.push((n, p));
        }
        let lo = values.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
        let hi = values.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
        rows.push(EquivalenceRow {
            z,
            spread: hi - lo,
            strictly_inside_unit: lo > 0.0 && hi < 1.0,
            values,
        });
    }
    Ok(EquivalenceTable { rows })
}
