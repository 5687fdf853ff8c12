//! Grid iteration of `P_n(x) = exp(-x + ∫_0^x P_{n-1}(y) dy)`.
//!
//! The exponent is rewritten as `-∫_0^x (1 - P_{n-1}(y)) dy`, so each step
//! accumulates a non-negative deficit `D(x)` with a single compensated running
//! sum and stores both `P = exp(-D)` and its complement `1 - P = -expm1(-D)`.
//! Keeping the complement matters: for large `n` the left part of the curve
//! sits within machine epsilon of 1, and rounding `1 - P` to zero there cuts
//! off the tail that drives the front. With the cut-off the measured front
//! speed settles near `0.3689` instead of `1/e`.

use std::f64::consts::E;
use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::sum::NeumaierSum;

/// Lowest allowed distance between the estimated level-1/2 front at `n_max`
/// and the right end of the grid.
pub const MIN_FRONT_MARGIN: f64 = 4.0;

/// Margin used by [`RecursionConfig::for_horizon`].
pub const DEFAULT_FRONT_MARGIN: f64 = 12.0;

const CLAMP_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Quadrature {
    /// Right-endpoint sum over `y = Δ, 2Δ, …, x`, omitting the `y = 0` node.
    /// Converges at first order; kept for reproducing the published figures.
    RightRiemann,
    /// Composite trapezoid rule including the `y = 0` endpoint.
    #[default]
    Trapezoid,
}

impl Quadrature {
    pub fn name(self) -> &'static str {
        match self {
            Quadrature::RightRiemann => "riemann",
            Quadrature::Trapezoid => "trapezoid",
        }
    }
}

impl std::str::FromStr for Quadrature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "riemann" | "right-riemann" => Ok(Quadrature::RightRiemann),
            "trapezoid" | "trap" => Ok(Quadrature::Trapezoid),
            other => Err(Error::Config(format!("unknown quadrature '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecursionConfig {
    delta: f64,
    x_max: f64,
    n_max: usize,
    quadrature: Quadrature,
}

impl RecursionConfig {
    pub fn new(delta: f64, x_max: f64, n_max: usize, quadrature: Quadrature) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::Config(format!("delta must be positive, got {delta}")));
        }
        if !(x_max.is_finite() && x_max >= delta) {
            return Err(Error::Config(format!(
                "x_max must be finite and at least delta = {delta}, got {x_max}"
            )));
        }
        Ok(Self { delta, x_max, n_max, quadrature })
    }

    /// Smallest domain that keeps the front of generation `n_max` at least
    /// [`DEFAULT_FRONT_MARGIN`] away from the right boundary.
    pub fn for_horizon(delta: f64, n_max: usize, quadrature: Quadrature) -> Result<Self> {
        let x_max = (estimated_front(n_max) + DEFAULT_FRONT_MARGIN).max(delta);
        Self::new(delta, x_max, n_max, quadrature)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn quadrature(&self) -> Quadrature {
        self.quadrature
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = n_max;
        self
    }

    pub fn with_quadrature(mut self, quadrature: Quadrature) -> Self {
        self.quadrature = quadrature;
        self
    }

    /// Number of intervals `M = floor(x_max / delta)`.
    pub fn intervals(&self) -> usize {
        // x_max / delta is often an integer up to one ulp, e.g. 50 / 0.01.
        ((self.x_max / self.delta) * (1.0 + 1e-12)).floor() as usize
    }

    /// Number of grid nodes, `M + 1`.
    pub fn grid_len(&self) -> usize {
        self.intervals() + 1
    }

    /// Rejects domains too short to contain the front up to `n_max`.
    pub fn check_horizon(&self) -> Result<()> {
        let needed = estimated_front(self.n_max) + MIN_FRONT_MARGIN;
        let grid_end = self.intervals() as f64 * self.delta;
        if grid_end < needed {
            return Err(Error::Config(format!(
                "x_max = {} too short for n_max = {}: need at least {needed:.3}",
                self.x_max, self.n_max
            )));
        }
        Ok(())
    }
}

/// `n/e + 3/(2e) ln n`, the asymptotic front up to an O(1) offset.
pub fn estimated_front(n: usize) -> f64 {
    let n = n as f64;
    n / E + 1.5 / E * n.max(1.0).ln()
}

/// `P_n` sampled at `x_i = i·delta`, together with its complement `1 - P_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    delta: f64,
    generation: usize,
    cdf: Vec<f64>,
    tail: Vec<f64>,
}

impl GridFunction {
    /// Builds a grid function from probability values. The complement is
    /// formed as `1 - v`, so this is meant for synthetic curves.
    pub fn from_values(delta: f64, generation: usize, values: Vec<f64>) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::Config(format!("delta must be positive, got {delta}")));
        }
        if values.is_empty() {
            return Err(Error::Config("grid function needs at least one value".into()));
        }
        if let Some(bad) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Config(format!("probability {bad} outside [0, 1]")));
        }
        let tail = values.iter().map(|v| 1.0 - v).collect();
        Ok(Self { delta, generation, cdf: values, tail })
    }

    pub fn constant(delta: f64, len: usize, generation: usize, value: f64) -> Result<Self> {
        Self::from_values(delta, generation, vec![value; len])
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn len(&self) -> usize {
        self.cdf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cdf.is_empty()
    }

    /// `P_n(x_i)`.
    pub fn values(&self) -> &[f64] {
        &self.cdf
    }

    /// `1 - P_n(x_i) = P(H(x_i) > n)`, computed without cancellation.
    pub fn tail(&self) -> &[f64] {
        &self.tail
    }

    pub fn x_at(&self, i: usize) -> f64 {
        i as f64 * self.delta
    }

    pub fn x_max(&self) -> f64 {
        self.x_at(self.len() - 1)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.interpolate(&self.cdf, x)
    }

    pub fn eval_tail(&self, x: f64) -> Result<f64> {
        self.interpolate(&self.tail, x)
    }

    fn interpolate(&self, data: &[f64], x: f64) -> Result<f64> {
        let x_max = self.x_max();
        if !(x >= 0.0 && x <= x_max * (1.0 + 1e-12)) {
            return Err(Error::Domain { x, x_max });
        }
        let s = x / self.delta;
        let i = s.floor() as usize;
        if i >= data.len() - 1 {
            return Ok(data[data.len() - 1]);
        }
        let t = s - i as f64;
        Ok(data[i] + t * (data[i + 1] - data[i]))
    }

    /// CSV with header `x,p`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "x,p")?;
        for (i, p) in self.cdf.iter().enumerate() {
            writeln!(out, "{},{}", crate::fmt_float(self.x_at(i)), crate::fmt_float(*p))?;
        }
        Ok(())
    }
}

/// Snapshots of a recursion run. `snapshots` is sorted by generation.
#[derive(Debug, Clone)]
pub struct RecursionResult {
    pub config: RecursionConfig,
    pub snapshots: Vec<GridFunction>,
    pub last: GridFunction,
    /// Number of grid values that had to be clamped into `[0, 1]` by more
    /// than `1e-12`.
    pub clamp_events: usize,
}

impl RecursionResult {
    pub fn snapshot(&self, generation: usize) -> Option<&GridFunction> {
        if self.last.generation == generation {
            return Some(&self.last);
        }
        self.snapshots
            .binary_search_by_key(&generation, |g| g.generation)
            .ok()
            .map(|i| &self.snapshots[i])
    }
}

pub fn init_p0(config: &RecursionConfig) -> Result<GridFunction> {
    let len = config.grid_len();
    let delta = config.delta;
    let cdf = (0..len).map(|i| (-(i as f64) * delta).exp()).collect();
    let tail = (0..len).map(|i| -(-(i as f64) * delta).exp_m1()).collect();
    Ok(GridFunction { delta, generation: 0, cdf, tail })
}

pub fn iterate_step(prev: &GridFunction, config: &RecursionConfig) -> Result<GridFunction> {
    check_grid(prev, config)?;
    Ok(step(prev, config.quadrature).0)
}

fn check_grid(prev: &GridFunction, config: &RecursionConfig) -> Result<()> {
    if prev.delta != config.delta {
        return Err(Error::GridMismatch(format!(
            "grid spacing {} does not match configured delta {}",
            prev.delta, config.delta
        )));
    }
    if prev.len() != config.grid_len() {
        return Err(Error::GridMismatch(format!(
            "grid has {} nodes, configuration expects {}",
            prev.len(),
            config.grid_len()
        )));
    }
    Ok(())
}

fn step(prev: &GridFunction, quadrature: Quadrature) -> (GridFunction, usize) {
    let len = prev.len();
    let delta = prev.delta;
    let mut cdf = Vec::with_capacity(len);
    let mut tail = Vec::with_capacity(len);
    let mut clamps = 0;
    let mut acc = NeumaierSum::new();
    let mut deficit_prev = 0.0_f64;

    for i in 0..len {
        if i > 0 {
            let term = match quadrature {
                Quadrature::RightRiemann => prev.tail[i],
                Quadrature::Trapezoid => 0.5 * (prev.tail[i - 1] + prev.tail[i]),
            };
            acc.add(term);
        }
        // The compensated total may jitter by an ulp; the deficit itself
        // never decreases since every term is non-negative.
        let deficit = (delta * acc.value()).max(deficit_prev);
        deficit_prev = deficit;

        let (p, c) = ((-deficit).exp(), -(-deficit).exp_m1());
        let (p_clamped, c_clamped) = (p.clamp(0.0, 1.0), c.clamp(0.0, 1.0));
        if (p - p_clamped).abs() > CLAMP_TOLERANCE || (c - c_clamped).abs() > CLAMP_TOLERANCE {
            clamps += 1;
            log::warn!(
                "clamped P_{}({}) = {p} into [0, 1]",
                prev.generation + 1,
                i as f64 * delta
            );
        }
        cdf.push(p_clamped);
        tail.push(c_clamped);
    }

    let next = GridFunction { delta, generation: prev.generation + 1, cdf, tail };
    (next, clamps)
}

/// Iterates from `P_0` to `P_{n_max}`, handing every generation to `visit`.
/// Only the current and previous generations are held in memory.
pub fn run_recursion_with<F>(config: &RecursionConfig, mut visit: F) -> Result<(GridFunction, usize)>
where
    F: FnMut(&GridFunction) -> Result<()>,
{
    config.check_horizon()?;
    let mut current = init_p0(config)?;
    let mut clamps = 0;
    visit(&current)?;
    for _ in 0..config.n_max {
        let (next, c) = step(&current, config.quadrature);
        clamps += c;
        current = next;
        visit(&current)?;
    }
    Ok((current, clamps))
}

pub fn run_recursion(config: &RecursionConfig, snapshot_generations: &[usize]) -> Result<RecursionResult> {
    let mut wanted: Vec<usize> = snapshot_generations.to_vec();
    wanted.sort_unstable();
    wanted.dedup();
    if let Some(&bad) = wanted.iter().find(|&&g| g > config.n_max) {
        return Err(Error::Config(format!(
            "snapshot generation {bad} exceeds n_max = {}",
            config.n_max
        )));
    }

    let mut snapshots = Vec::with_capacity(wanted.len());
    let mut next_wanted = wanted.iter().peekable();
    let (last, clamp_events) = run_recursion_with(config, |g| {
        if next_wanted.peek() == Some(&&g.generation) {
            snapshots.push(g.clone());
            next_wanted.next();
        }
        Ok(())
    })?;

    Ok(RecursionResult { config: *config, snapshots, last, clamp_events })
}

/// `P_1(x) = exp(1 - x - e^{-x})`, the exact first iterate.
pub fn closed_form_p1(x: f64) -> f64 {
    // 1 - x - e^{-x} = -(x + expm1(-x))
    (-(x + (-x).exp_m1())).exp()
}
