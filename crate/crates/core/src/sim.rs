//! Monte Carlo ground truth for the height distribution.
//!
//! The continuum cascade tree on `[0, x]` is grown breadth-first as a killed
//! branching Poisson process: the root sits at 0 and a particle at `p` has
//! `Poisson(x - p)` children placed uniformly on `[p, x]`. The height `H(x)`
//! is the last non-empty generation. The discrete cascade graph on `n`
//! vertices with edge probability `c = x / n` converges to the same law.

use std::io::{self, Write};

use rand::Rng;
use rand_distr::{Distribution, Geometric, Poisson};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::{trial_rng, StreamDomain};

pub const DEFAULT_PARTICLE_CAP: usize = 1_000_000;

/// Generation cap used when a caller wants the full height distribution.
pub const UNBOUNDED_GENERATIONS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub x: f64,
    pub trials: usize,
    pub n_cap: usize,
    pub particle_cap: usize,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(x: f64, trials: usize, n_cap: usize, particle_cap: usize, seed: u64) -> Result<Self> {
        if !(x.is_finite() && x >= 0.0) {
            return Err(Error::Config(format!("barrier x must be finite and >= 0, got {x}")));
        }
        if trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if particle_cap == 0 {
            return Err(Error::Config("particle_cap must be at least 1".into()));
        }
        Ok(Self { x, trials, n_cap, particle_cap, seed })
    }
}

/// Outcome of one height sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Height {
    Finite(usize),
    /// Still alive after `n_cap + 1` generations, so `H > n_cap`.
    BeyondCap,
    /// A generation exceeded the particle cap; `H >= generation`.
    Truncated { generation: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParticleGeneration {
    pub generation: usize,
    pub positions: Vec<f64>,
}

impl ParticleGeneration {
    pub fn root() -> Self {
        Self { generation: 0, positions: vec![0.0] }
    }

    pub fn leftmost(&self) -> f64 {
        self.positions.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let d = Poisson::new(mean).expect("finite positive Poisson mean");
    d.sample(rng) as u64
}

/// Children of every particle in `parents`, or `None` once more than
/// `particle_cap` children have been born.
pub fn next_generation<R: Rng + ?Sized>(
    barrier: f64,
    parents: &ParticleGeneration,
    particle_cap: usize,
    rng: &mut R,
) -> Option<ParticleGeneration> {
    let mut positions = Vec::new();
    for &p in &parents.positions {
        let span = barrier - p;
        let k = poisson_count(span, rng);
        if positions.len() as u64 + k > particle_cap as u64 {
            return None;
        }
        positions.extend((0..k).map(|_| p + span * rng.random::<f64>()));
    }
    Some(ParticleGeneration { generation: parents.generation + 1, positions })
}

pub fn sample_height<R: Rng + ?Sized>(x: f64, rng: &mut R, n_cap: usize, particle_cap: usize) -> Height {
    let mut current = ParticleGeneration::root();
    loop {
        match next_generation(x, &current, particle_cap, rng) {
            None => return Height::Truncated { generation: current.generation + 1 },
            Some(next) if next.positions.is_empty() => return Height::Finite(current.generation),
            Some(next) => {
                if next.generation > n_cap {
                    return Height::BeyondCap;
                }
                current = next;
            }
        }
    }
}

/// Leftmost particle position per generation of the killed process.
#[derive(Debug, Clone, PartialEq)]
pub struct LeftmostTrace {
    /// `minima[n]` is the leftmost position in generation `n`; an empty
    /// generation is recorded as `+∞` and ends the trace.
    pub minima: Vec<f64>,
    pub truncated: bool,
}

impl LeftmostTrace {
    /// Whether generation `n` was observed to be empty.
    pub fn is_empty_at(&self, n: usize) -> Option<bool> {
        match self.minima.get(n) {
            Some(m) => Some(m.is_infinite()),
            None if self.minima.last().is_some_and(|m| m.is_infinite()) => Some(true),
            None => None,
        }
    }
}

/// Follows the same generation sequence as [`sample_height`] and draws the
/// same random numbers, recording the leftmost particle of each generation.
pub fn leftmost_trace<R: Rng + ?Sized>(x: f64, rng: &mut R, n_cap: usize, particle_cap: usize) -> LeftmostTrace {
    let mut current = ParticleGeneration::root();
    let mut minima = vec![current.leftmost()];
    loop {
        match next_generation(x, &current, particle_cap, rng) {
            None => return LeftmostTrace { minima, truncated: true },
            Some(next) => {
                minima.push(next.leftmost());
                if next.positions.is_empty() || next.generation > n_cap {
                    return LeftmostTrace { minima, truncated: false };
                }
                current = next;
            }
        }
    }
}

/// Aggregated `P(H(x) <= n)` estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    pub x: f64,
    pub trials: usize,
    /// `counts[n]` trials had `H(x) <= n`, for `n = 0 … n_cap`.
    pub counts: Vec<u64>,
    pub truncated_trials: u64,
    pub beyond_cap_trials: u64,
}

impl EmpiricalCdf {
    pub fn from_heights(x: f64, n_cap: usize, heights: &[Height]) -> Self {
        let mut hist = vec![0u64; n_cap + 1];
        let (mut truncated, mut beyond) = (0, 0);
        for h in heights {
            match *h {
                Height::Finite(k) if k <= n_cap => hist[k] += 1,
                Height::Finite(_) | Height::BeyondCap => beyond += 1,
                Height::Truncated { .. } => truncated += 1,
            }
        }
        let counts = hist
            .iter()
            .scan(0u64, |acc, &c| {
                *acc += c;
                Some(*acc)
            })
            .collect();
        Self {
            x,
            trials: heights.len(),
            counts,
            truncated_trials: truncated,
            beyond_cap_trials: beyond,
        }
    }

    pub fn n_cap(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn p_hat(&self, n: usize) -> f64 {
        self.counts[n] as f64 / self.trials as f64
    }

    /// Binomial standard error of `p_hat(n)`.
    pub fn stderr(&self, n: usize) -> f64 {
        let p = self.p_hat(n);
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    pub fn truncated_fraction(&self) -> f64 {
        self.truncated_trials as f64 / self.trials as f64
    }

    /// CSV `n,count,p_hat,stderr`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "n,count,p_hat,stderr")?;
        for n in 0..self.counts.len() {
            writeln!(
                out,
                "{n},{},{},{}",
                self.counts[n],
                crate::fmt_float(self.p_hat(n)),
                crate::fmt_float(self.stderr(n))
            )?;
        }
        Ok(())
    }
}

/// Heights of `trials` independent trees; trial `i` uses its own stream.
pub fn sample_heights(config: &SimConfig) -> Vec<Height> {
    (0..config.trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(config.seed, StreamDomain::Height, i);
            sample_height(config.x, &mut rng, config.n_cap, config.particle_cap)
        })
        .collect()
}

pub fn empirical_cdf(config: &SimConfig) -> Result<EmpiricalCdf> {
    let config = SimConfig::new(config.x, config.trials, config.n_cap, config.particle_cap, config.seed)?;
    Ok(EmpiricalCdf::from_heights(config.x, config.n_cap, &sample_heights(&config)))
}

/// Cascade random graph: vertices `0 … n-1` (vertex 0 plays the role of
/// vertex 1), edges only from lower to higher index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CascadeGraph {
    successors: Vec<Vec<u32>>,
}

impl CascadeGraph {
    /// Each edge `(i, j)`, `i < j`, is present independently with
    /// probability `c`. Successors are drawn by geometric skipping.
    pub fn sample<R: Rng + ?Sized>(n_vertices: usize, c: f64, rng: &mut R) -> Result<Self> {
        check_graph_params(n_vertices, c)?;
        let mut successors = vec![Vec::new(); n_vertices];
        if c == 0.0 {
            return Ok(Self { successors });
        }
        let gap = Geometric::new(c).map_err(|e| Error::Config(format!("edge probability: {e}")))?;
        for (i, succ) in successors.iter_mut().enumerate() {
            let mut j = i as u64 + 1 + gap.sample(rng);
            while j < n_vertices as u64 {
                succ.push(j as u32);
                j += 1 + gap.sample(rng);
            }
        }
        Ok(Self { successors })
    }

    /// Builds a graph from 0-based edges `(i, j)` with `i < j < n_vertices`.
    pub fn from_edges(n_vertices: usize, edges: &[(usize, usize)]) -> Result<Self> {
        check_graph_params(n_vertices, 0.0)?;
        let mut successors = vec![Vec::new(); n_vertices];
        for &(i, j) in edges {
            if !(i < j && j < n_vertices) {
                return Err(Error::Config(format!("edge ({i}, {j}) is not forward in 0..{n_vertices}")));
            }
            successors[i].push(j as u32);
        }
        for s in successors.iter_mut() {
            s.sort_unstable();
            s.dedup();
        }
        Ok(Self { successors })
    }

    pub fn n_vertices(&self) -> usize {
        self.successors.len()
    }

    pub fn successors(&self, i: usize) -> &[u32] {
        &self.successors[i]
    }

    pub fn edge_count(&self) -> usize {
        self.successors.iter().map(Vec::len).sum()
    }

    /// Longest directed path (in edges) starting at vertex 0. Vertices are
    /// already in topological order, so one forward sweep suffices.
    pub fn longest_path_from_first(&self) -> usize {
        let n = self.n_vertices();
        let mut dist: Vec<Option<usize>> = vec![None; n];
        dist[0] = Some(0);
        let mut best = 0;
        for i in 0..n {
            let Some(d) = dist[i] else { continue };
            best = best.max(d);
            for &j in &self.successors[i] {
                let slot = &mut dist[j as usize];
                if slot.is_none_or(|cur| cur < d + 1) {
                    *slot = Some(d + 1);
                }
            }
        }
        best
    }
}

fn check_graph_params(n_vertices: usize, c: f64) -> Result<()> {
    if n_vertices == 0 {
        return Err(Error::Config("cascade graph needs at least one vertex".into()));
    }
    if n_vertices > u32::MAX as usize {
        return Err(Error::Config(format!("too many vertices: {n_vertices}")));
    }
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::Config(format!("edge probability must lie in [0, 1], got {c}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadeGraphSample {
    pub n_vertices: usize,
    pub c: f64,
    pub longest_path_from_1: usize,
}

pub fn sample_cascade_graph<R: Rng + ?Sized>(n_vertices: usize, c: f64, rng: &mut R) -> Result<CascadeGraphSample> {
    let g = CascadeGraph::sample(n_vertices, c, rng)?;
    Ok(CascadeGraphSample { n_vertices, c, longest_path_from_1: g.longest_path_from_first() })
}

/// Longest-path samples of `trials` independent graphs.
pub fn sample_longest_paths(n_vertices: usize, c: f64, trials: usize, seed: u64) -> Result<Vec<usize>> {
    check_graph_params(n_vertices, c)?;
    (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, StreamDomain::Graph, i);
            sample_cascade_graph(n_vertices, c, &mut rng).map(|s| s.longest_path_from_1)
        })
        .collect()
}

/// Empirical CDF of integer samples at `0 … max`.
pub fn integer_cdf(samples: &[usize], max: usize) -> Vec<f64> {
    let mut hist = vec![0usize; max + 1];
    for &s in samples {
        if s <= max {
            hist[s] += 1;
        }
    }
    let total = samples.len() as f64;
    let mut acc = 0;
    hist.iter()
        .map(|&h| {
            acc += h;
            acc as f64 / total
        })
        .collect()
}

/// Two-sample Kolmogorov-Smirnov statistic `sup |F_a - F_b|`. Ties are
/// handled by stepping both empirical CDFs past each distinct value.
pub fn ks_statistic<T: PartialOrd + Copy>(a: &[T], b: &[T]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(|x, y| x.partial_cmp(y).expect("comparable samples"));
    b.sort_by(|x, y| x.partial_cmp(y).expect("comparable samples"));
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0_f64;
    while i < a.len() && j < b.len() {
        let v = if a[i] <= b[j] { a[i] } else { b[j] };
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// Asymptotic two-sample KS critical value at significance `alpha`.
pub fn ks_critical_value(n: usize, m: usize, alpha: f64) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    let (n, m) = (n as f64, m as f64);
    c * ((n + m) / (n * m)).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteContinuumReport {
    pub n_vertices: usize,
    pub x: f64,
    pub c: f64,
    pub trials: usize,
    /// `p_discrete[k] = P̂(L_n <= k)`.
    pub p_discrete: Vec<f64>,
    /// `p_continuum[k] = P̂(H(x) <= k)` over resolved trials.
    pub p_continuum: Vec<f64>,
    pub ks_statistic: f64,
    pub critical_value_1pct: f64,
    pub unresolved_continuum: usize,
}

impl DiscreteContinuumReport {
    pub fn below_critical(&self) -> bool {
        self.ks_statistic < self.critical_value_1pct
    }

    /// CSV `n,p_discrete,p_continuum` with a final `ks,<statistic>,<critical>` row.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "n,p_discrete,p_continuum")?;
        for (k, (d, c)) in self.p_discrete.iter().zip(&self.p_continuum).enumerate() {
            writeln!(out, "{k},{},{}", crate::fmt_float(*d), crate::fmt_float(*c))?;
        }
        writeln!(
            out,
            "ks,{},{}",
            crate::fmt_float(self.ks_statistic),
            crate::fmt_float(self.critical_value_1pct)
        )
    }
}

/// Samples `L_n` from cascade graphs with `c = x / n_vertices` and `H(x)`
/// from the continuum tree, and compares the two laws.
pub fn compare_discrete_continuum(
    n_vertices: usize,
    x: f64,
    trials: usize,
    seed: u64,
) -> Result<DiscreteContinuumReport> {
    if !(x.is_finite() && x >= 0.0) {
        return Err(Error::Config(format!("x must be finite and >= 0, got {x}")));
    }
    if n_vertices == 0 || x > n_vertices as f64 {
        return Err(Error::Config(format!(
            "c = x / n_vertices = {x} / {n_vertices} is not a probability"
        )));
    }
    let c = x / n_vertices as f64;
    let discrete = sample_longest_paths(n_vertices, c, trials, seed)?;

    let sim = SimConfig::new(x, trials, UNBOUNDED_GENERATIONS, DEFAULT_PARTICLE_CAP, seed)?;
    let heights = sample_heights(&sim);
    let continuum: Vec<usize> = heights
        .iter()
        .filter_map(|h| match h {
            Height::Finite(k) => Some(*k),
            _ => None,
        })
        .collect();
    let unresolved = heights.len() - continuum.len();

    let max = discrete.iter().chain(&continuum).copied().max().unwrap_or(0);
    Ok(DiscreteContinuumReport {
        n_vertices,
        x,
        c,
        trials,
        p_discrete: integer_cdf(&discrete, max),
        p_continuum: integer_cdf(&continuum, max),
        ks_statistic: ks_statistic(&discrete, &continuum),
        critical_value_1pct: ks_critical_value(discrete.len(), continuum.len(), 0.01),
        unresolved_continuum: unresolved,
    })
}
