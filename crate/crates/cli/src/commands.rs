//! Module pipelines behind each subcommand.

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use cascade_core::brw::{equivalence_check, simulate_trajectories, verify_boundary_conditions, write_trajectories_csv};
use cascade_core::sim::{
    compare_discrete_continuum, empirical_cdf, integer_cdf, sample_longest_paths, SimConfig, DEFAULT_PARTICLE_CAP,
};
use cascade_core::{
    alpha_scan, fmt_float, front_position, log_correction_fit, richardson_velocity, run_recursion,
    run_recursion_with, velocity_estimate, wave_shape_collapse, AlphaScanResult, FrontTrace, Quadrature,
    RecursionConfig,
};

use crate::error::{CliError, Result};
use crate::output::{ManifestEntry, OutputDir, RUN_CONFIG_FILE};
use crate::params::Params;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Recurse,
    Front,
    Simulate,
    Graph,
    Brw,
    Compare,
    AlphaScan,
}

impl CommandKind {
    pub const ALL: [CommandKind; 7] = [
        CommandKind::Recurse,
        CommandKind::Front,
        CommandKind::Simulate,
        CommandKind::Graph,
        CommandKind::Brw,
        CommandKind::Compare,
        CommandKind::AlphaScan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Recurse => "recurse",
            CommandKind::Front => "front",
            CommandKind::Simulate => "simulate",
            CommandKind::Graph => "graph",
            CommandKind::Brw => "brw",
            CommandKind::Compare => "compare",
            CommandKind::AlphaScan => "alpha-scan",
        }
    }
}

impl fmt::Display for CommandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CommandKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CliError::param("command", format!("unknown command `{s}`")))
    }
}

/// One invocation: which pipeline, its parameters, where the artifacts go.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub command: CommandKind,
    pub parameters: Params,
    pub output_dir: PathBuf,
    pub seed: u64,
}

/// Runs the pipeline, then writes `run.cfg` and `manifest.csv`.
pub fn run(manifest: &RunManifest) -> Result<Vec<ManifestEntry>> {
    let p = &manifest.parameters;
    let mut out = OutputDir::create(&manifest.output_dir)?;
    match manifest.command {
        CommandKind::Recurse => recurse(p, &mut out)?,
        CommandKind::Front => front(p, &mut out)?,
        CommandKind::Simulate => simulate(p, manifest.seed, &mut out)?,
        CommandKind::Graph => graph(p, manifest.seed, &mut out)?,
        CommandKind::Brw => brw(p, manifest.seed, &mut out)?,
        CommandKind::Compare => compare(p, manifest.seed, &mut out)?,
        CommandKind::AlphaScan => scan(p, &mut out)?,
    }
    out.write_with(RUN_CONFIG_FILE, |w| {
        writeln!(w, "# command: {}", manifest.command)?;
        writeln!(w, "seed={}", manifest.seed)?;
        p.write(w)
    })?;
    out.finish()
}

fn recursion_config(p: &Params, default_n_max: usize) -> Result<RecursionConfig> {
    let delta = p.get_or("delta", 0.01)?;
    let n_max = p.get_or("nmax", default_n_max)?;
    let quadrature = p.get_or("quadrature", Quadrature::default())?;
    let config = match p.get::<f64>("xmax")? {
        Some(x_max) => RecursionConfig::new(delta, x_max, n_max, quadrature)?,
        None => RecursionConfig::for_horizon(delta, n_max, quadrature)?,
    };
    Ok(config)
}

fn check_generations(key: &str, gens: &[usize], n_max: usize) -> Result<()> {
    match gens.iter().find(|&&g| g > n_max) {
        Some(g) => Err(CliError::param(key, format!("generation {g} exceeds nmax = {n_max}"))),
        None => Ok(()),
    }
}

fn recurse(p: &Params, out: &mut OutputDir) -> Result<()> {
    let config = recursion_config(p, 100)?;
    let snapshots = p.list("snapshots")?.unwrap_or_else(|| vec![config.n_max()]);
    check_generations("snapshots", &snapshots, config.n_max())?;
    let result = run_recursion(&config, &snapshots)?;
    if result.clamp_events > 0 {
        log::warn!("{} grid values were clamped into [0, 1]", result.clamp_events);
    }
    for snap in &result.snapshots {
        out.write_with(&format!("pn_{}.csv", snap.generation()), |w| snap.write_csv(w))?;
    }
    Ok(())
}

fn front(p: &Params, out: &mut OutputDir) -> Result<()> {
    let config = recursion_config(p, 400)?;
    let n_max = config.n_max();
    let level = p.get_or("level", cascade_core::front::DEFAULT_LEVEL)?;
    let window = (p.get_or("window-lo", n_max / 2)?, p.get_or("window-hi", n_max)?);
    let fit_window = (p.get_or("fit-lo", n_max / 4)?, p.get_or("fit-hi", n_max)?);
    let richardson_n = p.get_or("richardson-n", n_max / 4)?;
    let collapse: Vec<usize> = p.list("collapse")?.unwrap_or_default();
    check_generations("collapse", &collapse, n_max)?;

    let mut entries = Vec::with_capacity(n_max + 1);
    let mut aligned = Vec::new();
    run_recursion_with(&config, |f| {
        entries.push((f.generation(), front_position(f, level)?));
        if collapse.contains(&f.generation()) {
            aligned.push(f.clone());
        }
        Ok(())
    })?;
    let trace = FrontTrace::from_entries(level, entries)?;
    out.write_with("front_trace.csv", |w| trace.write_csv(w))?;

    let velocity = velocity_estimate(&trace, window)?;
    out.write_with("velocity.csv", |w| velocity.write_csv(w))?;

    let v = richardson_velocity(&trace, richardson_n)?;
    out.write_with("richardson.csv", |w| {
        writeln!(w, "n,v")?;
        writeln!(w, "{richardson_n},{}", fmt_float(v))
    })?;

    let fit = log_correction_fit(&trace, fit_window, Some(v))?;
    out.write_with("log_fit.csv", |w| fit.write_csv(w))?;
    log::info!("v = {:.6}, b = {:.6}", velocity.v, fit.b);

    if !aligned.is_empty() {
        let spread = wave_shape_collapse(&aligned, level)?;
        let gens: Vec<String> = collapse.iter().map(usize::to_string).collect();
        out.write_with("collapse.csv", |w| {
            writeln!(w, "generations,level,spread")?;
            writeln!(w, "{},{},{}", gens.join(";"), fmt_float(level), fmt_float(spread))
        })?;
    }
    Ok(())
}

fn required<T>(p: &Params, key: &str) -> Result<T>
where
    T: FromStr,
    T::Err: fmt::Display,
{
    p.get(key)?.ok_or_else(|| CliError::param(key, "required"))
}

fn simulate(p: &Params, seed: u64, out: &mut OutputDir) -> Result<()> {
    let config = SimConfig::new(
        required(p, "x")?,
        p.get_or("trials", 10_000)?,
        p.get_or("ncap", 30)?,
        p.get_or("particle-cap", DEFAULT_PARTICLE_CAP)?,
        seed,
    )?;
    let cdf = empirical_cdf(&config)?;
    if cdf.truncated_trials > 0 {
        log::warn!("{} trials hit the particle cap", cdf.truncated_trials);
    }
    out.write_with("empirical_cdf.csv", |w| cdf.write_csv(w))
}

fn graph(p: &Params, seed: u64, out: &mut OutputDir) -> Result<()> {
    let n = p.get_or("vertices", 2000usize)?;
    if n == 0 {
        return Err(CliError::param("vertices", "must be at least 1"));
    }
    let c = match p.get::<f64>("c")? {
        Some(c) => c,
        None => p.get_or("x", 2.0)? / n as f64,
    };
    let trials = p.get_or("trials", 10_000usize)?;
    let lengths = sample_longest_paths(n, c, trials, seed)?;
    let max = lengths.iter().copied().max().unwrap_or(0);
    let cdf = integer_cdf(&lengths, max);
    let mut counts = vec![0u64; max + 1];
    for &l in &lengths {
        counts[l] += 1;
    }
    out.write_with("longest_path.csv", |w| {
        writeln!(w, "l,count,cdf")?;
        for (l, (count, f)) in counts.iter().zip(&cdf).enumerate() {
            writeln!(w, "{l},{count},{}", fmt_float(*f))?;
        }
        Ok(())
    })
}

fn brw(p: &Params, seed: u64, out: &mut OutputDir) -> Result<()> {
    let moments = verify_boundary_conditions()?;
    out.write_with("moments.csv", |w| moments.write_csv(w))?;

    let trajectories = simulate_trajectories(
        p.get_or("generations", 5)?,
        p.get_or("trials", 1000)?,
        p.get_or("vmax", cascade_core::brw::DEFAULT_V_MAX)?,
        p.get_or("particle-cap", DEFAULT_PARTICLE_CAP)?,
        seed,
    )?;
    out.write_with("trajectories.csv", |w| write_trajectories_csv(&trajectories, w))?;

    if let Some(delta) = p.get::<f64>("probe-delta")? {
        let generations = p.list("probe-generations")?.unwrap_or_else(|| vec![100, 150, 200]);
        let z: Vec<f64> = p.list("probe-z")?.unwrap_or_else(|| (-4..=4).map(f64::from).collect());
        if generations.contains(&0) {
            return Err(CliError::param("probe-generations", "generations start at 1"));
        }
        let n_top = generations.iter().copied().max().unwrap_or(1);
        let config = RecursionConfig::for_horizon(delta, n_top, Quadrature::Trapezoid)?;
        let previous: Vec<usize> = generations.iter().map(|n| n - 1).collect();
        let recursion = run_recursion(&config, &previous)?;
        let table = equivalence_check(&recursion, &z, &generations)?;
        log::info!("limit probe spread {:.4}", table.max_spread());
        out.write_with("limit_probe.csv", |w| table.write_csv(w))?;
    }
    Ok(())
}

fn compare(p: &Params, seed: u64, out: &mut OutputDir) -> Result<()> {
    let report = compare_discrete_continuum(
        p.get_or("vertices", 2000)?,
        p.get_or("x", 2.0)?,
        p.get_or("trials", 20_000)?,
        seed,
    )?;
    log::info!(
        "KS {:.5} against 1% critical value {:.5}",
        report.ks_statistic,
        report.critical_value_1pct
    );
    out.write_with("compare.csv", |w| report.write_csv(w))
}

fn scan(p: &Params, out: &mut OutputDir) -> Result<()> {
    let deltas = p.list("deltas")?.unwrap_or_else(|| vec![0.01, 0.001]);
    let n_max = p.get_or("nmax", 100)?;
    let results = alpha_scan(&deltas, n_max)?;
    out.write_with("alpha_scan.csv", |w| AlphaScanResult::write_csv(&results, w))?;
    for r in &results {
        out.write_with(&format!("probe_{}.csv", r.delta), |w| r.write_series_csv(w))?;
    }
    Ok(())
}
