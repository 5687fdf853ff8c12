//! Front extraction and traveling-wave diagnostics.
//!
//! The front `x_f(n)` of a generation is the point where `P_n` crosses a
//! level (1/2 unless stated). Fits recover the velocity and the coefficient
//! of the `ln n` correction from a [`FrontTrace`].

use std::f64::consts::E;
use std::io::{self, Write};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::recursion::{
    estimated_front, run_recursion_with, GridFunction, Quadrature, RecursionConfig,
    RecursionResult, MIN_FRONT_MARGIN,
};

pub const DEFAULT_LEVEL: f64 = 0.5;

/// Half-width of the relative window used by [`wave_shape_collapse`].
pub const COLLAPSE_HALF_WIDTH: f64 = 5.0;

/// Search interval for the probe scale factor in [`alpha_scan`].
pub const ALPHA_RANGE: (f64, f64) = (0.95, 1.01);

const ALPHA_COARSE_POINTS: usize = 25;
const GOLDEN_TOL: f64 = 1e-7;
const MAX_CONDITION: f64 = 1e10;

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("front level must lie in (0, 1), got {level}")))
    }
}

/// Linearly interpolated position where `f` drops below `level`.
pub fn front_position(f: &GridFunction, level: f64) -> Result<f64> {
    check_level(level)?;
    let values = f.values();
    let not_found = Error::FrontNotFound { level, generation: f.generation() };
    let i = values.iter().position(|&v| v < level).ok_or_else(|| not_found.clone())?;
    if i == 0 {
        return Err(not_found);
    }
    let (hi, lo) = (values[i - 1], values[i]);
    Ok(f.x_at(i - 1) + (hi - level) / (hi - lo) * f.delta())
}

/// Front positions `(n, x_f(n))` across generations, ordered by `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontTrace {
    pub level: f64,
    pub entries: Vec<(usize, f64)>,
}

impl FrontTrace {
    pub fn new(level: f64) -> Result<Self> {
        check_level(level)?;
        Ok(Self { level, entries: Vec::new() })
    }

    pub fn from_entries(level: f64, mut entries: Vec<(usize, f64)>) -> Result<Self> {
        check_level(level)?;
        entries.sort_by_key(|e| e.0);
        Ok(Self { level, entries })
    }

    /// Runs the recursion and records the front of every generation.
    pub fn from_recursion(config: &RecursionConfig, level: f64) -> Result<Self> {
        let mut trace = Self::new(level)?;
        run_recursion_with(config, |g| {
            trace.entries.push((g.generation(), front_position(g, level)?));
            Ok(())
        })?;
        Ok(trace)
    }

    /// Like [`FrontTrace::from_recursion`] but for several levels in one pass.
    pub fn many_from_recursion(config: &RecursionConfig, levels: &[f64]) -> Result<Vec<Self>> {
        let mut traces = levels.iter().map(|&l| Self::new(l)).collect::<Result<Vec<_>>>()?;
        run_recursion_with(config, |g| {
            for t in traces.iter_mut() {
                t.entries.push((g.generation(), front_position(g, t.level)?));
            }
            Ok(())
        })?;
        Ok(traces)
    }

    pub fn position(&self, n: usize) -> Option<f64> {
        self.entries.binary_search_by_key(&n, |e| e.0).ok().map(|i| self.entries[i].1)
    }

    pub fn window(&self, n_lo: usize, n_hi: usize) -> Vec<(usize, f64)> {
        self.entries.iter().copied().filter(|&(n, _)| n >= n_lo && n <= n_hi).collect()
    }

    /// CSV with header `n,x_front`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "n,x_front")?;
        for (n, x) in &self.entries {
            writeln!(out, "{n},{}", crate::fmt_float(*x))?;
        }
        Ok(())
    }
}

/// `x_f(n) ≈ v·n + b·ln n + a` over `[n_lo, n_hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontFit {
    pub v: f64,
    pub b: f64,
    pub a: f64,
    pub n_lo: usize,
    pub n_hi: usize,
    pub residual_rms: f64,
}

impl FrontFit {
    pub fn predict(&self, n: f64) -> f64 {
        self.v * n + self.b * n.ln() + self.a
    }

    /// Single-row CSV `v,b,a,residual_rms,n_lo,n_hi`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "v,b,a,residual_rms,n_lo,n_hi")?;
        writeln!(
            out,
            "{},{},{},{},{},{}",
            crate::fmt_float(self.v),
            crate::fmt_float(self.b),
            crate::fmt_float(self.a),
            crate::fmt_float(self.residual_rms),
            self.n_lo,
            self.n_hi
        )
    }
}

/// Least-squares slope of `x_f` against `n`; the log coefficient is pinned to 0.
pub fn velocity_estimate(trace: &FrontTrace, window: (usize, usize)) -> Result<FrontFit> {
    let pts = trace.window(window.0, window.1);
    if pts.len() < 10 {
        return Err(Error::Fit(format!(
            "velocity fit needs at least 10 entries in [{}, {}], found {}",
            window.0,
            window.1,
            pts.len()
        )));
    }
    let m = pts.len() as f64;
    let n_mean = pts.iter().map(|p| p.0 as f64).sum::<f64>() / m;
    let x_mean = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(n, x) in &pts {
        let dn = n as f64 - n_mean;
        sxy += dn * (x - x_mean);
        sxx += dn * dn;
    }
    let v = sxy / sxx;
    let a = x_mean - v * n_mean;
    let rss: f64 = pts.iter().map(|&(n, x)| (x - v * n as f64 - a).powi(2)).sum();
    Ok(FrontFit {
        v,
        b: 0.0,
        a,
        n_lo: window.0,
        n_hi: window.1,
        residual_rms: (rss / m).sqrt(),
    })
}

/// Velocity with the `ln n / n` bias of finite-window slopes removed.
///
/// With `V(m) = (x_f(2m) - x_f(m)) / m = v + b·ln 2 / m + …`, the
/// combination `2·V(2n) - V(n)` cancels the leading correction. Needs
/// fronts at `n`, `2n` and `4n`.
pub fn richardson_velocity(trace: &FrontTrace, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Fit("Richardson velocity needs n >= 1".into()));
    }
    let at = |k: usize| {
        trace
            .position(k)
            .ok_or_else(|| Error::Fit(format!("front trace has no entry for n = {k}")))
    };
    let (x1, x2, x4) = (at(n)?, at(2 * n)?, at(4 * n)?);
    let nf = n as f64;
    let coarse = (x2 - x1) / nf;
    let fine = (x4 - x2) / (2.0 * nf);
    Ok(2.0 * fine - coarse)
}

/// Fits `x_f(n) - v·n = a + b·ln n`.
///
/// With `v_fixed = None` the velocity is fit jointly from the regressors
/// `{n, ln n, 1}`; these are close to collinear on short windows.
pub fn log_correction_fit(
    trace: &FrontTrace,
    window: (usize, usize),
    v_fixed: Option<f64>,
) -> Result<FrontFit> {
    let pts = trace.window(window.0.max(1), window.1);
    if pts.len() < 50 {
        return Err(Error::Fit(format!(
            "log-correction fit needs at least 50 entries in [{}, {}], found {}",
            window.0,
            window.1,
            pts.len()
        )));
    }
    let (n_first, n_last) = (pts[0].0 as f64, pts[pts.len() - 1].0 as f64);
    if n_last < 3.0 * n_first {
        return Err(Error::Fit(format!(
            "window [{n_first}, {n_last}] spans less than a factor 3 in n"
        )));
    }

    let rows = pts.len();
    let (cols, design, response) = match v_fixed {
        Some(v) => {
            let design = DMatrix::from_fn(rows, 2, |r, c| match c {
                0 => (pts[r].0 as f64).ln(),
                _ => 1.0,
            });
            let response = DVector::from_fn(rows, |r, _| pts[r].1 - v * pts[r].0 as f64);
            (2, design, response)
        }
        None => {
            let design = DMatrix::from_fn(rows, 3, |r, c| match c {
                0 => pts[r].0 as f64,
                1 => (pts[r].0 as f64).ln(),
                _ => 1.0,
            });
            let response = DVector::from_fn(rows, |r, _| pts[r].1);
            (3, design, response)
        }
    };

    let coef = least_squares(design.clone(), &response)?;
    let residual = &design * &coef - &response;
    let residual_rms = (residual.norm_squared() / rows as f64).sqrt();
    let (v, b, a) = match v_fixed {
        Some(v) => (v, coef[0], coef[1]),
        None => (coef[0], coef[1], coef[2]),
    };
    debug_assert_eq!(coef.len(), cols);
    Ok(FrontFit { v, b, a, n_lo: window.0, n_hi: window.1, residual_rms })
}

/// Column-equilibrated SVD solve with a conditioning guard.
fn least_squares(mut design: DMatrix<f64>, response: &DVector<f64>) -> Result<DVector<f64>> {
    let scales: Vec<f64> = design.column_iter().map(|c| c.norm()).collect();
    for (j, s) in scales.iter().enumerate() {
        if *s == 0.0 {
            return Err(Error::Fit("design matrix has a zero column".into()));
        }
        design.column_mut(j).unscale_mut(*s);
    }
    let svd = design.svd(true, true);
    let sv = &svd.singular_values;
    let (max, min) = (sv.max(), sv.min());
    if !(min > 0.0 && max / min < MAX_CONDITION) {
        return Err(Error::Fit(format!("ill-conditioned design (condition {:.3e})", max / min)));
    }
    let mut coef = svd
        .solve(response, 0.0)
        .map_err(|e| Error::Fit(format!("least squares failed: {e}")))?;
    for (j, s) in scales.iter().enumerate() {
        coef[j] /= s;
    }
    Ok(coef)
}

/// Aligns each snapshot on its front and returns the largest pointwise spread
/// over `u = x - x_f ∈ [-5, 5]`. Left of `x = 0` the curves are extended by
/// `P = 1` (an empty interval has height 0).
pub fn wave_shape_collapse(snapshots: &[GridFunction], level: f64) -> Result<f64> {
    if snapshots.len() < 2 {
        return Err(Error::Config("wave-shape collapse needs at least two snapshots".into()));
    }
    let fronts = snapshots.iter().map(|s| front_position(s, level)).collect::<Result<Vec<_>>>()?;
    let du = snapshots.iter().map(|s| s.delta()).fold(f64::INFINITY, f64::min);
    let steps = (2.0 * COLLAPSE_HALF_WIDTH / du).round() as usize;

    let mut spread = 0.0_f64;
    for k in 0..=steps {
        let u = -COLLAPSE_HALF_WIDTH + k as f64 * du;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for (s, xf) in snapshots.iter().zip(&fronts) {
            let x = xf + u;
            let p = if x < 0.0 { 1.0 } else { s.eval(x)? };
            lo = lo.min(p);
            hi = hi.max(p);
        }
        spread = spread.max(hi - lo);
    }
    Ok(spread)
}

/// Probe abscissa `α·(n/e + 3/(2e)·ln n)`.
pub fn probe_point(n: usize, alpha: f64) -> f64 {
    alpha * estimated_front(n)
}

/// `P_{n-1}` evaluated at `α·(n/e + 3/(2e)·ln n)` for `n = 2 … n_max`.
/// Every generation `1 … n_max - 1` must be present in `result`.
pub fn front_constancy_probe(result: &RecursionResult, alpha: f64) -> Result<Vec<(usize, f64)>> {
    let n_max = result.config.n_max();
    let mut series = Vec::with_capacity(n_max.saturating_sub(1));
    for n in 2..=n_max {
        let g = result.snapshot(n - 1).ok_or_else(|| {
            Error::Config(format!("recursion result lacks a snapshot of generation {}", n - 1))
        })?;
        let x = probe_point(n, alpha);
        let p = g.eval(x).map_err(|_| Error::ProbeDomain { n, x, x_max: g.x_max() })?;
        series.push((n, p));
    }
    Ok(series)
}

/// RMS of successive differences over the last half of the series.
pub fn drift_rms(series: &[(usize, f64)]) -> f64 {
    let tail = &series[series.len() / 2..];
    if tail.len() < 2 {
        return 0.0;
    }
    let ss: f64 = tail.windows(2).map(|w| (w[1].1 - w[0].1).powi(2)).sum();
    (ss / (tail.len() - 1) as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaScanResult {
    pub delta: f64,
    pub alpha_star: f64,
    /// Drift objective at `alpha_star`.
    pub drift: f64,
    pub probe_series: Vec<(usize, f64)>,
}

impl AlphaScanResult {
    /// CSV `delta,alpha_star` over several results.
    pub fn write_csv<W: Write>(results: &[AlphaScanResult], mut out: W) -> io::Result<()> {
        writeln!(out, "delta,alpha_star")?;
        for r in results {
            writeln!(out, "{},{}", crate::fmt_float(r.delta), crate::fmt_float(r.alpha_star))?;
        }
        Ok(())
    }

    /// CSV `n,probe` of the series at `alpha_star`.
    pub fn write_series_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "n,probe")?;
        for (n, p) in &self.probe_series {
            writeln!(out, "{n},{}", crate::fmt_float(*p))?;
        }
        Ok(())
    }
}

/// Slices of `P_{n-1}` covering every probe point reachable for
/// `α ∈ ALPHA_RANGE`, so that the scan does not hold whole snapshots.
struct ProbeTable {
    delta: f64,
    x_max: f64,
    // (first node index, values) for generation n - 1, indexed by n - 2
    rows: Vec<(usize, Vec<f64>)>,
}

impl ProbeTable {
    fn build(config: &RecursionConfig) -> Result<Self> {
        let n_max = config.n_max();
        let delta = config.delta();
        let mut rows = Vec::with_capacity(n_max.saturating_sub(1));
        let (last, _) = run_recursion_with(config, |g| {
            let n = g.generation() + 1;
            if n >= 2 && n <= n_max {
                let lo = (probe_point(n, ALPHA_RANGE.0) / delta).floor() as usize;
                let hi = ((probe_point(n, ALPHA_RANGE.1) / delta).ceil() as usize + 1).min(g.len() - 1);
                rows.push((lo, g.values()[lo..=hi].to_vec()));
            }
            Ok(())
        })?;
        Ok(Self { delta, x_max: last.x_max(), rows })
    }

    fn series(&self, alpha: f64) -> Result<Vec<(usize, f64)>> {
        self.rows
            .iter()
            .enumerate()
            .map(|(k, (start, vals))| {
                let n = k + 2;
                let x = probe_point(n, alpha);
                let s = x / self.delta - *start as f64;
                if x > self.x_max || s < 0.0 || s > (vals.len() - 1) as f64 {
                    return Err(Error::ProbeDomain { n, x, x_max: self.x_max });
                }
                let i = (s.floor() as usize).min(vals.len() - 2);
                let t = s - i as f64;
                Ok((n, vals[i] + t * (vals[i + 1] - vals[i])))
            })
            .collect()
    }
}

/// For each grid spacing, finds the probe scale `α` that makes the
/// right-Riemann probe series flattest at late times.
pub fn alpha_scan(deltas: &[f64], n_max: usize) -> Result<Vec<AlphaScanResult>> {
    if n_max < 8 {
        return Err(Error::Config(format!("alpha scan needs n_max >= 8, got {n_max}")));
    }
    deltas.par_iter().map(|&delta| scan_one(delta, n_max)).collect()
}

fn scan_one(delta: f64, n_max: usize) -> Result<AlphaScanResult> {
    let base = RecursionConfig::for_horizon(delta, n_max, Quadrature::RightRiemann)?;
    let x_max = base.x_max().max(probe_point(n_max, ALPHA_RANGE.1) + MIN_FRONT_MARGIN);
    let config = RecursionConfig::new(delta, x_max, n_max, Quadrature::RightRiemann)?;
    let table = ProbeTable::build(&config)?;
    let objective = |alpha: f64| table.series(alpha).map(|s| drift_rms(&s));

    let (lo, hi) = ALPHA_RANGE;
    let h = (hi - lo) / (ALPHA_COARSE_POINTS - 1) as f64;
    let coarse = (0..ALPHA_COARSE_POINTS)
        .map(|k| objective(lo + k as f64 * h))
        .collect::<Result<Vec<_>>>()?;
    let best = coarse
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .unwrap_or(0);
    if best == 0 || best == ALPHA_COARSE_POINTS - 1 {
        return Err(Error::Scan {
            delta,
            reason: format!("drift minimum not bracketed inside [{lo}, {hi}]"),
        });
    }

    let (a, b) = (lo + (best - 1) as f64 * h, lo + (best + 1) as f64 * h);
    let alpha_star = golden_section(a, b, GOLDEN_TOL, objective)?;
    let probe_series = table.series(alpha_star)?;
    Ok(AlphaScanResult { delta, alpha_star, drift: drift_rms(&probe_series), probe_series })
}

fn golden_section<F>(mut a: f64, mut b: f64, tol: f64, f: F) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(0.5 * (a + b))
}

/// `3/(2e)`, the coefficient of `ln n` in the front position.
pub const LOG_CORRECTION: f64 = 1.5 / E;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recursion::{closed_form_p1, init_p0, iterate_step, run_recursion};
    use approx::assert_abs_diff_eq;

    fn synthetic(f: impl Fn(f64) -> f64, range: std::ops::RangeInclusive<usize>) -> FrontTrace {
        FrontTrace::from_entries(0.5, range.map(|n| (n, f(n as f64))).collect()).unwrap()
    }

    /// Bisection on the closed-form first iterate.
    fn p1_root(level: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, 10.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if closed_form_p1(mid) > level {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn front_of_p0_and_p1() {
        let c = RecursionConfig::new(0.01, 6.0, 1, Quadrature::Trapezoid).unwrap();
        let p0 = init_p0(&c).unwrap();
        assert_abs_diff_eq!(front_position(&p0, 0.5).unwrap(), 2.0_f64.ln(), epsilon = 1e-4);
        let p1 = iterate_step(&p0, &c).unwrap();
        let root = p1_root(0.5);
        assert_abs_diff_eq!(root, 1.461186, epsilon = 1e-6);
        assert_abs_diff_eq!(front_position(&p1, 0.5).unwrap(), root, epsilon = 1e-4);
    }

    #[test]
    fn constant_curve_has_no_front() {
        let ones = GridFunction::constant(0.01, 100, 0, 1.0).unwrap();
        assert!(matches!(front_position(&ones, 0.5), Err(Error::FrontNotFound { .. })));
        let zeros = GridFunction::constant(0.01, 100, 0, 0.0).unwrap();
        assert!(matches!(front_position(&zeros, 0.5), Err(Error::FrontNotFound { .. })));
        assert!(matches!(front_position(&ones, 1.0), Err(Error::Config(_))));
    }

    #[test]
    fn lower_levels_cross_further_right() {
        let c = RecursionConfig::new(0.01, 50.0, 60, Quadrature::Trapezoid).unwrap();
        let r = run_recursion(&c, &[]).unwrap();
        let quarter = front_position(&r.last, 0.25).unwrap();
        let three_q = front_position(&r.last, 0.75).unwrap();
        assert!(quarter > three_q);
    }

    #[test]
    fn front_stable_under_refinement() {
        for n in [1usize, 10, 40] {
            let coarse = RecursionConfig::new(0.01, 40.0, n, Quadrature::Trapezoid).unwrap();
            let fine = RecursionConfig::new(0.005, 40.0, n, Quadrature::Trapezoid).unwrap();
            let a = front_position(&run_recursion(&coarse, &[]).unwrap().last, 0.5).unwrap();
            let b = front_position(&run_recursion(&fine, &[]).unwrap().last, 0.5).unwrap();
            assert!((a - b).abs() < 2.0 * 0.01, "n = {n}: {a} vs {b}");
        }
    }

    #[test]
    fn exact_linear_velocity() {
        let t = synthetic(|n| 0.25 * n, 0..=50);
        let fit = velocity_estimate(&t, (10, 40)).unwrap();
        assert_abs_diff_eq!(fit.v, 0.25, epsilon = 1e-12);
        assert_eq!(fit.b, 0.0);
        assert!(fit.residual_rms < 1e-12);
        assert!(matches!(velocity_estimate(&t, (10, 15)), Err(Error::Fit(_))));
    }

    #[test]
    fn log_fit_round_trip() {
        let t = synthetic(|n| n / E + LOG_CORRECTION * n.ln() + 0.7, 500..=2000);
        let fixed = log_correction_fit(&t, (500, 2000), Some(1.0 / E)).unwrap();
        assert_abs_diff_eq!(fixed.b, LOG_CORRECTION, epsilon = 1e-9);
        assert_abs_diff_eq!(fixed.a, 0.7, epsilon = 1e-9);
        let joint = log_correction_fit(&t, (500, 2000), None).unwrap();
        assert_abs_diff_eq!(joint.v, 1.0 / E, epsilon = 1e-9);
        assert_abs_diff_eq!(joint.b, LOG_CORRECTION, epsilon = 1e-9);
        assert_abs_diff_eq!(joint.a, 0.7, epsilon = 1e-9);

        let plain = synthetic(|n| n / E, 500..=2000);
        let fit = log_correction_fit(&plain, (500, 2000), Some(1.0 / E)).unwrap();
        assert_abs_diff_eq!(fit.b, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn log_fit_rejects_narrow_windows() {
        let t = synthetic(|n| n / E, 1..=3000);
        assert!(matches!(log_correction_fit(&t, (1000, 2000), None), Err(Error::Fit(_))));
        assert!(matches!(log_correction_fit(&t, (10, 40), None), Err(Error::Fit(_))));
    }

    #[test]
    fn richardson_removes_log_bias() {
        let t = synthetic(|n| 0.3 * n + 0.5 * n.ln() + 2.0, 1..=4000);
        assert_abs_diff_eq!(richardson_velocity(&t, 500).unwrap(), 0.3, epsilon = 1e-12);
        assert!(richardson_velocity(&t, 1500).is_err());
    }

    #[test]
    fn collapse_of_identical_snapshots_is_zero() {
        let c = RecursionConfig::new(0.01, 50.0, 40, Quadrature::Trapezoid).unwrap();
        let r = run_recursion(&c, &[40]).unwrap();
        let s = r.snapshot(40).unwrap().clone();
        assert_eq!(wave_shape_collapse(&[s.clone(), s], 0.5).unwrap(), 0.0);
        assert!(wave_shape_collapse(&r.snapshots, 0.5).is_err());
    }

    #[test]
    fn collapse_improves_with_age() {
        let c = RecursionConfig::new(0.01, 50.0, 100, Quadrature::Trapezoid).unwrap();
        let r = run_recursion(&c, &[1, 80, 100]).unwrap();
        let young = wave_shape_collapse(&[r.snapshots[0].clone(), r.snapshots[2].clone()], 0.5).unwrap();
        let old = wave_shape_collapse(&r.snapshots[1..], 0.5).unwrap();
        assert!(old < 0.02, "{old}");
        assert!(young > old);
    }

    #[test]
    fn probe_requires_all_generations() {
        let c = RecursionConfig::new(0.01, 50.0, 20, Quadrature::RightRiemann).unwrap();
        let sparse = run_recursion(&c, &[5]).unwrap();
        assert!(matches!(front_constancy_probe(&sparse, 1.0), Err(Error::Config(_))));
        let all: Vec<usize> = (0..=20).collect();
        let full = run_recursion(&c, &all).unwrap();
        let series = front_constancy_probe(&full, 1.0).unwrap();
        assert_eq!(series.first().unwrap().0, 2);
        assert_eq!(series.len(), 19);
    }

    #[test]
    fn probe_reports_first_offending_generation() {
        let c = RecursionConfig::new(0.01, 14.0, 20, Quadrature::RightRiemann).unwrap();
        let all: Vec<usize> = (0..=20).collect();
        let full = run_recursion(&c, &all).unwrap();
        match front_constancy_probe(&full, 2.0) {
            Err(Error::ProbeDomain { n, .. }) => {
                assert!(probe_point(n, 2.0) > full.last.x_max());
                assert!(probe_point(n - 1, 2.0) <= full.last.x_max());
            }
            other => panic!("expected a probe domain error, got {other:?}"),
        }
    }

    #[test]
    fn probe_table_agrees_with_full_snapshots() {
        let c = RecursionConfig::new(0.01, 60.0, 60, Quadrature::RightRiemann).unwrap();
        let all: Vec<usize> = (0..=60).collect();
        let full = run_recursion(&c, &all).unwrap();
        let table = ProbeTable::build(&c).unwrap();
        for alpha in [0.95, 0.9855, 1.01] {
            let a = front_constancy_probe(&full, alpha).unwrap();
            let b = table.series(alpha).unwrap();
            assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(&b) {
                assert_eq!(x.0, y.0);
                assert_abs_diff_eq!(x.1, y.1, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let m = golden_section(0.0, 2.0, 1e-9, |x| Ok((x - 1.3) * (x - 1.3))).unwrap();
        assert_abs_diff_eq!(m, 1.3, epsilon = 1e-8);
    }
}
