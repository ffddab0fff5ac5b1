//! Convergence studies against a fine-grid reference trajectory.

use std::fmt::Write as _;
use std::io::{self, Write};

use rayon::prelude::*;
use spinmagnus::expm::ExpmBackend;
use spinmagnus::hamiltonian::SpinSystem;
use spinmagnus::quadrature::QuadratureRule;
use spinmagnus::solvers::{propagate_with, Method, TimeGrid};
use spinmagnus::spinalg::{devectorize, vec_norm, C64};

use crate::config::RunConfig;
use crate::error::{BenchError, Result};

pub const REFERENCE_METHOD: Method = Method::Magnus1;
pub const REFERENCE_RULE: QuadratureRule = QuadratureRule::Midpoint;

/// Rows closer than this factor to the series minimum count as plateau.
pub const PLATEAU_FACTOR: f64 = 10.0;

/// Leading rows with error above this fraction of the largest possible
/// distance `2 ||rho_0||_F` are treated as pre-asymptotic.
pub const SATURATION_FRACTION: f64 = 0.1;

/// One convergence series: a method and the quadrature rule it uses.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Series {
    pub method: Method,
    pub rule: QuadratureRule,
}

impl Series {
    pub fn new(method: Method, rule: QuadratureRule) -> Self {
        Self { method, rule }
    }

    /// `method/rule` for Magnus methods; the others ignore the rule.
    pub fn label(&self) -> String {
        if self.method.is_magnus() {
            format!("{}/{}", self.method, self.rule)
        } else {
            self.method.to_string()
        }
    }
}

impl std::str::FromStr for Series {
    type Err = BenchError;

    /// `method` or `method:rule`; the rule defaults to midpoint.
    fn from_str(s: &str) -> Result<Self> {
        let (m, r) = s.split_once(':').unwrap_or((s, "midpoint"));
        let method = m
            .trim()
            .parse()
            .map_err(|e| BenchError::Validation(format!("{s:?}: {e}")))?;
        let rule = r
            .trim()
            .parse()
            .map_err(|e| BenchError::Validation(format!("{s:?}: {e}")))?;
        Ok(Self { method, rule })
    }
}

/// Worst-case deviations from the conserved quantities along one run.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StructureStats {
    /// `max_n |tr rho_n - tr rho_0|`
    pub trace: f64,
    /// `max_n max|rho_n - rho_n^H|`
    pub hermiticity: f64,
    /// `max_n | ||r_n|| - ||r_0|| |`
    pub norm_drift: f64,
    /// Per-step norm changes `||r_{n+1}|| - ||r_n||`, extremes.
    pub min_norm_step: f64,
    pub max_norm_step: f64,
}

struct StructureTracker {
    dim: usize,
    trace0: C64,
    norm0: f64,
    prev_norm: f64,
    stats: StructureStats,
}

impl StructureTracker {
    fn new(dim: usize) -> Self {
        Self {
            dim,
            trace0: C64::from(0.0),
            norm0: 0.0,
            prev_norm: 0.0,
            stats: StructureStats {
                min_norm_step: f64::INFINITY,
                max_norm_step: f64::NEG_INFINITY,
                ..Default::default()
            },
        }
    }

    fn visit(&mut self, n: usize, x: &[C64]) -> spinmagnus::Result<()> {
        let rho = devectorize(x, self.dim)?;
        let norm = vec_norm(x);
        if n == 0 {
            self.trace0 = rho.trace();
            self.norm0 = norm;
        } else {
            let step = norm - self.prev_norm;
            self.stats.min_norm_step = self.stats.min_norm_step.min(step);
            self.stats.max_norm_step = self.stats.max_norm_step.max(step);
        }
        self.prev_norm = norm;
        let s = &mut self.stats;
        s.trace = nan_max(s.trace, (rho.trace() - self.trace0).norm());
        s.hermiticity = nan_max(s.hermiticity, rho.hermitian_deviation());
        s.norm_drift = nan_max(s.norm_drift, (norm - self.norm0).abs());
        Ok(())
    }
}

fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// Reference states on the grid with exponent `sample_k`.
#[derive(Clone, Debug)]
pub struct Reference {
    pub grid: TimeGrid,
    pub sample_grid: TimeGrid,
    pub states: Vec<Vec<C64>>,
    pub structure: StructureStats,
}

/// Propagates `series` at exponent `k`, keeping every state on the grid
/// with exponent `sample_k <= k`.
pub fn compute_reference(
    system: &SpinSystem,
    t_span: [f64; 2],
    k: u32,
    sample_k: u32,
    series: Series,
    backend: ExpmBackend,
) -> Result<Reference> {
    let grid = TimeGrid::new(t_span[0], t_span[1], k)?;
    let sample_grid = TimeGrid::new(t_span[0], t_span[1], sample_k)?;
    let stride = sample_grid.stride_in(&grid)?;
    let mut states = Vec::with_capacity(sample_grid.len());
    let mut tracker = StructureTracker::new(system.dim());
    propagate_with(system, &grid, series.method, series.rule, backend, |n, _, x| {
        tracker.visit(n, x)?;
        if n % stride == 0 {
            states.push(x.to_vec());
        }
        Ok(())
    })
    .map_err(|e| run_error(series, k, e))?;
    Ok(Reference {
        grid,
        sample_grid,
        states,
        structure: tracker.stats,
    })
}

fn run_error(series: Series, k: u32, source: spinmagnus::Error) -> BenchError {
    BenchError::Run {
        method: series.method.to_string(),
        rule: series.rule.to_string(),
        k,
        source,
    }
}

/// Maximum Frobenius distance to `reference` over the grid points of
/// exponent `k`, with the structure statistics of the run.
pub fn max_error_against(
    system: &SpinSystem,
    reference: &Reference,
    k: u32,
    series: Series,
    backend: ExpmBackend,
) -> Result<(f64, StructureStats)> {
    let grid = TimeGrid::new(reference.grid.t0(), reference.grid.tf(), k)?;
    let stride = grid.stride_in(&reference.sample_grid)?;
    let mut worst = 0.0f64;
    let mut tracker = StructureTracker::new(system.dim());
    propagate_with(system, &grid, series.method, series.rule, backend, |n, _, x| {
        tracker.visit(n, x)?;
        let r = &reference.states[n * stride];
        let d = x.iter().zip(r).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        worst = nan_max(worst, d);
        Ok(())
    })
    .map_err(|e| run_error(series, k, e))?;
    Ok((worst, tracker.stats))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub k: u32,
    pub h: f64,
    pub max_error: f64,
    pub structure: StructureStats,
}

/// Inclusive `k` bounds applied before plateau exclusion. Without explicit
/// bounds, leading saturated rows are dropped.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FitWindow {
    pub k_min: Option<u32>,
    pub k_max: Option<u32>,
}

impl FitWindow {
    pub fn new(k_min: Option<u32>, k_max: Option<u32>) -> Self {
        Self { k_min, k_max }
    }

    /// `(h, err)` pairs in the window. `saturation` is the error level that
    /// marks pre-asymptotic rows when `k_min` is unset.
    pub fn select(&self, rows: &[ConvergenceRow], saturation: f64) -> Vec<(f64, f64)> {
        let in_range = rows
            .iter()
            .filter(|r| self.k_min.is_none_or(|k| r.k >= k) && self.k_max.is_none_or(|k| r.k <= k));
        let mut out: Vec<(f64, f64)> = match self.k_min {
            Some(_) => in_range.map(|r| (r.h, r.max_error)).collect(),
            None => in_range
                .skip_while(|r| r.max_error > SATURATION_FRACTION * saturation)
                .map(|r| (r.h, r.max_error))
                .collect(),
        };
        out.sort_by(|a, b| b.0.total_cmp(&a.0));
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    /// Rows used after plateau exclusion.
    pub rows_used: usize,
    pub h_max: f64,
    pub h_min: f64,
}

fn lsq_slope(rows: &[(f64, f64)]) -> f64 {
    let n = rows.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows.iter().map(|&(h, e)| (h.ln(), e.ln())).unzip();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Least-squares slope of `ln err` against `ln h` without plateau rows.
///
/// Rows with `err < PLATEAU_FACTOR * min err` are plateau candidates. They
/// are dropped unless they still decay at least half as fast as the other
/// rows, in which case the series has not reached a floor and every row is
/// kept.
pub fn fit_slope(rows: &[(f64, f64)]) -> Result<SlopeFit> {
    let positive: Vec<(f64, f64)> = rows
        .iter()
        .copied()
        .filter(|&(h, e)| h > 0.0 && e > 0.0 && h.is_finite() && e.is_finite())
        .collect();
    let floor = positive.iter().map(|&(_, e)| e).fold(f64::INFINITY, f64::min);
    if positive.len() < 3 {
        return Err(BenchError::TooFewRows { usable: positive.len() });
    }
    let (tail, high): (Vec<(f64, f64)>, Vec<(f64, f64)>) =
        positive.iter().partition(|&&(_, e)| e < PLATEAU_FACTOR * floor);
    let converging =
        high.len() >= 2 && tail.len() >= 2 && distinct_h(&tail) && lsq_slope(&tail) >= 0.5 * lsq_slope(&high);
    let used = if converging { positive } else { high };
    if used.len() < 3 {
        return Err(BenchError::TooFewRows { usable: used.len() });
    }
    let h_max = used.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);
    let h_min = used.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    Ok(SlopeFit {
        slope: lsq_slope(&used),
        rows_used: used.len(),
        h_max,
        h_min,
    })
}

fn distinct_h(rows: &[(f64, f64)]) -> bool {
    rows.iter().any(|r| r.0 != rows[0].0)
}

#[derive(Clone, Debug)]
pub struct SeriesResult {
    pub series: Series,
    pub rows: Vec<ConvergenceRow>,
    pub fit: Option<SlopeFit>,
}

impl SeriesResult {
    /// Smallest error in the sweep.
    pub fn floor(&self) -> f64 {
        self.rows.iter().map(|r| r.max_error).fold(f64::INFINITY, f64::min)
    }
}

#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub reference_k: u32,
    pub reference_structure: StructureStats,
    pub window: FitWindow,
    pub series: Vec<SeriesResult>,
}

impl ConvergenceReport {
    pub fn get(&self, series: Series) -> Option<&SeriesResult> {
        self.series.iter().find(|s| s.series == series)
    }

    /// Columns `method,rule,k,h,max_error`.
    pub fn write_csv(&self, mut w: impl Write) -> io::Result<()> {
        writeln!(w, "method,rule,k,h,max_error")?;
        for s in &self.series {
            for r in &s.rows {
                writeln!(
                    w,
                    "{},{},{},{:.16e},{:.16e}",
                    s.series.method, s.series.rule, r.k, r.h, r.max_error
                )?;
            }
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV is ASCII")
    }

    /// gnuplot script drawing every series of `csv_name` on log-log axes.
    pub fn gnuplot_script(&self, csv_name: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "set datafile separator ','");
        let _ = writeln!(s, "set logscale xy");
        let _ = writeln!(s, "set xlabel 'h'");
        let _ = writeln!(s, "set ylabel 'max error'");
        let _ = writeln!(s, "set key left top");
        let plots: Vec<String> = self
            .series
            .iter()
            .map(|r| {
                let (m, q) = (r.series.method, r.series.rule);
                format!("'< grep \"^{m},{q},\" {csv_name}' using 4:5 with linespoints title '{m}/{q}'")
            })
            .collect();
        let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
        s
    }

    /// One line per series with its fitted slope and floor.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for r in &self.series {
            let slope = r.fit.map_or("n/a".to_string(), |f| format!("{:.16e}", f.slope));
            let _ = writeln!(s, "{}: slope {slope}, floor {:.16e}", r.series.label(), r.floor());
        }
        s
    }
}

/// Sweeps `k_min..=k_max` for each series against a magnus1/midpoint
/// reference at `reference_k`. Cells run concurrently.
pub fn run_convergence(
    config: &RunConfig,
    k_min: u32,
    k_max: u32,
    reference_k: u32,
    series: &[Series],
    window: FitWindow,
) -> Result<ConvergenceReport> {
    if k_min > k_max {
        return Err(BenchError::Validation(format!("k_min {k_min} exceeds k_max {k_max}")));
    }
    if k_max >= reference_k {
        return Err(BenchError::Validation(format!(
            "k_max {k_max} must be below reference_k {reference_k}"
        )));
    }
    let system = &config.system;
    let backend = config.expm_backend;
    let reference = compute_reference(
        system,
        config.t_span,
        reference_k,
        k_max,
        Series::new(REFERENCE_METHOD, REFERENCE_RULE),
        backend,
    )?;
    let cells: Vec<(usize, u32)> = (0..series.len())
        .flat_map(|i| (k_min..=k_max).map(move |k| (i, k)))
        .collect();
    let results = cells
        .par_iter()
        .map(|&(i, k)| max_error_against(system, &reference, k, series[i], backend))
        .collect::<Result<Vec<_>>>()?;

    let saturation = 2.0 * system.rho0_matrix().norm_fro();
    let mut out = Vec::with_capacity(series.len());
    let per_series = (k_max - k_min + 1) as usize;
    for (i, s) in series.iter().enumerate() {
        let rows: Vec<ConvergenceRow> = results[i * per_series..(i + 1) * per_series]
            .iter()
            .zip(k_min..=k_max)
            .map(|(&(max_error, structure), k)| ConvergenceRow {
                k,
                h: 0.5f64.powi(k as i32),
                max_error,
                structure,
            })
            .collect();
        let fit = fit_slope(&window.select(&rows, saturation)).ok();
        out.push(SeriesResult { series: *s, rows, fit });
    }
    Ok(ConvergenceReport {
        reference_k,
        reference_structure: reference.structure,
        window,
        series: out,
    })
}
