//! Measurable pieces of the nowhere-density argument: growth of `|ζ|` left
//! of the critical line, arc length of vertical-line curves, and how many
//! cells of a small lattice a curve passes through.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::VerticalSegment;
use crate::error::{Error, Result};
use crate::quad::{integrate_panels, uniform_breaks, QuadOptions};
use crate::zeta::{EvalConfig, LineEvaluator};
use crate::ComplexPoint;

/// Smallest number of windows in an exponent fit.
pub const MIN_FIT_POINTS: usize = 20;

/// Smallest `t_lo` accepted by [`modulus_exponent_fit`].
pub const MIN_FIT_HEIGHT: f64 = 10.0;

/// Largest height the fits and probes accept.
pub const MAX_HEIGHT: f64 = 1e6;

#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    pub points: usize,
    /// Sampling step inside each window before local refinement.
    pub step: f64,
    pub cfg: EvalConfig,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            points: MIN_FIT_POINTS,
            step: 0.2,
            cfg: EvalConfig::with_target(1e-6),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub sigma: f64,
    pub t_range: (f64, f64),
    /// Slope of `log m(t)` against `log t`.
    pub fitted_exponent: f64,
    /// Intercept, an estimate of `log c`.
    pub intercept: f64,
    /// Root mean square residual of the regression.
    pub fit_residual: f64,
    pub min_modulus: f64,
    /// `(t, m(t))` with `m(t)` the minimum of `|ζ(σ + iu)|` over `u ∈ [t, 2t]`.
    pub points: Vec<(f64, f64)>,
    /// Height at which evaluation failed; the fit uses the windows before it.
    pub failed_at: Option<f64>,
}

/// Fits `min_{t ≤ u ≤ 2t} |ζ(σ + iu)| ≈ c t^e` over log-spaced `t`.
pub fn modulus_exponent_fit(sigma: f64, t_lo: f64, t_hi: f64, opts: &FitOptions) -> Result<ExponentFit> {
    if !(sigma < 0.5) {
        return Err(Error::Domain(format!("sigma = {sigma} must be below 1/2")));
    }
    if !(t_lo >= MIN_FIT_HEIGHT && t_lo < t_hi && 2.0 * t_hi <= MAX_HEIGHT) {
        return Err(Error::InvalidInput(format!(
            "need {MIN_FIT_HEIGHT} <= t_lo < t_hi <= {}, got [{t_lo}, {t_hi}]",
            MAX_HEIGHT / 2.0
        )));
    }
    if opts.points < MIN_FIT_POINTS || !(opts.step > 0.0) {
        return Err(Error::InvalidInput(format!(
            "need at least {MIN_FIT_POINTS} windows and a positive step"
        )));
    }
    let n = opts.points;
    let ratio = (t_hi / t_lo).powf(1.0 / (n - 1) as f64);
    let heights: Vec<f64> = (0..n)
        .map(|k| if k + 1 == n { t_hi } else { t_lo * ratio.powi(k as i32) })
        .collect();
    let ev = LineEvaluator::new(sigma, 2.0 * t_hi, opts.cfg);
    let modulus = |u: f64| ev.value(u).map(|v| v.value.norm());

    let minima: Vec<Result<(f64, f64)>> = heights
        .par_iter()
        .map(|&t| window_minimum(&modulus, t, 2.0 * t, opts.step).map(|m| (t, m)))
        .collect();
    let mut points = Vec::with_capacity(n);
    let mut failed_at = None;
    for (m, &t) in minima.into_iter().zip(&heights) {
        match m {
            Ok(p) => points.push(p),
            Err(e) => {
                if points.len() < 2 {
                    return Err(e);
                }
                failed_at = Some(t);
                break;
            }
        }
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let (slope, intercept, rms) = linear_fit(&xs, &ys);
    Ok(ExponentFit {
        sigma,
        t_range: (t_lo, t_hi),
        fitted_exponent: slope,
        intercept,
        fit_residual: rms,
        min_modulus: points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min),
        points,
        failed_at,
    })
}

/// Minimum of `g` on `[a, b]`: grid scan, then golden-section search around
/// the best grid point.
fn window_minimum(g: &(impl Fn(f64) -> Result<f64> + Sync), a: f64, b: f64, step: f64) -> Result<f64> {
    let n = ((b - a) / step).ceil() as usize;
    let h = (b - a) / n as f64;
    let mut best = (a, g(a)?);
    for k in 1..=n {
        let u = if k == n { b } else { a + k as f64 * h };
        let v = g(u)?;
        if v < best.1 {
            best = (u, v);
        }
    }
    let (mut lo, mut hi) = ((best.0 - h).max(a), (best.0 + h).min(b));
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (g(x1)?, g(x2)?);
    while hi - lo > 1e-9 * (1.0 + best.0.abs()) {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = g(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = g(x2)?;
        }
    }
    Ok(best.1.min(f1).min(f2))
}

/// Least squares line `y ≈ a x + b`; returns `(a, b, rms residual)`.
fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let a = sxy / sxx;
    let b = my - a * mx;
    let ss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - a * x - b).powi(2)).sum();
    (a, b, (ss / n).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArcLength {
    pub sigma: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub value: f64,
    /// Quadrature error estimate plus the engine bound times the length.
    pub error: f64,
}

/// Length of `t ↦ ζ(σ + it)` over the segment, `∫ |ζ′(σ + it)| dt`.
/// The segment step is not used.
pub fn arc_length(seg: &VerticalSegment, cfg: &EvalConfig) -> Result<ArcLength> {
    seg.validate()?;
    let ev = LineEvaluator::new(seg.sigma, seg.max_abs_t(), *cfg);
    let breaks = uniform_breaks(seg.t_min, seg.t_max, 1.0);
    let height = seg.height();
    let worst = std::sync::Mutex::new(0.0f64);
    let q = integrate_panels(
        |t| {
            let j = ev.slope(t)?;
            let mut w = worst.lock().unwrap_or_else(|p| p.into_inner());
            *w = w.max(j.component_bounds[1]);
            Ok(j.d1.norm())
        },
        &breaks,
        &QuadOptions::abs(1e-10 * height),
    )?;
    let engine = *worst.lock().unwrap_or_else(|p| p.into_inner());
    Ok(ArcLength {
        sigma: seg.sigma,
        t_min: seg.t_min,
        t_max: seg.t_max,
        value: q.value,
        error: q.error + engine * height,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VisitCell {
    pub re: f64,
    pub im: f64,
    pub visited: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridVisitReport {
    pub sigma: f64,
    pub t_range: (f64, f64),
    pub step: f64,
    pub disk_center: ComplexPoint,
    pub disk_radius: f64,
    /// Lattice `(1/N) Z[i]`.
    pub n: u64,
    pub cells_total: u64,
    pub cells_visited: u64,
    pub fraction: f64,
    /// Largest `|ζ′|` over the samples.
    pub max_slope: f64,
    /// Every lattice point in the disk, by increasing real then imaginary
    /// part.
    pub cells: Vec<VisitCell>,
}

/// Largest sampling step allowed for a lattice of spacing `1/n` when
/// `|ζ′| ≤ max_slope` on the segment.
pub fn visit_step_limit(n: u64, max_slope: f64) -> f64 {
    1.0 / (6.0 * n as f64) / max_slope.max(1.0)
}

/// Largest `|ζ′(σ + it)|` on a probe grid of spacing `probe`, times
/// `safety`; a practical input for [`visit_step_limit`].
pub fn sampled_max_slope(sigma: f64, t_min: f64, t_max: f64, probe: f64, safety: f64, cfg: &EvalConfig) -> Result<f64> {
    let seg = VerticalSegment::new(sigma, t_min, t_max, probe)?;
    let ev = LineEvaluator::new(sigma, seg.max_abs_t(), *cfg);
    let slopes: Result<Vec<f64>> = seg.grid().par_iter().map(|&t| Ok(ev.slope(t)?.d1.norm())).collect();
    Ok(safety * slopes?.into_iter().fold(0.0, f64::max))
}

/// Lattice points `(k + il)/n` with `|z − center| ≤ radius`, ordered by `k`
/// then `l`.
fn disk_lattice(center: ComplexPoint, radius: f64, n: u64) -> Vec<(i64, i64)> {
    let nf = n as f64;
    let k_lo = ((center.re - radius) * nf).floor() as i64;
    let k_hi = ((center.re + radius) * nf).ceil() as i64;
    let l_lo = ((center.im - radius) * nf).floor() as i64;
    let l_hi = ((center.im + radius) * nf).ceil() as i64;
    let mut out = Vec::new();
    for k in k_lo..=k_hi {
        for l in l_lo..=l_hi {
            let z = ComplexPoint::new(k as f64 / nf, l as f64 / nf);
            if (z - center).norm() <= radius {
                out.push((k, l));
            }
        }
    }
    out
}

/// Marks the cells of `(1/N) Z[i]` inside the disk that the sampled curve
/// passes within `1/(3N)` of.
pub fn grid_visit_density(
    seg: &VerticalSegment,
    disk_center: ComplexPoint,
    disk_radius: f64,
    n: u64,
    cfg: &EvalConfig,
) -> Result<GridVisitReport> {
    seg.validate()?;
    if n == 0 {
        return Err(Error::InvalidInput("N must be at least 1".into()));
    }
    if !(disk_radius > 0.0 && disk_radius.is_finite() && disk_center.re.is_finite() && disk_center.im.is_finite()) {
        return Err(Error::InvalidInput(
            "disk must have a finite center and positive radius".into(),
        ));
    }
    let lattice = disk_lattice(disk_center, disk_radius, n);
    let index: HashSet<(i64, i64)> = lattice.iter().copied().collect();
    let nf = n as f64;
    let reach = 1.0 / (3.0 * nf);

    let ev = LineEvaluator::new(seg.sigma, seg.max_abs_t(), *cfg);
    let grid = seg.grid();
    // each chunk returns (max slope, visited cells)
    type ChunkVisits = (f64, Vec<(i64, i64)>);
    let parts: Vec<Result<ChunkVisits>> = grid
        .par_chunks(4096)
        .map(|chunk| {
            let mut slope = 0.0f64;
            let mut hits = Vec::new();
            for &t in chunk {
                let j = ev.slope(t)?;
                slope = slope.max(j.d1.norm());
                let z = j.value;
                let cell = ((z.re * nf).round() as i64, (z.im * nf).round() as i64);
                let centre = ComplexPoint::new(cell.0 as f64 / nf, cell.1 as f64 / nf);
                if (z - centre).norm() <= reach && index.contains(&cell) {
                    hits.push(cell);
                }
            }
            Ok((slope, hits))
        })
        .collect();
    let mut max_slope = 0.0f64;
    let mut visited = HashSet::new();
    for p in parts {
        let (s, hits) = p?;
        max_slope = max_slope.max(s);
        visited.extend(hits);
    }
    let required = visit_step_limit(n, max_slope);
    if seg.step > required {
        return Err(Error::SamplingTooCoarse {
            step: seg.step,
            required,
        });
    }
    let cells: Vec<VisitCell> = lattice
        .iter()
        .map(|&(k, l)| VisitCell {
            re: k as f64 / nf,
            im: l as f64 / nf,
            visited: visited.contains(&(k, l)),
        })
        .collect();
    let cells_total = cells.len() as u64;
    let cells_visited = visited.len() as u64;
    Ok(GridVisitReport {
        sigma: seg.sigma,
        t_range: (seg.t_min, seg.point(seg.len() - 1)),
        step: seg.step,
        disk_center,
        disk_radius,
        n,
        cells_total,
        cells_visited,
        fraction: if cells_total == 0 {
            0.0
        } else {
            cells_visited as f64 / cells_total as f64
        },
        max_slope,
        cells,
    })
}
