//! Searches for real shifts `τ` with `ζ(σ + i(t + τ)) ≈ g(t)` on a segment.
//!
//! Errors are maxima over the target's sample grid, not certified maxima
//! over the continuum.

use crate::curvature::VerticalSegment;
use crate::error::{Error, Result};
use crate::frenet::{reconstruct_plane, InvariantProfile};
use crate::zeta::{eval_zeta_jet, EvalConfig, LineEvaluator};
use crate::ComplexPoint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const DEFAULT_TAU_STEP: f64 = 0.05;

/// Golden-section refinement stops once the bracket is this narrow
/// (relative to `max(1, |τ|)`).
pub const DEFAULT_REFINE_TOL: f64 = 1e-12;

/// Slack on the "spacing ≤ step" check for targets.
const SPACING_SLACK: f64 = 1e-9;

/// A sampled function on a vertical segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentTarget {
    pub seg: VerticalSegment,
    pub samples: Vec<(f64, ComplexPoint)>,
    pub label: String,
}

impl SegmentTarget {
    pub fn new(seg: VerticalSegment, samples: Vec<(f64, ComplexPoint)>, label: &str) -> Result<Self> {
        seg.validate()?;
        if label.is_empty() {
            return Err(Error::InvalidInput("target label must be nonempty".into()));
        }
        if samples.is_empty() {
            return Err(Error::InvalidInput("target has no samples".into()));
        }
        let slack = SPACING_SLACK * (1.0 + seg.max_abs_t());
        for &(t, g) in &samples {
            if !(t.is_finite() && g.re.is_finite() && g.im.is_finite()) {
                return Err(Error::InvalidInput("target samples must be finite".into()));
            }
            if t < seg.t_min - slack || t > seg.t_max + slack {
                return Err(Error::InvalidInput(format!(
                    "target sample t = {t} lies outside [{}, {}]",
                    seg.t_min, seg.t_max
                )));
            }
        }
        for w in samples.windows(2) {
            let gap = w[1].0 - w[0].0;
            if !(gap > 0.0) {
                return Err(Error::InvalidInput(
                    "target parameters must be strictly increasing".into(),
                ));
            }
            if gap > seg.step * (1.0 + SPACING_SLACK) {
                return Err(Error::SamplingTooCoarse {
                    step: gap,
                    required: seg.step,
                });
            }
        }
        Ok(Self {
            seg,
            samples,
            label: label.to_string(),
        })
    }

    /// `g(t) = f(t)` on the grid of `seg`.
    pub fn from_fn(seg: VerticalSegment, label: &str, f: impl Fn(f64) -> ComplexPoint) -> Result<Self> {
        seg.validate()?;
        let samples = seg.grid().into_iter().map(|t| (t, f(t))).collect();
        Self::new(seg, samples, label)
    }

    /// `g(t) = ζ(σ + i(t + τ₀))` on the grid of `seg`.
    pub fn from_zeta(seg: VerticalSegment, tau0: f64, cfg: &EvalConfig) -> Result<Self> {
        seg.validate()?;
        let ev = LineEvaluator::new(seg.sigma, seg.max_abs_t() + tau0.abs(), *cfg);
        let samples = seg
            .grid()
            .into_par_iter()
            .map(|t| Ok((t, ev.value(t + tau0)?.value)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(seg, samples, &format!("zeta(sigma + i(t + {tau0}))"))
    }

    /// The inverse curve `t ↦ ζ(σ + i(a + b − t))`: the points of the grid
    /// of `seg` visited in the opposite direction. Sample `j` has parameter
    /// `a + b − t_j` and value `ζ(σ + i t_j)` for the forward grid `t_j`.
    pub fn inverse_curve(seg: VerticalSegment, cfg: &EvalConfig) -> Result<Self> {
        seg.validate()?;
        let ev = LineEvaluator::new(seg.sigma, seg.max_abs_t(), *cfg);
        let (a, b) = (seg.t_min, seg.t_max);
        let mut samples = seg
            .grid()
            .into_par_iter()
            .map(|t| Ok((a + b - t, ev.value(t)?.value)))
            .collect::<Result<Vec<_>>>()?;
        samples.reverse();
        Self::new(seg, samples, "zeta(sigma + i(a + b - t))")
    }

    /// Reverses the samples and reindexes them by `a + b − t`.
    pub fn reversed(&self) -> Self {
        let (a, b) = (self.seg.t_min, self.seg.t_max);
        Self {
            seg: self.seg,
            samples: self.samples.iter().rev().map(|&(t, g)| (a + b - t, g)).collect(),
            label: format!("reversed {}", self.label),
        }
    }

    fn max_abs_t(&self) -> f64 {
        self.samples.iter().map(|s| s.0.abs()).fold(0.0, f64::max)
    }
}

/// How the distance between `ζ` and the target is measured at one sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    /// `|ζ − g|`.
    Complex,
    /// `max(|Re ζ − Re g|, |Im ζ − Im g|)`.
    Componentwise,
}

impl Metric {
    fn distance(self, z: ComplexPoint, g: ComplexPoint) -> f64 {
        let d = z - g;
        match self {
            Metric::Complex => d.norm(),
            Metric::Componentwise => d.re.abs().max(d.im.abs()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftCandidate {
    pub tau: f64,
    pub sup_error: f64,
    /// Largest engine error bound among the evaluations behind `sup_error`.
    pub eval_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub label: String,
    pub metric: Metric,
    pub candidates: Vec<ShiftCandidate>,
    pub epsilon: f64,
    pub tau_range: (f64, f64),
    pub tau_step: f64,
    pub grid_points: usize,
    pub hit_count: usize,
    /// Total length of the grid cells whose error is below `epsilon`.
    pub hit_measure: f64,
    pub density_estimate: f64,
    /// Estimate of `max |ζ′|` along the scanned strip. A bound for σ > 1, the
    /// largest value seen otherwise.
    pub lipschitz_estimate: f64,
    pub lipschitz_certified: bool,
    /// `lipschitz_estimate · tau_step / 2`: how far the error can drop
    /// between grid points.
    pub drift_bound: f64,
    /// `drift_bound < epsilon / 2`.
    pub step_adequate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    pub tau_step: f64,
    pub refine_tol: f64,
    pub cfg: EvalConfig,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            tau_step: DEFAULT_TAU_STEP,
            refine_tol: DEFAULT_REFINE_TOL,
            cfg: EvalConfig::default(),
        }
    }
}

/// Error of one shift, with the largest engine bound involved.
#[derive(Debug, Clone, Copy)]
struct ShiftError {
    error: f64,
    bound: f64,
}

/// Evaluates the error at `tau`. With `cap`, stops at the first sample whose
/// distance reaches it; the reported error is then only a lower bound.
fn shift_error(
    ev: &LineEvaluator,
    target: &SegmentTarget,
    tau: f64,
    metric: Metric,
    cap: Option<f64>,
) -> Result<ShiftError> {
    let mut out = ShiftError { error: 0.0, bound: 0.0 };
    for &(t, g) in &target.samples {
        let z = ev.value(t + tau)?;
        out.error = out.error.max(metric.distance(z.value, g));
        out.bound = out.bound.max(z.abs_error_bound);
        if cap.is_some_and(|c| out.error >= c) {
            break;
        }
    }
    Ok(out)
}

fn evaluator(target: &SegmentTarget, tau_hi: f64, cfg: &EvalConfig) -> LineEvaluator {
    LineEvaluator::new(target.seg.sigma, target.max_abs_t() + tau_hi.abs(), *cfg)
}

/// `max_t |ζ(σ + i(t + τ)) − g(t)|` over the target samples.
pub fn sup_error(target: &SegmentTarget, tau: f64, cfg: &EvalConfig) -> Result<f64> {
    Ok(shift_candidate(target, tau, Metric::Complex, cfg)?.sup_error)
}

/// The error at `tau` under `metric`, with its evaluation bound.
pub fn shift_candidate(target: &SegmentTarget, tau: f64, metric: Metric, cfg: &EvalConfig) -> Result<ShiftCandidate> {
    cfg.validate()?;
    if !tau.is_finite() {
        return Err(Error::InvalidInput("shift must be finite".into()));
    }
    let ev = evaluator(target, tau, cfg);
    let e = shift_error(&ev, target, tau, metric, None)?;
    Ok(ShiftCandidate {
        tau,
        sup_error: e.error,
        eval_bound: e.bound,
    })
}

/// Scans `τ ∈ [tau_lo, tau_hi)` under the complex sup metric.
pub fn scan_shifts(
    target: &SegmentTarget,
    tau_lo: f64,
    tau_hi: f64,
    epsilon: f64,
    opts: &ScanOptions,
) -> Result<ScanReport> {
    scan_with_metric(target, tau_lo, tau_hi, epsilon, Metric::Complex, opts)
}

/// Scans for `Re ζ ≈ f` and `Im ζ ≈ g` simultaneously; the error is the
/// larger of the two sup errors. `f` and `g` must share their parameters.
pub fn joint_re_im_scan(
    seg: VerticalSegment,
    f: &[(f64, f64)],
    g: &[(f64, f64)],
    tau_lo: f64,
    tau_hi: f64,
    epsilon: f64,
    opts: &ScanOptions,
) -> Result<ScanReport> {
    let target = joint_target(seg, f, g)?;
    scan_with_metric(&target, tau_lo, tau_hi, epsilon, Metric::Componentwise, opts)
}

/// The complex target `f + ig`.
pub fn joint_target(seg: VerticalSegment, f: &[(f64, f64)], g: &[(f64, f64)]) -> Result<SegmentTarget> {
    if f.len() != g.len() || f.iter().zip(g).any(|(a, b)| a.0 != b.0) {
        return Err(Error::InvalidInput(
            "real and imaginary targets must share their samples".into(),
        ));
    }
    let samples = f
        .iter()
        .zip(g)
        .map(|(a, b)| (a.0, ComplexPoint::new(a.1, b.1)))
        .collect();
    SegmentTarget::new(seg, samples, "f + ig")
}

/// The lattice `k · step` inside `[lo, hi)` with each point's cell length.
///
/// Using multiples of `step` keeps the grid identical when a range is split
/// at a lattice point, so hit measures add up exactly.
fn tau_lattice(lo: f64, hi: f64, step: f64) -> Vec<(f64, f64)> {
    let first = (lo / step).ceil() as i64;
    let mut out = Vec::new();
    let mut k = first;
    loop {
        let tau = k as f64 * step;
        if tau >= hi {
            break;
        }
        if tau >= lo {
            out.push((tau, step.min(hi - tau)));
        }
        k += 1;
    }
    out
}

pub fn scan_with_metric(
    target: &SegmentTarget,
    tau_lo: f64,
    tau_hi: f64,
    epsilon: f64,
    metric: Metric,
    opts: &ScanOptions,
) -> Result<ScanReport> {
    opts.cfg.validate()?;
    if !(tau_lo.is_finite() && tau_hi.is_finite() && tau_lo < tau_hi) {
        return Err(Error::InvalidInput(format!("bad shift range [{tau_lo}, {tau_hi})")));
    }
    if !(opts.tau_step > 0.0 && opts.tau_step <= tau_hi - tau_lo) {
        return Err(Error::InvalidInput(format!("bad shift step {}", opts.tau_step)));
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidInput("epsilon must be positive".into()));
    }
    if !(opts.refine_tol > 0.0) {
        return Err(Error::InvalidInput("refinement tolerance must be positive".into()));
    }
    let ev = evaluator(target, tau_hi.abs().max(tau_lo.abs()), &opts.cfg);
    let lattice = tau_lattice(tau_lo, tau_hi, opts.tau_step);
    let errors = lattice
        .par_iter()
        .map(|&(tau, _)| shift_error(&ev, target, tau, metric, Some(epsilon)))
        .collect::<Result<Vec<_>>>()?;

    let mut hit_count = 0;
    let mut hit_measure = 0.0;
    for (e, &(_, w)) in errors.iter().zip(&lattice) {
        if e.error < epsilon {
            hit_count += 1;
            hit_measure += w;
        }
    }

    // Local minima below epsilon; capped neighbors are at least epsilon.
    let minima: Vec<usize> = (0..errors.len())
        .filter(|&i| {
            let e = errors[i].error;
            e < epsilon && (i == 0 || e < errors[i - 1].error) && (i + 1 == errors.len() || e <= errors[i + 1].error)
        })
        .collect();
    let mut candidates = minima
        .par_iter()
        .map(|&i| {
            let lo = if i == 0 { lattice[i].0 } else { lattice[i - 1].0 };
            let hi = lattice.get(i + 1).map_or(tau_hi, |p| p.0);
            refine(&ev, target, metric, lo, hi, lattice[i].0, opts.refine_tol)
        })
        .collect::<Result<Vec<_>>>()?;
    candidates.retain(|c| c.sup_error < epsilon);
    candidates.sort_by(|a, b| a.sup_error.total_cmp(&b.sup_error).then(a.tau.total_cmp(&b.tau)));

    let (lipschitz_estimate, lipschitz_certified) = if target.seg.sigma > 1.0 {
        // |ζ′(σ + it)| ≤ Σ log n · n^{-σ} = −ζ′(σ)
        let jet = eval_zeta_jet(ComplexPoint::new(target.seg.sigma, 0.0), &opts.cfg)?;
        (jet.d1.norm() + jet.component_bounds[1], true)
    } else {
        (sampled_lipschitz(&ev, target, &lattice)?, false)
    };
    let drift_bound = lipschitz_estimate * opts.tau_step / 2.0;
    Ok(ScanReport {
        label: target.label.clone(),
        metric,
        candidates,
        epsilon,
        tau_range: (tau_lo, tau_hi),
        tau_step: opts.tau_step,
        grid_points: lattice.len(),
        hit_count,
        hit_measure,
        density_estimate: (hit_measure / (tau_hi - tau_lo)).clamp(0.0, 1.0),
        lipschitz_estimate,
        lipschitz_certified,
        drift_bound,
        step_adequate: drift_bound < epsilon / 2.0,
    })
}

/// Largest `|ζ′|` over the scanned strip, sampled at the lattice shifts of
/// the first, middle and last target parameters (at most
/// [`LIPSCHITZ_SAMPLES`] shifts).
fn sampled_lipschitz(ev: &LineEvaluator, target: &SegmentTarget, lattice: &[(f64, f64)]) -> Result<f64> {
    let n = target.samples.len();
    let ts = [target.samples[0].0, target.samples[n / 2].0, target.samples[n - 1].0];
    let stride = lattice.len().div_ceil(LIPSCHITZ_SAMPLES).max(1);
    let maxima = lattice
        .par_iter()
        .step_by(stride)
        .map(|&(tau, _)| {
            ts.iter()
                .map(|t| Ok(ev.jet(t + tau)?.d1.norm()))
                .try_fold(0.0f64, |m, d: Result<f64>| Ok(m.max(d?)))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(maxima.into_iter().fold(0.0, f64::max))
}

/// Shifts sampled for the heuristic Lipschitz estimate.
pub const LIPSCHITZ_SAMPLES: usize = 4096;

/// Golden-section search for the smallest error on `[lo, hi]`, keeping the
/// grid point if refinement does not improve on it.
fn refine(
    ev: &LineEvaluator,
    target: &SegmentTarget,
    metric: Metric,
    mut lo: f64,
    mut hi: f64,
    start: f64,
    tol: f64,
) -> Result<ShiftCandidate> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let eval = |tau: f64| -> Result<ShiftCandidate> {
        let e = shift_error(ev, target, tau, metric, None)?;
        Ok(ShiftCandidate {
            tau,
            sup_error: e.error,
            eval_bound: e.bound,
        })
    };
    let mut best = eval(start)?;
    let mut a = eval(hi - inv_phi * (hi - lo))?;
    let mut b = eval(lo + inv_phi * (hi - lo))?;
    while hi - lo > tol * hi.abs().max(lo.abs()).max(1.0) {
        if a.sup_error <= b.sup_error {
            hi = b.tau;
            b = a;
            let tau = hi - inv_phi * (hi - lo);
            if !(tau > lo && tau < hi) {
                break;
            }
            a = eval(tau)?;
        } else {
            lo = a.tau;
            a = b;
            let tau = lo + inv_phi * (hi - lo);
            if !(tau > lo && tau < hi) {
                break;
            }
            b = eval(tau)?;
        }
    }
    for c in [a, b] {
        if c.sup_error < best.sup_error {
            best = c;
        }
    }
    Ok(best)
}

/// Result of encoding a plane curve into the `ζ`-curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodingReport {
    pub scan: ScanReport,
    /// The target `g`, shifted by `offset`.
    pub target: Vec<(f64, ComplexPoint)>,
    pub offset: ComplexPoint,
    pub best: Option<EncodedCurve>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedCurve {
    pub tau: f64,
    /// `ζ(σ + i(t + τ))` on the target parameters.
    pub curve: Vec<(f64, ComplexPoint)>,
    /// Largest distance between matching points of the two curves.
    pub distance: f64,
}

/// Builds `g` from a curvature profile, scans for shifts where
/// `ζ(σ + i(t + τ)) ≈ g(t) + offset`, and returns the `ζ`-curve at the best
/// shift.
pub fn curve_encoding_pipeline(
    profile: &InvariantProfile,
    sigma: f64,
    offset: ComplexPoint,
    tau_lo: f64,
    tau_hi: f64,
    epsilon: f64,
    opts: &ScanOptions,
) -> Result<EncodingReport> {
    let (t0, t1) = profile.domain();
    let curve = reconstruct_plane(profile, t0, t1)?;
    let step = curve.samples.windows(2).map(|w| w[1].0 - w[0].0).fold(0.0, f64::max);
    let seg = VerticalSegment::new(sigma, t0, t1, step)?;
    let samples: Vec<_> = curve.samples.iter().map(|&(t, g)| (t, g + offset)).collect();
    let target = SegmentTarget::new(seg, samples.clone(), "plane curve from curvature")?;
    let scan = scan_shifts(&target, tau_lo, tau_hi, epsilon, opts)?;
    let best = match scan.candidates.first() {
        Some(c) => {
            let ev = evaluator(&target, c.tau, &opts.cfg);
            let zeta_curve = samples
                .iter()
                .map(|&(t, _)| Ok((t, ev.value(t + c.tau)?.value)))
                .collect::<Result<Vec<_>>>()?;
            let distance = zeta_curve
                .iter()
                .zip(&samples)
                .map(|(z, g)| (z.1 - g.1).norm())
                .fold(0.0, f64::max);
            Some(EncodedCurve {
                tau: c.tau,
                curve: zeta_curve,
                distance,
            })
        }
        None => None,
    };
    Ok(EncodingReport {
        scan,
        target: samples,
        offset,
        best,
    })
}

/// A shift and the translation that best lays a plane curve onto the
/// `ζ`-curve there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TranslationFit {
    pub tau: f64,
    pub offset: ComplexPoint,
    /// Largest distance after translating.
    pub distance: f64,
}

/// For each `τ` on the lattice `k·step` in `[τ_lo, τ_hi]`, translates the
/// curve built from `profile` so that its sample mean matches that of
/// `ζ(σ + i(t + τ))`, and returns the shift with the smallest sup distance.
/// Used to pick the offset of [`curve_encoding_pipeline`].
pub fn centroid_translation_search(
    profile: &InvariantProfile,
    sigma: f64,
    tau_lo: f64,
    tau_hi: f64,
    step: f64,
    cfg: &EvalConfig,
) -> Result<TranslationFit> {
    if !(tau_lo < tau_hi && step > 0.0 && tau_lo.is_finite() && tau_hi.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "bad shift range [{tau_lo}, {tau_hi}] with step {step}"
        )));
    }
    let (t0, t1) = profile.domain();
    let curve = reconstruct_plane(profile, t0, t1)?;
    let n = curve.samples.len() as f64;
    let g_mean = curve.samples.iter().map(|p| p.1).sum::<ComplexPoint>() / n;
    let ev = LineEvaluator::new(sigma, t1.abs().max(t0.abs()) + tau_hi.abs().max(tau_lo.abs()), *cfg);
    let fits: Vec<Result<TranslationFit>> = tau_lattice(tau_lo, tau_hi, step)
        .into_par_iter()
        .map(|(tau, _)| {
            let z = curve
                .samples
                .iter()
                .map(|&(t, _)| Ok(ev.value(t + tau)?.value))
                .collect::<Result<Vec<_>>>()?;
            let offset = z.iter().sum::<ComplexPoint>() / n - g_mean;
            let distance = z
                .iter()
                .zip(&curve.samples)
                .map(|(a, b)| (a - b.1 - offset).norm())
                .fold(0.0, f64::max);
            Ok(TranslationFit { tau, offset, distance })
        })
        .collect();
    let mut best: Option<TranslationFit> = None;
    for f in fits {
        let f = f?;
        if best.is_none_or(|b| f.distance < b.distance) {
            best = Some(f);
        }
    }
    best.ok_or_else(|| Error::InvalidInput("empty shift range".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_is_anchored_at_zero() {
        let l = tau_lattice(0.12, 0.5, 0.1);
        let taus: Vec<f64> = l.iter().map(|p| p.0).collect();
        assert_eq!(taus, vec![2.0 * 0.1, 3.0 * 0.1, 4.0 * 0.1]);
        assert!((l[2].1 - 0.1).abs() < 1e-15);
        let l = tau_lattice(0.0, 0.25, 0.1);
        assert_eq!(l.len(), 3);
        assert!((l[2].1 - 0.05).abs() < 1e-15);
    }

    #[test]
    fn metrics_are_sandwiched() {
        let z = ComplexPoint::new(0.3, -1.2);
        let g = ComplexPoint::new(-0.4, 0.1);
        let m = Metric::Componentwise.distance(z, g);
        let c = Metric::Complex.distance(z, g);
        assert!(m <= c && c <= std::f64::consts::SQRT_2 * m);
    }

    #[test]
    fn target_validation() {
        let seg = VerticalSegment::new(2.0, 0.0, 1.0, 0.1).unwrap();
        let one = ComplexPoint::new(1.0, 0.0);
        assert!(SegmentTarget::new(seg, vec![(0.0, one)], "").is_err());
        assert!(SegmentTarget::new(seg, vec![], "x").is_err());
        assert!(SegmentTarget::new(seg, vec![(0.0, one), (0.5, one)], "x").is_err());
        assert!(SegmentTarget::new(seg, vec![(0.0, one), (2.0, one)], "x").is_err());
        assert!(SegmentTarget::from_fn(seg, "x", |_| one).is_ok());
    }
}
