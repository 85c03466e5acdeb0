//! Jensen functions `φ(σ) = mean of log |f(σ + it)|` over a window, their
//! σ-derivatives, and zero counts in rectangles.
//!
//! Along a vertical line `d/dt arg f(σ + it) = Re f′/f (σ + it)`, so window
//! means of `Re f′/f` are phase increments divided by the window length.
//! The phase tracker doubles as a mesh generator: its steps shrink near
//! zeros, which is where `log |f|` and `Re f′/f` have their spikes.

use std::cell::Cell;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::phase::{track_phase, PhaseOptions, PhaseTrack};
use crate::quad::{integrate_panels, QuadOptions};
use crate::zeta::{eval_zeta_jet, eval_zeta_slope, EvalConfig};
use crate::ComplexPoint;
use serde::{Deserialize, Serialize};

/// Shift applied to `δ` when the window end sits on a zero.
pub const WINDOW_NUDGE: f64 = 1e-3;

/// Offset used for the one-sided derivatives `φ′(σ ± 0)`.
pub const LATERAL_OFFSET: f64 = 1e-3;

/// Longest quadrature panel.
const MAX_PANEL: f64 = 0.5;

/// `f(s)` and `f′(s)` with an absolute error bound on `f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticValue {
    pub value: ComplexPoint,
    pub derivative: ComplexPoint,
    pub bound: f64,
}

/// A function holomorphic on the region of interest.
pub trait Analytic: Sync {
    fn label(&self) -> String;
    fn eval(&self, s: ComplexPoint, cfg: &EvalConfig) -> Result<AnalyticValue>;
    /// Poles and their orders.
    fn poles(&self) -> Vec<(ComplexPoint, u32)> {
        Vec::new()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "coefficients")]
pub enum AnalyticTargetId {
    Zeta,
    ZetaPrime,
    /// `Σ a_n n^{-s}` over the listed `(n, a_n)`.
    DirichletPoly(Vec<(u64, ComplexPoint)>),
}

impl AnalyticTargetId {
    /// A Dirichlet polynomial with terms sorted by `n` and repeated `n`
    /// merged. The first coefficient must be nonzero.
    pub fn dirichlet_poly(terms: &[(u64, ComplexPoint)]) -> Result<Self> {
        let mut sorted = terms.to_vec();
        sorted.sort_by_key(|p| p.0);
        let mut merged: Vec<(u64, ComplexPoint)> = Vec::with_capacity(sorted.len());
        for (n, a) in sorted {
            if n == 0 {
                return Err(Error::InvalidInput("Dirichlet indices start at 1".into()));
            }
            if !(a.re.is_finite() && a.im.is_finite()) {
                return Err(Error::InvalidInput("coefficients must be finite".into()));
            }
            match merged.last_mut() {
                Some(last) if last.0 == n => last.1 += a,
                _ => merged.push((n, a)),
            }
        }
        match merged.first() {
            None => Err(Error::InvalidInput("a Dirichlet polynomial needs a term".into())),
            Some(&(n, a)) if a.norm() == 0.0 => Err(Error::InvalidInput(format!(
                "leading coefficient at n = {n} must be nonzero"
            ))),
            _ => Ok(Self::DirichletPoly(merged)),
        }
    }
}

impl Analytic for AnalyticTargetId {
    fn label(&self) -> String {
        match self {
            Self::Zeta => "zeta".into(),
            Self::ZetaPrime => "zeta_prime".into(),
            Self::DirichletPoly(terms) => {
                let parts: Vec<String> = terms
                    .iter()
                    .map(|(n, a)| format!("({}{:+}i) {n}^-s", a.re, a.im))
                    .collect();
                parts.join(" + ")
            }
        }
    }

    fn poles(&self) -> Vec<(ComplexPoint, u32)> {
        match self {
            Self::Zeta => vec![(ComplexPoint::new(1.0, 0.0), 1)],
            Self::ZetaPrime => vec![(ComplexPoint::new(1.0, 0.0), 2)],
            Self::DirichletPoly(_) => Vec::new(),
        }
    }

    fn eval(&self, s: ComplexPoint, cfg: &EvalConfig) -> Result<AnalyticValue> {
        match self {
            Self::Zeta => {
                let j = eval_zeta_slope(s, &near_pole_config(s, cfg, 2))?;
                Ok(AnalyticValue {
                    value: j.value,
                    derivative: j.d1,
                    bound: j.component_bounds[0],
                })
            }
            Self::ZetaPrime => {
                let j = eval_zeta_jet(s, &near_pole_config(s, cfg, 3))?;
                Ok(AnalyticValue {
                    value: j.d1,
                    derivative: j.d2,
                    bound: j.component_bounds[1],
                })
            }
            Self::DirichletPoly(terms) => {
                let mut value = ComplexPoint::new(0.0, 0.0);
                let mut derivative = value;
                let mut mag = 0.0;
                for &(n, a) in terms {
                    let ln = (n as f64).ln();
                    let term = a * (-s * ln).exp();
                    value += term;
                    derivative -= term * ln;
                    mag += term.norm();
                }
                if !(value.re.is_finite() && value.im.is_finite()) {
                    return Err(Error::Domain(format!("overflow evaluating at {s}")));
                }
                Ok(AnalyticValue {
                    value,
                    derivative,
                    bound: 8.0 * f64::EPSILON * (1.0 + s.norm()) * mag,
                })
            }
        }
    }
}

/// Within distance 1 of the pole the highest derivative needed grows like
/// `|s − 1|^{-order}`, so an absolute target is loosened to match.
fn near_pole_config(s: ComplexPoint, cfg: &EvalConfig, order: i32) -> EvalConfig {
    let d = (s - 1.0).norm();
    let mut c = *cfg;
    if d < 1.0 {
        c.target_abs_error *= d.powi(-order);
    }
    c
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JensenEstimate {
    pub target: String,
    pub sigma: f64,
    pub gamma: f64,
    /// Window end actually used (nudged if the requested one sat on a zero).
    pub delta: f64,
    /// Window mean of `log |f|`.
    pub phi: Option<f64>,
    /// Window mean of `Re f′/f`.
    pub phi_prime: Option<f64>,
    /// Error estimate of whichever means are present.
    pub quad_error: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct JensenOptions {
    pub cfg: EvalConfig,
    pub phase: PhaseOptions,
    /// Absolute quadrature tolerance per unit window length.
    pub tol_per_length: f64,
}

impl Default for JensenOptions {
    fn default() -> Self {
        Self {
            cfg: EvalConfig::default(),
            phase: PhaseOptions::default(),
            tol_per_length: 1e-10,
        }
    }
}

fn check_window(sigma: f64, gamma: f64, delta: f64) -> Result<()> {
    if !(sigma.is_finite() && gamma.is_finite() && delta.is_finite()) {
        return Err(Error::InvalidInput("window parameters must be finite".into()));
    }
    if !(delta > gamma) {
        return Err(Error::InvalidInput(format!("window [{gamma}, {delta}] is empty")));
    }
    Ok(())
}

/// Phase of `f` along `Re s = σ`, `t ∈ [γ, δ]`, with the largest relative
/// engine error seen.
fn track_line(f: &dyn Analytic, sigma: f64, gamma: f64, delta: f64, opts: &JensenOptions) -> Result<(PhaseTrack, f64)> {
    // the tracker could step across a pole whose phase turn it cannot see
    for (p, _) in f.poles() {
        if p.re == sigma && p.im >= gamma && p.im <= delta {
            return Err(Error::PoleAt1 { s: p });
        }
    }
    let worst = Cell::new(0.0f64);
    let track = track_phase(
        |t| {
            let v = f.eval(ComplexPoint::new(sigma, t), &opts.cfg)?;
            worst.set(worst.get().max(v.bound / v.value.norm()));
            Ok((v.value, ComplexPoint::i() * v.derivative))
        },
        gamma,
        delta,
        &opts.phase,
    )?;
    Ok((track, worst.get()))
}

/// Runs `job` on `[γ, δ]`, moving `δ` up by [`WINDOW_NUDGE`] (at most twice)
/// when a zero of `f` is hit at the window end.
fn with_nudged_window<T>(gamma: f64, delta: f64, mut job: impl FnMut(f64) -> Result<T>) -> Result<(f64, T)> {
    let mut last = None;
    for k in 0..3 {
        let d = delta + k as f64 * WINDOW_NUDGE;
        match job(d) {
            Ok(v) => return Ok((d, v)),
            Err(Error::ZeroOnSegment { t }) => last = Some(t),
            Err(e) => return Err(e),
        }
    }
    Err(Error::ZeroOnSegment {
        t: last.unwrap_or(gamma),
    })
}

/// Panels from the phase mesh, merged so that none is shorter than the
/// local step and none longer than [`MAX_PANEL`].
fn panels_from(points: &[f64]) -> Vec<f64> {
    let mut out = vec![points[0]];
    for &p in &points[1..] {
        let last = *out.last().unwrap_or(&p);
        let gap = p - last;
        if gap > MAX_PANEL {
            let n = (gap / MAX_PANEL).ceil() as usize;
            for k in 1..n {
                out.push(last + gap * k as f64 / n as f64);
            }
        }
        out.push(p);
    }
    out.dedup();
    out
}

/// Gap left around a zero met while meshing; the quadrature handles the
/// log singularity inside it.
const ZERO_GAP: f64 = 1e-6;

/// Quadrature mesh for `t ↦ f(σ + it)` on `[γ, δ]`, refined near zeros.
/// Zeros on the line itself become breakpoints instead of errors.
fn line_mesh(f: &dyn Analytic, sigma: f64, gamma: f64, delta: f64, opts: &JensenOptions) -> Result<(Vec<f64>, f64)> {
    let mut points = vec![gamma];
    let mut rel = 0.0f64;
    let mut a = gamma;
    while a < delta {
        match track_line(f, sigma, a, delta, opts) {
            Ok((track, r)) => {
                points.extend_from_slice(&track.points[1..]);
                rel = rel.max(r);
                break;
            }
            Err(Error::ZeroOnSegment { t }) => {
                let t = t.max(a);
                if t > a + ZERO_GAP {
                    // mesh up to the zero from a clean run
                    let (track, r) = track_line(f, sigma, a, t - 0.5 * ZERO_GAP, opts)?;
                    points.extend_from_slice(&track.points[1..]);
                    rel = rel.max(r);
                }
                a = (t + ZERO_GAP).min(delta);
                points.push(a);
            }
            Err(e) => return Err(e),
        }
    }
    points.dedup();
    Ok((points, rel))
}

/// `φ_f(σ; γ, δ)`: the window mean of `log |f(σ + it)|`.
///
/// Zeros on the line are integrable singularities and are handled by the
/// mesh, so `δ` is never moved here.
pub fn jensen_mean(
    f: &dyn Analytic,
    sigma: f64,
    gamma: f64,
    delta: f64,
    opts: &JensenOptions,
) -> Result<JensenEstimate> {
    check_window(sigma, gamma, delta)?;
    let (mesh, rel) = line_mesh(f, sigma, gamma, delta, opts)?;
    let breaks = panels_from(&mesh);
    let len = delta - gamma;
    let q = integrate_panels(
        |t| {
            let v = f.eval(ComplexPoint::new(sigma, t), &opts.cfg)?;
            let m = v.value.norm();
            if m == 0.0 {
                return Err(Error::ZeroOnSegment { t });
            }
            Ok(m.ln())
        },
        &breaks,
        &QuadOptions::abs(opts.tol_per_length * len),
    )?;
    Ok(JensenEstimate {
        target: f.label(),
        sigma,
        gamma,
        delta,
        phi: Some(q.value / len),
        phi_prime: None,
        quad_error: q.error / len + rel,
    })
}

/// `φ′_f(σ; γ, δ)`: the window mean of `Re f′/f (σ + it)`, computed as the
/// continuous change of `arg f` divided by `δ − γ`.
pub fn jensen_derivative(
    f: &dyn Analytic,
    sigma: f64,
    gamma: f64,
    delta: f64,
    opts: &JensenOptions,
) -> Result<JensenEstimate> {
    check_window(sigma, gamma, delta)?;
    let (delta, (track, rel)) = with_nudged_window(gamma, delta, |d| track_line(f, sigma, gamma, d, opts))?;
    let len = delta - gamma;
    // Each step's increment is exact up to the engine error in arg f.
    let err = (track.steps as f64 * (2.0 * rel + 4.0 * f64::EPSILON)) / len;
    Ok(JensenEstimate {
        target: f.label(),
        sigma,
        gamma,
        delta,
        phi: None,
        phi_prime: Some(track.change / len),
        quad_error: err,
    })
}

/// Both means at every `σ` of `sigmas`, for the `sigma,phi,phi_prime` table.
/// Rows whose line carries a zero have no `phi_prime`.
pub fn jensen_sweep(
    f: &dyn Analytic,
    sigmas: &[f64],
    gamma: f64,
    delta: f64,
    opts: &JensenOptions,
) -> Result<Vec<JensenEstimate>> {
    sigmas
        .iter()
        .map(|&sigma| {
            let m = jensen_mean(f, sigma, gamma, delta, opts)?;
            // a zero on the line leaves the slope undefined for this row only
            match jensen_derivative(f, sigma, gamma, m.delta, opts) {
                Ok(d) => Ok(JensenEstimate {
                    phi_prime: d.phi_prime,
                    quad_error: m.quad_error.max(d.quad_error),
                    ..m
                }),
                Err(Error::ZeroOnSegment { .. }) => Ok(m),
                Err(e) => Err(e),
            }
        })
        .collect()
}

/// Closed rectangle `[sigma1, sigma2] × [t1, t2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxRegion {
    pub sigma1: f64,
    pub sigma2: f64,
    pub t1: f64,
    pub t2: f64,
}

impl BoxRegion {
    pub fn new(sigma1: f64, sigma2: f64, t1: f64, t2: f64) -> Result<Self> {
        let b = Self { sigma1, sigma2, t1, t2 };
        let finite = [sigma1, sigma2, t1, t2].iter().all(|x| x.is_finite());
        if !finite || !(sigma1 < sigma2 && t1 < t2) {
            return Err(Error::InvalidInput(format!("bad rectangle {b:?}")));
        }
        Ok(b)
    }

    /// The rectangle moved inward by `d` on every side.
    pub fn shrunk(&self, d: f64) -> Result<Self> {
        Self::new(self.sigma1 + d, self.sigma2 - d, self.t1 + d, self.t2 - d)
    }

    /// Distance from `p` to the boundary, negative inside.
    fn signed_distance(&self, p: ComplexPoint) -> f64 {
        let dx = (self.sigma1 - p.re).max(p.re - self.sigma2);
        let dy = (self.t1 - p.im).max(p.im - self.t2);
        if dx <= 0.0 && dy <= 0.0 {
            dx.max(dy)
        } else {
            dx.max(0.0).hypot(dy.max(0.0))
        }
    }

    fn corners(&self) -> [ComplexPoint; 4] {
        [
            ComplexPoint::new(self.sigma1, self.t1),
            ComplexPoint::new(self.sigma2, self.t1),
            ComplexPoint::new(self.sigma2, self.t2),
            ComplexPoint::new(self.sigma1, self.t2),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroBoxCount {
    /// The rectangle actually used (nudged inward if needed).
    pub region: BoxRegion,
    pub count: u64,
    /// Raw winding number before rounding.
    pub winding_residual: f64,
    /// Smallest Newton estimate `|f/f′|` of the distance to a zero seen on
    /// the contour.
    pub closest_zero_distance: f64,
    pub nudged: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct ContourOptions {
    pub cfg: EvalConfig,
    pub phase: PhaseOptions,
    /// Contours passing closer than this to a zero are moved.
    pub min_distance: f64,
    /// Inward move applied once when the contour is too close.
    pub nudge: f64,
}

impl Default for ContourOptions {
    fn default() -> Self {
        Self {
            cfg: EvalConfig::default(),
            phase: PhaseOptions::default(),
            min_distance: 1e-4,
            nudge: 1e-3,
        }
    }
}

/// Winding number of `f` around the rectangle, i.e. the number of zeros
/// inside (for `f` holomorphic on the closed rectangle).
fn winding(f: &dyn Analytic, region: &BoxRegion, opts: &ContourOptions) -> Result<(f64, f64)> {
    let c = region.corners();
    let mut total = 0.0;
    let mut closest = f64::INFINITY;
    for k in 0..4 {
        let (a, b) = (c[k], c[(k + 1) % 4]);
        let len = (b - a).norm();
        let dir = (b - a) / len;
        let track = track_phase(
            |x| {
                let v = f.eval(a + dir * x, &opts.cfg)?;
                Ok((v.value, v.derivative * dir))
            },
            0.0,
            len,
            &opts.phase,
        )?;
        total += track.change;
        closest = closest.min(track.closest.1);
    }
    Ok((total / (2.0 * PI), closest))
}

/// Number of zeros of `f` inside `region`, by the argument principle.
/// Known poles inside are added back.
pub fn count_zeros_box(f: &dyn Analytic, region: BoxRegion, opts: &ContourOptions) -> Result<ZeroBoxCount> {
    BoxRegion::new(region.sigma1, region.sigma2, region.t1, region.t2)?;
    let poles = f.poles();
    let attempt = |r: &BoxRegion| -> Result<(f64, f64)> {
        let mut inside = 0.0;
        for &(p, order) in &poles {
            let d = r.signed_distance(p);
            if d.abs() < opts.min_distance {
                return Err(Error::ContourTooClose {
                    at: p,
                    distance: d.abs(),
                });
            }
            if d < 0.0 {
                inside += order as f64;
            }
        }
        match winding(f, r, opts).map(|(w, d)| (w + inside, d)) {
            Ok((w, d)) if d >= opts.min_distance => Ok((w, d)),
            Ok((_, d)) => Err(Error::ContourTooClose {
                at: r.corners()[0],
                distance: d,
            }),
            Err(Error::ZeroOnSegment { .. }) | Err(Error::PoleAt1 { .. }) => Err(Error::ContourTooClose {
                at: r.corners()[0],
                distance: 0.0,
            }),
            Err(e) => Err(e),
        }
    };
    let (used, nudged, (w, closest)) = match attempt(&region) {
        Ok(v) => (region, false, v),
        Err(Error::ContourTooClose { .. }) => {
            let inner = region.shrunk(opts.nudge)?;
            (inner, true, attempt(&inner)?)
        }
        Err(e) => return Err(e),
    };
    let count = w.round();
    if (w - count).abs() >= 0.25 || count < 0.0 {
        return Err(Error::ContourTooClose {
            at: used.corners()[0],
            distance: closest,
        });
    }
    Ok(ZeroBoxCount {
        region: used,
        count: count as u64,
        winding_residual: w,
        closest_zero_distance: closest,
        nudged,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrequencyMethod {
    /// Zeros counted in `(σ₁, σ₂) × (0, T)`, divided by `T`.
    Count,
    /// `(φ′(σ₂ − h) − φ′(σ₁ + h)) / 2π` over the window `[0, T]`.
    DerivativeDiff,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroFrequency {
    pub target: String,
    pub method: FrequencyMethod,
    pub sigma1: f64,
    pub sigma2: f64,
    pub t_max: f64,
    /// Zeros per unit height.
    pub value: f64,
    pub error: f64,
    pub count: Option<ZeroBoxCount>,
    pub derivatives: Option<(JensenEstimate, JensenEstimate)>,
}

/// Minimal window height for frequency estimates.
pub const MIN_FREQUENCY_HEIGHT: f64 = 50.0;

/// Zeros per unit height in the strip `σ₁ < σ < σ₂`.
pub fn zero_frequency(
    f: &dyn Analytic,
    sigma1: f64,
    sigma2: f64,
    t_max: f64,
    method: FrequencyMethod,
    opts: &ContourOptions,
) -> Result<ZeroFrequency> {
    if !(sigma1 < sigma2) {
        return Err(Error::InvalidInput(format!("empty strip ({sigma1}, {sigma2})")));
    }
    if !(t_max >= MIN_FREQUENCY_HEIGHT) {
        return Err(Error::InvalidInput(format!(
            "window height {t_max} is below {MIN_FREQUENCY_HEIGHT}"
        )));
    }
    let mut out = ZeroFrequency {
        target: f.label(),
        method,
        sigma1,
        sigma2,
        t_max,
        value: 0.0,
        error: 0.0,
        count: None,
        derivatives: None,
    };
    match method {
        FrequencyMethod::Count => {
            let c = count_zeros_box(f, BoxRegion::new(sigma1, sigma2, 0.0, t_max)?, opts)?;
            out.value = c.count as f64 / t_max;
            // a zero near the top or bottom edge may or may not be counted
            out.error = 1.0 / t_max;
            out.count = Some(c);
        }
        FrequencyMethod::DerivativeDiff => {
            let h = LATERAL_OFFSET.min(0.25 * (sigma2 - sigma1));
            let jo = JensenOptions {
                cfg: opts.cfg,
                phase: opts.phase,
                ..JensenOptions::default()
            };
            let lo = jensen_derivative(f, sigma1 + h, 0.0, t_max, &jo)?;
            let hi = jensen_derivative(f, sigma2 - h, 0.0, t_max, &jo)?;
            let (a, b) = (lo.phi_prime.unwrap_or(0.0), hi.phi_prime.unwrap_or(0.0));
            out.value = (b - a) / (2.0 * PI);
            // the phase at the window ends is only known mod its bounded part
            out.error = (lo.quad_error + hi.quad_error) / (2.0 * PI) + 1.0 / t_max;
            out.derivatives = Some((lo, hi));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanCurvatureNumerator {
    pub sigma: f64,
    pub t_max: f64,
    /// `(1/T) ∫_0^T Re ζ″/ζ′(σ + it) dt` by quadrature.
    pub value: f64,
    pub quad_error: f64,
    /// The same mean from the phase change of `ζ′`.
    pub phase_value: f64,
    pub panels: usize,
}

/// Smallest `σ − 1/2` accepted by [`mean_curvature_numerator`].
pub const CRITICAL_LINE_GAP: f64 = 1e-3;
/// Smallest window accepted by [`mean_curvature_numerator`].
pub const MIN_CURVATURE_WINDOW: f64 = 100.0;

/// The window mean of `Re ζ″/ζ′` on `Re s = σ`, `0 ≤ t ≤ T`.
///
/// The quadrature mesh comes from tracking `arg ζ′`, so it is refined
/// around zeros of `ζ′` near the line; the phase change gives an
/// independent value of the same mean.
pub fn mean_curvature_numerator(sigma: f64, t_max: f64, opts: &JensenOptions) -> Result<MeanCurvatureNumerator> {
    if !(sigma > 0.5 + CRITICAL_LINE_GAP) {
        return Err(Error::Domain(format!(
            "sigma = {sigma} must exceed 1/2 + {CRITICAL_LINE_GAP}"
        )));
    }
    if !(t_max >= MIN_CURVATURE_WINDOW) {
        return Err(Error::InvalidInput(format!(
            "window height {t_max} is below {MIN_CURVATURE_WINDOW}"
        )));
    }
    let f = AnalyticTargetId::ZetaPrime;
    let (track, _) = track_line(&f, sigma, 0.0, t_max, opts)?;
    let breaks = panels_from(&track.points);
    let q = integrate_panels(
        |t| {
            let v = f.eval(ComplexPoint::new(sigma, t), &opts.cfg)?;
            Ok((v.derivative / v.value).re)
        },
        &breaks,
        &QuadOptions::abs(opts.tol_per_length * t_max),
    )?;
    Ok(MeanCurvatureNumerator {
        sigma,
        t_max,
        value: q.value / t_max,
        quad_error: q.error / t_max,
        phase_value: track.change / t_max,
        panels: breaks.len() - 1,
    })
}
