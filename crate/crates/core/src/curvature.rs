//! Signed curvature of `t ↦ ζ(σ + it)` and the sign structure around it.
//!
//! For a holomorphic `f`, the curve `t ↦ f(σ + it)` has velocity `i f′` and
//! signed curvature `Re(f″/f′) / |f′|`.

use crate::error::{Error, Result};
use crate::zeta::{eval_zeta_jet, eval_zeta_tail_jet, special, EvalConfig, LineEvaluator, ZetaJet};
use crate::ComplexPoint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// `|ζ′|` at or below this marks the curvature undefined.
pub const SPEED_THRESHOLD: f64 = 1e-8;

/// Curvatures beyond this magnitude are flagged instead of reported.
pub const KAPPA_LIMIT: f64 = 1e10;

/// Default grid step for profiles and sign-change detection.
pub const DEFAULT_STEP: f64 = 0.01;

/// Brackets are bisected down to this width.
pub const BRACKET_WIDTH: f64 = 1e-6;

/// The grid `t_min + k·step`, `k = 0, 1, …` up to `t_max` on `Re s = σ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerticalSegment {
    pub sigma: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub step: f64,
}

impl VerticalSegment {
    pub fn new(sigma: f64, t_min: f64, t_max: f64, step: f64) -> Result<Self> {
        let seg = Self {
            sigma,
            t_min,
            t_max,
            step,
        };
        seg.validate()?;
        Ok(seg)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.sigma, self.t_min, self.t_max, self.step]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidInput("segment parameters must be finite".into()));
        }
        if !(self.t_min < self.t_max) {
            return Err(Error::InvalidInput(format!(
                "t_min = {} must be below t_max = {}",
                self.t_min, self.t_max
            )));
        }
        if !(self.step > 0.0 && self.step <= self.t_max - self.t_min) {
            return Err(Error::InvalidInput(format!(
                "step {} must be positive and at most the segment length",
                self.step
            )));
        }
        if self.sigma == 1.0 && self.t_min <= 0.0 && self.t_max >= 0.0 {
            return Err(Error::PoleAt1 {
                s: ComplexPoint::new(1.0, 0.0),
            });
        }
        Ok(())
    }

    /// Number of grid points.
    pub fn len(&self) -> usize {
        // Tolerate the rounding in (t_max - t_min) / step.
        ((self.t_max - self.t_min) / self.step * (1.0 + 1e-12)).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, k: usize) -> f64 {
        self.t_min + k as f64 * self.step
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.point(k)).collect()
    }

    pub fn height(&self) -> f64 {
        self.t_max - self.t_min
    }

    /// Largest `|t|` touched by the segment.
    pub fn max_abs_t(&self) -> f64 {
        self.t_min.abs().max(self.t_max.abs())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureSample {
    pub t: f64,
    /// `None` when `speed` is at or below [`SPEED_THRESHOLD`], when the
    /// magnitude would exceed [`KAPPA_LIMIT`], or when evaluation failed.
    pub kappa: Option<f64>,
    /// `Re ζ″/ζ′(σ + it)`; NaN when evaluation failed.
    pub re_logderiv: f64,
    /// `|ζ′(σ + it)|`; NaN when evaluation failed.
    pub speed: f64,
    /// Evaluation error, if any.
    pub error: Option<String>,
}

impl CurvatureSample {
    pub fn from_jet(t: f64, jet: &ZetaJet) -> Self {
        let speed = jet.d1.norm();
        let re_logderiv = if speed > 0.0 {
            jet.log_derivative_ratio().re
        } else {
            f64::NAN
        };
        let kappa = Some(re_logderiv / speed).filter(|k| speed > SPEED_THRESHOLD && k.abs() <= KAPPA_LIMIT);
        Self {
            t,
            kappa,
            re_logderiv,
            speed,
            error: None,
        }
    }

    pub fn failed(t: f64, err: &Error) -> Self {
        Self {
            t,
            kappa: None,
            re_logderiv: f64::NAN,
            speed: f64::NAN,
            error: Some(err.to_string()),
        }
    }

    pub fn is_defined(&self) -> bool {
        self.kappa.is_some()
    }
}

/// One sample per grid point of `seg`.
pub fn curvature_profile(seg: &VerticalSegment, cfg: &EvalConfig) -> Result<Vec<CurvatureSample>> {
    seg.validate()?;
    cfg.validate()?;
    let ev = LineEvaluator::new(seg.sigma, seg.max_abs_t(), *cfg);
    Ok(seg.grid().into_par_iter().map(|t| curvature_at(&ev, t)).collect())
}

pub fn curvature_at(ev: &LineEvaluator, t: f64) -> CurvatureSample {
    match ev.jet(t) {
        Ok(jet) => CurvatureSample::from_jet(t, &jet),
        Err(e) => CurvatureSample::failed(t, &e),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignChange {
    pub bracket_lo: f64,
    pub bracket_hi: f64,
    pub refined_t: f64,
}

/// Sign changes of `Re ζ″/ζ′` on the grid of `seg`, each bisected to width
/// [`BRACKET_WIDTH`] and re-verified at both ends.
///
/// Only changes between adjacent grid points are seen: two changes inside
/// one grid cell cancel out. Samples that fail to evaluate are skipped.
pub fn find_sign_changes(seg: &VerticalSegment, cfg: &EvalConfig) -> Result<Vec<SignChange>> {
    seg.validate()?;
    cfg.validate()?;
    let ev = LineEvaluator::new(seg.sigma, seg.max_abs_t(), *cfg);
    let values: Vec<(f64, Option<f64>)> = seg.grid().into_par_iter().map(|t| (t, re_logderiv(&ev, t))).collect();
    let brackets: Vec<(f64, f64, f64)> = values
        .windows(2)
        .filter_map(|w| match (w[0].1, w[1].1) {
            (Some(a), Some(b)) if a * b < 0.0 => Some((w[0].0, w[1].0, a)),
            _ => None,
        })
        .collect();
    Ok(brackets
        .into_par_iter()
        .filter_map(|(lo, hi, f_lo)| refine_bracket(&ev, lo, hi, f_lo))
        .collect())
}

fn re_logderiv(ev: &LineEvaluator, t: f64) -> Option<f64> {
    ev.jet(t)
        .ok()
        .map(|j| j.log_derivative_ratio().re)
        .filter(|v| v.is_finite())
}

fn refine_bracket(ev: &LineEvaluator, mut lo: f64, mut hi: f64, f_lo: f64) -> Option<SignChange> {
    let positive_at_lo = f_lo > 0.0;
    while hi - lo > BRACKET_WIDTH {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match re_logderiv(ev, mid) {
            Some(0.0) => {
                lo = mid;
                hi = mid;
            }
            Some(v) if (v > 0.0) == positive_at_lo => lo = mid,
            Some(_) => hi = mid,
            None => return None,
        }
    }
    // Re-verify at acceptance time.
    let (a, b) = (re_logderiv(ev, lo)?, re_logderiv(ev, hi)?);
    let ok = (lo == hi && a == 0.0) || a * b < 0.0;
    ok.then_some(SignChange {
        bracket_lo: lo,
        bracket_hi: hi,
        refined_t: 0.5 * (lo + hi),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailCheck {
    pub t: f64,
    /// `|1 − (−1)^k ζ^(k)(s) 2^s / (log 2)^k|`.
    pub lhs: f64,
    /// Certified bound on the error of `lhs`.
    pub error: f64,
    /// `lhs ≤ √2/2`.
    pub holds: bool,
}

/// Error allowed on each `lhs` of [`verify_tail_inequality`].
pub const TAIL_CHECK_ERROR: f64 = 1e-9;

/// Checks `|1 − (−1)^k ζ^(k)(σ+it) 2^(σ+it) / (log 2)^k| ≤ √2/2` for `k = 1, 2`.
///
/// The `n = 1` term vanishes and the `n = 2` term equals 1, so the left side
/// is `|Σ_{n≥3} (log n / log 2)^k (2/n)^s|`, computed from a certified tail
/// sum without cancellation.
pub fn verify_tail_inequality(sigma: f64, t_list: &[f64], k: u32) -> Result<Vec<TailCheck>> {
    if !(sigma >= 3.0) {
        return Err(Error::InvalidInput(format!("sigma must be at least 3, got {sigma}")));
    }
    if !(k == 1 || k == 2) {
        return Err(Error::InvalidInput(format!("k must be 1 or 2, got {k}")));
    }
    let ln2k = std::f64::consts::LN_2.powi(k as i32);
    let scale = sigma.exp2() / ln2k;
    let cfg = EvalConfig::with_target(TAIL_CHECK_ERROR / scale);
    t_list
        .par_iter()
        .map(|&t| {
            let s = ComplexPoint::new(sigma, t);
            let jet = eval_zeta_tail_jet(s, 3, &cfg)?;
            let dk = if k == 1 { -jet.d1 } else { jet.d2 };
            let lhs = (dk * (s * std::f64::consts::LN_2).exp()).norm() / ln2k;
            let error = jet.component_bounds[k as usize] * scale + 8.0 * f64::EPSILON * lhs;
            Ok(TailCheck {
                t,
                lhs,
                error,
                holds: lhs <= std::f64::consts::FRAC_1_SQRT_2,
            })
        })
        .collect()
}

/// Smallest `σ` of `sigma_grid` from which on (upwards through the grid) the
/// inequality holds at every `t` of `t_list` for both `k = 1, 2`. `None` if it
/// fails at the largest grid value. Exploratory: a finite sample of `t`.
pub fn empirical_tail_threshold(sigma_grid: &[f64], t_list: &[f64]) -> Result<Option<f64>> {
    let mut grid = sigma_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let mut best = None;
    for &sigma in grid.iter().rev() {
        let mut all = true;
        for k in [1, 2] {
            all &= verify_tail_inequality(sigma, t_list, k)?.iter().all(|c| c.holds);
        }
        if !all {
            break;
        }
        best = Some(sigma);
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfPlaneProbe {
    pub t: f64,
    pub re_logderiv: f64,
    /// `−(log t)/2`.
    pub model: f64,
    pub ratio: f64,
    pub error: Option<String>,
}

/// Compares `Re ζ″/ζ′(σ + it)` with `−(log t)/2` for `σ ≤ 0`.
pub fn left_halfplane_probe(sigma: f64, t_list: &[f64], cfg: &EvalConfig) -> Result<Vec<HalfPlaneProbe>> {
    if !(sigma <= 0.0) {
        return Err(Error::InvalidInput(format!("sigma must be at most 0, got {sigma}")));
    }
    if let Some(t) = t_list.iter().find(|t| !(**t >= 10.0)) {
        return Err(Error::InvalidInput(format!("heights must be at least 10, got {t}")));
    }
    cfg.validate()?;
    Ok(t_list
        .par_iter()
        .map(|&t| {
            let model = -0.5 * t.ln();
            match eval_zeta_jet(ComplexPoint::new(sigma, t), cfg) {
                Ok(jet) => {
                    let v = jet.log_derivative_ratio().re;
                    HalfPlaneProbe {
                        t,
                        re_logderiv: v,
                        model,
                        ratio: v / model,
                        error: None,
                    }
                }
                Err(e) => HalfPlaneProbe {
                    t,
                    re_logderiv: f64::NAN,
                    model,
                    ratio: f64::NAN,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect())
}

/// Largest `n` accepted by [`real_zeros_zeta_prime`].
pub const MAX_REAL_ZERO_INDEX: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealZero {
    pub n: usize,
    /// `−a` is the zero of `ζ′` in `(−2n−2, −2n)`.
    pub a: f64,
    /// `|ζ′(−a)|`.
    pub residual: f64,
    /// `|ζ′(−a)| / max(1, |ζ(−a)|)`: `|ζ|` grows factorially along the
    /// negative axis, so this is the meaningful size of the residual.
    pub scaled_residual: f64,
}

/// The real zeros `−a_1 > −a_2 > …` of `ζ′`, one in each `(−2n−2, −2n)`.
///
/// On those intervals `ζ` has no zero, so the zeros of `ζ′` are the zeros of
/// `ζ′/ζ`, which the functional equation gives in closed form up to
/// `ζ′/ζ(1 − x)` at `1 − x ≥ 3`. The function runs from `+∞` to `−∞` across
/// each interval, and it is bisected to full precision.
pub fn real_zeros_zeta_prime(n_max: usize) -> Result<Vec<RealZero>> {
    if n_max == 0 || n_max > MAX_REAL_ZERO_INDEX {
        return Err(Error::InvalidInput(format!(
            "n_max must be in 1..={MAX_REAL_ZERO_INDEX}, got {n_max}"
        )));
    }
    (1..=n_max).into_par_iter().map(real_zero).collect()
}

fn real_zero(n: usize) -> Result<RealZero> {
    let log_deriv = |x: f64| special::zeta_and_log_derivative_negative(x).map(|v| v.1);
    let margin = 1e-9;
    let mut lo = -2.0 * n as f64 - 2.0 + margin;
    let mut hi = -2.0 * n as f64 - margin;
    let (f_lo, f_hi) = (log_deriv(lo)?, log_deriv(hi)?);
    if !(f_lo > 0.0 && f_hi < 0.0) {
        return Err(Error::BracketFailure { lo, hi });
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = log_deriv(mid)?;
        if v == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = if log_deriv(lo)?.abs() <= log_deriv(hi)?.abs() {
        lo
    } else {
        hi
    };
    let (z, l) = special::zeta_and_log_derivative_negative(x)?;
    let residual = (z * l).abs();
    Ok(RealZero {
        n,
        a: -x,
        residual,
        scaled_residual: residual / z.abs().max(1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_grid_is_exact_multiples() {
        let seg = VerticalSegment::new(0.5, 2.76, 40.0, 0.01).unwrap();
        assert_eq!(seg.len(), 3725);
        let g = seg.grid();
        assert_eq!(g[0], 2.76);
        assert!((g[g.len() - 1] - 40.0).abs() < 1e-9);
        assert!(VerticalSegment::new(0.5, 1.0, 1.0, 0.1).is_err());
        assert!(VerticalSegment::new(0.5, 0.0, 1.0, 2.0).is_err());
        assert!(VerticalSegment::new(1.0, -1.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn sample_sign_matches_logderiv() {
        let cfg = EvalConfig::default();
        let ev = LineEvaluator::new(0.75, 120.0, cfg);
        for t in [5.0, 50.0, 111.5] {
            let s = curvature_at(&ev, t);
            let k = s.kappa.unwrap();
            assert_eq!(k.signum(), s.re_logderiv.signum());
            assert_eq!(k, s.re_logderiv / s.speed);
        }
    }

    #[test]
    fn undefined_near_critical_point() {
        let jet = ZetaJet {
            s: ComplexPoint::new(0.5, 1.0),
            value: ComplexPoint::new(1.0, 0.0),
            d1: ComplexPoint::new(1e-9, 0.0),
            d2: ComplexPoint::new(1.0, 0.0),
            abs_error_bound: 0.0,
            component_bounds: [0.0; 3],
            terms: 0,
        };
        let s = CurvatureSample::from_jet(1.0, &jet);
        assert!(s.kappa.is_none());
        assert!(s.re_logderiv > 0.0);
    }

    #[test]
    fn tail_inequality_inputs() {
        assert!(verify_tail_inequality(2.5, &[0.0], 1).is_err());
        assert!(verify_tail_inequality(4.0, &[0.0], 3).is_err());
    }

    #[test]
    fn tail_inequality_at_large_sigma() {
        let checks = verify_tail_inequality(30.0, &[0.0, 7.0], 1).unwrap();
        let lead = 3f64.ln() / 2f64.ln() * (2.0f64 / 3.0).powi(30);
        for c in checks {
            assert!(c.holds);
            assert!(c.lhs <= lead * 1.01, "{} vs {}", c.lhs, lead);
            assert!(c.lhs >= 0.9 * lead);
        }
    }
}
