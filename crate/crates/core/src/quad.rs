//! Adaptive Gauss–Kronrod (7/15) quadrature on a list of panels.
//!
//! Each panel is refined independently by bisection of its worst subinterval
//! until its error estimate fits its share of the tolerance; panels run in
//! parallel and are reduced in panel order, so results do not depend on the
//! thread count.

use crate::error::{Error, Result};
use crate::ComplexPoint;
use rayon::prelude::*;
use std::ops::{Add, Mul, Sub};

/// Values that can be integrated: reals and complex numbers.
pub trait QuadValue: Copy + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for ComplexPoint {
    fn zero() -> Self {
        ComplexPoint::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Kronrod rule with its embedded 7-point Gauss estimate.
pub fn gauss_kronrod<T: QuadValue>(f: &(impl Fn(f64) -> Result<T> + ?Sized), a: f64, b: f64) -> Result<(T, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx)?;
        let f2 = f(c + dx)?;
        kronrod = kronrod + (f1 + f2) * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + (f1 + f2) * WG[j / 2];
        }
    }
    let kronrod = kronrod * h;
    let gauss = gauss * h;
    let err = (kronrod - gauss).magnitude();
    Ok((kronrod, err))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    /// Sum of the per-interval error estimates.
    pub error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Subdivisions allowed per panel.
    pub max_splits: usize,
    /// Intervals shorter than this are never split further.
    pub min_width: f64,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-12,
            max_splits: 2000,
            min_width: 1e-13,
        }
    }
}

impl QuadOptions {
    pub fn abs(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<T: QuadValue>(
    f: impl Fn(f64) -> Result<T> + Sync,
    a: f64,
    b: f64,
    opts: &QuadOptions,
) -> Result<QuadResult<T>> {
    integrate_panels(f, &[a, b], opts)
}

/// Integrates `f` over `[breaks[0], breaks[last]]`, starting from the given
/// panels. Put breakpoints at known singularities or kinks.
pub fn integrate_panels<T: QuadValue>(
    f: impl Fn(f64) -> Result<T> + Sync,
    breaks: &[f64],
    opts: &QuadOptions,
) -> Result<QuadResult<T>> {
    if breaks.len() < 2 {
        return Err(Error::InvalidInput("need at least two breakpoints".into()));
    }
    if breaks.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("breakpoints must be strictly increasing".into()));
    }
    let total = breaks[breaks.len() - 1] - breaks[0];
    let n = (breaks.len() - 1) as f64;
    let panels: Vec<Result<QuadResult<T>>> = breaks
        .par_windows(2)
        .map(|w| {
            // half by width, half even, so slivers next to a singularity
            // still get a usable budget
            let share = 0.5 * ((w[1] - w[0]) / total + 1.0 / n);
            adapt(&f, w[0], w[1], opts.abs_tol * share, opts)
        })
        .collect();
    let mut value = T::zero();
    let mut error = 0.0;
    let mut intervals = 0;
    for p in panels {
        let p = p?;
        value = value + p.value;
        error += p.error;
        intervals += p.intervals;
    }
    Ok(QuadResult {
        value,
        error,
        intervals,
    })
}

fn adapt<T: QuadValue>(
    f: &(impl Fn(f64) -> Result<T> + Sync),
    a: f64,
    b: f64,
    abs_tol: f64,
    opts: &QuadOptions,
) -> Result<QuadResult<T>> {
    // (lo, hi, value, error), kept unsorted; panels stay small.
    let (v, e) = gauss_kronrod(f, a, b)?;
    let mut parts = vec![(a, b, v, e)];
    let mut splits = 0;
    loop {
        let value = parts.iter().fold(T::zero(), |acc, p| acc + p.2);
        let error: f64 = parts.iter().map(|p| p.3).sum();
        let tol = abs_tol.max(opts.rel_tol * value.magnitude());
        // pieces too narrow to split keep their estimate if the global
        // budget still covers them
        let stuck: f64 = parts.iter().filter(|p| p.1 - p.0 <= opts.min_width).map(|p| p.3).sum();
        if error <= tol || (error - stuck <= tol && error <= opts.abs_tol) {
            return Ok(QuadResult {
                value,
                error,
                intervals: parts.len(),
            });
        }
        let (worst, _) = parts
            .iter()
            .enumerate()
            .filter(|(_, p)| p.1 - p.0 > opts.min_width)
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .unwrap_or((usize::MAX, &parts[0]));
        if worst == usize::MAX || splits >= opts.max_splits {
            let p = parts
                .iter()
                .max_by(|x, y| x.3.total_cmp(&y.3))
                .copied()
                .unwrap_or((a, b, v, e));
            return Err(Error::Quadrature {
                lo: p.0,
                hi: p.1,
                error,
            });
        }
        let (lo, hi, _, _) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gauss_kronrod(f, lo, mid)?;
        let (v2, e2) = gauss_kronrod(f, mid, hi)?;
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
        splits += 1;
    }
}

/// Evenly spaced breakpoints with panels no longer than `max_len`.
pub fn uniform_breaks(a: f64, b: f64, max_len: f64) -> Vec<f64> {
    let n = (((b - a) / max_len).ceil() as usize).max(1);
    let mut out: Vec<f64> = (0..n).map(|k| a + (b - a) * k as f64 / n as f64).collect();
    out.push(b);
    out
}
