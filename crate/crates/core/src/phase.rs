//! Continuous tracking of `arg f` along a path.
//!
//! The change of argument is what both the argument principle and the
//! vertical means of `Re f′/f` reduce to: along `t ↦ f(σ + it)`,
//! `d/dt arg f = Re (f′/f)`. Steps are sized from the logarithmic derivative
//! and every step is checked against the trapezoid prediction of the phase
//! increment, so no branch of the logarithm can be skipped silently.

use crate::error::{Error, Result};
use crate::ComplexPoint;

#[derive(Debug, Clone, Copy)]
pub struct PhaseOptions {
    /// Largest step in the path parameter.
    pub max_step: f64,
    /// Target phase increment per step (radians).
    pub max_turn: f64,
    /// Smallest step before giving up.
    pub min_step: f64,
}

impl Default for PhaseOptions {
    fn default() -> Self {
        Self {
            max_step: 0.1,
            max_turn: 0.3,
            min_step: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTrack {
    /// Total continuous change of `arg f` from `a` to `b`.
    pub change: f64,
    pub steps: usize,
    /// Smallest `|f / (df/dx)|` seen and where: a Newton-step estimate of
    /// the distance to the nearest zero when the path has unit speed.
    pub closest: (f64, f64),
    /// Accepted step ends, starting with `a` and ending with `b`. Dense
    /// where the phase turns fast, i.e. near zeros.
    pub points: Vec<f64>,
}

/// `f(x)` returns the value and its derivative along the path.
pub fn track_phase(
    f: impl Fn(f64) -> Result<(ComplexPoint, ComplexPoint)>,
    a: f64,
    b: f64,
    opts: &PhaseOptions,
) -> Result<PhaseTrack> {
    if !(b > a) {
        return Err(Error::InvalidInput(format!("empty path [{a}, {b}]")));
    }
    let ratio = |v: ComplexPoint, d: ComplexPoint, x: f64| -> Result<ComplexPoint> {
        if v.norm() == 0.0 || !v.norm().is_finite() {
            return Err(Error::ZeroOnSegment { t: x });
        }
        Ok(d / v)
    };
    let (mut v, d) = f(a)?;
    let mut g = ratio(v, d, a)?;
    let mut x = a;
    let mut change = 0.0;
    let mut steps = 0;
    let mut closest = (a, 1.0 / g.norm());
    let mut points = vec![a];
    while x < b {
        let mut h = opts.max_step.min(opts.max_turn / g.norm()).min(b - x);
        loop {
            if h < opts.min_step && h < b - x {
                return Err(Error::ZeroOnSegment { t: x });
            }
            // never leave a sliver shorter than min_step before b
            let xn = if h >= b - x - opts.min_step { b } else { x + h };
            let (vn, dn) = f(xn)?;
            let gn = ratio(vn, dn, xn)?;
            let turn = (vn / v).arg();
            let predicted = 0.5 * (g.im + gn.im) * (xn - x);
            let tol = 0.25 * opts.max_turn;
            if turn.abs() <= 2.0 * opts.max_turn && (turn - predicted).abs() <= tol {
                change += turn;
                steps += 1;
                x = xn;
                points.push(x);
                v = vn;
                g = gn;
                let dist = 1.0 / g.norm();
                if dist < closest.1 {
                    closest = (x, dist);
                }
                break;
            }
            h *= 0.5;
        }
    }
    Ok(PhaseTrack {
        change,
        steps,
        closest,
        points,
    })
}
