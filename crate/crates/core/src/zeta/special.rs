//! Real log-gamma and digamma, plus `ζ` and `ζ′/ζ` on the negative real axis
//! through the functional equation.

use super::{eval_zeta_jet, EvalConfig};
use crate::error::Result;
use crate::ComplexPoint;
use std::f64::consts::PI;

// B_{2k} / (2k) for the Stirling series of log Γ, and B_{2k} / (2k) for ψ.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];
const DIGAMMA: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
];

const SHIFT: f64 = 16.0;

/// `log Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut x = x;
    let mut acc = 0.0;
    while x < SHIFT {
        acc -= x.ln();
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut p = inv;
    for c in STIRLING {
        series += c * p;
        p *= inv2;
    }
    acc + (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + series
}

/// `ψ(x) = Γ′/Γ(x)` for `x > 0`.
pub fn digamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut x = x;
    let mut acc = 0.0;
    while x < SHIFT {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    let mut series = 0.0;
    let mut p = inv2;
    for c in DIGAMMA {
        series += c * p;
        p *= inv2;
    }
    acc + x.ln() - 0.5 / x - series
}

/// `(ζ(x), ζ′(x)/ζ(x))` for real `x ≤ -1`, via the functional equation
/// `ζ(x) = 2^x π^{x-1} sin(πx/2) Γ(1-x) ζ(1-x)`.
pub fn zeta_and_log_derivative_negative(x: f64) -> Result<(f64, f64)> {
    debug_assert!(x <= -1.0);
    let u = 1.0 - x;
    let cfg = EvalConfig::with_target(1e-13);
    let jet = eval_zeta_jet(ComplexPoint::new(u, 0.0), &cfg)?;
    let (zu, dzu) = (jet.value.re, jet.d1.re);
    let half = 0.5 * PI * x;
    let log_mag = x * 2f64.ln() + (x - 1.0) * PI.ln() + ln_gamma(u);
    let zeta = log_mag.exp() * half.sin() * zu;
    let log_deriv = (2.0 * PI).ln() + 0.5 * PI * half.cos() / half.sin() - digamma(u) - dzu / zu;
    Ok((zeta, log_deriv))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_values() {
        assert!((ln_gamma(1.0)).abs() < 1e-15);
        assert!((ln_gamma(0.5) - 0.5 * PI.ln()).abs() < 1e-14);
        assert!((ln_gamma(10.0) - 362_880f64.ln()).abs() < 1e-13);
        assert!((ln_gamma(101.0) - 363.739_375_555_563_5).abs() < 1e-11);
    }

    #[test]
    fn digamma_values() {
        let euler_gamma = 0.577_215_664_901_532_9;
        assert!((digamma(1.0) + euler_gamma).abs() < 1e-15);
        assert!((digamma(0.5) + euler_gamma + 2.0 * 2f64.ln()).abs() < 1e-14);
        // ψ(x+1) = ψ(x) + 1/x
        for x in [0.3, 2.7, 17.5, 80.25] {
            assert!((digamma(x + 1.0) - digamma(x) - 1.0 / x).abs() < 1e-13);
        }
    }

    #[test]
    fn functional_equation_matches_known_values() {
        let (z, _) = zeta_and_log_derivative_negative(-3.0 + 1e-300).unwrap();
        assert!((z - 1.0 / 120.0).abs() < 1e-15);
        let (z, _) = zeta_and_log_derivative_negative(-1.0).unwrap();
        assert!((z + 1.0 / 12.0).abs() < 1e-15);
        let (z, _) = zeta_and_log_derivative_negative(-11.0).unwrap();
        assert!((z - 691.0 / 32760.0).abs() < 1e-15);
    }
}
