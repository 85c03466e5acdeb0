use std::f64::consts::{LN_2, PI};

use zspiral::jensen::*;
use zspiral::{ComplexPoint, EvalConfig, Result};

fn c(re: f64, im: f64) -> ComplexPoint {
    ComplexPoint::new(re, im)
}

fn opts() -> JensenOptions {
    JensenOptions::default()
}

fn poly(terms: &[(u64, f64)]) -> AnalyticTargetId {
    let terms: Vec<_> = terms.iter().map(|&(n, a)| (n, c(a, 0.0))).collect();
    AnalyticTargetId::dirichlet_poly(&terms).unwrap()
}

/// `s − ρ`: one simple zero at `ρ`.
struct LinearFactor(ComplexPoint);

impl Analytic for LinearFactor {
    fn label(&self) -> String {
        format!("s - ({})", self.0)
    }

    fn eval(&self, s: ComplexPoint, _: &EvalConfig) -> Result<AnalyticValue> {
        Ok(AnalyticValue {
            value: s - self.0,
            derivative: c(1.0, 0.0),
            bound: 4.0 * f64::EPSILON * (s.norm() + self.0.norm()),
        })
    }
}

#[test]
fn power_of_two_is_exact() {
    let f = poly(&[(2, 1.0)]);
    for sigma in [-1.0, 0.0, 1.0, 3.0] {
        let m = jensen_mean(&f, sigma, 0.0, 37.0, &opts()).unwrap();
        let d = jensen_derivative(&f, sigma, 0.0, 37.0, &opts()).unwrap();
        assert!((m.phi.unwrap() + sigma * LN_2).abs() < 1e-10, "{m:?}");
        assert!((d.phi_prime.unwrap() + LN_2).abs() < 1e-10, "{d:?}");
        assert_eq!(m.delta, 37.0);
    }
}

#[test]
fn constant_one_has_zero_mean() {
    let f = poly(&[(1, 1.0)]);
    let m = jensen_mean(&f, 0.4, -5.0, 5.0, &opts()).unwrap();
    assert!(m.phi.unwrap().abs() < 1e-14);
    let d = jensen_derivative(&f, 0.4, -5.0, 5.0, &opts()).unwrap();
    assert_eq!(d.phi_prime, Some(0.0));
}

#[test]
fn zeta_mean_vanishes_right_of_one() {
    let m = jensen_mean(&AnalyticTargetId::Zeta, 2.0, 0.0, 1000.0, &opts()).unwrap();
    let phi = m.phi.unwrap();
    assert!(phi.abs() < 0.01, "phi {phi}");
    assert!(m.quad_error < 1e-6);
}

#[test]
fn zeta_prime_slope_right_of_the_zero_free_abscissa() {
    let d = jensen_derivative(&AnalyticTargetId::ZetaPrime, 4.0, 0.0, 500.0, &opts()).unwrap();
    assert!((d.phi_prime.unwrap() + LN_2).abs() < 0.05, "{d:?}");
}

#[test]
fn lateral_jump_across_a_simple_zero() {
    let (alpha, t0) = (0.7, 3.0);
    let f = LinearFactor(c(alpha, t0));
    let h = 1e-3;
    let (gamma, delta) = (0.0, 10.0);
    let right = jensen_derivative(&f, alpha + h, gamma, delta, &opts()).unwrap();
    let left = jensen_derivative(&f, alpha - h, gamma, delta, &opts()).unwrap();
    let jump = right.phi_prime.unwrap() - left.phi_prime.unwrap();
    let expected = 2.0 * PI / (delta - gamma);
    assert!((jump - expected).abs() < 0.1 * expected, "jump {jump}");
}

#[test]
fn zero_on_the_line() {
    let f = LinearFactor(c(0.5, 2.0));
    let m = jensen_mean(&f, 0.5, -1.0, 2.5, &opts()).unwrap();
    assert_eq!(m.delta, 2.5);
    // ∫ log|t − 2| over [−1, 2.5]
    let (a, b) = (3.0f64, 0.5f64);
    let exact = (a * a.ln() - a + b * b.ln() - b) / (a + b);
    assert!((m.phi.unwrap() - exact).abs() < 1e-8, "{} vs {exact}", m.phi.unwrap());
    // zero at the window end
    let m = jensen_mean(&f, 0.5, -1.0, 2.0, &opts()).unwrap();
    let exact = (a * a.ln() - a) / a;
    assert!((m.phi.unwrap() - exact).abs() < 1e-8, "{} vs {exact}", m.phi.unwrap());
    // the phase is undefined there, and moving δ does not help
    let bad = jensen_derivative(&f, 0.5, -1.0, 2.5, &opts());
    assert!(matches!(bad, Err(zspiral::Error::ZeroOnSegment { .. })), "{bad:?}");
}

#[test]
fn sweep_through_a_line_of_zeros() {
    // 1 − 2^{-s} over two periods, zeros at both ends and in the middle
    let f = poly(&[(1, 1.0), (2, -1.0)]);
    let delta = 4.0 * PI / LN_2;
    let rows = jensen_sweep(&f, &[-1.0, 0.0, 1.0], 0.0, delta, &opts()).unwrap();
    for r in &rows {
        assert!((r.phi.unwrap() - LN_2 * (-r.sigma).max(0.0)).abs() < 1e-8, "{r:?}");
    }
    assert!(rows[1].phi_prime.is_none());
    assert!((rows[0].phi_prime.unwrap() + LN_2).abs() < 1e-8);
    assert!(rows[2].phi_prime.unwrap().abs() < 1e-8);
}

#[test]
fn log_singularity_near_the_line() {
    // zero at distance 1e-6 from the line
    let f = LinearFactor(c(0.5 + 1e-6, 1.0));
    let m = jensen_mean(&f, 0.5, 0.0, 2.0, &opts()).unwrap();
    let d: f64 = 1e-6;
    // ∫_{-1}^{1} ½ log(u² + d²) du
    let exact = 0.5 * (2.0 * (1.0 + d * d).ln() - 4.0 + 4.0 * d * (1.0 / d).atan()) / 2.0;
    assert!((m.phi.unwrap() - exact).abs() < 1e-8, "{} vs {exact}", m.phi.unwrap());
}

#[test]
fn invalid_windows_are_rejected() {
    let f = poly(&[(2, 1.0)]);
    assert!(jensen_mean(&f, 0.0, 1.0, 1.0, &opts()).is_err());
    assert!(jensen_derivative(&f, f64::NAN, 0.0, 1.0, &opts()).is_err());
    assert!(jensen_mean(&AnalyticTargetId::Zeta, 1.0, -1.0, 1.0, &opts()).is_err());
}

#[test]
fn zeta_has_three_zeros_below_thirty() {
    let b = BoxRegion::new(0.0, 1.0, 0.0, 30.0).unwrap();
    let r = count_zeros_box(&AnalyticTargetId::Zeta, b, &ContourOptions::default()).unwrap();
    assert_eq!(r.count, 3);
    assert!(r.nudged, "the corner at s = 1 forces a nudge");
    assert!((r.winding_residual - 3.0).abs() < 0.25);
}

#[test]
fn power_of_two_has_no_zeros() {
    let f = poly(&[(2, 1.0)]);
    for (s1, s2, t1, t2) in [(-1.0, 1.0, 0.0, 20.0), (-5.0, 5.0, -50.0, 50.0)] {
        let r = count_zeros_box(&f, BoxRegion::new(s1, s2, t1, t2).unwrap(), &ContourOptions::default()).unwrap();
        assert_eq!(r.count, 0);
        assert!(r.winding_residual.abs() < 1e-9);
    }
}

#[test]
fn one_minus_power_of_two_zeros() {
    // zeros at σ = 0, t = 2πk / log 2
    let f = poly(&[(1, 1.0), (2, -1.0)]);
    let spacing = 2.0 * PI / LN_2;
    let r = count_zeros_box(
        &f,
        BoxRegion::new(-1.0, 1.0, 0.0, 20.0).unwrap(),
        &ContourOptions::default(),
    )
    .unwrap();
    assert!(r.nudged, "s = 0 sits on the bottom edge");
    assert_eq!(r.count, (20.0 / spacing).floor() as u64);
    // a box around exactly one zero, and one between zeros
    let r = count_zeros_box(
        &f,
        BoxRegion::new(-0.5, 0.5, spacing - 1.0, spacing + 1.0).unwrap(),
        &ContourOptions::default(),
    )
    .unwrap();
    assert_eq!((r.count, r.nudged), (1, false));
    let r = count_zeros_box(
        &f,
        BoxRegion::new(-0.5, 0.5, 1.0, spacing - 1.0).unwrap(),
        &ContourOptions::default(),
    )
    .unwrap();
    assert_eq!(r.count, 0);
}

#[test]
fn contour_through_a_zero_fails_after_one_nudge() {
    let f = LinearFactor(c(0.5, 0.5));
    let opts = ContourOptions {
        nudge: 0.0,
        ..ContourOptions::default()
    };
    let b = BoxRegion::new(0.0, 0.5, 0.0, 1.0).unwrap();
    let e = count_zeros_box(&f, b, &opts).unwrap_err();
    assert!(matches!(e, zspiral::Error::ContourTooClose { .. }), "{e:?}");
    let r = count_zeros_box(&f, b, &ContourOptions::default()).unwrap();
    assert_eq!((r.count, r.nudged), (0, true));
}

#[test]
fn frequency_of_one_minus_power_of_two() {
    let f = poly(&[(1, 1.0), (2, -1.0)]);
    let exact = LN_2 / (2.0 * PI);
    for method in [FrequencyMethod::Count, FrequencyMethod::DerivativeDiff] {
        let z = zero_frequency(&f, -1.0, 1.0, 500.0, method, &ContourOptions::default()).unwrap();
        assert!((z.value - exact).abs() < 0.05 * exact, "{method:?}: {}", z.value);
    }
    let z = zero_frequency(&f, -1.0, 1.0, 500.0, FrequencyMethod::Count, &ContourOptions::default()).unwrap();
    assert_eq!(z.count.unwrap().count, (500.0 / (2.0 * PI / LN_2)).floor() as u64);
}

#[test]
fn frequency_methods_agree_on_dirichlet_polynomials() {
    let targets = [
        poly(&[(2, 1.0)]),
        poly(&[(1, 1.0), (2, 1.0), (3, 1.0)]),
        poly(&[(1, 2.0), (3, -1.0), (5, 0.7)]),
    ];
    let t = 200.0;
    for f in &targets {
        let a = zero_frequency(f, -2.0, 2.0, t, FrequencyMethod::Count, &ContourOptions::default()).unwrap();
        let b = zero_frequency(
            f,
            -2.0,
            2.0,
            t,
            FrequencyMethod::DerivativeDiff,
            &ContourOptions::default(),
        )
        .unwrap();
        let tol = (0.1 * a.value).max(2.0 / t);
        assert!(
            (a.value - b.value).abs() <= tol,
            "{}: {} vs {}",
            f.label(),
            a.value,
            b.value
        );
    }
}

#[test]
fn frequency_preconditions() {
    let f = poly(&[(2, 1.0)]);
    assert!(zero_frequency(&f, 1.0, 1.0, 100.0, FrequencyMethod::Count, &ContourOptions::default()).is_err());
    assert!(zero_frequency(&f, 0.0, 1.0, 49.0, FrequencyMethod::Count, &ContourOptions::default()).is_err());
    for method in [FrequencyMethod::Count, FrequencyMethod::DerivativeDiff] {
        let z = zero_frequency(&f, -3.0, 3.0, 60.0, method, &ContourOptions::default()).unwrap();
        assert!(z.value.abs() < 1e-9);
    }
}

#[test]
fn zeta_prime_frequency_methods_agree() {
    let t = 200.0;
    let f = AnalyticTargetId::ZetaPrime;
    let a = zero_frequency(&f, 0.51, 3.0, t, FrequencyMethod::Count, &ContourOptions::default()).unwrap();
    let b = zero_frequency(
        &f,
        0.51,
        3.0,
        t,
        FrequencyMethod::DerivativeDiff,
        &ContourOptions::default(),
    )
    .unwrap();
    let tol = (0.1 * a.value).max(2.0 / t);
    eprintln!("zeta' zeros per unit height: count {} derivative {}", a.value, b.value);
    assert!((a.value - b.value).abs() <= tol);
}

#[test]
fn mean_curvature_numerator_profile() {
    let o = opts();
    let far = mean_curvature_numerator(4.0, 500.0, &o).unwrap();
    assert!((far.value + LN_2).abs() < 0.05, "{far:?}");
    assert!((far.value - far.phase_value).abs() < 1e-6);
    let mid = mean_curvature_numerator(1.5, 500.0, &o).unwrap();
    let near = mean_curvature_numerator(0.8, 500.0, &o).unwrap();
    eprintln!("sigma 0.8: {near:?}\nsigma 1.5: {mid:?}");
    assert!(near.value <= mid.value + 0.05);
    assert!(near.value < 0.0);
    assert!((near.value - near.phase_value).abs() < 1e-6);
}

#[test]
fn mean_curvature_preconditions() {
    assert!(mean_curvature_numerator(0.5005, 500.0, &opts()).is_err());
    assert!(mean_curvature_numerator(2.0, 99.0, &opts()).is_err());
}

#[test]
fn dirichlet_polynomial_phi_is_convex() {
    let f = poly(&[(1, 1.0), (2, 1.5), (3, -0.5)]);
    let sigmas: Vec<f64> = (0..13).map(|k| -3.0 + 0.5 * k as f64).collect();
    let rows = jensen_sweep(&f, &sigmas, 0.0, 300.0, &opts()).unwrap();
    for w in rows.windows(3) {
        let second = w[0].phi.unwrap() - 2.0 * w[1].phi.unwrap() + w[2].phi.unwrap();
        let slack = 4.0 * w.iter().map(|r| r.quad_error).fold(0.0, f64::max) + 0.02;
        assert!(second >= -slack, "sigma {}: {second}", w[1].sigma);
    }
    // slopes: −log 3 far left, 0 far right
    assert!((rows[0].phi_prime.unwrap() + 3f64.ln()).abs() < 0.05);
    assert!(rows[12].phi_prime.unwrap().abs() < 0.05);
}

#[test]
fn dirichlet_polynomial_phi_is_affine_between_zero_abscissas() {
    // 2 − 2^{-s} vanishes only on σ = −1; over whole periods the mean of
    // log|1 − w e^{-it log 2}| is 0 for |w| < 1.
    let f = poly(&[(1, 2.0), (2, -1.0)]);
    let period = 2.0 * PI / LN_2;
    let delta = 40.0 * period;
    let fit = |sigmas: &[f64]| -> (f64, f64) {
        let ys: Vec<f64> = sigmas
            .iter()
            .map(|&s| jensen_mean(&f, s, 0.0, delta, &opts()).unwrap().phi.unwrap())
            .collect();
        let n = sigmas.len() as f64;
        let (mx, my) = (sigmas.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
        let sxy: f64 = sigmas.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = sigmas.iter().map(|x| (x - mx).powi(2)).sum();
        let slope = sxy / sxx;
        let resid = sigmas
            .iter()
            .zip(&ys)
            .map(|(x, y)| (y - my - slope * (x - mx)).abs())
            .fold(0.0, f64::max);
        (slope, resid)
    };
    let (slope, resid) = fit(&[-0.5, 0.0, 0.5, 1.0, 2.0]);
    assert!(slope.abs() < 1e-8 && resid < 1e-8, "{slope} {resid}");
    let (slope, resid) = fit(&[-3.0, -2.5, -2.0, -1.5]);
    assert!((slope + LN_2).abs() < 1e-8 && resid < 1e-8, "{slope} {resid}");
}

#[test]
fn derivative_matches_difference_quotient() {
    let f = poly(&[(1, 1.0), (2, 1.0), (3, 0.5)]);
    let h = 1e-3;
    for sigma in [-0.7, 0.3, 1.2] {
        let p = jensen_mean(&f, sigma + h, 0.0, 100.0, &opts()).unwrap();
        let m = jensen_mean(&f, sigma - h, 0.0, 100.0, &opts()).unwrap();
        let d = jensen_derivative(&f, sigma, 0.0, 100.0, &opts()).unwrap();
        let fd = (p.phi.unwrap() - m.phi.unwrap()) / (2.0 * h);
        let tol = (p.quad_error + m.quad_error) / h + d.quad_error + 1e-3;
        assert!(
            (fd - d.phi_prime.unwrap()).abs() < tol,
            "sigma {sigma}: {fd} vs {:?}",
            d.phi_prime
        );
    }
}

#[test]
fn estimates_serialize_with_window_metadata() {
    let f = poly(&[(2, 1.0)]);
    let rows = jensen_sweep(&f, &[0.0, 1.0], 0.0, 10.0, &opts()).unwrap();
    let json = serde_json::to_string(&rows[1]).unwrap();
    for key in [
        "\"sigma\"",
        "\"gamma\"",
        "\"delta\"",
        "\"phi\"",
        "\"phi_prime\"",
        "\"quad_error\"",
    ] {
        assert!(json.contains(key), "{json}");
    }
    let back: JensenEstimate = serde_json::from_str(&json).unwrap();
    assert_eq!(back, rows[1]);
}
