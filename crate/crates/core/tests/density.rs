use std::f64::consts::{LN_2, PI};

use zspiral::density::*;
use zspiral::{ComplexPoint, EvalConfig, LineEvaluator, VerticalSegment};

fn cfg() -> EvalConfig {
    EvalConfig::default()
}

#[test]
fn reflection_fixes_the_modulus_ratio() {
    // |ζ(σ + it)| = |χ(σ + it)| |ζ(1 − σ + it)|, |χ| = (t/2π)^{1/2−σ} (1 + O(1/t))
    let left = LineEvaluator::new(0.2, 6000.0, cfg());
    let right = LineEvaluator::new(0.8, 6000.0, cfg());
    for t in [500.0, 1234.5, 5000.0] {
        let ratio = left.value(t).unwrap().value.norm() / right.value(t).unwrap().value.norm();
        let expected = (t / (2.0 * PI)).powf(0.3);
        assert!((ratio / expected - 1.0).abs() < 5.0 / t, "t {t}: {ratio} vs {expected}");
    }
}

#[test]
fn exponent_grows_as_sigma_decreases() {
    let fits: Vec<ExponentFit> = [0.4, 0.3, 0.2]
        .iter()
        .map(|&s| modulus_exponent_fit(s, 100.0, 2000.0, &FitOptions::default()).unwrap())
        .collect();
    for w in fits.windows(2) {
        assert!(
            w[1].fitted_exponent > w[0].fitted_exponent,
            "{} vs {}",
            w[0].fitted_exponent,
            w[1].fitted_exponent
        );
    }
    for f in &fits {
        assert_eq!(f.points.len(), MIN_FIT_POINTS);
        assert!(f.failed_at.is_none());
        assert!(f.fit_residual.is_finite() && f.fit_residual >= 0.0);
        assert_eq!(f.points.first().unwrap().0, 100.0);
        assert_eq!(f.points.last().unwrap().0, 2000.0);
        assert!(f.points.iter().all(|p| p.1 >= f.min_modulus));
        eprintln!(
            "sigma {}: exponent {:.4} residual {:.3}",
            f.sigma, f.fitted_exponent, f.fit_residual
        );
    }
}

#[test]
fn exponent_is_flat_next_to_the_critical_line() {
    let f = modulus_exponent_fit(0.49, 100.0, 2000.0, &FitOptions::default()).unwrap();
    assert!(f.fitted_exponent.abs() < 0.1, "{}", f.fitted_exponent);
}

#[test]
fn window_minimum_is_below_every_sample() {
    let f = modulus_exponent_fit(0.3, 100.0, 300.0, &FitOptions::default()).unwrap();
    let ev = LineEvaluator::new(0.3, 600.0, cfg());
    for &(t, m) in &f.points {
        for k in 0..=50 {
            let u = t + t * k as f64 / 50.0;
            assert!(ev.value(u).unwrap().value.norm() >= m - 1e-9);
        }
    }
}

#[test]
fn fit_preconditions() {
    let o = FitOptions::default();
    assert!(modulus_exponent_fit(0.5, 100.0, 1000.0, &o).is_err());
    assert!(modulus_exponent_fit(0.2, 5.0, 1000.0, &o).is_err());
    assert!(modulus_exponent_fit(0.2, 1000.0, 100.0, &o).is_err());
    let few = FitOptions { points: 10, ..o };
    assert!(modulus_exponent_fit(0.2, 100.0, 1000.0, &few).is_err());
}

#[test]
fn failed_windows_leave_a_flagged_partial_fit() {
    let o = FitOptions {
        cfg: EvalConfig {
            max_terms: 300,
            ..EvalConfig::with_target(1e-6)
        },
        ..FitOptions::default()
    };
    let f = modulus_exponent_fit(0.3, 100.0, 2000.0, &o).unwrap();
    let at = f.failed_at.expect("large heights need more terms");
    assert!(f.points.len() >= 2 && f.points.len() < MIN_FIT_POINTS);
    assert!(f.points.iter().all(|p| p.0 < at));
}

#[test]
fn arc_length_far_right_is_the_leading_term() {
    let seg = VerticalSegment::new(6.0, 0.0, 10.0, 0.1).unwrap();
    let l = arc_length(&seg, &cfg()).unwrap();
    let model = 10.0 * LN_2 * 2f64.powi(-6);
    assert!((l.value / model - 1.0).abs() < 0.05, "{} vs {model}", l.value);
}

#[test]
fn arc_length_is_additive() {
    let whole = arc_length(&VerticalSegment::new(0.75, 0.0, 40.0, 0.1).unwrap(), &cfg()).unwrap();
    let a = arc_length(&VerticalSegment::new(0.75, 0.0, 20.0, 0.1).unwrap(), &cfg()).unwrap();
    let b = arc_length(&VerticalSegment::new(0.75, 20.0, 40.0, 0.1).unwrap(), &cfg()).unwrap();
    let slack = whole.error + a.error + b.error + 1e-12 * whole.value;
    assert!((whole.value - a.value - b.value).abs() <= slack);
}

#[test]
fn arc_length_on_the_critical_line() {
    let l = arc_length(&VerticalSegment::new(0.5, 0.0, 40.0, 0.1).unwrap(), &cfg()).unwrap();
    assert!(l.value > 0.0 && l.value.is_finite());
    assert!(l.error < 1e-6 * l.value);
}

fn visit_step(t_max: f64) -> f64 {
    let m = sampled_max_slope(0.75, 0.0, t_max, 0.01, 1.1, &cfg()).unwrap();
    visit_step_limit(10, m)
}

#[test]
fn disjoint_disk_is_never_visited() {
    let seg = VerticalSegment::new(0.75, 0.0, 50.0, visit_step(50.0)).unwrap();
    let r = grid_visit_density(&seg, ComplexPoint::new(100.0, 0.0), 1.0, 10, &cfg()).unwrap();
    assert_eq!(r.cells_visited, 0);
    assert_eq!(r.fraction, 0.0);
    assert!(r.cells_total > 300);
}

#[test]
fn visits_grow_with_the_window() {
    let step = visit_step(200.0);
    let centre = ComplexPoint::new(1.0, 0.0);
    let mut last: Option<GridVisitReport> = None;
    for t_max in [50.0, 100.0, 200.0] {
        let seg = VerticalSegment::new(0.75, 0.0, t_max, step).unwrap();
        let r = grid_visit_density(&seg, centre, 0.5, 10, &cfg()).unwrap();
        assert_eq!(r.cells_total, 81);
        assert_eq!(r.cells.iter().filter(|c| c.visited).count() as u64, r.cells_visited);
        assert!((r.fraction - r.cells_visited as f64 / 81.0).abs() < 1e-15);
        // each newly visited cell costs a transit between cells
        let length = arc_length(&seg, &cfg()).unwrap();
        assert!(length.value >= r.cells_visited as f64 / 90.0);
        if let Some(prev) = &last {
            assert!(r.fraction >= prev.fraction);
            for (a, b) in prev.cells.iter().zip(&r.cells) {
                assert!(!a.visited || b.visited);
            }
        }
        last = Some(r);
    }
}

#[test]
fn coarse_sampling_is_rejected() {
    let seg = VerticalSegment::new(0.75, 0.0, 50.0, 0.01).unwrap();
    let e = grid_visit_density(&seg, ComplexPoint::new(1.0, 0.0), 0.5, 10, &cfg()).unwrap_err();
    assert!(matches!(e, zspiral::Error::SamplingTooCoarse { .. }), "{e:?}");
    let seg = VerticalSegment::new(0.75, 0.0, 50.0, 0.001).unwrap();
    assert!(grid_visit_density(&seg, ComplexPoint::new(1.0, 0.0), 0.0, 10, &cfg()).is_err());
    assert!(grid_visit_density(&seg, ComplexPoint::new(1.0, 0.0), 0.5, 0, &cfg()).is_err());
}

#[test]
fn long_window_fills_the_disk() {
    // regression value from the first run: every one of the 81 cells
    let seg = VerticalSegment::new(0.75, 0.0, 2000.0, visit_step(2000.0)).unwrap();
    let r = grid_visit_density(&seg, ComplexPoint::new(1.0, 0.0), 0.5, 10, &cfg()).unwrap();
    assert!(r.fraction >= 0.5);
    assert_eq!(r.cells_visited, 81);
}

#[test]
fn reports_serialize() {
    let seg = VerticalSegment::new(0.75, 0.0, 5.0, 0.001).unwrap();
    let r = grid_visit_density(&seg, ComplexPoint::new(1.0, 0.0), 0.2, 5, &cfg()).unwrap();
    let back: GridVisitReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
    assert_eq!(back, r);
}
