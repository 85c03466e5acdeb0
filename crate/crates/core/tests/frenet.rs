use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use nalgebra::{Rotation3, Vector3};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zspiral::frenet::*;
use zspiral::{ComplexPoint, Error};

fn circle(radius: f64, dir: f64, n: usize, t1: f64) -> PlaneCurve {
    let samples = (0..n)
        .map(|k| {
            let t = t1 * k as f64 / (n - 1) as f64;
            (t, ComplexPoint::from_polar(radius, dir * t))
        })
        .collect();
    PlaneCurve::new(samples, false).unwrap()
}

/// A smooth random function: a constant plus four low-frequency sines.
fn band_limited(rng: &mut ChaCha8Rng, base: f64, amp: f64) -> impl Fn(f64) -> f64 {
    let terms: Vec<(f64, f64, f64)> = (0..4)
        .map(|_| {
            (
                rng.gen_range(-amp..amp) / 4.0,
                rng.gen_range(0.2..2.0),
                rng.gen_range(0.0..2.0 * PI),
            )
        })
        .collect();
    move |t| base + terms.iter().map(|(a, w, p)| a * (w * t + p).sin()).sum::<f64>()
}

#[test]
fn unit_circle_closes() {
    let p = InvariantProfile::from_fn(0.0, 2.0 * PI, 101, |_| 1.0, None).unwrap();
    let c = reconstruct_plane(&p, 0.0, 2.0 * PI).unwrap();
    assert!(c.arclength);
    for &(t, z) in &c.samples {
        let exact = -ComplexPoint::i() * (ComplexPoint::from_polar(1.0, t) - 1.0);
        assert!((z - exact).norm() < 1e-9, "t = {t}");
    }
    assert!(c.samples.last().unwrap().1.norm() <= 1e-9);
}

#[test]
fn clothoid_endpoint_matches_fresnel_quadrature() {
    let p = InvariantProfile::from_fn(0.0, 2.0, 21, |t| t, None).unwrap();
    let c = reconstruct_plane(&p, 0.0, 2.0).unwrap();
    // composite Simpson for ∫_0^2 exp(i u²/2) du
    let m = 200_000;
    let h = 2.0 / m as f64;
    let f = |u: f64| ComplexPoint::from_polar(1.0, u * u / 2.0);
    let mut acc = f(0.0) + f(2.0);
    for k in 1..m {
        acc += f(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    let oracle = acc * (h / 3.0);
    let end = c.samples.last().unwrap().1;
    assert!((end - oracle).norm() < 1e-8, "{end} vs {oracle}");
}

#[test]
fn sub_interval_starts_at_origin() {
    let p = InvariantProfile::from_fn(0.0, 4.0, 41, |t| 0.3 * t, None).unwrap();
    let c = reconstruct_plane(&p, 1.05, 3.0).unwrap();
    assert_eq!(c.samples[0], (1.05, ComplexPoint::new(0.0, 0.0)));
    assert_eq!(c.samples.last().unwrap().0, 3.0);
    // the tangent starts along +1; the first chord points at the mean
    // turning angle over [1.05, 1.1], which is 0.15 (2.1 · 0.025 + 0.05² / 3)
    let d = c.samples[1].1 - c.samples[0].1;
    assert!((d.arg() - 0.008).abs() < 1e-6, "{}", d.arg());
}

#[test]
fn circle_of_radius_two_both_orientations() {
    for (dir, sign) in [(1.0, 1.0), (-1.0, -1.0)] {
        let prof = extract_plane_invariants(&circle(2.0, dir, 301, 3.0)).unwrap();
        for s in &prof.samples {
            assert!((s.kappa - sign * 0.5).abs() < 1e-4, "kappa {}", s.kappa);
        }
        // parameter speed 2, so arclength runs to 6
        assert!((prof.samples.last().unwrap().t - 6.0).abs() < 1e-6);
    }
}

#[test]
fn non_uniform_samples_are_resampled() {
    let samples = (0..1000)
        .map(|k| {
            let u = k as f64 / 999.0;
            let t = 3.0 * u * u + 0.5 * u;
            (t, ComplexPoint::from_polar(2.0, t))
        })
        .collect();
    let prof = extract_plane_invariants(&PlaneCurve::new(samples, false).unwrap()).unwrap();
    assert!(prof.samples.iter().all(|s| (s.kappa - 0.5).abs() < 1e-4));
}

#[test]
fn orientation_flips_curvature_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let kappa = band_limited(&mut rng, 0.2, 1.5);
    let p = InvariantProfile::from_fn(0.0, 5.0, 251, kappa, None).unwrap();
    let c = reconstruct_plane(&p, 0.0, 5.0).unwrap();
    let fwd = extract_plane_invariants(&c).unwrap();
    let bwd = extract_plane_invariants(&c.reversed()).unwrap();
    let n = fwd.samples.len();
    let len = fwd.samples[n - 1].t;
    for i in 0..n {
        let (a, b) = (fwd.samples[i], bwd.samples[n - 1 - i]);
        assert_eq!(a.kappa, -b.kappa);
        assert!((len - b.t - a.t).abs() < 1e-9);
    }
}

#[test]
fn plane_round_trip_on_random_profiles() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let base = rng.gen_range(-1.0..1.0);
        let kappa = band_limited(&mut rng, base, 2.0);
        let p = InvariantProfile::from_fn(0.0, 4.0, 401, &kappa, None).unwrap();
        let c = reconstruct_plane(&p, 0.0, 4.0).unwrap();
        let back = extract_plane_invariants(&c).unwrap();
        for s in &back.samples {
            worst = worst.max((s.kappa - kappa(s.t)).abs());
        }
    }
    assert!(worst < 1e-4, "sup error {worst}");
}

#[test]
fn arclength_reparametrization_has_unit_speed() {
    let samples = (0..301)
        .map(|k| {
            let t = k as f64 / 300.0;
            (t, ComplexPoint::new(t, t * t))
        })
        .collect();
    let c = reparametrize_by_arclength(&PlaneCurve::new(samples, false).unwrap(), 400).unwrap();
    let exact_len = 5f64.sqrt() / 2.0 + 2f64.asinh() / 4.0;
    let len = c.samples.last().unwrap().0;
    assert!((len - exact_len).abs() < 1e-8, "{len} vs {exact_len}");
    let v = plane_speeds(&c).unwrap();
    for s in &v[1..v.len() - 1] {
        assert!((s - 1.0).abs() < 1e-6, "speed {s}");
    }
    assert!(PlaneCurve::new(c.samples.clone(), true).is_ok());
}

#[test]
fn degenerate_curves_are_rejected() {
    let still: Vec<_> = (0..10).map(|k| (k as f64, ComplexPoint::new(1.0, 1.0))).collect();
    let c = PlaneCurve::new(still, false).unwrap();
    assert!(matches!(extract_plane_invariants(&c), Err(Error::DegenerateCurve(_))));
    let few: Vec<_> = (0..4).map(|k| (k as f64, ComplexPoint::new(k as f64, 0.0))).collect();
    assert!(extract_plane_invariants(&PlaneCurve::new(few, false).unwrap()).is_err());
    let fast = vec![(0.0, ComplexPoint::new(0.0, 0.0)), (1.0, ComplexPoint::new(3.0, 0.0))];
    assert!(PlaneCurve::new(fast, true).is_err());
}

#[test]
fn planar_space_circle_closes() {
    let p = InvariantProfile::from_fn(0.0, 2.0 * PI, 101, |_| 1.0, Some(&|_| 0.0)).unwrap();
    let c = reconstruct_space(&p, 0.0, 2.0 * PI).unwrap();
    assert!(c.samples.last().unwrap().1.norm() <= 1e-8);
    for &(t, x) in &c.samples {
        let exact = Vector3::new(t.sin(), 1.0 - t.cos(), 0.0);
        assert!((x - exact).norm() < 1e-8, "t = {t}");
    }
}

fn helix_closed_form(s: f64) -> Vector3<f64> {
    let r = FRAC_1_SQRT_2;
    // rows: initial tangent, normal and binormal of the standard helix
    let rot = nalgebra::Matrix3::new(0.0, r, r, -1.0, 0.0, 0.0, 0.0, -r, r);
    let c = |u: f64| Vector3::new((u / SQRT_2).cos(), (u / SQRT_2).sin(), u / SQRT_2);
    rot * (c(s) - c(0.0))
}

#[test]
fn helix_matches_closed_form() {
    let t1 = 4.0 * PI * SQRT_2;
    let p = InvariantProfile::from_fn(0.0, t1, 1801, |_| 0.5, Some(&|_| 0.5)).unwrap();
    let c = reconstruct_space(&p, 0.0, t1).unwrap();
    for &(t, x) in &c.samples {
        assert!((x - helix_closed_form(t)).norm() < 1e-7, "t = {t}");
    }
    for f in c.frames.as_ref().unwrap() {
        assert!(f.defect() < 1e-8);
    }
    let back = extract_space_invariants(&c).unwrap();
    for s in &back.samples {
        assert!((s.kappa - 0.5).abs() < 1e-4, "{s:?}");
        assert!((s.torsion.unwrap() - 0.5).abs() < 1e-4, "{s:?}");
    }
}

#[test]
fn planar_curve_has_no_torsion() {
    let p = InvariantProfile::from_fn(0.0, 4.0, 401, |t| 1.0 + 0.3 * t.sin(), None).unwrap();
    let c = embed_plane(&reconstruct_plane(&p, 0.0, 4.0).unwrap());
    for s in extract_space_invariants(&c).unwrap().samples {
        assert!(s.torsion.unwrap().abs() <= 1e-6);
    }
    // a straight line has no defined torsion
    let line: Vec<_> = (0..20).map(|k| (k as f64, Vector3::new(k as f64, 0.0, 0.0))).collect();
    let prof = extract_space_invariants(&SpaceCurve::new(line).unwrap()).unwrap();
    assert!(prof.samples.iter().all(|s| s.torsion.is_none()));
}

#[test]
fn space_round_trip_on_random_profiles() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let (mut worst_k, mut worst_t): (f64, f64) = (0.0, 0.0);
    for _ in 0..20 {
        let (kb, tb) = (rng.gen_range(0.8..1.5), rng.gen_range(-1.0..1.0));
        let kappa = band_limited(&mut rng, kb, 1.2);
        let torsion = band_limited(&mut rng, tb, 2.0);
        // the torsion stencil is second order, so this needs a fine grid
        let p = InvariantProfile::from_fn(0.0, 4.0, 1601, &kappa, Some(&torsion)).unwrap();
        let c = reconstruct_space(&p, 0.0, 4.0).unwrap();
        assert!(c.frames.as_ref().unwrap().iter().all(|f| f.defect() < 1e-8));
        for s in extract_space_invariants(&c).unwrap().samples {
            worst_k = worst_k.max((s.kappa - kappa(s.t)).abs());
            let e = (s.torsion.unwrap() - torsion(s.t)).abs();
            worst_t = worst_t.max(e);
        }
    }
    assert!(worst_k < 1e-4 && worst_t < 1e-4, "kappa {worst_k}, torsion {worst_t}");
}

#[test]
fn rigid_motion_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let kappa = band_limited(&mut rng, 1.0, 1.0);
    let torsion = band_limited(&mut rng, 0.3, 1.0);
    let p = InvariantProfile::from_fn(0.0, 6.0, 121, &kappa, Some(&torsion)).unwrap();
    let a = reconstruct_space(&p, 0.0, 6.0).unwrap();
    let rot = Rotation3::from_euler_angles(0.4, 1.3, -2.2).into_inner();
    let frame = Frame {
        tangent: rot.column(0).into_owned(),
        normal: rot.column(1).into_owned(),
        binormal: rot.column(2).into_owned(),
    };
    let b = reconstruct_space_from(&p, 0.0, 6.0, &frame, &Vector3::new(3.0, -1.0, 2.0)).unwrap();
    let fit = procrustes_align(&a.points(), &b.points()).unwrap();
    assert!(fit.max_residual < 1e-8, "residual {}", fit.max_residual);
    assert!(sampled_distance(&a.points(), &b.points()) > 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn frames_stay_orthonormal(k0 in 0.2f64..3.0, k1 in -0.15f64..0.15, tau in -2.0f64..2.0) {
        let p = InvariantProfile::from_fn(0.0, 3.0, 31, |t| k0 + k1 * t, Some(&|t: f64| tau * t.cos())).unwrap();
        let c = reconstruct_space(&p, 0.0, 3.0).unwrap();
        for f in c.frames.unwrap() {
            prop_assert!(f.defect() < 1e-8);
        }
    }

    #[test]
    fn plane_reconstruction_has_unit_speed(a in -2.0f64..2.0, b in -1.0f64..1.0) {
        let p = InvariantProfile::from_fn(0.0, 2.0, 21, |t| a + b * t, None).unwrap();
        let c = reconstruct_plane(&p, 0.0, 2.0).unwrap();
        for w in c.samples.windows(2) {
            let chord = (w[1].1 - w[0].1).norm();
            prop_assert!(chord <= (w[1].0 - w[0].0) * (1.0 + 1e-12));
        }
    }
}
