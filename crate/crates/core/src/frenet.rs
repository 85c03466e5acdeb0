//! Plane and space curves from their curvature (and torsion), and back.

use crate::error::{Error, Result};
use crate::quad::{integrate, QuadOptions};
use crate::spline::CubicSpline;
use crate::ComplexPoint;
use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

pub type Point3 = Vector3<f64>;

/// Curvature at or below this leaves the torsion undefined.
pub const TORSION_KAPPA_MIN: f64 = 1e-6;

/// Smallest speed accepted when extracting invariants.
pub const MIN_SPEED: f64 = 1e-6;

/// Largest integration step for the frame equations.
pub const MAX_FRAME_STEP: f64 = 1e-3;

/// Quadrature tolerance per unit length for plane reconstruction.
pub const PLANE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub t: f64,
    pub kappa: f64,
    pub torsion: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantProfile {
    pub samples: Vec<ProfileSample>,
}

impl InvariantProfile {
    pub fn new(samples: Vec<ProfileSample>) -> Result<Self> {
        if samples.len() < crate::spline::MIN_KNOTS {
            return Err(Error::InvalidInput(format!(
                "a profile needs at least {} samples, got {}",
                crate::spline::MIN_KNOTS,
                samples.len()
            )));
        }
        if samples.windows(2).any(|w| !(w[1].t > w[0].t)) {
            return Err(Error::InvalidInput(
                "profile parameters must be strictly increasing".into(),
            ));
        }
        let finite = samples
            .iter()
            .all(|s| s.t.is_finite() && s.kappa.is_finite() && s.torsion.is_none_or(f64::is_finite));
        if !finite {
            return Err(Error::InvalidInput("profile values must be finite".into()));
        }
        Ok(Self { samples })
    }

    /// Samples `kappa` (and `torsion`) at `n` evenly spaced points of `[t0, t1]`.
    pub fn from_fn(
        t0: f64,
        t1: f64,
        n: usize,
        kappa: impl Fn(f64) -> f64,
        torsion: Option<&dyn Fn(f64) -> f64>,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput("need at least two samples".into()));
        }
        let samples = (0..n)
            .map(|k| {
                let t = t0 + (t1 - t0) * k as f64 / (n - 1) as f64;
                ProfileSample {
                    t,
                    kappa: kappa(t),
                    torsion: torsion.map(|f| f(t)),
                }
            })
            .collect();
        Self::new(samples)
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.samples[0].t, self.samples[self.samples.len() - 1].t)
    }

    pub fn has_torsion(&self) -> bool {
        self.samples.iter().all(|s| s.torsion.is_some())
    }

    fn ts(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    fn kappa_spline(&self) -> Result<CubicSpline> {
        let k: Vec<f64> = self.samples.iter().map(|s| s.kappa).collect();
        CubicSpline::new(&self.ts(), &k)
    }

    fn torsion_spline(&self) -> Result<CubicSpline> {
        let tau = self
            .samples
            .iter()
            .map(|s| s.torsion)
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| Error::InvalidInput("profile has no torsion channel".into()))?;
        CubicSpline::new(&self.ts(), &tau)
    }

    /// Knots inside `[t0, t1]`, with both ends included.
    fn output_grid(&self, t0: f64, t1: f64) -> Result<Vec<f64>> {
        let (lo, hi) = self.domain();
        let slack = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
        if !(t0 < t1) || t0 < lo - slack || t1 > hi + slack {
            return Err(Error::Coverage {
                have_lo: lo,
                have_hi: hi,
                want_lo: t0,
                want_hi: t1,
            });
        }
        let mut grid = vec![t0];
        grid.extend(self.ts().into_iter().filter(|&t| t > t0 && t < t1));
        grid.push(t1);
        Ok(grid)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneCurve {
    pub samples: Vec<(f64, ComplexPoint)>,
    /// Parametrized by arclength.
    pub arclength: bool,
}

impl PlaneCurve {
    pub fn new(samples: Vec<(f64, ComplexPoint)>, arclength: bool) -> Result<Self> {
        if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::InvalidInput(
                "curve parameters must be strictly increasing".into(),
            ));
        }
        if arclength {
            for w in samples.windows(2) {
                let chord = (w[1].1 - w[0].1).norm();
                if chord > 1.05 * (w[1].0 - w[0].0) {
                    return Err(Error::InvalidInput(format!(
                        "chord {chord} exceeds the parameter step at t = {}",
                        w[0].0
                    )));
                }
            }
        }
        Ok(Self { samples, arclength })
    }

    /// The same points traversed backwards, reindexed by `a + b − t`.
    pub fn reversed(&self) -> Self {
        let a = self.samples.first().map_or(0.0, |s| s.0);
        let b = self.samples.last().map_or(0.0, |s| s.0);
        Self {
            samples: self.samples.iter().rev().map(|&(t, p)| (a + b - t, p)).collect(),
            arclength: self.arclength,
        }
    }

    pub fn points(&self) -> Vec<ComplexPoint> {
        self.samples.iter().map(|s| s.1).collect()
    }
}

/// Orthonormal moving frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub tangent: Point3,
    pub normal: Point3,
    pub binormal: Point3,
}

impl Frame {
    pub fn standard() -> Self {
        Self {
            tangent: Point3::x(),
            normal: Point3::y(),
            binormal: Point3::z(),
        }
    }

    fn matrix(&self) -> Matrix3<f64> {
        Matrix3::from_columns(&[self.tangent, self.normal, self.binormal])
    }

    fn from_matrix(m: &Matrix3<f64>) -> Self {
        Self {
            tangent: m.column(0).into_owned(),
            normal: m.column(1).into_owned(),
            binormal: m.column(2).into_owned(),
        }
    }

    /// Largest deviation from an orthonormal right-handed frame.
    pub fn defect(&self) -> f64 {
        let m = self.matrix();
        let gram = m.transpose() * m - Matrix3::identity();
        gram.abs().max().max((m.determinant() - 1.0).abs())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceCurve {
    pub samples: Vec<(f64, Point3)>,
    pub frames: Option<Vec<Frame>>,
}

impl SpaceCurve {
    pub fn new(samples: Vec<(f64, Point3)>) -> Result<Self> {
        if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::InvalidInput(
                "curve parameters must be strictly increasing".into(),
            ));
        }
        Ok(Self { samples, frames: None })
    }

    pub fn points(&self) -> Vec<Point3> {
        self.samples.iter().map(|s| s.1).collect()
    }
}

/// The unit-speed curve with curvature `κ` on `[t0, t1]`, starting at 0
/// with tangent `+1`: `g(t) = ∫_{t0}^t exp(i ∫_{t0}^u κ) du`.
///
/// `κ` is interpolated by a cubic spline, whose integral is exact; the outer
/// integral is adaptive Gauss–Kronrod between consecutive output points.
pub fn reconstruct_plane(profile: &InvariantProfile, t0: f64, t1: f64) -> Result<PlaneCurve> {
    let grid = profile.output_grid(t0, t1)?;
    let kappa = profile.kappa_spline()?;
    let theta0 = kappa.antiderivative(t0);
    let unit = |u: f64| Ok(ComplexPoint::from_polar(1.0, kappa.antiderivative(u) - theta0));
    let mut samples = Vec::with_capacity(grid.len());
    let mut g = ComplexPoint::new(0.0, 0.0);
    samples.push((t0, g));
    for w in grid.windows(2) {
        let opts = QuadOptions::abs(PLANE_TOLERANCE * (w[1] - w[0]));
        g += integrate(unit, w[0], w[1], &opts)?.value;
        samples.push((w[1], g));
    }
    Ok(PlaneCurve {
        samples,
        arclength: true,
    })
}

/// Finite-difference derivatives of evenly spaced samples with respect to
/// the sample index: 5-point central stencils inside, one-sided 5-point
/// stencils at the two points next to each end (one order less accurate).
///
/// Stencils are written so that reversing the samples negates odd
/// derivatives and keeps even ones bit for bit.
fn index_derivatives(f: &[f64]) -> [Vec<f64>; 3] {
    let n = f.len();
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    let mut d3 = vec![0.0; n];
    // Coefficients in f(i), f(i+1), ..., f(i+4) for offsets 0 and 1 from the end.
    const FIRST: [[f64; 5]; 2] = [
        [-25.0 / 12.0, 4.0, -3.0, 4.0 / 3.0, -0.25],
        [-0.25, -5.0 / 6.0, 1.5, -0.5, 1.0 / 12.0],
    ];
    const SECOND: [[f64; 5]; 2] = [
        [35.0 / 12.0, -26.0 / 3.0, 9.5, -14.0 / 3.0, 11.0 / 12.0],
        [11.0 / 12.0, -5.0 / 3.0, 0.5, 1.0 / 3.0, -1.0 / 12.0],
    ];
    const THIRD: [[f64; 5]; 2] = [[-2.5, 9.0, -12.0, 7.0, -1.5], [-1.5, 5.0, -6.0, 3.0, -0.5]];
    let one_sided =
        |get: &dyn Fn(usize) -> f64, c: &[f64; 5]| -> f64 { c.iter().enumerate().map(|(k, ck)| ck * get(k)).sum() };
    for i in 0..n {
        if i >= 2 && i + 2 < n {
            let (m2, m1, p1, p2) = (f[i - 2], f[i - 1], f[i + 1], f[i + 2]);
            d1[i] = ((m2 - p2) + 8.0 * (p1 - m1)) / 12.0;
            d2[i] = (16.0 * (p1 + m1) - (p2 + m2) - 30.0 * f[i]) / 12.0;
            d3[i] = ((p2 - m2) - 2.0 * (p1 - m1)) / 2.0;
        } else {
            let (off, dir) = if i < 2 { (i, 1.0) } else { (n - 1 - i, -1.0) };
            // Samples read away from the nearby end.
            let get = |k: usize| -> f64 {
                let j = k as isize - off as isize;
                if dir > 0.0 {
                    f[(i as isize + j) as usize]
                } else {
                    f[(i as isize - j) as usize]
                }
            };
            d1[i] = dir * one_sided(&get, &FIRST[off]);
            d2[i] = one_sided(&get, &SECOND[off]);
            d3[i] = dir * one_sided(&get, &THIRD[off]);
        }
    }
    [d1, d2, d3]
}

/// Evenly spaced copy of `samples` (cubic spline resampling), or the input
/// itself if it already is evenly spaced.
fn uniform_channels(ts: &[f64], channels: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = ts.len();
    let h = (ts[n - 1] - ts[0]) / (n - 1) as f64;
    let uniform = ts.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h);
    if uniform {
        return Ok((ts.to_vec(), channels.to_vec()));
    }
    let grid: Vec<f64> = (0..n).map(|k| ts[0] + k as f64 * h).collect();
    let mut out = Vec::with_capacity(channels.len());
    for c in channels {
        let s = CubicSpline::new(ts, c)?;
        out.push(grid.iter().map(|&u| s.eval(u)).collect());
    }
    Ok((grid, out))
}

/// Arclength at each sample from speeds on an even grid of spacing `h`.
fn cumulative_length(speed: &[f64], h: f64) -> Result<Vec<f64>> {
    let idx: Vec<f64> = (0..speed.len()).map(|k| k as f64).collect();
    let spline = CubicSpline::new(&idx, speed)?;
    Ok(idx.iter().map(|&u| h * spline.antiderivative(u)).collect())
}

const MIN_EXTRACT_SAMPLES: usize = 5;

/// Signed curvature of a sampled plane curve, reported against arclength
/// measured from the first sample.
pub fn extract_plane_invariants(curve: &PlaneCurve) -> Result<InvariantProfile> {
    let n = curve.samples.len();
    if n < MIN_EXTRACT_SAMPLES {
        return Err(Error::DegenerateCurve(format!(
            "need at least {MIN_EXTRACT_SAMPLES} samples, got {n}"
        )));
    }
    let ts: Vec<f64> = curve.samples.iter().map(|s| s.0).collect();
    let xs: Vec<f64> = curve.samples.iter().map(|s| s.1.re).collect();
    let ys: Vec<f64> = curve.samples.iter().map(|s| s.1.im).collect();
    let (grid, ch) = uniform_channels(&ts, &[xs, ys])?;
    let h = (grid[n - 1] - grid[0]) / (n - 1) as f64;
    let [x1, x2, _] = index_derivatives(&ch[0]);
    let [y1, y2, _] = index_derivatives(&ch[1]);
    let mut speed = Vec::with_capacity(n);
    let mut kappa = Vec::with_capacity(n);
    for i in 0..n {
        let v = x1[i].hypot(y1[i]);
        if !(v / h >= MIN_SPEED) {
            return Err(Error::DegenerateCurve(format!(
                "speed {} below {MIN_SPEED} at t = {}",
                v / h,
                grid[i]
            )));
        }
        speed.push(v / h);
        kappa.push((x1[i] * y2[i] - y1[i] * x2[i]) / (v * v * v));
    }
    let s = cumulative_length(&speed, h)?;
    InvariantProfile::new(
        s.into_iter()
            .zip(kappa)
            .map(|(t, kappa)| ProfileSample {
                t,
                kappa,
                torsion: None,
            })
            .collect(),
    )
}

/// Speed `|c'(t)|` at each sample, from the same stencils as the curvature.
pub fn plane_speeds(curve: &PlaneCurve) -> Result<Vec<f64>> {
    let n = curve.samples.len();
    if n < MIN_EXTRACT_SAMPLES {
        return Err(Error::DegenerateCurve(format!(
            "need at least {MIN_EXTRACT_SAMPLES} samples, got {n}"
        )));
    }
    let ts: Vec<f64> = curve.samples.iter().map(|s| s.0).collect();
    let xs: Vec<f64> = curve.samples.iter().map(|s| s.1.re).collect();
    let ys: Vec<f64> = curve.samples.iter().map(|s| s.1.im).collect();
    let (grid, ch) = uniform_channels(&ts, &[xs, ys])?;
    let h = (grid[n - 1] - grid[0]) / (n - 1) as f64;
    let [x1, ..] = index_derivatives(&ch[0]);
    let [y1, ..] = index_derivatives(&ch[1]);
    Ok(x1.iter().zip(&y1).map(|(a, b)| a.hypot(*b) / h).collect())
}

/// Resamples `curve` at `n` evenly spaced arclength values.
pub fn reparametrize_by_arclength(curve: &PlaneCurve, n: usize) -> Result<PlaneCurve> {
    let profile = extract_plane_invariants(curve)?;
    let s: Vec<f64> = profile.samples.iter().map(|p| p.t).collect();
    // `extract` may have resampled onto an even grid; rebuild those points.
    let ts: Vec<f64> = curve.samples.iter().map(|p| p.0).collect();
    let xs: Vec<f64> = curve.samples.iter().map(|p| p.1.re).collect();
    let ys: Vec<f64> = curve.samples.iter().map(|p| p.1.im).collect();
    let (_, ch) = uniform_channels(&ts, &[xs, ys])?;
    let sx = CubicSpline::new(&s, &ch[0])?;
    let sy = CubicSpline::new(&s, &ch[1])?;
    let len = s[s.len() - 1];
    let n = n.max(2);
    let samples = (0..n)
        .map(|k| {
            let u = len * k as f64 / (n - 1) as f64;
            (u, ComplexPoint::new(sx.eval(u), sy.eval(u)))
        })
        .collect();
    Ok(PlaneCurve {
        samples,
        arclength: true,
    })
}

fn polar_part(m: &Matrix3<f64>) -> Matrix3<f64> {
    let svd = m.svd(true, true);
    match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => u * v_t,
        _ => *m,
    }
}

/// The unit-speed space curve with curvature `κ > 0` and torsion `τ`,
/// starting at the origin with the standard frame.
pub fn reconstruct_space(profile: &InvariantProfile, t0: f64, t1: f64) -> Result<SpaceCurve> {
    reconstruct_space_from(profile, t0, t1, &Frame::standard(), &Point3::zeros())
}

/// [`reconstruct_space`] with a chosen initial frame and starting point.
///
/// Integrates the Frenet equations with classical RK4 at step
/// `min(1e-3, Δt/10)` (Δt the smallest profile spacing) and re-projects the
/// frame onto the rotations after every step.
pub fn reconstruct_space_from(
    profile: &InvariantProfile,
    t0: f64,
    t1: f64,
    frame: &Frame,
    origin: &Point3,
) -> Result<SpaceCurve> {
    if let Some(s) = profile.samples.iter().find(|s| !(s.kappa > 0.0)) {
        return Err(Error::Positivity { t: s.t, kappa: s.kappa });
    }
    if frame.defect() > 1e-8 {
        return Err(Error::InvalidInput("initial frame is not orthonormal".into()));
    }
    let grid = profile.output_grid(t0, t1)?;
    let kappa = profile.kappa_spline()?;
    let torsion = profile.torsion_spline()?;
    let min_spacing = profile
        .samples
        .windows(2)
        .map(|w| w[1].t - w[0].t)
        .fold(f64::INFINITY, f64::min);
    let h_max = MAX_FRAME_STEP.min(min_spacing / 10.0);

    // State: position and the frame as matrix columns (T, N, B).
    let rhs = |u: f64, f: &Matrix3<f64>| -> (Point3, Matrix3<f64>) {
        let (k, tau) = (kappa.eval(u), torsion.eval(u));
        let (t, n, b) = (f.column(0), f.column(1), f.column(2));
        let dt = n * k;
        let dn = -t * k + b * tau;
        let db = -n * tau;
        (t.into_owned(), Matrix3::from_columns(&[dt, dn, db]))
    };
    let mut c = *origin;
    let mut f = frame.matrix();
    let mut samples = vec![(t0, c)];
    let mut frames = vec![*frame];
    for w in grid.windows(2) {
        let steps = ((w[1] - w[0]) / h_max).ceil().max(1.0) as usize;
        let h = (w[1] - w[0]) / steps as f64;
        for j in 0..steps {
            let u = w[0] + j as f64 * h;
            let (c1, f1) = rhs(u, &f);
            let (c2, f2) = rhs(u + 0.5 * h, &(f + f1 * (0.5 * h)));
            let (c3, f3) = rhs(u + 0.5 * h, &(f + f2 * (0.5 * h)));
            let (c4, f4) = rhs(u + h, &(f + f3 * h));
            c += (c1 + (c2 + c3) * 2.0 + c4) * (h / 6.0);
            f = polar_part(&(f + (f1 + (f2 + f3) * 2.0 + f4) * (h / 6.0)));
        }
        samples.push((w[1], c));
        frames.push(Frame::from_matrix(&f));
    }
    Ok(SpaceCurve {
        samples,
        frames: Some(frames),
    })
}

/// Curvature and torsion of a sampled space curve against arclength.
/// Torsion is `None` where the curvature is below [`TORSION_KAPPA_MIN`].
pub fn extract_space_invariants(curve: &SpaceCurve) -> Result<InvariantProfile> {
    let n = curve.samples.len();
    if n < MIN_EXTRACT_SAMPLES {
        return Err(Error::DegenerateCurve(format!(
            "need at least {MIN_EXTRACT_SAMPLES} samples, got {n}"
        )));
    }
    let ts: Vec<f64> = curve.samples.iter().map(|s| s.0).collect();
    let channels: Vec<Vec<f64>> = (0..3).map(|k| curve.samples.iter().map(|s| s.1[k]).collect()).collect();
    let (grid, ch) = uniform_channels(&ts, &channels)?;
    let h = (grid[n - 1] - grid[0]) / (n - 1) as f64;
    let d: Vec<[Vec<f64>; 3]> = ch.iter().map(|c| index_derivatives(c)).collect();
    let vec_at = |order: usize, i: usize| Point3::new(d[0][order][i], d[1][order][i], d[2][order][i]);
    let mut speed = Vec::with_capacity(n);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let (v1, v2, v3) = (vec_at(0, i), vec_at(1, i), vec_at(2, i));
        let v = v1.norm();
        if !(v / h >= MIN_SPEED) {
            return Err(Error::DegenerateCurve(format!(
                "speed {} below {MIN_SPEED} at t = {}",
                v / h,
                grid[i]
            )));
        }
        speed.push(v / h);
        let cross = v1.cross(&v2);
        let kappa = cross.norm() / (v * v * v);
        let torsion = (kappa >= TORSION_KAPPA_MIN).then(|| cross.dot(&v3) / cross.norm_squared());
        out.push((kappa, torsion));
    }
    let s = cumulative_length(&speed, h)?;
    InvariantProfile::new(
        s.into_iter()
            .zip(out)
            .map(|(t, (kappa, torsion))| ProfileSample { t, kappa, torsion })
            .collect(),
    )
}

/// Best rigid motion `q ≈ R p + shift` (Kabsch), with the largest residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidFit {
    pub rotation: Matrix3<f64>,
    pub shift: Point3,
    pub max_residual: f64,
}

pub fn procrustes_align(p: &[Point3], q: &[Point3]) -> Result<RigidFit> {
    if p.len() != q.len() || p.is_empty() {
        return Err(Error::InvalidInput(
            "point sets must be nonempty and of equal size".into(),
        ));
    }
    let n = p.len() as f64;
    let pc = p.iter().sum::<Point3>() / n;
    let qc = q.iter().sum::<Point3>() / n;
    let mut cov = Matrix3::zeros();
    for (a, b) in p.iter().zip(q) {
        cov += (a - pc) * (b - qc).transpose();
    }
    let svd = cov.svd(true, true);
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(Error::DegenerateCurve("alignment SVD failed".into())),
    };
    let v = v_t.transpose();
    let d = (v * u.transpose()).determinant().signum();
    let rotation = v * Matrix3::from_diagonal(&Point3::new(1.0, 1.0, d)) * u.transpose();
    let shift = qc - rotation * pc;
    let max_residual = p
        .iter()
        .zip(q)
        .map(|(a, b)| (rotation * a + shift - b).norm())
        .fold(0.0, f64::max);
    Ok(RigidFit {
        rotation,
        shift,
        max_residual,
    })
}

/// Symmetric sampled Hausdorff distance between two point lists.
pub fn sampled_distance(a: &[Point3], b: &[Point3]) -> f64 {
    let one_way = |x: &[Point3], y: &[Point3]| {
        x.iter()
            .map(|p| y.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

/// Embeds a plane curve in the `z = 0` plane.
pub fn embed_plane(curve: &PlaneCurve) -> SpaceCurve {
    SpaceCurve {
        samples: curve
            .samples
            .iter()
            .map(|&(t, p)| (t, Point3::new(p.re, p.im, 0.0)))
            .collect(),
        frames: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencils_are_exact_on_quartics() {
        let f: Vec<f64> = (0..9).map(|i| (i as f64).powi(4) - 3.0 * (i as f64)).collect();
        let [d1, d2, d3] = index_derivatives(&f);
        for (i, &x) in (0..9).map(|i| i as f64).collect::<Vec<_>>().iter().enumerate() {
            assert!((d1[i] - (4.0 * x.powi(3) - 3.0)).abs() < 1e-9, "{i}");
            assert!((d2[i] - 12.0 * x * x).abs() < 1e-9, "{i}");
        }
        // third derivative stencils are exact up to cubics only
        let g: Vec<f64> = (0..9).map(|i| (i as f64).powi(3)).collect();
        let [_, _, g3] = index_derivatives(&g);
        assert!(g3.iter().all(|v| (v - 6.0).abs() < 1e-9));
        assert!(d3.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn reversal_flips_odd_derivatives_exactly() {
        let f: Vec<f64> = (0..12).map(|i| (0.37 * i as f64).sin() + 0.1 * i as f64).collect();
        let r: Vec<f64> = f.iter().rev().cloned().collect();
        let [a1, a2, a3] = index_derivatives(&f);
        let [b1, b2, b3] = index_derivatives(&r);
        for i in 0..12 {
            let j = 11 - i;
            assert_eq!(a1[i], -b1[j]);
            assert_eq!(a2[i], b2[j]);
            assert_eq!(a3[i], -b3[j]);
        }
    }

    #[test]
    fn straight_line_from_zero_curvature() {
        let p = InvariantProfile::from_fn(0.0, 1.0, 11, |_| 0.0, None).unwrap();
        let c = reconstruct_plane(&p, 0.0, 1.0).unwrap();
        for (t, z) in &c.samples {
            assert!((z - ComplexPoint::new(*t, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn coverage_and_positivity_errors() {
        let p = InvariantProfile::from_fn(0.0, 1.0, 11, |_| 1.0, Some(&|_| 0.0)).unwrap();
        assert!(matches!(reconstruct_plane(&p, -0.5, 1.0), Err(Error::Coverage { .. })));
        assert!(matches!(reconstruct_space(&p, 0.0, 1.5), Err(Error::Coverage { .. })));
        let mut q = p.clone();
        q.samples[4].kappa = 0.0;
        assert!(matches!(reconstruct_space(&q, 0.0, 1.0), Err(Error::Positivity { .. })));
        assert!(InvariantProfile::from_fn(0.0, 1.0, 3, |_| 1.0, None).is_err());
    }

    #[test]
    fn procrustes_recovers_a_rotation() {
        let rot = nalgebra::Rotation3::from_euler_angles(0.3, -1.1, 2.0).into_inner();
        let shift = Point3::new(1.0, -2.0, 0.5);
        let p: Vec<Point3> = (0..20)
            .map(|i| {
                let t = i as f64 * 0.3;
                Point3::new(t.cos(), t.sin() * 2.0, 0.1 * t * t)
            })
            .collect();
        let q: Vec<Point3> = p.iter().map(|x| rot * x + shift).collect();
        let fit = procrustes_align(&p, &q).unwrap();
        assert!(fit.max_residual < 1e-12);
        assert!((fit.rotation - rot).abs().max() < 1e-12);
    }
}
