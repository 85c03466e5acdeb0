use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use zspiral::frenet::InvariantProfile;
use zspiral::io::{self, Figure, Provenance};
use zspiral::universality::{centroid_translation_search, curve_encoding_pipeline, ScanOptions};
use zspiral::{ComplexPoint, Error, EvalConfig, LineEvaluator, Result, VerticalSegment};

/// Figure 3 circle: curvature, samples, and the distance allowed.
pub const CIRCLE_KAPPA: f64 = 8.0;
pub const CIRCLE_SAMPLES: usize = 41;
pub const CIRCLE_EPSILON: f64 = 0.25;

pub fn zeta_trace(seg: &VerticalSegment, cfg: &EvalConfig) -> Result<Vec<(f64, ComplexPoint)>> {
    let ev = LineEvaluator::new(seg.sigma, seg.max_abs_t(), *cfg);
    seg.grid().par_iter().map(|&t| Ok((t, ev.value(t)?.value))).collect()
}

/// `ζ″/ζ′(σ + it)` on the grid.
pub fn log_derivative_trace(seg: &VerticalSegment, cfg: &EvalConfig) -> Result<Vec<(f64, ComplexPoint)>> {
    let ev = LineEvaluator::new(seg.sigma, seg.max_abs_t(), *cfg);
    seg.grid()
        .par_iter()
        .map(|&t| Ok((t, ev.jet(t)?.log_derivative_ratio())))
        .collect()
}

pub fn xy(trace: &[(f64, ComplexPoint)]) -> Vec<(f64, f64)> {
    trace.iter().map(|p| (p.1.re, p.1.im)).collect()
}

fn write(dir: &Path, name: &str, body: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, body).map_err(|e| Error::Domain(format!("{}: {e}", path.display())))
}

/// Writes `<name>.csv` and `<name>.svg` for one trace.
fn trace_pair(dir: &Path, name: &str, title: &str, p: &Provenance, trace: &[(f64, ComplexPoint)]) -> Result<()> {
    write(
        dir,
        &format!("{name}.csv"),
        &io::trace_table(trace).with_provenance(p).to_csv_string(),
    )?;
    let fig = Figure::new(title).line(xy(trace), "black", name);
    write(dir, &format!("{name}.svg"), &fig.to_svg(p))
}

fn line_provenance(number: u8, what: &str, seg: &VerticalSegment) -> Provenance {
    Provenance::new("figure")
        .param("number", number)
        .param("curve", what)
        .param("sigma", seg.sigma)
        .param("t-min", seg.t_min)
        .param("t-max", seg.t_max)
        .param("step", seg.step)
}

pub fn figure(number: u8, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Domain(format!("{}: {e}", dir.display())))?;
    let cfg = EvalConfig::default();
    match number {
        1 => {
            let seg = VerticalSegment::new(0.5, 0.0, 40.0, 0.01)?;
            let z = zeta_trace(&seg, &cfg)?;
            trace_pair(
                dir,
                "figure1_zeta",
                "zeta(1/2 + it), 0 <= t <= 40",
                &line_provenance(1, "zeta", &seg),
                &z,
            )?;
            let r = log_derivative_trace(&seg, &cfg)?;
            let p = line_provenance(1, "zeta''/zeta'", &seg);
            trace_pair(dir, "figure1_logderiv", "zeta''/zeta'(1/2 + it), 0 <= t <= 40", &p, &r)
        }
        2 => {
            let wide = VerticalSegment::new(0.75, 110.0, 120.0, 0.01)?;
            let z = zeta_trace(&wide, &cfg)?;
            let p = line_provenance(2, "zeta", &wide);
            trace_pair(dir, "figure2_zeta_wide", "zeta(3/4 + it), 110 <= t <= 120", &p, &z)?;
            let window = VerticalSegment::new(0.75, 111.2, 111.7, 0.001)?;
            let z = zeta_trace(&window, &cfg)?;
            let p = line_provenance(2, "zeta", &window);
            trace_pair(
                dir,
                "figure2_zeta_window",
                "zeta(3/4 + it), 111.2 <= t <= 111.7",
                &p,
                &z,
            )?;
            let r = log_derivative_trace(&window, &cfg)?;
            let p = line_provenance(2, "zeta''/zeta'", &window);
            trace_pair(
                dir,
                "figure2_logderiv_window",
                "zeta''/zeta'(3/4 + it), 111.2 <= t <= 111.7",
                &p,
                &r,
            )
        }
        3 => {
            let seg = VerticalSegment::new(0.75, 0.0, 35.0, 0.01)?;
            let z = zeta_trace(&seg, &cfg)?;
            let len = 2.0 * PI / CIRCLE_KAPPA;
            let profile = InvariantProfile::from_fn(0.0, len, CIRCLE_SAMPLES, |_| CIRCLE_KAPPA, None)?;
            let tau_hi = seg.t_max - len;
            let fit = centroid_translation_search(&profile, seg.sigma, seg.t_min, tau_hi, seg.step, &cfg)?;
            let report = curve_encoding_pipeline(
                &profile,
                seg.sigma,
                fit.offset,
                seg.t_min,
                tau_hi,
                CIRCLE_EPSILON,
                &ScanOptions::default(),
            )?;
            let p = line_provenance(3, "zeta", &seg)
                .param("circle-kappa", CIRCLE_KAPPA)
                .param("circle-samples", CIRCLE_SAMPLES)
                .param("epsilon", CIRCLE_EPSILON)
                .param("offset-re", fit.offset.re)
                .param("offset-im", fit.offset.im);
            write(
                dir,
                "figure3_spiral.csv",
                &io::trace_table(&z).with_provenance(&p).to_csv_string(),
            )?;
            write(
                dir,
                "figure3_circle.csv",
                &io::trace_table(&report.target).with_provenance(&p).to_csv_string(),
            )?;
            let mut fig = Figure::new("zeta(3/4 + it), 0 <= t <= 35, with an approximate circle")
                .line(xy(&z), "black", "figure3_spiral")
                .line(xy(&report.target), "gold", "figure3_circle");
            if let Some(best) = &report.best {
                fig = fig.line(xy(&best.curve), "red", "matched arc");
            }
            write(dir, "figure3_spiral.svg", &fig.to_svg(&p))?;
            let mut buf = Vec::new();
            io::write_json(&mut buf, &p, &report)?;
            write(dir, "figure3_encoding.json", &String::from_utf8_lossy(&buf))
        }
        _ => Err(Error::InvalidInput(format!("no figure {number}"))),
    }
}
