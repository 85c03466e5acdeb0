use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;

use serde::Serialize;
use zspiral::curvature::{curvature_profile, find_sign_changes};
use zspiral::density::{
    arc_length, grid_visit_density, modulus_exponent_fit, sampled_max_slope, visit_step_limit, FitOptions,
};
use zspiral::frenet::{
    extract_plane_invariants, extract_space_invariants, reconstruct_plane, reconstruct_space, PlaneCurve,
};
use zspiral::io::{self, Figure, Provenance, Table};
use zspiral::jensen::{
    count_zeros_box, jensen_sweep, zero_frequency, AnalyticTargetId, BoxRegion, ContourOptions, FrequencyMethod,
    JensenOptions,
};
use zspiral::universality::{joint_re_im_scan, scan_shifts, ScanOptions, SegmentTarget};
use zspiral::{ComplexPoint, Error, EvalConfig, Result, VerticalSegment};

use crate::{Command, Format, Line, Method, Output, ProbeKind, Shifts};

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn line_segment(l: &Line) -> Result<(VerticalSegment, EvalConfig)> {
    let seg = VerticalSegment::new(l.sigma, l.t_min, l.t_max, l.step)?;
    let cfg = EvalConfig::with_target(l.accuracy);
    cfg.validate()?;
    Ok((seg, cfg))
}

fn line_params(p: Provenance, l: &Line) -> Provenance {
    p.param("sigma", l.sigma)
        .param("t-min", l.t_min)
        .param("t-max", l.t_max)
        .param("step", l.step)
        .param("accuracy", l.accuracy)
}

fn shift_params(p: Provenance, s: &Shifts) -> Provenance {
    p.param("tau-min", s.tau_min)
        .param("tau-max", s.tau_max)
        .param("tau-step", s.tau_step)
        .param("epsilon", s.epsilon)
}

fn read_table(path: &Path) -> Result<Table> {
    let f = File::open(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    Table::read_csv(BufReader::new(f))
}

fn sink(out: &Output) -> Result<Box<dyn Write>> {
    match &out.out {
        Some(p) => {
            let f = File::create(p).map_err(|e| Error::Domain(format!("{}: {e}", p.display())))?;
            Ok(Box::new(std::io::BufWriter::new(f)))
        }
        None => Ok(Box::new(std::io::stdout().lock())),
    }
}

/// Writes `table` or `result` in the requested format. `figure` is used
/// for SVG output; commands without one reject it.
fn emit<T: Serialize>(out: &Output, p: &Provenance, table: Table, result: &T, figure: Option<Figure>) -> Result<()> {
    let mut w = sink(out)?;
    match out.format {
        Format::Csv => table.with_provenance(p).write_csv(&mut w)?,
        Format::Json => io::write_json(&mut w, p, result)?,
        Format::Svg => {
            let fig = figure.ok_or_else(|| invalid(format!("`{}` has no SVG output", p.command)))?;
            w.write_all(fig.to_svg(p).as_bytes())
                .map_err(|e| Error::Domain(e.to_string()))?;
        }
    }
    w.flush().map_err(|e| Error::Domain(e.to_string()))
}

/// `zeta`, `zeta-prime` or `n:re[:im],...`.
pub fn parse_function(s: &str) -> Result<AnalyticTargetId> {
    match s {
        "zeta" => Ok(AnalyticTargetId::Zeta),
        "zeta-prime" => Ok(AnalyticTargetId::ZetaPrime),
        _ => {
            let terms = s
                .split(',')
                .map(|term| {
                    let parts: Vec<&str> = term.trim().split(':').collect();
                    let bad = || invalid(format!("bad Dirichlet term `{term}`, expected n:re[:im]"));
                    if !(2..=3).contains(&parts.len()) {
                        return Err(bad());
                    }
                    let n: u64 = parts[0].parse().map_err(|_| bad())?;
                    let re: f64 = parts[1].parse().map_err(|_| bad())?;
                    let im: f64 = parts.get(2).map_or(Ok(0.0), |x| x.parse()).map_err(|_| bad())?;
                    Ok((n, ComplexPoint::new(re, im)))
                })
                .collect::<Result<Vec<_>>>()?;
            AnalyticTargetId::dirichlet_poly(&terms)
        }
    }
}

/// `start:end:step` (inclusive) or `a,b,c`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || invalid(format!("bad sigma grid `{s}`"));
    if let [a, b, h] = s.split(':').collect::<Vec<_>>()[..] {
        let (a, b, h): (f64, f64, f64) = (
            a.parse().map_err(|_| bad())?,
            b.parse().map_err(|_| bad())?,
            h.parse().map_err(|_| bad())?,
        );
        if !(h > 0.0 && b >= a) || (b - a) / h > 1e6 {
            return Err(bad());
        }
        let n = ((b - a) / h * (1.0 + 1e-12)).floor() as usize;
        return Ok((0..=n).map(|k| a + k as f64 * h).collect());
    }
    let v = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<Vec<_>>>()?;
    if v.iter().any(|x| !x.is_finite()) {
        return Err(bad());
    }
    Ok(v)
}

/// A target read from `t,re,im` on the line `Re s = σ`; the segment step is
/// the largest sample gap.
fn file_target(sigma: f64, samples: Vec<(f64, ComplexPoint)>, label: &str) -> Result<SegmentTarget> {
    let (seg, _) = sample_segment(sigma, &samples.iter().map(|p| p.0).collect::<Vec<_>>())?;
    SegmentTarget::new(seg, samples, label)
}

fn sample_segment(sigma: f64, ts: &[f64]) -> Result<(VerticalSegment, f64)> {
    if ts.len() < 2 {
        return Err(invalid("a target needs at least two samples"));
    }
    let gap = ts.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let seg = VerticalSegment::new(sigma, ts[0], ts[ts.len() - 1], gap)?;
    Ok((seg, gap))
}

fn scan_options(s: &Shifts) -> ScanOptions {
    ScanOptions {
        tau_step: s.tau_step,
        ..ScanOptions::default()
    }
}

fn candidates_table(r: &zspiral::universality::ScanReport) -> Table {
    let mut t = Table::new(&["tau", "sup_error", "eval_bound"]);
    for c in &r.candidates {
        t.push(vec![c.tau, c.sup_error, c.eval_bound]);
    }
    t
}

pub fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Trace { line, out } => {
            let (seg, cfg) = line_segment(&line)?;
            let p = line_params(Provenance::new("trace"), &line);
            let trace = crate::figures::zeta_trace(&seg, &cfg)?;
            let fig = Figure::new("zeta trace").line(crate::figures::xy(&trace), "black", "zeta");
            emit(&out, &p, io::trace_table(&trace), &trace, Some(fig))
        }
        Command::Curvature { line, out } => {
            let (seg, cfg) = line_segment(&line)?;
            let p = line_params(Provenance::new("curvature"), &line);
            let samples = curvature_profile(&seg, &cfg)?;
            let pts = samples.iter().map(|s| (s.t, s.kappa.unwrap_or(f64::NAN))).collect();
            let fig = Figure::new("signed curvature against t").line(pts, "black", "kappa");
            emit(&out, &p, io::curvature_table(&samples), &samples, Some(fig))
        }
        Command::Signs { line, out } => {
            let (seg, cfg) = line_segment(&line)?;
            let p = line_params(Provenance::new("signs"), &line);
            let changes = find_sign_changes(&seg, &cfg)?;
            let mut t = Table::new(&["bracket_lo", "bracket_hi", "refined_t"]);
            for c in &changes {
                t.push(vec![c.bracket_lo, c.bracket_hi, c.refined_t]);
            }
            emit(&out, &p, t, &changes, None)
        }
        Command::Scan {
            target,
            sigma,
            shifts,
            out,
        } => {
            let p = shift_params(
                Provenance::new("scan")
                    .param("target", target.display())
                    .param("sigma", sigma),
                &shifts,
            );
            let samples = io::read_trace(&read_table(&target)?)?;
            let label = target.display().to_string();
            let tgt = file_target(sigma, samples, &label)?;
            let report = scan_shifts(
                &tgt,
                shifts.tau_min,
                shifts.tau_max,
                shifts.epsilon,
                &scan_options(&shifts),
            )?;
            emit(&out, &p, candidates_table(&report), &report, None)
        }
        Command::JointScan {
            target,
            sigma,
            shifts,
            out,
        } => {
            let p = shift_params(
                Provenance::new("joint-scan")
                    .param("target", target.display())
                    .param("sigma", sigma),
                &shifts,
            );
            let t = read_table(&target)?;
            let (ts, f, g) = (t.column("t")?, t.column("f")?, t.column("g")?);
            let (seg, _) = sample_segment(sigma, &ts)?;
            let f: Vec<(f64, f64)> = ts.iter().copied().zip(f).collect();
            let g: Vec<(f64, f64)> = ts.iter().copied().zip(g).collect();
            let report = joint_re_im_scan(
                seg,
                &f,
                &g,
                shifts.tau_min,
                shifts.tau_max,
                shifts.epsilon,
                &scan_options(&shifts),
            )?;
            emit(&out, &p, candidates_table(&report), &report, None)
        }
        Command::Frenet {
            target,
            extract,
            t_min,
            t_max,
            out,
        } => {
            let mut p = Provenance::new("frenet")
                .param("target", target.display())
                .param("extract", extract);
            if let Some(a) = t_min {
                p = p.param("t-min", a);
            }
            if let Some(b) = t_max {
                p = p.param("t-max", b);
            }
            let table = read_table(&target)?;
            if extract {
                let profile = if table.has_column("z") {
                    extract_space_invariants(&io::read_space_curve(&table)?)?
                } else {
                    extract_plane_invariants(&io::read_plane_curve(&table, false)?)?
                };
                let pts = profile.samples.iter().map(|s| (s.t, s.kappa)).collect();
                let fig = Figure::new("curvature against t").line(pts, "black", "kappa");
                return emit(&out, &p, io::profile_table(&profile), &profile, Some(fig));
            }
            let profile = io::read_profile(&table)?;
            let (d0, d1) = profile.domain();
            let (a, b) = (t_min.unwrap_or(d0), t_max.unwrap_or(d1));
            if profile.has_torsion() {
                let c = reconstruct_space(&profile, a, b)?;
                let pts = c.samples.iter().map(|(_, q)| (q.x, q.y)).collect();
                let fig = Figure::new("space curve, xy projection").line(pts, "black", "curve");
                emit(&out, &p, io::space_curve_table(&c), &c, Some(fig))
            } else {
                let c: PlaneCurve = reconstruct_plane(&profile, a, b)?;
                let fig = Figure::new("plane curve").line(
                    c.samples.iter().map(|s| (s.1.re, s.1.im)).collect(),
                    "black",
                    "curve",
                );
                emit(&out, &p, io::plane_curve_table(&c), &c, Some(fig))
            }
        }
        Command::Jensen {
            function,
            sigma_grid,
            t_min,
            t_max,
            out,
        } => {
            let p = Provenance::new("jensen")
                .param("function", &function.function)
                .param("sigma-grid", &sigma_grid)
                .param("t-min", t_min)
                .param("t-max", t_max);
            let f = parse_function(&function.function)?;
            let sigmas = parse_grid(&sigma_grid)?;
            let rows = jensen_sweep(&f, &sigmas, t_min, t_max, &JensenOptions::default())?;
            let pts = rows.iter().map(|r| (r.sigma, r.phi.unwrap_or(f64::NAN))).collect();
            let fig = Figure::new("window mean of log|f| against sigma").line(pts, "black", "phi");
            emit(&out, &p, io::jensen_table(&rows), &rows, Some(fig))
        }
        Command::Zeros {
            function,
            sigma_min,
            sigma_max,
            t_min,
            t_max,
            out,
        } => {
            let p = Provenance::new("zeros")
                .param("function", &function.function)
                .param("sigma-min", sigma_min)
                .param("sigma-max", sigma_max)
                .param("t-min", t_min)
                .param("t-max", t_max);
            let f = parse_function(&function.function)?;
            let b = BoxRegion::new(sigma_min, sigma_max, t_min, t_max)?;
            let r = count_zeros_box(&f, b, &ContourOptions::default())?;
            let mut t = Table::new(&["sigma1", "sigma2", "t1", "t2", "count", "winding_residual", "nudged"]);
            t.push(vec![
                r.region.sigma1,
                r.region.sigma2,
                r.region.t1,
                r.region.t2,
                r.count as f64,
                r.winding_residual,
                if r.nudged { 1.0 } else { 0.0 },
            ]);
            emit(&out, &p, t, &r, None)
        }
        Command::Freq {
            function,
            sigma_min,
            sigma_max,
            t_max,
            method,
            out,
        } => {
            let p = Provenance::new("freq")
                .param("function", &function.function)
                .param("sigma-min", sigma_min)
                .param("sigma-max", sigma_max)
                .param("t-max", t_max)
                .param("method", format!("{method:?}"));
            let f = parse_function(&function.function)?;
            let m = match method {
                Method::Count => FrequencyMethod::Count,
                Method::DerivativeDiff => FrequencyMethod::DerivativeDiff,
            };
            let z = zero_frequency(&f, sigma_min, sigma_max, t_max, m, &ContourOptions::default())?;
            let mut t = Table::new(&["sigma1", "sigma2", "t_max", "frequency", "error"]);
            t.push(vec![z.sigma1, z.sigma2, z.t_max, z.value, z.error]);
            emit(&out, &p, t, &z, None)
        }
        Command::Probe {
            kind,
            sigma,
            t_min,
            t_max,
            step,
            center_re,
            center_im,
            radius,
            n,
            out,
        } => {
            let mut p = Provenance::new("probe")
                .param("kind", format!("{kind:?}"))
                .param("sigma", sigma)
                .param("t-min", t_min)
                .param("t-max", t_max);
            let cfg = EvalConfig::default();
            match kind {
                ProbeKind::Exponent => {
                    let fit = modulus_exponent_fit(sigma, t_min, t_max, &FitOptions::default())?;
                    let mut t = Table::new(&["t", "min_modulus"]);
                    for &(x, m) in &fit.points {
                        t.push(vec![x, m]);
                    }
                    let pts = fit.points.iter().map(|&(x, m)| (x.ln(), m.ln())).collect();
                    let fig = Figure::new("log window minimum against log t").line(pts, "black", "minima");
                    emit(&out, &p, t, &fit, Some(fig))
                }
                ProbeKind::ArcLength => {
                    let seg = VerticalSegment::new(sigma, t_min, t_max, t_max - t_min)?;
                    let l = arc_length(&seg, &cfg)?;
                    let mut t = Table::new(&["sigma", "t_min", "t_max", "length", "error"]);
                    t.push(vec![l.sigma, l.t_min, l.t_max, l.value, l.error]);
                    emit(&out, &p, t, &l, None)
                }
                ProbeKind::Visit => {
                    let step = match step {
                        Some(h) => h,
                        None => visit_step_limit(n, sampled_max_slope(sigma, t_min, t_max, 0.01, 1.1, &cfg)?),
                    };
                    p = p
                        .param("step", step)
                        .param("center-re", center_re)
                        .param("center-im", center_im)
                        .param("radius", radius)
                        .param("n", n);
                    let seg = VerticalSegment::new(sigma, t_min, t_max, step)?;
                    let r = grid_visit_density(&seg, ComplexPoint::new(center_re, center_im), radius, n, &cfg)?;
                    let mut fig = Figure::new("visited lattice cells").circle((center_re, center_im), radius, "#999");
                    let reach = 1.0 / (3.0 * n as f64);
                    for c in &r.cells {
                        fig = fig.circle((c.re, c.im), reach, if c.visited { "black" } else { "#ddd" });
                    }
                    emit(&out, &p, io::visit_table(&r), &r, Some(fig))
                }
            }
        }
        Command::Figure { number, out } => crate::figures::figure(number, &out),
    }
}
