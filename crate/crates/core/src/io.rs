//! Tables, figures and JSON records with provenance headers.
//!
//! Numbers are written with the shortest representation that parses back
//! to the same `f64`, so every table round-trips bit for bit and SVG
//! vertices match the CSV values of the same run as text.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::curvature::CurvatureSample;
use crate::density::GridVisitReport;
use crate::error::{Error, Result};
use crate::frenet::{InvariantProfile, PlaneCurve, ProfileSample, SpaceCurve};
use crate::jensen::JensenEstimate;
use crate::ComplexPoint;

pub const TOOL_NAME: &str = "zspiral";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Tool, version, command and the full parameter echo of a run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub parameters: Vec<(String, String)>,
}

impl Provenance {
    pub fn new(command: &str) -> Self {
        Self {
            tool: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
            command: command.into(),
            parameters: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.push((key.into(), value.to_string()));
        self
    }

    /// Header lines without comment markers.
    pub fn lines(&self) -> Vec<String> {
        let mut out = vec![
            format!("{} {}", self.tool, self.version),
            format!("command: {}", self.command),
        ];
        out.extend(self.parameters.iter().map(|(k, v)| format!("{k} = {v}")));
        out
    }

    /// Inverse of [`Provenance::lines`].
    pub fn from_lines(lines: &[String]) -> Option<Self> {
        let (tool, version) = lines.first()?.split_once(' ')?;
        let command = lines.get(1)?.strip_prefix("command: ")?;
        let parameters = lines[2..]
            .iter()
            .map(|l| l.split_once(" = ").map(|(k, v)| (k.to_string(), v.to_string())))
            .collect::<Option<Vec<_>>>()?;
        Some(Self {
            tool: tool.into(),
            version: version.into(),
            command: command.into(),
            parameters,
        })
    }
}

/// Shortest round-tripping text for `x`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::InvalidInput(format!("I/O: {e}"))
}

/// A numeric table: named columns of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub provenance: Option<Provenance>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            provenance: None,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_provenance(mut self, p: &Provenance) -> Self {
        self.provenance = Some(p.clone());
        self
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let k = self
            .columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::InvalidInput(format!("table has no column `{name}`")))?;
        Ok(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn has_column(&self, name: &str) -> bool {
        self.columns.iter().any(|c| c == name)
    }

    /// `# `-prefixed provenance lines, the column header, then the rows.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        if let Some(p) = &self.provenance {
            for line in p.lines() {
                writeln!(w, "# {line}").map_err(io_err)?;
            }
        }
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.columns).map_err(io_err)?;
        for row in &self.rows {
            out.write_record(row.iter().map(|&x| fmt_f64(x))).map_err(io_err)?;
        }
        out.flush().map_err(io_err)
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        // writing into a Vec cannot fail
        let _ = self.write_csv(&mut buf);
        String::from_utf8(buf).unwrap_or_default()
    }

    pub fn read_csv(r: impl BufRead) -> Result<Self> {
        let mut header = Vec::new();
        let mut body = String::new();
        for line in r.lines() {
            let line = line.map_err(io_err)?;
            match line.strip_prefix('#') {
                Some(c) if body.is_empty() => header.push(c.strip_prefix(' ').unwrap_or(c).to_string()),
                _ => {
                    body.push_str(&line);
                    body.push('\n');
                }
            }
        }
        let mut rd = csv::Reader::from_reader(body.as_bytes());
        let columns: Vec<String> = rd.headers().map_err(io_err)?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for (i, rec) in rd.records().enumerate() {
            let rec = rec.map_err(io_err)?;
            let row = rec
                .iter()
                .map(|f| {
                    f.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::InvalidInput(format!("row {}: `{f}` is not a number", i + 1)))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Ok(Self {
            provenance: Provenance::from_lines(&header),
            columns,
            rows,
        })
    }
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// `t,re,im`.
pub fn trace_table(samples: &[(f64, ComplexPoint)]) -> Table {
    let mut t = Table::new(&["t", "re", "im"]);
    for &(x, z) in samples {
        t.push(vec![x, z.re, z.im]);
    }
    t
}

pub fn read_trace(t: &Table) -> Result<Vec<(f64, ComplexPoint)>> {
    let (ts, re, im) = (t.column("t")?, t.column("re")?, t.column("im")?);
    Ok(ts
        .into_iter()
        .zip(re.into_iter().zip(im))
        .map(|(t, (a, b))| (t, ComplexPoint::new(a, b)))
        .collect())
}

/// `t,kappa,re_logderiv,speed,defined`; undefined curvature is NaN.
pub fn curvature_table(samples: &[CurvatureSample]) -> Table {
    let mut t = Table::new(&["t", "kappa", "re_logderiv", "speed", "defined"]);
    for s in samples {
        t.push(vec![
            s.t,
            s.kappa.unwrap_or(f64::NAN),
            s.re_logderiv,
            s.speed,
            flag(s.kappa.is_some()),
        ]);
    }
    t
}

/// `t,x,y`.
pub fn plane_curve_table(c: &PlaneCurve) -> Table {
    let mut t = Table::new(&["t", "x", "y"]);
    for &(x, z) in &c.samples {
        t.push(vec![x, z.re, z.im]);
    }
    t
}

/// `t,x,y,z`.
pub fn space_curve_table(c: &SpaceCurve) -> Table {
    let mut t = Table::new(&["t", "x", "y", "z"]);
    for (x, p) in &c.samples {
        t.push(vec![*x, p.x, p.y, p.z]);
    }
    t
}

/// Reads `t,x,y` as a plane curve; `arclength` as for [`PlaneCurve::new`].
pub fn read_plane_curve(t: &Table, arclength: bool) -> Result<PlaneCurve> {
    let (ts, xs, ys) = (t.column("t")?, t.column("x")?, t.column("y")?);
    let samples = ts
        .into_iter()
        .zip(xs.into_iter().zip(ys))
        .map(|(t, (x, y))| (t, ComplexPoint::new(x, y)))
        .collect();
    PlaneCurve::new(samples, arclength)
}

pub fn read_space_curve(t: &Table) -> Result<SpaceCurve> {
    let (ts, xs, ys, zs) = (t.column("t")?, t.column("x")?, t.column("y")?, t.column("z")?);
    let samples = (0..ts.len())
        .map(|i| (ts[i], crate::frenet::Point3::new(xs[i], ys[i], zs[i])))
        .collect();
    SpaceCurve::new(samples)
}

/// `t,kappa` or `t,kappa,torsion`; undefined torsion is NaN.
pub fn profile_table(p: &InvariantProfile) -> Table {
    let mut t = if p.has_torsion() {
        Table::new(&["t", "kappa", "torsion"])
    } else {
        Table::new(&["t", "kappa"])
    };
    for s in &p.samples {
        let mut row = vec![s.t, s.kappa];
        if p.has_torsion() {
            row.push(s.torsion.unwrap_or(f64::NAN));
        }
        t.push(row);
    }
    t
}

pub fn read_profile(t: &Table) -> Result<InvariantProfile> {
    let (ts, ks) = (t.column("t")?, t.column("kappa")?);
    let tors = if t.has_column("torsion") {
        Some(t.column("torsion")?)
    } else {
        None
    };
    let samples = (0..ts.len())
        .map(|i| ProfileSample {
            t: ts[i],
            kappa: ks[i],
            torsion: tors.as_ref().map(|v| v[i]).filter(|x| !x.is_nan()),
        })
        .collect();
    InvariantProfile::new(samples)
}

/// `sigma,phi,phi_prime,quad_error`; a missing mean is NaN.
pub fn jensen_table(rows: &[JensenEstimate]) -> Table {
    let mut t = Table::new(&["sigma", "phi", "phi_prime", "quad_error"]);
    for r in rows {
        t.push(vec![
            r.sigma,
            r.phi.unwrap_or(f64::NAN),
            r.phi_prime.unwrap_or(f64::NAN),
            r.quad_error,
        ]);
    }
    t
}

/// `cell_re,cell_im,visited`.
pub fn visit_table(r: &GridVisitReport) -> Table {
    let mut t = Table::new(&["cell_re", "cell_im", "visited"]);
    for c in &r.cells {
        t.push(vec![c.re, c.im, flag(c.visited)]);
    }
    t
}

#[derive(Serialize)]
struct Record<'a, T: Serialize> {
    provenance: &'a Provenance,
    result: &'a T,
}

/// One JSON object per run: `provenance` first, then `result`.
pub fn write_json<T: Serialize>(mut w: impl Write, provenance: &Provenance, result: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, &Record { provenance, result }).map_err(io_err)?;
    writeln!(w).map_err(io_err)
}

/// A polyline of `(x, y)` vertices; non-finite vertices split it.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub points: Vec<(f64, f64)>,
    pub stroke: String,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circle {
    pub center: (f64, f64),
    pub radius: f64,
    pub stroke: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Figure {
    pub title: String,
    pub lines: Vec<Polyline>,
    pub circles: Vec<Circle>,
}

/// Fraction of the data extent added on each side of the view box.
pub const SVG_MARGIN: f64 = 0.05;

impl Figure {
    pub fn new(title: &str) -> Self {
        Self {
            title: title.into(),
            ..Self::default()
        }
    }

    pub fn line(mut self, points: Vec<(f64, f64)>, stroke: &str, label: &str) -> Self {
        self.lines.push(Polyline {
            points,
            stroke: stroke.into(),
            label: label.into(),
        });
        self
    }

    pub fn circle(mut self, center: (f64, f64), radius: f64, stroke: &str) -> Self {
        self.circles.push(Circle {
            center,
            radius,
            stroke: stroke.into(),
        });
        self
    }

    /// Data bounds `(x_min, x_max, y_min, y_max)` over finite vertices and
    /// circles.
    pub fn bounds(&self) -> Option<(f64, f64, f64, f64)> {
        let mut b: Option<(f64, f64, f64, f64)> = None;
        let mut add = |x: f64, y: f64| {
            b = Some(match b {
                None => (x, x, y, y),
                Some((a, c, d, e)) => (a.min(x), c.max(x), d.min(y), e.max(y)),
            });
        };
        for l in &self.lines {
            for &(x, y) in &l.points {
                if x.is_finite() && y.is_finite() {
                    add(x, y);
                }
            }
        }
        for c in &self.circles {
            add(c.center.0 - c.radius, c.center.1 - c.radius);
            add(c.center.0 + c.radius, c.center.1 + c.radius);
        }
        b
    }

    /// The view box `(x, y, width, height)` in the flipped frame where SVG
    /// `y` is `−y`.
    pub fn view_box(&self) -> (f64, f64, f64, f64) {
        let (x0, x1, y0, y1) = self.bounds().unwrap_or((-1.0, 1.0, -1.0, 1.0));
        let w = (x1 - x0).max(1e-9);
        let h = (y1 - y0).max(1e-9);
        let (mx, my) = (SVG_MARGIN * w, SVG_MARGIN * h);
        (x0 - mx, -y1 - my, w + 2.0 * mx, h + 2.0 * my)
    }

    /// Self-contained SVG with the provenance in a leading comment.
    pub fn to_svg(&self, provenance: &Provenance) -> String {
        let (vx, vy, vw, vh) = self.view_box();
        let stroke_width = 0.002 * vw.max(vh);
        let mut s = String::new();
        s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<!--\n");
        for line in provenance.lines() {
            // "--" is not allowed inside comments
            s.push_str(&format!("  {}\n", line.replace("--", "- -")));
        }
        s.push_str("-->\n");
        s.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\" width=\"800\" height=\"{}\">\n",
            fmt_f64(vx),
            fmt_f64(vy),
            fmt_f64(vw),
            fmt_f64(vh),
            (800.0 * vh / vw).round().clamp(100.0, 4000.0)
        ));
        s.push_str(&format!("<title>{}</title>\n", escape(&self.title)));
        s.push_str(&format!(
            "<g transform=\"scale(1,-1)\" fill=\"none\" stroke-width=\"{}\">\n",
            fmt_f64(stroke_width)
        ));
        let axis = fmt_f64(0.5 * stroke_width);
        if vx < 0.0 && vx + vw > 0.0 {
            s.push_str(&format!(
                "<line class=\"axis\" x1=\"0\" y1=\"{}\" x2=\"0\" y2=\"{}\" stroke=\"#999\" stroke-width=\"{axis}\"/>\n",
                fmt_f64(-vy - vh),
                fmt_f64(-vy)
            ));
        }
        if vy < 0.0 && vy + vh > 0.0 {
            s.push_str(&format!(
                "<line class=\"axis\" x1=\"{}\" y1=\"0\" x2=\"{}\" y2=\"0\" stroke=\"#999\" stroke-width=\"{axis}\"/>\n",
                fmt_f64(vx),
                fmt_f64(vx + vw)
            ));
        }
        for l in &self.lines {
            for run in l.points.split(|p| !(p.0.is_finite() && p.1.is_finite())) {
                if run.is_empty() {
                    continue;
                }
                let pts: Vec<String> = run
                    .iter()
                    .map(|&(x, y)| format!("{},{}", fmt_f64(x), fmt_f64(y)))
                    .collect();
                s.push_str(&format!(
                    "<polyline data-label=\"{}\" stroke=\"{}\" points=\"{}\"/>\n",
                    escape(&l.label),
                    escape(&l.stroke),
                    pts.join(" ")
                ));
            }
        }
        for c in &self.circles {
            s.push_str(&format!(
                "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" stroke=\"{}\"/>\n",
                fmt_f64(c.center.0),
                fmt_f64(c.center.1),
                fmt_f64(c.radius),
                escape(&c.stroke)
            ));
        }
        s.push_str("</g>\n</svg>\n");
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Vertices of every polyline in an SVG produced by [`Figure::to_svg`], as
/// the exact text pairs written.
pub fn svg_polyline_vertices(svg: &str) -> Vec<Vec<(String, String)>> {
    svg.lines()
        .filter_map(|l| {
            let rest = l.strip_prefix("<polyline ")?;
            let start = rest.find("points=\"")? + 8;
            let end = start + rest[start..].find('"')?;
            Some(
                rest[start..end]
                    .split(' ')
                    .filter_map(|p| p.split_once(',').map(|(a, b)| (a.to_string(), b.to_string())))
                    .collect(),
            )
        })
        .collect()
}
