//! Cubic splines (not-a-knot ends) with exact integrals.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
    /// `∫_{x_0}^{x_i}` of the spline.
    cumulative: Vec<f64>,
}

/// Fewest knots accepted.
pub const MIN_KNOTS: usize = 4;

impl CubicSpline {
    pub fn new(x: &[f64], y: &[f64]) -> Result<Self> {
        let n = x.len();
        if n != y.len() {
            return Err(Error::InvalidInput("knot and value counts differ".into()));
        }
        if n < MIN_KNOTS {
            return Err(Error::InvalidInput(format!(
                "a cubic spline needs at least {MIN_KNOTS} samples, got {n}"
            )));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("knots must be strictly increasing".into()));
        }
        if y.iter().chain(x).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("spline data must be finite".into()));
        }
        // Rows i = 1 ..= n-2 of h0 m_{i-1} + 2(h0+h1) m_i + h1 m_{i+1} = rhs_i,
        // with m_0 and m_{n-1} eliminated through the not-a-knot conditions
        // (third derivative continuous at x_1 and x_{n-2}).
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let k = n - 2;
        let mut sub = vec![0.0; k];
        let mut diag = vec![0.0; k];
        let mut sup = vec![0.0; k];
        let mut rhs = vec![0.0; k];
        for r in 0..k {
            let i = r + 1;
            sub[r] = h[i - 1];
            diag[r] = 2.0 * (h[i - 1] + h[i]);
            sup[r] = h[i];
            rhs[r] = 6.0 * ((y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1]);
        }
        // m_0 = m_1 + (h0/h1)(m_1 - m_2)
        let q0 = h[0] / h[1];
        diag[0] += sub[0] * (1.0 + q0);
        if k > 1 {
            sup[0] -= sub[0] * q0;
        }
        // m_{n-1} = m_{n-2} + (h_{n-2}/h_{n-3})(m_{n-2} - m_{n-3})
        let q1 = h[n - 2] / h[n - 3];
        diag[k - 1] += sup[k - 1] * (1.0 + q1);
        if k > 1 {
            sub[k - 1] -= sup[k - 1] * q1;
        }
        let inner = solve_tridiagonal(&sub, &diag, &sup, &rhs);
        let mut m = vec![0.0; n];
        m[1..=k].copy_from_slice(&inner);
        m[0] = if k > 1 { m[1] + q0 * (m[1] - m[2]) } else { m[1] };
        m[n - 1] = if k > 1 {
            m[n - 2] + q1 * (m[n - 2] - m[n - 3])
        } else {
            m[n - 2]
        };
        let mut spline = Self {
            x: x.to_vec(),
            y: y.to_vec(),
            m,
            cumulative: vec![0.0; n],
        };
        for i in 1..n {
            let acc = spline.cumulative[i - 1] + spline.piece_integral(i - 1, x[i]);
            spline.cumulative[i] = acc;
        }
        Ok(spline)
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    /// Index `i` with `x_i ≤ u < x_{i+1}`, clamped to the end pieces.
    fn piece(&self, u: f64) -> usize {
        let n = self.x.len();
        match self.x.binary_search_by(|v| v.total_cmp(&u)) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        }
    }

    fn coeffs(&self, i: usize, u: f64) -> (f64, f64, f64) {
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - u) / h;
        let b = (u - self.x[i]) / h;
        (h, a, b)
    }

    pub fn eval(&self, u: f64) -> f64 {
        let i = self.piece(u);
        let (h, a, b) = self.coeffs(i, u);
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    pub fn derivative(&self, u: f64) -> f64 {
        let i = self.piece(u);
        let (h, a, b) = self.coeffs(i, u);
        (self.y[i + 1] - self.y[i]) / h
            + ((3.0 * b * b - 1.0) * self.m[i + 1] - (3.0 * a * a - 1.0) * self.m[i]) * h / 6.0
    }

    /// `∫_{x_i}^{u}` on piece `i`.
    fn piece_integral(&self, i: usize, u: f64) -> f64 {
        let (h, a, b) = self.coeffs(i, u);
        // With A = 1 - B, ∫ A dx = h (1 - A^2)/2 and ∫ B dx = h B^2/2 from x_i.
        let int_a = h * (1.0 - a * a) / 2.0;
        let int_b = h * b * b / 2.0;
        let int_a3 = h * (1.0 - a.powi(4)) / 4.0;
        let int_b3 = h * b.powi(4) / 4.0;
        self.y[i] * int_a
            + self.y[i + 1] * int_b
            + ((int_a3 - int_a) * self.m[i] + (int_b3 - int_b) * self.m[i + 1]) * h * h / 6.0
    }

    /// `∫_{x_0}^{u}` of the spline.
    pub fn antiderivative(&self, u: f64) -> f64 {
        let i = self.piece(u);
        self.cumulative[i] + self.piece_integral(i, u)
    }

    /// `∫_a^b` of the spline.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        self.antiderivative(b) - self.antiderivative(a)
    }
}

/// Solves a tridiagonal system by the Thomas algorithm (`sub[0]` and
/// `sup[last]` are ignored).
fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    for i in 0..n {
        let (a, prev_c, prev_d) = if i == 0 {
            (0.0, 0.0, 0.0)
        } else {
            (sub[i], c[i - 1], d[i - 1])
        };
        let denom = diag[i] - a * prev_c;
        c[i] = sup[i] / denom;
        d[i] = (rhs[i] - a * prev_d) / denom;
    }
    let mut out = vec![0.0; n];
    for i in (0..n).rev() {
        out[i] = if i + 1 < n { d[i] - c[i] * out[i + 1] } else { d[i] };
    }
    out
}
