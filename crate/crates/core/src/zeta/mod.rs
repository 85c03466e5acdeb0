//! Evaluation of `ζ(s)`, `ζ′(s)` and `ζ″(s)` with explicit absolute error bounds.
//!
//! The main route is Euler–Maclaurin summation: a Dirichlet partial sum up to
//! a cutoff `N`, the boundary terms, and Bernoulli corrections that are
//! differentiated term by term. The remainder is bounded by the classical
//! majorant `|s + 2ν + 1| / (σ + 2ν + 1) · |T_{ν+1}|`; derivative remainders
//! are bounded by a Cauchy estimate of that majorant on a circle around `s`.
//! Floating point rounding in the partial sum is tracked per term and added
//! to the reported bound, so the bound stays honest at large heights where
//! the phase `t·log n` loses digits.
//!
//! For `σ > 1` the absolutely convergent Dirichlet series with an integral
//! tail majorant is used instead whenever it needs fewer terms.

mod bernoulli;
mod dd;
pub(crate) mod special;

use crate::error::{Error, Result};
use crate::ComplexPoint;
use serde::{Deserialize, Serialize};

use bernoulli::{scaled_even_bernoulli, MAX_ORDER};

/// Points closer than this to `s = 1` are rejected.
pub const POLE_EXCLUSION: f64 = 1e-8;

/// Largest supported `|Im s|`.
pub const MAX_HEIGHT: f64 = 1e6;

/// Smallest accepted error target.
pub const MIN_TARGET_ABS_ERROR: f64 = f64::MIN_POSITIVE;

const EPS: f64 = f64::EPSILON;

/// Radius of the circle used for the Cauchy estimate of derivative remainders.
const CAUCHY_RADIUS: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Euler–Maclaurin with adaptive Bernoulli order.
    EulerMaclaurin,
    /// Partial sum of at least approximate-functional-equation length
    /// (`N ≥ |Im s|`) with a fixed second-order boundary correction. Slower;
    /// kept as a cross-check of the main route.
    AfePartialSum,
    /// Cheapest certified route for the point.
    #[default]
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub target_abs_error: f64,
    pub max_terms: usize,
    pub strategy: Strategy,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            target_abs_error: 1e-8,
            max_terms: 1 << 24,
            strategy: Strategy::Auto,
        }
    }
}

impl EvalConfig {
    pub fn with_target(target_abs_error: f64) -> Self {
        Self {
            target_abs_error,
            ..Self::default()
        }
    }

    pub fn strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.target_abs_error.is_finite() && self.target_abs_error >= MIN_TARGET_ABS_ERROR) {
            return Err(Error::InvalidInput(format!(
                "target_abs_error must be a positive finite number, got {}",
                self.target_abs_error
            )));
        }
        if self.max_terms < 32 {
            return Err(Error::InvalidInput(format!(
                "max_terms must be at least 32, got {}",
                self.max_terms
            )));
        }
        Ok(())
    }
}

/// Value and first two derivatives of `ζ` at `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaJet {
    pub s: ComplexPoint,
    pub value: ComplexPoint,
    pub d1: ComplexPoint,
    pub d2: ComplexPoint,
    /// Largest of the three component bounds.
    pub abs_error_bound: f64,
    /// Bounds for `value`, `d1`, `d2` separately.
    pub component_bounds: [f64; 3],
    /// Number of Dirichlet terms summed.
    pub terms: usize,
}

impl ZetaJet {
    /// `ζ″/ζ′(s)`.
    pub fn log_derivative_ratio(&self) -> ComplexPoint {
        self.d2 / self.d1
    }

    pub fn conj(&self) -> Self {
        Self {
            s: self.s.conj(),
            value: self.value.conj(),
            d1: self.d1.conj(),
            d2: self.d2.conj(),
            ..*self
        }
    }
}

/// `ζ(s)` alone with its error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaValue {
    pub s: ComplexPoint,
    pub value: ComplexPoint,
    pub abs_error_bound: f64,
    pub terms: usize,
}

/// Which outputs the plan has to certify.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Need {
    Value,
    Slope,
    Jet,
}

impl Need {
    fn components(self) -> usize {
        match self {
            Need::Value => 1,
            Need::Slope => 2,
            Need::Jet => 3,
        }
    }
}

/// Evaluates `ζ(s)`, `ζ′(s)`, `ζ″(s)` to within `cfg.target_abs_error`.
pub fn eval_zeta_jet(s: ComplexPoint, cfg: &EvalConfig) -> Result<ZetaJet> {
    eval_jet(s, 1, cfg, None)
}

/// Evaluates `ζ(s)` to within `cfg.target_abs_error`. Cheaper than
/// [`eval_zeta_jet`], which also has to certify the derivatives.
pub fn eval_zeta_value(s: ComplexPoint, cfg: &EvalConfig) -> Result<ZetaValue> {
    eval_with(s, 1, cfg, None, Need::Value).map(value_only)
}

/// Evaluates `ζ(s)` and `ζ′(s)` only; `d2` of the result is NaN and its
/// bound infinite. Near the pole this certifies where a full jet cannot,
/// because `ζ″` grows like `2/|s − 1|³`.
pub fn eval_zeta_slope(s: ComplexPoint, cfg: &EvalConfig) -> Result<ZetaJet> {
    eval_with(s, 1, cfg, None, Need::Slope)
}

fn value_only(jet: ZetaJet) -> ZetaValue {
    ZetaValue {
        s: jet.s,
        value: jet.value,
        abs_error_bound: jet.abs_error_bound,
        terms: jet.terms,
    }
}

/// Same as [`eval_zeta_jet`] for the tail `Σ_{n ≥ first} n^{-s}`.
pub fn eval_zeta_tail_jet(s: ComplexPoint, first: u64, cfg: &EvalConfig) -> Result<ZetaJet> {
    if first == 0 {
        return Err(Error::InvalidInput("tail must start at n >= 1".into()));
    }
    eval_jet(s, first, cfg, None)
}

/// `Σ_{k ≤ n} (-log k) k^{-s}`, summed in ascending order.
pub fn eval_dirichlet_prime_partial(s: ComplexPoint, n: u64) -> Result<ComplexPoint> {
    check_finite(s)?;
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let sums = partial_sums(s, 1, n + 1, None, Need::Jet);
    finite_or_overflow(s, sums.d1)
}

/// The approximate functional equation sum `Σ_{k ≤ t} k^{-s}`, `t = Im s`.
///
/// Its error is only `O(t^{-σ})` with an unspecified constant, so the value is
/// a cross-check and never a certified result.
pub fn eval_zeta_afe(s: ComplexPoint) -> Result<ComplexPoint> {
    check_finite(s)?;
    if !(s.im >= 10.0 && s.re > 0.0 && s.re <= 3.0) {
        return Err(Error::Domain(format!(
            "approximate functional equation needs Im s >= 10 and 0 < Re s <= 3, got {s}"
        )));
    }
    let n = s.im.floor() as u64;
    Ok(partial_sums(s, 1, n + 1, None, Need::Value).d0)
}

/// Radius and node count of the Cauchy-circle derivative cross-check.
pub const CAUCHY_CHECK_RADIUS: f64 = 0.25;
pub const CAUCHY_CHECK_NODES: usize = 64;

/// `(ζ′(s), ζ″(s))` from the trapezoid rule on a circle around `s`, using
/// only values of `ζ`. Independent of the term-by-term derivatives and meant
/// for cross-checking them; the trapezoid error decays like `4^{-64}` relative
/// to the size of `ζ` on a circle of twice the radius.
pub fn eval_zeta_derivatives_cauchy(s: ComplexPoint, cfg: &EvalConfig) -> Result<(ComplexPoint, ComplexPoint)> {
    let r = CAUCHY_CHECK_RADIUS;
    if (s - ComplexPoint::new(1.0, 0.0)).norm() <= r + POLE_EXCLUSION {
        return Err(Error::PoleAt1 { s });
    }
    let m = CAUCHY_CHECK_NODES;
    let mut d1 = ComplexPoint::new(0.0, 0.0);
    let mut d2 = ComplexPoint::new(0.0, 0.0);
    for k in 0..m {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
        let u = ComplexPoint::from_polar(1.0, theta);
        let f = eval_jet(s + u * r, 1, cfg, None)?.value;
        d1 += f / u;
        d2 += f / (u * u);
    }
    let n = m as f64;
    Ok((d1 / (n * r), d2 * 2.0 / (n * r * r)))
}

/// Precomputed `n^{-σ}` for one vertical line.
///
/// Results are bit-identical with and without a table; it only saves the
/// transcendental calls when many heights on the same line are evaluated.
#[derive(Debug, Clone)]
pub struct LineTable {
    sigma: f64,
    weights: Vec<f64>,
}

impl LineTable {
    /// Table for `n = 1 ..= max_n`.
    pub fn new(sigma: f64, max_n: usize) -> Self {
        let logs = dd::logs_upto(max_n + 1);
        let weights = (0..=max_n.min(logs.len().saturating_sub(1)))
            .map(|n| if n == 0 { 0.0 } else { (-sigma * logs[n].hi).exp() })
            .collect();
        Self { sigma, weights }
    }

    /// Table large enough for every height up to `t_max` under `cfg`.
    pub fn for_heights(sigma: f64, t_max: f64, cfg: &EvalConfig) -> Self {
        let n = initial_cutoff(t_max.abs(), 1).saturating_mul(2);
        Self::new(sigma, n.min(cfg.max_terms).min(1 << 22))
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn len(&self) -> usize {
        self.weights.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Evaluates jets along `Re s = table.sigma()`.
#[derive(Debug, Clone)]
pub struct LineEvaluator {
    table: LineTable,
    cfg: EvalConfig,
}

impl LineEvaluator {
    pub fn new(sigma: f64, t_max: f64, cfg: EvalConfig) -> Self {
        Self {
            table: LineTable::for_heights(sigma, t_max, &cfg),
            cfg,
        }
    }

    pub fn sigma(&self) -> f64 {
        self.table.sigma
    }

    pub fn config(&self) -> &EvalConfig {
        &self.cfg
    }

    pub fn jet(&self, t: f64) -> Result<ZetaJet> {
        eval_jet(ComplexPoint::new(self.table.sigma, t), 1, &self.cfg, Some(&self.table))
    }

    /// Value and first derivative, see [`eval_zeta_slope`].
    pub fn slope(&self, t: f64) -> Result<ZetaJet> {
        eval_with(
            ComplexPoint::new(self.table.sigma, t),
            1,
            &self.cfg,
            Some(&self.table),
            Need::Slope,
        )
    }

    pub fn value(&self, t: f64) -> Result<ZetaValue> {
        eval_with(
            ComplexPoint::new(self.table.sigma, t),
            1,
            &self.cfg,
            Some(&self.table),
            Need::Value,
        )
        .map(value_only)
    }
}

fn check_finite(s: ComplexPoint) -> Result<()> {
    if s.re.is_finite() && s.im.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("non-finite argument {s}")))
    }
}

fn finite_or_overflow(s: ComplexPoint, z: ComplexPoint) -> Result<ComplexPoint> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::Domain(format!("overflow evaluating at {s}")))
    }
}

fn eval_jet(s: ComplexPoint, first: u64, cfg: &EvalConfig, table: Option<&LineTable>) -> Result<ZetaJet> {
    eval_with(s, first, cfg, table, Need::Jet)
}

/// Outputs that are not needed are left as NaN with infinite bounds.
fn eval_with(s: ComplexPoint, first: u64, cfg: &EvalConfig, table: Option<&LineTable>, need: Need) -> Result<ZetaJet> {
    cfg.validate()?;
    check_finite(s)?;
    if (s - ComplexPoint::new(1.0, 0.0)).norm() < POLE_EXCLUSION {
        return Err(Error::PoleAt1 { s });
    }
    if s.im.abs() > MAX_HEIGHT {
        return Err(Error::Domain(format!(
            "|Im s| = {} exceeds the supported height {MAX_HEIGHT}",
            s.im.abs()
        )));
    }
    let table = table.filter(|tb| tb.sigma == s.re);

    let plan = match cfg.strategy {
        Strategy::EulerMaclaurin => plan_euler_maclaurin(s, first, cfg, need),
        Strategy::AfePartialSum => plan_partial_sum(s, first, cfg, need),
        Strategy::Auto => {
            let em = plan_euler_maclaurin(s, first, cfg, need);
            match plan_direct(s, first, cfg, need) {
                Some(direct) if direct.cutoff < em.cutoff => direct,
                _ => em,
            }
        }
    };

    let sums = partial_sums(s, first, plan.cutoff, table, need);
    let mut value = sums.d0;
    let mut d1 = sums.d1;
    let mut d2 = sums.d2;
    let mut bounds = [
        plan.truncation[0] + sums.rounding[0],
        plan.truncation[1] + sums.rounding[1],
        plan.truncation[2] + sums.rounding[2],
    ];
    if let Some(order) = plan.order {
        let tail = euler_maclaurin_tail(s, plan.cutoff, order);
        value += tail.d0;
        d1 += tail.d1;
        d2 += tail.d2;
        for (b, r) in bounds.iter_mut().zip(tail.rounding) {
            *b += r;
        }
    }

    let nan = ComplexPoint::new(f64::NAN, f64::NAN);
    if need != Need::Jet {
        d2 = nan;
        bounds[2] = f64::INFINITY;
    }
    if need == Need::Value {
        d1 = nan;
        bounds[1] = f64::INFINITY;
    }
    for z in [value, d1, d2].iter().take(need.components()) {
        finite_or_overflow(s, *z)?;
    }
    let abs_error_bound = bounds[..need.components()].iter().cloned().fold(0.0, f64::max);
    if !(abs_error_bound <= cfg.target_abs_error) {
        return Err(Error::AccuracyUnreachable {
            s,
            achieved: abs_error_bound,
            target: cfg.target_abs_error,
        });
    }
    Ok(ZetaJet {
        s,
        value,
        d1,
        d2,
        abs_error_bound,
        component_bounds: bounds,
        terms: (plan.cutoff - first) as usize,
    })
}

#[derive(Debug, Clone, Copy)]
struct Plan {
    /// Sum `first .. cutoff`.
    cutoff: u64,
    /// Euler–Maclaurin order, `None` for the plain Dirichlet series.
    order: Option<usize>,
    truncation: [f64; 3],
}

fn initial_cutoff(height: f64, first: u64) -> usize {
    let n = (0.2 * height).ceil().max(8.0) as usize;
    n.max(first as usize + 1)
}

/// Bernoulli order of the cross-check strategy.
const CHECK_ORDER: usize = 2;

fn plan_euler_maclaurin(s: ComplexPoint, first: u64, cfg: &EvalConfig, need: Need) -> Plan {
    let n = initial_cutoff(s.im.abs(), first) as u64;
    plan_by_growth(first, cfg, n, need, |n, budget| {
        best_order(s, n, MAX_ORDER, budget, need)
    })
}

/// Cross-check route: a partial sum at least as long as the approximate
/// functional equation uses (`N ≥ |t|`), a fixed low-order correction, and
/// growth of `N` until the remainder fits.
fn plan_partial_sum(s: ComplexPoint, first: u64, cfg: &EvalConfig, need: Need) -> Plan {
    let n = (s.im.abs().ceil() as u64).max(initial_cutoff(0.0, first) as u64);
    plan_by_growth(first, cfg, n, need, |n, _| {
        (CHECK_ORDER, order_bounds(s, n, CHECK_ORDER))
    })
}

fn plan_by_growth(
    first: u64,
    cfg: &EvalConfig,
    start: u64,
    need: Need,
    bounds: impl Fn(u64, f64) -> (usize, [f64; 3]),
) -> Plan {
    let budget = 0.5 * cfg.target_abs_error;
    let max_n = (cfg.max_terms as u64 + first).max(first + 1);
    let mut n = start.min(max_n);
    loop {
        let (order, truncation) = bounds(n, budget);
        let worst = truncation[..need.components()].iter().cloned().fold(0.0, f64::max);
        if worst <= budget || n >= max_n {
            return Plan {
                cutoff: n,
                order: Some(order),
                truncation,
            };
        }
        n = (n + n / 4 + 1).min(max_n);
    }
}

/// Remainder bounds for one fixed order.
fn order_bounds(s: ComplexPoint, n: u64, order: usize) -> [f64; 3] {
    let mut out = [f64::INFINITY; 3];
    for_each_order(s, n, order, |o, b| {
        if o == order {
            out = b;
        }
        false
    });
    out
}

/// Chooses the lowest Bernoulli order whose remainder bounds fit `budget`,
/// or the one minimising them if none does. Low orders keep rounding small.
fn best_order(s: ComplexPoint, n: u64, order_cap: usize, budget: f64, need: Need) -> (usize, [f64; 3]) {
    let key = |b: &[f64; 3]| match need {
        Need::Value => b[0],
        Need::Slope => b[1].max(b[0]),
        Need::Jet => b[2].max(b[0]),
    };
    let mut best = (0usize, [f64::INFINITY; 3]);
    for_each_order(s, n, order_cap, |order, bounds| {
        let worst = key(&bounds);
        if worst.is_finite() && worst < key(&best.1) {
            best = (order, bounds);
        }
        worst <= budget
    });
    best
}

/// Calls `visit(order, bounds)` for orders `0 ..= order_cap` with the
/// remainder bounds of value, first and second derivative, until it returns
/// true.
fn for_each_order(s: ComplexPoint, n: u64, order_cap: usize, mut visit: impl FnMut(usize, [f64; 3]) -> bool) {
    let c = scaled_even_bernoulli();
    let r = CAUCHY_RADIUS;
    let ln_n = (n as f64).ln();
    let sigma = s.re;

    // Running products over i = 0 ..= 2ν of |s+i| and |s+i| + r.
    let mut prod = s.norm();
    let mut prod_r = s.norm() + r;
    for order in 0..=order_cap.min(MAX_ORDER) {
        if order > 0 {
            for i in [2 * order - 1, 2 * order] {
                let a = (s + i as f64).norm();
                prod *= a;
                prod_r *= a + r;
            }
        }
        let k = 2.0 * order as f64 + 1.0;
        let denom = sigma + k;
        let denom_r = sigma - r + k;
        if denom_r <= 0.0 {
            continue;
        }
        let cn = c[order + 1].abs();
        let value_bound = (s + k).norm() / denom * cn * prod * (-(sigma + k) * ln_n).exp();
        let circle_max = ((s + k).norm() + r) / denom_r * cn * prod_r * (-(sigma - r + k) * ln_n).exp();
        if visit(order, [value_bound, circle_max / r, 2.0 * circle_max / (r * r)]) {
            return;
        }
    }
}

/// `∫_a^∞ (log x)^k x^{-σ} dx` for `σ > 1`, `k ≤ 2`.
fn log_power_tail_integral(a: f64, sigma: f64, k: usize) -> f64 {
    let e = sigma - 1.0;
    let l = a.ln();
    let base = a.powf(-e);
    match k {
        0 => base / e,
        1 => base * (l / e + 1.0 / (e * e)),
        _ => base * (l * l / e + 2.0 * l / (e * e) + 2.0 / (e * e * e)),
    }
}

/// Bound on `Σ_{n ≥ cutoff} (log n)^k n^{-σ}` for `k = 0, 1, 2`.
fn dirichlet_tail_bounds(cutoff: u64, sigma: f64) -> [f64; 3] {
    let a = cutoff as f64;
    let l = a.ln();
    let lead = a.powf(-sigma);
    [
        lead + log_power_tail_integral(a, sigma, 0),
        l * lead + log_power_tail_integral(a, sigma, 1),
        l * l * lead + log_power_tail_integral(a, sigma, 2),
    ]
}

fn plan_direct(s: ComplexPoint, first: u64, cfg: &EvalConfig, need: Need) -> Option<Plan> {
    // The summands (log x)^k x^{-σ} must be decreasing beyond the cutoff.
    if s.re <= 1.25 {
        return None;
    }
    let budget = 0.5 * cfg.target_abs_error;
    let ok = |n: u64| {
        dirichlet_tail_bounds(n, s.re)[..need.components()]
            .iter()
            .all(|&b| b <= budget)
    };
    let mut hi = first.max(8) + 1;
    let limit = (cfg.max_terms as u64).saturating_add(first);
    while !ok(hi) {
        if hi >= limit {
            return None;
        }
        hi = (hi * 2).min(limit);
    }
    let mut lo = (hi / 2).max(first.max(8) + 1);
    if ok(lo) {
        hi = lo;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(Plan {
        cutoff: hi,
        order: None,
        truncation: dirichlet_tail_bounds(hi, s.re),
    })
}

/// Neumaier-compensated complex accumulator.
#[derive(Debug, Clone, Copy, Default)]
struct CompensatedComplex {
    re: (f64, f64),
    im: (f64, f64),
}

#[inline]
fn neumaier(acc: &mut (f64, f64), x: f64) {
    let t = acc.0 + x;
    if acc.0.abs() >= x.abs() {
        acc.1 += (acc.0 - t) + x;
    } else {
        acc.1 += (x - t) + acc.0;
    }
    acc.0 = t;
}

impl CompensatedComplex {
    #[inline]
    fn add(&mut self, re: f64, im: f64) {
        neumaier(&mut self.re, re);
        neumaier(&mut self.im, im);
    }

    fn value(&self) -> ComplexPoint {
        ComplexPoint::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

#[derive(Debug, Clone, Copy)]
struct Sums {
    d0: ComplexPoint,
    d1: ComplexPoint,
    d2: ComplexPoint,
    rounding: [f64; 3],
}

/// `n^{-s}` as (weight, unit phase factor, log n, relative rounding error).
#[inline]
fn dirichlet_term(
    sigma: f64,
    t: f64,
    n: u64,
    logs: &[dd::Dd],
    weights: Option<&[f64]>,
) -> (f64, ComplexPoint, f64, f64) {
    match logs.get(n as usize) {
        Some(&ln) => {
            let w = match weights.and_then(|w| w.get(n as usize)) {
                Some(&w) => w,
                None => (-sigma * ln.hi).exp(),
            };
            let (sin, cos) = dd::reduced_phase(t, ln).sin_cos();
            let rel = (sigma.abs() * ln.hi + 6.0) * EPS;
            (w, ComplexPoint::new(cos, -sin), ln.hi, rel)
        }
        None => {
            let l = (n as f64).ln();
            let (sin, cos) = (t * l).sin_cos();
            // log n is only good to half an ulp, which t magnifies.
            let rel = ((t.abs() + sigma.abs()) * l + 6.0) * EPS;
            ((-sigma * l).exp(), ComplexPoint::new(cos, -sin), l, rel)
        }
    }
}

/// `Σ_{first ≤ n < end} (-log n)^k n^{-s}` for `k = 0, 1, 2` with a running
/// rounding estimate.
fn partial_sums(s: ComplexPoint, first: u64, end: u64, table: Option<&LineTable>, need: Need) -> Sums {
    let slope = need != Need::Value;
    let jet = need == Need::Jet;
    let (sigma, t) = (s.re, s.im);
    let mut a0 = CompensatedComplex::default();
    let mut a1 = CompensatedComplex::default();
    let mut a2 = CompensatedComplex::default();
    let mut err = [0.0f64; 3];
    let mut abs_sum = [0.0f64; 3];
    let logs = dd::logs_upto(end as usize);
    let weights = table.map(|tb| tb.weights.as_slice());
    for n in first..end {
        let (w, phase, ln, rel) = dirichlet_term(sigma, t, n, &logs, weights);
        let re = w * phase.re;
        let im = w * phase.im;
        a0.add(re, im);
        let e = w * rel;
        err[0] += e;
        abs_sum[0] += w;
        if slope {
            a1.add(-ln * re, -ln * im);
            err[1] += e * ln;
            abs_sum[1] += w * ln;
        }
        if jet {
            let ln2 = ln * ln;
            a2.add(ln2 * re, ln2 * im);
            err[2] += e * ln2;
            abs_sum[2] += w * ln2;
        }
    }
    let (d0, d1, d2) = (a0.value(), a1.value(), a2.value());
    let count = end.saturating_sub(first) as f64;
    for ((e, z), a) in err.iter_mut().zip([d0, d1, d2]).zip(abs_sum) {
        *e += 2.0 * EPS * z.norm() + 2.0 * count * EPS * EPS * a;
    }
    Sums {
        d0,
        d1,
        d2,
        rounding: err,
    }
}

/// Boundary and Bernoulli terms at cutoff `n`, with their derivatives.
fn euler_maclaurin_tail(s: ComplexPoint, n: u64, order: usize) -> Sums {
    let c = scaled_even_bernoulli();
    let nf = n as f64;
    let one = ComplexPoint::new(1.0, 0.0);
    let logs = dd::logs_upto(n as usize + 1);
    let (w, phase, l, rel) = dirichlet_term(s.re, s.im, n, &logs, None);
    drop(logs);
    // N^{-s}
    let p = phase * w;
    let inv = one / (s - one);
    let np = p * nf; // N^{1-s}

    let b0 = [np * inv, p * 0.5];
    let b1 = [np * (-l * inv - inv * inv), p * (-0.5 * l)];
    let b2 = [
        np * (l * l * inv + 2.0 * l * inv * inv + 2.0 * inv * inv * inv),
        p * (0.5 * l * l),
    ];
    let mut v = b0[0] + b0[1];
    let mut v1 = b1[0] + b1[1];
    let mut v2 = b2[0] + b2[1];
    let mut mag = [
        b0[0].norm() + b0[1].norm(),
        b1[0].norm() + b1[1].norm(),
        b2[0].norm() + b2[1].norm(),
    ];

    // P_j(s) = s (s+1) ... (s+2j-2) with first and second derivative.
    let (mut q, mut q1, mut q2) = (s, one, ComplexPoint::new(0.0, 0.0));
    let mut scale = p / nf; // N^{-s-2j+1} for j = 1
    for j in 1..=order {
        if j > 1 {
            for i in [2 * j - 3, 2 * j - 2] {
                let f = s + i as f64;
                q2 = q2 * f + q1 * 2.0;
                q1 = q1 * f + q;
                q *= f;
            }
            scale /= nf * nf;
        }
        let cj = c[j];
        let t0 = scale * q * cj;
        let t1 = scale * (q1 - q * l) * cj;
        let t2 = scale * (q2 - q1 * (2.0 * l) + q * (l * l)) * cj;
        v += t0;
        v1 += t1;
        v2 += t2;
        mag[0] += t0.norm();
        mag[1] += t1.norm();
        mag[2] += t2.norm();
    }
    // Relative error of N^{-s} plus a few roundings per operation.
    let rel = rel + (8.0 + 2.0 * order as f64) * EPS;
    Sums {
        d0: v,
        d1: v1,
        d2: v2,
        rounding: [rel * mag[0], rel * mag[1], rel * mag[2]],
    }
}
