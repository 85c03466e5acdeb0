//! Just enough double-double arithmetic to carry `log n` and the phase
//! `t·log n` with ~106 bits, which keeps Dirichlet-term phases accurate at
//! large heights.

use std::sync::{OnceLock, RwLock};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const fn new(hi: f64, lo: f64) -> Self {
        Self { hi, lo }
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }

    pub fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn div_f64(self, d: f64) -> Dd {
        let q1 = self.hi / d;
        let (p, e) = two_prod(q1, d);
        let r = ((self.hi - p) - e + self.lo) / d;
        let (hi, lo) = quick_two_sum(q1, r);
        Dd { hi, lo }
    }
}

/// 2π to double-double precision.
const TWO_PI: Dd = Dd::new(std::f64::consts::TAU, 2.449_293_598_294_706_4e-16);

/// `t · log n` reduced to `[-π, π]`.
#[inline]
pub(crate) fn reduced_phase(t: f64, ln: Dd) -> f64 {
    let (p, e) = two_prod(t, ln.hi);
    let (p, e) = quick_two_sum(p, e + t * ln.lo);
    let k = (p / TWO_PI.hi).round();
    let (q, qe) = two_prod(k, TWO_PI.hi);
    // p - q is exact when k != 0 since the two agree to within a factor 2.
    ((p - q) - qe) + (e - k * TWO_PI.lo)
}

/// `2 atanh(1/(2n-1)) = log n - log(n-1)` in double-double.
fn log_ratio_step(n: u64) -> Dd {
    let x = Dd::new(1.0, 0.0).div_f64((2 * n - 1) as f64);
    let x2 = x.mul(x);
    let mut term = x;
    let mut sum = x;
    let mut j = 1.0;
    loop {
        term = term.mul(x2);
        let add = term.div_f64(2.0 * j + 1.0);
        if add.hi.abs() < 1e-34 * sum.hi.abs() {
            break;
        }
        sum = sum.add(add);
        j += 1.0;
    }
    sum.add(sum)
}

/// Upper limit of the cached table of logarithms.
pub(crate) const LOG_CACHE_LIMIT: usize = 1 << 20;

fn log_cache() -> &'static RwLock<Vec<Dd>> {
    static CACHE: OnceLock<RwLock<Vec<Dd>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(vec![Dd::default(), Dd::default()]))
}

/// Double-double `log n` for `n < upto` (capped at [`LOG_CACHE_LIMIT`]).
/// The returned vector is indexed by `n`; entry 0 is unused.
pub(crate) fn logs_upto(upto: usize) -> std::sync::RwLockReadGuard<'static, Vec<Dd>> {
    let upto = upto.min(LOG_CACHE_LIMIT);
    {
        let guard = log_cache().read().unwrap_or_else(|e| e.into_inner());
        if guard.len() >= upto {
            return guard;
        }
    }
    {
        let mut guard = log_cache().write().unwrap_or_else(|e| e.into_inner());
        let target = upto.next_power_of_two().min(LOG_CACHE_LIMIT);
        while guard.len() < target {
            let n = guard.len() as u64;
            let prev = guard[guard.len() - 1];
            guard.push(prev.add(log_ratio_step(n)));
        }
    }
    log_cache().read().unwrap_or_else(|e| e.into_inner())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logs_match_libm() {
        let logs = logs_upto(5000);
        for n in [2usize, 3, 10, 97, 1024, 4999] {
            let l = logs[n];
            assert!((l.hi - (n as f64).ln()).abs() <= 1.0 * f64::EPSILON * l.hi);
            assert!(l.lo.abs() <= f64::EPSILON * l.hi);
        }
        // log 1024 = 10 log 2 to double-double precision.
        let ln2 = logs[2];
        let ten_ln2 = ln2.mul(Dd::new(10.0, 0.0));
        let d = logs[1024].add(Dd::new(-ten_ln2.hi, -ten_ln2.lo));
        assert!(d.hi.abs() < 1e-29);
    }

    #[test]
    fn phase_reduction() {
        let logs = logs_upto(100);
        let r = reduced_phase(0.0, logs[7]);
        assert_eq!(r, 0.0);
        let r = reduced_phase(1e6, logs[2]);
        let direct = (1e6 * std::f64::consts::LN_2) % (2.0 * std::f64::consts::PI);
        // the naive route is only good to ~1e-10 at this size
        let diff = (r - direct).rem_euclid(2.0 * std::f64::consts::PI);
        assert!(diff.min(2.0 * std::f64::consts::PI - diff) < 1e-9);
        assert!(r.abs() <= std::f64::consts::PI + 1e-12);
    }
}
