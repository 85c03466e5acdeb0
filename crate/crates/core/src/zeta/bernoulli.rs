use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use std::sync::OnceLock;

/// Highest Euler–Maclaurin order supported: coefficients up to B_{2 * MAX_ORDER + 2}.
pub(crate) const MAX_ORDER: usize = 40;

/// `B_{2j} / (2j)!` for `j = 0 ..= MAX_ORDER + 1`, computed exactly once.
pub(crate) fn scaled_even_bernoulli() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let b = bernoulli_numbers(2 * MAX_ORDER + 2);
        let mut factorial = BigInt::from(1u32);
        let mut out = Vec::with_capacity(MAX_ORDER + 2);
        for (n, bn) in b.iter().enumerate() {
            if n > 0 {
                factorial *= BigInt::from(n);
            }
            if n % 2 == 0 {
                let scaled = bn / BigRational::from_integer(factorial.clone());
                out.push(scaled.to_f64().unwrap_or(0.0));
            }
        }
        out
    })
}

/// Exact Bernoulli numbers `B_0 ..= B_n` (with `B_1 = +1/2`) by the
/// Akiyama–Tanigawa recurrence.
fn bernoulli_numbers(n: usize) -> Vec<BigRational> {
    let mut row: Vec<BigRational> = Vec::with_capacity(n + 1);
    let mut out = Vec::with_capacity(n + 1);
    for m in 0..=n {
        row.push(BigRational::new(BigInt::from(1), BigInt::from(m + 1)));
        for j in (1..=m).rev() {
            let diff = &row[j - 1] - &row[j];
            row[j - 1] = diff * BigRational::from_integer(BigInt::from(j));
        }
        out.push(if row[0].is_zero() {
            BigRational::zero()
        } else {
            row[0].clone()
        });
    }
    out
}
