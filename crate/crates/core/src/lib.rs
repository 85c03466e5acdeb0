//! Numerical tools for the curves `t ↦ ζ(σ + it)`.

// `!(a < b)` is how NaN gets rejected
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod curvature;
pub mod density;
pub mod error;
pub mod frenet;
pub mod io;
pub mod jensen;
pub mod phase;
pub mod quad;
pub mod spline;
pub mod universality;
pub mod zeta;

pub use curvature::{CurvatureSample, SignChange, VerticalSegment};
pub use error::{Error, Result};
pub use num_complex::Complex64 as ComplexPoint;
pub use zeta::{
    eval_dirichlet_prime_partial, eval_zeta_afe, eval_zeta_derivatives_cauchy, eval_zeta_jet, eval_zeta_slope,
    eval_zeta_tail_jet, eval_zeta_value, EvalConfig, LineEvaluator, LineTable, Strategy, ZetaJet, ZetaValue,
};
