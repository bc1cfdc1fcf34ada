//! Exact arithmetic: Gaussian rationals, rational functions of `u`, and
//! truncated λ-series.

mod gaussian;
mod poly;
mod radial;
mod series;

pub use gaussian::{fmt_rat, fmt_rat_pq, GaussianRational};
pub use poly::UPoly;
pub use radial::RadialRational;
pub use series::{Coefficient, LambdaSeries};

/// Evaluates `r` at `u0`, reporting a pole by value.
pub fn ratfun_eval(r: &RadialRational, u0: &GaussianRational) -> crate::Result<GaussianRational> {
    r.eval(u0)
}
