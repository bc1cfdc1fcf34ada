//! Exact star products on phase-space function algebras and their reduction
//! by a single first-class constraint.
//!
//! * [`scalar`]: Gaussian rationals, rational functions of `u`, λ-series.
//! * [`flatphase`]: polynomials on ℝ²ⁿ with the Moyal product, `J = pₙ`.
//! * [`radialphase`]: functions on ℂⁿ⁺¹ with the Wick product and the two
//!   radial constraints cutting out the sphere `u = −2μ`.
//! * [`reduction`]: the algebra-agnostic reduction machinery.
//! * [`cpn`]: closed forms on ℂPⁿ: `K`, the `A`/`B` coefficient tables, the
//!   direct product formulas, the `P`/`R` word expansion and the order-two
//!   obstruction between the two reduced products.
//! * [`expr`] and [`format`]: the text grammar and output formats.

pub mod combinat;
pub mod cpn;
pub mod error;
pub mod expr;
pub mod flatphase;
pub mod format;
pub mod radialphase;
pub mod reduction;
pub mod sample;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
