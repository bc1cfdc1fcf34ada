//! Closed forms for the reduction of the Wick product on ℂⁿ⁺¹ to ℂPⁿ.
//!
//! The direct product formulas use the unit Wick normalisation
//! `M_k = (1/k!) Σ ∂ᵏf ∂̄ᵏg`, in which
//!
//! ```text
//! f ⋆ g = Σ_{k,l} (λ/a)^{k+l} C^(k)_l u^k M_k(f,g),   a = −2μ,
//! ```
//!
//! with `C = A` for `J = −½u − μ` and `C = B` for `J = ¼u² − μ²`. The engine
//! works with `c_r = 2ʳ/r!`, so its order-`n` coefficient is `2ⁿ` times the
//! formula's.

mod coeffs;
mod words;

pub use coeffs::{
    a_coeff_closed, a_coeff_sum, b_coeff, b_coeff_with, coeff_table_rect, coeff_table_triangle, default_total, CoeffKind,
    CoeffTable,
};
pub use words::{pr_operators, pr_t_series, pr_t_word_sum, words_of_weight, RVariant};

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::radialphase::{
    poisson_radial, prol_radial, wick_kernel, ConstraintKind, RadialConstraint, RadialFun, RadialSetup,
    WickNormalization,
};
use crate::reduction::{reduce_star, PhaseSetup, SStrategy};
use crate::scalar::{GaussianRational, LambdaSeries, RadialRational};

/// `λ ↦ LAMBDA_RESCALE·λ` takes the unit-normalised formulas to the engine's
/// normalisation.
pub const LAMBDA_RESCALE: i64 = 2;

fn check_linear(setup: &RadialSetup) -> Result<()> {
    if setup.constraint_def().kind() == ConstraintKind::Linear {
        Ok(())
    } else {
        Err(Error::Precondition("K is defined for the linear constraint".into()))
    }
}

fn check_homogeneous(f: &RadialFun, name: &str) -> Result<()> {
    if f.is_homogeneous() {
        Ok(())
    } else {
        Err(Error::NotHomogeneous(format!("{name} = {f}")))
    }
}

/// `Kf = −M₁(π_J f, J)`, the order-one kernel of the `T` recursion.
pub fn k_apply(setup: &RadialSetup, f: &RadialFun) -> Result<RadialFun> {
    check_linear(setup)?;
    let h = setup.pij(f)?;
    Ok(setup.star_kernel(1, &h, &setup.constraint())?.neg())
}

/// `½ E π_J f`.
pub fn k_half_euler(setup: &RadialSetup, f: &RadialFun) -> Result<RadialFun> {
    check_linear(setup)?;
    Ok(setup.pij(f)?.euler_e().scale(&GaussianRational::from_ratio(1, 2)))
}

/// Two candidate values of the same quantity and the scalar relating them.
#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub engine: RadialFun,
    pub formula: RadialFun,
    /// `c` with `engine = c · formula`, when one exists.
    pub factor: Option<GaussianRational>,
}

impl Comparison {
    fn new(engine: RadialFun, formula: RadialFun) -> Self {
        let factor = if formula.is_zero() {
            engine.is_zero().then(GaussianRational::one)
        } else {
            engine.ratio_to(&formula)
        };
        Comparison { engine, formula, factor }
    }
}

/// Kernel `K` against `½ E π_J`.
pub fn k_compare(setup: &RadialSetup, f: &RadialFun) -> Result<Comparison> {
    Ok(Comparison::new(k_apply(setup, f)?, k_half_euler(setup, f)?))
}

/// `(1/8μ)(½(E² − Ē²) + (E + Ē) − (E + Ē)E) f` restricted to the sphere.
pub fn res_k_formula(setup: &RadialSetup, f: &RadialFun) -> Result<RadialFun> {
    check_linear(setup)?;
    let e = f.euler_e();
    let eb = f.euler_ebar();
    let e2 = e.euler_e();
    let eb2 = eb.euler_ebar();
    let half = GaussianRational::from_ratio(1, 2);
    let sum = e.add(&eb)?;
    let sum_e = e2.add(&e.euler_ebar())?;
    let inner = e2.sub(&eb2)?.scale(&half).add(&sum)?.sub(&sum_e)?;
    let mu = GaussianRational::real(setup.constraint_def().mu().clone());
    let c = (&GaussianRational::from_int(8) * &mu).inv()?;
    setup.restrict(&inner.scale(&c))
}

/// `res_C(K f)` against the restricted Euler-operator formula.
pub fn res_k_compare(setup: &RadialSetup, f: &RadialFun) -> Result<Comparison> {
    let engine = setup.restrict(&k_apply(setup, f)?)?;
    Ok(Comparison::new(engine, res_k_formula(setup, f)?))
}

/// `res_C π_J f` against `(1/2μ)(E + Ē) f` restricted.
pub fn res_pij_compare(setup: &RadialSetup, f: &RadialFun) -> Result<Comparison> {
    let engine = setup.restrict(&setup.pij(f)?)?;
    let mu = GaussianRational::real(setup.constraint_def().mu().clone());
    let c = (&GaussianRational::from_int(2) * &mu).inv()?;
    let formula = setup.restrict(&f.euler_e().add(&f.euler_ebar())?.scale(&c))?;
    Ok(Comparison::new(engine, formula))
}

fn direct_product(
    f: &RadialFun,
    g: &RadialFun,
    constraint: &RadialConstraint,
    order: usize,
    coeff: impl Fn(u32, u32) -> Result<GaussianRational>,
) -> Result<LambdaSeries<RadialFun>> {
    check_homogeneous(f, "f")?;
    check_homogeneous(g, "g")?;
    let inv_a = constraint.sphere_value().inv()?;
    let kernels = (0..=order)
        .map(|k| Ok(wick_kernel(k, f, g, WickNormalization::Unit)?.mul_radial(&RadialRational::u_pow(k as i64))))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(order + 1);
    for n in 0..=order {
        let mut acc = RadialFun::zero(f.coords());
        for (k, mk) in kernels.iter().enumerate().take(n + 1) {
            if mk.is_zero() {
                continue;
            }
            let l = n - k;
            let c = if k == 0 {
                // M₀ = fg is homogeneous and T_l kills it for l ≥ 1
                if l == 0 { GaussianRational::one() } else { GaussianRational::zero() }
            } else {
                coeff(k as u32, l as u32)?
            };
            acc = acc.add(&mk.scale(&(&c * &inv_a.pow(n as u32))))?;
        }
        out.push(prol_radial(&acc, constraint)?);
    }
    Ok(LambdaSeries::new(out))
}

/// `Σ_{k,l} (λ/−2μ)^{k+l} A^(k)_l u^k M_k(f,g)` through λᴺ, unit normalisation.
pub fn formula9_product(f: &RadialFun, g: &RadialFun, mu: &BigRational, order: usize) -> Result<LambdaSeries<RadialFun>> {
    let c = RadialConstraint::linear(mu.clone())?;
    direct_product(f, g, &c, order, |k, l| Ok(GaussianRational::real(a_coeff_sum(k, l))))
}

/// `Σ_{k,l} (λ/−2μ)^{k+l} B^(k)_l u^k M_k(f,g)` through λᴺ, unit normalisation.
pub fn b_formula_product(f: &RadialFun, g: &RadialFun, mu: &BigRational, order: usize) -> Result<LambdaSeries<RadialFun>> {
    let c = RadialConstraint::quadratic(mu.clone())?;
    let table = coeff_table_triangle(CoeffKind::B, order as u32, mu)?;
    direct_product(f, g, &c, order, |k, l| {
        table.entries.get(&(k, l)).cloned().ok_or_else(|| Error::Precondition(format!("missing B({k},{l})")))
    })
}

/// The engine's reduced product (`S = Id`) for a radial setup.
pub fn reduced_product(setup: &RadialSetup, f: &RadialFun, g: &RadialFun, order: usize) -> Result<LambdaSeries<RadialFun>> {
    let fs = LambdaSeries::constant(f.clone(), order);
    let gs = LambdaSeries::constant(g.clone(), order);
    reduce_star(setup, &SStrategy::Identity, &fs, &gs, order)
}

/// The antisymmetrised order-two difference of the reduced products from the
/// quadratic and the linear constraint, and `½ i a⁻² u {f,g}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Obstruction {
    pub lhs: RadialFun,
    pub rhs: RadialFun,
    /// `c` with `lhs = c · rhs`, when `rhs ≠ 0` and one exists.
    pub ratio: Option<GaussianRational>,
}

pub fn obstruction_order2(f: &RadialFun, g: &RadialFun, mu: &BigRational) -> Result<Obstruction> {
    check_homogeneous(f, "f")?;
    check_homogeneous(g, "g")?;
    let n = f.coords() - 1;
    let quad = RadialSetup::quadratic(n, mu.clone())?;
    let lin = RadialSetup::linear(n, mu.clone())?;
    let second = |s: &RadialSetup, x: &RadialFun, y: &RadialFun| -> Result<RadialFun> {
        Ok(reduced_product(s, x, y, 2)?.coeff(2).clone())
    };
    let fg = second(&quad, f, g)?.sub(&second(&lin, f, g)?)?;
    let gf = second(&quad, g, f)?.sub(&second(&lin, g, f)?)?;
    let lhs = fg.sub(&gf)?;
    let a = lin.sphere_value();
    let c = &GaussianRational::i() * &(&GaussianRational::from_ratio(1, 2) * &a.pow(2).inv()?);
    let bracket = poisson_radial(f, g)?.mul_radial(&RadialRational::u_pow(1)).scale(&c);
    let rhs = prol_radial(&bracket, lin.constraint_def())?;
    let ratio = if rhs.is_zero() { None } else { lhs.ratio_to(&rhs) };
    Ok(Obstruction { lhs, rhs, ratio })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn hom(a: Vec<u32>, b: Vec<u32>) -> RadialFun {
        let k = a.iter().sum::<u32>() as i64;
        RadialFun::term(a, b, RadialRational::u_pow(-k))
    }

    #[test]
    fn k_kernel_is_twice_half_euler() {
        let s = RadialSetup::linear(1, q(-1, 2)).unwrap();
        let f = RadialFun::term(vec![1, 0], vec![0, 1], RadialRational::u_pow(1));
        let c = k_compare(&s, &f).unwrap();
        assert_eq!(c.factor, Some(GaussianRational::from_int(2)));
    }

    #[test]
    fn k_vanishes_on_homogeneous() {
        let s = RadialSetup::linear(1, q(-3, 2)).unwrap();
        assert!(k_apply(&s, &hom(vec![1, 0], vec![0, 1])).unwrap().is_zero());
    }

    #[test]
    fn formula9_low_orders() {
        let f = hom(vec![1, 0], vec![0, 1]);
        let g = hom(vec![0, 1], vec![1, 0]);
        let mu = q(-1, 2);
        let s = formula9_product(&f, &g, &mu, 1).unwrap();
        assert_eq!(s.coeff(0), &f.mul(&g).unwrap());
        let m1 = wick_kernel(1, &f, &g, WickNormalization::Unit).unwrap().mul_radial(&RadialRational::u_pow(1));
        assert_eq!(s.coeff(1), &m1);
        assert!(formula9_product(&RadialFun::z(2, 1), &g, &mu, 1).is_err());
    }

    #[test]
    fn obstruction_vanishes_for_equal_arguments() {
        let f = hom(vec![1, 0], vec![0, 1]);
        let o = obstruction_order2(&f, &f, &q(-1, 2)).unwrap();
        assert!(o.lhs.is_zero() && o.rhs.is_zero() && o.ratio.is_none());
    }
}
