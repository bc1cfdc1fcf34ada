use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::combinat::{binomial, factorial};
use crate::error::{Error, Result};
use crate::radialphase::{RadialFun, RadialSetup, WickNormalization};
use crate::reduction::PhaseSetup;
use crate::scalar::{GaussianRational, RadialRational};

use super::words::{pr_t_word_sum, RVariant};

/// `A^(k)_l = (−1)^l Σ_{k ≥ i₁ ≥ i₂ ≥ … ≥ i_l ≥ 1} i₁i₂⋯i_l`, by enumerating
/// the nested index chain.
pub fn a_coeff_sum(k: u32, l: u32) -> BigRational {
    fn chain(top: u32, left: u32) -> BigInt {
        if left == 0 {
            return BigInt::one();
        }
        (1..=top).map(|i| BigInt::from(i) * chain(i, left - 1)).sum()
    }
    let s = chain(k, l);
    BigRational::from_integer(if l.is_multiple_of(2) { s } else { -s })
}

/// `A^(k)_l = (1/(k−1)!) Σ_{m=1}^{k} C(k−1, m−1) (−1)^{k+l−m} m^{k+l−1}`.
pub fn a_coeff_closed(k: u32, l: u32) -> BigRational {
    assert!(k >= 1, "A^(k)_l needs k >= 1");
    let mut s = BigInt::zero();
    for m in 1..=k {
        let t = binomial(k - 1, m - 1) * BigInt::from(m).pow(k + l - 1);
        if (k + l - m).is_multiple_of(2) {
            s += t;
        } else {
            s -= t;
        }
    }
    BigRational::new(s, factorial(k - 1))
}

/// `B^(k)_l = a^{k+l} · (T_l u^{−k})|_{u=a}` with `a = −2μ` and `T_l` the sum
/// of `P`/`R` words of weight `l` for `J = ¼u² − μ²` under the unit Wick
/// normalisation.
pub fn b_coeff(k: u32, l: u32, mu: &BigRational) -> Result<GaussianRational> {
    b_coeff_with(k, l, mu, RVariant::Derived)
}

pub fn b_coeff_with(k: u32, l: u32, mu: &BigRational, variant: RVariant) -> Result<GaussianRational> {
    let setup = RadialSetup::quadratic(0, mu.clone())?.with_normalization(WickNormalization::Unit);
    let a = setup.sphere_value();
    let f = RadialFun::radial(1, RadialRational::u_pow(-(k as i64)));
    let t = pr_t_word_sum(&setup, l as usize, variant)?.apply(&f)?;
    let r = setup.restrict(&t)?;
    let v = r.as_radial().and_then(|r| r.as_constant()).ok_or_else(|| Error::Precondition("T_l u^-k is not radial".into()))?;
    Ok(&a.pow(k + l) * &v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoeffKind {
    A,
    B,
}

/// A table of `A^(k)_l` or `B^(k)_l` values.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffTable {
    pub kind: CoeffKind,
    pub mu: Option<BigRational>,
    pub entries: BTreeMap<(u32, u32), GaussianRational>,
}

fn cell(kind: CoeffKind, k: u32, l: u32, mu: &BigRational) -> Result<GaussianRational> {
    match kind {
        CoeffKind::A => Ok(GaussianRational::real(a_coeff_sum(k, l))),
        CoeffKind::B => b_coeff(k, l, mu),
    }
}

fn build(kind: CoeffKind, cells: Vec<(u32, u32)>, mu: &BigRational) -> Result<CoeffTable> {
    let values = cells.par_iter().map(|&(k, l)| cell(kind, k, l, mu)).collect::<Result<Vec<_>>>()?;
    Ok(CoeffTable {
        kind,
        mu: (kind == CoeffKind::B).then(|| mu.clone()),
        entries: cells.into_iter().zip(values).collect(),
    })
}

/// Cells `1 ≤ k ≤ kmax`, `0 ≤ l < lmax`.
pub fn coeff_table_rect(kind: CoeffKind, kmax: u32, lmax: u32, mu: &BigRational) -> Result<CoeffTable> {
    let cells = (1..=kmax).flat_map(|k| (0..lmax).map(move |l| (k, l))).collect();
    build(kind, cells, mu)
}

/// Cells `k ≥ 1`, `l ≥ 0`, `k + l ≤ total`.
pub fn coeff_table_triangle(kind: CoeffKind, total: u32, mu: &BigRational) -> Result<CoeffTable> {
    let cells = (1..=total).flat_map(|k| (0..=total - k).map(move |l| (k, l))).collect();
    build(kind, cells, mu)
}

pub fn default_total(kind: CoeffKind) -> u32 {
    match kind {
        CoeffKind::A => 10,
        CoeffKind::B => 5,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn a_spot_values() {
        for k in 1..=6 {
            assert!(a_coeff_sum(k, 0).is_one());
            assert_eq!(a_coeff_sum(k, 1), q(-(k as i64) * (k as i64 + 1), 2));
        }
        for l in 0..=6 {
            assert_eq!(a_coeff_sum(1, l), q(if l % 2 == 0 { 1 } else { -1 }, 1));
        }
        assert_eq!(a_coeff_sum(2, 1), q(-3, 1));
        assert_eq!(a_coeff_closed(2, 1), q(-3, 1));
    }

    #[test]
    fn a_forms_agree() {
        for k in 1..=8 {
            for l in 0..=8 {
                assert_eq!(a_coeff_sum(k, l), a_coeff_closed(k, l), "({k},{l})");
            }
        }
    }

    #[test]
    fn b_low_values() {
        for mu in [q(-1, 2), q(-3, 2)] {
            for k in 0..=3 {
                assert!(b_coeff(k, 0, &mu).unwrap().is_one());
            }
            assert_eq!(b_coeff(1, 1, &mu).unwrap(), GaussianRational::from_ratio(-3, 2));
        }
    }

    #[test]
    fn tables_have_requested_shape() {
        let t = coeff_table_rect(CoeffKind::A, 4, 4, &q(-1, 2)).unwrap();
        assert_eq!(t.entries.len(), 16);
        let t = coeff_table_triangle(CoeffKind::B, 3, &q(-1, 2)).unwrap();
        assert_eq!(t.entries.len(), 6);
        assert!(t.mu.is_some());
    }
}
