//! `T` for `J = ¼u² − μ²` written as words in two operators: only `M₁` and
//! `M₂` see `J`, giving `P = −M₁(π_J ·, J) = −(c₁/2) u E π_J` and
//! `R = −M₂(π_J ·, J) = −(c₂/2)(E² − E) π_J`, and `T_n` is the sum of all
//! words of weight `n` where `P` weighs 1 and `R` weighs 2.

use crate::error::{Error, Result};
use crate::radialphase::{ConstraintKind, RadialFun, RadialSetup};
use crate::reduction::{LinearOp, OperatorSeries, PhaseSetup};
use crate::scalar::{GaussianRational, RadialRational};

/// Which second-order letter to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RVariant {
    /// `R = −(c₂/2)(E² − E)π_J`, read off from `M₂(h, J)`.
    #[default]
    Derived,
    /// `R = −(c₂/2) E² π_J`, the form without the first-order Euler term.
    Printed,
}

fn check_quadratic(setup: &RadialSetup) -> Result<()> {
    if setup.constraint_def().kind() == ConstraintKind::Quadratic {
        Ok(())
    } else {
        Err(Error::Precondition("P/R words need the quadratic constraint".into()))
    }
}

/// The letters `P` and `R` for the given setup.
pub fn pr_operators(setup: &RadialSetup, variant: RVariant) -> Result<(LinearOp<RadialFun>, LinearOp<RadialFun>)> {
    check_quadratic(setup)?;
    let norm = setup.normalization();
    let half = GaussianRational::from_ratio(-1, 2);
    let cp = &norm.coefficient(1) * &half;
    let cr = &norm.coefficient(2) * &half;
    let s = setup.clone();
    let p = LinearOp::map("P", move |f: &RadialFun| {
        let h = s.pij(f)?;
        Ok(h.euler_e().mul_radial(&RadialRational::u_pow(1)).scale(&cp))
    });
    let s = setup.clone();
    let r = LinearOp::map("R", move |f: &RadialFun| {
        let h = s.pij(f)?;
        let eh = h.euler_e();
        let mut out = eh.euler_e();
        if variant == RVariant::Derived {
            out = out.sub(&eh)?;
        }
        Ok(out.scale(&cr))
    });
    Ok((p, r))
}

/// All words over `{P, R}` of weight `n`, as letter sequences (`false` = P).
pub fn words_of_weight(n: usize) -> Vec<Vec<bool>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for mut w in words_of_weight(n - 1) {
        w.insert(0, false);
        out.push(w);
    }
    if n >= 2 {
        for mut w in words_of_weight(n - 2) {
            w.insert(0, true);
            out.push(w);
        }
    }
    out
}

/// `T_n` as the sum of its weight-`n` words.
pub fn pr_t_word_sum(setup: &RadialSetup, n: usize, variant: RVariant) -> Result<LinearOp<RadialFun>> {
    let (p, r) = pr_operators(setup, variant)?;
    if n == 0 {
        return Ok(LinearOp::Identity);
    }
    let terms = words_of_weight(n)
        .into_iter()
        .map(|w| w.iter().fold(LinearOp::Identity, |acc, &is_r| acc.compose(if is_r { &r } else { &p })))
        .collect();
    Ok(LinearOp::sum(terms))
}

/// `T = Σ λⁿ T_n` from words, through λᴺ.
pub fn pr_t_series(setup: &RadialSetup, order: usize, variant: RVariant) -> Result<OperatorSeries<RadialFun>> {
    let ops = (0..=order).map(|n| pr_t_word_sum(setup, n, variant)).collect::<Result<Vec<_>>>()?;
    Ok(OperatorSeries::new(ops))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_counts_are_fibonacci() {
        let counts: Vec<usize> = (0..7).map(|n| words_of_weight(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 3, 5, 8, 13]);
    }

    #[test]
    fn labels() {
        let s = RadialSetup::quadratic(1, num_rational::BigRational::new((-1).into(), 2.into())).unwrap();
        assert_eq!(pr_t_word_sum(&s, 2, RVariant::Derived).unwrap().label(), "P∘P + R");
        assert!(pr_t_word_sum(&RadialSetup::linear(1, num_rational::BigRational::new((-1).into(), 2.into())).unwrap(), 1, RVariant::Derived).is_err());
    }
}
