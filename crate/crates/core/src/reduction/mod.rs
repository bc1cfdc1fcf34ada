//! Constraint reduction of a star product by a single constraint `J`:
//! the operator series `T`, the deformed decomposition, membership tests for
//! `I*` and `B*`, and the reduced product `f ⋆ g = S⁻¹(prol(T(Sf ∗ Sg)))`.
//!
//! Everything here is generic over [`PhaseSetup`], which bundles a function
//! algebra with its star product kernels, constraint, prolongation, `π_J` and
//! restriction to the constraint surface.

mod operator;

pub use operator::{operator_series_invert, LinearOp, MapFn, OperatorSeries};

use crate::error::{Error, Result};
use crate::scalar::{Coefficient, GaussianRational, LambdaSeries};

/// A phase space with star product and codimension-one constraint.
pub trait PhaseSetup: Clone + Send + Sync + 'static {
    type Elem: Coefficient;

    fn describe(&self) -> String;
    fn one(&self) -> Self::Elem;
    /// The constraint function `J`.
    fn constraint(&self) -> Self::Elem;
    /// The bidifferential operator `M_r` of the star product.
    fn star_kernel(&self, r: usize, f: &Self::Elem, g: &Self::Elem) -> Result<Self::Elem>;
    fn prol(&self, f: &Self::Elem) -> Result<Self::Elem>;
    /// The coefficient `h` in `f = prol(f) + h·J`.
    fn pij(&self, f: &Self::Elem) -> Result<Self::Elem>;
    /// Restriction to the constraint surface, in a form where `0` decides
    /// vanishing on it.
    fn restrict(&self, f: &Self::Elem) -> Result<Self::Elem>;
    fn poisson(&self, f: &Self::Elem, g: &Self::Elem) -> Result<Self::Elem>;
}

/// `f ∗ g = Σ λʳ M_r(f,g)` for plain functions, through λᴺ.
pub fn star_product<S: PhaseSetup>(setup: &S, f: &S::Elem, g: &S::Elem, order: usize) -> Result<LambdaSeries<S::Elem>> {
    let coeffs = (0..=order).map(|r| setup.star_kernel(r, f, g)).collect::<Result<Vec<_>>>()?;
    Ok(LambdaSeries::new(coeffs))
}

/// Star product of two series, `(f ∗ g)ₙ = Σ_{a+b+r=n} M_r(f_a, g_b)`.
pub fn star_series<S: PhaseSetup>(setup: &S, f: &LambdaSeries<S::Elem>, g: &LambdaSeries<S::Elem>) -> Result<LambdaSeries<S::Elem>> {
    let n = f.order().min(g.order());
    let mut out = vec![f.coeff(0).zero_like(); n + 1];
    for a in 0..=n {
        let fa = f.coeff(a);
        if fa.is_zero() {
            continue;
        }
        for b in 0..=(n - a) {
            let gb = g.coeff(b);
            if gb.is_zero() {
                continue;
            }
            for r in 0..=(n - a - b) {
                let m = setup.star_kernel(r, fa, gb)?;
                if !m.is_zero() {
                    out[a + b + r] = out[a + b + r].try_add(&m)?;
                }
            }
        }
    }
    Ok(LambdaSeries::new(out))
}

/// `T₀ f, …, T_N f` for a single function via the recursion
/// `T_n(f) = −Σ_{k=1}^{n} T_{n−k}(M_k(π_J(f), J))`.
pub fn t_function<S: PhaseSetup>(setup: &S, f: &S::Elem, order: usize) -> Result<Vec<S::Elem>> {
    let mut out = vec![f.zero_like(); order + 1];
    out[0] = f.clone();
    if order == 0 || f.is_zero() {
        return Ok(out);
    }
    let h = setup.pij(f)?;
    if h.is_zero() {
        return Ok(out);
    }
    let j = setup.constraint();
    for k in 1..=order {
        let g = setup.star_kernel(k, &h, &j)?;
        if g.is_zero() {
            continue;
        }
        let sub = t_function(setup, &g, order - k)?;
        for (m, s) in sub.iter().enumerate() {
            if !s.is_zero() {
                out[k + m] = out[k + m].try_sub(s)?;
            }
        }
    }
    Ok(out)
}

/// `T` applied λ-linearly to a series: `(Tf)ₙ = Σ_{a+b=n} T_b(f_a)`.
pub fn t_apply<S: PhaseSetup>(setup: &S, f: &LambdaSeries<S::Elem>, order: usize) -> Result<LambdaSeries<S::Elem>> {
    let n = order.min(f.order());
    let mut out = vec![f.coeff(0).zero_like(); n + 1];
    for a in 0..=n {
        let fa = f.coeff(a);
        if fa.is_zero() {
            continue;
        }
        for (b, t) in t_function(setup, fa, n - a)?.into_iter().enumerate() {
            if !t.is_zero() {
                out[a + b] = out[a + b].try_add(&t)?;
            }
        }
    }
    Ok(LambdaSeries::new(out))
}

/// The kernel operator `f ↦ −M_k(π_J(f), J)` as a linear map.
pub fn constraint_kernel_op<S: PhaseSetup>(setup: &S, k: usize) -> LinearOp<S::Elem> {
    let s = setup.clone();
    LinearOp::map(format!("K{k}"), move |f: &S::Elem| {
        let h = s.pij(f)?;
        if h.is_zero() {
            return Ok(f.zero_like());
        }
        Ok(s.star_kernel(k, &h, &s.constraint())?.neg())
    })
}

/// `T` as an operator series: `T_n = Σ_{k=1}^{n} T_{n−k} ∘ K_k` with
/// `K_k = −M_k(π_J ·, J)`.
pub fn t_operator_series<S: PhaseSetup>(setup: &S, order: usize) -> OperatorSeries<S::Elem> {
    let kernels: Vec<LinearOp<S::Elem>> = (0..=order).map(|k| constraint_kernel_op(setup, k)).collect();
    let mut ops: Vec<LinearOp<S::Elem>> = vec![LinearOp::Identity];
    for n in 1..=order {
        let terms = (1..=n).map(|k| ops[n - k].compose(&kernels[k])).collect();
        ops.push(LinearOp::sum(terms));
    }
    OperatorSeries::new(ops)
}

/// Two λ-series over the same coefficient type.
pub type SeriesPair<E> = (LambdaSeries<E>, LambdaSeries<E>);

/// The deformed decomposition `f = prol(Tf) + π_J(Tf) ∗ J`; returns the two
/// series `(prol(Tf), π_J(Tf))`.
pub fn decompose_deformed<S: PhaseSetup>(
    setup: &S,
    f: &LambdaSeries<S::Elem>,
    order: usize,
) -> Result<SeriesPair<S::Elem>> {
    let tf = t_apply(setup, f, order)?;
    Ok((tf.map(|x| setup.prol(x))?, tf.map(|x| setup.pij(x))?))
}

/// `pure + coeff ∗ J`, the inverse of [`decompose_deformed`].
pub fn recompose_deformed<S: PhaseSetup>(
    setup: &S,
    pure: &LambdaSeries<S::Elem>,
    coeff: &LambdaSeries<S::Elem>,
) -> Result<LambdaSeries<S::Elem>> {
    let j = LambdaSeries::constant(setup.constraint(), coeff.order());
    pure.try_add(&star_series(setup, coeff, &j)?)
}

/// `f ∈ I*` up to λᴺ: `T f` vanishes on the constraint surface at every order.
pub fn in_istar<S: PhaseSetup>(setup: &S, f: &LambdaSeries<S::Elem>, order: usize) -> Result<bool> {
    let tf = t_apply(setup, f, order)?;
    for c in tf.coeffs() {
        if !setup.restrict(c)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `f ∈ B*` up to λᴺ: `J ∗ f ∈ I*`.
pub fn in_bstar<S: PhaseSetup>(setup: &S, f: &LambdaSeries<S::Elem>, order: usize) -> Result<bool> {
    let n = order.min(f.order());
    let j = LambdaSeries::constant(setup.constraint(), n);
    let jf = star_series(setup, &j, &f.truncate(n))?;
    in_istar(setup, &jf, n)
}

/// Every coefficient is a pure prolongation whose bracket with `J` vanishes
/// on the constraint surface.
pub fn is_in_b_cap_f<S: PhaseSetup>(setup: &S, f: &LambdaSeries<S::Elem>) -> Result<bool> {
    let j = setup.constraint();
    for c in f.coeffs() {
        if &setup.prol(c)? != c {
            return Ok(false);
        }
        if !setup.restrict(&setup.poisson(&j, c)?)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// How `S : B ∩ F → B* ∩ F` is supplied.
#[derive(Clone)]
pub enum SStrategy<E> {
    Identity,
    ClosedForm(OperatorSeries<E>),
}

impl<E: Coefficient> std::fmt::Debug for SStrategy<E> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SStrategy::Identity => f.write_str("Identity"),
            SStrategy::ClosedForm(s) => f.debug_tuple("ClosedForm").field(s).finish(),
        }
    }
}

impl<E: Coefficient> SStrategy<E> {
    pub fn apply(&self, f: &LambdaSeries<E>) -> Result<LambdaSeries<E>> {
        match self {
            SStrategy::Identity => Ok(f.clone()),
            SStrategy::ClosedForm(s) => s.apply_series(f),
        }
    }

    pub fn inverse(&self) -> Result<SStrategy<E>> {
        match self {
            SStrategy::Identity => Ok(SStrategy::Identity),
            SStrategy::ClosedForm(s) => Ok(SStrategy::ClosedForm(s.invert()?)),
        }
    }

    fn check(&self) -> Result<()> {
        match self {
            SStrategy::ClosedForm(s) if !s.op(0).is_identity() => Err(Error::NonIdentityLeading),
            _ => Ok(()),
        }
    }
}

/// `S = Id − λK` with `K = −M₁(π_J ·, J)`.
pub fn s_identity_minus_lambda_k<S: PhaseSetup>(setup: &S, order: usize) -> SStrategy<S::Elem> {
    SStrategy::ClosedForm(OperatorSeries::identity_plus_lambda(constraint_kernel_op(setup, 1).neg(), order))
}

/// Checks a posteriori that `S f` is order-wise a pure prolongation and lies
/// in `B*` through λᴺ.
pub fn verify_s<S: PhaseSetup>(setup: &S, s: &SStrategy<S::Elem>, f: &LambdaSeries<S::Elem>, order: usize) -> Result<bool> {
    s.check()?;
    let sf = s.apply(&f.truncate(order))?;
    for c in sf.coeffs() {
        if &setup.prol(c)? != c {
            return Ok(false);
        }
    }
    in_bstar(setup, &sf, order)
}

/// The reduced product `f ⋆ g = S⁻¹(prol(T(Sf ∗ Sg)))` through
/// `min(N, ord f, ord g)`. Inputs must lie in `B ∩ F` and pass
/// [`verify_s`].
pub fn reduce_star<S: PhaseSetup>(
    setup: &S,
    s: &SStrategy<S::Elem>,
    f: &LambdaSeries<S::Elem>,
    g: &LambdaSeries<S::Elem>,
    order: usize,
) -> Result<LambdaSeries<S::Elem>> {
    let n = order.min(f.order()).min(g.order());
    let f = f.truncate(n);
    let g = g.truncate(n);
    for (name, x) in [("f", &f), ("g", &g)] {
        if !is_in_b_cap_f(setup, x)? {
            return Err(Error::Precondition(format!("{name} is not in B ∩ F ({})", setup.describe())));
        }
        if !verify_s(setup, s, x, n)? {
            return Err(Error::Precondition(format!("S{name} is not in B* ∩ F ({})", setup.describe())));
        }
    }
    reduce_star_unchecked(setup, s, &f, &g, n)
}

/// [`reduce_star`] without the membership preconditions.
pub fn reduce_star_unchecked<S: PhaseSetup>(
    setup: &S,
    s: &SStrategy<S::Elem>,
    f: &LambdaSeries<S::Elem>,
    g: &LambdaSeries<S::Elem>,
    order: usize,
) -> Result<LambdaSeries<S::Elem>> {
    let n = order.min(f.order()).min(g.order());
    let sf = s.apply(&f.truncate(n))?;
    let sg = s.apply(&g.truncate(n))?;
    let prod = star_series(setup, &sf, &sg)?;
    let reduced = t_apply(setup, &prod, n)?.map(|x| setup.prol(x))?;
    s.inverse()?.apply(&reduced)
}

/// `(f ⋆ g − g ⋆ f)₁`, compared against `i·prol({f,g})` by callers.
pub fn order_one_commutator<S: PhaseSetup>(
    setup: &S,
    s: &SStrategy<S::Elem>,
    f: &S::Elem,
    g: &S::Elem,
) -> Result<S::Elem> {
    let fs = LambdaSeries::constant(f.clone(), 1);
    let gs = LambdaSeries::constant(g.clone(), 1);
    let fg = reduce_star(setup, s, &fs, &gs, 1)?;
    let gf = reduce_star(setup, s, &gs, &fs, 1)?;
    fg.coeff(1).try_sub(gf.coeff(1))
}

/// `i · prol({f,g})`, the reduced bracket scaled as in the star product axioms.
pub fn reduced_bracket_times_i<S: PhaseSetup>(setup: &S, f: &S::Elem, g: &S::Elem) -> Result<S::Elem> {
    Ok(setup.prol(&setup.poisson(f, g)?)?.scale(&GaussianRational::i()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flatphase::{FlatPoly, FlatSetup};
    use crate::radialphase::{RadialFun, RadialSetup};
    use crate::scalar::RadialRational;
    use num_rational::BigRational;

    fn half() -> BigRational {
        BigRational::new((-1).into(), 2.into())
    }

    #[test]
    fn t_fixes_prolongations_and_j() {
        let setup = RadialSetup::linear(1, half()).unwrap();
        let f = RadialFun::term(vec![1, 0], vec![0, 1], RadialRational::u_pow(-1));
        let tf = t_function(&setup, &f, 4).unwrap();
        assert_eq!(tf[0], f);
        assert!(tf[1..].iter().all(Coefficient::is_zero));
        let j = setup.constraint();
        let tj = t_function(&setup, &j, 4).unwrap();
        assert_eq!(tj[0], j);
        assert!(tj[1..].iter().all(Coefficient::is_zero));
    }

    #[test]
    fn operator_series_matches_function_recursion() {
        let setup = RadialSetup::quadratic(1, half()).unwrap();
        let f = RadialFun::term(vec![2, 0], vec![0, 0], RadialRational::one())
            .add(&RadialFun::radial(2, RadialRational::u_pow(2)))
            .unwrap();
        let direct = t_function(&setup, &f, 3).unwrap();
        let ops = t_operator_series(&setup, 3);
        for (n, d) in direct.iter().enumerate() {
            assert_eq!(&ops.op(n).apply(&f).unwrap(), d, "order {n}");
        }
    }

    #[test]
    fn t_inverse_round_trip_flat() {
        let setup = FlatSetup::new(2).unwrap();
        let f = FlatPoly::q(2, 2).mul(&FlatPoly::p(2, 2).pow(3)).unwrap();
        let fs = LambdaSeries::constant(f, 3);
        let t = t_operator_series(&setup, 3);
        let back = t.invert().unwrap().apply_series(&t.apply_series(&fs).unwrap()).unwrap();
        assert_eq!(back, fs);
    }

    #[test]
    fn reduce_star_rejects_non_members() {
        let setup = RadialSetup::linear(1, half()).unwrap();
        let j = LambdaSeries::constant(setup.constraint(), 2);
        let one = LambdaSeries::constant(setup.one(), 2);
        let err = reduce_star(&setup, &SStrategy::Identity, &j, &one, 2).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn membership_basics() {
        let setup = RadialSetup::linear(1, half()).unwrap();
        let j = LambdaSeries::constant(setup.constraint(), 3);
        assert!(in_istar(&setup, &j, 3).unwrap());
        assert!(in_bstar(&setup, &j, 3).unwrap());
        let c = LambdaSeries::constant(RadialFun::constant(2, GaussianRational::from_int(7)), 3);
        assert!(in_bstar(&setup, &c, 3).unwrap());
        assert!(!in_istar(&setup, &c, 3).unwrap());
        assert!(!is_in_b_cap_f(&setup, &j).unwrap());
    }
}
