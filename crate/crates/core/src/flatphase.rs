//! Polynomials on ℝ²ⁿ with coordinates `(q¹..qⁿ; p₁..pₙ)`, the Moyal
//! product, and the flat constraint `J = pₙ`.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;

use crate::combinat::{compositions, falling, inv_multi_factorial};
use crate::error::{Error, Result};
use crate::reduction::PhaseSetup;
use crate::scalar::{Coefficient, GaussianRational, LambdaSeries};

/// A coordinate of ℝ²ⁿ, 1-based like the usual notation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlatCoord {
    Q(usize),
    P(usize),
}

impl FlatCoord {
    fn slot(self, dim: usize) -> usize {
        match self {
            FlatCoord::Q(i) => i - 1,
            FlatCoord::P(i) => dim + i - 1,
        }
    }
}

/// Polynomial in `q¹..qⁿ, p₁..pₙ`. Exponent vectors have length `2n`,
/// `q` exponents first. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FlatPoly {
    dim: usize,
    terms: BTreeMap<Vec<u32>, GaussianRational>,
}

impl FlatPoly {
    pub fn zero(dim: usize) -> Self {
        FlatPoly { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: GaussianRational) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(vec![0; 2 * dim], c);
        p
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, GaussianRational::one())
    }

    pub fn var(dim: usize, v: FlatCoord) -> Self {
        let mut e = vec![0; 2 * dim];
        e[v.slot(dim)] = 1;
        Self::monomial(e, GaussianRational::one())
    }

    pub fn q(dim: usize, i: usize) -> Self {
        Self::var(dim, FlatCoord::Q(i))
    }

    pub fn p(dim: usize, i: usize) -> Self {
        Self::var(dim, FlatCoord::P(i))
    }

    /// Panics if `exps.len()` is odd.
    pub fn monomial(exps: Vec<u32>, c: GaussianRational) -> Self {
        assert!(exps.len().is_multiple_of(2), "exponent vector must have even length");
        let mut p = Self::zero(exps.len() / 2);
        p.add_term(exps, c);
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, exps: Vec<u32>, c: GaussianRational) {
        debug_assert_eq!(exps.len(), 2 * self.dim);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_dim(&self, rhs: &Self) -> Result<()> {
        if self.dim == rhs.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { left: self.dim, right: rhs.dim })
        }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_dim(rhs)?;
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.add(&rhs.scale(&GaussianRational::from_int(-1)))
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        FlatPoly { dim: self.dim, terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect() }
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.check_dim(rhs)?;
        let mut out = Self::zero(self.dim);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.dim);
        for _ in 0..e {
            acc = acc.mul(self).expect("same dimension");
        }
        acc
    }

    /// Mixed partial derivative; `counts[s]` derivatives in slot `s`.
    pub fn partial_multi(&self, counts: &[u32]) -> Self {
        let mut out = Self::zero(self.dim);
        for (e, c) in &self.terms {
            if e.iter().zip(counts).any(|(a, k)| a < k) {
                continue;
            }
            let factor: u64 = e.iter().zip(counts).map(|(&a, &k)| falling(a, k)).product();
            let ne = e.iter().zip(counts).map(|(a, k)| a - k).collect();
            out.add_term(ne, c * &GaussianRational::from_int(factor as i64));
        }
        out
    }

    pub fn partial(&self, v: FlatCoord) -> Self {
        let mut counts = vec![0; 2 * self.dim];
        counts[v.slot(self.dim)] = 1;
        self.partial_multi(&counts)
    }

    /// `true` when no term involves the given coordinate.
    pub fn independent_of(&self, v: FlatCoord) -> bool {
        let s = v.slot(self.dim);
        self.terms.keys().all(|e| e[s] == 0)
    }

    /// Drops the last `(qⁿ, pₙ)` pair; terms that involve it are rejected.
    pub fn drop_last_pair(&self) -> Result<Self> {
        let n = self.dim;
        if n == 0 {
            return Err(Error::InvalidConfig("no coordinate pair to drop".into()));
        }
        let mut out = Self::zero(n - 1);
        for (e, c) in &self.terms {
            if e[n - 1] != 0 || e[2 * n - 1] != 0 {
                return Err(Error::Precondition(format!(
                    "term depends on q{n} or p{n}: {}",
                    Self::monomial(e.clone(), c.clone())
                )));
            }
            let mut ne = e[..n - 1].to_vec();
            ne.extend_from_slice(&e[n..2 * n - 1]);
            out.add_term(ne, c.clone());
        }
        Ok(out)
    }

    /// Embeds into one more dimension, not depending on the new pair.
    pub fn add_pair(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zero(n + 1);
        for (e, c) in &self.terms {
            let mut ne = e[..n].to_vec();
            ne.push(0);
            ne.extend_from_slice(&e[n..]);
            ne.push(0);
            out.add_term(ne, c.clone());
        }
        out
    }

    fn monomial_string(&self, e: &[u32]) -> String {
        let n = self.dim;
        let mut parts = Vec::new();
        for (s, &k) in e.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let name = if s < n { format!("q{}", s + 1) } else { format!("p{}", s - n + 1) };
            parts.push(if k == 1 { name } else { format!("{name}^{k}") });
        }
        parts.join("*")
    }

    /// Human form in the expression grammar; parses back to `self`.
    pub fn to_expr_string(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (e, c) in &self.terms {
            let neg = c.is_negative_real_or_imag();
            let mag = if neg { -c } else { c.clone() };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = self.monomial_string(e);
            if mono.is_empty() {
                out.push_str(&mag.to_factor_string());
            } else if mag.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{}*{}", mag.to_factor_string(), mono));
            }
        }
        out
    }
}

impl fmt::Display for FlatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_expr_string())
    }
}

impl fmt::Debug for FlatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FlatPoly[n={}]({})", self.dim, self)
    }
}

impl Coefficient for FlatPoly {
    fn zero_like(&self) -> Self {
        Self::zero(self.dim)
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn try_add(&self, rhs: &Self) -> Result<Self> {
        self.add(rhs)
    }
    fn try_mul(&self, rhs: &Self) -> Result<Self> {
        self.mul(rhs)
    }
    fn scale(&self, c: &GaussianRational) -> Self {
        FlatPoly::scale(self, c)
    }
}

/// `{f,g} = Σᵢ (∂f/∂qⁱ ∂g/∂pᵢ − ∂f/∂pᵢ ∂g/∂qⁱ)`.
pub fn poisson_flat(f: &FlatPoly, g: &FlatPoly) -> Result<FlatPoly> {
    f.check_dim(g)?;
    let mut out = FlatPoly::zero(f.dim);
    for i in 1..=f.dim {
        let a = f.partial(FlatCoord::Q(i)).mul(&g.partial(FlatCoord::P(i)))?;
        let b = f.partial(FlatCoord::P(i)).mul(&g.partial(FlatCoord::Q(i)))?;
        out = out.add(&a)?.sub(&b)?;
    }
    Ok(out)
}

/// The order-`r` Moyal bidifferential operator
/// `Mᵣ(f,g) = (1/r!)(i/2)ʳ Λ^{k₁l₁}…Λ^{kᵣlᵣ} ∂ᵏf ∂ˡg`
/// with `Λ` the Poisson tensor of `dqⁱ ∧ dpᵢ`.
pub fn moyal_kernel(r: usize, f: &FlatPoly, g: &FlatPoly) -> Result<FlatPoly> {
    f.check_dim(g)?;
    let n = f.dim;
    let mut out = FlatPoly::zero(n);
    if f.is_zero() || g.is_zero() {
        return Ok(out);
    }
    // Slots 0..n pair ∂_{qⁱ} on f with ∂_{pᵢ} on g (Λ = +1); slots n..2n
    // pair ∂_{pᵢ} on f with ∂_{qⁱ} on g (Λ = −1). The multinomial r!/m!
    // cancels the 1/r! prefactor.
    for m in compositions(2 * n, r as u32) {
        let mut df = vec![0u32; 2 * n];
        let mut dg = vec![0u32; 2 * n];
        let mut minus = 0u32;
        for i in 0..n {
            df[i] += m[i];
            dg[n + i] += m[i];
            df[n + i] += m[n + i];
            dg[i] += m[n + i];
            minus += m[n + i];
        }
        let fd = f.partial_multi(&df);
        if fd.is_zero() {
            continue;
        }
        let gd = g.partial_multi(&dg);
        if gd.is_zero() {
            continue;
        }
        let mut c = GaussianRational::real(inv_multi_factorial(&m));
        if minus % 2 == 1 {
            c = -c;
        }
        out = out.add(&fd.mul(&gd)?.scale(&c))?;
    }
    let half_i = GaussianRational::new(BigRational::from_integer(0.into()), BigRational::new(1.into(), 2.into()));
    Ok(out.scale(&half_i.pow(r as u32)))
}

/// `f ∗ g` through λᴺ.
pub fn moyal_product(f: &FlatPoly, g: &FlatPoly, order: usize) -> Result<LambdaSeries<FlatPoly>> {
    let coeffs = (0..=order).map(|r| moyal_kernel(r, f, g)).collect::<Result<Vec<_>>>()?;
    Ok(LambdaSeries::new(coeffs))
}

/// Substitutes `pₙ = 0`.
pub fn prol_flat(f: &FlatPoly) -> FlatPoly {
    let s = 2 * f.dim - 1;
    FlatPoly { dim: f.dim, terms: f.terms.iter().filter(|(e, _)| e[s] == 0).map(|(e, c)| (e.clone(), c.clone())).collect() }
}

/// The `h` with `f − prol(f) = h·pₙ`: every term carrying `pₙ` loses one power.
pub fn pij_flat(f: &FlatPoly) -> FlatPoly {
    let s = 2 * f.dim - 1;
    let mut out = FlatPoly::zero(f.dim);
    for (e, c) in &f.terms {
        if e[s] > 0 {
            let mut ne = e.clone();
            ne[s] -= 1;
            out.add_term(ne, c.clone());
        }
    }
    out
}

/// The flat constraint `J = pₙ` on ℝ²ⁿ, `n ≥ 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatConstraint {
    dim: usize,
}

impl FlatConstraint {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidConfig(format!("flat constraint needs n >= 2, got {dim}")));
        }
        Ok(FlatConstraint { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn j(&self) -> FlatPoly {
        FlatPoly::p(self.dim, self.dim)
    }
}

/// Moyal product on ℝ²ⁿ reduced by `J = pₙ`, prolongation `pₙ ↦ 0`.
#[derive(Clone, Debug)]
pub struct FlatSetup {
    constraint: FlatConstraint,
}

impl FlatSetup {
    pub fn new(dim: usize) -> Result<Self> {
        Ok(FlatSetup { constraint: FlatConstraint::new(dim)? })
    }

    pub fn dim(&self) -> usize {
        self.constraint.dim
    }

    fn check(&self, f: &FlatPoly) -> Result<()> {
        if f.dim == self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { left: self.dim(), right: f.dim })
        }
    }

    /// `K f = −M₁(π_J f, J)`, which for `J = pₙ` is `−(i/2) ∂_{qⁿ} π_J f`.
    pub fn k_operator(&self, f: &FlatPoly) -> Result<FlatPoly> {
        self.check(f)?;
        Ok(moyal_kernel(1, &pij_flat(f), &self.constraint.j())?.neg())
    }
}

impl PhaseSetup for FlatSetup {
    type Elem = FlatPoly;

    fn describe(&self) -> String {
        format!("flat Moyal, n = {}, J = p{}", self.dim(), self.dim())
    }

    fn one(&self) -> FlatPoly {
        FlatPoly::one(self.dim())
    }

    fn constraint(&self) -> FlatPoly {
        self.constraint.j()
    }

    fn star_kernel(&self, r: usize, f: &FlatPoly, g: &FlatPoly) -> Result<FlatPoly> {
        self.check(f)?;
        moyal_kernel(r, f, g)
    }

    fn prol(&self, f: &FlatPoly) -> Result<FlatPoly> {
        self.check(f)?;
        Ok(prol_flat(f))
    }

    fn pij(&self, f: &FlatPoly) -> Result<FlatPoly> {
        self.check(f)?;
        Ok(pij_flat(f))
    }

    fn restrict(&self, f: &FlatPoly) -> Result<FlatPoly> {
        self.check(f)?;
        Ok(prol_flat(f))
    }

    fn poisson(&self, f: &FlatPoly, g: &FlatPoly) -> Result<FlatPoly> {
        poisson_flat(f, g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(i: usize) -> FlatPoly {
        FlatPoly::q(2, i)
    }
    fn p(i: usize) -> FlatPoly {
        FlatPoly::p(2, i)
    }
    fn c(n: i64) -> GaussianRational {
        GaussianRational::from_int(n)
    }

    #[test]
    fn ring_examples() {
        let qp = q(1).mul(&p(1)).unwrap();
        assert_eq!(qp, FlatPoly::monomial(vec![1, 0, 1, 0], c(1)));
        assert_eq!(qp.mul(&FlatPoly::one(2)).unwrap(), qp);
        let s = q(1).add(&p(1)).unwrap().pow(2);
        let expect = q(1).pow(2).add(&qp.scale(&c(2))).unwrap().add(&p(1).pow(2)).unwrap();
        assert_eq!(s, expect);
        assert!(matches!(q(1).mul(&FlatPoly::q(3, 1)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn partial_examples() {
        assert_eq!(q(1).pow(2).partial(FlatCoord::Q(1)), q(1).scale(&c(2)));
        assert!(q(1).partial(FlatCoord::P(1)).is_zero());
        let f = q(1).mul(&p(2).pow(2)).unwrap();
        assert_eq!(f.partial(FlatCoord::P(2)), q(1).mul(&p(2)).unwrap().scale(&c(2)));
    }

    #[test]
    fn poisson_examples() {
        assert_eq!(poisson_flat(&q(1), &p(1)).unwrap(), FlatPoly::one(2));
        let f = q(1).mul(&p(1)).unwrap();
        assert!(poisson_flat(&f, &f).unwrap().is_zero());
        // {q¹p₁, q¹} = ∂_{q}(qp)∂_p q − ∂_p(qp)∂_q q = 0 − q¹
        assert_eq!(poisson_flat(&f, &q(1)).unwrap(), q(1).neg());
    }

    #[test]
    fn moyal_examples() {
        let s = moyal_product(&q(1), &p(1), 1).unwrap();
        assert_eq!(s.coeff(0), &q(1).mul(&p(1)).unwrap());
        let half_i = &GaussianRational::i() * &GaussianRational::from_ratio(1, 2);
        assert_eq!(s.coeff(1), &FlatPoly::constant(2, half_i));

        let f = q(1).pow(2).mul(&p(2)).unwrap().add(&p(1)).unwrap();
        let one = FlatPoly::one(2);
        let s = moyal_product(&f, &one, 4).unwrap();
        assert_eq!(s.coeff(0), &f);
        assert!(s.coeffs()[1..].iter().all(|x| x.is_zero()));
        let s = moyal_product(&one, &f, 4).unwrap();
        assert!(s.coeffs()[1..].iter().all(|x| x.is_zero()));
    }

    #[test]
    fn prol_and_pij_examples() {
        let n = 2;
        let pn = FlatPoly::p(n, n);
        assert!(prol_flat(&q(1).mul(&pn).unwrap()).is_zero());
        let qp = q(1).mul(&p(1)).unwrap();
        assert_eq!(prol_flat(&qp), qp);
        assert_eq!(pij_flat(&pn.pow(2)), pn);
        assert!(pij_flat(&qp).is_zero());
        let f = q(1).mul(&pn).unwrap().add(&p(1)).unwrap();
        assert_eq!(pij_flat(&f), q(1));
        assert_eq!(prol_flat(&prol_flat(&f)), prol_flat(&f));
    }

    #[test]
    fn drop_and_add_pair_round_trip() {
        let f = q(1).mul(&p(1)).unwrap().add(&q(1)).unwrap();
        let g = f.drop_last_pair().unwrap();
        assert_eq!(g.dim(), 1);
        assert_eq!(g.add_pair(), f);
        assert!(FlatPoly::q(2, 2).drop_last_pair().is_err());
    }

    #[test]
    fn flat_constraint_needs_two_pairs() {
        assert!(FlatConstraint::new(1).is_err());
        assert!(FlatConstraint::new(2).is_ok());
    }

    #[test]
    fn printing() {
        let f = q(1).pow(2).mul(&p(2)).unwrap().scale(&c(-3)).add(&FlatPoly::one(2)).unwrap();
        assert_eq!(f.to_string(), "1 - 3*q1^2*p2");
    }
}
