//! Functions on ℂⁿ⁺¹ of the form `Σ z^α z̄^β R(u)`, `u = Σ zⁱz̄ⁱ`, with the
//! Wick product, Euler operators, radial prolongation and division by the
//! radial constraints.
//!
//! # Normal form
//!
//! With `m = n+1` coordinates the relation `zᵐz̄ᵐ = u − Σ_{i<m} zⁱz̄ⁱ` is used
//! to remove every common power of the *last* pair: a stored key `(α, β)`
//! always has `min(αₘ, βₘ) = 0`. The monomials satisfying this form a basis
//! of ℂ[z, z̄] as a module over ℂ[u] (the relation has leading term `zᵐz̄ᵐ`
//! under an order that ranks the last coordinate highest), so the
//! representation is unique after localising at denominators in `u` and
//! structural equality decides equality of functions. For `n = 0` this is
//! the rewrite `z¹z̄¹ ↦ u`; for `n ≥ 1` products such as `z¹z̄¹` are kept
//! as monomials.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::combinat::inv_multi_factorial;
use crate::error::{Error, Result};
use crate::reduction::PhaseSetup;
use crate::scalar::{Coefficient, GaussianRational, LambdaSeries, RadialRational, UPoly};

pub type MonoKey = (Vec<u32>, Vec<u32>);

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RadialFun {
    coords: usize,
    terms: BTreeMap<MonoKey, RadialRational>,
}

fn unit(coords: usize, i: usize) -> Vec<u32> {
    let mut v = vec![0; coords];
    v[i] = 1;
    v
}

impl RadialFun {
    /// The zero function on ℂ^`coords`.
    pub fn zero(coords: usize) -> Self {
        assert!(coords >= 1, "need at least one complex coordinate");
        RadialFun { coords, terms: BTreeMap::new() }
    }

    pub fn radial(coords: usize, r: RadialRational) -> Self {
        let mut f = Self::zero(coords);
        f.add_term(vec![0; coords], vec![0; coords], r);
        f
    }

    pub fn constant(coords: usize, c: GaussianRational) -> Self {
        Self::radial(coords, RadialRational::constant(c))
    }

    pub fn one(coords: usize) -> Self {
        Self::constant(coords, GaussianRational::one())
    }

    /// `u = Σ zⁱz̄ⁱ` as a function.
    pub fn u(coords: usize) -> Self {
        Self::radial(coords, RadialRational::u_pow(1))
    }

    /// `z^α z̄^β R(u)`, canonicalised.
    pub fn term(alpha: Vec<u32>, beta: Vec<u32>, r: RadialRational) -> Self {
        assert_eq!(alpha.len(), beta.len(), "multi-index lengths differ");
        let mut f = Self::zero(alpha.len());
        f.add_term(alpha, beta, r);
        f
    }

    /// `zⁱ`, 1-based.
    pub fn z(coords: usize, i: usize) -> Self {
        Self::term(unit(coords, i - 1), vec![0; coords], RadialRational::one())
    }

    /// `z̄ⁱ`, 1-based.
    pub fn zbar(coords: usize, i: usize) -> Self {
        Self::term(vec![0; coords], unit(coords, i - 1), RadialRational::one())
    }

    pub fn coords(&self) -> usize {
        self.coords
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MonoKey, &RadialRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The radial part when the function depends on `u` only.
    pub fn as_radial(&self) -> Option<RadialRational> {
        if self.terms.is_empty() {
            return Some(RadialRational::zero());
        }
        if self.terms.len() != 1 {
            return None;
        }
        let ((a, b), r) = self.terms.iter().next().unwrap();
        (a.iter().chain(b).all(|&x| x == 0)).then(|| r.clone())
    }

    fn add_term(&mut self, alpha: Vec<u32>, beta: Vec<u32>, r: RadialRational) {
        if r.is_zero() {
            return;
        }
        let m = self.coords - 1;
        if alpha[m] > 0 && beta[m] > 0 {
            let mut a = alpha;
            let mut b = beta;
            a[m] -= 1;
            b[m] -= 1;
            for i in 0..m {
                let mut ai = a.clone();
                let mut bi = b.clone();
                ai[i] += 1;
                bi[i] += 1;
                self.add_term(ai, bi, r.neg());
            }
            self.add_term(a, b, r.mul_u_pow(1));
            return;
        }
        match self.terms.entry((alpha, beta)) {
            Entry::Vacant(v) => {
                v.insert(r);
            }
            Entry::Occupied(mut o) => {
                let s = o.get().add(&r);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check_dim(&self, rhs: &Self) -> Result<()> {
        if self.coords == rhs.coords {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { left: self.coords, right: rhs.coords })
        }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_dim(rhs)?;
        let (mut out, other) = if self.terms.len() >= rhs.terms.len() { (self.clone(), rhs) } else { (rhs.clone(), self) };
        for ((a, b), r) in &other.terms {
            out.add_term(a.clone(), b.clone(), r.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        RadialFun { coords: self.coords, terms: self.terms.iter().map(|(k, r)| (k.clone(), r.neg())).collect() }
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.coords);
        }
        RadialFun { coords: self.coords, terms: self.terms.iter().map(|(k, r)| (k.clone(), r.scale(c))).collect() }
    }

    /// Multiplication by a purely radial function.
    pub fn mul_radial(&self, s: &RadialRational) -> Self {
        if s.is_zero() {
            return Self::zero(self.coords);
        }
        RadialFun { coords: self.coords, terms: self.terms.iter().map(|(k, r)| (k.clone(), r.mul(s))).collect() }
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.check_dim(rhs)?;
        let mut out = Self::zero(self.coords);
        for ((a1, b1), r1) in &self.terms {
            for ((a2, b2), r2) in &rhs.terms {
                let a = a1.iter().zip(a2).map(|(x, y)| x + y).collect();
                let b = b1.iter().zip(b2).map(|(x, y)| x + y).collect();
                out.add_term(a, b, r1.mul(r2));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.coords);
        for _ in 0..e {
            acc = acc.mul(self).expect("same dimension");
        }
        acc
    }

    /// `∂/∂zⁱ` (`holomorphic`) or `∂/∂z̄ⁱ`, 1-based `i`.
    fn d(&self, i: usize, holomorphic: bool) -> Self {
        let i = i - 1;
        let mut out = Self::zero(self.coords);
        for ((a, b), r) in &self.terms {
            let (own, other) = if holomorphic { (a, b) } else { (b, a) };
            if own[i] > 0 {
                let mut o = own.clone();
                o[i] -= 1;
                let c = r.scale(&GaussianRational::from_int(own[i] as i64));
                if holomorphic {
                    out.add_term(o, other.clone(), c);
                } else {
                    out.add_term(other.clone(), o, c);
                }
            }
            let dr = r.derivative();
            if !dr.is_zero() {
                // ∂u/∂zⁱ = z̄ⁱ and ∂u/∂z̄ⁱ = zⁱ
                let mut o = other.clone();
                o[i] += 1;
                if holomorphic {
                    out.add_term(own.clone(), o, dr);
                } else {
                    out.add_term(o, own.clone(), dr);
                }
            }
        }
        out
    }

    pub fn d_z(&self, i: usize) -> Self {
        self.d(i, true)
    }

    pub fn d_zbar(&self, i: usize) -> Self {
        self.d(i, false)
    }

    fn euler(&self, holomorphic: bool) -> Self {
        let mut out = Self::zero(self.coords);
        for ((a, b), r) in &self.terms {
            let deg: u32 = if holomorphic { a.iter().sum() } else { b.iter().sum() };
            let part = r.scale(&GaussianRational::from_int(deg as i64)).add(&r.u_derivative());
            out.add_term(a.clone(), b.clone(), part);
        }
        out
    }

    /// `E = zᵏ ∂/∂zᵏ`.
    pub fn euler_e(&self) -> Self {
        self.euler(true)
    }

    /// `Ē = z̄ᵏ ∂/∂z̄ᵏ`.
    pub fn euler_ebar(&self) -> Self {
        self.euler(false)
    }

    /// `Ef = Ēf = 0`.
    pub fn is_homogeneous(&self) -> bool {
        self.euler_e().is_zero() && self.euler_ebar().is_zero()
    }

    /// Every term has even total degree `|α| + |β|`.
    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|(a, b)| (a.iter().sum::<u32>() + b.iter().sum::<u32>()) % 2 == 0)
    }

    /// All derivatives `∂^m f` with `|m| = r`, keyed by the count vector `m`;
    /// zero derivatives are omitted.
    pub fn derivative_table(&self, r: usize, holomorphic: bool) -> BTreeMap<Vec<u32>, RadialFun> {
        let mut level: BTreeMap<Vec<u32>, RadialFun> = BTreeMap::new();
        if self.is_zero() {
            return level;
        }
        level.insert(vec![0; self.coords], self.clone());
        for _ in 0..r {
            let mut next = BTreeMap::new();
            for (m, f) in &level {
                // extend multisets in non-decreasing index order so each appears once
                let start = m.iter().rposition(|&x| x > 0).unwrap_or(0);
                for i in start..self.coords {
                    let df = f.d(i + 1, holomorphic);
                    if df.is_zero() {
                        continue;
                    }
                    let mut mm = m.clone();
                    mm[i] += 1;
                    next.insert(mm, df);
                }
            }
            level = next;
            if level.is_empty() {
                break;
            }
        }
        level
    }

    /// Proportionality constant `c` with `self = c·rhs`, if one exists and
    /// `rhs ≠ 0`.
    pub fn ratio_to(&self, rhs: &Self) -> Option<GaussianRational> {
        let (k, r) = rhs.terms.iter().next()?;
        let c = match self.terms.get(k) {
            Some(l) => l.checked_div(r).ok()?.as_constant()?,
            None => GaussianRational::zero(),
        };
        self.sub(&rhs.scale(&c)).ok()?.is_zero().then_some(c)
    }

    fn monomial_string(&self, a: &[u32], b: &[u32]) -> String {
        let mut parts = Vec::new();
        for (i, &k) in a.iter().enumerate() {
            if k > 0 {
                parts.push(if k == 1 { format!("z{}", i + 1) } else { format!("z{}^{}", i + 1, k) });
            }
        }
        for (i, &k) in b.iter().enumerate() {
            if k > 0 {
                parts.push(if k == 1 { format!("zb{}", i + 1) } else { format!("zb{}^{}", i + 1, k) });
            }
        }
        parts.join("*")
    }

    /// Human form in the expression grammar; parses back to `self`.
    pub fn to_expr_string(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for ((a, b), r) in &self.terms {
            let mono = self.monomial_string(a, b);
            if let Some(c) = r.as_constant() {
                let neg = c.is_negative_real_or_imag();
                let mag = if neg { -c } else { c };
                if out.is_empty() {
                    if neg {
                        out.push('-');
                    }
                } else {
                    out.push_str(if neg { " - " } else { " + " });
                }
                if mono.is_empty() {
                    out.push_str(&mag.to_factor_string());
                } else if mag.is_one() {
                    out.push_str(&mono);
                } else {
                    out.push_str(&format!("{}*{}", mag.to_factor_string(), mono));
                }
                continue;
            }
            if !out.is_empty() {
                out.push_str(" + ");
            }
            let radial = if r.denom().is_one() {
                format!("({})", r.numer())
            } else {
                format!("({})/({})", r.numer(), r.denom())
            };
            if mono.is_empty() {
                out.push_str(&radial);
            } else {
                out.push_str(&format!("{mono}*{radial}"));
            }
        }
        out
    }
}

impl fmt::Display for RadialFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_expr_string())
    }
}

impl fmt::Debug for RadialFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RadialFun[{}]({})", self.coords, self)
    }
}

impl Coefficient for RadialFun {
    fn zero_like(&self) -> Self {
        Self::zero(self.coords)
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
        RadialFun::scale(self, c)
    }
}

/// Normalisation `c_r` of the Wick kernel `M_r = c_r Σ ∂ʳf/∂z… ∂ʳg/∂z̄…`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum WickNormalization {
    /// `c_r = 2ʳ/r!`: the normalisation for which `M₁(f,g) − M₁(g,f) = i{f,g}`
    /// with `ω = (i/2) dzⁱ∧dz̄ⁱ`. Used by the engine.
    #[default]
    Axiomatic,
    /// `c_r = 1/r!`: the normalisation in which `K = ½ E∘π_J` and the `A`,
    /// `B` coefficient formulas hold verbatim. Equals `Axiomatic` after
    /// `λ ↦ λ/2`.
    Unit,
}

impl WickNormalization {
    /// `c_r · r!`, the weight that multiplies `Σ_{|m|=r} (1/m!) ∂^m f ∂̄^m g`.
    fn base(self) -> i64 {
        match self {
            WickNormalization::Axiomatic => 2,
            WickNormalization::Unit => 1,
        }
    }

    /// `c_r`.
    pub fn coefficient(self, r: usize) -> GaussianRational {
        let num = BigInt::from(self.base()).pow(r as u32);
        GaussianRational::real(BigRational::new(num, crate::combinat::factorial(r as u32)))
    }
}

/// The order-`r` Wick bidifferential operator; the index sum runs over all
/// coordinates of ℂⁿ⁺¹.
pub fn wick_kernel(r: usize, f: &RadialFun, g: &RadialFun, norm: WickNormalization) -> Result<RadialFun> {
    f.check_dim(g)?;
    if r == 0 {
        return f.mul(g);
    }
    let mut out = RadialFun::zero(f.coords);
    let gt = g.derivative_table(r, false);
    if gt.is_empty() {
        return Ok(out);
    }
    let ft = f.derivative_table(r, true);
    let w = GaussianRational::from_int(norm.base()).pow(r as u32);
    for (m, df) in &ft {
        if let Some(dg) = gt.get(m) {
            let c = &w * &GaussianRational::real(inv_multi_factorial(m));
            out = out.add(&df.mul(dg)?.scale(&c))?;
        }
    }
    Ok(out)
}

/// `f ∗ g` through λᴺ (axiomatic normalisation).
pub fn wick_product(f: &RadialFun, g: &RadialFun, order: usize) -> Result<LambdaSeries<RadialFun>> {
    let coeffs = (0..=order)
        .map(|r| wick_kernel(r, f, g, WickNormalization::Axiomatic))
        .collect::<Result<Vec<_>>>()?;
    Ok(LambdaSeries::new(coeffs))
}

/// `{f,g} = −2i Σᵢ (∂_{zⁱ}f ∂_{z̄ⁱ}g − ∂_{zⁱ}g ∂_{z̄ⁱ}f)`.
pub fn poisson_radial(f: &RadialFun, g: &RadialFun) -> Result<RadialFun> {
    f.check_dim(g)?;
    let mut out = RadialFun::zero(f.coords);
    for i in 1..=f.coords {
        out = out.add(&f.d_z(i).mul(&g.d_zbar(i))?)?.sub(&g.d_z(i).mul(&f.d_zbar(i))?)?;
    }
    Ok(out.scale(&GaussianRational::new(BigRational::zero(), BigRational::from_integer((-2).into()))))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstraintKind {
    /// `J = −½u − μ`
    Linear,
    /// `J = ¼u² − μ²`
    Quadratic,
}

/// A radial constraint whose zero set is the sphere `u = −2μ`, `μ < 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadialConstraint {
    kind: ConstraintKind,
    mu: BigRational,
    j: RadialRational,
}

impl RadialConstraint {
    pub fn new(kind: ConstraintKind, mu: BigRational) -> Result<Self> {
        if !mu.is_negative() {
            return Err(Error::InvalidConfig(format!("mu must be negative, got {mu}")));
        }
        let m = GaussianRational::real(mu.clone());
        let j = match kind {
            ConstraintKind::Linear => RadialRational::from_poly(UPoly::from_coeffs(vec![-m, GaussianRational::from_ratio(-1, 2)])),
            ConstraintKind::Quadratic => RadialRational::from_poly(UPoly::from_coeffs(vec![
                -(&m * &m),
                GaussianRational::zero(),
                GaussianRational::from_ratio(1, 4),
            ])),
        };
        let c = RadialConstraint { kind, mu, j };
        let a = c.sphere_value();
        if !c.j.eval(&a)?.is_zero() || c.j.derivative().eval(&a)?.is_zero() {
            return Err(Error::InvalidConfig("u = -2mu is not a regular zero of J".into()));
        }
        Ok(c)
    }

    pub fn linear(mu: BigRational) -> Result<Self> {
        Self::new(ConstraintKind::Linear, mu)
    }

    pub fn quadratic(mu: BigRational) -> Result<Self> {
        Self::new(ConstraintKind::Quadratic, mu)
    }

    pub fn kind(&self) -> ConstraintKind {
        self.kind
    }

    pub fn mu(&self) -> &BigRational {
        &self.mu
    }

    /// `−2μ`, the value of `u` on the constraint sphere.
    pub fn sphere_value(&self) -> GaussianRational {
        GaussianRational::real(-(&self.mu + &self.mu))
    }

    /// `J` as a function of `u`.
    pub fn j_radial(&self) -> &RadialRational {
        &self.j
    }
}

fn term_string(a: &[u32], b: &[u32], r: &RadialRational) -> String {
    RadialFun::term(a.to_vec(), b.to_vec(), r.clone()).to_expr_string()
}

/// Evaluates every radial part at `u = −2μ`.
pub fn restrict_c(f: &RadialFun, c: &RadialConstraint) -> Result<RadialFun> {
    let a = c.sphere_value();
    let mut out = RadialFun::zero(f.coords);
    for ((al, be), r) in &f.terms {
        let v = r.eval(&a).map_err(|_| Error::PoleOnConstraint { term: term_string(al, be, r), at: a.to_string() })?;
        out.add_term(al.clone(), be.clone(), RadialRational::constant(v));
    }
    Ok(out)
}

/// `prol(f)(z) = f(√(−2μ/u) z)`:
/// `z^α z̄^β R(u) ↦ (−2μ)^{d/2} u^{−d/2} z^α z̄^β R(−2μ)`, `d = |α| + |β|`.
pub fn prol_radial(f: &RadialFun, c: &RadialConstraint) -> Result<RadialFun> {
    let a = c.sphere_value();
    let mut out = RadialFun::zero(f.coords);
    for ((al, be), r) in &f.terms {
        let d: u32 = al.iter().sum::<u32>() + be.iter().sum::<u32>();
        if d % 2 == 1 {
            return Err(Error::OddParity { term: term_string(al, be, r) });
        }
        let v = r.eval(&a).map_err(|_| Error::PoleOnConstraint { term: term_string(al, be, r), at: a.to_string() })?;
        let h = (d / 2) as i64;
        let part = RadialRational::u_pow(-h).scale(&(&a.pow(h as u32) * &v));
        out.add_term(al.clone(), be.clone(), part);
    }
    Ok(out)
}

/// `π_J(f)` with `f = prol(f) + π_J(f)·J`, computed per monomial by exact
/// rational division by `J(u)`.
pub fn pij_radial(f: &RadialFun, c: &RadialConstraint) -> Result<RadialFun> {
    let a = c.sphere_value();
    let p = prol_radial(f, c)?;
    let diff = f.sub(&p)?;
    let mut out = RadialFun::zero(f.coords);
    for ((al, be), r) in &diff.terms {
        let h = r.checked_div(c.j_radial())?;
        if h.has_pole_at(&a) {
            return Err(Error::ResidualPole { term: term_string(al, be, r), at: a.to_string() });
        }
        out.add_term(al.clone(), be.clone(), h);
    }
    Ok(out)
}

/// Wick product on ℂⁿ⁺¹ reduced by a radial constraint with radial
/// prolongation.
#[derive(Clone, Debug)]
pub struct RadialSetup {
    coords: usize,
    constraint: RadialConstraint,
    norm: WickNormalization,
}

impl RadialSetup {
    /// `n` is the dimension of the reduced space ℂPⁿ; the ambient space is ℂⁿ⁺¹.
    pub fn new(n: usize, constraint: RadialConstraint) -> Self {
        RadialSetup { coords: n + 1, constraint, norm: WickNormalization::Axiomatic }
    }

    pub fn with_normalization(mut self, norm: WickNormalization) -> Self {
        self.norm = norm;
        self
    }

    pub fn linear(n: usize, mu: BigRational) -> Result<Self> {
        Ok(Self::new(n, RadialConstraint::linear(mu)?))
    }

    pub fn quadratic(n: usize, mu: BigRational) -> Result<Self> {
        Ok(Self::new(n, RadialConstraint::quadratic(mu)?))
    }

    pub fn coords(&self) -> usize {
        self.coords
    }

    pub fn constraint_def(&self) -> &RadialConstraint {
        &self.constraint
    }

    pub fn normalization(&self) -> WickNormalization {
        self.norm
    }

    pub fn sphere_value(&self) -> GaussianRational {
        self.constraint.sphere_value()
    }

    fn check(&self, f: &RadialFun) -> Result<()> {
        if f.coords == self.coords {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { left: self.coords, right: f.coords })
        }
    }
}

impl PhaseSetup for RadialSetup {
    type Elem = RadialFun;

    fn describe(&self) -> String {
        let kind = match self.constraint.kind {
            ConstraintKind::Linear => "linear",
            ConstraintKind::Quadratic => "quadratic",
        };
        format!("radial {kind}, C^{}, mu = {}", self.coords, self.constraint.mu)
    }

    fn one(&self) -> RadialFun {
        RadialFun::one(self.coords)
    }

    fn constraint(&self) -> RadialFun {
        RadialFun::radial(self.coords, self.constraint.j.clone())
    }

    fn star_kernel(&self, r: usize, f: &RadialFun, g: &RadialFun) -> Result<RadialFun> {
        self.check(f)?;
        wick_kernel(r, f, g, self.norm)
    }

    fn prol(&self, f: &RadialFun) -> Result<RadialFun> {
        self.check(f)?;
        prol_radial(f, &self.constraint)
    }

    fn pij(&self, f: &RadialFun) -> Result<RadialFun> {
        self.check(f)?;
        pij_radial(f, &self.constraint)
    }

    fn restrict(&self, f: &RadialFun) -> Result<RadialFun> {
        self.check(f)?;
        restrict_c(f, &self.constraint)
    }

    fn poisson(&self, f: &RadialFun, g: &RadialFun) -> Result<RadialFun> {
        poisson_radial(f, g)
    }
}
