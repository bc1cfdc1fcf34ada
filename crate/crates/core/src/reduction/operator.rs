use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{Coefficient, GaussianRational, LambdaSeries};

pub type MapFn<E> = Arc<dyn Fn(&E) -> Result<E> + Send + Sync>;

/// A linear map on a function algebra, kept as an expression tree so that
/// leading identities can be recognised and compositions printed.
#[derive(Clone)]
pub enum LinearOp<E> {
    Identity,
    Zero,
    Map { label: String, f: MapFn<E> },
    /// `ops[0] ∘ ops[1] ∘ …`, so the last entry acts first.
    Compose(Vec<LinearOp<E>>),
    Sum(Vec<LinearOp<E>>),
    Scale(GaussianRational, Box<LinearOp<E>>),
}

impl<E: Coefficient> LinearOp<E> {
    pub fn map(label: impl Into<String>, f: impl Fn(&E) -> Result<E> + Send + Sync + 'static) -> Self {
        LinearOp::Map { label: label.into(), f: Arc::new(f) }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, LinearOp::Identity)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, LinearOp::Zero)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &LinearOp<E>) -> LinearOp<E> {
        if let LinearOp::Scale(c, a) = self {
            return a.compose(inner).scaled(c.clone());
        }
        if let LinearOp::Scale(c, b) = inner {
            return self.compose(b).scaled(c.clone());
        }
        match (self, inner) {
            (LinearOp::Zero, _) | (_, LinearOp::Zero) => LinearOp::Zero,
            (LinearOp::Identity, x) | (x, LinearOp::Identity) => x.clone(),
            (LinearOp::Compose(a), LinearOp::Compose(b)) => LinearOp::Compose(a.iter().chain(b).cloned().collect()),
            (LinearOp::Compose(a), x) => {
                let mut v = a.clone();
                v.push(x.clone());
                LinearOp::Compose(v)
            }
            (x, LinearOp::Compose(b)) => {
                let mut v = vec![x.clone()];
                v.extend(b.iter().cloned());
                LinearOp::Compose(v)
            }
            (x, y) => LinearOp::Compose(vec![x.clone(), y.clone()]),
        }
    }

    pub fn sum(ops: Vec<LinearOp<E>>) -> LinearOp<E> {
        let mut v: Vec<LinearOp<E>> = Vec::new();
        for op in ops {
            match op {
                LinearOp::Zero => {}
                LinearOp::Sum(inner) => v.extend(inner),
                other => v.push(other),
            }
        }
        match v.len() {
            0 => LinearOp::Zero,
            1 => v.pop().unwrap(),
            _ => LinearOp::Sum(v),
        }
    }

    pub fn scaled(&self, c: GaussianRational) -> LinearOp<E> {
        if c.is_zero() || self.is_zero() {
            return LinearOp::Zero;
        }
        if c.is_one() {
            return self.clone();
        }
        match self {
            LinearOp::Scale(d, inner) => inner.scaled(&c * d),
            other => LinearOp::Scale(c, Box::new(other.clone())),
        }
    }

    pub fn neg(&self) -> LinearOp<E> {
        self.scaled(GaussianRational::from_int(-1))
    }

    pub fn apply(&self, f: &E) -> Result<E> {
        match self {
            LinearOp::Identity => Ok(f.clone()),
            LinearOp::Zero => Ok(f.zero_like()),
            LinearOp::Map { f: m, .. } => m(f),
            LinearOp::Compose(ops) => {
                let mut acc = f.clone();
                for op in ops.iter().rev() {
                    if acc.is_zero() {
                        break;
                    }
                    acc = op.apply(&acc)?;
                }
                Ok(acc)
            }
            LinearOp::Sum(ops) => {
                let mut acc = f.zero_like();
                for op in ops {
                    acc = acc.try_add(&op.apply(f)?)?;
                }
                Ok(acc)
            }
            LinearOp::Scale(c, op) => Ok(op.apply(f)?.scale(c)),
        }
    }

    pub fn label(&self) -> String {
        match self {
            LinearOp::Identity => "Id".into(),
            LinearOp::Zero => "0".into(),
            LinearOp::Map { label, .. } => label.clone(),
            LinearOp::Compose(ops) => ops.iter().map(|o| o.label_atom()).collect::<Vec<_>>().join("∘"),
            LinearOp::Sum(ops) => ops.iter().map(|o| o.label()).collect::<Vec<_>>().join(" + "),
            LinearOp::Scale(c, op) => format!("{}*{}", c.to_factor_string(), op.label_atom()),
        }
    }

    fn label_atom(&self) -> String {
        match self {
            LinearOp::Sum(_) => format!("({})", self.label()),
            _ => self.label(),
        }
    }
}

impl<E: Coefficient> fmt::Debug for LinearOp<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Truncated λ-series `Σ λⁿ Uₙ` of linear maps.
#[derive(Clone)]
pub struct OperatorSeries<E> {
    ops: Vec<LinearOp<E>>,
}

impl<E: Coefficient> fmt::Debug for OperatorSeries<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.ops).finish()
    }
}

impl<E: Coefficient> OperatorSeries<E> {
    pub fn new(ops: Vec<LinearOp<E>>) -> Self {
        assert!(!ops.is_empty(), "an operator series needs its order-0 term");
        OperatorSeries { ops }
    }

    pub fn identity(order: usize) -> Self {
        let mut ops = vec![LinearOp::Zero; order + 1];
        ops[0] = LinearOp::Identity;
        OperatorSeries { ops }
    }

    /// `Id + λ·k`.
    pub fn identity_plus_lambda(k: LinearOp<E>, order: usize) -> Self {
        let mut s = Self::identity(order);
        if order >= 1 {
            s.ops[1] = k;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.ops.len() - 1
    }

    pub fn ops(&self) -> &[LinearOp<E>] {
        &self.ops
    }

    pub fn op(&self, n: usize) -> &LinearOp<E> {
        &self.ops[n]
    }

    /// `(U f)ₙ = Σ_{a+b=n} U_b(f_a)`, truncated at the smaller order.
    pub fn apply_series(&self, f: &LambdaSeries<E>) -> Result<LambdaSeries<E>> {
        let n = self.order().min(f.order());
        let mut out = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut acc = f.coeff(0).zero_like();
            for a in 0..=k {
                let fa = f.coeff(a);
                if fa.is_zero() {
                    continue;
                }
                acc = acc.try_add(&self.ops[k - a].apply(fa)?)?;
            }
            out.push(acc);
        }
        Ok(LambdaSeries::new(out))
    }

    /// The series `f` with `U f = g`, solved order by order:
    /// `fₙ = gₙ − Σ_{k=1}^{n} U_k(f_{n−k})`.
    pub fn solve_series(&self, g: &LambdaSeries<E>) -> Result<LambdaSeries<E>> {
        if !self.ops[0].is_identity() {
            return Err(Error::NonIdentityLeading);
        }
        let n = self.order().min(g.order());
        let mut out: Vec<E> = Vec::with_capacity(n + 1);
        for m in 0..=n {
            let mut acc = g.coeff(m).clone();
            for k in 1..=m {
                let prev = &out[m - k];
                if !prev.is_zero() {
                    acc = acc.try_add(&self.ops[k].apply(prev)?.scale(&GaussianRational::from_int(-1)))?;
                }
            }
            out.push(acc);
        }
        Ok(LambdaSeries::new(out))
    }

    /// `(self ∘ inner)ₙ = Σ_k self_k ∘ inner_{n−k}`.
    pub fn compose(&self, inner: &OperatorSeries<E>) -> Self {
        let n = self.order().min(inner.order());
        let ops = (0..=n)
            .map(|m| LinearOp::sum((0..=m).map(|k| self.ops[k].compose(&inner.ops[m - k])).collect()))
            .collect();
        OperatorSeries { ops }
    }

    /// Order-by-order inverse of a unit-leading series:
    /// `U₀ = Id`, `Uₙ = −Σ_{k=1}^{n} T_k ∘ U_{n−k}`.
    pub fn invert(&self) -> Result<Self> {
        if !self.ops[0].is_identity() {
            return Err(Error::NonIdentityLeading);
        }
        let mut inv: Vec<LinearOp<E>> = vec![LinearOp::Identity];
        for n in 1..=self.order() {
            let terms = (1..=n).map(|k| self.ops[k].compose(&inv[n - k])).collect();
            inv.push(LinearOp::sum(terms).neg());
        }
        Ok(OperatorSeries { ops: inv })
    }
}

/// Free-function form of [`OperatorSeries::invert`].
pub fn operator_series_invert<E: Coefficient>(t: &OperatorSeries<E>) -> Result<OperatorSeries<E>> {
    t.invert()
}

#[cfg(test)]
mod tests {
    use super::*;

    type G = GaussianRational;

    fn g(n: i64) -> G {
        G::from_int(n)
    }

    #[test]
    fn solve_matches_symbolic_inverse() {
        let k: LinearOp<G> = LinearOp::map("K", |x: &G| Ok(x * &g(3)));
        let t = OperatorSeries::identity_plus_lambda(k, 4);
        let rhs = LambdaSeries::new(vec![g(1), g(2), g(0), g(-1), g(5)]);
        assert_eq!(t.solve_series(&rhs).unwrap(), t.invert().unwrap().apply_series(&rhs).unwrap());
        assert_eq!(t.apply_series(&t.solve_series(&rhs).unwrap()).unwrap(), rhs);
    }

    #[test]
    fn invert_identity() {
        let id = OperatorSeries::<G>::identity(3);
        let inv = id.invert().unwrap();
        assert!(inv.op(0).is_identity());
        assert!(inv.ops()[1..].iter().all(LinearOp::is_zero));
    }

    #[test]
    fn invert_gives_neumann_series() {
        // K = multiplication by 3 on scalars: (Id + λK)⁻¹ = Σ (−λK)ⁿ
        let k = LinearOp::map("K", |x: &G| Ok(x * &g(3)));
        let t = OperatorSeries::identity_plus_lambda(k, 4);
        let inv = t.invert().unwrap();
        for n in 0..=4 {
            let want = g(-3).pow(n as u32);
            assert_eq!(inv.op(n).apply(&g(1)).unwrap(), want);
        }
        assert_eq!(inv.op(2).label(), "K∘K");
        assert_eq!(inv.op(3).label(), "-1*K∘K∘K");
    }

    #[test]
    fn non_identity_leading_rejected() {
        let t = OperatorSeries::new(vec![LinearOp::<G>::Zero]);
        assert!(matches!(t.invert(), Err(Error::NonIdentityLeading)));
    }

    #[test]
    fn inverse_composes_to_identity_on_series() {
        let k1 = LinearOp::map("A", |x: &G| Ok(x * &g(2)));
        let k2 = LinearOp::map("B", |x: &G| Ok(x * &g(-5)));
        let t = OperatorSeries::new(vec![LinearOp::Identity, k1, k2, LinearOp::Zero]);
        let inv = t.invert().unwrap();
        let f = LambdaSeries::new(vec![g(1), g(7), g(-2), g(4)]);
        let back = inv.apply_series(&t.apply_series(&f).unwrap()).unwrap();
        assert_eq!(back, f);
        let both = t.compose(&inv);
        assert_eq!(both.apply_series(&f).unwrap(), f);
    }
}
