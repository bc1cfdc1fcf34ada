use std::fmt;

use super::gaussian::GaussianRational;
use crate::error::{Error, Result};

/// Element of a function algebra that can sit in a [`LambdaSeries`].
///
/// Operations are fallible because two elements may live in algebras of
/// different dimension.
pub trait Coefficient: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    /// The zero of the algebra `self` belongs to.
    fn zero_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn try_add(&self, rhs: &Self) -> Result<Self>;
    fn try_mul(&self, rhs: &Self) -> Result<Self>;
    fn scale(&self, c: &GaussianRational) -> Self;

    fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.try_add(&rhs.scale(&GaussianRational::from_int(-1)))
    }

    fn neg(&self) -> Self {
        self.scale(&GaussianRational::from_int(-1))
    }
}

impl Coefficient for GaussianRational {
    fn zero_like(&self) -> Self {
        GaussianRational::zero()
    }
    fn is_zero(&self) -> bool {
        GaussianRational::is_zero(self)
    }
    fn try_add(&self, rhs: &Self) -> Result<Self> {
        Ok(self + rhs)
    }
    fn try_mul(&self, rhs: &Self) -> Result<Self> {
        Ok(self * rhs)
    }
    fn scale(&self, c: &GaussianRational) -> Self {
        self * c
    }
}

/// Truncated formal power series `Σ_{n ≤ N} λⁿ aₙ`; `coeffs.len() == N + 1`.
#[derive(Clone, PartialEq)]
pub struct LambdaSeries<T> {
    coeffs: Vec<T>,
}

impl<T: Coefficient> LambdaSeries<T> {
    /// Panics on an empty coefficient list; a series always has order ≥ 0.
    pub fn new(coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty(), "a LambdaSeries needs at least the order-0 coefficient");
        LambdaSeries { coeffs }
    }

    /// `a + 0·λ + … + 0·λᴺ`.
    pub fn constant(a: T, order: usize) -> Self {
        let z = a.zero_like();
        let mut coeffs = vec![z; order + 1];
        coeffs[0] = a;
        LambdaSeries { coeffs }
    }

    pub fn zero_like(template: &T, order: usize) -> Self {
        LambdaSeries { coeffs: vec![template.zero_like(); order + 1] }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &T {
        &self.coeffs[n]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Coefficient::is_zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        LambdaSeries { coeffs: self.coeffs[..=order.min(self.order())].to_vec() }
    }

    pub fn map<U: Coefficient>(&self, f: impl FnMut(&T) -> Result<U>) -> Result<LambdaSeries<U>> {
        Ok(LambdaSeries { coeffs: self.coeffs.iter().map(f).collect::<Result<Vec<_>>>()? })
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        let n = self.order().min(rhs.order());
        let coeffs = (0..=n).map(|k| self.coeffs[k].try_add(&rhs.coeffs[k])).collect::<Result<_>>()?;
        Ok(LambdaSeries { coeffs })
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        let n = self.order().min(rhs.order());
        let coeffs = (0..=n).map(|k| self.coeffs[k].try_sub(&rhs.coeffs[k])).collect::<Result<_>>()?;
        Ok(LambdaSeries { coeffs })
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        LambdaSeries { coeffs: self.coeffs.iter().map(|a| a.scale(c)).collect() }
    }

    /// Multiplies the order-`n` coefficient by `cⁿ`, i.e. substitutes `λ ↦ cλ`.
    pub fn rescale_lambda(&self, c: &GaussianRational) -> Self {
        let mut w = GaussianRational::one();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            coeffs.push(a.scale(&w));
            w = &w * c;
        }
        LambdaSeries { coeffs }
    }

    /// Cauchy product truncated at the smaller order.
    pub fn series_mul(&self, rhs: &Self) -> Result<Self> {
        let n = self.order().min(rhs.order());
        let mut coeffs = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut acc = self.coeffs[0].zero_like();
            for j in 0..=k {
                let a = &self.coeffs[j];
                let b = &rhs.coeffs[k - j];
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                acc = acc.try_add(&a.try_mul(b)?)?;
            }
            coeffs.push(acc);
        }
        Ok(LambdaSeries { coeffs })
    }

    pub fn check_same_order(&self, rhs: &Self) -> Result<()> {
        if self.order() == rhs.order() {
            Ok(())
        } else {
            Err(Error::MismatchedAlgebras(format!(
                "series orders {} and {}",
                self.order(),
                rhs.order()
            )))
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for LambdaSeries<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut l = f.debug_list();
        for c in &self.coeffs {
            l.entry(c);
        }
        l.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(v: &[i64]) -> LambdaSeries<GaussianRational> {
        LambdaSeries::new(v.iter().map(|&x| GaussianRational::from_int(x)).collect())
    }

    #[test]
    fn mul_examples() {
        assert_eq!(s(&[1, 1, 0]).series_mul(&s(&[1, -1, 0])).unwrap(), s(&[1, 0, -1]));
        let f = s(&[3, 1, 4]);
        assert_eq!(f.series_mul(&LambdaSeries::constant(GaussianRational::one(), 2)).unwrap(), f);
        assert_eq!(s(&[1, 2, 3, 4]).series_mul(&s(&[1, 1, 1])).unwrap().order(), 2);
    }

    #[test]
    fn rescale_lambda_weights_orders() {
        let r = s(&[1, 1, 1]).rescale_lambda(&GaussianRational::from_int(2));
        assert_eq!(r, s(&[1, 2, 4]));
    }

    fn arb(len: usize) -> impl Strategy<Value = LambdaSeries<GaussianRational>> {
        proptest::collection::vec(-9i64..9, len).prop_map(|v| s(&v))
    }

    proptest! {
        #[test]
        fn cauchy_product_associative_commutative(a in arb(4), b in arb(4), c in arb(3)) {
            let ab = a.series_mul(&b).unwrap();
            prop_assert_eq!(&ab, &b.series_mul(&a).unwrap());
            let l = ab.series_mul(&c).unwrap();
            let r = a.series_mul(&b.series_mul(&c).unwrap()).unwrap();
            prop_assert_eq!(l.order(), 2);
            prop_assert_eq!(l, r);
        }
    }
}
