use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;

use super::gaussian::GaussianRational;
use super::poly::UPoly;
use crate::error::{Error, Result};

/// Rational function of the radial variable `u`, kept in lowest terms with
/// a monic denominator. Zero is `0/1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RadialRational {
    num: UPoly,
    den: UPoly,
}

impl Default for RadialRational {
    fn default() -> Self {
        Self::zero()
    }
}

const CACHE_LIMIT: usize = 1 << 16;

thread_local! {
    static DERIVATIVES: RefCell<HashMap<RadialRational, RadialRational>> = RefCell::new(HashMap::new());
}

/// Divides `a` and `b` by their gcd.
fn cancel(a: &UPoly, b: &UPoly) -> (UPoly, UPoly) {
    if b.is_one() {
        return (a.clone(), b.clone());
    }
    let g = a.gcd(b);
    if g.is_one() {
        (a.clone(), b.clone())
    } else {
        (a.div_rem(&g).expect("gcd divides").0, b.div_rem(&g).expect("gcd divides").0)
    }
}

impl RadialRational {
    pub fn new(num: UPoly, den: UPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: UPoly, den: UPoly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_rem(&g).expect("gcd divides").0, den.div_rem(&g).expect("gcd divides").0)
        };
        let lead = den.leading().expect("nonzero denominator").clone();
        if lead.is_one() {
            RadialRational { num, den }
        } else {
            let inv = lead.inv().expect("nonzero leading coefficient");
            RadialRational { num: num.scale(&inv), den: den.scale(&inv) }
        }
    }

    /// `num/den` already coprime; only makes the denominator monic.
    fn normalized(num: UPoly, den: UPoly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let lead = den.leading().expect("nonzero denominator").clone();
        if lead.is_one() {
            RadialRational { num, den }
        } else {
            let inv = lead.inv().expect("nonzero leading coefficient");
            RadialRational { num: num.scale(&inv), den: den.scale(&inv) }
        }
    }

    pub fn zero() -> Self {
        RadialRational { num: UPoly::zero(), den: UPoly::one() }
    }

    pub fn one() -> Self {
        Self::constant(GaussianRational::one())
    }

    pub fn constant(c: GaussianRational) -> Self {
        RadialRational { num: UPoly::constant(c), den: UPoly::one() }
    }

    pub fn from_poly(p: UPoly) -> Self {
        RadialRational { num: p, den: UPoly::one() }
    }

    /// `u^k` for any integer `k`.
    pub fn u_pow(k: i64) -> Self {
        let m = UPoly::monomial(GaussianRational::one(), k.unsigned_abs() as usize);
        if k >= 0 {
            Self::from_poly(m)
        } else {
            RadialRational { num: UPoly::one(), den: m }
        }
    }

    pub fn numer(&self) -> &UPoly {
        &self.num
    }

    pub fn denom(&self) -> &UPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// The value when this is a constant function.
    pub fn as_constant(&self) -> Option<GaussianRational> {
        (self.den.is_one() && self.num.is_constant()).then(|| self.num.coeff(0))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return Self::reduce(self.num.add(&rhs.num), self.den.clone());
        }
        let g = self.den.gcd(&rhs.den);
        if g.is_one() {
            let num = self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den));
            return Self::normalized(num, self.den.mul(&rhs.den));
        }
        let d1 = self.den.div_rem(&g).expect("gcd divides").0;
        let d2 = rhs.den.div_rem(&g).expect("gcd divides").0;
        let t = self.num.mul(&d2).add(&rhs.num.mul(&d1));
        if t.is_zero() {
            return Self::zero();
        }
        let g2 = t.gcd(&g);
        if g2.is_one() {
            return Self::normalized(t, d1.mul(&rhs.den));
        }
        let num = t.div_rem(&g2).expect("gcd divides").0;
        let den = d1.mul(&rhs.den.div_rem(&g2).expect("gcd divides").0);
        Self::normalized(num, den)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        RadialRational { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RadialRational { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return Self::from_poly(self.num.mul(&rhs.num));
        }
        let (n1, d2) = cancel(&self.num, &rhs.den);
        let (n2, d1) = cancel(&rhs.num, &self.den);
        Self::normalized(n1.mul(&n2), d1.mul(&d2))
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduce(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.mul(&rhs.inv()?))
    }

    pub fn powi(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// Multiplication by `u^k`, `k` possibly negative.
    pub fn mul_u_pow(&self, k: i64) -> Self {
        if k >= 0 && self.den.is_one() {
            return Self::from_poly(self.num.shift(k as usize));
        }
        self.mul(&Self::u_pow(k))
    }

    pub fn derivative(&self) -> Self {
        if self.den.is_one() {
            return Self::from_poly(self.num.derivative());
        }
        DERIVATIVES.with(|cache| {
            if let Some(d) = cache.borrow().get(self) {
                return d.clone();
            }
            // d = g·h, d' = g·k with g = gcd(d, d'); the quotient below is already in lowest terms
            let dd = self.den.derivative();
            let g = self.den.gcd(&dd);
            let h = self.den.div_rem(&g).expect("gcd divides").0;
            let k = dd.div_rem(&g).expect("gcd divides").0;
            let n = self.num.derivative().mul(&h).sub(&self.num.mul(&k));
            let d = Self::normalized(n, self.den.mul(&h));
            let mut c = cache.borrow_mut();
            if c.len() >= CACHE_LIMIT {
                c.clear();
            }
            c.insert(self.clone(), d.clone());
            d
        })
    }

    /// `u·R'(u)`, the radial part of the Euler operators.
    pub fn u_derivative(&self) -> Self {
        self.derivative().mul_u_pow(1)
    }

    pub fn has_pole_at(&self, u0: &GaussianRational) -> bool {
        self.den.eval(u0).is_zero()
    }

    /// Exact evaluation at `u0`; the canonical form has already cancelled
    /// removable singularities.
    pub fn eval(&self, u0: &GaussianRational) -> Result<GaussianRational> {
        let d = self.den.eval(u0);
        if d.is_zero() {
            return Err(Error::Pole { at: u0.to_string() });
        }
        self.num.eval(u0).checked_div(&d)
    }

    pub fn to_expr_string(&self) -> String {
        if self.den.is_one() {
            self.num.to_expr_string()
        } else {
            format!("({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Display for RadialRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_expr_string())
    }
}

impl fmt::Debug for RadialRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R[{self}]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[i64]) -> UPoly {
        UPoly::from_coeffs(v.iter().map(|&x| GaussianRational::from_int(x)).collect())
    }

    #[test]
    fn evaluation_examples() {
        let inv_u = RadialRational::u_pow(-1);
        assert_eq!(inv_u.eval(&GaussianRational::one()).unwrap(), GaussianRational::one());

        let r = RadialRational::new(p(&[-4, 0, 1]), p(&[-2, 1])).unwrap();
        assert_eq!(r, RadialRational::from_poly(p(&[2, 1])));
        assert_eq!(r.eval(&GaussianRational::from_int(2)).unwrap(), GaussianRational::from_int(4));

        let pole = RadialRational::new(UPoly::one(), p(&[-2, 1])).unwrap();
        assert_eq!(
            pole.eval(&GaussianRational::from_int(2)),
            Err(Error::Pole { at: "2".to_string() })
        );
    }

    #[test]
    fn canonical_form_is_unique() {
        let a = RadialRational::new(p(&[2, 2]), p(&[4, 4, 0])).unwrap();
        let b = RadialRational::new(p(&[-3]), p(&[-6])).unwrap();
        assert_eq!(a, b);
        assert!(a.denom().leading().unwrap().is_one());
    }

    #[test]
    fn derivative_of_inverse_square() {
        let r = RadialRational::u_pow(-2);
        assert_eq!(r.derivative(), RadialRational::u_pow(-3).scale(&GaussianRational::from_int(-2)));
        assert_eq!(r.u_derivative(), r.scale(&GaussianRational::from_int(-2)));
    }

    #[test]
    fn zero_denominator_rejected() {
        assert_eq!(RadialRational::new(UPoly::one(), UPoly::zero()), Err(Error::DivisionByZero));
    }
}
