//! Dense univariate polynomials in the radial variable `u` over ℚ(i).
//!
//! Coefficients are little-endian in degree; the vector is empty for zero
//! and never carries a trailing zero otherwise.

use std::fmt;

use super::gaussian::GaussianRational;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct UPoly {
    coeffs: Vec<GaussianRational>,
}

impl UPoly {
    pub fn zero() -> Self {
        UPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(GaussianRational::one())
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The monomial `c·u^k`.
    pub fn monomial(c: GaussianRational, k: usize) -> Self {
        let mut v = vec![GaussianRational::zero(); k + 1];
        v[k] = c;
        Self::from_coeffs(v)
    }

    pub fn u() -> Self {
        Self::monomial(GaussianRational::one(), 1)
    }

    pub fn from_coeffs(mut coeffs: Vec<GaussianRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[GaussianRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> Option<&GaussianRational> {
        self.coeffs.last()
    }

    pub fn coeff(&self, k: usize) -> GaussianRational {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn add(&self, rhs: &UPoly) -> UPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let v = (0..n).map(|k| &self.coeff(k) + &rhs.coeff(k)).collect();
        Self::from_coeffs(v)
    }

    pub fn sub(&self, rhs: &UPoly) -> UPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let v = (0..n).map(|k| &self.coeff(k) - &rhs.coeff(k)).collect();
        Self::from_coeffs(v)
    }

    pub fn neg(&self) -> UPoly {
        UPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn scale(&self, c: &GaussianRational) -> UPoly {
        if c.is_zero() {
            return Self::zero();
        }
        UPoly { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn mul(&self, rhs: &UPoly) -> UPoly {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut v = vec![GaussianRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                v[i + j] += &(a * b);
            }
        }
        Self::from_coeffs(v)
    }

    /// Multiplication by `u^k`.
    pub fn shift(&self, k: usize) -> UPoly {
        if self.is_zero() {
            return Self::zero();
        }
        let mut v = vec![GaussianRational::zero(); k];
        v.extend(self.coeffs.iter().cloned());
        UPoly { coeffs: v }
    }

    pub fn pow(&self, e: u32) -> UPoly {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn derivative(&self) -> UPoly {
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * &GaussianRational::from_int(k as i64))
            .collect();
        Self::from_coeffs(v)
    }

    pub fn eval(&self, x: &GaussianRational) -> GaussianRational {
        let mut acc = GaussianRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    /// Euclidean division; the divisor must be nonzero.
    pub fn div_rem(&self, rhs: &UPoly) -> Result<(UPoly, UPoly)> {
        let lead = rhs.leading().ok_or(Error::DivisionByZero)?;
        let lead_inv = lead.inv()?;
        let dr = rhs.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dr {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![GaussianRational::zero(); rem.len() - dr];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dr] * &lead_inv;
            if c.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                rem[k + j] -= &(&c * b);
            }
            quot[k] = c;
        }
        rem.truncate(dr);
        Ok((Self::from_coeffs(quot), Self::from_coeffs(rem)))
    }

    pub fn monic(&self) -> UPoly {
        match self.leading() {
            None => Self::zero(),
            Some(l) if l.is_one() => self.clone(),
            Some(l) => self.scale(&l.inv().expect("nonzero leading coefficient")),
        }
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, rhs: &UPoly) -> UPoly {
        if self.is_zero() {
            return rhs.monic();
        }
        if rhs.is_zero() {
            return self.monic();
        }
        if self.is_constant() || rhs.is_constant() {
            return Self::one();
        }
        let mut a = self.monic();
        let mut b = rhs.monic();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r.monic();
        }
        a
    }

    /// Human form in the expression grammar, descending in degree.
    pub fn to_expr_string(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative_real_or_imag();
            let mag = if neg { -c } else { c.clone() };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let upart = match k {
                0 => String::new(),
                1 => "u".to_string(),
                _ => format!("u^{k}"),
            };
            if upart.is_empty() {
                out.push_str(&mag.to_factor_string());
            } else if mag.is_one() {
                out.push_str(&upart);
            } else {
                out.push_str(&format!("{}*{}", mag.to_factor_string(), upart));
            }
        }
        out
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_expr_string())
    }
}

impl fmt::Debug for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UPoly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[i64]) -> UPoly {
        UPoly::from_coeffs(v.iter().map(|&x| GaussianRational::from_int(x)).collect())
    }

    #[test]
    fn div_rem_and_gcd() {
        // (u^2 - 4) = (u - 2)(u + 2)
        let a = p(&[-4, 0, 1]);
        let b = p(&[-2, 1]);
        let (q, r) = a.div_rem(&b).unwrap();
        assert_eq!(q, p(&[2, 1]));
        assert!(r.is_zero());
        assert_eq!(a.gcd(&p(&[2, 1]).mul(&p(&[3, 1]))), p(&[2, 1]));
        assert_eq!(p(&[1, 1]).gcd(&p(&[2, 1])), UPoly::one());
    }

    #[test]
    fn printing() {
        assert_eq!(p(&[-4, 0, 1]).to_string(), "u^2 - 4");
        assert_eq!(p(&[0, -1]).to_string(), "-u");
        assert_eq!(UPoly::zero().to_string(), "0");
    }

    #[test]
    fn derivative_and_eval() {
        let a = p(&[1, 2, 3]);
        assert_eq!(a.derivative(), p(&[2, 6]));
        assert_eq!(a.eval(&GaussianRational::from_int(2)), GaussianRational::from_int(17));
    }
}
