//! Small exact combinatorial helpers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

/// All vectors of `parts` non-negative integers summing to `total`, in
/// lexicographic order.
pub fn compositions(parts: usize, total: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; parts];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for k in (0..=left).rev() {
            cur[i] = k;
            rec(i + 1, left - k, cur, out);
        }
    }
    if parts == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(0, total, &mut cur, &mut out);
    out
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// `1 / Π mᵢ!` for a multi-index.
pub fn inv_multi_factorial(m: &[u32]) -> BigRational {
    let d = m.iter().fold(BigInt::one(), |acc, &k| acc * factorial(k));
    BigRational::new(BigInt::one(), d)
}

/// `e·(e−1)···(e−k+1)`.
pub fn falling(e: u32, k: u32) -> u64 {
    (0..k).map(|j| (e - j) as u64).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_counts() {
        assert_eq!(compositions(3, 2).len(), 6);
        assert_eq!(compositions(1, 4), vec![vec![4]]);
        assert_eq!(compositions(2, 0), vec![vec![0, 0]]);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(falling(5, 2), 20);
    }
}
