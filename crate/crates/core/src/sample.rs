//! Seeded generators of small random inputs for property checks.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::flatphase::FlatPoly;
use crate::radialphase::RadialFun;
use crate::scalar::{GaussianRational, RadialRational, UPoly};

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A nonzero Gaussian rational with small numerators and denominators.
pub fn scalar(rng: &mut SampleRng) -> GaussianRational {
    loop {
        let re = GaussianRational::from_ratio(rng.gen_range(-4..=4), rng.gen_range(1..=3));
        let im = if rng.gen_bool(0.3) {
            GaussianRational::from_ratio(rng.gen_range(-3..=3), rng.gen_range(1..=2))
        } else {
            GaussianRational::zero()
        };
        let c = &re + &(&im * &GaussianRational::i());
        if !c.is_zero() {
            return c;
        }
    }
}

/// Random polynomial on ℝ²ᵈⁱᵐ in the first `pairs` coordinate pairs, total
/// degree at most `max_deg`.
pub fn flat_poly(rng: &mut SampleRng, dim: usize, pairs: usize, max_deg: u32, terms: usize) -> FlatPoly {
    let mut f = FlatPoly::zero(dim);
    for _ in 0..terms {
        let mut e = vec![0u32; 2 * dim];
        let deg = rng.gen_range(0..=max_deg);
        for _ in 0..deg {
            let s = rng.gen_range(0..pairs);
            let slot = if rng.gen_bool(0.5) { s } else { dim + s };
            e[slot] += 1;
        }
        f = f.add(&FlatPoly::monomial(e, scalar(rng))).expect("same dimension");
    }
    f
}

/// A radial factor whose poles, if any, lie at negative `u`.
fn radial_factor(rng: &mut SampleRng) -> RadialRational {
    let deg = rng.gen_range(0..=2);
    let num = UPoly::from_coeffs((0..=deg).map(|_| scalar(rng)).collect());
    let num = if num.is_zero() { UPoly::one() } else { num };
    let den = match rng.gen_range(0..3) {
        0 => UPoly::one(),
        1 => UPoly::monomial(GaussianRational::one(), rng.gen_range(1..=2)),
        _ => UPoly::from_coeffs(vec![GaussianRational::from_int(rng.gen_range(1..=3)), GaussianRational::one()]),
    };
    RadialRational::new(num, den).expect("nonzero denominator")
}

fn multi_index(rng: &mut SampleRng, coords: usize, total: u32) -> Vec<u32> {
    let mut v = vec![0u32; coords];
    for _ in 0..total {
        v[rng.gen_range(0..coords)] += 1;
    }
    v
}

/// Random function `Σ z^α z̄^β R(u)` with every `|α| + |β|` even and no pole
/// at positive `u`.
pub fn even_radial(rng: &mut SampleRng, coords: usize, max_deg: u32, terms: usize) -> RadialFun {
    let mut f = RadialFun::zero(coords);
    for _ in 0..terms {
        let d = 2 * rng.gen_range(0..=max_deg / 2);
        let da = rng.gen_range(0..=d);
        let t = RadialFun::term(multi_index(rng, coords, da), multi_index(rng, coords, d - da), radial_factor(rng));
        f = f.add(&t).expect("same dimension");
    }
    f
}

/// Random homogeneous function `Σ c z^α z̄^β / u^k` with `|α| = |β| = k ≤ max_k`.
pub fn homogeneous(rng: &mut SampleRng, coords: usize, max_k: u32, terms: usize) -> RadialFun {
    let mut f = RadialFun::zero(coords);
    for _ in 0..terms {
        let k = rng.gen_range(0..=max_k);
        let t = RadialFun::term(
            multi_index(rng, coords, k),
            multi_index(rng, coords, k),
            RadialRational::u_pow(-(k as i64)).scale(&scalar(rng)),
        );
        f = f.add(&t).expect("same dimension");
    }
    f
}

/// A homogeneous function that is not constant.
pub fn nonconstant_homogeneous(rng: &mut SampleRng, coords: usize, max_k: u32, terms: usize) -> RadialFun {
    loop {
        let f = homogeneous(rng, coords, max_k.max(1), terms);
        if f.as_radial().is_none() {
            return f;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_respect_their_contracts() {
        let mut r = rng(7);
        for _ in 0..20 {
            assert!(homogeneous(&mut r, 3, 2, 3).is_homogeneous());
            assert!(even_radial(&mut r, 2, 4, 3).is_even());
            let f = flat_poly(&mut r, 3, 2, 3, 4);
            assert!(f.terms().all(|(e, _)| e[2] == 0 && e[5] == 0));
        }
    }

    #[test]
    fn seeds_are_reproducible() {
        assert_eq!(homogeneous(&mut rng(3), 2, 2, 4), homogeneous(&mut rng(3), 2, 2, 4));
    }
}
