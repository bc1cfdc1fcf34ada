//! Property suites run by `costar verify`. Each check is exact; a check that
//! raises an error counts as failed and carries the error text.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use rayon::prelude::*;

use crate::cpn::{
    a_coeff_closed, a_coeff_sum, formula9_product, obstruction_order2, pr_t_word_sum, reduced_product, RVariant,
    LAMBDA_RESCALE,
};
use crate::error::{Error, Result};
use crate::flatphase::{moyal_kernel, moyal_product, poisson_flat, FlatSetup};
use crate::radialphase::{RadialFun, RadialSetup};
use crate::reduction::{
    decompose_deformed, in_bstar, in_istar, recompose_deformed, reduce_star, star_series, t_apply, t_operator_series,
    verify_s, PhaseSetup, SStrategy,
};
use crate::sample;
use crate::scalar::{Coefficient, GaussianRational, LambdaSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Lemma1,
    Moyal,
    ACoeff,
    Formula9,
    Axioms,
    PrWords,
    Obstruction,
    Membership,
    All,
}

impl Suite {
    pub const EACH: [Suite; 8] = [
        Suite::Lemma1,
        Suite::Moyal,
        Suite::ACoeff,
        Suite::Formula9,
        Suite::Axioms,
        Suite::PrWords,
        Suite::Obstruction,
        Suite::Membership,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lemma1 => "lemma1",
            Suite::Moyal => "moyal",
            Suite::ACoeff => "acoeff",
            Suite::Formula9 => "formula9",
            Suite::Axioms => "axioms",
            Suite::PrWords => "prwords",
            Suite::Obstruction => "obstruction",
            Suite::Membership => "membership",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown suite `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} {}::{}", self.suite, self.name)?;
        if !self.detail.is_empty() {
            write!(f, " ({})", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyParams {
    pub order: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for VerifyParams {
    fn default() -> Self {
        VerifyParams { order: 3, samples: 4, seed: 1 }
    }
}

fn check(suite: &'static str, name: impl Into<String>, r: Result<bool>) -> Check {
    let name = name.into();
    match r {
        Ok(passed) => Check { suite, name, passed, detail: String::new() },
        Err(e) => Check { suite, name, passed: false, detail: e.to_string() },
    }
}

fn all_ok<T: Send>(items: Vec<T>, f: impl Fn(T) -> Result<bool> + Sync + Send) -> Result<bool> {
    let results = items.into_par_iter().map(f).collect::<Result<Vec<bool>>>()?;
    Ok(results.into_iter().all(|b| b))
}

fn half() -> BigRational {
    BigRational::new((-1).into(), 2.into())
}

fn lemma1_for<S: PhaseSetup>(setup: &S, inputs: Vec<S::Elem>, order: usize) -> Result<bool> {
    let j = LambdaSeries::constant(setup.constraint(), order);
    let t = t_operator_series(setup, order);
    all_ok(inputs, |f| {
        let fs = LambdaSeries::constant(f.clone(), order);
        // T(f ∗ J) = f·J
        let lhs = t_apply(setup, &star_series(setup, &fs, &j)?, order)?;
        let fj = LambdaSeries::constant(f.try_mul(&setup.constraint())?, order);
        // T(prol f) = prol f
        let p = LambdaSeries::constant(setup.prol(&f)?, order);
        let (pure, coeff) = decompose_deformed(setup, &fs, order)?;
        Ok(lhs == fj
            && t_apply(setup, &p, order)? == p
            && recompose_deformed(setup, &pure, &coeff)? == fs
            && t.solve_series(&t.apply_series(&fs)?)? == fs)
    })
    .and_then(|ok| Ok(ok && t_apply(setup, &j, order)? == j))
}

fn suite_lemma1(p: &VerifyParams) -> Vec<Check> {
    let s = "lemma1";
    let mut rng = sample::rng(p.seed);
    let flat: Vec<_> = (0..p.samples).map(|_| sample::flat_poly(&mut rng, 2, 2, 3, 3)).collect();
    let even: Vec<_> = (0..p.samples).map(|_| sample::even_radial(&mut rng, 2, 2, 2)).collect();
    let mut out = vec![check(s, "flat", FlatSetup::new(2).and_then(|st| lemma1_for(&st, flat, p.order)))];
    out.push(check(s, "radial-linear", RadialSetup::linear(1, half()).and_then(|st| lemma1_for(&st, even.clone(), p.order))));
    out.push(check(s, "radial-quadratic", RadialSetup::quadratic(1, half()).and_then(|st| lemma1_for(&st, even, p.order))));
    out
}

fn suite_moyal(p: &VerifyParams) -> Vec<Check> {
    let s = "moyal";
    let mut out = Vec::new();
    for n in [2usize, 3] {
        let mut rng = sample::rng(p.seed + n as u64);
        let pairs: Vec<_> = (0..p.samples)
            .map(|_| (sample::flat_poly(&mut rng, n, n - 1, 3, 3), sample::flat_poly(&mut rng, n, n - 1, 3, 3)))
            .collect();
        let r = FlatSetup::new(n).and_then(|setup| {
            all_ok(pairs.clone(), |(f, g)| {
                let fs = LambdaSeries::constant(f.clone(), p.order);
                let gs = LambdaSeries::constant(g.clone(), p.order);
                let red = reduce_star(&setup, &SStrategy::Identity, &fs, &gs, p.order)?;
                let red = red.map(|x| x.drop_last_pair())?;
                Ok(red == moyal_product(&f.drop_last_pair()?, &g.drop_last_pair()?, p.order)?)
            })
        });
        out.push(check(s, format!("reduced equals Moyal on R^{}", 2 * (n - 1)), r));
        let r = all_ok(pairs, |(f, g)| {
            let anti = moyal_kernel(1, &f, &g)?.sub(&moyal_kernel(1, &g, &f)?)?;
            Ok(anti == poisson_flat(&f, &g)?.scale(&GaussianRational::i()))
        });
        out.push(check(s, format!("M1 antisymmetric part is i{{,}} (n={n})"), r));
    }
    out
}

fn suite_acoeff(_: &VerifyParams) -> Vec<Check> {
    let s = "acoeff";
    let agree = (1..=8).all(|k| (0..=8).all(|l| a_coeff_sum(k, l) == a_coeff_closed(k, l)));
    let int = |x: i64| BigRational::from_integer(x.into());
    let spots = (1..=8u32).all(|k| {
        a_coeff_sum(k, 0) == int(1)
            && a_coeff_sum(k, 1) == BigRational::new((-(k as i64) * (k as i64 + 1)).into(), 2.into())
            && a_coeff_sum(1, k) == int(if k % 2 == 0 { 1 } else { -1 })
    });
    vec![check(s, "nested sum equals closed form, k,l <= 8", Ok(agree)), check(s, "spot values", Ok(spots))]
}

fn homogeneous_pairs(seed: u64, coords: usize, count: usize) -> Vec<(RadialFun, RadialFun)> {
    let mut rng = sample::rng(seed);
    (0..count)
        .map(|_| {
            (
                sample::nonconstant_homogeneous(&mut rng, coords, 1, 2),
                sample::nonconstant_homogeneous(&mut rng, coords, 1, 2),
            )
        })
        .collect()
}

fn suite_formula9(p: &VerifyParams) -> Vec<Check> {
    let s = "formula9";
    let mu = half();
    let r = RadialSetup::linear(1, mu.clone()).and_then(|setup| {
        all_ok(homogeneous_pairs(p.seed, 2, p.samples), |(f, g)| {
            let engine = reduced_product(&setup, &f, &g, p.order)?;
            let formula = formula9_product(&f, &g, &mu, p.order)?;
            Ok(engine == formula.rescale_lambda(&GaussianRational::from_int(LAMBDA_RESCALE)))
        })
    });
    vec![check(s, "engine equals direct formula after lambda -> 2 lambda", r)]
}

fn axioms_for(setup: &RadialSetup, p: &VerifyParams) -> Result<bool> {
    let n = p.order.min(3);
    let pairs = homogeneous_pairs(p.seed + 7, setup.coords(), p.samples);
    let id = SStrategy::Identity;
    all_ok(pairs, |(f, g)| {
        let one = LambdaSeries::constant(setup.one(), n);
        let fs = LambdaSeries::constant(f.clone(), n);
        let gs = LambdaSeries::constant(g.clone(), n);
        let unit = reduce_star(setup, &id, &fs, &one, n)? == fs && reduce_star(setup, &id, &one, &fs, n)? == fs;
        let fg = reduce_star(setup, &id, &fs, &gs, n)?;
        let gf = reduce_star(setup, &id, &gs, &fs, n)?;
        let zeroth = fg.coeff(0) == &f.mul(&g)?;
        let bracket = setup.prol(&setup.poisson(&f, &g)?)?.scale(&GaussianRational::i());
        let first = fg.coeff(1).sub(gf.coeff(1))? == bracket;
        let h = f.add(&g)?.mul(&g)?;
        let hs = LambdaSeries::constant(h, n);
        let assoc = reduce_star(setup, &id, &fg, &hs, n)? == reduce_star(setup, &id, &fs, &reduce_star(setup, &id, &gs, &hs, n)?, n)?;
        Ok(unit && zeroth && first && assoc)
    })
}

fn suite_axioms(p: &VerifyParams) -> Vec<Check> {
    let s = "axioms";
    vec![
        check(s, "radial-linear", RadialSetup::linear(1, half()).and_then(|st| axioms_for(&st, p))),
        check(s, "radial-quadratic", RadialSetup::quadratic(1, half()).and_then(|st| axioms_for(&st, p))),
    ]
}

fn suite_prwords(p: &VerifyParams) -> Vec<Check> {
    let s = "prwords";
    let mut rng = sample::rng(p.seed + 11);
    let inputs: Vec<_> = (0..p.samples).map(|_| sample::even_radial(&mut rng, 2, 2, 2)).collect();
    let r = RadialSetup::quadratic(1, half()).and_then(|setup| {
        let words = (0..=p.order).map(|n| pr_t_word_sum(&setup, n, RVariant::Derived)).collect::<Result<Vec<_>>>()?;
        all_ok(inputs, |f| {
            let t = t_apply(&setup, &LambdaSeries::constant(f.clone(), p.order), p.order)?;
            for (n, w) in words.iter().enumerate() {
                if &w.apply(&f)? != t.coeff(n) {
                    return Ok(false);
                }
            }
            Ok(true)
        })
    });
    vec![check(s, "word sums equal the T recursion", r)]
}

fn suite_obstruction(p: &VerifyParams) -> Vec<Check> {
    let s = "obstruction";
    let pairs = homogeneous_pairs(p.seed + 13, 2, p.samples.max(2));
    let results: Result<Vec<_>> = pairs.into_par_iter().map(|(f, g)| obstruction_order2(&f, &g, &half())).collect();
    let (r, detail) = match results {
        Ok(os) => {
            let vanishing = os.iter().filter(|o| o.rhs.is_zero()).all(|o| o.lhs.is_zero());
            let nonzero: Vec<_> = os.iter().filter(|o| !o.rhs.is_zero()).map(|o| o.ratio.clone()).collect();
            let first = nonzero.first().cloned().flatten();
            let ok = vanishing
                && first.as_ref().is_some_and(|r| !r.is_zero())
                && nonzero.iter().all(|r| *r == first);
            (Ok(ok), first.map(|r| format!("ratio {r}")).unwrap_or_default())
        }
        Err(e) => (Err(e), String::new()),
    };
    let mut c = check(s, "order-2 difference is a fixed nonzero multiple of the bracket", r);
    if c.detail.is_empty() {
        c.detail = detail;
    }
    vec![c]
}

fn suite_membership(p: &VerifyParams) -> Vec<Check> {
    let s = "membership";
    let n = p.order;
    let mut rng = sample::rng(p.seed + 17);
    let gs: Vec<_> = (0..p.samples).map(|_| sample::even_radial(&mut rng, 2, 2, 2)).collect();
    let hs: Vec<_> = (0..p.samples).map(|_| sample::homogeneous(&mut rng, 2, 2, 2)).collect();
    let r = RadialSetup::linear(1, half()).and_then(|setup| {
        let j = LambdaSeries::constant(setup.constraint(), n);
        let ideal = all_ok(gs, |g| in_istar(&setup, &star_series(&setup, &LambdaSeries::constant(g, n), &j)?, n))?;
        let bstar = all_ok(hs, |h| {
            let hs = LambdaSeries::constant(h, n);
            Ok(in_bstar(&setup, &hs, n)? && verify_s(&setup, &SStrategy::Identity, &hs, n)?)
        })?;
        let one = LambdaSeries::constant(setup.one(), n);
        Ok(ideal && bstar && !in_istar(&setup, &one, n)?)
    });
    vec![check(s, "I* and B* oracles (radial-linear)", r)]
}

pub fn run_suite(suite: Suite, p: &VerifyParams) -> Vec<Check> {
    match suite {
        Suite::Lemma1 => suite_lemma1(p),
        Suite::Moyal => suite_moyal(p),
        Suite::ACoeff => suite_acoeff(p),
        Suite::Formula9 => suite_formula9(p),
        Suite::Axioms => suite_axioms(p),
        Suite::PrWords => suite_prwords(p),
        Suite::Obstruction => suite_obstruction(p),
        Suite::Membership => suite_membership(p),
        Suite::All => Suite::EACH.iter().flat_map(|s| run_suite(*s, p)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suites_pass() {
        let p = VerifyParams { order: 2, samples: 2, seed: 5 };
        for s in [Suite::Lemma1, Suite::ACoeff, Suite::Membership, Suite::PrWords] {
            for c in run_suite(s, &p) {
                assert!(c.passed, "{c}");
            }
        }
    }

    #[test]
    fn suite_names_parse() {
        for s in Suite::EACH {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }
}
