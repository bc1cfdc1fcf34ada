//! End-to-end acceptance criteria. Each criterion prints one PASS/FAIL line.

use std::io::Write;
use std::time::Instant;

use costar_core::cpn::{
    a_coeff_closed, a_coeff_sum, formula9_product, obstruction_order2, pr_t_word_sum, reduced_product, RVariant,
    LAMBDA_RESCALE,
};
use costar_core::expr::{parse_rational, Mode, OutputFormat, RunConfig};
use costar_core::flatphase::{moyal_product, FlatPoly, FlatSetup};
use costar_core::format::{parse_series_human, render_series, series_from_json, series_to_json, SeriesValue};
use costar_core::radialphase::{poisson_radial, RadialFun, RadialSetup};
use costar_core::reduction::{
    decompose_deformed, in_bstar, in_istar, recompose_deformed, reduce_star, star_series, t_apply, verify_s,
    PhaseSetup, SStrategy,
};
use costar_core::sample;
use costar_core::scalar::{Coefficient, GaussianRational, LambdaSeries};
use costar_core::Result;
use num_rational::BigRational;

type Outcome = Result<(bool, String)>;
type Criterion = (&'static str, fn() -> Outcome);

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn series<E: Coefficient>(f: &E, n: usize) -> LambdaSeries<E> {
    LambdaSeries::constant(f.clone(), n)
}

fn homogeneous_pair(rng: &mut sample::SampleRng, coords: usize) -> (RadialFun, RadialFun) {
    (sample::nonconstant_homogeneous(rng, coords, 1, 2), sample::nonconstant_homogeneous(rng, coords, 1, 2))
}

fn moyal_reduction() -> Outcome {
    let order = 6;
    let mut count = 0;
    for n in [2usize, 3] {
        let setup = FlatSetup::new(n)?;
        let mut rng = sample::rng(100 + n as u64);
        for _ in 0..10 {
            let f = sample::flat_poly(&mut rng, n, n - 1, 3, 3);
            let g = sample::flat_poly(&mut rng, n, n - 1, 3, 3);
            let (fs, gs) = (series(&f, order), series(&g, order));
            if !verify_s(&setup, &SStrategy::Identity, &fs, order)? || !verify_s(&setup, &SStrategy::Identity, &gs, order)? {
                return Ok((false, format!("S = Id rejected an input for n = {n}")));
            }
            let red = reduce_star(&setup, &SStrategy::Identity, &fs, &gs, order)?.map(FlatPoly::drop_last_pair)?;
            if red != moyal_product(&f.drop_last_pair()?, &g.drop_last_pair()?, order)? {
                return Ok((false, format!("mismatch for n = {n}: f = {f}, g = {g}")));
            }
            count += 1;
        }
    }
    Ok((true, format!("{count} pairs, n = 2, 3, order {order}")))
}

fn a_coefficients() -> Outcome {
    let int = |x: i64| BigRational::from_integer(x.into());
    for k in 1..=8u32 {
        for l in 0..=8u32 {
            if a_coeff_sum(k, l) != a_coeff_closed(k, l) {
                return Ok((false, format!("A({k},{l})")));
            }
        }
        let kk = k as i64;
        if a_coeff_sum(k, 0) != int(1) || a_coeff_sum(k, 1) != q(-kk * (kk + 1), 2) {
            return Ok((false, format!("spot value at k = {k}")));
        }
    }
    for l in 0..=8u32 {
        if a_coeff_sum(1, l) != int(if l % 2 == 0 { 1 } else { -1 }) {
            return Ok((false, format!("A(1,{l})")));
        }
    }
    Ok((true, "1 <= k <= 8, 0 <= l <= 8 plus spot values".into()))
}

fn cpn_formula() -> Outcome {
    let order = 4;
    let mut scale: Option<GaussianRational> = None;
    let mut count = 0;
    for n in [1usize, 2] {
        for mu in [q(-1, 2), q(-1, 1), q(-3, 2)] {
            let setup = RadialSetup::linear(n, mu.clone())?;
            let mut rng = sample::rng(300 + n as u64);
            for _ in 0..5 {
                let (f, g) = homogeneous_pair(&mut rng, n + 1);
                let engine = reduced_product(&setup, &f, &g, order)?;
                let formula = formula9_product(&f, &g, &mu, order)?;
                // λ ↦ cλ fixed by the first nonzero order-one coefficient
                if scale.is_none() && !formula.coeff(1).is_zero() {
                    scale = engine.coeff(1).ratio_to(formula.coeff(1));
                }
                let c = scale.clone().unwrap_or_else(GaussianRational::one);
                if engine != formula.rescale_lambda(&c) {
                    return Ok((false, format!("n = {n}, mu = {mu}: f = {f}, g = {g} (lambda scale {c})")));
                }
                count += 1;
            }
        }
    }
    let c = scale.unwrap_or_else(GaussianRational::one);
    let expected = GaussianRational::from_int(LAMBDA_RESCALE);
    Ok((c == expected, format!("{count} pairs through order {order}, engine = formula with lambda -> {c}*lambda")))
}

fn lemma1_for<S: PhaseSetup>(setup: &S, inputs: &[S::Elem], order: usize) -> Result<bool> {
    let j = series(&setup.constraint(), order);
    if t_apply(setup, &j, order)? != j {
        return Ok(false);
    }
    for f in inputs {
        let fs = series(f, order);
        let fj = series(&f.try_mul(&setup.constraint())?, order);
        if t_apply(setup, &star_series(setup, &fs, &j)?, order)? != fj {
            return Ok(false);
        }
        let p = series(&setup.prol(f)?, order);
        if t_apply(setup, &p, order)? != p {
            return Ok(false);
        }
        let (pure, coeff) = decompose_deformed(setup, &fs, order)?;
        if recompose_deformed(setup, &pure, &coeff)? != fs {
            return Ok(false);
        }
    }
    Ok(true)
}

fn lemma1() -> Outcome {
    let order = 5;
    let count = 20;
    let mut rng = sample::rng(400);
    let flat: Vec<_> = (0..count).map(|_| sample::flat_poly(&mut rng, 2, 2, 3, 3)).collect();
    let even: Vec<_> = (0..count).map(|_| sample::even_radial(&mut rng, 2, 2, 2)).collect();
    let mu = q(-1, 2);
    let results = [
        ("flat", lemma1_for(&FlatSetup::new(2)?, &flat, order)?),
        ("radial-linear", lemma1_for(&RadialSetup::linear(1, mu.clone())?, &even, order)?),
        ("radial-quadratic", lemma1_for(&RadialSetup::quadratic(1, mu)?, &even, order)?),
    ];
    let failed: Vec<_> = results.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
    if failed.is_empty() {
        Ok((true, format!("{count} inputs per setup, order {order}")))
    } else {
        Ok((false, format!("failed: {}", failed.join(", "))))
    }
}

fn axioms_for(setup: &RadialSetup, seed: u64, order: usize) -> Result<bool> {
    let id = SStrategy::Identity;
    let mut rng = sample::rng(seed);
    let one = series(&setup.one(), order);
    for _ in 0..5 {
        let (f, g) = homogeneous_pair(&mut rng, setup.coords());
        let h = sample::nonconstant_homogeneous(&mut rng, setup.coords(), 1, 2);
        let (fs, gs, hs) = (series(&f, order), series(&g, order), series(&h, order));
        if reduce_star(setup, &id, &fs, &one, order)? != fs || reduce_star(setup, &id, &one, &fs, order)? != fs {
            return Ok(false);
        }
        let fg = reduce_star(setup, &id, &fs, &gs, order)?;
        let gf = reduce_star(setup, &id, &gs, &fs, order)?;
        if fg.coeff(0) != &f.mul(&g)? {
            return Ok(false);
        }
        let bracket = setup.prol(&poisson_radial(&f, &g)?)?.scale(&GaussianRational::i());
        if fg.coeff(1).sub(gf.coeff(1))? != bracket {
            return Ok(false);
        }
        let left = reduce_star(setup, &id, &fg, &hs, order)?;
        let right = reduce_star(setup, &id, &fs, &reduce_star(setup, &id, &gs, &hs, order)?, order)?;
        if left != right {
            return Ok(false);
        }
    }
    Ok(true)
}

fn star_axioms() -> Outcome {
    let order = 4;
    let mu = q(-1, 2);
    let lin = axioms_for(&RadialSetup::linear(1, mu.clone())?, 500, order)?;
    let quad = axioms_for(&RadialSetup::quadratic(1, mu)?, 501, order)?;
    Ok((lin && quad, format!("5 triples, order {order}: linear {lin}, quadratic {quad}")))
}

fn pr_words() -> Outcome {
    let order = 4;
    let setup = RadialSetup::quadratic(1, q(-1, 2))?;
    let mut rng = sample::rng(600);
    let inputs: Vec<_> = (0..10).map(|_| sample::even_radial(&mut rng, 2, 2, 2)).collect();
    let derived = (0..=order).map(|n| pr_t_word_sum(&setup, n, RVariant::Derived)).collect::<Result<Vec<_>>>()?;
    let printed = (0..=order).map(|n| pr_t_word_sum(&setup, n, RVariant::Printed)).collect::<Result<Vec<_>>>()?;
    let mut ok = true;
    let mut printed_fails_at: Option<usize> = None;
    for f in &inputs {
        let t = t_apply(&setup, &series(f, order), order)?;
        for n in 0..=order {
            ok &= &derived[n].apply(f)? == t.coeff(n);
            if &printed[n].apply(f)? != t.coeff(n) {
                printed_fails_at = Some(printed_fails_at.map_or(n, |m| m.min(n)));
            }
        }
    }
    let note = match printed_fails_at {
        Some(n) => format!("R = -(c2/2)E^2 pi_J disagrees from n = {n}"),
        None => "R = -(c2/2)E^2 pi_J also agrees".into(),
    };
    Ok((ok, format!("10 inputs, n <= {order}; {note}")))
}

fn obstruction() -> Outcome {
    let mu = q(-1, 2);
    let mut rng = sample::rng(700);
    let mut ratio: Option<GaussianRational> = None;
    let mut count = 0;
    while count < 5 {
        let (f, g) = homogeneous_pair(&mut rng, 2);
        if poisson_radial(&f, &g)?.is_zero() {
            continue;
        }
        let o = obstruction_order2(&f, &g, &mu)?;
        let Some(r) = o.ratio else {
            return Ok((false, format!("not proportional: f = {f}, g = {g}")));
        };
        if ratio.as_ref().is_some_and(|x| *x != r) {
            return Ok((false, format!("ratio varies: {} vs {r}", ratio.unwrap())));
        }
        ratio = Some(r);
        count += 1;
    }
    let r = ratio.expect("five pairs");
    Ok((!r.is_zero(), format!("{count} pairs, constant ratio {r} against the predicted 1")))
}

fn membership() -> Outcome {
    let order = 4;
    let setup = RadialSetup::linear(1, q(-1, 2))?;
    let j = series(&setup.constraint(), order);
    let mut rng = sample::rng(800);
    for _ in 0..10 {
        let g = sample::even_radial(&mut rng, 2, 2, 2);
        if !in_istar(&setup, &star_series(&setup, &series(&g, order), &j)?, order)? {
            return Ok((false, format!("g * J not in I* for g = {g}")));
        }
    }
    for _ in 0..10 {
        let h = sample::homogeneous(&mut rng, 2, 2, 2);
        if !in_bstar(&setup, &series(&h, order), order)? {
            return Ok((false, format!("homogeneous {h} not in B*")));
        }
    }
    let p = setup.prol(&sample::nonconstant_homogeneous(&mut rng, 2, 1, 2).add(&setup.one())?)?;
    if p.is_zero() || in_istar(&setup, &series(&p, order), order)? {
        return Ok((false, format!("pure prolongation {p} landed in I*")));
    }
    Ok((true, format!("10 ideal elements, 10 homogeneous, order {order}")))
}

fn round_trip(s: &SeriesValue, cfg: &RunConfig) -> Result<bool> {
    let human = render_series(s, OutputFormat::Human);
    let json = render_series(s, OutputFormat::Json);
    let again = render_series(s, OutputFormat::Human) == human && render_series(s, OutputFormat::Json) == json;
    let back = parse_series_human(&human, cfg)?;
    let parsed: serde_json::Value = serde_json::from_str(&json).expect("valid JSON");
    let from_json = series_from_json(&parsed, cfg)?;
    Ok(again && &back == s && &from_json == s && series_to_json(&back) == parsed)
}

fn cli_round_trip() -> Outcome {
    let order = 3;
    let mu = parse_rational("-1/2")?;
    let flat_cfg = RunConfig::new(Mode::Flat, 2, mu.clone(), order, OutputFormat::Human)?;
    let radial_cfg = RunConfig::new(Mode::RadialLinear, 1, mu.clone(), order, OutputFormat::Human)?;
    let flat = flat_cfg.flat_setup()?;
    let radial = radial_cfg.radial_setup()?;
    let mut rng = sample::rng(900);
    let mut ok = true;
    for _ in 0..5 {
        let f = sample::flat_poly(&mut rng, 2, 1, 3, 3);
        let g = sample::flat_poly(&mut rng, 2, 1, 3, 3);
        let compute = || reduce_star(&flat, &SStrategy::Identity, &series(&f, order), &series(&g, order), order);
        let a = SeriesValue::Flat(compute()?);
        let b = SeriesValue::Flat(compute()?);
        ok &= render_series(&a, OutputFormat::Human) == render_series(&b, OutputFormat::Human);
        ok &= round_trip(&a, &flat_cfg)?;
        let (f, g) = homogeneous_pair(&mut rng, 2);
        let compute = || reduce_star(&radial, &SStrategy::Identity, &series(&f, order), &series(&g, order), order);
        let a = SeriesValue::Radial(compute()?);
        let b = SeriesValue::Radial(compute()?);
        ok &= render_series(&a, OutputFormat::Json) == render_series(&b, OutputFormat::Json);
        ok &= round_trip(&a, &radial_cfg)?;
    }
    Ok((ok, "human and JSON re-parse, repeated renders identical".into()))
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 9] = [
        ("1 Moyal reduction", moyal_reduction),
        ("2 A coefficients", a_coefficients),
        ("3 CP^n engine vs closed formula", cpn_formula),
        ("4 decomposition identities", lemma1),
        ("5 star axioms", star_axioms),
        ("6 P/R words", pr_words),
        ("7 obstruction", obstruction),
        ("8 membership", membership),
        ("9 determinism and round trip", cli_round_trip),
    ];
    let mut failures = Vec::new();
    for (name, run) in criteria {
        let start = Instant::now();
        let (ok, detail) = match run() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        let secs = start.elapsed().as_secs_f64();
        // written to the handle directly so the line survives output capture
        let line = format!("{} {name}: {detail} [{secs:.1}s]\n", if ok { "PASS" } else { "FAIL" });
        let mut out = std::io::stdout().lock();
        out.write_all(line.as_bytes()).and_then(|_| out.flush()).expect("stdout");
        if !ok {
            failures.push(name);
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
