//! Human, JSON and TSV renderings of series, coefficient tables and
//! comparison reports. All output is deterministic: terms follow the sorted
//! order of the underlying maps and JSON objects have sorted keys.

use serde_json::{json, Value as Json};

use crate::cpn::{CoeffKind, CoeffTable, Obstruction};
use crate::error::{Error, Result};
use crate::expr::{parse_value, OutputFormat, RunConfig, Value};
use crate::flatphase::FlatPoly;
use crate::radialphase::RadialFun;
use crate::scalar::{fmt_rat_pq, GaussianRational, LambdaSeries, RadialRational, UPoly};

/// A series in either algebra.
#[derive(Clone, Debug, PartialEq)]
pub enum SeriesValue {
    Flat(LambdaSeries<FlatPoly>),
    Radial(LambdaSeries<RadialFun>),
}

impl SeriesValue {
    pub fn order(&self) -> usize {
        match self {
            SeriesValue::Flat(s) => s.order(),
            SeriesValue::Radial(s) => s.order(),
        }
    }

    fn coeff_strings(&self) -> Vec<String> {
        match self {
            SeriesValue::Flat(s) => s.coeffs().iter().map(FlatPoly::to_expr_string).collect(),
            SeriesValue::Radial(s) => s.coeffs().iter().map(RadialFun::to_expr_string).collect(),
        }
    }
}

pub fn render_series(s: &SeriesValue, fmt: OutputFormat) -> String {
    match fmt {
        OutputFormat::Human => series_to_human(s),
        OutputFormat::Json => to_json_string(&series_to_json(s)),
        OutputFormat::Tsv => series_to_tsv(s),
    }
}

fn to_json_string(v: &Json) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serialisable");
    s.push('\n');
    s
}

/// One `lambda^k: <expr>` line per order.
pub fn series_to_human(s: &SeriesValue) -> String {
    s.coeff_strings().iter().enumerate().map(|(k, e)| format!("lambda^{k}: {e}\n")).collect()
}

/// Inverse of [`series_to_human`]; blank lines are ignored.
pub fn parse_series_human(text: &str, cfg: &RunConfig) -> Result<SeriesValue> {
    let mut values = Vec::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let body = line.trim_end_matches(['\n', '\r']);
        if body.trim().is_empty() {
            offset += line.len();
            continue;
        }
        let want = format!("lambda^{}:", values.len());
        let rest = body.strip_prefix(&want).ok_or_else(|| Error::Parse {
            offset,
            message: format!("expected a line starting with `{want}`"),
        })?;
        let start = offset + want.len();
        let v = parse_value(rest, cfg).map_err(|e| match e {
            Error::Parse { offset, message } => Error::Parse { offset: start + offset, message },
            other => other,
        })?;
        values.push(v);
        offset += line.len();
    }
    if values.is_empty() {
        return Err(Error::Parse { offset: 0, message: "empty series".into() });
    }
    if cfg.mode.is_flat() {
        let v = values.into_iter().map(|v| v.as_flat().cloned().expect("flat mode")).collect();
        Ok(SeriesValue::Flat(LambdaSeries::new(v)))
    } else {
        let v = values.into_iter().map(|v| v.as_radial().cloned().expect("radial mode")).collect();
        Ok(SeriesValue::Radial(LambdaSeries::new(v)))
    }
}

pub fn scalar_to_json(c: &GaussianRational) -> Json {
    json!({ "re": fmt_rat_pq(&c.re), "im": fmt_rat_pq(&c.im) })
}

fn poly_to_json(p: &UPoly) -> Json {
    Json::Array(p.coeffs().iter().map(scalar_to_json).collect())
}

fn radial_fun_to_json(f: &RadialFun) -> Json {
    let terms: Vec<Json> = f
        .terms()
        .map(|((a, b), r)| json!({ "alpha": a, "beta": b, "num": poly_to_json(r.numer()), "den": poly_to_json(r.denom()) }))
        .collect();
    json!({ "terms": terms })
}

fn flat_poly_to_json(f: &FlatPoly) -> Json {
    let n = f.dim();
    let terms: Vec<Json> =
        f.terms().map(|(e, c)| json!({ "q": &e[..n], "p": &e[n..], "coeff": scalar_to_json(c) })).collect();
    json!({ "terms": terms })
}

/// `{ "order": N, "coeffs": [ { "terms": [...] }, ... ] }`.
pub fn series_to_json(s: &SeriesValue) -> Json {
    let coeffs: Vec<Json> = match s {
        SeriesValue::Flat(s) => s.coeffs().iter().map(flat_poly_to_json).collect(),
        SeriesValue::Radial(s) => s.coeffs().iter().map(radial_fun_to_json).collect(),
    };
    json!({ "order": s.order(), "coeffs": coeffs })
}

fn bad_json(m: &str) -> Error {
    Error::Parse { offset: 0, message: format!("malformed JSON series: {m}") }
}

fn scalar_from_json(v: &Json) -> Result<GaussianRational> {
    let part = |k: &str| -> Result<num_rational::BigRational> {
        let s = v.get(k).and_then(Json::as_str).ok_or_else(|| bad_json("scalar needs re and im strings"))?;
        crate::expr::parse_rational(s).map_err(|_| bad_json("bad rational"))
    };
    Ok(GaussianRational::new(part("re")?, part("im")?))
}

fn poly_from_json(v: &Json) -> Result<UPoly> {
    let arr = v.as_array().ok_or_else(|| bad_json("polynomial must be an array"))?;
    Ok(UPoly::from_coeffs(arr.iter().map(scalar_from_json).collect::<Result<_>>()?))
}

fn index_from_json(v: &Json, len: usize) -> Result<Vec<u32>> {
    let arr = v.as_array().ok_or_else(|| bad_json("multi-index must be an array"))?;
    if arr.len() != len {
        return Err(bad_json("multi-index has the wrong length"));
    }
    arr.iter().map(|x| x.as_u64().and_then(|x| u32::try_from(x).ok()).ok_or_else(|| bad_json("bad exponent"))).collect()
}

/// Inverse of [`series_to_json`].
pub fn series_from_json(v: &Json, cfg: &RunConfig) -> Result<SeriesValue> {
    let coeffs = v.get("coeffs").and_then(Json::as_array).ok_or_else(|| bad_json("missing coeffs"))?;
    if coeffs.is_empty() {
        return Err(bad_json("empty series"));
    }
    let k = cfg.coords();
    let terms_of = |c: &Json| -> Result<Vec<Json>> {
        c.get("terms").and_then(Json::as_array).cloned().ok_or_else(|| bad_json("missing terms"))
    };
    if cfg.mode.is_flat() {
        let mut out = Vec::new();
        for c in coeffs {
            let mut f = FlatPoly::zero(k);
            for t in terms_of(c)? {
                let mut e = index_from_json(&t["q"], k)?;
                e.extend(index_from_json(&t["p"], k)?);
                f = f.add(&FlatPoly::monomial(e, scalar_from_json(&t["coeff"])?))?;
            }
            out.push(f);
        }
        Ok(SeriesValue::Flat(LambdaSeries::new(out)))
    } else {
        let mut out = Vec::new();
        for c in coeffs {
            let mut f = RadialFun::zero(k);
            for t in terms_of(c)? {
                let r = RadialRational::new(poly_from_json(&t["num"])?, poly_from_json(&t["den"])?)?;
                f = f.add(&RadialFun::term(index_from_json(&t["alpha"], k)?, index_from_json(&t["beta"], k)?, r))?;
            }
            out.push(f);
        }
        Ok(SeriesValue::Radial(LambdaSeries::new(out)))
    }
}

fn join_idx(v: &[u32]) -> String {
    v.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

fn poly_tsv(p: &UPoly) -> String {
    p.coeffs().iter().map(|c| format!("{}:{}", fmt_rat_pq(&c.re), fmt_rat_pq(&c.im))).collect::<Vec<_>>().join(",")
}

/// One row per term. Radial: `order alpha beta num den`; flat:
/// `order q p coeff`.
pub fn series_to_tsv(s: &SeriesValue) -> String {
    let mut out = String::new();
    match s {
        SeriesValue::Radial(s) => {
            out.push_str("order\talpha\tbeta\tnum\tden\n");
            for (k, f) in s.coeffs().iter().enumerate() {
                for ((a, b), r) in f.terms() {
                    out.push_str(&format!("{k}\t{}\t{}\t{}\t{}\n", join_idx(a), join_idx(b), poly_tsv(r.numer()), poly_tsv(r.denom())));
                }
            }
        }
        SeriesValue::Flat(s) => {
            out.push_str("order\tq\tp\tcoeff\n");
            for (k, f) in s.coeffs().iter().enumerate() {
                let n = f.dim();
                for (e, c) in f.terms() {
                    out.push_str(&format!(
                        "{k}\t{}\t{}\t{}:{}\n",
                        join_idx(&e[..n]),
                        join_idx(&e[n..]),
                        fmt_rat_pq(&c.re),
                        fmt_rat_pq(&c.im)
                    ));
                }
            }
        }
    }
    out
}

fn kind_name(k: CoeffKind) -> &'static str {
    match k {
        CoeffKind::A => "A",
        CoeffKind::B => "B",
    }
}

pub fn render_table(t: &CoeffTable, fmt: OutputFormat) -> String {
    let name = kind_name(t.kind);
    match fmt {
        OutputFormat::Human => {
            let mut out = String::new();
            if let Some(mu) = &t.mu {
                out.push_str(&format!("# mu = {mu}\n"));
            }
            for ((k, l), v) in &t.entries {
                out.push_str(&format!("{name}({k},{l}) = {v}\n"));
            }
            out
        }
        OutputFormat::Tsv => {
            let mut out = String::from("kind\tk\tl\tre\tim\n");
            for ((k, l), v) in &t.entries {
                out.push_str(&format!("{name}\t{k}\t{l}\t{}\t{}\n", fmt_rat_pq(&v.re), fmt_rat_pq(&v.im)));
            }
            out
        }
        OutputFormat::Json => {
            let entries: Vec<Json> =
                t.entries.iter().map(|((k, l), v)| json!({ "k": k, "l": l, "value": scalar_to_json(v) })).collect();
            let mu = t.mu.as_ref().map(|m| Json::String(fmt_rat_pq(m))).unwrap_or(Json::Null);
            to_json_string(&json!({ "kind": name, "mu": mu, "entries": entries }))
        }
    }
}

pub fn render_obstruction(o: &Obstruction, fmt: OutputFormat) -> String {
    match fmt {
        OutputFormat::Human => {
            let ratio = o.ratio.as_ref().map(|r| r.to_string()).unwrap_or_else(|| "undefined".into());
            format!("lhs: {}\nrhs: {}\nratio: {ratio}\n", o.lhs, o.rhs)
        }
        OutputFormat::Tsv => {
            let ratio = o.ratio.as_ref().map(|r| format!("{}:{}", fmt_rat_pq(&r.re), fmt_rat_pq(&r.im))).unwrap_or_default();
            format!("field\tvalue\nlhs\t{}\nrhs\t{}\nratio\t{ratio}\n", o.lhs, o.rhs)
        }
        OutputFormat::Json => {
            let single = |f: &RadialFun| series_to_json(&SeriesValue::Radial(LambdaSeries::new(vec![f.clone()])));
            to_json_string(&json!({
                "lhs": single(&o.lhs),
                "rhs": single(&o.rhs),
                "ratio": o.ratio.as_ref().map(scalar_to_json).unwrap_or(Json::Null),
            }))
        }
    }
}

/// Wraps a single value as an order-0 series.
pub fn value_series(v: &Value) -> SeriesValue {
    match v {
        Value::Flat(f) => SeriesValue::Flat(LambdaSeries::new(vec![f.clone()])),
        Value::Radial(f) => SeriesValue::Radial(LambdaSeries::new(vec![f.clone()])),
    }
}
