//! Text grammar shared by both function algebras.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' '-'? INT)?
//! atom   := INT | 'I' | 'u' | 'z'INT | 'zb'INT | 'q'INT | 'p'INT | '(' expr ')'
//! ```
//!
//! `u`, `zᵢ`, `zbᵢ` are radial-mode tokens and `qᵢ`, `pᵢ` flat-mode tokens.
//! Division and negative powers need a divisor that is a scalar (flat) or
//! depends on `u` only (radial).

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;

use crate::error::{Error, Result};
use crate::flatphase::{FlatPoly, FlatSetup};
use crate::radialphase::{ConstraintKind, RadialConstraint, RadialFun, RadialSetup};
use crate::scalar::GaussianRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Flat,
    RadialLinear,
    RadialQuadratic,
}

impl Mode {
    pub fn is_flat(self) -> bool {
        self == Mode::Flat
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flat" => Ok(Mode::Flat),
            "radial-linear" => Ok(Mode::RadialLinear),
            "radial-quadratic" => Ok(Mode::RadialQuadratic),
            _ => Err(Error::InvalidConfig(format!("unknown mode `{s}`"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Flat => "flat",
            Mode::RadialLinear => "radial-linear",
            Mode::RadialQuadratic => "radial-quadratic",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Human,
    Json,
    Tsv,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "human" => Ok(OutputFormat::Human),
            "json" => Ok(OutputFormat::Json),
            "tsv" => Ok(OutputFormat::Tsv),
            _ => Err(Error::InvalidConfig(format!("unknown output format `{s}`"))),
        }
    }
}

/// Parses `P/Q` or `P` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidConfig(format!("expected a rational P/Q, got `{s}`"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s.trim(), "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q == BigInt::from(0) {
        return Err(bad());
    }
    Ok(BigRational::new(p, q))
}

/// Validated run parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub mode: Mode,
    /// Flat: number of `(q, p)` pairs. Radial: the reduced space is ℂPⁿ.
    pub n: usize,
    pub mu: BigRational,
    pub order: usize,
    pub output: OutputFormat,
}

impl RunConfig {
    pub fn new(mode: Mode, n: usize, mu: BigRational, order: usize, output: OutputFormat) -> Result<Self> {
        if order < 1 {
            return Err(Error::InvalidConfig("order must be at least 1".into()));
        }
        match mode {
            Mode::Flat if n < 2 => return Err(Error::InvalidConfig("flat mode needs n >= 2".into())),
            Mode::RadialLinear | Mode::RadialQuadratic if n < 1 => {
                return Err(Error::InvalidConfig("radial modes need n >= 1".into()))
            }
            Mode::RadialLinear | Mode::RadialQuadratic if !mu.is_negative() => {
                return Err(Error::InvalidConfig(format!("mu must be negative, got {mu}")))
            }
            _ => {}
        }
        Ok(RunConfig { mode, n, mu, order, output })
    }

    /// Number of coordinate pairs (flat) or complex coordinates (radial).
    pub fn coords(&self) -> usize {
        if self.mode.is_flat() {
            self.n
        } else {
            self.n + 1
        }
    }

    pub fn flat_setup(&self) -> Result<FlatSetup> {
        FlatSetup::new(self.n)
    }

    pub fn radial_setup(&self) -> Result<RadialSetup> {
        let kind = match self.mode {
            Mode::RadialLinear => ConstraintKind::Linear,
            Mode::RadialQuadratic => ConstraintKind::Quadratic,
            Mode::Flat => return Err(Error::InvalidConfig("not a radial mode".into())),
        };
        Ok(RadialSetup::new(self.n, RadialConstraint::new(kind, self.mu.clone())?))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    I,
    U,
    Z(usize),
    Zb(usize),
    Q(usize),
    P(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    /// The divisor's byte offset is kept for diagnostics.
    Div(Box<Expr>, Box<Expr>, usize),
    Pow(Box<Expr>, i64, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String, Option<usize>),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let b = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((Tok::Int(src[start..i].parse().expect("digits")), start));
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                while i < b.len() && b[i].is_ascii_alphabetic() {
                    i += 1;
                }
                let name = src[start..i].to_string();
                let ds = i;
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
                let idx = if ds < i {
                    Some(src[ds..i].parse().map_err(|_| Error::Parse { offset: ds, message: "index too large".into() })?)
                } else {
                    None
                };
                out.push((Tok::Ident(name, idx), start));
                continue;
            }
            _ => {
                let ch = src[start..].chars().next().unwrap_or('?');
                return Err(Error::Parse { offset: start, message: format!("unexpected character `{ch}`") });
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    mode: Mode,
    coords: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse { offset: self.offset(), message: message.into() })
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.bump();
                    let at = self.offset();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?), at);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        let at = self.offset();
        self.bump();
        let neg = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        match self.bump() {
            (Tok::Int(k), off) => {
                let k: i64 = k.try_into().map_err(|_| Error::Parse { offset: off, message: "exponent too large".into() })?;
                Ok(Expr::Pow(Box::new(base), if neg { -k } else { k }, at))
            }
            (_, off) => Err(Error::Parse { offset: off, message: "exponent must be an integer".into() }),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let off = self.offset();
        match self.bump() {
            (Tok::Int(k), _) => Ok(Expr::Int(k)),
            (Tok::LParen, _) => {
                let e = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return self.err("expected `)`");
                }
                self.bump();
                Ok(e)
            }
            (Tok::Ident(name, idx), _) => self.ident(&name, idx, off),
            (Tok::End, _) => Err(Error::Parse { offset: off, message: "unexpected end of input".into() }),
            (t, _) => Err(Error::Parse { offset: off, message: format!("unexpected {}", tok_name(&t)) }),
        }
    }

    fn ident(&self, name: &str, idx: Option<usize>, off: usize) -> Result<Expr> {
        let perr = |message: String| Err(Error::Parse { offset: off, message });
        let radial_tok = matches!(name, "u" | "z" | "zb");
        let flat_tok = matches!(name, "q" | "p");
        if !(radial_tok || flat_tok || name == "I") {
            return perr(format!("unknown identifier `{name}`"));
        }
        if radial_tok && self.mode.is_flat() {
            return perr(format!("token `{name}` is not available in flat mode"));
        }
        if flat_tok && !self.mode.is_flat() {
            return perr(format!("token `{name}` is not available in radial mode"));
        }
        match (name, idx) {
            ("I", None) => Ok(Expr::I),
            ("u", None) => Ok(Expr::U),
            ("I" | "u", Some(_)) => perr(format!("`{name}` takes no index")),
            (_, None) => perr(format!("`{name}` needs an index")),
            (_, Some(i)) if i == 0 || i > self.coords => perr(format!("index {i} out of range 1..={}", self.coords)),
            ("z", Some(i)) => Ok(Expr::Z(i)),
            ("zb", Some(i)) => Ok(Expr::Zb(i)),
            ("q", Some(i)) => Ok(Expr::Q(i)),
            ("p", Some(i)) => Ok(Expr::P(i)),
            _ => unreachable!(),
        }
    }
}

fn tok_name(t: &Tok) -> String {
    match t {
        Tok::Int(k) => format!("number `{k}`"),
        Tok::Ident(n, Some(i)) => format!("`{n}{i}`"),
        Tok::Ident(n, None) => format!("`{n}`"),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Slash => "`/`".into(),
        Tok::Caret => "`^`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::End => "end of input".into(),
    }
}

/// Parses one expression, checking tokens against the mode.
pub fn parse_expression(src: &str, cfg: &RunConfig) -> Result<Expr> {
    let mut p = Parser { toks: lex(src)?, pos: 0, mode: cfg.mode, coords: cfg.coords() };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.err(format!("unexpected {}", tok_name(p.peek())));
    }
    Ok(e)
}

/// A parsed function in either algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Flat(FlatPoly),
    Radial(RadialFun),
}

impl Value {
    pub fn as_flat(&self) -> Option<&FlatPoly> {
        match self {
            Value::Flat(f) => Some(f),
            Value::Radial(_) => None,
        }
    }

    pub fn as_radial(&self) -> Option<&RadialFun> {
        match self {
            Value::Radial(f) => Some(f),
            Value::Flat(_) => None,
        }
    }

    pub fn to_expr_string(&self) -> String {
        match self {
            Value::Flat(f) => f.to_expr_string(),
            Value::Radial(f) => f.to_expr_string(),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_expr_string())
    }
}

fn flat_scalar(f: &FlatPoly) -> Option<GaussianRational> {
    if f.is_zero() {
        return Some(GaussianRational::zero());
    }
    let mut it = f.terms();
    let (e, c) = it.next()?;
    (it.next().is_none() && e.iter().all(|&k| k == 0)).then(|| c.clone())
}

fn binary(a: Value, b: Value, op: impl Fn(&RadialFun, &RadialFun) -> Result<RadialFun>, fop: impl Fn(&FlatPoly, &FlatPoly) -> Result<FlatPoly>) -> Result<Value> {
    match (a, b) {
        (Value::Flat(x), Value::Flat(y)) => Ok(Value::Flat(fop(&x, &y)?)),
        (Value::Radial(x), Value::Radial(y)) => Ok(Value::Radial(op(&x, &y)?)),
        _ => Err(Error::MismatchedAlgebras("flat and radial values combined".into())),
    }
}

/// Multiplicative inverse of a scalar or pure radial value.
fn invert(v: &Value, at: usize) -> Result<Value> {
    let perr = |m: &str| Error::Parse { offset: at, message: m.to_string() };
    match v {
        Value::Flat(f) => {
            let c = flat_scalar(f).ok_or_else(|| perr("divisor must be a scalar in flat mode"))?;
            let inv = c.inv().map_err(|_| perr("division by zero"))?;
            Ok(Value::Flat(FlatPoly::constant(f.dim(), inv)))
        }
        Value::Radial(f) => {
            let r = f.as_radial().ok_or_else(|| perr("divisor must depend on u only"))?;
            let inv = r.inv().map_err(|_| perr("division by zero"))?;
            Ok(Value::Radial(RadialFun::radial(f.coords(), inv)))
        }
    }
}

fn mul(a: Value, b: Value) -> Result<Value> {
    binary(a, b, RadialFun::mul, FlatPoly::mul)
}

/// Evaluates an expression in the algebra selected by the mode.
pub fn eval(e: &Expr, cfg: &RunConfig) -> Result<Value> {
    let k = cfg.coords();
    let scalar = |c: GaussianRational| {
        if cfg.mode.is_flat() {
            Value::Flat(FlatPoly::constant(k, c))
        } else {
            Value::Radial(RadialFun::constant(k, c))
        }
    };
    Ok(match e {
        Expr::Int(n) => scalar(GaussianRational::real(BigRational::from_integer(n.clone()))),
        Expr::I => scalar(GaussianRational::i()),
        Expr::U => Value::Radial(RadialFun::u(k)),
        Expr::Z(i) => Value::Radial(RadialFun::z(k, *i)),
        Expr::Zb(i) => Value::Radial(RadialFun::zbar(k, *i)),
        Expr::Q(i) => Value::Flat(FlatPoly::q(k, *i)),
        Expr::P(i) => Value::Flat(FlatPoly::p(k, *i)),
        Expr::Neg(x) => match eval(x, cfg)? {
            Value::Flat(f) => Value::Flat(f.scale(&GaussianRational::from_int(-1))),
            Value::Radial(f) => Value::Radial(f.neg()),
        },
        Expr::Add(a, b) => binary(eval(a, cfg)?, eval(b, cfg)?, RadialFun::add, FlatPoly::add)?,
        Expr::Sub(a, b) => binary(eval(a, cfg)?, eval(b, cfg)?, RadialFun::sub, FlatPoly::sub)?,
        Expr::Mul(a, b) => mul(eval(a, cfg)?, eval(b, cfg)?)?,
        Expr::Div(a, b, at) => mul(eval(a, cfg)?, invert(&eval(b, cfg)?, *at)?)?,
        Expr::Pow(b, n, at) => {
            let base = eval(b, cfg)?;
            let base = if *n < 0 { invert(&base, *at)? } else { base };
            let e = u32::try_from(n.unsigned_abs())
                .map_err(|_| Error::Parse { offset: *at, message: "exponent too large".into() })?;
            match base {
                Value::Flat(f) => Value::Flat(f.pow(e)),
                Value::Radial(f) => match f.as_radial() {
                    Some(r) => Value::Radial(RadialFun::radial(k, r.powi(e as i64)?)),
                    None => Value::Radial(f.pow(e)),
                },
            }
        }
    })
}

/// Parses and evaluates.
pub fn parse_value(src: &str, cfg: &RunConfig) -> Result<Value> {
    eval(&parse_expression(src, cfg)?, cfg)
}

pub fn parse_radial(src: &str, cfg: &RunConfig) -> Result<RadialFun> {
    match parse_value(src, cfg)? {
        Value::Radial(f) => Ok(f),
        Value::Flat(_) => Err(Error::InvalidConfig("expected a radial expression".into())),
    }
}

pub fn parse_flat(src: &str, cfg: &RunConfig) -> Result<FlatPoly> {
    match parse_value(src, cfg)? {
        Value::Flat(f) => Ok(f),
        Value::Radial(_) => Err(Error::InvalidConfig("expected a flat expression".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::RadialRational;

    fn cfg(mode: Mode, n: usize) -> RunConfig {
        RunConfig::new(mode, n, BigRational::new((-1).into(), 2.into()), 3, OutputFormat::Human).unwrap()
    }

    #[test]
    fn radial_term() {
        let c = cfg(Mode::RadialLinear, 1);
        let v = parse_radial("z1*zb2/u", &c).unwrap();
        assert_eq!(v, RadialFun::term(vec![1, 0], vec![0, 1], RadialRational::u_pow(-1)));
    }

    #[test]
    fn flat_monomial() {
        let c = cfg(Mode::Flat, 2);
        let v = parse_flat("q1^2*p2", &c).unwrap();
        assert_eq!(v, FlatPoly::monomial(vec![2, 0, 0, 1], GaussianRational::one()));
    }

    #[test]
    fn mode_mismatch_reports_offset() {
        let c = cfg(Mode::RadialLinear, 1);
        match parse_expression("z1*q1", &c) {
            Err(Error::Parse { offset, message }) => {
                assert_eq!(offset, 3);
                assert!(message.contains("radial mode"));
            }
            other => panic!("{other:?}"),
        }
        assert!(parse_expression("u", &cfg(Mode::Flat, 2)).is_err());
    }

    #[test]
    fn precedence() {
        let c = cfg(Mode::RadialLinear, 1);
        assert_eq!(parse_radial("-u^2", &c).unwrap(), RadialFun::u(2).pow(2).neg());
        assert_eq!(parse_radial("2*3+4", &c).unwrap(), RadialFun::constant(2, GaussianRational::from_int(10)));
        assert_eq!(parse_radial("1/2*I", &c).unwrap(), RadialFun::constant(2, &GaussianRational::from_ratio(1, 2) * &GaussianRational::i()));
        assert_eq!(parse_radial("u^-2", &c).unwrap(), RadialFun::radial(2, RadialRational::u_pow(-2)));
    }

    #[test]
    fn rejected_inputs() {
        let c = cfg(Mode::RadialLinear, 1);
        for (src, off) in [("z1/z2", 3), ("z1^-1", 2), ("u^x", 2), ("(u", 2), ("z3", 0), ("u $", 2), ("1/0", 2), ("", 0)] {
            match parse_value(src, &c) {
                Err(Error::Parse { offset, .. }) => assert_eq!(offset, off, "{src}"),
                other => panic!("{src}: {other:?}"),
            }
        }
    }

    #[test]
    fn config_validation() {
        let half = BigRational::new((-1).into(), 2.into());
        assert!(RunConfig::new(Mode::Flat, 1, half.clone(), 2, OutputFormat::Json).is_err());
        assert!(RunConfig::new(Mode::RadialLinear, 1, -half.clone(), 2, OutputFormat::Json).is_err());
        assert!(RunConfig::new(Mode::RadialLinear, 1, half.clone(), 0, OutputFormat::Json).is_err());
        assert_eq!(parse_rational("-3/4").unwrap(), BigRational::new((-3).into(), 4.into()));
        assert!(parse_rational("0.5").is_err());
    }

    #[test]
    fn printed_forms_round_trip() {
        let c = cfg(Mode::RadialQuadratic, 1);
        for src in ["z1*zb2*(u - 1)/(u^2 + 3) - 1/2*I*z2*zb1/u", "(2/3 - I)*u^3 + 5", "-I*z1^2*zb1^2/u^2"] {
            let v = parse_value(src, &c).unwrap();
            assert_eq!(parse_value(&v.to_expr_string(), &c).unwrap(), v, "{src} -> {v}");
        }
        let c = cfg(Mode::Flat, 3);
        let v = parse_value("q1*p3 - (1/2 + I)*q2^3 + 7", &c).unwrap();
        assert_eq!(parse_value(&v.to_expr_string(), &c).unwrap(), v);
    }
}
