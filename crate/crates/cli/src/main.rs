use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use costar_core::cpn::{
    coeff_table_rect, coeff_table_triangle, default_total, obstruction_order2, CoeffKind,
};
use costar_core::expr::{parse_rational, parse_value, Mode, OutputFormat, RunConfig, Value};
use costar_core::flatphase::{moyal_product, FlatPoly};
use costar_core::format::{render_obstruction, render_series, render_table, SeriesValue};
use costar_core::radialphase::{wick_product, RadialFun};
use costar_core::reduction::{reduce_star, SStrategy};
use costar_core::scalar::LambdaSeries;
use costar_core::verify::{run_suite, Suite, VerifyParams};
use costar_core::Error;

#[derive(Parser, Debug)]
#[command(name = "costar", version, about = "Exact star products and their reduction by a constraint")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct Global {
    /// flat, radial-linear or radial-quadratic
    #[arg(long, global = true, default_value = "radial-linear")]
    mode: String,
    /// Flat: number of (q, p) pairs. Radial: reduced space CP^n on C^(n+1).
    #[arg(long, global = true, default_value_t = 1)]
    n: usize,
    /// Exact rational P/Q, negative
    #[arg(long, global = true, default_value = "-1/2", allow_hyphen_values = true)]
    mu: String,
    /// Truncation order N
    #[arg(long, global = true, default_value_t = 3)]
    order: usize,
    /// human, json or tsv
    #[arg(long = "out", global = true, default_value = "human")]
    out: String,
    /// Read expressions from a file, one per line
    #[arg(long, global = true)]
    file: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Unreduced star product f * g
    Star { exprs: Vec<String> },
    /// Reduced star product with S = Id (inputs must be admissible)
    Reduce { exprs: Vec<String> },
    /// A or B coefficient table
    Coeffs(CoeffsArgs),
    /// Order-two difference of the two reduced products on CP^n
    Obstruct { exprs: Vec<String> },
    /// Run the property suites
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    A,
    B,
}

#[derive(Args, Debug)]
struct CoeffsArgs {
    #[arg(long, value_enum, ignore_case = true)]
    kind: KindArg,
    /// Rows k = 1..=KMAX (with --lmax)
    #[arg(long, requires = "lmax")]
    kmax: Option<u32>,
    /// Columns l = 0..LMAX-1 (with --kmax)
    #[arg(long, requires = "kmax")]
    lmax: Option<u32>,
    /// All cells with k + l <= TOTAL (default 10 for A, 5 for B)
    #[arg(long, conflicts_with_all = ["kmax", "lmax"])]
    total: Option<u32>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 4)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

enum Failure {
    Usage(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn config(g: &Global) -> Result<RunConfig, Failure> {
    let mode: Mode = g.mode.parse()?;
    let out: OutputFormat = g.out.parse()?;
    Ok(RunConfig::new(mode, g.n, parse_rational(&g.mu)?, g.order, out)?)
}

fn gather(g: &Global, exprs: &[String], want: usize) -> Result<Vec<String>, Failure> {
    let mut all = exprs.to_vec();
    if let Some(path) = &g.file {
        let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        all.extend(text.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from));
    }
    if all.len() != want {
        return Err(Failure::Usage(format!("expected {want} expressions, got {}", all.len())));
    }
    Ok(all)
}

fn parse_all(cfg: &RunConfig, srcs: &[String]) -> Result<Vec<Value>, Failure> {
    srcs.iter()
        .map(|s| parse_value(s, cfg).map_err(|e| Failure::Usage(format!("in `{s}`: {e}"))))
        .collect()
}

fn flat_pair(v: &[Value]) -> (FlatPoly, FlatPoly) {
    (v[0].as_flat().cloned().expect("flat mode"), v[1].as_flat().cloned().expect("flat mode"))
}

fn radial_pair(v: &[Value]) -> (RadialFun, RadialFun) {
    (v[0].as_radial().cloned().expect("radial mode"), v[1].as_radial().cloned().expect("radial mode"))
}

fn cmd_star(g: &Global, exprs: &[String]) -> Result<String, Failure> {
    let cfg = config(g)?;
    let v = parse_all(&cfg, &gather(g, exprs, 2)?)?;
    let s = if cfg.mode.is_flat() {
        let (f, h) = flat_pair(&v);
        SeriesValue::Flat(moyal_product(&f, &h, cfg.order)?)
    } else {
        let (f, h) = radial_pair(&v);
        SeriesValue::Radial(wick_product(&f, &h, cfg.order)?)
    };
    Ok(render_series(&s, cfg.output))
}

fn cmd_reduce(g: &Global, exprs: &[String]) -> Result<String, Failure> {
    let cfg = config(g)?;
    let v = parse_all(&cfg, &gather(g, exprs, 2)?)?;
    let n = cfg.order;
    let s = if cfg.mode.is_flat() {
        let (f, h) = flat_pair(&v);
        let setup = cfg.flat_setup()?;
        let r = reduce_star(&setup, &SStrategy::Identity, &LambdaSeries::constant(f, n), &LambdaSeries::constant(h, n), n)?;
        SeriesValue::Flat(r)
    } else {
        let (f, h) = radial_pair(&v);
        let setup = cfg.radial_setup()?;
        let r = reduce_star(&setup, &SStrategy::Identity, &LambdaSeries::constant(f, n), &LambdaSeries::constant(h, n), n)?;
        SeriesValue::Radial(r)
    };
    Ok(render_series(&s, cfg.output))
}

fn cmd_coeffs(g: &Global, a: &CoeffsArgs) -> Result<String, Failure> {
    let out: OutputFormat = g.out.parse()?;
    let mu = parse_rational(&g.mu)?;
    let kind = match a.kind {
        KindArg::A => CoeffKind::A,
        KindArg::B => CoeffKind::B,
    };
    let table = match (a.kmax, a.lmax) {
        (Some(k), Some(l)) => coeff_table_rect(kind, k, l, &mu)?,
        _ => coeff_table_triangle(kind, a.total.unwrap_or_else(|| default_total(kind)), &mu)?,
    };
    Ok(render_table(&table, out))
}

fn cmd_obstruct(g: &Global, exprs: &[String]) -> Result<String, Failure> {
    let mut cfg = config(g)?;
    if cfg.mode.is_flat() {
        return Err(Failure::Usage("obstruct needs a radial mode".into()));
    }
    cfg.mode = Mode::RadialLinear;
    let v = parse_all(&cfg, &gather(g, exprs, 2)?)?;
    let (f, h) = radial_pair(&v);
    Ok(render_obstruction(&obstruction_order2(&f, &h, &cfg.mu)?, cfg.output))
}

fn cmd_verify(g: &Global, a: &VerifyArgs) -> Result<String, Failure> {
    let suite: Suite = a.suite.parse()?;
    if g.order < 1 {
        return Err(Failure::Usage("order must be at least 1".into()));
    }
    let checks = run_suite(suite, &VerifyParams { order: g.order, samples: a.samples, seed: a.seed });
    let text: String = checks.iter().map(|c| format!("{c}\n")).collect();
    print!("{text}");
    if checks.iter().all(|c| c.passed) {
        Ok(String::new())
    } else {
        Err(Failure::Verification)
    }
}

fn init_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var("COSTAR_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Failure::Usage(format!("COSTAR_THREADS must be a positive integer, got `{v}`")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<String, Failure> {
    init_threads()?;
    let g = &cli.global;
    match &cli.cmd {
        Cmd::Star { exprs } => cmd_star(g, exprs),
        Cmd::Reduce { exprs } => cmd_reduce(g, exprs),
        Cmd::Coeffs(a) => cmd_coeffs(g, a),
        Cmd::Obstruct { exprs } => cmd_obstruct(g, exprs),
        Cmd::Verify(a) => cmd_verify(g, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("costar: {msg}");
            ExitCode::from(2)
        }
    }
}
