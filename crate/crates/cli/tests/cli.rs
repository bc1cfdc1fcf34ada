use std::process::{Command, Output};

use costar_core::expr::{parse_rational, Mode, OutputFormat, RunConfig};
use costar_core::format::{parse_series_human, render_series};

fn costar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_costar")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

#[test]
fn repeated_runs_are_byte_identical() {
    let cases: [&[&str]; 4] = [
        &["--mode", "flat", "--n", "3", "--order", "4", "reduce", "q1^2*p2 + 3/2*q2", "p1*q2^2 - I"],
        &["--order", "3", "--out", "json", "reduce", "z1*zb2/u", "z2*zb1/u + 2"],
        &["--mode", "radial-quadratic", "--out", "tsv", "star", "z1*zb1/(u+1)", "u^2"],
        &["--out", "tsv", "coeffs", "--kind", "A", "--kmax", "4", "--lmax", "4"],
    ];
    for args in cases {
        let a = costar(args);
        let b = costar(args);
        assert!(a.status.success(), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn human_output_reparses_to_the_same_series() {
    let mu = parse_rational("-1/2").unwrap();
    let cases = [
        (Mode::Flat, 2, vec!["--mode", "flat", "--n", "2", "--order", "3", "star", "q1^3 + q2*p1", "p1^2 - 2*I*q1"]),
        (Mode::RadialLinear, 1, vec!["--order", "3", "reduce", "z1*zb2/u - 1/3", "z2*zb1/u"]),
        (Mode::RadialQuadratic, 1, vec!["--mode", "radial-quadratic", "--order", "2", "star", "z1*zb1/(u+2)", "z2*zb2*u"]),
    ];
    for (mode, n, args) in cases {
        let out = costar(&args);
        assert!(out.status.success());
        let text = stdout(&out);
        let cfg = RunConfig::new(mode, n, mu.clone(), 3, OutputFormat::Human).unwrap();
        let parsed = parse_series_human(&text, &cfg).unwrap();
        assert_eq!(render_series(&parsed, OutputFormat::Human), text);
    }
}

#[test]
fn printed_coefficient_feeds_back_as_input() {
    let lead = |text: String| text.lines().next().unwrap().to_string();
    let first = lead(stdout(&costar(&["--order", "1", "star", "z1*zb2/u + 1/2", "z2*zb1/u"])));
    let expr = first.strip_prefix("lambda^0: ").unwrap().to_string();
    let again = lead(stdout(&costar(&["--order", "1", "star", &expr, "1"])));
    assert_eq!(first, again);
}

#[test]
fn coefficient_table_has_sixteen_entries() {
    let out = costar(&["--out", "tsv", "coeffs", "--kind", "A", "--kmax", "4", "--lmax", "4"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows: Vec<_> = text.lines().filter(|l| l.starts_with('A')).collect();
    assert_eq!(rows.len(), 16);
    assert!(rows.contains(&"A\t2\t1\t-3/1\t0/1"), "{text}");
}

#[test]
fn b_table_by_total_degree() {
    let out = costar(&["coeffs", "--kind", "B", "--total", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("B(1,1) = -3/2"), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("B(")).count(), 6);
}

#[test]
fn obstruction_reports_ratio() {
    let out = costar(&["obstruct", "z1*zb2/u", "z2*zb1/u"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("-2"), "{}", stdout(&out));
}

#[test]
fn passing_suite_exits_zero() {
    let out = costar(&["verify", "--suite", "acoeff"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn usage_errors_exit_two() {
    let cases: [&[&str]; 7] = [
        &["star", "z1"],
        &["star", "z1*zb1", "(1"],
        &["--mu", "1/2", "star", "1", "1"],
        &["--mode", "flat", "--n", "1", "star", "q1", "p1"],
        &["verify", "--suite", "nope"],
        &["coeffs", "--kind", "A", "--kmax", "3"],
        &["reduce", "z1", "zb1"],
    ];
    for args in cases {
        let out = costar(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn invalid_thread_count_is_a_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_costar"))
        .env("COSTAR_THREADS", "zero")
        .args(["coeffs", "--kind", "A", "--total", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn expressions_from_file() {
    let dir = std::env::temp_dir().join(format!("costar-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("pair.txt");
    std::fs::write(&path, "z1*zb2/u\n\nz2*zb1/u\n").unwrap();
    let from_file = costar(&["--file", path.to_str().unwrap(), "reduce"]);
    let inline = costar(&["reduce", "z1*zb2/u", "z2*zb1/u"]);
    std::fs::remove_dir_all(&dir).unwrap();
    assert!(from_file.status.success());
    assert_eq!(from_file.stdout, inline.stdout);
}
