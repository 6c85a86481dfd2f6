use std::process::Command;

use meandist::cli::{self, format_fixed, format_sig, parse_expr, Format};
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(std::iter::once("meandist").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

#[test]
fn robbins_constant() {
    let (code, out, _) = run(&["moments", "--solid", "cube", "--p", "1"]);
    assert_eq!(code, 0);
    assert_eq!(out, "0.661707182267 (closed-form)\n");
}

#[test]
fn tables_match_golden_files() {
    let (code, out, _) = run(&["table", "--which", "unit-volume", "--format", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(out, golden("table_unit_volume.csv"));
    let (_, out, _) = run(&["table", "--which", "v1", "--format", "csv"]);
    assert_eq!(out, golden("table_v1.csv"));
    let (_, out, _) = run(&["table", "--which", "normalised", "--format", "markdown"]);
    assert_eq!(out, golden("table_normalised.md"));
}

#[test]
fn json_round_trips() {
    for args in [
        vec!["table", "--which", "normalised", "--format", "json"],
        vec!["moments", "--solid", "all", "--p", "2", "--format", "json", "--digits", "10"],
        vec!["auxint", "--p", "1", "--i", "2", "--j", "0", "--q", "sqrt(2)/4", "--gamma", "pi/3", "--format", "json"],
        vec!["polygon", "--n", "7", "--limit", "--format", "json"],
    ] {
        let (code, out, _) = run(&args);
        assert_eq!(code, 0, "{args:?}");
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", out, "{args:?}");
    }
}

#[test]
fn auxint_prints_fifteen_significant_digits() {
    let (code, out, _) = run(&["auxint", "--p", "1", "--i", "0", "--j", "0", "--q", "1", "--gamma", "pi/4"]);
    assert_eq!(code, 0);
    assert_eq!(out, "0.640394637636702\n");
    let (_, out, _) = run(&["auxint", "--p", "1", "--i", "1", "--j", "0", "--q", "sqrt(2)/4", "--gamma", "pi/3"]);
    assert_eq!(out, "0.0273382614621348\n");
}

#[test]
fn polygon_subcommand() {
    let (code, out, _) = run(&["polygon", "--n", "4", "--p", "2"]);
    assert_eq!(code, 0);
    assert_eq!(out, "0.666666666667 (closed-form)\n");
    let (code, out, _) = run(&["polygon", "--n", "6", "--p", "6", "--closed-form", "--format", "csv"]);
    assert_eq!(code, 0);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[2], row[3]);
    let (code, _, err) = run(&["polygon", "--n", "6", "--p", "3", "--closed-form"]);
    assert_eq!(code, 1);
    assert!(err.contains("out of range"));
}

#[test]
fn verify_passes_and_is_seeded() {
    let args = ["verify", "--solid", "octahedron", "--p", "1", "--samples", "200000", "--seed", "5", "--format", "csv"];
    let (code, a, _) = run(&args);
    assert_eq!(code, 0);
    assert!(a.trim_end().ends_with("PASS"));
    let (_, b, _) = run(&args);
    assert_eq!(a, b);
    let (code, _, err) = run(&["verify", "--solid", "cube", "--p", "1"]);
    assert_eq!(code, 1);
    assert!(err.contains("--seed"));
}

#[test]
fn verify_reports_disagreement() {
    let dir = std::env::temp_dir().join(format!("meandist-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let f = dir.join("tet.json");
    std::fs::write(&f, r#"{"dim": 3, "vertices": [[0,0,0],[1,0,0],[0,1,0],[0,0,1]]}"#).unwrap();
    let (code, out, _) = run(&["verify", "--file", f.to_str().unwrap(), "--p", "2", "--samples", "100000", "--seed", "1"]);
    assert_eq!(code, 0, "{out}");
    // Too few samples to resolve anything at zero width.
    let (code, out, _) = run(&["verify", "--file", f.to_str().unwrap(), "--p", "2", "--samples", "100000", "--seed", "1", "--sigma", "0"]);
    assert_eq!(code, 2, "{out}");
    assert!(out.contains("FAIL"));
    let (code, out, _) = run(&["tetra", "--file", f.to_str().unwrap(), "--p", "2"]);
    assert_eq!(code, 0);
    assert_eq!(out, "0.225000000000 (closed-form)\n");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        vec!["moments", "--solid", "cube", "--p", "1", "--bogus"],
        vec!["moments", "--solid", "heptahedron", "--p", "1"],
        vec!["moments", "--solid", "cube", "--p", "-2"],
        vec!["auxint", "--p", "1", "--i", "3", "--j", "0", "--q", "1", "--gamma", "pi/4"],
        vec!["auxint", "--p", "1", "--i", "0", "--j", "0", "--q", "1", "--gamma", "pi/"],
        vec!["tetra", "--vertices", "0,0,0;1,0,0;0,1,0", "--p", "1"],
        vec!["general", "--file", "/nonexistent/k.json", "--p", "1"],
        vec![],
    ] {
        let (code, _, err) = run(&args);
        assert_eq!(code, 1, "{args:?}");
        assert!(!err.is_empty(), "{args:?}");
    }
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("moments"));
}

#[test]
fn normalizations() {
    let (_, out, _) = run(&["moments", "--solid", "ball", "--p", "1", "--normalize", "v1", "--digits", "8"]);
    assert_eq!(out, "0.25714286 (closed-form)\n");
    let (_, out, _) = run(&["moments", "--solid", "dodecahedron", "--p", "1", "--normalize", "volume", "--digits", "8"]);
    assert_eq!(out, "0.64252068 (closed-form)\n");
    let (_, out, _) = run(&["general", "--solid", "cube", "--p", "2", "--sequential", "--digits", "10"]);
    assert_eq!(out, "0.5000000000 (closed-form)\n");
}

#[test]
fn expressions() {
    let pi = std::f64::consts::PI;
    let cases = [
        ("pi/5", pi / 5.0),
        ("2pi/5", 2.0 * pi / 5.0),
        ("2 pi / 5", 2.0 * pi / 5.0),
        ("atan(sqrt(5-2sqrt(5))/3)", ((5.0 - 2.0 * 5f64.sqrt()).sqrt() / 3.0).atan()),
        ("sqrt(2)/4", 2f64.sqrt() / 4.0),
        ("-1.5e-1", -0.15),
        ("phi^2", (1.5 + 5f64.sqrt() / 2.0) * 1.0),
        ("2^-1", 0.5),
        ("-2^2", -4.0),
        ("3(1+1)", 6.0),
        ("ln(exp(1))", 1.0),
    ];
    for (s, want) in cases {
        let v = parse_expr(s).unwrap();
        assert!((v - want).abs() < 1e-15 * want.abs().max(1.0), "{s}: {v} vs {want}");
    }
    for bad in ["", "pi/", "foo(2)", "sqrt 2", "(1", "1/0", "1 2"] {
        assert!(parse_expr(bad).is_err(), "{bad}");
    }
}

#[test]
fn rounding_is_half_even_on_exact_ties() {
    assert_eq!(format_fixed(0.125, 2), "0.12");
    assert_eq!(format_fixed(0.375, 2), "0.38");
    assert_eq!(format_fixed(2.5, 0), "2");
    assert_eq!(format_fixed(-0.0001, 2), "0.00");
    assert_eq!(format_sig(0.000123456, 3), "0.000123");
    assert_eq!(format_sig(123456.0, 3), "123456");
    assert_eq!(format_sig(1.5e-9, 2), "1.5e-9");
}

#[test]
fn formats_share_rows() {
    let r = cli::table(cli::Which::UnitVolume, 8).unwrap();
    assert_eq!(r.rows.len(), 6);
    let text = r.render(Format::Text);
    assert!(text.starts_with("solid"));
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_meandist");
    let ok = Command::new(bin).args(["moments", "--solid", "cube", "--p", "1", "--digits", "8"]).env("MEANDIST_MAX_THREADS", "2").output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&ok.stdout), "0.66170718 (closed-form)\n");
    let bad = Command::new(bin).args(["moments", "--solid", "cube"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    let fail = Command::new(bin).args(["verify", "--polygon", "5", "--p", "1", "--samples", "1000", "--seed", "1", "--sigma", "0"]).output().unwrap();
    assert_eq!(fail.status.code(), Some(2));
}
