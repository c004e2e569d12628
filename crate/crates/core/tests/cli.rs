use std::path::Path;
use std::process::Command;

use lcp_bounds::cli::{run, EXIT_CHECK_FAILED, EXIT_INPUT, EXIT_OK, EXIT_SOLVER};
use lcp_bounds::gallery::{random_psd_instance, BPolicy};
use lcp_bounds::io::{save_instance, save_operator};
use tempfile::TempDir;

fn lcp(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(
        std::iter::once("lcp-bounds").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    let prefix = format!("{key} = ");
    text.lines()
        .find_map(|l| l.strip_prefix(prefix.as_str()))
        .unwrap_or_else(|| panic!("no `{key}` in\n{text}"))
}

/// Field of the `[label]` block of a certificate.
fn check_field<'a>(text: &'a str, label: &str, key: &str) -> &'a str {
    let start = text
        .find(&format!("[{label}]"))
        .unwrap_or_else(|| panic!("no [{label}] in\n{text}"));
    field(&text[start..], key)
}

fn real(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn analyze_diagonal_operator() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "d.op", "3 auto\n3 0 0\n0 1 0\n0 0 0\n");
    let (code, out, _) = lcp(&["analyze", &f]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert_eq!(out.lines().next().unwrap(), "M=3 m=0 m_r=1 rank=2 psd=true");
    for key in ["residual_M_pinv_m_r", "residual_m_r_pinv_M", "residual_norm_pinv_m_r"] {
        assert!(real(field(&out, key)) <= 1e-8);
    }
}

#[test]
fn analyze_identity_has_unit_functionals() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "i.op", "2 auto\n1 0\n0 1\n");
    let (code, out, _) = lcp(&["analyze", &f]);
    assert_eq!(code, EXIT_OK);
    for key in ["M", "m", "m_r", "R1", "R2", "R3", "R4", "M_pinv", "m_r_pinv"] {
        assert_eq!(real(field(&out, key)), 1.0, "{key}");
    }
}

#[test]
fn analyze_random_psd_file() {
    let dir = TempDir::new().unwrap();
    let ri = random_psd_instance(12, 7, 0.01, 50.0, 4, BPolicy::FullSpace).unwrap();
    let p = dir.path().join("r.op");
    save_operator(&p, ri.instance.operator()).unwrap();
    let (code, out, _) = lcp(&["analyze", p.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(real(field(&out, "residual_norm_pinv_m_r")) <= 1e-8);
    assert_eq!(field(&out, "identities_hold"), "true");
}

#[test]
fn analyze_reports_input_errors() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.op", "2 auto\n1 x\n0 1\n");
    let (code, _, err) = lcp(&["analyze", &bad]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("line 2"), "{err}");
    let (code, _, err) = lcp(&["analyze", "/nonexistent/op.txt"]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("/nonexistent/op.txt"));
}

#[test]
fn solve_examples_through_files() {
    let dir = TempDir::new().unwrap();
    let coupled = write(&dir, "c.lcp", "2 auto\n2 1\n1 2\nb: -5 -6\n");
    for solver in ["lemke", "pgs", "enum"] {
        let (code, out, _) = lcp(&["solve", &coupled, "--solver", solver]);
        assert_eq!(code, EXIT_OK, "{solver}: {out}");
        assert_eq!(field(&out, "status"), "verified");
        let z: Vec<f64> = field(&out, "z").split_whitespace().map(real).collect();
        assert!(
            (z[0] - 4.0 / 3.0).abs() < 1e-8 && (z[1] - 7.0 / 3.0).abs() < 1e-8,
            "{solver}: {z:?}"
        );
    }
    let ident = write(&dir, "i.lcp", "2 auto\n1 0\n0 1\nb: 1 1\n");
    let (code, out, _) = lcp(&["solve", &ident]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(field(&out, "z"), "0.0000000000000000e0 0.0000000000000000e0");
}

#[test]
fn solver_failures_exit_two() {
    let dir = TempDir::new().unwrap();
    let zero = write(&dir, "z.lcp", "2 auto\n0 0\n0 0\nb: -1 1\n");
    let (code, out, _) = lcp(&["solve", &zero]);
    assert_eq!(code, EXIT_SOLVER);
    assert_eq!(field(&out, "status"), "ray-termination");

    let coupled = write(&dir, "c.lcp", "2 auto\n2 1\n1 2\nb: -5 -6\n");
    let (code, out, _) = lcp(&["solve", &coupled, "--solver", "pgs", "--max-iters", "1"]);
    assert_eq!(code, EXIT_SOLVER);
    assert_eq!(field(&out, "status"), "no-convergence");
    assert_eq!(field(&out, "solver"), "pgs");
}

#[test]
fn solve_writes_report_and_json() {
    let dir = TempDir::new().unwrap();
    let coupled = write(&dir, "c.lcp", "2 auto\n2 1\n1 2\nb: -5 -6\n");
    let report = dir.path().join("sol.txt");
    let (code, out, _) = lcp(&["solve", &coupled, "--out", report.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let saved = std::fs::read_to_string(&report).unwrap();
    assert!(out.ends_with(&saved));

    let (code, out, _) = lcp(&["--json", "solve", &coupled]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["solver"], "lemke");
    assert_eq!(v["z"].as_array().unwrap().len(), 2);
}

#[test]
fn certify_projection_example() {
    let dir = TempDir::new().unwrap();
    let d = dir.path().to_str().unwrap();
    let (code, out, _) = lcp(&["example", "4", "6", "--dir", d]);
    assert_eq!(code, EXIT_OK);
    assert!((real(field(&out, "expected_distance")) - 37f64.sqrt() / 6.0).abs() < 1e-15);
    let inst = field(&out, "instance_file").to_string();

    let (code, out, _) = lcp(&["certify", &inst]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert_eq!(field(&out, "overall"), "pass");
    let lhs = real(check_field(&out, "T4.5-identity", "lhs"));
    let rhs = real(check_field(&out, "T4.5-identity", "rhs"));
    assert!((lhs - 37.0 / 36.0).abs() < 1e-12 && (rhs - 37.0 / 36.0).abs() < 1e-12);
    assert!((real(check_field(&out, "T4.6-annulus", "lhs")) - 37f64.sqrt() / 6.0).abs() < 1e-12);
}

#[test]
fn certify_reports_a_ray() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "r.lcp", "2 auto\n1 0\n0 0\nb: -1 0\n");
    let (code, out, _) = lcp(&["certify", &f]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert_eq!(check_field(&out, "T4.1-ray", "applicable"), "true");
    assert_eq!(check_field(&out, "T4.1-ray", "pass"), "true");
    assert_eq!(
        check_field(&out, "T4.1-ray", "direction"),
        "0.0000000000000000e0 1.0000000000000000e0"
    );
}

#[test]
fn certify_identity_with_positive_b() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "i.lcp", "2 auto\n1 0\n0 1\nb: 1 1\n");
    let (code, out, _) = lcp(&["certify", &f, "--solver", "pgs"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(real(check_field(&out, "T4.5-identity", "lhs")), 0.5);
    assert_eq!(real(check_field(&out, "T4.5-identity", "rhs")), 0.5);
    assert_eq!(check_field(&out, "T4.1-ray", "hypotheses"), "no ray found");
}

#[test]
fn certify_range_representative() {
    let dir = TempDir::new().unwrap();
    let ri = random_psd_instance(8, 4, 0.1, 10.0, 21, BPolicy::Planted).unwrap();
    let p = dir.path().join("p.lcp");
    save_instance(&p, &ri.instance).unwrap();
    let (code, out, _) = lcp(&["certify", p.to_str().unwrap(), "--range-representative"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert_eq!(check_field(&out, "T4.2-ball", "applicable"), "true");
    assert_eq!(check_field(&out, "T4.6-annulus", "pass"), "true");
}

#[test]
fn example_files_load_back() {
    let dir = TempDir::new().unwrap();
    let d = dir.path().to_str().unwrap();
    let (code, _, _) = lcp(&["example", "1", "1", "--dir", d]);
    assert_eq!(code, EXIT_OK);
    let inst = lcp_bounds::io::load_instance(&dir.path().join("projection-k1-n1.lcp")).unwrap();
    assert_eq!(inst.dim(), 1);
    assert_eq!(inst.b()[0], -1.0 / 3.0);
    let (code, out, _) = lcp(&["analyze", dir.path().join("projection-k1-n1.op").to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("M=1 m=1 m_r=1 rank=1 psd=true"));

    let (code, _, err) = lcp(&["example", "5", "3", "--dir", d]);
    assert_eq!(code, EXIT_INPUT);
    assert!(!err.is_empty());
}

#[test]
fn sweep_scalar_and_oracle() {
    let (code, out, _) = lcp(&[
        "sweep",
        "--count",
        "1",
        "--dim-min",
        "1",
        "--dim-max",
        "1",
        "--rank",
        "full",
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(field(&out, "certificates_passed"), "1");

    let (code, out, _) = lcp(&["sweep", "--count", "200", "--dim-max", "6", "--seed", "7"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert_eq!(field(&out, "oracle_checked"), "200");
    assert_eq!(field(&out, "oracle_matched"), "200");

    let (code, _, _) = lcp(&["sweep", "--count", "0"]);
    assert_eq!(code, EXIT_INPUT);
}

#[test]
fn sweep_json_is_deterministic() {
    let args = ["--json", "sweep", "--count", "40", "--seed", "3", "--threads", "2"];
    let (c1, a, _) = lcp(&args);
    let (c2, b, _) = lcp(&args);
    assert_eq!((c1, c2), (EXIT_OK, EXIT_OK));
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["theorems"]["T4.5-identity"]["failed"], 0);
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lcp-bounds"))
}

#[test]
fn binary_exit_codes_and_tolerance_override() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "i.lcp", "2 auto\n1 0\n0 1\nb: -1 1\n");
    let out = bin()
        .args(["certify", &f])
        .env("LCP_BOUNDS_TOL", "1e-6")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("[T4.1-ray]"));

    let out = bin().args(["solve", &f]).env("LCP_BOUNDS_TOL", "-1").output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_INPUT));
    let out = bin().args(["solve", &f]).env("LCP_BOUNDS_TOL", "abc").output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_INPUT));
    let out = bin().arg("--version").output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    assert!(Path::new(env!("CARGO_BIN_EXE_lcp-bounds")).exists());
}

#[test]
fn analyze_rank_tolerance_override() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "s.op", "2 auto\n1 0\n0 1e-3\n");
    // treating 1e-3 as zero breaks T T† T = T, so the identities fail
    let (code, out, _) = lcp(&["analyze", &f, "--rank-tol", "1e-2"]);
    assert_eq!(code, EXIT_CHECK_FAILED, "{out}");
    assert_eq!(field(&out, "rank"), "1");
    assert_eq!(field(&out, "identities_hold"), "false");
    let (code, out, _) = lcp(&["analyze", &f]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(field(&out, "rank"), "2");
    let (code, _, _) = lcp(&["analyze", &f, "--rank-tol", "-1"]);
    assert_eq!(code, EXIT_INPUT);
}
