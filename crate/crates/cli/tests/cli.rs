use std::path::Path;

use growthforge_cli::{run, EXIT_FAIL, EXIT_OK, EXIT_USAGE};
use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn gf(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("growthforge").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

#[test]
fn validate_exit_codes() {
    let ok = gf(&["validate"]);
    assert_eq!(ok.code, EXIT_OK, "{}", ok.stderr);
    let report = json(&ok.stdout);
    assert_eq!(report["verdict"], "pass");
    assert_eq!(report["report"]["mu"][2]["mu"], 4);
    assert_eq!(report["config"]["growth"]["epsilon"], "1/10");

    let geometric = gf(&["validate", "--family", "geometric", "--epsilon", "1"]);
    assert_eq!(geometric.code, EXIT_FAIL);
    let report = json(&geometric.stdout);
    assert_eq!(report["report"]["verdicts"]["square_margin"], false);

    let bad = gf(&["validate", "--epsilon", "abc"]);
    assert_eq!(bad.code, EXIT_USAGE);
    assert!(bad.stderr.contains("abc"));
}

#[test]
fn validate_without_capture_requirement() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = path(dir.path(), "run.toml");
    std::fs::write(
        &cfg,
        "[growth]\nfamily = \"geometric\"\nepsilon = \"1\"\n[validate]\nrequire_capture = false\n",
    )
    .unwrap();
    assert_eq!(gf(&["validate", "--config", &cfg]).code, EXIT_OK);
}

#[test]
fn usage_errors() {
    assert_eq!(gf(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(gf(&["validate", "--config", "/nonexistent/run.toml"]).code, EXIT_USAGE);
    assert_eq!(gf(&["analyze", "/nonexistent/system.json"]).code, EXIT_USAGE);
    assert_eq!(gf(&["build", "--family", "table"]).code, EXIT_USAGE);
    assert_eq!(gf(&["--help"]).code, EXIT_OK);
}

#[test]
fn build_recurrent_writes_capture_log() {
    let dir = tempfile::tempdir().unwrap();
    let sys = path(dir.path(), "rec.json");
    let r = gf(&[
        "build",
        "--mode",
        "recurrent",
        "--depth",
        "7",
        "--captures",
        "2",
        "--out",
        &sys,
    ]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let doc = json(&std::fs::read_to_string(&sys).unwrap());
    assert_eq!(doc["capture_log"]["entries"].as_array().unwrap().len(), 2);
    assert_eq!(json(&r.stdout)["system_digest"], doc["digest"]);
}

#[test]
fn build_free_includes_power_monomials() {
    let dir = tempfile::tempdir().unwrap();
    let file = path(dir.path(), "free.json");
    let r = gf(&[
        "build",
        "--mode",
        "free",
        "--family",
        "geometric",
        "--epsilon",
        "1",
        "--depth",
        "4",
        "--out",
        &file,
    ]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let sys = growthforge_cli::load_system(Path::new(&file)).unwrap();
    let strings: Vec<String> = sys.cset(1).strings().iter().map(|s| sys.alphabet().render(s)).collect();
    assert!(strings.contains(&"xx".into()) && strings.contains(&"yy".into()));
    let c4: Vec<String> = sys.cset(2).strings().iter().map(|s| sys.alphabet().render(s)).collect();
    for w in ["xxxx", "xxyy", "yyxx", "yyyy"] {
        assert!(c4.contains(&w.to_string()));
    }
}

#[test]
fn build_reports_deficit() {
    let r = gf(&[
        "build",
        "--family",
        "table",
        "--table",
        "2,8",
        "--depth",
        "1",
        "--force",
        "--out",
        "/dev/null",
    ]);
    assert_eq!(r.code, EXIT_FAIL);
    assert!(r.stderr.contains("deficit 2"), "{}", r.stderr);
    let r = gf(&["free", "--epsilon", "0.1"]);
    assert_eq!(r.code, EXIT_FAIL);
    assert!(r.stderr.contains("deficit 1"), "{}", r.stderr);
}

#[test]
fn toy_analysis_csv() {
    let dir = tempfile::tempdir().unwrap();
    let sys = path(dir.path(), "toy.json");
    let csv = path(dir.path(), "toy.csv");
    let r = gf(&[
        "build", "--family", "table", "--table", "2,4,8,16", "--depth", "3", "--out", &sys,
    ]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let r = gf(&["analyze", &sys, "--csv", &csv]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,dim,cumulative,entropy_partial,depth");
    assert_eq!(lines[1], "1,2,2,2.0,3");
    assert!(lines[2].starts_with("2,4,6,"));
    assert!(lines[3].starts_with("3,8,14,"));
}

#[test]
fn recurrent_analysis_passes_and_tampering_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let sys = path(dir.path(), "rec.json");
    assert_eq!(
        gf(&[
            "build",
            "--mode",
            "recurrent",
            "--depth",
            "6",
            "--captures",
            "3",
            "--out",
            &sys
        ])
        .code,
        EXIT_OK
    );
    let r = gf(&["analyze", &sys]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let report = json(&r.stdout);
    assert_eq!(report["report"]["recurrence"]["verdict"], "pass");
    assert_eq!(report["report"]["recurrence"]["entries"].as_array().unwrap().len(), 3);

    let text = std::fs::read_to_string(&sys).unwrap();
    let mut doc = json(&text);
    doc["levels"][2][0] = serde_json::json!([0, 1, 1]);
    let tampered = path(dir.path(), "tampered.json");
    std::fs::write(&tampered, serde_json::to_string_pretty(&doc).unwrap()).unwrap();
    let r = gf(&["analyze", &tampered]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.stderr.contains("digest mismatch"), "{}", r.stderr);
}

#[test]
fn free_command() {
    let r = gf(&["free", "--epsilon", "1", "--depth", "4"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let report = json(&r.stdout)["report"].clone();
    assert_eq!(report["verified_products"], 30);
    assert_eq!(report["optimality"]["ratio"]["approx"], "2.000000");

    let r = gf(&["free", "--epsilon", "0.5"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let report = json(&r.stdout)["report"].clone();
    assert_eq!(report["params"]["t"], 2);
    assert_eq!(report["optimality"]["degree"], 4);
    assert!(report["optimality"]["lower_bound"]["approx"]
        .as_str()
        .unwrap()
        .starts_with("1.7095"));

    assert_eq!(gf(&["free", "--epsilon", "3/2"]).code, EXIT_USAGE);
    assert_eq!(gf(&["free", "--epsilon", "0"]).code, EXIT_USAGE);
}

#[test]
fn free_from_system_file() {
    let dir = tempfile::tempdir().unwrap();
    let free = path(dir.path(), "free.json");
    let plain = path(dir.path(), "plain.json");
    gf(&[
        "build",
        "--mode",
        "free",
        "--family",
        "geometric",
        "--epsilon",
        "1",
        "--out",
        &free,
    ]);
    gf(&["build", "--depth", "4", "--out", &plain]);
    assert_eq!(gf(&["free", "--system", &free]).code, EXIT_OK);
    assert_eq!(gf(&["free", "--system", &plain]).code, EXIT_USAGE);
}

#[test]
fn report_goes_to_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "validate.json");
    let r = gf(&["validate", "--out", &out]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.stdout.is_empty());
    assert_eq!(json(&std::fs::read_to_string(&out).unwrap())["command"], "validate");
}

#[test]
fn binary_runs() {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_growthforge"))
        .args(["validate", "--epsilon", "nope"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
}
