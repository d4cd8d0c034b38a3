use std::path::Path;
use std::process::{Command, Output};

use pmd_core::{CodeSpace, FieldCtx};
use serde_json::Value;

fn pmd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pmd"))
        .args(args)
        .output()
        .expect("run pmd")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn magic_state() -> CodeSpace {
    CodeSpace::bloch_state((1.0f64 / 3.0).sqrt().acos(), std::f64::consts::FRAC_PI_4)
}

#[test]
fn bound_prints_values() {
    let o = pmd(&["bound", "-n", "1", "-l", "1", "-q", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0.57735026918962"));
    let o = pmd(&["bound", "-n", "2", "-l", "1", "-p", "2"]);
    assert!(stdout(&o).contains("0.68313005106397"), "{}", stdout(&o));
    let o = pmd(&["bound", "-q", "2", "--epsilon", "0.5"]);
    assert!(stdout(&o).contains(") = 1\n"));
}

#[test]
fn unknown_flags_and_bad_values_exit_2() {
    for args in [
        &["bound", "-n", "1", "-l", "1", "-q", "2", "--bogus"][..],
        &["bound", "-n", "1", "-l", "1", "-q", "10"],
        &["bound", "-q", "2", "--epsilon", "1.5"],
        &["gap", "-n", "3", "-l", "1", "-q", "2", "-p", "2"],
        &["search", "-n", "x", "-k", "0", "-q", "2"],
    ] {
        let o = pmd(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn verify_full_space_and_magic_state() {
    let dir = tempfile::tempdir().unwrap();
    let full = dir.path().join("full.json");
    let ctx = FieldCtx::new(2, 1).unwrap();
    CodeSpace::standard(&ctx, 2, 2).unwrap().save_path(&full).unwrap();
    let json = dir.path().join("report.json");
    let csv = dir.path().join("report.csv");
    let o = pmd(&[
        "verify",
        full.to_str().unwrap(),
        "--json",
        json.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = read_json(&json);
    assert!((v["report"]["epsilon"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(v["report"]["slack"].as_f64().unwrap().abs() < 1e-12);
    assert_eq!(v["manifest"]["command"], "verify");
    assert_eq!(v["manifest"]["outputs"].as_array().unwrap().len(), 2);
    assert!(v["manifest"].get("wall_time_s").is_none());
    let csv_text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(csv_text.lines().count(), 2);
    assert!(csv_text.starts_with("n,k,q,lambda,epsilon"));

    let magic = dir.path().join("magic.json");
    magic_state().save_path(&magic).unwrap();
    let o = pmd(&[
        "verify",
        magic.to_str().unwrap(),
        "--json",
        json.to_str().unwrap(),
        "--record-time",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = read_json(&json);
    let eps = v["report"]["epsilon"].as_f64().unwrap();
    assert!((eps - 0.5773503).abs() < 1e-7);
    assert!(v["report"]["slack"].as_f64().unwrap().abs() < 1e-9);
    assert!(v["manifest"]["wall_time_s"].is_f64());
}

#[test]
fn verify_rejects_bad_files() {
    let dir = tempfile::tempdir().unwrap();
    let ok = magic_state().to_json();
    let cases = [
        ("garbage.json", "{ not json".to_string()),
        ("unknown.json", ok.replacen("\"n\"", "\"extra\": 1, \"n\"", 1)),
        (
            "version.json",
            ok.replacen("\"format_version\": 1", "\"format_version\": 2", 1),
        ),
        ("shape.json", ok.replacen("\"k\": 0", "\"k\": 1", 1)),
    ];
    for (name, text) in cases {
        let path = dir.path().join(name);
        std::fs::write(&path, text).unwrap();
        let o = pmd(&["verify", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{name}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("error"), "{name}");
    }
}

#[test]
fn search_examples() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("s.json");
    let csv = dir.path().join("traj.csv");
    let code = dir.path().join("best.json");

    let o = pmd(&[
        "search",
        "-n",
        "1",
        "-k",
        "1",
        "-q",
        "2",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = read_json(&json);
    assert!((v["report"]["epsilon"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let o = pmd(&[
        "search",
        "-n",
        "1",
        "-k",
        "0",
        "-q",
        "2",
        "--csv",
        csv.to_str().unwrap(),
        "--save-code",
        code.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next(), Some("iteration,epsilon"));
    let last: f64 = text.lines().last().unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((last - (1.0f64 / 3.0).sqrt()).abs() < 1e-3);
    let best = CodeSpace::load_path(&code).unwrap();
    assert_eq!((best.n(), best.k()), (1, 0));

    let o = pmd(&[
        "search",
        "-n",
        "2",
        "-k",
        "1",
        "-q",
        "2",
        "--steps",
        "100",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = read_json(&json);
    let bound = v["report"]["bound_theorem1"].as_f64().unwrap();
    assert!((bound - 0.683_130_051_063_973_2).abs() < 1e-12);
    assert!(v["report"]["slack"].as_f64().unwrap() >= -1e-9);
}

#[test]
fn design_check_examples() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("d.json");
    let o = pmd(&[
        "design-check",
        "-p",
        "2",
        "-m",
        "1",
        "-n",
        "1",
        "--trials",
        "20",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&json);
    assert!(v["report"]["moment_deviation"].as_f64().unwrap() <= 1e-10);
    assert!(v["report"]["overlap_deviation"].as_f64().unwrap() <= 1e-10);
    assert_eq!(v["manifest"]["seed"], 0);

    let o = pmd(&[
        "design-check",
        "-p",
        "2",
        "-m",
        "2",
        "-n",
        "2",
        "--trials",
        "5",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = read_json(&json);
    for row in v["per_k"].as_array().unwrap() {
        let lambda = row["lambda"].as_i64().unwrap() as i32;
        assert_eq!(row["expected"].as_f64().unwrap(), 4f64.powi(-lambda));
        assert!(row["max_value_error"].as_f64().unwrap() <= 1e-10);
    }

    let o = pmd(&["design-check", "-q", "2", "-n", "1", "--trials", "0"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn dense_limit_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_pmd"))
        .args(["design-check", "-q", "2", "-n", "3", "--trials", "1"])
        .env("PMD_MAX_DIM", "4")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn gap_report() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("g.json");
    let o = pmd(&[
        "gap",
        "-n",
        "10",
        "-l",
        "10",
        "-q",
        "2",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = read_json(&json);
    let r = &v["report"];
    assert_eq!(r["lambda_construction"].as_f64(), Some(20.0));
    assert!((r["gap"].as_f64().unwrap() - (10.0 + 42f64.log2())).abs() < 1e-12);
    assert!((r["excess_over_ell"].as_f64().unwrap() - 42f64.log2()).abs() < 1e-12);
    assert_eq!(r["out_of_regime"], false);

    let o = pmd(&["gap", "-n", "10", "-l", "2", "-q", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("out of regime"));
}

#[test]
fn reports_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let code = dir.path().join("c.json");
    let ctx = FieldCtx::new(2, 2).unwrap();
    CodeSpace::random(&ctx, 2, 1, 5).unwrap().save_path(&code).unwrap();
    let out = dir.path().join("out.json");
    let out_s = out.to_str().unwrap();
    let code_s = code.to_str().unwrap();
    let commands: [&[&str]; 2] = [
        &["verify", code_s, "--json", out_s],
        &[
            "search",
            "-n",
            "2",
            "-k",
            "0",
            "-q",
            "3",
            "--restarts",
            "3",
            "--steps",
            "50",
            "--seed",
            "9",
            "--json",
            out_s,
        ],
    ];
    for cmd in commands {
        let mut seen: Vec<Vec<u8>> = Vec::new();
        for w in ["1", "2", "8"] {
            let mut args = cmd.to_vec();
            args.extend(["--workers", w]);
            assert_eq!(pmd(&args).status.code(), Some(0));
            seen.push(std::fs::read(&out).unwrap());
        }
        assert!(seen.windows(2).all(|p| p[0] == p[1]), "{cmd:?}");
    }
}
