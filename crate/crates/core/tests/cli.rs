use std::process::{Command, Output};

use qobf::Circuit;
use serde_json::Value;

fn qobf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qobf"))
        .args(args)
        .env_remove("QOBF_MAX_QUBITS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn obfuscate_text_ranks_solutions_first() {
    let out = qobf(&["obfuscate", "--n-value", "19", "--shots", "1024", "--seed", "7"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows: Vec<Vec<u64>> = text
        .lines()
        .filter(|l| l.trim_start().chars().next().is_some_and(|c| c.is_ascii_digit()))
        .filter(|l| !l.contains('='))
        .map(|l| l.split_whitespace().take(5).map(|t| t.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 12);
    for row in &rows[..6] {
        assert_eq!(row[1] + row[2] + row[3], 19, "{text}");
    }
    let frac_line = text.lines().find(|l| l.starts_with("valid_fraction")).unwrap();
    let frac: f64 = frac_line.split_whitespace().nth(2).unwrap().parse().unwrap();
    assert!(frac >= 0.86);
}

#[test]
fn obfuscate_json_schema() {
    let out = qobf(&["obfuscate", "--n-value", "19", "--format", "json"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["n_value"], 19);
    assert_eq!(v["bits"], 3);
    assert_eq!(v["iterations"], 7);
    assert_eq!(v["shots"], 1024);
    assert!(v["valid_fraction"].as_f64().unwrap() >= 0.86);
    assert!((v["exact_success"].as_f64().unwrap() - 0.996846).abs() < 1e-6);
    let counts = v["counts"].as_array().unwrap();
    let total: u64 = counts.iter().map(|c| c["count"].as_u64().unwrap()).sum();
    assert_eq!(total, 1024);
    let keys: Vec<(u64, u64, u64, u64)> = counts
        .iter()
        .map(|c| {
            let f = |k: &str| c[k].as_u64().unwrap();
            (f("count"), f("x"), f("y"), f("z"))
        })
        .collect();
    for w in keys.windows(2) {
        let (a, b) = (w[0], w[1]);
        assert!(a.0 > b.0 || (a.0 == b.0 && (a.1, a.2, a.3) < (b.1, b.2, b.3)));
    }
    for c in counts {
        assert_eq!(c.as_object().unwrap().len(), 4);
    }
}

#[test]
fn obfuscate_csv_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.csv");
    let out = qobf(&[
        "obfuscate",
        "--n-value",
        "7",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("x,y,z,count,valid\n"));
    assert_eq!(
        csv.lines()
            .skip(1)
            .map(|l| l.split(',').nth(3).unwrap().parse::<u64>().unwrap())
            .sum::<u64>(),
        1024
    );
}

#[test]
fn exit_codes() {
    let out = qobf(&["obfuscate", "--n-value", "7", "--bits", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("3·(2^1 − 1) = 3"), "{err}");

    assert_eq!(qobf(&["obfuscate", "--n-value", "0"]).status.code(), Some(2));
    assert_eq!(
        qobf(&["count", "--n-value", "3", "--bits", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(qobf(&["bench", "--targets", "127"]).status.code(), Some(3));
    assert_eq!(qobf(&["obfuscate"]).status.code(), Some(2));

    let capped = Command::new(env!("CARGO_BIN_EXE_qobf"))
        .args(["obfuscate", "--n-value", "19"])
        .env("QOBF_MAX_QUBITS", "12")
        .output()
        .unwrap();
    assert_eq!(capped.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&capped.stderr).contains("bytes"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("missing").join("c.txt");
    let out = qobf(&["export", "--n-value", "7", "--out", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn count_command() {
    assert_eq!(stdout(&qobf(&["count", "--n-value", "19", "--bits", "3"])), "6\n");
    assert_eq!(stdout(&qobf(&["count", "--n-value", "0", "--bits", "3"])), "1\n");
    let v = stdout(&qobf(&["count", "--n-value", "21", "--bits", "3", "--verify"]));
    assert_eq!(v, "formula 1\nbrute force 1\nmatch\n");
}

#[test]
fn bench_csv_rows() {
    let out = qobf(&["bench", "--targets", "7,15"]);
    assert!(out.status.success());
    let csv = stdout(&out);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(
        lines[0],
        "N,n,iterations,qubits,depth,gates,run_time_s,valid_solutions"
    );
    let exact = |l: &str| {
        let f: Vec<&str> = l.split(',').collect();
        format!("{},{},{},{},{}", f[0], f[1], f[2], f[3], f[7])
    };
    assert_eq!(exact(lines[1]), "7,2,3,11,6");
    assert_eq!(exact(lines[2]), "15,3,3,14,28");
}

#[test]
fn inspect_reports_plan_and_metrics() {
    let text = stdout(&qobf(&["inspect", "--n-value", "19"]));
    assert!(text.contains("width = 14\n"));
    assert!(text.contains("M = 6\n"));
    assert!(text.contains("R = 7\n"));
    assert!(text.contains("theoretical_success = 0.996846\n"));
    assert!(text.contains("mcx-level: width = 14"));
    assert!(text.contains("decomposed:"));
    assert!(text.contains("reference ripple-carry"));
    assert!(stdout(&qobf(&["inspect", "--n-value", "7"])).contains("width = 11\n"));
}

#[test]
fn export_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for decompose in [false, true] {
        let path = dir.path().join(format!("c{decompose}.txt"));
        let mut args = vec!["export", "--n-value", "19", "--out", path.to_str().unwrap()];
        if decompose {
            args.push("--decompose");
        }
        assert!(qobf(&args).status.success());
        let text = std::fs::read_to_string(&path).unwrap();
        let parsed = Circuit::parse(&text).unwrap();
        assert_eq!(parsed.serialize(), text);
        let plan = qobf::plan(19, None).unwrap();
        let mut expected = qobf::obfuscator::build_full_circuit(&plan).unwrap();
        if decompose {
            expected = expected.decompose_mcx(&qobf::AncillaPolicy::Allocate).unwrap();
        }
        assert_eq!(parsed, expected);
    }
    let stdout_text = stdout(&qobf(&["export", "--n-value", "7"]));
    assert!(stdout_text.starts_with("width 11\n"));
}

#[test]
fn identical_flags_identical_stdout() {
    for args in [
        &["obfuscate", "--n-value", "15", "--seed", "3"][..],
        &["obfuscate", "--n-value", "19", "--format", "json", "--seed", "9"][..],
        &["inspect", "--n-value", "31"][..],
    ] {
        assert_eq!(qobf(args).stdout, qobf(args).stdout);
    }
}
