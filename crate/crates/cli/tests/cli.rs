use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn qpp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpp"))
        .args(args)
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .output()
        .expect("spawn qpp")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

fn write_counterexample(dir: &Path) -> String {
    let path = dir.join("counterexample4.txt");
    fs::write(&path, "4\n0\n2\n1\n3\n").unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn check_verdicts_and_exit_codes() {
    let o = qpp(&["check", "256", "159", "64"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0][3..8], ["yes", "1", "quadratic", "2^8", "2^6"]);

    let o = qpp(&["check", "256", "159", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(csv_rows(&stdout(&o))[0][5], "linear");

    let o = qpp(&["check", "257", "5", "17"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(csv_rows(&stdout(&o))[0][3], "no");

    let o = qpp(&["check", "30", "1", "15", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["case"], 2);
    assert_eq!(v["n_factorization"], "2 * 3 * 5");
}

#[test]
fn malformed_integers_are_usage_errors() {
    assert_eq!(qpp(&["check", "256", "1x", "64"]).status.code(), Some(2));
    assert_eq!(qpp(&["check", "256", "-1", "64"]).status.code(), Some(2));
    assert_eq!(qpp(&["check", "256", "300", "64"]).status.code(), Some(2));
    assert_eq!(qpp(&["bogus"]).status.code(), Some(2));
}

#[test]
fn invert_reference_polynomials() {
    for (args, want) in [
        (["256", "159", "64"], "95 64"),
        (["1024", "31", "64"], "991 64"),
        (["4096", "2113", "128"], "4033 1920"),
        (["15120", "11", "210"], "14891 210"),
    ] {
        let o = qpp(&[&["invert"], &args[..]].concat());
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(csv_rows(&stdout(&o))[0][0], want);
    }
    assert_eq!(qpp(&["invert", "257", "5", "17"]).status.code(), Some(1));
}

#[test]
fn mcf_tables() {
    let o = qpp(&["mcf", "qpp", "15120", "11", "210"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 80);
    assert!(rows.iter().all(|r| r[2] == "true"));

    let o = qpp(&["mcf", "qpp", "256", "159", "64"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(csv_rows(&stdout(&o)).len(), 9);

    let dir = TempDir::new().unwrap();
    let path = write_counterexample(dir.path());
    let o = qpp(&["mcf", "file", &path]);
    assert_eq!(o.status.code(), Some(1));
    let rows = csv_rows(&stdout(&o));
    let w2 = rows.iter().find(|r| r[0] == "2").unwrap();
    assert_eq!(w2[2..], ["false", "interleave", "0", "0", "1"]);
}

#[test]
fn unreadable_or_invalid_files_exit_2() {
    let dir = TempDir::new().unwrap();
    assert_eq!(qpp(&["mcf", "file", "/nonexistent/x.txt"]).status.code(), Some(2));
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "3\n0\n0\n1\n").unwrap();
    let o = qpp(&["mcf", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("invalid interleaver"));
}

#[test]
fn spread_values() {
    let o = qpp(&["spread", "identity", "16"]);
    assert_eq!(csv_rows(&stdout(&o))[0][1], "2");
    for (args, d) in [(["256", "159", "64"], "16"), (["1024", "31", "64"], "32")] {
        let o = qpp(&[&["spread", "qpp"], &args[..], &["--format", "json"]].concat());
        let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(v["spread"].to_string(), d);
        assert!((v["ratio"].as_f64().unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
    }
}

#[test]
fn count_enumerate_compose() {
    assert_eq!(csv_rows(&stdout(&qpp(&["count", "256"])))[0][1], "16256");
    let o = qpp(&["enumerate", "8"]);
    assert_eq!(csv_rows(&stdout(&o)).len(), 12);
    let o = qpp(&["enumerate", "256", "--limit", "5"]);
    assert_eq!(csv_rows(&stdout(&o)).len(), 5);
    let o = qpp(&["compose", "256", "159,64", "95,64"]);
    let row = &csv_rows(&stdout(&o))[0];
    assert_eq!(row[0], "1");
    assert_eq!(row[2], "yes");
}

#[test]
fn materialize_writes_plain_file_and_sidecar() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("pi.txt");
    let o = qpp(&["materialize", "qpp", "8", "3", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read_to_string(&out).unwrap(), "8\n0\n5\n6\n3\n4\n1\n2\n7\n");
    let side: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("pi.txt.manifest.json")).unwrap()).unwrap();
    assert_eq!(side["subcommand"], "materialize");
    assert_eq!(side["params"]["source"]["kind"], "qpp");
    assert_eq!(side["timestamp_unix"], 1_700_000_000u64);

    // The written file is itself a valid source.
    let o = qpp(&["mcf", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));

    assert_eq!(qpp(&["materialize", "poly", "8", "0", "1"]).status.code(), Some(1));
}

#[test]
fn srandom_respects_constraint() {
    let o = qpp(&["srandom", "64", "4", "--seed", "9"]);
    assert_eq!(o.status.code(), Some(0));
    let vals: Vec<i64> = stdout(&o).lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(vals[0], 64);
    let pi = &vals[1..];
    for i in 0..64usize {
        for k in i.saturating_sub(4)..i {
            assert!((pi[i] - pi[k]).abs() >= 4);
        }
    }
    assert_eq!(qpp(&["srandom", "8", "6", "--attempts", "20"]).status.code(), Some(1));
}

#[test]
fn fer_config_handling() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("fer.cfg");
    fs::write(&cfg, "interleaver = qpp 256 159 64\nseed = 1\n").unwrap();
    let o = qpp(&["fer", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    for key in ["ebn0", "iterations", "target_errors", "max_frames"] {
        assert!(err.contains(key), "{err}");
    }

    fs::write(
        &cfg,
        "interleaver = qpp 256 159 64\nebn0 = 0\nseed = 1\niterations = 8\n\
         target_errors = 10\nmax_frames = 20\nnoiseless = true\n",
    )
    .unwrap();
    let out = dir.path().join("fer.csv");
    let o = qpp(&["fer", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# manifest: {"));
    let manifest: Value = serde_json::from_str(text.lines().next().unwrap().trim_start_matches("# manifest: ")).unwrap();
    assert_eq!(manifest["subcommand"], "fer");
    assert_eq!(manifest["params"]["ebn0_db"][0], "inf");
    assert_eq!(text.lines().nth(1).unwrap(), "ebn0_db,frames,frame_errors,bit_errors,fer,ber,ci95");
    assert_eq!(csv_rows(&text), vec![vec!["inf", "20", "0", "0", "0", "0", "0"]]);
}

#[test]
fn dmin_bound_of_first_reference() {
    let o = qpp(&["dmin-bound", "qpp", "256", "159", "64", "--weight", "2"]);
    assert_eq!(csv_rows(&stdout(&o))[0][1], "27");
    assert_eq!(qpp(&["dmin-bound", "identity", "8", "--weight", "9"]).status.code(), Some(2));
}

#[test]
fn partrace_json_shape() {
    let o = qpp(&["partrace", "qpp", "16", "1", "4", "-m", "4", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["contention_free"], true);
    assert_eq!(v["traces"][0]["M"], 4);
    assert_eq!(v["traces"][0]["W"], 4);
    assert_eq!(v["traces"][1]["direction"], "deinterleave");
    assert_eq!(v["traces"][0]["steps"].as_array().unwrap().len(), 4);

    let dir = TempDir::new().unwrap();
    let path = write_counterexample(dir.path());
    let o = qpp(&["partrace", &path, "-m", "2", "--frames", "2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["contention_free"], false);
    assert!(v["decode"]["contention_events"].as_u64().unwrap() >= 1);
    assert_eq!(v["decode"]["mismatched_frames"], 0);

    assert_eq!(qpp(&["partrace", "identity", "16", "-m", "3"]).status.code(), Some(2));
}
