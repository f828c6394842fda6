use std::path::Path;
use std::process::{Command, Output};

fn relay(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relay-de"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows of a CSV with `#` metadata, header dropped.
fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn sir_rate_half() {
    let out = stdout(&relay(&["sir", "--rate", "0.5"]));
    let s: f64 = rows(&out)[0][1].parse().unwrap();
    assert!((s - 0.805).abs() <= 0.003, "{s}");
    assert!(out.contains("# seed="));
}

#[test]
fn sir_rate_fraction() {
    let out = stdout(&relay(&["sir", "--rate", "2/3"]));
    let s: f64 = rows(&out)[0][1].parse().unwrap();
    assert!((s - 0.666).abs() <= 0.003, "{s}");
    assert!(!relay(&["sir", "--rate", "1/0"]).status.success());
}

#[test]
fn sir_huge_noise() {
    let out = stdout(&relay(&["sir", "--sigma", "1000"]));
    let c: f64 = rows(&out)[0][1].parse().unwrap();
    assert!(c <= 1e-3);
}

#[test]
fn sir_rejects_bad_rate() {
    let o = relay(&["sir", "--rate", "1.5"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("--rate"));
}

#[test]
fn sir_grid() {
    let out = stdout(&relay(&["sir", "--grid", "0.5:1.0:0.1"]));
    let r = rows(&out);
    assert_eq!(r.len(), 6);
    let c: Vec<f64> = r.iter().map(|row| row[1].parse().unwrap()).collect();
    assert!(c.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn de_trace_below_threshold_is_decodable() {
    let out = stdout(&relay(&["de-trace", "--dl", "3", "--dr", "6", "--sigma", "0.60", "--N", "1000", "--T", "200"]));
    assert!(out.contains("# decodable=true"));
    assert!(out.contains("iteration,position,ber"));
}

#[test]
fn de_trace_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for threads in ["1", "2"] {
        let path = dir.path().join(format!("t{threads}.csv"));
        let run = || {
            let o = relay(&[
                "de-trace", "--L", "5", "--sigma", "0.8", "--N", "1000", "--T", "40", "--seed", "7", "--threads",
                threads, "--out", path.to_str().unwrap(),
            ]);
            assert!(o.status.success());
            std::fs::read(&path).unwrap()
        };
        assert_eq!(run(), run());
    }
}

#[test]
fn de_trace_rejects_bad_ensemble() {
    assert!(!relay(&["de-trace", "--dl", "3", "--dr", "3", "--sigma", "0.5"]).status.success());
    assert!(!relay(&["de-trace", "--dl", "4", "--dr", "8", "--L", "5", "--sigma", "0.5"]).status.success());
}

#[test]
fn threshold_desk_36() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("t.json");
    let csv = dir.path().join("t.csv");
    let o = relay(&[
        "threshold", "--dl", "3", "--dr", "6", "--out", json.to_str().unwrap(), "--summary-csv",
        csv.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&json);
    let est = v["results"][0]["estimate"].as_f64().unwrap();
    assert!((0.732..=0.752).contains(&est), "{est}");
    assert!(v["results"][0]["probes"].as_array().unwrap().len() >= 3);
    let summary = std::fs::read_to_string(&csv).unwrap();
    assert!(summary.contains("ensemble,L,rate,sigma_star,sigma_sym"));
}

#[test]
fn threshold_sweep_with_extrapolation() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("s.json");
    let o = relay(&[
        "threshold", "--sweep-L", "5,7,9", "--extrapolate", "--N", "500", "--T", "60", "--tol", "0.05",
        "--bracket", "0.3,2.5", "--out", json.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&json);
    assert_eq!(v["results"].as_array().unwrap().len(), 3);
    assert_eq!(v["summary"][1]["chain_length"].as_u64(), Some(7));
    assert!(v["extrapolation"]["sigma_inf"].as_f64().is_some());
}

#[test]
fn threshold_bracket_failure_exits_nonzero() {
    let o = relay(&["threshold", "--N", "500", "--T", "50", "--bracket", "1.5,1.6"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("bracket"));
}

#[test]
fn simulate_noiseless() {
    let out = stdout(&relay(&["simulate", "--sigma", "0.05", "--n", "1000", "--trials", "10"]));
    let r = rows(&out);
    assert_eq!(r.len(), 10);
    assert!(r.iter().all(|row| row[1].parse::<f64>().unwrap() == 0.0));
}

#[test]
fn simulate_ml_table() {
    let out = stdout(&relay(&["simulate", "--n", "10", "--ml", "--trials", "500", "--sigma", "0.8"]));
    let r = rows(&out);
    assert_eq!(r[0][0], "bp");
    assert_eq!(r[1][0], "ml");
    let bp: f64 = r[0][1].parse().unwrap();
    let ml: f64 = r[1][1].parse().unwrap();
    assert!(ml <= bp + 0.1);
}

#[test]
fn simulate_ml_rejects_large_codes() {
    assert!(!relay(&["simulate", "--n", "200", "--ml", "--trials", "2"]).status.success());
}

#[test]
fn describe_protograph() {
    let out = stdout(&relay(&["describe", "--dl", "3", "--dr", "6", "--L", "5"]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["chain_length"].as_u64(), Some(5));
    assert_eq!(v["bundles"].as_array().unwrap().len(), 5);
}
