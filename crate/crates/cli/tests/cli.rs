use std::process::{Command, Output};

use serde_json::Value;

fn xitaylor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xitaylor"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn check_envelope(v: &Value) {
    for key in ["version", "config", "claims", "coefficients", "summary", "timestamp"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let s = &v["summary"];
    let claims = v["claims"].as_array().unwrap();
    assert_eq!(s["total"].as_u64().unwrap() as usize, claims.len());
    let mut ids: Vec<&str> = claims.iter().map(|c| c["id"].as_str().unwrap()).collect();
    ids.sort();
    ids.dedup();
    assert_eq!(ids.len(), claims.len());
    for c in claims {
        for key in ["id", "group", "anchor", "status", "residual", "bound", "details"] {
            assert!(c.get(key).is_some(), "claim missing {key}");
        }
        // numbers travel as strings
        let r: f64 = c["residual"].as_str().unwrap().parse().unwrap();
        let b: f64 = c["bound"].as_str().unwrap().parse().unwrap();
        match c["status"].as_str().unwrap() {
            "pass" => assert!(r <= b),
            "fail" => assert!(r > b),
            other => panic!("status {other}"),
        }
    }
    for row in v["coefficients"].as_array().unwrap() {
        assert!(row["value"].is_string() && row["abs_error_bound"].is_string());
    }
}

#[test]
fn coeffs_json_table() {
    let out = xitaylor(&["coeffs", "--k-max", "4", "--routes", "theta,L,p:2", "--tol", "1e-10", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    check_envelope(&v);
    let rows = v["coefficients"].as_array().unwrap();
    assert_eq!(rows.len(), 15);
    let a2: Vec<f64> = rows
        .iter()
        .filter(|r| r["k"] == 2)
        .map(|r| r["value"].as_str().unwrap().parse().unwrap())
        .collect();
    assert_eq!(a2.len(), 3);
    for x in a2 {
        assert!((x - 2.469_040_361_406_360_1e-4).abs() < 1e-10);
    }
}

#[test]
fn coeffs_k_max_zero_is_a0_only() {
    let out = xitaylor(&["coeffs", "--k-max", "0", "--routes", "theta"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = json(&out)["coefficients"].as_array().unwrap().clone();
    assert_eq!(rows.len(), 1);
    let a0: f64 = rows[0]["value"].as_str().unwrap().parse().unwrap();
    assert!((a0 - 0.994_241_556_376_628_2).abs() < 1e-12);
}

#[test]
fn csv_columns() {
    let out = xitaylor(&["coeffs", "--k-max", "1", "--routes", "L", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,route,value,abs_error_bound"));
    assert_eq!(lines.count(), 2);
    assert_eq!(xitaylor(&["verify", "--format", "csv"]).status.code(), Some(1));
}

#[test]
fn usage_errors_exit_1() {
    let out = xitaylor(&["coeffs", "--tol", "-1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("tol"));
    assert_eq!(xitaylor(&["scan", "Q"]).status.code(), Some(1));
    assert_eq!(xitaylor(&["scan", "L", "--grid", "5:1"]).status.code(), Some(1));
    assert_eq!(xitaylor(&["coeffs", "--routes", "p:x"]).status.code(), Some(1));
    assert_eq!(xitaylor(&["verify", "--only", "nothing"]).status.code(), Some(1));
    assert_eq!(xitaylor(&["oracle", "--k-max", "9"]).status.code(), Some(1));
}

#[test]
fn unattainable_tolerance_exits_2() {
    let out = xitaylor(&["coeffs", "--k-max", "1", "--routes", "L", "--tol", "1e-40"]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn verify_default_passes() {
    let out = xitaylor(&["verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let v = json(&out);
    check_envelope(&v);
    assert_eq!(v["summary"]["failed"], 0);
    let w = v["claims"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["id"] == "wallis-proof-constant")
        .unwrap();
    assert_eq!(w["details"]["exact"], "65/9");
    assert_eq!(w["details"]["printed_value"], "55/9");
    assert_eq!(w["details"]["erratum"], "true");
}

#[test]
fn only_filters_to_group() {
    let out = xitaylor(&["verify", "--only", "p-polynomials"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let claims = v["claims"].as_array().unwrap();
    assert!(claims.len() >= 5);
    assert!(claims.iter().all(|c| c["group"] == "p-polynomials"));
}

#[test]
fn injected_fault_exits_3_and_is_flagged() {
    let out = xitaylor(&["verify", "--only", "p-polynomials", "--inject-fault", "p-coefficient"]);
    assert_eq!(out.status.code(), Some(3));
    let v = json(&out);
    check_envelope(&v);
    let failed: Vec<&str> = v["claims"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["status"] == "fail")
        .map(|c| c["id"].as_str().unwrap())
        .collect();
    assert!(failed.contains(&"p-representations"));
    assert!(failed.contains(&"p-listed-rows"));
}

#[test]
fn reproducible_except_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for i in 0..2 {
        let p = dir.path().join(format!("r{i}.json"));
        let out = xitaylor(&["verify", "--only", "coefficient-pipelines", "--k-max", "3", "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
        let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
        v.as_object_mut().unwrap().remove("timestamp");
        reports.push(serde_json::to_string(&v).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn config_file_and_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "k_max = 1\nroutes = \"L,p:1\"\ntol = 1e-9\n").unwrap();
    let out = xitaylor(&["coeffs", "--config", cfg.to_str().unwrap(), "--tol", "1e-11"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["config"]["tol"], "1e-11");
    assert_eq!(v["config"]["k_max"], 1);
    assert_eq!(v["config"]["shifts"], serde_json::json!([1]));
    assert_eq!(v["coefficients"].as_array().unwrap().len(), 4);

    std::fs::write(&cfg, "tolerance = 1\n").unwrap();
    assert_eq!(xitaylor(&["coeffs", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn scans() {
    let v = json(&xitaylor(&["scan", "L", "--k", "1", "--grid", "1:8", "--step", "1e-3"]));
    check_envelope(&v);
    assert_eq!(v["results"]["nonnegative"], true);
    assert!(v["results"]["argmin"].is_string());

    let p2 = json(&xitaylor(&["scan", "p2", "--grid", "1:20"]));
    let min: f64 = p2["results"]["min"].as_str().unwrap().parse().unwrap();
    assert!((min - 19.8788).abs() < 1e-3);
    assert_eq!(p2["results"]["argmin"], "1e0");

    let b = json(&xitaylor(&["scan", "B", "--grid", "1:50"]));
    let arg: f64 = b["results"]["argmin"].as_str().unwrap().parse().unwrap();
    assert_eq!(arg, arg.floor());
    assert_eq!(b["summary"]["failed"], 0);
}

#[test]
fn oracle_and_wallis() {
    let out = xitaylor(&["oracle", "--k-max", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    check_envelope(&v);
    assert_eq!(v["results"]["coefficients"].as_array().unwrap().len(), 5);

    let w = json(&xitaylor(&["wallis", "1"]));
    assert_eq!(w["results"]["rational"], "4/3");
    assert_eq!(w["summary"]["failed"], 0);
}
