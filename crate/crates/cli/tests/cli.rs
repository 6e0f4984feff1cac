use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rough-explosion"));
    cmd.env_remove("ROUGH_EXPLOSION_PARAMS");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

/// Top-level keys of pretty-printed JSON in output order.
fn key_order(o: &Output) -> Vec<String> {
    stdout(o)
        .lines()
        .filter_map(|l| l.strip_prefix("  \""))
        .filter_map(|l| l.split_once("\":").map(|(k, _)| k.to_string()))
        .collect()
}

fn write_params(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn params_json(alpha: f64, rho: f64) -> String {
    format!(r#"{{"alpha": {alpha}, "rho": {rho}, "lambda": 2.0, "xi": 0.2, "vbar": 0.04, "v0": 0.04}}"#)
}

/// CSV body rows as vectors of fields, skipping `#` metadata rows.
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).filter(|l| !l.starts_with('#')).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn classify_cases() {
    let o = run(&["classify", "--u", "-13"]);
    assert_eq!(json(&o)["case"], "A");
    assert_eq!(key_order(&o), ["u", "case", "e0", "e1", "c1"]);
    assert_eq!(json(&run(&["classify", "--u", "0.5"]))["case"], "D");
    let csv = stdout(&run(&["classify", "--u", "-5", "--format", "csv"]));
    assert!(csv.starts_with("u,case,e0,e1,c1\n-5,C,"));
}

#[test]
fn missing_or_malformed_params_exit_two() {
    let o = run(&["--params", "/definitely/not/here.json", "classify", "--u", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = write_params(dir.path(), "bad.json", r#"{"alpha": 0.6}"#);
    assert_eq!(run(&["--params", &bad, "classify", "--u", "1"]).status.code(), Some(2));
    let invalid = write_params(dir.path(), "invalid.json", &params_json(0.4, -0.8));
    assert_eq!(run(&["--params", &invalid, "classify", "--u", "1"]).status.code(), Some(2));
    assert_eq!(run(&["classify", "--u", "abc"]).status.code(), Some(2));
    assert_eq!(run(&["classify", "--u", "1", "--format", "xml"]).status.code(), Some(2));
}

#[test]
fn params_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_params(dir.path(), "p.json", &params_json(0.9, 0.5));
    let o = bin().env("ROUGH_EXPLOSION_PARAMS", &path).args(["classify", "--u", "20"]).output().unwrap();
    // rho > 0 moves case A to the positive axis.
    assert_eq!(json(&o)["case"], "A");
}

#[test]
fn sweep_case_ordering_and_bounds() {
    let o = run(&["sweep", "--from", "-60", "--to", "-1", "--points", "200"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), "u,case,explosion_time,method,lower_bound,upper_bound,t1_star");
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 200);
    let mut seen = std::collections::BTreeSet::new();
    for r in &rows {
        seen.insert(r[1].clone());
        match r[1].as_str() {
            "A" => {
                assert_eq!(r[3], "algorithm_1");
                let (t, lo, hi) = (num(&r[2]), num(&r[4]), num(&r[5]));
                assert!(lo <= t && t <= hi, "{r:?}");
            }
            "B" => {
                assert_eq!(r[3], "algorithm_2_lower_bound");
                assert!(num(&r[4]) <= num(&r[5]));
            }
            _ => {
                assert_eq!(r[2], "inf");
                assert_eq!(r[3], "none");
            }
        }
    }
    assert_eq!(seen.into_iter().collect::<Vec<_>>(), ["A", "B", "C"]);
}

#[test]
fn sweep_is_deterministic_and_handles_empty_range() {
    let args = ["sweep", "--from", "-30", "--to", "30", "--points", "41"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let empty = stdout(&run(&["sweep", "--from", "-30", "--to", "-1", "--points", "0"]));
    assert_eq!(empty, "u,case,explosion_time,method,lower_bound,upper_bound,t1_star\n");
    let v = json(&run(&["sweep", "--from", "-30", "--to", "-20", "--points", "3", "--format", "json"]));
    assert_eq!(v.as_array().unwrap().len(), 3);
    assert_eq!(v[0]["method"], "algorithm_1");
}

#[test]
fn sweep_closer_to_classical_as_alpha_grows() {
    let dir = tempfile::tempdir().unwrap();
    let gap = |alpha: f64| -> f64 {
        let path = write_params(dir.path(), &format!("a{alpha}.json"), &params_json(alpha, -0.8));
        let text = stdout(&run(&["--params", &path, "sweep", "--from", "-60", "--to", "-13", "--points", "20"]));
        csv_rows(&text).iter().map(|r| ((num(&r[2]) - num(&r[6])) / num(&r[6])).abs()).fold(0.0, f64::max)
    };
    let (g6, g9) = (gap(0.6), gap(0.9));
    assert!(g9 < 0.5 * g6, "{g6} vs {g9}");
}

#[test]
fn critical_roundtrip_and_keys() {
    let o = run(&["critical", "-T", "0.1", "--side", "lower"]);
    let v = json(&o);
    assert_eq!(key_order(&o), ["T", "side", "method", "u_minus", "residual", "lee_slope", "left_tail_exponent"]);
    assert_eq!(v["method"], "algorithm_1_inversion");
    assert!(v["residual"].as_f64().unwrap() < 1e-6 * 0.1);
    assert!(v["u_minus"].as_f64().unwrap() < -12.5);
    let slope = v["lee_slope"].as_f64().unwrap() * 0.1;
    assert!(slope > 0.0 && slope <= 2.0);
    let csv = stdout(&run(&["critical", "-T", "0.1", "--format", "csv"]));
    assert!(csv.starts_with("T,side,u_critical,residual,lee_slope,tail_exponent\n0.1,lower,-25.3"));
}

#[test]
fn critical_range_and_sign_errors_exit_three() {
    let o = run(&["critical", "-T", "100"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("valid range (0, 0.48"));
    assert_eq!(run(&["critical", "-T", "0.1", "--side", "upper"]).status.code(), Some(3));
    let dir = tempfile::tempdir().unwrap();
    let mirror = write_params(dir.path(), "m.json", &params_json(0.6, 0.8));
    assert_eq!(run(&["--params", &mirror, "critical", "-T", "0.1"]).status.code(), Some(3));
    let v = json(&run(&["--params", &mirror, "critical", "-T", "0.1", "--side", "upper"]));
    assert!(v["u_plus"].as_f64().unwrap() > 1.0);
    assert!(v["right_tail_exponent"].as_f64().unwrap() < -2.0);
    assert_eq!(run(&["critical", "-T", "0.1", "--side", "middle"]).status.code(), Some(2));
}

#[test]
fn vie_zero_moment() {
    let text = stdout(&run(&["vie", "--u-re", "0", "--t-end", "1", "--steps", "16"]));
    assert_eq!(text.lines().next().unwrap(), "t,re_f,im_f,re_mgf,im_mgf");
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 17);
    for r in rows {
        assert_eq!((num(&r[1]), num(&r[2]), num(&r[3]), num(&r[4])), (0.0, 0.0, 1.0, 0.0));
    }
    assert_eq!(text.lines().last().unwrap(), "# blow_up,false,blowup_time,");
}

#[test]
fn vie_blowup_inside_bounds() {
    let text = stdout(&run(&["vie", "--u-re", "-20", "--t-end", "0.4", "--steps", "2048"]));
    let meta: Vec<&str> = text.lines().last().unwrap().split(',').collect();
    assert_eq!(&meta[..3], ["# blow_up", "true", "blowup_time"]);
    let bt = num(meta[3]);
    let b = json(&run(&["bounds", "--u", "-20"]));
    assert!(b["lower_bound"].as_f64().unwrap() < bt && bt < b["upper_bound"].as_f64().unwrap());
}

#[test]
fn vie_characteristic_function_bounded() {
    let text = stdout(&run(&["vie", "--u-re", "0", "--u-im", "2", "--t-end", "0.5", "--steps", "256"]));
    for r in csv_rows(&text) {
        assert!(num(&r[3]).hypot(num(&r[4])) <= 1.0 + 1e-12, "{r:?}");
    }
    let v = json(&run(&["vie", "--u-re", "0", "--u-im", "2", "--t-end", "0.5", "--steps", "16", "--format", "json"]));
    assert_eq!(v["t"].as_array().unwrap().len(), 17);
    assert_eq!(v["blew_up"], false);
}

#[test]
fn vie_errors() {
    // Far too coarse for a blow-up thousands of time units out.
    let o = run(&["vie", "--u-re", "-5.3", "--t-end", "240", "--steps", "16"]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(run(&["vie", "--u-re", "-20", "--t-end", "1", "--steps", "8"]).status.code(), Some(2));
}

#[test]
fn bounds_outside_cases_a_b_exit_three() {
    assert_eq!(run(&["bounds", "--u", "0.5"]).status.code(), Some(3));
    let csv = stdout(&run(&["bounds", "--u", "-8", "--format", "csv"]));
    assert!(csv.starts_with("u,case,lower_bound,upper_bound\n-8,B,"));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let o = run(&["sweep", "--from", "-20", "--to", "-15", "--points", "3", "--out", path.to_str().unwrap()]);
    assert!(o.status.success() && o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn shipped_parameter_file_matches_builtin_default() {
    let shipped = concat!(env!("CARGO_MANIFEST_DIR"), "/../../params/fig1.json");
    let a = run(&["--params", shipped, "sweep", "--from", "-40", "--to", "40", "--points", "9"]);
    let b = run(&["sweep", "--from", "-40", "--to", "40", "--points", "9"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}
