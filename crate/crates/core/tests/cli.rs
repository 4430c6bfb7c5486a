use std::path::PathBuf;
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn fixture(name: &str) -> String {
    fixtures().join(name).display().to_string()
}

fn calgeom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_calgeom")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn tmp(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("calgeom-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn value(report: &str, key: &str) -> String {
    report
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("no `{key}` in\n{report}"))
        .to_string()
}

#[test]
fn comass_of_the_sl_form() {
    let o = calgeom(&["comass", "--form", &fixture("sl3.form")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let c: f64 = value(&out, "comass.comass").parse().unwrap();
    assert!((c - 1.0).abs() < 1e-3);
    assert!(out.contains("comass.restarts_used"));
    assert!(out.contains("comass.oracle_gap"));
    assert!(out.contains("maximizer[0].plane"));
}

#[test]
fn product_of_circles_is_stationary() {
    let o = calgeom(&["product", "--factors", "circle", "circle", "--resolution", "64", "--check-stationary"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(value(&out, "product.lambda_1"), "0.707106781187");
    assert_eq!(value(&out, "product.lambda_2"), "0.707106781187");
    let m: f64 = value(&out, "stationarity.max_abs").parse().unwrap();
    assert!(m <= 1e-3);
    assert_eq!(value(&out, "stationarity.n_fields"), "20");
    assert_eq!(value(&out, "stationarity.seed"), "0");
}

#[test]
fn demanded_stationarity_failure_exits_one() {
    let o = calgeom(&["stationarity", "--link", "latitude:0.5", "--resolution", "32", "--check-stationary"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(value(&stdout(&o), "stationarity.stationary"), "false");
    // without the demand the same run succeeds
    let o = calgeom(&["stationarity", "--link", "latitude:0.5", "--resolution", "32"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn obstruct_clifford_manifest() {
    let o = calgeom(&["obstruct", "--manifest", &fixture("clifford.json")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(value(&out, "obstruction.verdict"), "candidate-not-a-calibration");
    assert!(out.contains("obstruction.pullback_integral"));
    assert_eq!(value(&out, "obstruction.predicted_magnitude"), "4.44288293816");
}

#[test]
fn demanded_calibration_failure_exits_one() {
    let o = calgeom(&["obstruct", "--manifest", &fixture("clifford.json"), "--require-calibration"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn decompose_the_coassociative_form() {
    let o = calgeom(&["decompose", "--form", &fixture("coassociative7.form")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let f: f64 = value(&out, "decomposition.forbidden_max").parse().unwrap();
    assert!(f <= 1e-6);
    let lead: f64 = value(&out, "decomposition.leading_coefficient").parse().unwrap();
    assert!((lead - 1.0).abs() < 1e-9);
}

#[test]
fn gallery_passes() {
    let o = calgeom(&["gallery", "--dir", &fixtures().display().to_string()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    for file in ["sl3.form", "kahler4.form", "coassociative7.form", "clifford_torus.json", "sl_spheres.json"] {
        assert!(out.contains(file), "{file} missing");
    }
    assert!(!out.contains("pass = false"));
}

#[test]
fn malformed_manifest_reports_line_and_column() {
    let p = tmp("bad.json", "{\n  \"command\": \"obstruct\",\n  \"inputs\": { \"factors\": [\"circle\" }\n}\n");
    let o = calgeom(&["obstruct", "--manifest", &p.display().to_string()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3"), "{err}");
    assert!(err.contains("column"), "{err}");

    let p = tmp("unknown.json", "{\"command\": \"comass\", \"inputs\": {\"form\": \"x\", \"colour\": 1}}");
    let o = calgeom(&["comass", "--manifest", &p.display().to_string()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("colour"));
}

#[test]
fn input_errors_exit_two() {
    let p = tmp("bad.form", "1,2 : 1.0\n1,1 : 2.0\n");
    let o = calgeom(&["comass", "--form", &p.display().to_string()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    assert_eq!(calgeom(&["obstruct", "--factors", "circle"]).status.code(), Some(2));
    assert_eq!(calgeom(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(calgeom(&["comass"]).status.code(), Some(2));
}

#[test]
fn records_are_byte_identical_across_runs() {
    let args = [
        "product",
        "--factors",
        "sphere2",
        "circle",
        "--resolution",
        "16",
        "--check-stationary",
        "--format",
        "records",
        "--seed",
        "3",
    ];
    let a = calgeom(&args);
    let b = calgeom(&args);
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
    for line in stdout(&a).lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v.as_object().unwrap().values().all(|x| !x.is_object() && !x.is_array()));
    }
}

#[test]
fn output_flag_writes_a_file() {
    let dir = std::env::temp_dir().join(format!("calgeom-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("k.txt");
    let o = calgeom(&["comass", "--form", &fixture("kahler4.form"), "--output", &path.display().to_string()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().contains("comass.comass = 1"));
}

#[test]
fn in_process_run_matches_the_binary() {
    let code = calgeom::cli::run(["calgeom", "comass", "--form", &fixture("kahler4.form")]);
    assert_eq!(code, 0);
    let code = calgeom::cli::run(["calgeom", "comass", "--form", "/nonexistent.form"]);
    assert_eq!(code, 2);
}
