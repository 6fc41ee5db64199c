use mfel_core::arith::{q, z};
use mfel_core::birational::star_subdivide;
use mfel_core::elliptic_genus::{check_invariance, genus_numeric, sample_points};
use mfel_core::multifan::{projective, ToricModel};
use num_complex::Complex64;
use serde_json::Value;
use std::path::PathBuf;
use std::process::Command;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

fn mfel(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_mfel")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap_or_else(|e| panic!("{e}: {s}"))
}

#[test]
fn numeric_genus_matches_library() {
    let (code, out, _) = mfel(&["genus", "--fan", &fixture("p2.json"), "--numeric", "0.1+0.01i,-0.2,0.1+1.1i,0.3"]);
    assert_eq!(code, 0);
    let v = json(&out);
    let got = Complex64::new(v["value"][0].as_f64().unwrap(), v["value"][1].as_f64().unwrap());
    let m = ToricModel::primitive(projective(2)).unwrap();
    let w = [Complex64::new(0.1, 0.01), Complex64::new(-0.2, 0.0)];
    let want = genus_numeric(&m, &vec![q(1); 3], &w, Complex64::new(0.1, 1.1), Complex64::new(0.3, 0.0), 40).unwrap();
    assert!((got - want.value).norm() < 1e-12);
}

#[test]
fn invariance_report_matches_library() {
    let (code, out, _) =
        mfel(&["verify", "invariance", "--fan", &fixture("p2.json"), "--subdivide", "1,2@1,1", "--seed", "7"]);
    assert_eq!(code, 0, "{out}");
    let v = json(&out);
    assert_eq!(v["status"], "pass");
    assert_eq!(v["details"]["seed"], 7);
    let rho = star_subdivide(&ToricModel::primitive(projective(2)).unwrap(), &[0, 1], &[z(1), z(1)]).unwrap();
    let r = check_invariance(&rho, &vec![q(1); 3], &sample_points(2, 3, 7), 40, 1e-9, None);
    assert!(r.passed());
    let e = v["max_error"].as_f64().unwrap();
    assert!((e - r.max_error).abs() < 1e-15);
}

#[test]
fn series_output_lists_coefficients() {
    let (code, out, _) = mfel(&["genus", "--fan", &fixture("p1_2.json"), "--qexp", "1", "--window", "1"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("# s = zeta^(1/"));
    assert!(out.lines().any(|l| l.starts_with("u=(0) q^{0}:")));
}

#[test]
fn rigidity_and_class_pass() {
    let (code, out, _) = mfel(&[
        "verify",
        "rigidity",
        "--fan",
        &fixture("p2.json"),
        "--divisor",
        "4,4,-2",
        "--n",
        "3",
        "--k",
        "2",
        "--eta",
        "1,1,0",
        "--u",
        "1,1",
    ]);
    assert_eq!(code, 0, "{out}");
    let (code, out, _) =
        mfel(&["verify", "class", "--fan", &fixture("p2.json"), "--subdivide", "1,2@1,1", "--degree", "2"]);
    assert_eq!(code, 0, "{out}");
}

#[test]
fn triangulations_of_a_square_cone_agree() {
    let (code, out, _) = mfel(&["verify", "qcartier", "--fan", &fixture("square.json"), "--samples", "2"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(json(&out)["status"], "pass");
}

#[test]
fn subdivide_emits_a_readable_fan() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("star.json");
    let (code, out, _) = mfel(&["subdivide", "--fan", &fixture("p2.json"), "--cone", "1,2", "--ray", "1,1"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["morphism"]["kappa"], serde_json::json!([0, 1, 2]));
    std::fs::write(&path, serde_json::to_string(&v["fan"]).unwrap()).unwrap();
    let f = mfel_core::fan_io::read(&path).unwrap();
    assert_eq!(f.rays.len(), 4);
    assert_eq!(f.maximal.len(), 4);
    let (code, _, _) = mfel(&["genus", "--fan", path.to_str().unwrap(), "--numeric", "0.1,0.2,0.1+1.1i,0.3"]);
    assert_eq!(code, 0);
}

#[test]
fn malformed_json_reports_location() {
    let (code, out, err) = mfel(&["genus", "--fan", &fixture("broken.json"), "--qexp", "1"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("line 4 column"), "{err}");
}

#[test]
fn input_errors_exit_2() {
    let p2 = fixture("p2.json");
    for args in [
        vec!["genus", "--fan", p2.as_str(), "--numeric", "0.1,0.2"],
        vec!["genus", "--fan", p2.as_str(), "--numeric", "0.1,0.2,0.1-1i,0.3"],
        vec!["verify", "invariance", "--fan", p2.as_str(), "--subdivide", "0,1@1,1"],
        vec!["verify", "invariance", "--fan", p2.as_str()],
        vec!["subdivide", "--fan", p2.as_str(), "--cone", "1,2", "--ray", "1"],
        vec!["genus", "--fan", "/nonexistent.json", "--qexp", "1"],
        vec!["bogus"],
    ] {
        let (code, _, err) = mfel(&args);
        assert_eq!(code, 2, "{args:?}");
        assert!(!err.is_empty());
    }
}

#[test]
fn output_file_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let (code, out, _) = mfel(&[
        "verify",
        "class",
        "--fan",
        &fixture("p2.json"),
        "--rescale",
        "1,2,1",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    assert_eq!(json(&std::fs::read_to_string(&path).unwrap())["check"], "class");
}
