use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const FIXTURE: &str = r#"{"base": {"kind": "sin", "b": 3.141592653589793},
  "poly": [[0.0, 0.0], [1.0, 0.0]],
  "tail": {"M": 3, "modes": {"1": [0.05, 0.01], "-2": [0.02, 0.0], "3": [-0.01, 0.02]}}}"#;

fn sinetype(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sinetype")).args(args).env("SINETYPE_THREADS", "2").output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path).unwrap().lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn zeros_row_count() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "fixture.json", FIXTURE);
    let out = dir.path().join("run");
    let o = sinetype(&["zeros", "--fn", &f, "--nmax", "200", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(out.join("zeros.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), "n,re_z,im_z,re_z0,im_z0,re_kappa,im_kappa");
    let r = rows(&out.join("zeros.csv"));
    assert_eq!(r.len(), 201);
    assert_eq!(r[0][0], "0");
    assert_eq!(r[200][0], "200");
}

#[test]
fn reconstruct_and_complete_from_written_zeros() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "fixture.json", FIXTURE);
    let d = dir.path().to_str().unwrap();
    assert!(sinetype(&["zeros", "--fn", &f, "--nmax", "129", "--out", d]).status.success());
    let zeros = dir.path().join("zeros.csv");
    let z = zeros.to_str().unwrap();

    let o = sinetype(&["reconstruct", "--fn", &f, "--zeros", z, "--modes", "8", "--out", d]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = rows(&dir.path().join("recon_report.csv"));
    let worst = report.iter().find(|r| r[0] == "max_mode_abs_error").unwrap()[2].parse::<f64>().unwrap();
    assert!(worst < 1e-8, "{worst}");
    assert_eq!(report.iter().filter(|r| r[0] == "mode_abs_error").count(), 17);
    let tail = fs::read_to_string(dir.path().join("tail_recovered.json")).unwrap();
    assert!(tail.contains("\"M\": 8"));

    let o = sinetype(&["complete", "--fn", &f, "--zeros", z, "--modes", "8", "--out", d]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let done = rows(&dir.path().join("zeros_completed.csv"));
    let orig = rows(&zeros);
    assert_eq!(done.len(), orig.len());
    let head = |r: &Vec<String>| (r[1].parse::<f64>().unwrap(), r[2].parse::<f64>().unwrap());
    let (a, b) = (head(&done[0]), head(&orig[0]));
    assert!((a.0 - b.0).hypot(a.1 - b.1) < 1e-6);
}

#[test]
fn stability_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str| {
        let out = dir.path().join(sub);
        let o = sinetype(&[
            "stability", "--r", "1", "--trials", "200", "--seed", "7", "--modes", "8", "--nmax", "48", "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        out
    };
    let (a, b) = (run("a"), run("b"));
    for name in ["stability_records.csv", "c_r_summary.csv", "stability_failures.csv"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    let header = fs::read_to_string(a.join("stability_records.csv")).unwrap();
    assert!(header.starts_with("seed_a,seed_b,r,numerator,denominator,ratio\n"));
    let summary = rows(&a.join("c_r_summary.csv"));
    assert_eq!(summary.len(), 1);
    assert_eq!(summary[0][1], "200");
    assert!(summary[0][2].parse::<f64>().unwrap().is_finite());
}

#[test]
fn verify_passes_for_fixture_and_fails_for_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "fixture.json", FIXTURE);
    let d = dir.path().to_str().unwrap();
    let o = sinetype(&["verify", "--fn", &f, "--out", d]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(rows(&dir.path().join("verify_report.csv")).iter().all(|r| r[1] == "true"));

    let bad = write(dir.path(), "bad.json", "{\"base\": ");
    let o = sinetype(&["verify", "--fn", &bad, "--out", d]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("InvalidInput"));

    let o = sinetype(&["zeros", "--fn", "/nonexistent/f.json", "--out", d]);
    assert_eq!(o.status.code(), Some(2));
    let o = sinetype(&["zeros", "--frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    let o = sinetype(&["stability", "--r", "1", "--out", d]);
    assert_eq!(o.status.code(), Some(2), "seed is mandatory");
}

#[test]
fn numerical_failure_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    // a tail this large puts extra zeros near the real axis
    let big = r#"{"base": {"kind": "sin", "b": 3.141592653589793}, "poly": [[1.0, 0.0]],
      "tail": {"M": 1, "modes": {"0": [40.0, 0.0]}}}"#;
    let f = write(dir.path(), "big.json", big);
    let o = sinetype(&["zeros", "--fn", &f, "--nmax", "20", "--out", d]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: "));
}

#[test]
fn sturm_liouville_experiment() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let s = write(dir.path(), "u.json", r#"{"profile": "N1", "modes": {"1": 0.02}}"#);
    let o = sinetype(&["sturm-liouville", "--series", &s, "--scale", "1,10", "--len", "40", "--out", d]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = rows(&dir.path().join("sl_experiment.csv"));
    assert_eq!(r.len(), 2);
    let ratios: Vec<f64> = r.iter().map(|x| x[3].parse().unwrap()).collect();
    assert!(ratios.iter().all(|q| q.is_finite()));
    assert!(ratios[1] / ratios[0] < 2.0 && ratios[0] / ratios[1] < 2.0);
    assert_eq!(r[0][4], "N1");

    let spec = dir.path().join("spectrum_scale_1.csv");
    assert!(spec.exists());
    let o = sinetype(&["sturm-liouville", "--spectrum-a", spec.to_str().unwrap(), "--out", d]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let again = rows(&dir.path().join("sl_experiment.csv"));
    assert_eq!(again[0][1], r[0][1]);
}
