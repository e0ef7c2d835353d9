use std::path::PathBuf;
use std::process::{Command, Output};

fn forge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frobenius-forge"))
        .args(args)
        .env("FROBENIUS_FORGE_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name)
}

fn pair(v: &serde_json::Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

#[test]
fn catalog_list_and_show() {
    let o = forge(&["catalog", "list"]);
    assert!(o.status.success());
    let s = stdout(&o);
    for name in ["P1", "P2", "poly2d"] {
        assert!(s.contains(name), "{s}");
    }
    let o = forge(&["catalog", "show", "P2", "--truncation", "3"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v.is_object());
    assert_eq!(forge(&["catalog", "show", "P7"]).status.code(), Some(1));
}

#[test]
fn frame_json_on_the_line() {
    let o = forge(&["frame", "--model", "P1", "--point", "0,0", "--format", "json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let close = |got: (f64, f64), want: (f64, f64)| (got.0 - want.0).abs() < 1e-12 && (got.1 - want.1).abs() < 1e-12;
    assert!(close(pair(&v["u"][0]), (2.0, 0.0)));
    assert!(close(pair(&v["u"][1]), (-2.0, 0.0)));
    assert!(close(pair(&v["g"][0]), (0.5, 0.0)));
    assert!(close(pair(&v["g"][1]), (-0.5, 0.0)));
    assert!(close(pair(&v["gamma"][0][1]), (0.0, -0.125)));
    assert!(close(pair(&v["gamma"][0][0]), (-0.125, 0.0)));
}

#[test]
fn exit_codes() {
    assert_eq!(forge(&["frame", "--model", "poly2d", "--point", "0,0"]).status.code(), Some(2));
    assert_eq!(forge(&["verify", "--model", "P1", "--suite", "no-such-suite"]).status.code(), Some(1));
    assert_eq!(forge(&["frame", "--model", "P1", "--point", "0,0,0"]).status.code(), Some(1));
    assert_eq!(forge(&["frame", "--model", "P1"]).status.code(), Some(1));
    assert_eq!(forge(&["frame", "--model", "P1", "--point", "0,0", "--format", "yaml"]).status.code(), Some(1));
    assert_eq!(forge(&["bogus"]).status.code(), Some(1));
    assert_eq!(forge(&["--help"]).status.code(), Some(0));
    assert_eq!(forge(&["verify", "--model", "P1", "--suite", "virasoro"]).status.code(), Some(0));
    assert_eq!(
        forge(&["verify", "--model", "P1", "--suite", "frame-core", "--tol", "0"]).status.code(),
        Some(3)
    );
}

#[test]
fn truncated_plane_wdvv_failure_is_reported() {
    let o = forge(&[
        "verify", "--model", "P2", "--truncation", "1", "--point", "0,0,0.5", "--suite", "wdvv", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["pass"], false);
    let note = v["identities"][0]["note"].as_str().unwrap();
    assert!(note.contains("truncation"), "{note}");
}

#[test]
fn verify_writes_report_file() {
    let path = scratch("getzler-p1.json");
    let _ = std::fs::remove_file(&path);
    let o = forge(&[
        "verify", "--model", "P1", "--suite", "getzler", "--format", "json", "--out", path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["suite"], "getzler");
    assert_eq!(v["pass"], true);
}

#[test]
fn markdown_report() {
    let o = forge(&["verify", "--model", "P2", "--suite", "virasoro", "--format", "md"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("## virasoro on P2"), "{s}");
    assert!(s.contains("virasoro-l1"));
}

#[test]
fn model_file_round_trip() {
    let o = forge(&["catalog", "show", "P1"]);
    let path = scratch("p1-model.json");
    std::fs::write(&path, &o.stdout).unwrap();
    let a = forge(&["frame", "--model-file", path.to_str().unwrap(), "--point", "0.1,-0.2", "--format", "json"]);
    let b = forge(&["frame", "--model", "P1", "--point", "0.1,-0.2", "--format", "json"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let va: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    let vb: serde_json::Value = serde_json::from_str(&stdout(&b)).unwrap();
    assert_eq!(va["gamma"], vb["gamma"]);
    assert_eq!(va["u"], vb["u"]);

    let bad = scratch("broken-model.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(forge(&["frame", "--model-file", bad.to_str().unwrap(), "--point", "0,0"]).status.code(), Some(1));
}

#[test]
fn genus1_on_the_line() {
    let o = forge(&["genus1", "--model", "P1", "--point", "0,0", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let (p0, _) = pair(&v["phi"][0]);
    let (one, _) = pair(&v["onepoint"][1]);
    assert!((p0 + 1.0 / 48.0).abs() < 1e-12);
    assert!((one + 1.0 / 24.0).abs() < 1e-12);
    assert!(v["getzler_residual"].as_f64().unwrap() < 1e-5);
}

#[test]
fn thread_variable_is_validated() {
    let o = Command::new(env!("CARGO_BIN_EXE_frobenius-forge"))
        .args(["catalog", "list"])
        .env("FROBENIUS_FORGE_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}
