use serde_json::Value;
use std::path::Path;
use std::process::Command;

fn baire(args: &[&str], dir: &Path) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_baire")).args(args).current_dir(dir).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn generators_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    for kind in ["seq", "automaton", "bit-code", "model", "family", "relation", "morphism"] {
        let args = ["gen", "--kind", kind, "--seed", "42"];
        let first = baire(&args, dir.path());
        assert_eq!(first.0, 0, "{kind}");
        assert_eq!(first, baire(&args, dir.path()), "{kind}");
        assert_ne!(first.1, baire(&["gen", "--kind", kind, "--seed", "43"], dir.path()).1, "{kind}");
    }
}

#[test]
fn generated_model_fuses_into_a_valid_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let (code, model) = baire(&["gen", "--kind", "model", "--seed", "5"], p);
    assert_eq!(code, 0);
    std::fs::write(p.join("model.json"), model).unwrap();
    std::fs::write(p.join("a.json"), r#"{"prefix": [1, 2], "period": [3]}"#).unwrap();
    let (code, cert) = baire(&["fuse", "--a", "a.json", "--model", "model.json", "--N", "5", "--out", "cert.json"], p);
    assert_eq!(code, 0);
    assert!(cert.is_empty());
    let (code, report) = baire(&["check-cert", "--cert", "cert.json"], p);
    assert_eq!(code, 0, "{report}");

    // Moving a bump breaks the certificate.
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(p.join("cert.json")).unwrap()).unwrap();
    let last = doc["xPrefix"].as_array().unwrap().len() - 1;
    doc["xPrefix"][last] = Value::from(doc["xPrefix"][last].as_u64().unwrap() + 1);
    std::fs::write(p.join("bad.json"), doc.to_string()).unwrap();
    let (code, report) = baire(&["check-cert", "--cert", "bad.json"], p);
    assert_eq!(code, 1);
    let report: Value = serde_json::from_str(&report).unwrap();
    assert_eq!(report["valid"], Value::Bool(false));
}

#[test]
fn help_and_usage() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(baire(&["--help"], dir.path()).0, 0);
    assert_eq!(baire(&["fuse"], dir.path()).0, 2);
    let (code, out) = baire(&["aset", "--a", "missing.json", "--levels", "2"], dir.path());
    assert_eq!(code, 1);
    assert!(out.contains("InvalidInput"));
}
