use std::path::PathBuf;
use std::process::Command;

fn manifest() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

/// Builds the shared library into its own target directory, so the build
/// does not wait on the lock held by the running test.
fn build_shared_library() -> PathBuf {
    let target = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("shared");
    let status = Command::new(env!("CARGO"))
        .args(["build", "--quiet", "-p", "baire-ffi", "--target-dir"])
        .arg(&target)
        .current_dir(manifest())
        .status()
        .unwrap();
    assert!(status.success());
    target.join("debug")
}

#[test]
fn header_declares_the_interface() {
    let h = std::fs::read_to_string(manifest().join("include/baire.h")).unwrap();
    for name in [
        "typedef struct BaireSeq BaireSeq",
        "BAIRE_STATUS_TOO_LARGE = 12",
        "baire_last_error",
        "baire_string_free",
        "baire_decode_json",
        "baire_fuse_json",
        "baire_check_cert_json",
    ] {
        assert!(h.contains(name), "missing {name}");
    }
}

#[test]
fn c_program_links_against_the_library() {
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler, skipping");
        return;
    }
    if !cfg!(target_os = "linux") {
        eprintln!("shared library naming assumed for Linux, skipping");
        return;
    }
    let dir = build_shared_library();
    let out = tempfile::tempdir().unwrap();
    let exe = out.path().join("smoke");
    let status = Command::new("cc")
        .arg(manifest().join("tests/c_smoke.c"))
        .arg("-I")
        .arg(manifest().join("include"))
        .arg("-L")
        .arg(&dir)
        .args(["-lbaire_ffi", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let run = Command::new(&exe).env("LD_LIBRARY_PATH", &dir).output().unwrap();
    assert_eq!(String::from_utf8_lossy(&run.stdout), "ok\n", "exit {:?}", run.status);
}
