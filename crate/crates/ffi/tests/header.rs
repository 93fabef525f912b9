use std::path::PathBuf;
use std::process::Command;

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_every_export() {
    let h = std::fs::read_to_string(crate_dir().join("include/tricore.h")).unwrap();
    for f in [
        "tc_last_error",
        "tc_version",
        "tc_string_free",
        "tc_matrix_new",
        "tc_matrix_from_json",
        "tc_matrix_free",
        "tc_matrix_shape",
        "tc_matrix_get",
        "tc_matrix_to_json",
        "tc_matrix_snf",
        "tc_complex_from_json",
        "tc_complex_free",
        "tc_complex_homology",
        "tc_homology_free",
        "tc_homology_rank",
        "tc_homology_torsion_len",
        "tc_homology_torsion",
        "tc_run",
    ] {
        assert!(h.contains(&format!("{f}(")), "{f} missing from header");
    }
    assert!(h.contains("typedef struct TcMatrix TcMatrix;"));
    assert!(h.contains("TC_STATUS_MALFORMED = 3"));
}

#[test]
fn c_program_links_against_static_library() {
    // target/<profile>/deps/<test exe> -> target/<profile>
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let target = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let lib = profile_dir.join("libtricore_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or static library");
        return;
    }
    let exe = target.join("tricore_smoke");
    let status = Command::new("cc")
        .arg(crate_dir().join("tests/c/smoke.c"))
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
