//! Compiles a C program against the generated header and the static library.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "entrofunc.h"

int main(void) {
    double xs[] = {0.0, 0.1, 0.5};
    EntrofuncSample *x = NULL;
    if (entrofunc_sample_continuous(xs, 3, 1, &x) != ENTROFUNC_STATUS_OK) return 1;
    EntrofuncReport rep;
    if (entrofunc_analyze(x, NULL, 2, 0, 0.2, 0.95, &rep) != ENTROFUNC_STATUS_OK) return 2;
    if (fabs(rep.q - 0.8333333333333333) > 1e-12 || !rep.has_interval) return 3;
    double q;
    if (entrofunc_estimate_q(x, NULL, 2, 0, -1.0, &q) != ENTROFUNC_STATUS_INVALID_ARGUMENT) return 4;
    if (entrofunc_last_error()[0] == '\0') return 5;
    entrofunc_sample_free(x);
    printf("q=%.6f h=%.6f\n", rep.q, rep.h_hat);
    return 0;
}
"#;

fn static_lib() -> Option<PathBuf> {
    // target/<profile>/deps/<test binary> -> target/<profile>
    let profile_dir = std::env::current_exe().ok()?.parent()?.parent()?.to_path_buf();
    let lib = profile_dir.join("libentrofunc_ffi.a");
    lib.exists().then_some(lib)
}

#[test]
fn c_program_links_and_runs() {
    let Some(lib) = static_lib() else {
        panic!("static library not found next to the test binary");
    };
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("no C compiler ({cc}); skipping");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(&src, PROGRAM).unwrap();
    let exe = dir.path().join("main");
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = Command::new(&cc)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&exe).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("q=0.833333"));
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/entrofunc.h")).unwrap();
    let src = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("src/lib.rs")).unwrap();
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .filter_map(|l| l.split('(').next())
        .collect();
    assert!(exports.len() >= 14);
    for f in exports {
        assert!(header.contains(&format!("{f}(")), "{f} missing from header");
    }
}
