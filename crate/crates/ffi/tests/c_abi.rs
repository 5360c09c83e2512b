use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use gk_ffi::*;

unsafe fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = CStr::from_ptr(p).to_str().unwrap().to_owned();
    gk_string_free(p);
    s
}

#[test]
fn matrix_text_rank_and_digest() {
    unsafe {
        let text = CString::new("3 3 2\n1 0 0\n0 1 0\n0 0 1\n").unwrap();
        let mut m = ptr::null_mut();
        assert_eq!(gk_matrix_from_text(text.as_ptr(), &mut m), GkStatus::GkOk);
        let (mut r, mut c, mut rank) = (0, 0, 0);
        assert_eq!(gk_matrix_shape(m, &mut r, &mut c), GkStatus::GkOk);
        assert_eq!((r, c), (3, 3));
        assert_eq!(gk_matrix_rank(m, &mut rank), GkStatus::GkOk);
        assert_eq!(rank, 3);
        let mut out = ptr::null_mut();
        assert_eq!(gk_matrix_to_text(m, &mut out), GkStatus::GkOk);
        assert_eq!(take_string(out), text.to_str().unwrap());
        assert_eq!(gk_matrix_digest(m, &mut out), GkStatus::GkOk);
        assert_eq!(take_string(out).len(), 64);
        gk_matrix_free(m);

        let bad = CString::new("2 2 4\n1 0\n0 1\n").unwrap();
        assert_eq!(gk_matrix_from_text(bad.as_ptr(), &mut m), GkStatus::GkParseError);
        assert!(!CStr::from_ptr(gk_last_error_message()).to_bytes().is_empty());
    }
}

#[test]
fn representing_matrix_factorizes() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(gk_graph_new(8, 4, 2, &mut g), GkStatus::GkOk);
        let mut m = ptr::null_mut();
        assert_eq!(gk_representing_matrix(g, 2, &mut m), GkStatus::GkOk);
        let mut rank = 0;
        gk_matrix_rank(m, &mut rank);
        let mut b = ptr::null_mut();
        assert_eq!(gk_lempel_factorize(m, &mut b), GkStatus::GkOk);
        let (mut rows, mut cols) = (0, 0);
        gk_matrix_shape(b, &mut rows, &mut cols);
        assert_eq!((rows, cols), (70, rank));
        gk_matrix_free(b);
        gk_matrix_free(m);

        assert_eq!(gk_representing_matrix(g, 3, &mut m), GkStatus::GkOk);
        assert_eq!(gk_lempel_factorize(m, &mut b), GkStatus::GkWrongField);
        assert_eq!(gk_representing_matrix(g, 4, &mut b), GkStatus::GkInvalidArgument);
        gk_matrix_free(m);
        gk_graph_free(g);
    }
}

#[test]
fn certificates_and_formulas() {
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(gk_cert_triangle_free(6, &mut out), GkStatus::GkOk);
        let cert: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
        assert_eq!(cert["verdict"], "verified");
        assert_eq!(cert["claim"], "triangle-free-od");
        assert_eq!(gk_cert_cycles(3, 10, 2, &mut out), GkStatus::GkInvalidArgument);
        assert_eq!(gk_cert_vchrom(8, 2, &mut out), GkStatus::GkOk);
        let cert: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
        assert_eq!(cert["measured"]["vector_coloring"]["holds"], true);
        assert_eq!(gk_stahl_rhs(4, 3, 6, &mut out), GkStatus::GkOk);
        assert_eq!(take_string(out), "8");
        assert_eq!(CStr::from_ptr(gk_version()).to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include "gk.h"

int main(void) {
    GkGraph *g = NULL;
    if (gk_graph_new(5, 2, 1, &g) != GK_OK) return 10;
    uint64_t n = 0;
    gk_graph_order(g, &n);
    GkMatrix *m = NULL;
    if (gk_representing_matrix(g, 2, &m) != GK_OK) return 11;
    uint64_t rank = 0;
    gk_matrix_rank(m, &rank);
    if (gk_graph_new(2, 5, 1, &g) != GK_INVALID_ARGUMENT) return 12;
    printf("%llu %llu %s\n", (unsigned long long)n, (unsigned long long)rank, gk_last_error_message()[0] ? "err" : "none");
    gk_matrix_free(m);
    return 0;
}
"#;

/// Compiles a C program against the generated header and the static library.
#[test]
fn header_compiles_and_links_from_c() {
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let libdir = exe.parent().unwrap().parent().unwrap().to_path_buf();
    // test builds only produce the rlib; build the C-facing archive explicitly
    let status = Command::new(env!("CARGO"))
        .args(["build", "--quiet", "-p", "gk-ffi", "--lib", "--target-dir"])
        .arg(libdir.parent().unwrap())
        .status()
        .unwrap();
    assert!(status.success());
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("main.c");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let bin = tmp.path().join("main");
    let status = Command::new(&cc)
        .arg(&src)
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(libdir.join("libgk_ffi.a"))
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "{:?}", out);
    let rank = unsafe {
        let (mut g, mut m, mut rank) = (ptr::null_mut(), ptr::null_mut(), 0);
        gk_graph_new(5, 2, 1, &mut g);
        gk_representing_matrix(g, 2, &mut m);
        gk_matrix_rank(m, &mut rank);
        gk_matrix_free(m);
        gk_graph_free(g);
        rank
    };
    assert!(rank <= 6);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), format!("10 {rank} err\n"));
}

fn which_cc() -> Result<String, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if Command::new(cc).arg("--version").output().is_ok_and(|o| o.status.success()) {
            return Ok(cc.to_string());
        }
    }
    Err(())
}
