use std::ffi::{CStr, CString};
use std::ptr;
use tricore_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut std::ffi::c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    tc_string_free(s);
    out
}

unsafe fn last_error() -> String {
    CStr::from_ptr(tc_last_error()).to_str().unwrap().to_string()
}

const RP2: &str = include_str!("../../core/tests/data/rp2.json");

#[test]
fn matrix_snf_round_trip() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(tc_matrix_new(2, 2, [2i64, 4, 6, 8].as_ptr(), &mut m), TcStatus::Ok);
        let (mut r, mut c) = (0, 0);
        assert_eq!(tc_matrix_shape(m, &mut r, &mut c), TcStatus::Ok);
        assert_eq!((r, c), (2, 2));

        let (mut u, mut d, mut v) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
        assert_eq!(tc_matrix_snf(m, &mut u, &mut d, &mut v), TcStatus::Ok);
        let mut x = 0i64;
        let mut diag = vec![];
        for i in 0..2 {
            assert_eq!(tc_matrix_get(d, i, i, &mut x), TcStatus::Ok);
            diag.push(x);
        }
        assert_eq!(diag, vec![2, 4]);
        assert_eq!(tc_matrix_get(d, 0, 1, &mut x), TcStatus::Ok);
        assert_eq!(x, 0);

        let mut s = ptr::null_mut();
        assert_eq!(tc_matrix_to_json(d, &mut s), TcStatus::Ok);
        assert_eq!(take(s), r#"{"cols":2,"entries":[[2,0],[0,4]],"rows":2}"#);

        for h in [m, u, d, v] {
            tc_matrix_free(h);
        }
    }
}

#[test]
fn snf_factors_are_optional() {
    unsafe {
        let mut m = ptr::null_mut();
        let text = cstr(r#"{"rows":1,"cols":2,"entries":[[4,6]]}"#);
        assert_eq!(tc_matrix_from_json(text.as_ptr(), &mut m), TcStatus::Ok);
        let mut d = ptr::null_mut();
        assert_eq!(tc_matrix_snf(m, ptr::null_mut(), &mut d, ptr::null_mut()), TcStatus::Ok);
        let mut x = 0i64;
        assert_eq!(tc_matrix_get(d, 0, 0, &mut x), TcStatus::Ok);
        assert_eq!(x, 2);
        tc_matrix_free(d);
        tc_matrix_free(m);
    }
}

#[test]
fn homology_of_rp2() {
    unsafe {
        let text = cstr(RP2);
        let mut c = ptr::null_mut();
        assert_eq!(tc_complex_from_json(text.as_ptr(), &mut c), TcStatus::Ok);
        let mut h = ptr::null_mut();
        assert_eq!(tc_complex_homology(c, &mut h), TcStatus::Ok);

        let mut n = 0usize;
        let mut t = 0i64;
        assert_eq!(tc_homology_rank(h, 0, &mut n), TcStatus::Ok);
        assert_eq!(n, 1);
        assert_eq!(tc_homology_rank(h, 1, &mut n), TcStatus::Ok);
        assert_eq!(n, 0);
        assert_eq!(tc_homology_torsion_len(h, 1, &mut n), TcStatus::Ok);
        assert_eq!(n, 1);
        assert_eq!(tc_homology_torsion(h, 1, 0, &mut t), TcStatus::Ok);
        assert_eq!(t, 2);
        assert_eq!(tc_homology_rank(h, 2, &mut n), TcStatus::Ok);
        assert_eq!(n, 0);
        assert_eq!(tc_homology_torsion(h, 2, 0, &mut t), TcStatus::OutOfRange);
        assert!(last_error().contains("0 torsion factors"));

        tc_homology_free(h);
        tc_complex_free(c);
    }
}

#[test]
fn error_statuses() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(tc_matrix_from_json(ptr::null(), &mut m), TcStatus::NullPointer);
        let bad = cstr("{not json");
        assert_eq!(tc_matrix_from_json(bad.as_ptr(), &mut m), TcStatus::Malformed);
        assert!(m.is_null());
        assert!(!tc_last_error().is_null());

        let extra = cstr(r#"{"rows":1,"cols":1,"entries":[[1]],"x":0}"#);
        assert_eq!(tc_matrix_from_json(extra.as_ptr(), &mut m), TcStatus::Malformed);

        let non_utf8 = [0xffu8, 0xfe, 0];
        assert_eq!(tc_matrix_from_json(non_utf8.as_ptr().cast(), &mut m), TcStatus::InvalidUtf8);

        // ∂∘∂ ≠ 0 is a domain error, not a parse error.
        let dd = cstr(
            r#"{"ring":"Z","ranks":{"0":1,"1":1,"2":1},
               "differentials":{"1":{"rows":1,"cols":1,"entries":[[1]]},
                                "2":{"rows":1,"cols":1,"entries":[[1]]}}}"#,
        );
        let mut c = ptr::null_mut();
        assert_eq!(tc_complex_from_json(dd.as_ptr(), &mut c), TcStatus::Domain);
        assert!(c.is_null());

        let big = cstr(r#"{"rows":1,"cols":1,"entries":[["100000000000000000000"]]}"#);
        assert_eq!(tc_matrix_from_json(big.as_ptr(), &mut m), TcStatus::Ok);
        let mut x = 0i64;
        assert_eq!(tc_matrix_get(m, 0, 0, &mut x), TcStatus::OutOfRange);
        assert_eq!(tc_matrix_get(m, 1, 0, &mut x), TcStatus::OutOfRange);
        tc_matrix_free(m);

        assert_eq!(tc_matrix_new(1, 1, ptr::null(), &mut m), TcStatus::NullPointer);
        assert_eq!(tc_matrix_new(0, 3, ptr::null(), &mut m), TcStatus::Ok);
        tc_matrix_free(m);

        tc_matrix_free(ptr::null_mut());
        tc_complex_free(ptr::null_mut());
        tc_homology_free(ptr::null_mut());
        tc_string_free(ptr::null_mut());
    }
}

#[test]
fn run_subcommands() {
    unsafe {
        let args = [cstr("snf"), cstr("-")];
        let argv: Vec<_> = args.iter().map(|a| a.as_ptr()).collect();
        let input = cstr(r#"{"rows":2,"cols":2,"entries":[[2,4],[6,8]]}"#);
        let mut out = ptr::null_mut();
        let mut code = -1;
        assert_eq!(tc_run(argv.as_ptr(), argv.len(), input.as_ptr(), &mut out, &mut code), TcStatus::Ok);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(v["diagonal"], serde_json::json!([2, 4]));

        let args = [cstr("poincare")];
        let argv: Vec<_> = args.iter().map(|a| a.as_ptr()).collect();
        assert_eq!(tc_run(argv.as_ptr(), 1, ptr::null(), &mut out, &mut code), TcStatus::Ok);
        assert_eq!(code, 0);
        assert!(take(out).contains("not an F_2 L-space"));

        let bad = cstr("[");
        let args = [cstr("snf"), cstr("-")];
        let argv: Vec<_> = args.iter().map(|a| a.as_ptr()).collect();
        assert_eq!(tc_run(argv.as_ptr(), 2, bad.as_ptr(), &mut out, &mut code), TcStatus::Ok);
        assert_eq!(code, 2);
        tc_string_free(out);
        assert!(!last_error().is_empty());
    }
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(tc_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
