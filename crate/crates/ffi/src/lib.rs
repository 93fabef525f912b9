//! C interface to tricore.
//!
//! Objects are opaque handles created by `tc_*_new` / `tc_*_from_json` and
//! released with the matching `tc_*_free`. Every fallible call returns a
//! [`TcStatus`]; on failure `tc_last_error` describes the problem. Strings
//! returned through out-parameters are owned by the caller and released
//! with [`tc_string_free`].

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use tricore::abgroup::FgAbelianGroup;
use tricore::chain::{homology, Homology, IntComplex};
use tricore::exactlin::{smith_normal_form, IntMatrix};
use tricore::json::{self, ComplexJson, IntJson, MatrixJson};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Input could not be parsed or has the wrong shape.
    Malformed = 3,
    /// Input was well formed but the computation rejected it.
    Domain = 4,
    /// A value does not fit the requested C type, or an index is out of range.
    OutOfRange = 5,
    Panic = 6,
}

/// Integer matrix.
pub struct TcMatrix {
    inner: IntMatrix,
}

/// ℤ-coefficient chain complex.
pub struct TcComplex {
    inner: IntComplex,
}

/// Integral homology of a complex.
pub struct TcHomology {
    inner: Homology,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn fail(status: TcStatus, msg: impl Into<String>) -> TcStatus {
    set_error(msg);
    status
}

fn from_core(e: tricore::Error) -> TcStatus {
    let status = if e.is_malformed() { TcStatus::Malformed } else { TcStatus::Domain };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> TcStatus) -> TcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(TcStatus::Panic, "internal panic"),
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, TcStatus> {
    if p.is_null() {
        return Err(fail(TcStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(TcStatus::InvalidUtf8, "string is not UTF-8"))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> TcStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            TcStatus::Ok
        }
        Err(_) => fail(TcStatus::Malformed, "output contains a nul byte"),
    }
}

fn to_i64(x: &BigInt) -> Result<i64, TcStatus> {
    x.to_i64().ok_or_else(|| fail(TcStatus::OutOfRange, format!("{x} does not fit in int64_t")))
}

macro_rules! check_null {
    ($($p:expr),+) => {
        $(if $p.is_null() {
            return fail(TcStatus::NullPointer, concat!(stringify!($p), " is null"));
        })+
    };
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn tc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a `rows × cols` matrix from row-major entries.
///
/// # Safety
/// `entries` must point to `rows * cols` readable values (it may be NULL
/// when that product is 0) and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tc_matrix_new(rows: usize, cols: usize, entries: *const i64, out: *mut *mut TcMatrix) -> TcStatus {
    guard(|| {
        check_null!(out);
        let n = match rows.checked_mul(cols) {
            Some(n) => n,
            None => return fail(TcStatus::OutOfRange, "matrix too large"),
        };
        if n > 0 {
            check_null!(entries);
        }
        let data: Vec<BigInt> =
            if n == 0 { Vec::new() } else { std::slice::from_raw_parts(entries, n).iter().map(|x| BigInt::from(*x)).collect() };
        let inner = tri!(IntMatrix::from_vec(rows, cols, data).map_err(from_core));
        *out = Box::into_raw(Box::new(TcMatrix { inner }));
        TcStatus::Ok
    })
}

/// Parses `{"rows": n, "cols": m, "entries": [[...]]}`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tc_matrix_from_json(text: *const c_char, out: *mut *mut TcMatrix) -> TcStatus {
    guard(|| {
        check_null!(out);
        let s = tri!(read_str(text));
        let j: MatrixJson<IntJson> = tri!(json::parse(s).map_err(from_core));
        let inner = tri!(json::matrix_from_json(&j).map_err(from_core));
        *out = Box::into_raw(Box::new(TcMatrix { inner }));
        TcStatus::Ok
    })
}

/// # Safety
/// `m` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn tc_matrix_free(m: *mut TcMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// `m` must be a live handle; `rows` and `cols` writable.
#[no_mangle]
pub unsafe extern "C" fn tc_matrix_shape(m: *const TcMatrix, rows: *mut usize, cols: *mut usize) -> TcStatus {
    guard(|| {
        check_null!(m, rows, cols);
        *rows = (*m).inner.rows();
        *cols = (*m).inner.cols();
        TcStatus::Ok
    })
}

/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tc_matrix_get(m: *const TcMatrix, i: usize, j: usize, out: *mut i64) -> TcStatus {
    guard(|| {
        check_null!(m, out);
        let a = &(*m).inner;
        if i >= a.rows() || j >= a.cols() {
            return fail(TcStatus::OutOfRange, format!("({i}, {j}) outside {}x{}", a.rows(), a.cols()));
        }
        *out = tri!(to_i64(a.get(i, j)));
        TcStatus::Ok
    })
}

/// Canonical JSON for the matrix.
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tc_matrix_to_json(m: *const TcMatrix, out: *mut *mut c_char) -> TcStatus {
    guard(|| {
        check_null!(m, out);
        let s = tri!(json::canonical(&json::matrix_to_json(&(*m).inner)).map_err(from_core));
        write_string(out, s)
    })
}

/// Smith normal form `U · M · V = D`. Any of `u`, `d`, `v` may be NULL when
/// that factor is not wanted; the others receive new handles.
///
/// # Safety
/// `m` must be a live handle; non-NULL out-parameters must be writable.
#[no_mangle]
pub unsafe extern "C" fn tc_matrix_snf(
    m: *const TcMatrix,
    u: *mut *mut TcMatrix,
    d: *mut *mut TcMatrix,
    v: *mut *mut TcMatrix,
) -> TcStatus {
    guard(|| {
        check_null!(m);
        let s = smith_normal_form(&(*m).inner);
        for (out, x) in [(u, s.u), (d, s.d), (v, s.v)] {
            if !out.is_null() {
                *out = Box::into_raw(Box::new(TcMatrix { inner: x }));
            }
        }
        TcStatus::Ok
    })
}

/// Parses a complex in the `{"ring": "Z", "ranks": ..., "differentials": ...}`
/// format; ∂∘∂ = 0 is checked.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tc_complex_from_json(text: *const c_char, out: *mut *mut TcComplex) -> TcStatus {
    guard(|| {
        check_null!(out);
        let s = tri!(read_str(text));
        let j: ComplexJson<IntJson> = tri!(json::parse(s).map_err(from_core));
        let inner = tri!(json::complex_from_json::<BigInt>(&j).map_err(from_core));
        *out = Box::into_raw(Box::new(TcComplex { inner }));
        TcStatus::Ok
    })
}

/// # Safety
/// `c` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn tc_complex_free(c: *mut TcComplex) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// # Safety
/// `c` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tc_complex_homology(c: *const TcComplex, out: *mut *mut TcHomology) -> TcStatus {
    guard(|| {
        check_null!(c, out);
        let inner = tri!(homology(&(*c).inner).map_err(from_core));
        *out = Box::into_raw(Box::new(TcHomology { inner }));
        TcStatus::Ok
    })
}

/// # Safety
/// `h` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn tc_homology_free(h: *mut TcHomology) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

unsafe fn group_at(h: *const TcHomology, grade: i64) -> FgAbelianGroup {
    (*h).inner.group(grade)
}

/// Free rank of H_grade.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tc_homology_rank(h: *const TcHomology, grade: i64, out: *mut usize) -> TcStatus {
    guard(|| {
        check_null!(h, out);
        *out = group_at(h, grade).rank();
        TcStatus::Ok
    })
}

/// Number of invariant factors of the torsion of H_grade.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tc_homology_torsion_len(h: *const TcHomology, grade: i64, out: *mut usize) -> TcStatus {
    guard(|| {
        check_null!(h, out);
        *out = group_at(h, grade).torsion().len();
        TcStatus::Ok
    })
}

/// The `k`-th invariant factor d_k (d_1 | d_2 | ...) of the torsion of H_grade.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tc_homology_torsion(h: *const TcHomology, grade: i64, k: usize, out: *mut i64) -> TcStatus {
    guard(|| {
        check_null!(h, out);
        let g = group_at(h, grade);
        match g.torsion().get(k) {
            Some(d) => {
                *out = tri!(to_i64(d));
                TcStatus::Ok
            }
            None => fail(TcStatus::OutOfRange, format!("H_{grade} has {} torsion factors", g.torsion().len())),
        }
    })
}

/// Runs a command-line subcommand in process. `argv` holds `argc` arguments
/// after the program name (e.g. `{"snf", "-"}`); `input` is fed as standard
/// input and may be NULL. The exit code is written to `exit_code` and the
/// standard output to `out`. The call itself only fails on bad pointers.
///
/// # Safety
/// `argv` must hold `argc` NUL-terminated strings; `out` and `exit_code`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn tc_run(
    argv: *const *const c_char,
    argc: usize,
    input: *const c_char,
    out: *mut *mut c_char,
    exit_code: *mut i32,
) -> TcStatus {
    guard(|| {
        check_null!(out, exit_code);
        if argc > 0 {
            check_null!(argv);
        }
        let mut args = vec!["tricore".to_string()];
        for i in 0..argc {
            args.push(tri!(read_str(*argv.add(i))).to_string());
        }
        let stdin = if input.is_null() { "" } else { tri!(read_str(input)) };
        let o = tricore::cli::run(args, &mut stdin.as_bytes());
        *exit_code = o.code;
        if o.code != 0 {
            set_error(o.stderr.trim_end());
        }
        write_string(out, o.stdout)
    })
}
