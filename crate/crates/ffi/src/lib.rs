//! C interface to `gk_core`.
//!
//! Objects cross the boundary as opaque handles that the caller frees with
//! the matching `*_free`. Every fallible call returns a [`GkStatus`]; on a
//! non-`GK_OK` status the message is available from
//! [`gk_last_error_message`] on the same thread. Strings returned through
//! out-parameters are owned by the caller and released with
//! [`gk_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use gk_core::claims::{self, Certificate, ClaimError};
use gk_core::exactalg::{matrix_digest, read_matrix, write_matrix, AnyMatrix, PrimeFieldMatrix};
use gk_core::factorize::{lempel_factorize, FactorizeError};
use gk_core::guard::ResourceGuard;
use gk_core::kneser::{GKGraph, GKParams, Graph};
use gk_core::polyrep::{representing_matrix_mod_p_only, PolyRepError};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GkStatus {
    GkOk = 0,
    GkNullPointer = 1,
    GkInvalidArgument = 2,
    GkResourceLimit = 3,
    GkParseError = 4,
    GkWrongField = 5,
    GkInternal = 6,
}

/// `K(d, s, m)`.
pub struct GkGraph {
    inner: GKGraph,
}

/// A matrix over GF(p), the integers or the rationals.
pub struct GkMatrix {
    inner: AnyMatrix,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("interior nul removed"));
}

struct Fail(GkStatus, String);

impl Fail {
    fn arg(msg: impl ToString) -> Self {
        Fail(GkStatus::GkInvalidArgument, msg.to_string())
    }
}

impl From<PolyRepError> for Fail {
    fn from(e: PolyRepError) -> Self {
        let status = match e {
            PolyRepError::Guard(_) => GkStatus::GkResourceLimit,
            _ => GkStatus::GkInvalidArgument,
        };
        Fail(status, e.to_string())
    }
}

impl From<ClaimError> for Fail {
    fn from(e: ClaimError) -> Self {
        let status = if e.is_resource() { GkStatus::GkResourceLimit } else { GkStatus::GkInvalidArgument };
        Fail(status, e.to_string())
    }
}

impl From<FactorizeError> for Fail {
    fn from(e: FactorizeError) -> Self {
        match e {
            FactorizeError::PolyRep(p) => p.into(),
            e => Fail::arg(e),
        }
    }
}

/// Runs `f`, turning errors and panics into a status plus thread-local message.
fn guarded(f: impl FnOnce() -> Result<(), Fail>) -> GkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            GkStatus::GkOk
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            GkStatus::GkInternal
        }
    }
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), Fail> {
    if p.is_null() {
        Err(Fail(GkStatus::GkNullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

unsafe fn graph_ref<'a>(g: *const GkGraph) -> Result<&'a GKGraph, Fail> {
    non_null(g, "graph")?;
    Ok(&(*g).inner)
}

unsafe fn matrix_ref<'a>(m: *const GkMatrix) -> Result<&'a AnyMatrix, Fail> {
    non_null(m, "matrix")?;
    Ok(&(*m).inner)
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Fail> {
    non_null(out, "output pointer")?;
    *out = value;
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    non_null(out, "output pointer")?;
    *out = CString::new(s).map_err(|_| Fail(GkStatus::GkInternal, "string contains nul".into()))?.into_raw();
    Ok(())
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn gk_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn gk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn gk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gk_graph_new(d: u32, s: u32, m: u32, out: *mut *mut GkGraph) -> GkStatus {
    guarded(|| {
        non_null(out, "output pointer")?;
        let params = GKParams::new(d, s, m).map_err(Fail::arg)?;
        ResourceGuard::default()
            .check("graph", params.vertex_count(), params.vertex_count() * 8)
            .map_err(|e| Fail(GkStatus::GkResourceLimit, e.to_string()))?;
        put(out, Box::into_raw(Box::new(GkGraph { inner: GKGraph::build(params) })))
    })
}

/// # Safety
/// `g` must come from [`gk_graph_new`] or be null.
#[no_mangle]
pub unsafe extern "C" fn gk_graph_free(g: *mut GkGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn gk_graph_order(g: *const GkGraph, out: *mut u64) -> GkStatus {
    guarded(|| put(out, graph_ref(g)?.order() as u64))
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn gk_graph_adjacent(g: *const GkGraph, u: u64, v: u64, out: *mut bool) -> GkStatus {
    guarded(|| {
        let g = graph_ref(g)?;
        let n = g.order() as u64;
        if u >= n || v >= n {
            return Err(Fail::arg(format!("vertex out of range for {n} vertices")));
        }
        put(out, g.adjacent(u as usize, v as usize))
    })
}

/// Subset of vertex `v` as a bit mask (bit `i` for element `i + 1`).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn gk_graph_vertex_mask(g: *const GkGraph, v: u64, out: *mut u64) -> GkStatus {
    guarded(|| {
        let g = graph_ref(g)?;
        if v >= g.order() as u64 {
            return Err(Fail::arg("vertex out of range"));
        }
        put(out, g.mask(v as usize))
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn gk_graph_to_json(g: *const GkGraph, with_edges: bool, out: *mut *mut c_char) -> GkStatus {
    guarded(|| put_string(out, graph_ref(g)?.export_json(with_edges).to_string()))
}

/// Representing matrix of the graph modulo the prime `p`, under the default
/// memory guard.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn gk_representing_matrix(g: *const GkGraph, p: u64, out: *mut *mut GkMatrix) -> GkStatus {
    guarded(|| {
        let g = graph_ref(g)?;
        non_null(out, "output pointer")?;
        let m = representing_matrix_mod_p_only(g.params(), p, &ResourceGuard::default())?;
        put(out, Box::into_raw(Box::new(GkMatrix { inner: AnyMatrix::Prime(m) })))
    })
}

/// Parses the plain-text matrix format.
///
/// # Safety
/// `text` must be a nul-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gk_matrix_from_text(text: *const c_char, out: *mut *mut GkMatrix) -> GkStatus {
    guarded(|| {
        non_null(text, "text")?;
        non_null(out, "output pointer")?;
        let text = CStr::from_ptr(text).to_str().map_err(|e| Fail(GkStatus::GkParseError, e.to_string()))?;
        let m = read_matrix(text).map_err(|e| Fail(GkStatus::GkParseError, e.to_string()))?;
        put(out, Box::into_raw(Box::new(GkMatrix { inner: m })))
    })
}

/// # Safety
/// `m` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn gk_matrix_free(m: *mut GkMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn gk_matrix_to_text(m: *const GkMatrix, out: *mut *mut c_char) -> GkStatus {
    guarded(|| put_string(out, write_matrix(matrix_ref(m)?)))
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn gk_matrix_shape(m: *const GkMatrix, rows: *mut u64, cols: *mut u64) -> GkStatus {
    guarded(|| {
        let m = matrix_ref(m)?;
        non_null(cols, "output pointer")?;
        put(rows, m.rows() as u64)?;
        put(cols, m.cols() as u64)
    })
}

/// Rank over the matrix's own field (over Q for integer matrices).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn gk_matrix_rank(m: *const GkMatrix, out: *mut u64) -> GkStatus {
    guarded(|| put(out, matrix_ref(m)?.rank() as u64))
}

/// Hex SHA-256 of the canonical text form.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn gk_matrix_digest(m: *const GkMatrix, out: *mut *mut c_char) -> GkStatus {
    guarded(|| put_string(out, matrix_digest(matrix_ref(m)?)))
}

/// `M = B·B^T` over GF(2) with `rank(M)` columns in `B`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn gk_lempel_factorize(m: *const GkMatrix, out_b: *mut *mut GkMatrix) -> GkStatus {
    guarded(|| {
        non_null(out_b, "output pointer")?;
        let m = match matrix_ref(m)? {
            AnyMatrix::Prime(p) => p.as_gf2().ok_or_else(|| Fail(GkStatus::GkWrongField, format!("GF({})", p.modulus())))?,
            _ => return Err(Fail(GkStatus::GkWrongField, "matrix is not over a prime field".into())),
        };
        let f = lempel_factorize(m)?;
        put(out_b, Box::into_raw(Box::new(GkMatrix { inner: AnyMatrix::Prime(PrimeFieldMatrix::from_gf2(f.b)) })))
    })
}

unsafe fn cert_out(out_json: *mut *mut c_char, make: impl FnOnce() -> Result<Certificate, ClaimError>) -> GkStatus {
    guarded(|| {
        non_null(out_json, "output pointer")?;
        let c = make()?;
        put_string(out_json, c.to_json_pretty())
    })
}

/// Odd-girth and rank certificate for `K(d, d/2, d/(2 ell))` as JSON.
/// The certificate's `verdict` field carries the outcome.
///
/// # Safety
/// `out_json` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gk_cert_cycles(ell: u32, d: u32, p: u64, out_json: *mut *mut c_char) -> GkStatus {
    cert_out(out_json, || claims::cycle_free_certificate(ell, d, p, None, &ResourceGuard::default(), None))
}

/// # Safety
/// `out_json` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gk_cert_triangle_free(d: u32, out_json: *mut *mut c_char) -> GkStatus {
    cert_out(out_json, || claims::triangle_free_od_certificate(d, &ResourceGuard::default(), None))
}

/// # Safety
/// `out_json` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gk_cert_vchrom(d: u32, p: u64, out_json: *mut *mut c_char) -> GkStatus {
    cert_out(out_json, || claims::vchrom3_certificate(d, p, &ResourceGuard::default(), None))
}

/// `⌈k/s⌉·(d−2s) + 2k` as a decimal string.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gk_stahl_rhs(k: u64, s: u64, d: u64, out: *mut *mut c_char) -> GkStatus {
    guarded(|| put_string(out, claims::stahl_rhs(k, s, d)?.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    fn last_error() -> String {
        unsafe { CStr::from_ptr(gk_last_error_message()) }.to_str().unwrap().to_owned()
    }

    #[test]
    fn petersen_round_trip() {
        unsafe {
            let mut g = ptr::null_mut();
            assert_eq!(gk_graph_new(5, 2, 1, &mut g), GkStatus::GkOk);
            let mut n = 0;
            assert_eq!(gk_graph_order(g, &mut n), GkStatus::GkOk);
            assert_eq!(n, 10);
            let mut adj = false;
            assert_eq!(gk_graph_adjacent(g, 0, 9, &mut adj), GkStatus::GkOk);
            let (mut a, mut b) = (0, 0);
            gk_graph_vertex_mask(g, 0, &mut a);
            gk_graph_vertex_mask(g, 9, &mut b);
            assert_eq!(adj, a & b == 0);
            assert_eq!(gk_graph_adjacent(g, 0, 10, &mut adj), GkStatus::GkInvalidArgument);
            assert!(last_error().contains("out of range"));
            gk_graph_free(g);
        }
    }

    #[test]
    fn bad_params_and_nulls() {
        unsafe {
            let mut g = ptr::null_mut();
            assert_eq!(gk_graph_new(3, 5, 1, &mut g), GkStatus::GkInvalidArgument);
            assert!(g.is_null());
            let mut n = 0;
            assert_eq!(gk_graph_order(ptr::null(), &mut n), GkStatus::GkNullPointer);
            assert_eq!(gk_graph_new(5, 2, 1, ptr::null_mut()), GkStatus::GkNullPointer);
            gk_graph_free(ptr::null_mut());
            gk_string_free(ptr::null_mut());
        }
    }
}
