//! C bindings for the `odta` crate.
//!
//! Every fallible function returns a status: `ODTA_OK`, one of the
//! `ODTA_ERR_*` codes below, or the library error code (10 to 19) of the
//! failure. The message of the last failure on the calling thread is
//! available from [`odta_last_error`]. Strings returned through out
//! parameters are owned by the caller and freed with [`odta_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use odta::data::{string_representation, write_tree, OrderedDataTree};
use odta::odta::{empty_odta, empty_weak, empty_weak_ext, member_odta, member_weak, member_weak_ext, Bundle, EmptinessCaps, EmptinessVerdict, Membership};
use odta::presburger::Budget;

pub const ODTA_OK: i32 = 0;
/// A required pointer argument was NULL.
pub const ODTA_ERR_NULL: i32 = 1;
/// A string argument was not UTF-8, or a result contained a NUL byte.
pub const ODTA_ERR_ENCODING: i32 = 2;
/// The library panicked; the handle arguments should be discarded.
pub const ODTA_ERR_PANIC: i32 = 3;

/// Verdicts, numbered like the command-line exit codes.
pub const ODTA_VERDICT_POSITIVE: i32 = 0;
pub const ODTA_VERDICT_NEGATIVE: i32 = 1;
pub const ODTA_VERDICT_UNKNOWN: i32 = 2;

pub const ODTA_KIND_WEAK: i32 = 0;
pub const ODTA_KIND_EXTENDED: i32 = 1;
pub const ODTA_KIND_ODTA: i32 = 2;

/// A parsed ODTA bundle (weak, extended weak or full).
pub struct OdtaBundle(Bundle);

/// A parsed ordered-data tree with natural-number values.
pub struct OdtaTree(OrderedDataTree);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("NUL bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum Fail {
    Null,
    Encoding,
    Lib(odta::Error),
}

impl From<odta::Error> for Fail {
    fn from(e: odta::Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ODTA_OK,
        Ok(Err(Fail::Null)) => {
            set_error("null pointer argument".into());
            ODTA_ERR_NULL
        }
        Ok(Err(Fail::Encoding)) => {
            set_error("string is not valid UTF-8 or contains NUL".into());
            ODTA_ERR_ENCODING
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            e.code()
        }
        Err(_) => {
            set_error("internal panic".into());
            ODTA_ERR_PANIC
        }
    }
}

/// # Safety
/// `s` is NULL or a valid NUL-terminated string.
unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(Fail::Null);
    }
    CStr::from_ptr(s).to_str().map_err(|_| Fail::Encoding)
}

/// # Safety
/// `out` is NULL or valid for writes.
unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null);
    }
    *out = CString::new(s).map_err(|_| Fail::Encoding)?.into_raw();
    Ok(())
}

/// # Safety
/// `out` is NULL or valid for writes.
unsafe fn put<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null);
    }
    *out = v;
    Ok(())
}

/// # Safety
/// `p` is NULL or a live handle.
unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null)
}

/// Message of the last failure on this thread, or NULL if there was none.
/// The caller frees the result with [`odta_string_free`].
#[no_mangle]
pub extern "C" fn odta_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |c| c.clone().into_raw()))
}

/// # Safety
/// `s` is NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn odta_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a bundle file into `*out`.
///
/// # Safety
/// `src` is a NUL-terminated string; `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn odta_bundle_parse(src: *const c_char, out: *mut *mut OdtaBundle) -> i32 {
    guard(|| {
        let b = odta::odta::parse_bundle(text(src)?)?;
        put(out, Box::into_raw(Box::new(OdtaBundle(b))))
    })
}

/// # Safety
/// `b` is NULL or a handle from [`odta_bundle_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn odta_bundle_free(b: *mut OdtaBundle) {
    if !b.is_null() {
        drop(Box::from_raw(b));
    }
}

/// One of the `ODTA_KIND_*` constants, or -1 for a NULL handle.
///
/// # Safety
/// `b` is NULL or a live bundle handle.
#[no_mangle]
pub unsafe extern "C" fn odta_bundle_kind(b: *const OdtaBundle) -> i32 {
    match b.as_ref() {
        None => -1,
        Some(OdtaBundle(Bundle::Weak(_))) => ODTA_KIND_WEAK,
        Some(OdtaBundle(Bundle::Extended(_))) => ODTA_KIND_EXTENDED,
        Some(OdtaBundle(Bundle::Odta(_))) => ODTA_KIND_ODTA,
    }
}

/// Canonical text of the bundle.
///
/// # Safety
/// `b` is a live bundle handle; `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn odta_bundle_write(b: *const OdtaBundle, out: *mut *mut c_char) -> i32 {
    guard(|| {
        let s = odta::odta::write_bundle(&handle(b)?.0)?;
        put_string(out, s)
    })
}

/// Parses a tree such as `(a@2 (b@1))`; the alphabet is taken in order of
/// first appearance.
///
/// # Safety
/// `src` is a NUL-terminated string; `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn odta_tree_parse(src: *const c_char, out: *mut *mut OdtaTree) -> i32 {
    guard(|| {
        let t = odta::data::parse_tree(text(src)?, None)?;
        put(out, Box::into_raw(Box::new(OdtaTree(t))))
    })
}

/// # Safety
/// `t` is NULL or a handle from [`odta_tree_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn odta_tree_free(t: *mut OdtaTree) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Number of nodes, or 0 for a NULL handle.
///
/// # Safety
/// `t` is NULL or a live tree handle.
#[no_mangle]
pub unsafe extern "C" fn odta_tree_len(t: *const OdtaTree) -> usize {
    t.as_ref().map_or(0, |t| t.0.len())
}

/// # Safety
/// `t` is a live tree handle; `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn odta_tree_write(t: *const OdtaTree, out: *mut *mut c_char) -> i32 {
    guard(|| put_string(out, write_tree(&handle(t)?.0)))
}

/// String representation of the tree, e.g. `{b,c} {a,b,c} {a,b}`.
///
/// # Safety
/// `t` is a live tree handle; `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn odta_tree_string_representation(t: *const OdtaTree, out: *mut *mut c_char) -> i32 {
    guard(|| put_string(out, string_representation(&handle(t)?.0).render()))
}

/// Membership of `t` in `b`. The tree's labels are matched to the bundle's
/// input alphabet by name. `budget` bounds the node assignments tried, and
/// `solver_budget` the LP relaxations of extended bundles; 0 selects the
/// defaults.
///
/// # Safety
/// `b` and `t` are live handles; `verdict` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn odta_member(b: *const OdtaBundle, t: *const OdtaTree, budget: u64, solver_budget: u64, verdict: *mut i32) -> i32 {
    guard(|| {
        let b = &handle(b)?.0;
        let sigma = match b {
            Bundle::Weak(w) => w.input(),
            Bundle::Extended(e) => e.base.input(),
            Bundle::Odta(o) => o.sigma(),
        };
        let t = odta::data::parse_tree(&write_tree(&handle(t)?.0), Some(sigma))?;
        let budget = if budget == 0 { odta::odta::DEFAULT_MEMBER_BUDGET } else { budget };
        let solver = if solver_budget == 0 { Budget::default() } else { Budget::new(solver_budget) };
        let m = match b {
            Bundle::Weak(w) => member_weak(w, &t, budget)?,
            Bundle::Extended(e) => member_weak_ext(e, &t, budget, solver)?,
            Bundle::Odta(o) => member_odta(o, &t, budget)?,
        };
        put(
            verdict,
            match m {
                Membership::Member(_) => ODTA_VERDICT_POSITIVE,
                Membership::NonMember => ODTA_VERDICT_NEGATIVE,
                Membership::Unknown => ODTA_VERDICT_UNKNOWN,
            },
        )
    })
}

/// Emptiness of `b` under default caps, with the solver budget overridden
/// when `solver_budget` is nonzero. On a positive verdict `*witness`
/// receives the witness tree; otherwise it is set to NULL. `witness` may
/// itself be NULL.
///
/// # Safety
/// `b` is a live handle; `verdict` is valid for writes; `witness` is NULL
/// or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn odta_empty(b: *const OdtaBundle, solver_budget: u64, verdict: *mut i32, witness: *mut *mut c_char) -> i32 {
    guard(|| {
        let b = &handle(b)?.0;
        if verdict.is_null() {
            return Err(Fail::Null);
        }
        let mut caps = EmptinessCaps::default();
        if solver_budget != 0 {
            caps.solver = Budget::new(solver_budget);
        }
        let r = match b {
            Bundle::Weak(w) => empty_weak(w, &caps)?,
            Bundle::Extended(e) => empty_weak_ext(e, &caps)?,
            Bundle::Odta(o) => empty_odta(o, &caps)?,
        };
        if !witness.is_null() {
            *witness = ptr::null_mut();
        }
        *verdict = match &r.verdict {
            EmptinessVerdict::Nonempty { witness: w, .. } => {
                if !witness.is_null() {
                    put_string(witness, write_tree(w))?;
                }
                ODTA_VERDICT_POSITIVE
            }
            EmptinessVerdict::Empty => ODTA_VERDICT_NEGATIVE,
            EmptinessVerdict::EmptyWithinCaps => ODTA_VERDICT_UNKNOWN,
        };
        Ok(())
    })
}

/// Satisfiability of a DTD under a constraints file, both given as text.
/// `*witness` is set as in [`odta_empty`].
///
/// # Safety
/// `dtd` and `constraints` are NUL-terminated strings; `verdict` is valid
/// for writes; `witness` is NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn odta_dtd_sat(dtd: *const c_char, constraints: *const c_char, verdict: *mut i32, witness: *mut *mut c_char) -> i32 {
    use odta::frontends::{dtd_sat, parse_constraints, parse_dtd, SatVerdict};
    guard(|| {
        let d = parse_dtd(text(dtd)?)?;
        let cs = parse_constraints(text(constraints)?, d.alphabet())?;
        if verdict.is_null() {
            return Err(Fail::Null);
        }
        let r = dtd_sat(&d, &cs, &EmptinessCaps::default(), odta::frontends::dtd::DEFAULT_MAX_CHAINS)?;
        if !witness.is_null() {
            *witness = ptr::null_mut();
        }
        *verdict = match &r.verdict {
            SatVerdict::Sat { witness: w, .. } => {
                if !witness.is_null() {
                    put_string(witness, write_tree(w))?;
                }
                ODTA_VERDICT_POSITIVE
            }
            SatVerdict::Unsat => ODTA_VERDICT_NEGATIVE,
            SatVerdict::Unknown => ODTA_VERDICT_UNKNOWN,
        };
        Ok(())
    })
}
