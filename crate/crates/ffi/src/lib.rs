//! C ABI over `configcalc`.
//!
//! Objects cross the boundary as opaque handles created from JSON documents
//! and released with the matching `*_free` function. Every fallible call
//! returns a [`CcStatus`]; on failure [`cc_last_error`] describes the
//! problem for the calling thread. Strings returned by the library must be
//! released with [`cc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use configcalc::config::{build_from_filtration, build_from_subobjects, kappa, validate_config, Configuration};
use configcalc::doc::{self, DocError, Document};
use configcalc::improve::{self, ImproveError};
use configcalc::poset::FinitePoset;

/// Result codes of every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed JSON or a document of the wrong shape.
    ParseError = 3,
    /// Well-formed input that violates a mathematical requirement.
    InvariantError = 4,
    /// The requested improvement does not exist.
    NotSplit = 5,
    /// An index or buffer argument is out of range.
    OutOfRange = 6,
    /// Any other library error.
    Failed = 7,
    Panic = 8,
}

/// Opaque finite poset.
pub struct CcPoset(FinitePoset);

/// Opaque configuration.
pub struct CcConfig(Configuration);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(CcStatus, String);

impl From<DocError> for Failure {
    fn from(e: DocError) -> Self {
        let status = match e {
            DocError::Invariant(_) => CcStatus::InvariantError,
            _ => CcStatus::ParseError,
        };
        Failure(status, e.to_string())
    }
}

impl From<ImproveError> for Failure {
    fn from(e: ImproveError) -> Self {
        let status = match e {
            ImproveError::NotSplit(..) => CcStatus::NotSplit,
            ImproveError::BadParameterLength { .. } => CcStatus::OutOfRange,
            _ => CcStatus::Failed,
        };
        Failure(status, e.to_string())
    }
}

fn fail<T>(status: CcStatus, msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure(status, msg.into()))
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            CcStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            CcStatus::Panic
        }
    }
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, Failure> {
    if s.is_null() {
        return fail(CcStatus::NullPointer, "null string");
    }
    CStr::from_ptr(s)
        .to_str()
        .or_else(|_| fail(CcStatus::InvalidUtf8, "string is not UTF-8"))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().map_or_else(|| fail(CcStatus::NullPointer, "null handle"), Ok)
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), Failure> {
    if out.is_null() {
        return fail(CcStatus::NullPointer, "null output pointer");
    }
    out.write(v);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).or_else(|_| fail(CcStatus::Failed, "output contains NUL"))?;
    write(out, c.into_raw())
}

fn element(p: &FinitePoset, label: &str) -> Result<usize, Failure> {
    p.index_of(label)
        .map_or_else(|| fail(CcStatus::OutOfRange, format!("no element {label}")), Ok)
}

fn boxed_config(c: Configuration) -> *mut CcConfig {
    Box::into_raw(Box::new(CcConfig(c)))
}

/// Message for the last failed call on this thread, or null. The pointer
/// is valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn cc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn cc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse a poset document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cc_poset_from_json(json: *const c_char, out: *mut *mut CcPoset) -> CcStatus {
    guard(|| {
        let v = doc::parse_json(text(json)?)?;
        let p = doc::parse_poset(&v)?;
        write(out, Box::into_raw(Box::new(CcPoset(p))))
    })
}

/// # Safety
/// `p` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cc_poset_free(p: *mut CcPoset) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `p` must be a live poset handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cc_poset_len(p: *const CcPoset, out: *mut usize) -> CcStatus {
    guard(|| write(out, handle(p)?.0.len()))
}

/// Whether `a <= b`, by label.
///
/// # Safety
/// `p` must be a live poset handle, `a` and `b` NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn cc_poset_leq(p: *const CcPoset, a: *const c_char, b: *const c_char, out: *mut bool) -> CcStatus {
    guard(|| {
        let p = &handle(p)?.0;
        let (i, j) = (element(p, text(a)?)?, element(p, text(b)?)?);
        write(out, p.leq(i, j))
    })
}

/// Number of f-sets, including the empty set.
///
/// # Safety
/// `p` must be a live poset handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cc_poset_fset_count(p: *const CcPoset, out: *mut usize) -> CcStatus {
    guard(|| write(out, handle(p)?.0.fsets().len()))
}

/// # Safety
/// `p` must be a live poset handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cc_poset_count_linear_extensions(p: *const CcPoset, out: *mut u64) -> CcStatus {
    guard(|| {
        let n = handle(p)?.0.count_linear_extensions().or_else(|e| fail(CcStatus::Failed, e.to_string()))?;
        write(out, n)
    })
}

/// Parse a configuration document, or build one from a subobject family
/// or filtration document. `default_field` is used when the document
/// names no field; pass 0 for none.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cc_config_from_json(json: *const c_char, default_field: u64, out: *mut *mut CcConfig) -> CcStatus {
    guard(|| {
        let field = match default_field {
            0 => None,
            p => Some(configcalc::exactla::FieldSpec::new(p).or_else(|e| fail(CcStatus::InvariantError, e.to_string()))?),
        };
        let c = match doc::parse_document(text(json)?, field)? {
            Document::Configuration(c) => c,
            Document::Family(f) => build_from_subobjects(&f).or_else(|e| fail(CcStatus::InvariantError, e.to_string()))?,
            Document::Filtration(x, chain) => {
                build_from_filtration(&x, &chain).or_else(|e| fail(CcStatus::InvariantError, e.to_string()))?
            }
            d => return fail(CcStatus::ParseError, format!("expected a configuration, got {}", d.kind())),
        };
        write(out, boxed_config(c))
    })
}

/// # Safety
/// `c` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cc_config_free(c: *mut CcConfig) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Serialise a configuration as a JSON document.
///
/// # Safety
/// `c` must be a live configuration handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cc_config_to_json(c: *const CcConfig, out: *mut *mut c_char) -> CcStatus {
    guard(|| write_string(out, doc::to_text(&doc::config_value(&handle(c)?.0))))
}

/// Poset of a configuration, as a new handle.
///
/// # Safety
/// `c` must be a live configuration handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cc_config_poset(c: *const CcConfig, out: *mut *mut CcPoset) -> CcStatus {
    guard(|| write(out, Box::into_raw(Box::new(CcPoset(handle(c)?.0.poset().clone())))))
}

/// Number of failed axiom instances; zero means valid.
///
/// # Safety
/// `c` must be a live configuration handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cc_config_validate(c: *const CcConfig, out: *mut usize) -> CcStatus {
    guard(|| write(out, validate_config(&handle(c)?.0).len()))
}

/// Dimension vector of the simple summand at `element`. Writes the number
/// of quiver vertices to `len` and, if `capacity` allows, the entries to
/// `dims`.
///
/// # Safety
/// `c` and `element` must be valid, `dims` must have room for `capacity`
/// entries and `len` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cc_config_kappa(
    c: *const CcConfig,
    element: *const c_char,
    dims: *mut usize,
    capacity: usize,
    len: *mut usize,
) -> CcStatus {
    guard(|| {
        let c = &handle(c)?.0;
        let i = self::element(c.poset(), text(element)?)?;
        let k = kappa(c).or_else(|e| fail(CcStatus::Failed, e.to_string()))?;
        write(len, k[i].len())?;
        if k[i].len() > capacity {
            return fail(CcStatus::OutOfRange, format!("need room for {} entries", k[i].len()));
        }
        if dims.is_null() && !k[i].is_empty() {
            return fail(CcStatus::NullPointer, "null output buffer");
        }
        for (n, &d) in k[i].iter().enumerate() {
            dims.add(n).write(d);
        }
        Ok(())
    })
}

/// Whether the short exact sequence at the covering pair `(i, j)` splits.
///
/// # Safety
/// `c` must be a live configuration handle, `i` and `j` NUL-terminated
/// labels and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cc_config_split(c: *const CcConfig, i: *const c_char, j: *const c_char, out: *mut bool) -> CcStatus {
    guard(|| {
        let c = &handle(c)?.0;
        let (i, j) = (element(c.poset(), text(i)?)?, element(c.poset(), text(j)?)?);
        write(out, improve::split_pair_test(c, i, j)?.split)
    })
}

/// # Safety
/// `c` must be a live configuration handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cc_config_is_best(c: *const CcConfig, out: *mut bool) -> CcStatus {
    guard(|| write(out, improve::is_best(&handle(c)?.0)?))
}

/// Dimension of the parameter space of improvements at `(i, j)`.
///
/// # Safety
/// As for [`cc_config_split`].
#[no_mangle]
pub unsafe extern "C" fn cc_config_parameter_dim(
    c: *const CcConfig,
    i: *const c_char,
    j: *const c_char,
    out: *mut usize,
) -> CcStatus {
    guard(|| {
        let c = &handle(c)?.0;
        let (i, j) = (element(c.poset(), text(i)?)?, element(c.poset(), text(j)?)?);
        write(out, improve::parameter_basis(c, i, j)?.len())
    })
}

/// The improvement at `(i, j)` with the given parameter coordinates.
///
/// # Safety
/// As for [`cc_config_split`]; `param` must point to `param_len` values
/// (it may be null when `param_len` is 0).
#[no_mangle]
pub unsafe extern "C" fn cc_config_improve(
    c: *const CcConfig,
    i: *const c_char,
    j: *const c_char,
    param: *const u32,
    param_len: usize,
    out: *mut *mut CcConfig,
) -> CcStatus {
    guard(|| {
        let c = &handle(c)?.0;
        let (i, j) = (element(c.poset(), text(i)?)?, element(c.poset(), text(j)?)?);
        let param: &[u32] = match (param.is_null(), param_len) {
            (_, 0) => &[],
            (true, _) => return fail(CcStatus::NullPointer, "null parameter"),
            (false, n) => std::slice::from_raw_parts(param, n),
        };
        let step = improve::one_step_improve(c, i, j, param)?;
        write(out, boxed_config(step.result))
    })
}

/// Improve greedily until no covering pair splits. `steps` receives the
/// number of improvements made.
///
/// # Safety
/// `c` must be a live configuration handle; `out` and `steps` valid
/// pointers.
#[no_mangle]
pub unsafe extern "C" fn cc_config_best_search(c: *const CcConfig, out: *mut *mut CcConfig, steps: *mut usize) -> CcStatus {
    guard(|| {
        let found = improve::best_search(&handle(c)?.0)?;
        write(steps, found.trail.len())?;
        write(out, boxed_config(found.best))
    })
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn cc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
