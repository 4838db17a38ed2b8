//! C ABI over the alciota prover.
//!
//! Every object crosses the boundary as an opaque pointer that the caller
//! releases with the matching `*_free` function. Functions return an
//! [`AlciotaStatus`]; on failure, `alciota_last_error` describes the most
//! recent error on the calling thread. Strings returned by the library
//! are NUL-terminated and freed with `alciota_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::Duration;

use alciota::bisim::{max_bisim, BisimLogic};
use alciota::semantics::{parse_interpretation, print_interpretation, Interpretation};
use alciota::syntax::{parse_concept, parse_ontology, print_concept, Concept, Logic, Ontology};
use alciota::tableau::{prove, ProofResult, ProverConfig, ProverError, Verdict};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlciotaStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Unsupported = 4,
    Timeout = 5,
    CapExceeded = 6,
    NoModel = 7,
    InvalidArgument = 8,
    Internal = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlciotaLogic {
    Alcil = 0,
    Alcig = 1,
    Alci = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlciotaBisimLogic {
    Alc = 0,
    Alcil = 1,
    Alci = 2,
}

/// Values of `alciota_result_verdict`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlciotaVerdict {
    Unsat = 0,
    Sat = 1,
}

pub struct AlciotaConcept {
    inner: Concept,
}

pub struct AlciotaOntology {
    inner: Ontology,
}

pub struct AlciotaModel {
    inner: Interpretation,
}

pub struct AlciotaResult {
    inner: ProofResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

type FfiResult<T> = Result<T, AlciotaStatus>;

fn fail<T>(status: AlciotaStatus, msg: impl Into<String>) -> FfiResult<T> {
    set_error(msg);
    Err(status)
}

fn guard(f: impl FnOnce() -> FfiResult<()>) -> AlciotaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AlciotaStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("panic inside alciota");
            AlciotaStatus::Internal
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return fail(AlciotaStatus::NullArgument, format!("{what} is null"));
    }
    match CStr::from_ptr(p).to_str() {
        Ok(s) => Ok(s),
        Err(e) => fail(AlciotaStatus::InvalidUtf8, format!("{what}: {e}")),
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> FfiResult<&'a T> {
    match p.as_ref() {
        Some(r) => Ok(r),
        None => fail(AlciotaStatus::NullArgument, format!("{what} is null")),
    }
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) -> FfiResult<()> {
    if out.is_null() {
        return fail(AlciotaStatus::NullArgument, "output pointer is null");
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> FfiResult<()> {
    if out.is_null() {
        return fail(AlciotaStatus::NullArgument, "output pointer is null");
    }
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            Ok(())
        }
        Err(_) => fail(AlciotaStatus::Internal, "string contains NUL"),
    }
}

unsafe fn free_box<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Message for the most recent failure on this thread, or null. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn alciota_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn alciota_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn alciota_concept_parse(text: *const c_char, out: *mut *mut AlciotaConcept) -> AlciotaStatus {
    guard(|| {
        let text = read_str(text, "text")?;
        match parse_concept(text) {
            Ok(c) => write_out(out, AlciotaConcept { inner: c }),
            Err(e) => fail(AlciotaStatus::Parse, e.to_string()),
        }
    })
}

/// # Safety
/// `c` must be a live concept handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn alciota_concept_print(c: *const AlciotaConcept, out: *mut *mut c_char) -> AlciotaStatus {
    guard(|| write_string(out, print_concept(&deref(c, "concept")?.inner)))
}

/// # Safety
/// `c` must be null or a concept handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn alciota_concept_free(c: *mut AlciotaConcept) {
    free_box(c);
}

/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn alciota_ontology_parse(text: *const c_char, out: *mut *mut AlciotaOntology) -> AlciotaStatus {
    guard(|| {
        let text = read_str(text, "text")?;
        match parse_ontology(text) {
            Ok(o) => write_out(out, AlciotaOntology { inner: o }),
            Err(e) => fail(AlciotaStatus::Parse, e.to_string()),
        }
    })
}

/// # Safety
/// `o` must be null or an ontology handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn alciota_ontology_free(o: *mut AlciotaOntology) {
    free_box(o);
}

/// Decides satisfiability of `c` with respect to `o` (which may be null).
/// `logic` is an `AlciotaLogic` value.
/// `timeout_ms` of 0 means no timeout.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn alciota_prove(
    c: *const AlciotaConcept,
    o: *const AlciotaOntology,
    logic: u32,
    enable_cut: bool,
    timeout_ms: u64,
    out: *mut *mut AlciotaResult,
) -> AlciotaStatus {
    guard(|| {
        let c = &deref(c, "concept")?.inner;
        let o = o.as_ref().map(|o| &o.inner);
        let logic = match logic {
            x if x == AlciotaLogic::Alcil as u32 => Logic::Alcil,
            x if x == AlciotaLogic::Alcig as u32 => Logic::Alcig,
            x if x == AlciotaLogic::Alci as u32 => Logic::Alci,
            other => return fail(AlciotaStatus::InvalidArgument, format!("unknown logic {other}")),
        };
        let cfg = ProverConfig {
            logic,
            enable_cut,
            timeout: (timeout_ms > 0).then(|| Duration::from_millis(timeout_ms)),
            ..ProverConfig::default()
        };
        match prove(c, o, &cfg) {
            Ok(r) => write_out(out, AlciotaResult { inner: r }),
            Err(e) => {
                let status = match e {
                    ProverError::Timeout(_) => AlciotaStatus::Timeout,
                    ProverError::CapExceeded { .. } => AlciotaStatus::CapExceeded,
                    ProverError::Unsupported { .. } => AlciotaStatus::Unsupported,
                    ProverError::UnknownIndividual(_) => AlciotaStatus::InvalidArgument,
                    _ => AlciotaStatus::Internal,
                };
                fail(status, e.to_string())
            }
        }
    })
}

/// # Safety
/// `r` must be a live result handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn alciota_result_verdict(r: *const AlciotaResult, out: *mut AlciotaVerdict) -> AlciotaStatus {
    guard(|| {
        let r = deref(r, "result")?;
        if out.is_null() {
            return fail(AlciotaStatus::NullArgument, "output pointer is null");
        }
        *out = match r.inner.verdict {
            Verdict::Sat => AlciotaVerdict::Sat,
            Verdict::Unsat => AlciotaVerdict::Unsat,
        };
        Ok(())
    })
}

/// Copies the model of a satisfiable result.
///
/// # Safety
/// `r` must be a live result handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn alciota_result_model(r: *const AlciotaResult, out: *mut *mut AlciotaModel) -> AlciotaStatus {
    guard(|| match &deref(r, "result")?.inner.model {
        Some(m) => write_out(out, AlciotaModel { inner: m.clone() }),
        None => fail(AlciotaStatus::NoModel, "unsatisfiable results carry no model"),
    })
}

/// Name of the model element that satisfies the input concept.
///
/// # Safety
/// `r` must be a live result handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn alciota_result_root(r: *const AlciotaResult, out: *mut *mut c_char) -> AlciotaStatus {
    guard(|| {
        let r = &deref(r, "result")?.inner;
        match (&r.model, r.root_element) {
            (Some(m), Some(d)) => write_string(out, m.element_name(d).to_string()),
            _ => fail(AlciotaStatus::NoModel, "unsatisfiable results carry no model"),
        }
    })
}

/// # Safety
/// `r` must be null or a result handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn alciota_result_free(r: *mut AlciotaResult) {
    free_box(r);
}

/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn alciota_model_parse(text: *const c_char, out: *mut *mut AlciotaModel) -> AlciotaStatus {
    guard(|| {
        let text = read_str(text, "text")?;
        match parse_interpretation(text) {
            Ok(m) => write_out(out, AlciotaModel { inner: m }),
            Err(e) => fail(AlciotaStatus::Parse, e.to_string()),
        }
    })
}

/// # Safety
/// `m` must be a live model handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn alciota_model_print(m: *const AlciotaModel, out: *mut *mut c_char) -> AlciotaStatus {
    guard(|| write_string(out, print_interpretation(&deref(m, "model")?.inner)))
}

/// Space-separated names of the elements of `m` in the extension of `c`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn alciota_model_eval(
    m: *const AlciotaModel,
    c: *const AlciotaConcept,
    out: *mut *mut c_char,
) -> AlciotaStatus {
    guard(|| {
        let m = &deref(m, "model")?.inner;
        let c = &deref(c, "concept")?.inner;
        let names: Vec<&str> = m.eval(c).ones().map(|d| m.element_name(d)).collect();
        write_string(out, names.join(" "))
    })
}

/// Maximal bisimulation as lines "d e", or the empty string.
/// `logic` is an `AlciotaBisimLogic` value.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn alciota_bisim(
    left: *const AlciotaModel,
    right: *const AlciotaModel,
    logic: u32,
    out: *mut *mut c_char,
) -> AlciotaStatus {
    guard(|| {
        let i = &deref(left, "left model")?.inner;
        let j = &deref(right, "right model")?.inner;
        let logic = match logic {
            x if x == AlciotaBisimLogic::Alc as u32 => BisimLogic::Alc,
            x if x == AlciotaBisimLogic::Alcil as u32 => BisimLogic::Alcil,
            x if x == AlciotaBisimLogic::Alci as u32 => BisimLogic::Alci,
            other => return fail(AlciotaStatus::InvalidArgument, format!("unknown logic {other}")),
        };
        let z = max_bisim(logic, i, j);
        let text: String = z.named_pairs(i, j).into_iter().map(|(d, e)| format!("{d} {e}\n")).collect();
        write_string(out, text)
    })
}

/// # Safety
/// `m` must be null or a model handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn alciota_model_free(m: *mut AlciotaModel) {
    free_box(m);
}
