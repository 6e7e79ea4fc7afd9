//! C interface to `baire-core`.
//!
//! Every function returns a [`BaireStatus`]. On failure the message is kept
//! per thread and read with [`baire_last_error`]. Strings handed out by the
//! library are NUL-terminated UTF-8 and must be released with
//! [`baire_string_free`]; handles are released with their own `_free`.
//! Naturals cross the boundary as decimal strings.

use baire_core::codes::{ChallengeCode, FunctionFamilyCode};
use baire_core::decode::{decode_from_domination, DecodeParams};
use baire_core::encode::{encode_f, ASet};
use baire_core::hechler::{check_certificate, fuse, FuseBounds, FusionCertificate, ToyModel};
use baire_core::seq::EventuallyPeriodicSeq;
use baire_core::{json, Error, Nat};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Outcome of a call. The domain values mirror the error kinds of the CLI.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaireStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    NoCover = 4,
    NotInA = 5,
    ClassCaptured = 6,
    BoundExceeded = 7,
    CandidateOverflow = 8,
    IncomparableSideConditions = 9,
    DeterminationFailed = 10,
    EnsureFailed = 11,
    TooLarge = 12,
    NotReachable = 13,
    Panic = 14,
}

impl From<&Error> for BaireStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidInput(_) => BaireStatus::InvalidInput,
            Error::NoCover => BaireStatus::NoCover,
            Error::NotInA(_) => BaireStatus::NotInA,
            Error::ClassCaptured { .. } => BaireStatus::ClassCaptured,
            Error::BoundExceeded(_) => BaireStatus::BoundExceeded,
            Error::CandidateOverflow { .. } => BaireStatus::CandidateOverflow,
            Error::IncomparableSideConditions => BaireStatus::IncomparableSideConditions,
            Error::DeterminationFailed(_) => BaireStatus::DeterminationFailed,
            Error::EnsureFailed(_) => BaireStatus::EnsureFailed,
            Error::TooLarge { .. } => BaireStatus::TooLarge,
            Error::NotReachable => BaireStatus::NotReachable,
        }
    }
}

/// An eventually periodic sequence of naturals.
pub struct BaireSeq(EventuallyPeriodicSeq);

/// A challenge code.
pub struct BaireCode(ChallengeCode);

/// The chain set of a sequence.
pub struct BaireASet(ASet);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(BaireStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(BaireStatus::from(&e), e.to_string())
    }
}

type Outcome<T> = Result<T, Failure>;

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

/// Runs `f`, recording its failure or panic for `baire_last_error`.
fn guard(f: impl FnOnce() -> Outcome<()>) -> BaireStatus {
    let status = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BaireStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            BaireStatus::Panic
        }
    };
    if status == BaireStatus::Ok {
        set_error("");
    }
    status
}

unsafe fn text<'a>(p: *const c_char) -> Outcome<&'a str> {
    if p.is_null() {
        return Err(Failure(BaireStatus::NullArgument, "null string argument".into()));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(BaireStatus::InvalidUtf8, "argument is not UTF-8".into()))
}

unsafe fn handle<'a, T>(p: *const T) -> Outcome<&'a T> {
    p.as_ref().ok_or_else(|| Failure(BaireStatus::NullArgument, "null handle".into()))
}

unsafe fn put<T>(out: *mut T, v: T) -> Outcome<()> {
    if out.is_null() {
        return Err(Failure(BaireStatus::NullArgument, "null output pointer".into()));
    }
    out.write(v);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Outcome<()> {
    let c = CString::new(s).map_err(|_| Failure(BaireStatus::InvalidInput, "output contains NUL".into()))?;
    put(out, c.into_raw())
}

unsafe fn put_box<T>(out: *mut *mut T, v: T) -> Outcome<()> {
    if out.is_null() {
        return Err(Failure(BaireStatus::NullArgument, "null output pointer".into()));
    }
    out.write(Box::into_raw(Box::new(v)));
    Ok(())
}

fn parse<T: serde::de::DeserializeOwned>(s: &str) -> Outcome<T> {
    Ok(json::from_str(s)?)
}

fn parse_nat(s: &str) -> Outcome<Nat> {
    s.trim().parse().map_err(|_| Failure(BaireStatus::InvalidInput, format!("not a natural: {s:?}")))
}

/// Message of the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn baire_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn baire_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Version of the JSON documents this library reads and writes.
#[no_mangle]
pub extern "C" fn baire_json_version() -> u32 {
    json::VERSION as u32
}

/// Parses `{"prefix": [...], "period": [...]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn baire_seq_from_json(json: *const c_char, out: *mut *mut BaireSeq) -> BaireStatus {
    guard(|| put_box(out, BaireSeq(parse(text(json)?)?)))
}

/// Writes entry `i` as a decimal string.
///
/// # Safety
/// `seq` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn baire_seq_at(seq: *const BaireSeq, i: u64, out: *mut *mut c_char) -> BaireStatus {
    guard(|| {
        let s = handle(seq)?;
        let i = usize::try_from(i).map_err(|_| Failure(BaireStatus::InvalidInput, "index too large".into()))?;
        put_string(out, s.0.at(i).to_string())
    })
}

/// # Safety
/// `seq` must come from `baire_seq_from_json` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn baire_seq_free(seq: *mut BaireSeq) {
    if !seq.is_null() {
        drop(Box::from_raw(seq));
    }
}

/// Parses a challenge code document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn baire_code_from_json(json: *const c_char, out: *mut *mut BaireCode) -> BaireStatus {
    guard(|| put_box(out, BaireCode(parse(text(json)?)?)))
}

/// Evaluates `code` at `x`, writing the value as a decimal string.
///
/// # Safety
/// Both handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn baire_code_eval(code: *const BaireCode, x: *const BaireSeq, out: *mut *mut c_char) -> BaireStatus {
    guard(|| {
        let v = handle(code)?.0.eval(&handle(x)?.0);
        put_string(out, v.to_string())
    })
}

/// # Safety
/// `code` must come from `baire_code_from_json` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn baire_code_free(code: *mut BaireCode) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

/// The chain set of `a`. The sequence is copied; `a` stays owned by the caller.
///
/// # Safety
/// `a` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn baire_aset_new(a: *const BaireSeq, out: *mut *mut BaireASet) -> BaireStatus {
    guard(|| put_box(out, BaireASet(ASet::new(handle(a)?.0.clone()))))
}

/// Chain element at `level` (level 0 is the root code 2).
///
/// # Safety
/// `set` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn baire_aset_element(set: *const BaireASet, level: u32, out: *mut *mut c_char) -> BaireStatus {
    guard(|| {
        let v = handle(set)?.0.element(level as usize)?;
        put_string(out, v.to_string())
    })
}

/// Whether the decimal natural `value` is in the set.
///
/// # Safety
/// `set` must be a live handle, `value` a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn baire_aset_contains(set: *const BaireASet, value: *const c_char, out: *mut bool) -> BaireStatus {
    guard(|| {
        let v = parse_nat(text(value)?)?;
        put(out, handle(set)?.0.contains(&v))
    })
}

/// `f_a(x)(n)` for the set's sequence `a`, as a decimal string.
///
/// # Safety
/// Both handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn baire_encode_f(set: *const BaireASet, x: *const BaireSeq, n: u64, out: *mut *mut c_char) -> BaireStatus {
    guard(|| {
        let v = encode_f(&handle(set)?.0, &handle(x)?.0, &Nat::from(n));
        put_string(out, v.to_string())
    })
}

/// # Safety
/// `set` must come from `baire_aset_new` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn baire_aset_free(set: *mut BaireASet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Recovers nodes of length `target_length` from a code dominating an exit
/// code, with the default search bounds. Writes
/// `{"candidates": [...], "thresholds": [...]}`.
///
/// # Safety
/// `code_json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn baire_decode_json(code_json: *const c_char, target_length: u32, out: *mut *mut c_char) -> BaireStatus {
    guard(|| {
        let g: ChallengeCode = parse(text(code_json)?)?;
        let p = DecodeParams { target_length: target_length as usize, ..Default::default() };
        let found = decode_from_domination(&g, &p)?;
        let doc = serde_json::json!({
            "candidates": found.iter().map(|c| c.node.to_string()).collect::<Vec<_>>(),
            "thresholds": found.iter().map(|c| c.threshold).collect::<Vec<_>>(),
        });
        put_string(out, json::to_string(&doc)?)
    })
}

/// Runs the fusion for `n` coordinates with default bounds and writes the
/// certificate document.
///
/// # Safety
/// Both strings must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn baire_fuse_json(a_json: *const c_char, model_json: *const c_char, n: u32, out: *mut *mut c_char) -> BaireStatus {
    guard(|| {
        let a: EventuallyPeriodicSeq = parse(text(a_json)?)?;
        let model: ToyModel = parse(text(model_json)?)?;
        let cert = fuse(&a, &model, n as usize, &FuseBounds::default())?;
        put_string(out, json::to_string(&cert)?)
    })
}

/// Checks a certificate. `valid` receives the verdict and `report`, when not
/// null, the full report document.
///
/// # Safety
/// `cert_json` must be NUL-terminated; `valid` must be writable; `report`
/// may be null.
#[no_mangle]
pub unsafe extern "C" fn baire_check_cert_json(cert_json: *const c_char, valid: *mut bool, report: *mut *mut c_char) -> BaireStatus {
    guard(|| {
        let cert: FusionCertificate = parse(text(cert_json)?)?;
        let check = check_certificate(&cert);
        put(valid, check.valid)?;
        if !report.is_null() {
            put_string(report, json::to_string(&check)?)?;
        }
        Ok(())
    })
}

/// Evaluates coordinate `n` of a function family at `x`.
///
/// # Safety
/// `family_json` must be NUL-terminated, `x` a live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn baire_family_eval(family_json: *const c_char, x: *const BaireSeq, n: u64, out: *mut *mut c_char) -> BaireStatus {
    guard(|| {
        let g: FunctionFamilyCode = parse(text(family_json)?)?;
        put_string(out, g.eval(&handle(x)?.0, &Nat::from(n)).to_string())
    })
}
