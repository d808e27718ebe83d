//! C interface to `mms-core`.
//!
//! Schemes cross the boundary as opaque `MmsScheme` handles. Every fallible
//! function returns an `MmsStatus`; on failure the message is available from
//! `mms_last_error_message` on the same thread. Strings returned through
//! `char **` out-parameters are owned by the caller and released with
//! `mms_string_free`; handles are released with `mms_scheme_free`.
//!
//! Pointer arguments must be null or valid for their documented use. Null is
//! reported as `MMS_STATUS_NULL_POINTER` where an argument is required.

// The exports check for null themselves; the remaining contract is the C
// caller's, as stated above.
#![allow(clippy::not_unsafe_ptr_arg_deref)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mms_core::{canon, Error, Limits, Scheme, SymmetryElement};

/// Opaque scheme handle.
pub struct MmsScheme {
    inner: Scheme,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MmsStatus {
    Ok = 0,
    NullPointer = 1,
    Utf8 = 2,
    Parse = 3,
    Shape = 4,
    Cap = 5,
    InvalidArgument = 6,
    Panic = 7,
}

/// Enumeration caps for the canonicalization routines. A zero field keeps the
/// library default.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MmsLimits {
    pub max_stabilizer: u64,
    pub max_nullspace: u64,
}

impl MmsLimits {
    fn resolve(limits: *const MmsLimits) -> Limits {
        let mut out = Limits::default();
        // SAFETY: the caller passes either null or a valid MmsLimits.
        if let Some(l) = unsafe { limits.as_ref() } {
            if l.max_stabilizer != 0 {
                out.max_stabilizer = l.max_stabilizer;
            }
            if l.max_nullspace != 0 {
                out.max_nullspace = l.max_nullspace;
            }
        }
        out
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(MmsStatus, String);

impl Failure {
    fn null(what: &str) -> Self {
        Failure(MmsStatus::NullPointer, format!("{what} is null"))
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            e if e.is_cap() => MmsStatus::Cap,
            Error::Parse { .. } => MmsStatus::Parse,
            Error::ShapeMismatch(_) => MmsStatus::Shape,
            _ => MmsStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MmsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MmsStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("internal panic".to_string());
            MmsStatus::Panic
        }
    }
}

fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::null(what));
    }
    // SAFETY: non-null and, per the contract, NUL-terminated.
    unsafe { CStr::from_ptr(p) }.to_str().map_err(|e| Failure(MmsStatus::Utf8, format!("{what}: {e}")))
}

fn scheme_ref<'a>(p: *const MmsScheme, what: &str) -> Result<&'a Scheme, Failure> {
    // SAFETY: the caller passes null or a live handle from this library.
    unsafe { p.as_ref() }.map(|h| &h.inner).ok_or_else(|| Failure::null(what))
}

fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    // SAFETY: the caller passes null or a writable location.
    unsafe { p.as_mut() }.ok_or_else(|| Failure::null(what))
}

fn into_handle(s: Scheme) -> *mut MmsScheme {
    Box::into_raw(Box::new(MmsScheme { inner: s }))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).expect("library strings contain no NUL").into_raw()
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mms_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub extern "C" fn mms_limits_default() -> MmsLimits {
    let d = Limits::default();
    MmsLimits { max_stabilizer: d.max_stabilizer, max_nullspace: d.max_nullspace }
}

/// Parses text holding exactly one scheme.
#[no_mangle]
pub extern "C" fn mms_scheme_parse(text: *const c_char, out: *mut *mut MmsScheme) -> MmsStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let mut all = mms_core::parse(read_str(text, "text")?)?;
        if all.len() != 1 {
            return Err(Failure(MmsStatus::Parse, format!("expected one scheme, found {}", all.len())));
        }
        *out = into_handle(all.remove(0));
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn mms_scheme_from_json(text: *const c_char, out: *mut *mut MmsScheme) -> MmsStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let s = Scheme::from_json(read_str(text, "text")?).map_err(|e| Failure(MmsStatus::Parse, e.to_string()))?;
        *out = into_handle(s);
        Ok(())
    })
}

/// Releases a handle; null is ignored.
#[no_mangle]
pub extern "C" fn mms_scheme_free(scheme: *mut MmsScheme) {
    if !scheme.is_null() {
        // SAFETY: the handle came from Box::into_raw in this library.
        drop(unsafe { Box::from_raw(scheme) });
    }
}

/// Releases a string returned by this library; null is ignored.
#[no_mangle]
pub extern "C" fn mms_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: the string came from CString::into_raw in this library.
        drop(unsafe { CString::from_raw(s) });
    }
}

#[no_mangle]
pub extern "C" fn mms_scheme_serialize(scheme: *const MmsScheme, out: *mut *mut c_char) -> MmsStatus {
    guard(|| {
        let s = scheme_ref(scheme, "scheme")?;
        *out_ptr(out, "out")? = into_c_string(s.serialize());
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn mms_scheme_to_json(scheme: *const MmsScheme, out: *mut *mut c_char) -> MmsStatus {
    guard(|| {
        let s = scheme_ref(scheme, "scheme")?;
        *out_ptr(out, "out")? = into_c_string(s.to_json());
        Ok(())
    })
}

/// Matrix dimension, or 0 for a null handle.
#[no_mangle]
pub extern "C" fn mms_scheme_n(scheme: *const MmsScheme) -> usize {
    scheme_ref(scheme, "scheme").map_or(0, Scheme::n)
}

/// Number of rows, or 0 for a null handle.
#[no_mangle]
pub extern "C" fn mms_scheme_r(scheme: *const MmsScheme) -> usize {
    scheme_ref(scheme, "scheme").map_or(0, Scheme::r)
}

/// Field modulus, or 0 for a null handle.
#[no_mangle]
pub extern "C" fn mms_scheme_field(scheme: *const MmsScheme) -> u32 {
    scheme_ref(scheme, "scheme").map_or(0, |s| s.field().modulus() as u32)
}

#[no_mangle]
pub extern "C" fn mms_scheme_verify(scheme: *const MmsScheme, out: *mut bool) -> MmsStatus {
    guard(|| {
        let s = scheme_ref(scheme, "scheme")?;
        *out_ptr(out, "out")? = s.verify();
        Ok(())
    })
}

/// SHA-256 of the canonical serialization, written to 32 bytes at `out`.
#[no_mangle]
pub extern "C" fn mms_scheme_digest(scheme: *const MmsScheme, out: *mut u8) -> MmsStatus {
    guard(|| {
        let s = scheme_ref(scheme, "scheme")?;
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        let d = s.canonical_digest();
        // SAFETY: the caller provides 32 writable bytes.
        unsafe { ptr::copy_nonoverlapping(d.as_ptr(), out, d.len()) };
        Ok(())
    })
}

/// Converts a scheme from the `A B = C` convention by transposing every C.
#[no_mangle]
pub extern "C" fn mms_scheme_transpose_c(scheme: *const MmsScheme, out: *mut *mut MmsScheme) -> MmsStatus {
    guard(|| {
        let s = scheme_ref(scheme, "scheme")?;
        *out_ptr(out, "out")? = into_handle(s.transpose_c());
        Ok(())
    })
}

/// Computes the normal form. `limits` may be null. When `witness` is not
/// null it receives the group element mapping the input to the normal form.
#[no_mangle]
pub extern "C" fn mms_normal_form(
    scheme: *const MmsScheme,
    limits: *const MmsLimits,
    out: *mut *mut MmsScheme,
    witness: *mut *mut c_char,
) -> MmsStatus {
    guard(|| {
        let s = scheme_ref(scheme, "scheme")?;
        let out = out_ptr(out, "out")?;
        let res = canon::normal_form_with(s, &MmsLimits::resolve(limits))?;
        if let Some(w) = unsafe { witness.as_mut() } {
            *w = into_c_string(res.witness.to_text());
        }
        *out = into_handle(res.nf);
        Ok(())
    })
}

/// Decides equivalence. When the schemes are equivalent and `witness` is not
/// null it receives a group element mapping `first` to `second`; otherwise it
/// is set to null.
#[no_mangle]
pub extern "C" fn mms_equivalent(
    first: *const MmsScheme,
    second: *const MmsScheme,
    limits: *const MmsLimits,
    out: *mut bool,
    witness: *mut *mut c_char,
) -> MmsStatus {
    guard(|| {
        let a = scheme_ref(first, "first")?;
        let b = scheme_ref(second, "second")?;
        let out = out_ptr(out, "out")?;
        if !a.same_shape(b) {
            return Err(Failure(MmsStatus::Shape, "schemes differ in n, r or field".into()));
        }
        let found = canon::equivalent_with(a, b, &MmsLimits::resolve(limits))?;
        *out = found.is_some();
        if let Some(w) = unsafe { witness.as_mut() } {
            *w = found.map_or(ptr::null_mut(), |g| into_c_string(g.to_text()));
        }
        Ok(())
    })
}

/// Applies a group element in witness text form to a scheme.
#[no_mangle]
pub extern "C" fn mms_apply_witness(
    scheme: *const MmsScheme,
    witness: *const c_char,
    out: *mut *mut MmsScheme,
) -> MmsStatus {
    guard(|| {
        let s = scheme_ref(scheme, "scheme")?;
        let text = read_str(witness, "witness")?;
        let out = out_ptr(out, "out")?;
        let g = SymmetryElement::parse_text(text, s.field(), s.n(), s.r())?;
        *out = into_handle(g.apply(s)?);
        Ok(())
    })
}
