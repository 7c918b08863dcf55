//! C interface: opaque form handles, JSON strings at the boundary, status
//! codes for every fallible call.
//!
//! Ownership rules: every `*mut BlowupForm` returned through an out
//! parameter is owned by the caller and released with `blowup_form_free`;
//! every `*mut c_char` likewise with `blowup_string_free`. Failure details
//! are available from `blowup_last_error` until the next failing call on
//! the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use blowup_moduli::bundles::CanonicalForm;
use blowup_moduli::iso::{decide_iso, verify_certificate, Certificate, TruncationParams};

/// Result of a C-interface call. Anything but `Ok` leaves a message in
/// `blowup_last_error`.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BlowupStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The input parsed but was rejected (bad JSON, window violation,
    /// level mismatch, truncation box below the level minimum).
    BadInput = 3,
    /// The certificate parsed but does not prove its claim.
    VerifyFailed = 4,
    /// The form has no preimage under the embedding.
    NotInImage = 5,
}

/// Opaque handle to a canonical form.
pub struct BlowupForm(CanonicalForm);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(status: BlowupStatus, message: impl ToString) -> BlowupStatus {
    let text = message.to_string().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(text).expect("nul bytes stripped");
    });
    status
}

/// Message for the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread. Never null.
#[no_mangle]
pub extern "C" fn blowup_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, BlowupStatus> {
    if ptr.is_null() {
        return Err(fail(BlowupStatus::NullArgument, "null string argument"));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|e| fail(BlowupStatus::InvalidUtf8, e))
}

unsafe fn read_form<'a>(ptr: *const BlowupForm) -> Result<&'a CanonicalForm, BlowupStatus> {
    ptr.as_ref()
        .map(|handle| &handle.0)
        .ok_or_else(|| fail(BlowupStatus::NullArgument, "null form argument"))
}

unsafe fn write_form(out: *mut *mut BlowupForm, form: CanonicalForm) -> BlowupStatus {
    if out.is_null() {
        return fail(BlowupStatus::NullArgument, "null out parameter");
    }
    *out = Box::into_raw(Box::new(BlowupForm(form)));
    BlowupStatus::Ok
}

unsafe fn write_string(out: *mut *mut c_char, text: String) -> BlowupStatus {
    if out.is_null() {
        return fail(BlowupStatus::NullArgument, "null out parameter");
    }
    match CString::new(text) {
        Ok(s) => {
            *out = s.into_raw();
            BlowupStatus::Ok
        }
        Err(e) => fail(BlowupStatus::BadInput, e),
    }
}

/// Parses a form from its JSON record (`{"j": ..., "coeffs": [...]}`).
#[no_mangle]
pub unsafe extern "C" fn blowup_form_from_json(
    json: *const c_char,
    out: *mut *mut BlowupForm,
) -> BlowupStatus {
    let text = match read_str(json) {
        Ok(t) => t,
        Err(status) => return status,
    };
    match serde_json::from_str::<CanonicalForm>(text) {
        Ok(form) => write_form(out, form),
        Err(e) => fail(BlowupStatus::BadInput, e),
    }
}

/// Draws the seeded random form at the given level; equal arguments give
/// equal forms across platforms and runs.
#[no_mangle]
pub unsafe extern "C" fn blowup_form_random(
    j: i32,
    seed: u64,
    out: *mut *mut BlowupForm,
) -> BlowupStatus {
    match CanonicalForm::random(j, seed, 3) {
        Ok(form) => write_form(out, form),
        Err(e) => fail(BlowupStatus::BadInput, e),
    }
}

/// Serializes a form to its JSON record. The caller frees the string.
#[no_mangle]
pub unsafe extern "C" fn blowup_form_to_json(
    form: *const BlowupForm,
    out: *mut *mut c_char,
) -> BlowupStatus {
    let form = match read_form(form) {
        Ok(f) => f,
        Err(status) => return status,
    };
    match serde_json::to_string(form) {
        Ok(text) => write_string(out, text),
        Err(e) => fail(BlowupStatus::BadInput, e),
    }
}

/// Level of the form, or -1 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn blowup_form_level(form: *const BlowupForm) -> i32 {
    match form.as_ref() {
        Some(handle) => handle.0.level(),
        None => -1,
    }
}

/// 1 when the form lies in the image of the embedding from the level
/// below, 0 when not, -1 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn blowup_form_in_image(form: *const BlowupForm) -> i32 {
    match form.as_ref() {
        Some(handle) => handle.0.in_embedded_image() as i32,
        None => -1,
    }
}

/// Sends the form one level up.
#[no_mangle]
pub unsafe extern "C" fn blowup_phi(
    form: *const BlowupForm,
    out: *mut *mut BlowupForm,
) -> BlowupStatus {
    let form = match read_form(form) {
        Ok(f) => f,
        Err(status) => return status,
    };
    write_form(out, form.embed())
}

/// Recovers the form one level down; fails with `NotInImage` when the
/// input is outside the image of the embedding.
#[no_mangle]
pub unsafe extern "C" fn blowup_phi_inverse(
    form: *const BlowupForm,
    out: *mut *mut BlowupForm,
) -> BlowupStatus {
    let form = match read_form(form) {
        Ok(f) => f,
        Err(status) => return status,
    };
    match form.embed_preimage() {
        Some(preimage) => write_form(out, preimage),
        None => fail(
            BlowupStatus::NotInImage,
            "form has no preimage under the embedding",
        ),
    }
}

/// Decides whether two same-level forms are isomorphic and returns the
/// verdict as a JSON record (the same schema the CLI emits, certificate
/// included for positive verdicts). Nonpositive `u_max` or `z_max` select
/// the per-level defaults; `cap` bounds the deepening retries.
#[no_mangle]
pub unsafe extern "C" fn blowup_decide_iso(
    p: *const BlowupForm,
    q: *const BlowupForm,
    u_max: i32,
    z_max: i32,
    cap: u32,
    out: *mut *mut c_char,
) -> BlowupStatus {
    let p = match read_form(p) {
        Ok(f) => f,
        Err(status) => return status,
    };
    let q = match read_form(q) {
        Ok(f) => f,
        Err(status) => return status,
    };
    let defaults = TruncationParams::defaults_for_level(p.level());
    let params = TruncationParams::new(
        if u_max > 0 { u_max } else { defaults.u_max },
        if z_max > 0 { z_max } else { defaults.z_max },
        cap,
    );
    let verdict = match decide_iso(p, q, params) {
        Ok(v) => v,
        Err(e) => return fail(BlowupStatus::BadInput, e),
    };
    match serde_json::to_string(&verdict) {
        Ok(text) => write_string(out, text),
        Err(e) => fail(BlowupStatus::BadInput, e),
    }
}

/// Re-verifies a certificate record exactly, with no truncation. `Ok`
/// means the certificate proves its claim.
#[no_mangle]
pub unsafe extern "C" fn blowup_verify_certificate(cert_json: *const c_char) -> BlowupStatus {
    let text = match read_str(cert_json) {
        Ok(t) => t,
        Err(status) => return status,
    };
    let cert = match serde_json::from_str::<Certificate>(text) {
        Ok(c) => c,
        Err(e) => return fail(BlowupStatus::BadInput, e),
    };
    if verify_certificate(&cert) {
        BlowupStatus::Ok
    } else {
        fail(
            BlowupStatus::VerifyFailed,
            "certificate does not prove its claim",
        )
    }
}

/// Releases a form handle. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn blowup_form_free(form: *mut BlowupForm) {
    if !form.is_null() {
        drop(Box::from_raw(form));
    }
}

/// Releases a string returned by this library. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn blowup_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
