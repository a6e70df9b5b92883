//! C ABI for `degdiv`.
//!
//! Every fallible function returns a [`DegdivStatus`] and writes its result
//! through an out-pointer. On failure the message is kept per thread and
//! read back with [`degdiv_last_error_message`]. Subgroups are opaque
//! handles owned by the caller and released with [`degdiv_subgroup_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use degdiv::arith::{euler_phi, glm_order, ArithError};
use degdiv::cmbounds::{c_of_g, CmError};
use degdiv::curvedeg::{genus_x1, stable_bound, CurveError, SemigroupSpec};
use degdiv::gl2::{analyze, close_generators, DicksonClass, Gl2Error, Subgroup};
use degdiv::orbits::{verify_case_divisibility, Verdict};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegdivStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotPrime = 3,
    Overflow = 4,
    Unclassifiable = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegdivClass {
    ContainsSl = 0,
    Borel = 1,
    SplitNormalizer = 2,
    NonsplitNormalizer = 3,
    ExceptionalA4 = 4,
    ExceptionalS4 = 5,
    ExceptionalA5 = 6,
}

impl From<DicksonClass> for DegdivClass {
    fn from(c: DicksonClass) -> Self {
        match c {
            DicksonClass::ContainsSL => Self::ContainsSl,
            DicksonClass::Borel => Self::Borel,
            DicksonClass::SplitNormalizer => Self::SplitNormalizer,
            DicksonClass::NonsplitNormalizer => Self::NonsplitNormalizer,
            DicksonClass::ExceptionalA4 => Self::ExceptionalA4,
            DicksonClass::ExceptionalS4 => Self::ExceptionalS4,
            DicksonClass::ExceptionalA5 => Self::ExceptionalA5,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegdivVerdict {
    Pass = 0,
    Violation = 1,
    NotApplicable = 2,
}

/// Opaque subgroup of `GL_2(F_p)`.
pub struct DegdivSubgroup {
    inner: Subgroup,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(DegdivStatus, String);

impl From<Gl2Error> for Failure {
    fn from(e: Gl2Error) -> Self {
        let status = match e {
            Gl2Error::NotPrime(_) => DegdivStatus::NotPrime,
            Gl2Error::Unclassifiable { .. } => DegdivStatus::Unclassifiable,
            _ => DegdivStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

impl From<ArithError> for Failure {
    fn from(e: ArithError) -> Self {
        let status = match e {
            ArithError::NotPrime(_) => DegdivStatus::NotPrime,
            ArithError::Overflow(_) => DegdivStatus::Overflow,
            _ => DegdivStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

impl From<CurveError> for Failure {
    fn from(e: CurveError) -> Self {
        match e {
            CurveError::Arith(a) => a.into(),
            e => Failure(DegdivStatus::InvalidArgument, e.to_string()),
        }
    }
}

impl From<CmError> for Failure {
    fn from(e: CmError) -> Self {
        match e {
            CmError::Arith(a) => a.into(),
            e => Failure(DegdivStatus::InvalidArgument, e.to_string()),
        }
    }
}

fn set_error(msg: String) {
    let msg = CString::new(msg).unwrap_or_else(|_| CString::new("error message contained NUL").unwrap());
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Runs `f`, writes its value to `out` and records any failure.
fn guard<T>(out: *mut T, f: impl FnOnce() -> Result<T, Failure>) -> DegdivStatus {
    clear_error();
    if out.is_null() {
        set_error("output pointer is null".into());
        return DegdivStatus::NullPointer;
    }
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(v)) => {
            // SAFETY: checked non-null; the caller provides writable storage.
            unsafe { out.write(v) };
            DegdivStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            DegdivStatus::Panic
        }
    }
}

fn handle<'a>(h: *const DegdivSubgroup) -> Result<&'a Subgroup, Failure> {
    if h.is_null() {
        return Err(Failure(DegdivStatus::NullPointer, "subgroup handle is null".into()));
    }
    // SAFETY: non-null handles come from `degdiv_subgroup_new` and are live until freed.
    Ok(unsafe { &(*h).inner })
}

/// Message for the last failure on this thread, or NULL. Valid until the
/// next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn degdiv_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Subgroup of `GL_2(F_p)` generated by `n_gens` matrices, read row-major
/// from `entries` as `4 * n_gens` integers.
///
/// # Safety
/// `entries` must point to `4 * n_gens` readable `int64_t` (may be NULL when
/// `n_gens` is 0) and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn degdiv_subgroup_new(
    p: u32,
    entries: *const i64,
    n_gens: usize,
    out: *mut *mut DegdivSubgroup,
) -> DegdivStatus {
    guard(out, || {
        let gens: Vec<[i64; 4]> = if n_gens == 0 {
            Vec::new()
        } else {
            if entries.is_null() {
                return Err(Failure(DegdivStatus::NullPointer, "entries is null".into()));
            }
            let len = n_gens
                .checked_mul(4)
                .ok_or_else(|| Failure(DegdivStatus::Overflow, "generator count too large".into()))?;
            // SAFETY: the caller guarantees `len` readable values.
            let flat = unsafe { std::slice::from_raw_parts(entries, len) };
            flat.chunks_exact(4).map(|c| [c[0], c[1], c[2], c[3]]).collect()
        };
        let inner = close_generators(p, &gens)?;
        Ok(Box::into_raw(Box::new(DegdivSubgroup { inner })))
    })
}

/// # Safety
/// `h` must be NULL or a handle from [`degdiv_subgroup_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn degdiv_subgroup_free(h: *mut DegdivSubgroup) {
    if !h.is_null() {
        // SAFETY: ownership returns from the caller.
        drop(unsafe { Box::from_raw(h) });
    }
}

/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn degdiv_subgroup_order(h: *const DegdivSubgroup, out: *mut u64) -> DegdivStatus {
    guard(out, || Ok(handle(h)?.order()))
}

/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn degdiv_subgroup_classify(h: *const DegdivSubgroup, out: *mut DegdivClass) -> DegdivStatus {
    guard(out, || Ok(analyze(handle(h)?)?.class.into()))
}

/// `[F_p^* : det G]`.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn degdiv_subgroup_det_index(h: *const DegdivSubgroup, out: *mut u64) -> DegdivStatus {
    guard(out, || Ok(degdiv::gl2::det_index(handle(h)?)))
}

/// Orbit-divisibility verdict for the subgroup.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn degdiv_subgroup_verify(h: *const DegdivSubgroup, out: *mut DegdivVerdict) -> DegdivStatus {
    guard(out, || {
        Ok(match verify_case_divisibility(handle(h)?)?.verdict {
            Verdict::Pass => DegdivVerdict::Pass,
            Verdict::Violation { .. } => DegdivVerdict::Violation,
            Verdict::NotApplicable => DegdivVerdict::NotApplicable,
        })
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn degdiv_euler_phi(n: u64, out: *mut u64) -> DegdivStatus {
    guard(out, || Ok(euler_phi(n)?))
}

/// `#GL_m(Z/p^n) = c * p^exponent` with `p` not dividing `c`.
///
/// # Safety
/// `c_out` and `exponent_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn degdiv_glm_order(
    m: u32,
    p: u64,
    n: u32,
    c_out: *mut u64,
    exponent_out: *mut u32,
) -> DegdivStatus {
    if exponent_out.is_null() {
        clear_error();
        set_error("output pointer is null".into());
        return DegdivStatus::NullPointer;
    }
    let mut exponent = 0u32;
    let status = guard(c_out, || {
        let order = glm_order(m, p, n)?;
        exponent = order.exponent;
        u64::try_from(order.c).map_err(|_| ArithError::Overflow("prime-to-p part as u64").into())
    });
    if status == DegdivStatus::Ok {
        // SAFETY: checked non-null above.
        unsafe { exponent_out.write(exponent) };
    }
    status
}

/// Genus of `X_1(N)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn degdiv_genus_x1(n: u64, out: *mut u64) -> DegdivStatus {
    guard(out, || Ok(genus_x1(n)?))
}

/// Least `M` such that every multiple of the gcd from `M` on is a sum of generators.
///
/// # Safety
/// `generators` must point to `len` readable values and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn degdiv_stable_bound(generators: *const u64, len: usize, out: *mut u64) -> DegdivStatus {
    guard(out, || {
        if generators.is_null() {
            return Err(Failure(DegdivStatus::NullPointer, "generators is null".into()));
        }
        // SAFETY: the caller guarantees `len` readable values.
        let gens = unsafe { std::slice::from_raw_parts(generators, len) };
        Ok(stable_bound(&SemigroupSpec::new(gens.iter().copied())?))
    })
}

/// CM divisibility constant `c(g)`; `OVERFLOW` when it exceeds 64 bits.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn degdiv_cm_constant(g: u32, out: *mut u64) -> DegdivStatus {
    guard(out, || Ok(c_of_g(g)?.c_u64()?))
}
