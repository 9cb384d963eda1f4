//! C ABI over `ladder-cs`.
//!
//! Every function returns an [`LcsStatus`]; results go through out-pointers.
//! On failure a message is kept per thread and can be read back with
//! [`lcs_last_error_message`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use ladder_cs::beamsplitter::{linear_entropy, split};
use ladder_cs::coherent::{coefficients, overlap, CoherentSpec, StateEvaluator, Variant};
use ladder_cs::observables::{energy_expectation, number_moments, Method};
use ladder_cs::system::{is_valid_index, ladder_element, validate_m, wavefunction, StateLabel};
use ladder_cs::Error;
use num_complex::Complex64;

#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LcsStatus {
    Ok = 0,
    InvalidArgument = 1,
    NumericalFailure = 2,
    NullPointer = 3,
    Panic = 4,
    BufferTooSmall = 5,
}

pub const LCS_VARIANT_NONLINEAR: i32 = 0;
pub const LCS_VARIANT_LINEARIZED: i32 = 1;
pub const LCS_METHOD_CLOSED_FORM: i32 = 0;
pub const LCS_METHOD_DIRECT: i32 = 1;

/// Opaque coherent state with its truncated coefficients.
pub struct LcsState {
    spec: CoherentSpec,
    evaluator: StateEvaluator,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(LcsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = if e.is_numerical() {
            LcsStatus::NumericalFailure
        } else {
            LcsStatus::InvalidArgument
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(LcsStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(LcsStatus::InvalidArgument, msg.into())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> LcsStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LcsStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            LcsStatus::Panic
        }
    }
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn state_ref<'a>(state: *const LcsState) -> Result<&'a LcsState, Failure> {
    state.as_ref().ok_or_else(|| null("state"))
}

fn variant(v: i32) -> Result<Variant, Failure> {
    match v {
        LCS_VARIANT_NONLINEAR => Ok(Variant::Nonlinear),
        LCS_VARIANT_LINEARIZED => Ok(Variant::Linearized),
        _ => Err(invalid(format!("unknown variant {v}"))),
    }
}

fn method(v: i32) -> Result<Method, Failure> {
    match v {
        LCS_METHOD_CLOSED_FORM => Ok(Method::ClosedForm),
        LCS_METHOD_DIRECT => Ok(Method::Direct),
        _ => Err(invalid(format!("unknown method {v}"))),
    }
}

/// Creates a coherent state. `tail_tol` must lie in (0, 1e-8].
///
/// # Safety
/// `out` must be valid for writing one pointer. The handle must be released
/// with [`lcs_state_free`].
#[no_mangle]
pub unsafe extern "C" fn lcs_state_new(
    variant_code: i32,
    m: u32,
    mu: i64,
    z_re: f64,
    z_im: f64,
    tail_tol: f64,
    out: *mut *mut LcsState,
) -> LcsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        out.write(std::ptr::null_mut());
        let spec = CoherentSpec::new(variant(variant_code)?, m as usize, mu, Complex64::new(z_re, z_im))?;
        let evaluator = StateEvaluator::new(coefficients(&spec, tail_tol)?)?;
        out.write(Box::into_raw(Box::new(LcsState { spec, evaluator })));
        Ok(())
    })
}

/// Releases a handle from [`lcs_state_new`]. Null is ignored.
///
/// # Safety
/// `state` must be null or a live handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn lcs_state_free(state: *mut LcsState) {
    if !state.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(state))));
    }
}

/// Number of retained coefficients K + 1.
///
/// # Safety
/// `state` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn lcs_state_len(state: *const LcsState, out: *mut usize) -> LcsStatus {
    guard(|| {
        let s = state_ref(state)?;
        write(out, s.evaluator.coefficients().entries.len(), "out")
    })
}

/// Upper bound on the coefficient mass discarded by truncation.
///
/// # Safety
/// `state` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn lcs_state_tail_mass(state: *const LcsState, out: *mut f64) -> LcsStatus {
    guard(|| {
        let s = state_ref(state)?;
        write(out, s.evaluator.coefficients().tail_mass, "out")
    })
}

/// Copies A_0..A_K into `re` and `im`, each of capacity `cap`. Fails with
/// BufferTooSmall when `cap` is below [`lcs_state_len`].
///
/// # Safety
/// `re` and `im` must be valid for writing `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn lcs_state_coefficients(
    state: *const LcsState,
    re: *mut f64,
    im: *mut f64,
    cap: usize,
) -> LcsStatus {
    guard(|| {
        let s = state_ref(state)?;
        if re.is_null() || im.is_null() {
            return Err(null("output buffer"));
        }
        let entries = &s.evaluator.coefficients().entries;
        if cap < entries.len() {
            return Err(Failure(
                LcsStatus::BufferTooSmall,
                format!("need {} entries, got {cap}", entries.len()),
            ));
        }
        for (i, a) in entries.iter().enumerate() {
            re.add(i).write(a.re);
            im.add(i).write(a.im);
        }
        Ok(())
    })
}

/// |Ψ(x, t)|² at `n` points.
///
/// # Safety
/// `xs` must be valid for reading and `out` for writing `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn lcs_state_density(
    state: *const LcsState,
    t: f64,
    xs: *const f64,
    out: *mut f64,
    n: usize,
) -> LcsStatus {
    guard(|| {
        let s = state_ref(state)?;
        if n == 0 {
            return Ok(());
        }
        if xs.is_null() || out.is_null() {
            return Err(null("buffer"));
        }
        let xs = std::slice::from_raw_parts(xs, n);
        if xs.iter().any(|x| !x.is_finite()) || !t.is_finite() {
            return Err(invalid("non-finite x or t"));
        }
        let rho = s.evaluator.density_on(xs, t);
        std::ptr::copy_nonoverlapping(rho.as_ptr(), out, n);
        Ok(())
    })
}

/// ⟨H⟩ by closed form or direct sum.
///
/// # Safety
/// `state` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn lcs_state_energy(
    state: *const LcsState,
    method_code: i32,
    out: *mut f64,
) -> LcsStatus {
    guard(|| {
        let s = state_ref(state)?;
        let e = energy_expectation(&s.spec, method(method_code)?)?;
        write(out, e, "out")
    })
}

/// Mandel Q of the ladder number operator.
///
/// # Safety
/// `state` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn lcs_state_mandel_q(
    state: *const LcsState,
    method_code: i32,
    out: *mut f64,
) -> LcsStatus {
    guard(|| {
        let s = state_ref(state)?;
        let q = number_moments(&s.spec, method(method_code)?)?.mandel_q();
        write(out, q, "out")
    })
}

/// Linear entropy of one arm after a 50:50 beamsplitter with vacuum in the
/// other port, and its truncation error bound.
///
/// # Safety
/// `state` must be a live handle; `value` and `error_bound` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn lcs_state_linear_entropy(
    state: *const LcsState,
    value: *mut f64,
    error_bound: *mut f64,
) -> LcsStatus {
    guard(|| {
        let s = state_ref(state)?;
        if value.is_null() || error_bound.is_null() {
            return Err(null("out"));
        }
        let e = linear_entropy(&split(s.evaluator.coefficients()));
        value.write(e.value);
        error_bound.write(e.error_bound);
        Ok(())
    })
}

/// ⟨+z|-z⟩ for the nonlinear state of ladder μ.
///
/// # Safety
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn lcs_overlap(m: u32, mu: i64, abs_z: f64, out: *mut f64) -> LcsStatus {
    guard(|| {
        if abs_z.is_nan() || abs_z < 0.0 {
            return Err(invalid("abs_z must be non-negative"));
        }
        write(out, overlap(m as usize, mu, abs_z)?, "out")
    })
}

/// Matrix element a_ν of the annihilation operator.
///
/// # Safety
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn lcs_ladder_element(m: u32, nu: i64, out: *mut f64) -> LcsStatus {
    guard(|| {
        validate_m(m as usize)?;
        if !is_valid_index(m as usize, nu) {
            return Err(invalid(format!("nu = {nu} not in the spectrum for m = {m}")));
        }
        write(out, ladder_element(m as usize, nu), "out")
    })
}

/// ψ_ν(x) or its first or second derivative.
///
/// # Safety
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn lcs_wavefunction(
    m: u32,
    nu: i64,
    x: f64,
    derivative: u8,
    out: *mut f64,
) -> LcsStatus {
    guard(|| {
        if derivative > 2 {
            return Err(invalid("derivative order must be 0, 1 or 2"));
        }
        if !x.is_finite() {
            return Err(invalid("x must be finite"));
        }
        let label = StateLabel::from_index(m as usize, nu)?;
        write(out, wavefunction(&label, x, derivative), "out")
    })
}

/// Copies the calling thread's last error message into `buf` (NUL
/// terminated, truncated to `cap`). Returns the full message length
/// including the terminator, or 0 when there is no message.
///
/// # Safety
/// `buf` must be null or valid for writing `cap` bytes.
#[no_mangle]
pub unsafe extern "C" fn lcs_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes_with_nul();
            if !buf.is_null() && cap > 0 {
                let n = bytes.len().min(cap);
                std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
                buf.add(n - 1).write(0);
            }
            bytes.len()
        }
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lcs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
