//! C ABI for the qd3 workbench.
//!
//! The surface is deliberately small and value-oriented:
//!
//! - parameters are an opaque [`Qd3Params`] handle built from the default
//!   profile or from a JSON configuration;
//! - local matrices and chain-level transfer matrices are copied into
//!   caller-owned buffers of [`Qd3Complex`] in row-major order;
//! - the three commands (identity catalog, spectrum, Bethe solve) return an
//!   opaque [`Qd3Report`] holding the same JSON report the command-line tool
//!   writes.
//!
//! Every fallible function returns a [`Qd3Status`]; on failure a description
//! is available from [`qd3_last_error_message`] on the same thread. Handles
//! are released with their `*_free` function; passing null to a `*_free`
//! function is a no-op. Panics never cross the boundary: they are reported as
//! [`Qd3Status::Panic`].
//!
//! Enumerated selectors ([`Qd3LocalOperator`], [`Qd3Sign`], [`Qd3Scope`]) are
//! passed as `int32_t` and checked, so an out-of-range value from a foreign
//! caller yields [`Qd3Status::InvalidArgument`] instead of undefined behaviour.
//!
//! Buffer-filling functions follow the size-query convention: the required
//! number of elements is always written to `*out_len`, and
//! [`Qd3Status::BufferTooSmall`] is returned (with nothing copied) when
//! `capacity` is smaller.

use qd3::chain::Chain;
use qd3::cli::{self, RunReport};
use qd3::la::CMat;
use qd3::local_ops::{LocalOps, Sign};
use qd3::params::{derive_c3, validate, Config, ModelParams, ValidatedParams};
use qd3::verify::Scope;
use qd3::{Error, C64};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Result of a C-ABI call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Qd3Status {
    /// Success.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An argument is out of range or not valid UTF-8.
    InvalidArgument = 2,
    /// Parameters failed validation.
    InvalidParams = 3,
    /// Malformed configuration or unsupported request.
    Config = 4,
    /// Bethe root counts violate the counting rule.
    CountingRule = 5,
    /// Evaluation too close to a pole or singular point.
    NearPole = 6,
    /// A numerical routine failed (singular matrix, no convergence, …).
    Numerical = 7,
    /// The output buffer is too small; `*out_len` holds the required size.
    BufferTooSmall = 8,
    /// An internal panic was caught at the boundary.
    Panic = 9,
}

/// Complex number with the C layout `{ double re; double im; }`.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Qd3Complex {
    /// Real part.
    pub re: f64,
    /// Imaginary part.
    pub im: f64,
}

impl From<Qd3Complex> for C64 {
    fn from(z: Qd3Complex) -> Self {
        C64::new(z.re, z.im)
    }
}

impl From<C64> for Qd3Complex {
    fn from(z: C64) -> Self {
        Qd3Complex { re: z.re, im: z.im }
    }
}

/// Local matrices available through [`qd3_local_operator`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Qd3LocalOperator {
    /// Vector R-matrix, 36 × 36.
    RVector = 0,
    /// Fused R⁺ on the spinor ⊗ vector space, 24 × 24.
    RPlus = 1,
    /// Fused R⁻ on the spinor ⊗ vector space, 24 × 24.
    RMinus = 2,
    /// Spinorial R-matrix, 16 × 16.
    RSpinorial = 3,
    /// Boundary K-matrix, 6 × 6.
    KMinus = 4,
    /// Dual boundary K-matrix, 6 × 6.
    KBar = 5,
    /// Fused boundary K-matrix of the (+) family, 4 × 4.
    KPlusFused = 6,
    /// Fused boundary K-matrix of the (−) family, 4 × 4.
    KMinusFused = 7,
}

/// Sign of a fused transfer matrix.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Qd3Sign {
    /// t₊.
    Plus = 0,
    /// t₋.
    Minus = 1,
}

/// Scope of the identity catalog.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Qd3Scope {
    /// Local R/K identities.
    Local = 0,
    /// Degenerations and fusion identities.
    Fusion = 1,
    /// Transfer-matrix identities.
    Transfer = 2,
    /// All of the above.
    All = 3,
}

macro_rules! selector {
    ($ty:ident { $($variant:ident),* $(,)? }) => {
        impl $ty {
            fn from_raw(v: i32) -> Result<Self, (Qd3Status, String)> {
                $(if v == $ty::$variant as i32 {
                    return Ok($ty::$variant);
                })*
                fail(Qd3Status::InvalidArgument, &format!("{} is not a valid {}", v, stringify!($ty)))
            }
        }
    };
}

selector!(Qd3LocalOperator { RVector, RPlus, RMinus, RSpinorial, KMinus, KBar, KPlusFused, KMinusFused });
selector!(Qd3Sign { Plus, Minus });
selector!(Qd3Scope { Local, Fusion, Transfer, All });

/// Opaque validated model parameters.
pub struct Qd3Params(ValidatedParams);

/// Opaque chain builder (monodromies and transfer matrices).
pub struct Qd3Chain(Chain);

/// Opaque command report.
pub struct Qd3Report {
    report: RunReport,
    json: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> Qd3Status {
    match e {
        Error::InvalidParams(_) => Qd3Status::InvalidParams,
        Error::Config(_) | Error::Io(_) => Qd3Status::Config,
        Error::CountingRule(_) => Qd3Status::CountingRule,
        Error::NearPole(_) | Error::ZeroDivisor(_) | Error::BranchCut(_) | Error::CoincidentRoots(_) => {
            Qd3Status::NearPole
        }
        Error::DimensionMismatch(_) | Error::DuplicateSlot(_) | Error::BadSlot { .. } => Qd3Status::InvalidArgument,
        _ => Qd3Status::Numerical,
    }
}

/// Runs `f`, recording the error message and containing panics.
fn guard(f: impl FnOnce() -> Result<(), (Qd3Status, String)>) -> Qd3Status {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => Qd3Status::Ok,
        Ok(Err((status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            Qd3Status::Panic
        }
    }
}

fn lift<T>(r: qd3::Result<T>) -> Result<T, (Qd3Status, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn fail<T>(status: Qd3Status, msg: &str) -> Result<T, (Qd3Status, String)> {
    Err((status, msg.to_string()))
}

/// Dereferences a handle, failing on null.
///
/// # Safety
/// `p` must be null or point to a live `T`.
unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, (Qd3Status, String)> {
    p.as_ref().ok_or_else(|| (Qd3Status::NullPointer, format!("{what} is null")))
}

/// Stores a boxed handle in `*out`.
///
/// # Safety
/// `out` must be null or writable.
unsafe fn emit<T>(out: *mut *mut T, value: T) -> Result<(), (Qd3Status, String)> {
    if out.is_null() {
        return fail(Qd3Status::NullPointer, "output handle pointer is null");
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Copies a matrix row-major into a caller buffer (size-query convention).
///
/// # Safety
/// `out_len` must be null or writable; `out` must be valid for `capacity`
/// elements when `capacity` is large enough.
unsafe fn copy_matrix(
    m: &CMat,
    out: *mut Qd3Complex,
    capacity: usize,
    out_len: *mut usize,
) -> Result<(), (Qd3Status, String)> {
    if out_len.is_null() {
        return fail(Qd3Status::NullPointer, "out_len is null");
    }
    let (rows, cols) = (m.nrows(), m.ncols());
    *out_len = rows * cols;
    if capacity < rows * cols {
        return fail(Qd3Status::BufferTooSmall, &format!("buffer holds {capacity} elements, {} needed", rows * cols));
    }
    if out.is_null() {
        return fail(Qd3Status::NullPointer, "output buffer is null");
    }
    let buf = std::slice::from_raw_parts_mut(out, rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            buf[i * cols + j] = m[(i, j)].into();
        }
    }
    Ok(())
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `capacity`). Returns the full message length excluding the
/// terminator, so a caller can size the buffer with a first call passing
/// `capacity = 0`.
///
/// # Safety
/// `buf` must be valid for `capacity` bytes (or null when `capacity` is 0).
#[no_mangle]
pub unsafe extern "C" fn qd3_last_error_message(buf: *mut c_char, capacity: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let bytes = e.as_bytes();
        if !buf.is_null() && capacity > 0 {
            let n = bytes.len().min(capacity - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qd3_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// c₃ = c(c + e^{−c₂})/c₁, the boundary parameter fixed by the other three.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn qd3_derive_c3(
    c: Qd3Complex,
    c1: Qd3Complex,
    c2: Qd3Complex,
    out: *mut Qd3Complex,
) -> Qd3Status {
    guard(|| {
        if out.is_null() {
            return fail(Qd3Status::NullPointer, "out is null");
        }
        *out = lift(derive_c3(c.into(), c1.into(), c2.into()))?.into();
        Ok(())
    })
}

/// Validated default parameter profile on `n_sites` sites.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn qd3_params_default(n_sites: usize, out: *mut *mut Qd3Params) -> Qd3Status {
    guard(|| {
        let p = validate(&ModelParams::default_profile(n_sites)).map_err(|v| {
            let e = Error::InvalidParams(v);
            (status_of(&e), e.to_string())
        })?;
        emit(out, Qd3Params(p))
    })
}

/// Parses and validates a JSON configuration document.
///
/// # Safety
/// `json` must be null or a NUL-terminated string; `out` must be null or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn qd3_params_from_json(json: *const c_char, out: *mut *mut Qd3Params) -> Qd3Status {
    guard(|| {
        if json.is_null() {
            return fail(Qd3Status::NullPointer, "json is null");
        }
        let text =
            CStr::from_ptr(json).to_str().map_err(|_| (Qd3Status::InvalidArgument, "json is not UTF-8".into()))?;
        let params = lift(Config::from_json(text).and_then(|c| c.to_params()))?;
        let p = validate(&params).map_err(|v| {
            let e = Error::InvalidParams(v);
            (status_of(&e), e.to_string())
        })?;
        emit(out, Qd3Params(p))
    })
}

/// Replaces the random seed of a parameter handle.
///
/// # Safety
/// `params` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qd3_params_set_seed(params: *mut Qd3Params, seed: u64) -> Qd3Status {
    guard(|| {
        let p = params.as_mut().ok_or((Qd3Status::NullPointer, "params is null".to_string()))?;
        let mut m = p.0.clone().into_inner();
        m.rng_seed = seed;
        p.0 = validate(&m).map_err(|v| (Qd3Status::InvalidParams, Error::InvalidParams(v).to_string()))?;
        Ok(())
    })
}

/// Number of sites (0 for a null handle).
///
/// # Safety
/// `params` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qd3_params_n_sites(params: *const Qd3Params) -> usize {
    params.as_ref().map_or(0, |p| p.0.n_sites)
}

/// Releases a parameter handle.
///
/// # Safety
/// `params` must be null or a handle not yet released.
#[no_mangle]
pub unsafe extern "C" fn qd3_params_free(params: *mut Qd3Params) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Evaluates the local matrix selected by `which` (a [`Qd3LocalOperator`])
/// at spectral parameter `u` into `out` (row-major, size-query convention).
///
/// # Safety
/// `params` must be null or live; `out`/`out_len` as for every buffer call.
#[no_mangle]
pub unsafe extern "C" fn qd3_local_operator(
    params: *const Qd3Params,
    which: i32,
    u: Qd3Complex,
    out: *mut Qd3Complex,
    capacity: usize,
    out_len: *mut usize,
) -> Qd3Status {
    guard(|| {
        let p = &handle(params, "params")?.0;
        let ops = LocalOps::from_params(p);
        let u: C64 = u.into();
        let m = match Qd3LocalOperator::from_raw(which)? {
            Qd3LocalOperator::RVector => ops.r_vector(u),
            Qd3LocalOperator::RPlus => ops.r_fused(Sign::Plus, u),
            Qd3LocalOperator::RMinus => ops.r_fused(Sign::Minus, u),
            Qd3LocalOperator::RSpinorial => ops.r_spinorial(u),
            Qd3LocalOperator::KMinus => ops.k_minus(u),
            Qd3LocalOperator::KBar => ops.k_bar(u),
            Qd3LocalOperator::KPlusFused => ops.k_plus_fused(u),
            Qd3LocalOperator::KMinusFused => ops.k_minus_fused(u),
        };
        copy_matrix(&m.matrix, out, capacity, out_len)
    })
}

/// Builds a chain for the given parameters.
///
/// # Safety
/// `params` must be null or live; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn qd3_chain_new(params: *const Qd3Params, out: *mut *mut Qd3Chain) -> Qd3Status {
    guard(|| {
        let chain = lift(Chain::new(&handle(params, "params")?.0))?;
        emit(out, Qd3Chain(chain))
    })
}

/// Dimension 6^N of the physical space (0 for a null handle).
///
/// # Safety
/// `chain` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qd3_chain_dim(chain: *const Qd3Chain) -> usize {
    chain.as_ref().map_or(0, |c| c.0.phys_dim())
}

/// Transfer matrix t(u) into `out` (row-major, size-query convention).
///
/// # Safety
/// `chain` must be null or live; `out`/`out_len` as for every buffer call.
#[no_mangle]
pub unsafe extern "C" fn qd3_chain_transfer(
    chain: *const Qd3Chain,
    u: Qd3Complex,
    out: *mut Qd3Complex,
    capacity: usize,
    out_len: *mut usize,
) -> Qd3Status {
    guard(|| {
        let t = lift(handle(chain, "chain")?.0.transfer(u.into()))?;
        copy_matrix(&t.matrix, out, capacity, out_len)
    })
}

/// Fused transfer matrix t₊(u) or t₋(u), selected by `sign` (a [`Qd3Sign`]),
/// into `out`.
///
/// # Safety
/// `chain` must be null or live; `out`/`out_len` as for every buffer call.
#[no_mangle]
pub unsafe extern "C" fn qd3_chain_transfer_fused(
    chain: *const Qd3Chain,
    u: Qd3Complex,
    sign: i32,
    out: *mut Qd3Complex,
    capacity: usize,
    out_len: *mut usize,
) -> Qd3Status {
    guard(|| {
        let s = match Qd3Sign::from_raw(sign)? {
            Qd3Sign::Plus => Sign::Plus,
            Qd3Sign::Minus => Sign::Minus,
        };
        let t = lift(handle(chain, "chain")?.0.transfer_fused(u.into(), s))?;
        copy_matrix(&t.matrix, out, capacity, out_len)
    })
}

/// Releases a chain handle.
///
/// # Safety
/// `chain` must be null or a handle not yet released.
#[no_mangle]
pub unsafe extern "C" fn qd3_chain_free(chain: *mut Qd3Chain) {
    if !chain.is_null() {
        drop(Box::from_raw(chain));
    }
}

fn report(r: RunReport) -> Result<Qd3Report, (Qd3Status, String)> {
    let json = CString::new(r.to_json()).map_err(|_| (Qd3Status::Numerical, "report contains NUL".to_string()))?;
    Ok(Qd3Report { report: r, json })
}

/// Runs the identity catalog for `scope` (a [`Qd3Scope`]) with `n_samples`
/// points per sampled identity.
///
/// # Safety
/// `params` must be null or live; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn qd3_verify(
    params: *const Qd3Params,
    scope: i32,
    n_samples: usize,
    out: *mut *mut Qd3Report,
) -> Qd3Status {
    guard(|| {
        let scope = match Qd3Scope::from_raw(scope)? {
            Qd3Scope::Local => Scope::Local,
            Qd3Scope::Fusion => Scope::Fusion,
            Qd3Scope::Transfer => Scope::Transfer,
            Qd3Scope::All => Scope::All,
        };
        let r = cli::cmd_verify(&handle(params, "params")?.0, scope, n_samples);
        emit(out, report(r)?)
    })
}

/// Diagonalizes the transfer family (N ≤ 3) on `grid_points` generic points
/// and checks the eigenvalue relations; `u_max` bounds the asymptotic probes.
///
/// # Safety
/// `params` must be null or live; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn qd3_spectrum(
    params: *const Qd3Params,
    grid_points: usize,
    u_max: f64,
    out: *mut *mut Qd3Report,
) -> Qd3Status {
    guard(|| {
        let (r, _) = lift(cli::cmd_spectrum(&handle(params, "params")?.0, grid_points, u_max))?;
        emit(out, report(r)?)
    })
}

/// Solves the Bethe equations with root counts (l1, l2, l3) from `n_starts`
/// random starts and matches the states to the spectrum.
///
/// # Safety
/// `params` must be null or live; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn qd3_bae(
    params: *const Qd3Params,
    l1: usize,
    l2: usize,
    l3: usize,
    n_starts: usize,
    grid_points: usize,
    u_max: f64,
    out: *mut *mut Qd3Report,
) -> Qd3Status {
    guard(|| {
        let r = lift(cli::cmd_bae(&handle(params, "params")?.0, [l1, l2, l3], n_starts, grid_points, u_max))?;
        emit(out, report(r)?)
    })
}

/// 1 if every check in the report passed, 0 otherwise (or for null).
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qd3_report_passed(report: *const Qd3Report) -> i32 {
    report.as_ref().map_or(0, |r| i32::from(r.report.passed))
}

/// Number of residual records in the report (0 for null).
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qd3_report_record_count(report: *const Qd3Report) -> usize {
    report.as_ref().map_or(0, |r| r.report.records.len())
}

/// JSON text of the report; owned by the handle and valid until it is
/// released. Null for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qd3_report_json(report: *const Qd3Report) -> *const c_char {
    report.as_ref().map_or(ptr::null(), |r| r.json.as_ptr())
}

/// Releases a report handle.
///
/// # Safety
/// `report` must be null or a handle not yet released.
#[no_mangle]
pub unsafe extern "C" fn qd3_report_free(report: *mut Qd3Report) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

#[cfg(test)]
mod tests;
