//! C ABI over the core solver.
//!
//! Conventions:
//! - every fallible call returns a [`QrStatus`]; results travel through out
//!   pointers which are written only on `Ok`
//! - handles are opaque; release them with the matching `qr_*_free`
//!   (passing null is a no-op)
//! - after a non-`Ok` status, `qr_last_error_message` returns a
//!   thread-local, NUL-terminated description valid until the next failing
//!   call on the same thread
//! - panics never unwind across the boundary; they surface as `Panic`
//!
//! The matching header is generated into `include/quartic_rabi.h` at build
//! time.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use quartic_rabi::model::{FockSpinBasis, ModelParams};
use quartic_rabi::spectrum::{converged_spectrum, solve_spectrum, SpectrumResult};
use quartic_rabi::{metrology, ptps, semiclassical, wavefunction, Error};

/// Outcome of a C-ABI call. Mirrors the library's error taxonomy.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QrStatus {
    Ok = 0,
    InvalidArgument = 1,
    SolverFailure = 2,
    NotConverged = 3,
    Unstable = 4,
    NearDegenerate = 5,
    Panic = 6,
}

/// Opaque model-parameter handle.
pub struct QrParams {
    inner: ModelParams,
}

/// Opaque spectrum handle: levels, states, gap, convergence metadata.
pub struct QrSpectrum {
    inner: SpectrumResult,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(e: &Error) -> QrStatus {
    match e {
        Error::InvalidArgument(_) | Error::Io(_) => QrStatus::InvalidArgument,
        Error::Solver(_) => QrStatus::SolverFailure,
        Error::NotConverged { .. } => QrStatus::NotConverged,
        Error::Unstable { .. } => QrStatus::Unstable,
        Error::NearDegenerate { .. } => QrStatus::NearDegenerate,
        Error::AtPoint { source, .. } => status_of(source),
    }
}

fn fail(e: &Error) -> QrStatus {
    set_error(&e.to_string());
    status_of(e)
}

/// Runs a closure with panics converted to `Panic`.
fn guarded(f: impl FnOnce() -> QrStatus) -> QrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic across the C boundary".into());
            set_error(&msg);
            QrStatus::Panic
        }
    }
}

fn invalid(msg: &str) -> QrStatus {
    set_error(msg);
    QrStatus::InvalidArgument
}

/// Last error message for this thread. Never null; empty before any failure.
/// The pointer is invalidated by the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Static name of a status code (e.g. "NotConverged").
#[no_mangle]
pub extern "C" fn qr_status_name(status: QrStatus) -> *const c_char {
    let name: &'static [u8] = match status {
        QrStatus::Ok => b"Ok\0",
        QrStatus::InvalidArgument => b"InvalidArgument\0",
        QrStatus::SolverFailure => b"SolverFailure\0",
        QrStatus::NotConverged => b"NotConverged\0",
        QrStatus::Unstable => b"Unstable\0",
        QrStatus::NearDegenerate => b"NearDegenerate\0",
        QrStatus::Panic => b"Panic\0",
    };
    name.as_ptr() as *const c_char
}

/// Validates and allocates a parameter handle.
///
/// # Safety
/// `out` must be a valid pointer to a `QrParams*` slot.
#[no_mangle]
pub unsafe extern "C" fn qr_params_new(
    omega: f64,
    qubit_splitting: f64,
    g2: f64,
    chi: f64,
    a4: f64,
    out: *mut *mut QrParams,
) -> QrStatus {
    guarded(|| {
        if out.is_null() {
            return invalid("out pointer is null");
        }
        match ModelParams::new(omega, qubit_splitting, g2, chi, a4) {
            Ok(inner) => {
                unsafe { *out = Box::into_raw(Box::new(QrParams { inner })) };
                QrStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Releases a parameter handle. Null is a no-op.
///
/// # Safety
/// `params` must be null or a pointer obtained from `qr_params_new` that has
/// not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn qr_params_free(params: *mut QrParams) {
    if !params.is_null() {
        drop(unsafe { Box::from_raw(params) });
    }
}

/// Collapse coupling g_T = ω / (2(1+χ)). Returns NaN on a null handle.
///
/// # Safety
/// `params` must be null or a live handle from `qr_params_new`.
#[no_mangle]
pub unsafe extern "C" fn qr_params_g_t(params: *const QrParams) -> f64 {
    match unsafe { params.as_ref() } {
        Some(p) => p.inner.g_t(),
        None => f64::NAN,
    }
}

/// Reduced quartic strength α₄ = A₄Ω/ω². Returns NaN on a null handle.
///
/// # Safety
/// `params` must be null or a live handle from `qr_params_new`.
#[no_mangle]
pub unsafe extern "C" fn qr_params_alpha4(params: *const QrParams) -> f64 {
    match unsafe { params.as_ref() } {
        Some(p) => p.inner.alpha4(),
        None => f64::NAN,
    }
}

unsafe fn spectrum_out(
    result: Result<SpectrumResult, Error>,
    out: *mut *mut QrSpectrum,
) -> QrStatus {
    match result {
        Ok(inner) => {
            unsafe { *out = Box::into_raw(Box::new(QrSpectrum { inner })) };
            QrStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Lowest `k` eigenpairs via the cutoff-doubling ladder; fails with
/// `NotConverged` if the ceiling is reached first.
///
/// # Safety
/// `params` must be a live handle; `out` must point to a `QrSpectrum*` slot.
#[no_mangle]
pub unsafe extern "C" fn qr_spectrum_converged(
    params: *const QrParams,
    k: usize,
    tol: f64,
    ceiling: usize,
    out: *mut *mut QrSpectrum,
) -> QrStatus {
    guarded(|| {
        let (p, slot) = match (unsafe { params.as_ref() }, out.is_null()) {
            (Some(p), false) => (p, out),
            _ => return invalid("params or out pointer is null"),
        };
        let result =
            converged_spectrum(&p.inner, k, tol, ceiling).and_then(|s| s.require_converged(tol));
        unsafe { spectrum_out(result, slot) }
    })
}

/// Lowest `k` eigenpairs at one fixed Fock cutoff, no convergence claim.
///
/// # Safety
/// `params` must be a live handle; `out` must point to a `QrSpectrum*` slot.
#[no_mangle]
pub unsafe extern "C" fn qr_spectrum_fixed(
    params: *const QrParams,
    cutoff: usize,
    k: usize,
    out: *mut *mut QrSpectrum,
) -> QrStatus {
    guarded(|| {
        let (p, slot) = match (unsafe { params.as_ref() }, out.is_null()) {
            (Some(p), false) => (p, out),
            _ => return invalid("params or out pointer is null"),
        };
        let result = FockSpinBasis::new(cutoff)
            .and_then(|basis| solve_spectrum(&p.inner, &basis, k));
        unsafe { spectrum_out(result, slot) }
    })
}

/// Releases a spectrum handle. Null is a no-op.
///
/// # Safety
/// `spectrum` must be null or a live handle produced by a spectrum call.
#[no_mangle]
pub unsafe extern "C" fn qr_spectrum_free(spectrum: *mut QrSpectrum) {
    if !spectrum.is_null() {
        drop(unsafe { Box::from_raw(spectrum) });
    }
}

/// Number of levels the handle carries. 0 on a null handle.
///
/// # Safety
/// `spectrum` must be null or a live spectrum handle.
#[no_mangle]
pub unsafe extern "C" fn qr_spectrum_level_count(spectrum: *const QrSpectrum) -> usize {
    match unsafe { spectrum.as_ref() } {
        Some(s) => s.inner.levels.len(),
        None => 0,
    }
}

/// Copies up to `len` levels (ascending) into `buf`; returns the number the
/// handle carries, which may exceed `len`.
///
/// # Safety
/// `spectrum` must be null or a live handle; `buf` must point to at least
/// `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qr_spectrum_levels(
    spectrum: *const QrSpectrum,
    buf: *mut f64,
    len: usize,
) -> usize {
    let s = match unsafe { spectrum.as_ref() } {
        Some(s) => s,
        None => return 0,
    };
    if !buf.is_null() {
        let n = s.inner.levels.len().min(len);
        unsafe { std::ptr::copy_nonoverlapping(s.inner.levels.as_ptr(), buf, n) };
    }
    s.inner.levels.len()
}

/// E₁ − E₀ from the full eigenvalue list. NaN on a null handle.
///
/// # Safety
/// `spectrum` must be null or a live spectrum handle.
#[no_mangle]
pub unsafe extern "C" fn qr_spectrum_gap(spectrum: *const QrSpectrum) -> f64 {
    match unsafe { spectrum.as_ref() } {
        Some(s) => s.inner.gap,
        None => f64::NAN,
    }
}

/// Fock cutoff of the final diagonalization. 0 on a null handle.
///
/// # Safety
/// `spectrum` must be null or a live spectrum handle.
#[no_mangle]
pub unsafe extern "C" fn qr_spectrum_cutoff(spectrum: *const QrSpectrum) -> usize {
    match unsafe { spectrum.as_ref() } {
        Some(s) => s.inner.cutoff,
        None => 0,
    }
}

/// Whether the doubling ladder met its tolerance (always false for
/// `qr_spectrum_fixed` results).
///
/// # Safety
/// `spectrum` must be null or a live spectrum handle.
#[no_mangle]
pub unsafe extern "C" fn qr_spectrum_is_converged(spectrum: *const QrSpectrum) -> bool {
    match unsafe { spectrum.as_ref() } {
        Some(s) => s.inner.converged,
        None => false,
    }
}

/// Copies up to `len` coefficients of eigenstate `index` (interleaved
/// spin-up/spin-down per Fock level) into `buf`; returns the state dimension,
/// or 0 if the handle or index is invalid.
///
/// # Safety
/// `spectrum` must be null or a live handle; `buf` must point to at least
/// `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qr_spectrum_state(
    spectrum: *const QrSpectrum,
    index: usize,
    buf: *mut f64,
    len: usize,
) -> usize {
    let s = match unsafe { spectrum.as_ref() } {
        Some(s) => s,
        None => return 0,
    };
    let state = match s.inner.states.get(index) {
        Some(state) => state,
        None => return 0,
    };
    if !buf.is_null() {
        let n = state.len().min(len);
        unsafe { std::ptr::copy_nonoverlapping(state.as_ptr(), buf, n) };
    }
    state.len()
}

fn with_state<T>(
    s: &QrSpectrum,
    index: usize,
    f: impl FnOnce(&[f64], &FockSpinBasis) -> Result<T, Error>,
) -> Result<T, Error> {
    let state = s
        .inner
        .states
        .get(index)
        .ok_or_else(|| Error::InvalidArgument(format!("no state at index {index}")))?;
    let basis = FockSpinBasis::new(s.inner.cutoff)?;
    f(state, &basis)
}

/// Photon-parity expectation of eigenstate `index`.
///
/// # Safety
/// `spectrum` must be a live handle; `out` must point to a writable double.
#[no_mangle]
pub unsafe extern "C" fn qr_spectrum_parity(
    spectrum: *const QrSpectrum,
    index: usize,
    out: *mut f64,
) -> QrStatus {
    guarded(|| {
        let (s, slot) = match (unsafe { spectrum.as_ref() }, out.is_null()) {
            (Some(s), false) => (s, out),
            _ => return invalid("spectrum or out pointer is null"),
        };
        match with_state(s, index, |state, basis| {
            quartic_rabi::model::parity_expectation(state, basis)
        }) {
            Ok(v) => {
                unsafe { *slot = v };
                QrStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// ⟨σx⟩ of eigenstate `index`.
///
/// # Safety
/// `spectrum` must be a live handle; `out` must point to a writable double.
#[no_mangle]
pub unsafe extern "C" fn qr_spectrum_sigma_x(
    spectrum: *const QrSpectrum,
    index: usize,
    out: *mut f64,
) -> QrStatus {
    guarded(|| {
        let (s, slot) = match (unsafe { spectrum.as_ref() }, out.is_null()) {
            (Some(s), false) => (s, out),
            _ => return invalid("spectrum or out pointer is null"),
        };
        match with_state(s, index, |state, basis| {
            wavefunction::observable_sigma_x(state, basis)
        }) {
            Ok(v) => {
                unsafe { *slot = v };
                QrStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// ⟨x̂²⟩ of eigenstate `index`.
///
/// # Safety
/// `spectrum` must be a live handle; `out` must point to a writable double.
#[no_mangle]
pub unsafe extern "C" fn qr_spectrum_x2(
    spectrum: *const QrSpectrum,
    index: usize,
    out: *mut f64,
) -> QrStatus {
    guarded(|| {
        let (s, slot) = match (unsafe { spectrum.as_ref() }, out.is_null()) {
            (Some(s), false) => (s, out),
            _ => return invalid("spectrum or out pointer is null"),
        };
        match with_state(s, index, |state, basis| {
            wavefunction::observable_x2(state, basis)
        }) {
            Ok(v) => {
                unsafe { *slot = v };
                QrStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Exact critical coupling ratio ḡ₂c(α₄) of the frozen-mode analysis.
///
/// # Safety
/// `out` must point to a writable double.
#[no_mangle]
pub unsafe extern "C" fn qr_critical_ratio_exact(alpha4: f64, out: *mut f64) -> QrStatus {
    guarded(|| {
        if out.is_null() {
            return invalid("out pointer is null");
        }
        match semiclassical::critical_ratio_exact(alpha4) {
            Ok(v) => {
                unsafe { *out = v };
                QrStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Weak-quartic expansion of the critical ratio.
///
/// # Safety
/// `out` must point to a writable double.
#[no_mangle]
pub unsafe extern "C" fn qr_critical_ratio_small(alpha4: f64, out: *mut f64) -> QrStatus {
    guarded(|| {
        if out.is_null() {
            return invalid("out pointer is null");
        }
        match semiclassical::critical_ratio_small(alpha4) {
            Ok(v) => {
                unsafe { *out = v };
                QrStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Strong-quartic expansion of the critical ratio.
///
/// # Safety
/// `out` must point to a writable double.
#[no_mangle]
pub unsafe extern "C" fn qr_critical_ratio_large(alpha4: f64, out: *mut f64) -> QrStatus {
    guarded(|| {
        if out.is_null() {
            return invalid("out pointer is null");
        }
        match semiclassical::critical_ratio_large(alpha4) {
            Ok(v) => {
                unsafe { *out = v };
                QrStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Minimizes the lower adiabatic branch. Any out pointer may be null to skip
/// that field.
///
/// # Safety
/// `params` must be a live handle; non-null out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn qr_minimize_branch(
    params: *const QrParams,
    x_min: *mut f64,
    energy_min: *mut f64,
    sigma_x_at_min: *mut f64,
    symmetric_phase: *mut bool,
) -> QrStatus {
    guarded(|| {
        let p = match unsafe { params.as_ref() } {
            Some(p) => p,
            None => return invalid("params pointer is null"),
        };
        match semiclassical::minimize_branch(&p.inner) {
            Ok(sol) => {
                unsafe {
                    if !x_min.is_null() {
                        *x_min = sol.x_min;
                    }
                    if !energy_min.is_null() {
                        *energy_min = sol.energy_min;
                    }
                    if !sigma_x_at_min.is_null() {
                        *sigma_x_at_min = sol.sigma_x_at_min;
                    }
                    if !symmetric_phase.is_null() {
                        *symmetric_phase = sol.symmetric_phase;
                    }
                }
                QrStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Ground-state quantum Fisher information with respect to g₂. Pass
/// `delta <= 0` to use the default step (1e-5 of the collapse coupling).
///
/// # Safety
/// `params` must be a live handle; `out` must point to a writable double.
#[no_mangle]
pub unsafe extern "C" fn qr_qfi(
    params: *const QrParams,
    delta: f64,
    tol: f64,
    ceiling: usize,
    out: *mut f64,
) -> QrStatus {
    guarded(|| {
        let (p, slot) = match (unsafe { params.as_ref() }, out.is_null()) {
            (Some(p), false) => (p, out),
            _ => return invalid("params or out pointer is null"),
        };
        let delta = if delta > 0.0 {
            delta
        } else {
            metrology::default_delta(&p.inner)
        };
        match metrology::qfi_at(&p.inner, metrology::Lambda::G2, delta, tol, ceiling) {
            Ok(v) => {
                unsafe { *slot = v };
                QrStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Locates the QFI peak for this parameter family (g₂ is scanned; the
/// handle's own g₂ is ignored). Pass `delta <= 0` for the default step.
///
/// # Safety
/// `params` must be a live handle; non-null out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn qr_qfi_peak(
    params: *const QrParams,
    delta: f64,
    tol: f64,
    ceiling: usize,
    g2_peak: *mut f64,
    fq_peak: *mut f64,
) -> QrStatus {
    guarded(|| {
        let p = match unsafe { params.as_ref() } {
            Some(p) => p,
            None => return invalid("params pointer is null"),
        };
        let delta = if delta > 0.0 {
            delta
        } else {
            metrology::default_delta(&p.inner)
        };
        match metrology::locate_qfi_peak(&p.inner, delta, tol, ceiling) {
            Ok(peak) => {
                unsafe {
                    if !g2_peak.is_null() {
                        *g2_peak = peak.g2_peak;
                    }
                    if !fq_peak.is_null() {
                        *fq_peak = peak.fq_peak;
                    }
                }
                QrStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Adiabatic preparation-time summary. Any out pointer may be null.
///
/// # Safety
/// `params` must be a live handle; non-null out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn qr_ptps(
    params: *const QrParams,
    tol: f64,
    ceiling: usize,
    time: *mut f64,
    g2c_omega: *mut f64,
    parity_crossing: *mut bool,
) -> QrStatus {
    guarded(|| {
        let p = match unsafe { params.as_ref() } {
            Some(p) => p,
            None => return invalid("params pointer is null"),
        };
        match ptps::ptps(&p.inner, tol, ceiling) {
            Ok(r) => {
                unsafe {
                    if !time.is_null() {
                        *time = r.time;
                    }
                    if !g2c_omega.is_null() {
                        *g2c_omega = r.g2c_omega;
                    }
                    if !parity_crossing.is_null() {
                        *parity_crossing = r.parity_crossing;
                    }
                }
                QrStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CStr;
    use std::ptr;

    fn make(omega: f64, splitting: f64, g2: f64, chi: f64, a4: f64) -> *mut QrParams {
        let mut p: *mut QrParams = ptr::null_mut();
        let status = unsafe { qr_params_new(omega, splitting, g2, chi, a4, &mut p) };
        assert_eq!(status, QrStatus::Ok);
        assert!(!p.is_null());
        p
    }

    fn last_error() -> String {
        unsafe { CStr::from_ptr(qr_last_error_message()) }
            .to_string_lossy()
            .into_owned()
    }

    #[test]
    fn params_life_cycle_and_derived_values() {
        let p = make(1.0, 1.0, 0.1, 1.0, 3e-4);
        unsafe {
            assert_eq!(qr_params_g_t(p), 0.25);
            assert!((qr_params_alpha4(p) - 3e-4).abs() < 1e-18);
            qr_params_free(p);
            qr_params_free(ptr::null_mut());
            assert!(qr_params_g_t(ptr::null()).is_nan());
        }
    }

    #[test]
    fn invalid_params_set_a_message() {
        let mut p: *mut QrParams = ptr::null_mut();
        let status = unsafe { qr_params_new(-1.0, 1.0, 0.0, 1.0, 0.0, &mut p) };
        assert_eq!(status, QrStatus::InvalidArgument);
        assert!(p.is_null());
        assert!(last_error().contains("frequency"));
    }

    #[test]
    fn converged_spectrum_round_trip() {
        let p = make(1.0, 1.0, 0.2, 1.0, 3e-4);
        let mut s: *mut QrSpectrum = ptr::null_mut();
        let status = unsafe { qr_spectrum_converged(p, 2, 1e-8, 2048, &mut s) };
        assert_eq!(status, QrStatus::Ok);
        unsafe {
            assert_eq!(qr_spectrum_level_count(s), 2);
            let mut levels = [0.0f64; 2];
            assert_eq!(qr_spectrum_levels(s, levels.as_mut_ptr(), 2), 2);
            assert!((levels[0] - -0.5781043034896709).abs() < 1e-6);
            assert!((qr_spectrum_gap(s) - (levels[1] - levels[0])).abs() < 1e-12);
            assert!(qr_spectrum_is_converged(s));
            assert!(qr_spectrum_cutoff(s) >= 64);

            let mut parity = 0.0;
            assert_eq!(qr_spectrum_parity(s, 0, &mut parity), QrStatus::Ok);
            assert!((parity.abs() - 1.0).abs() < 1e-8);
            let mut sx = 0.0;
            assert_eq!(qr_spectrum_sigma_x(s, 0, &mut sx), QrStatus::Ok);
            assert!((-1.0..=0.0).contains(&sx));
            let mut x2 = 0.0;
            assert_eq!(qr_spectrum_x2(s, 0, &mut x2), QrStatus::Ok);
            assert!(x2 > 0.0);

            let dim = qr_spectrum_state(s, 0, ptr::null_mut(), 0);
            assert!(dim >= 2 * 65);
            let mut state = vec![0.0f64; dim];
            assert_eq!(qr_spectrum_state(s, 0, state.as_mut_ptr(), dim), dim);
            let norm: f64 = state.iter().map(|c| c * c).sum();
            assert!((norm - 1.0).abs() < 1e-10);

            assert_eq!(qr_spectrum_state(s, 7, ptr::null_mut(), 0), 0);
            qr_spectrum_free(s);
            qr_spectrum_free(ptr::null_mut());
            qr_params_free(p);
        }
    }

    #[test]
    fn unstable_regime_maps_to_its_status() {
        let p = make(1.0, 1.0, 0.3, 1.0, 0.0);
        let mut s: *mut QrSpectrum = ptr::null_mut();
        let status = unsafe { qr_spectrum_converged(p, 1, 1e-8, 1024, &mut s) };
        assert_eq!(status, QrStatus::Unstable);
        assert!(s.is_null());
        assert!(last_error().contains("unstable"));
        unsafe { qr_params_free(p) };
    }

    #[test]
    fn fixed_cutoff_solve_reports_no_convergence_claim() {
        let p = make(1.0, 1.0, 0.0, 1.0, 0.0);
        let mut s: *mut QrSpectrum = ptr::null_mut();
        assert_eq!(unsafe { qr_spectrum_fixed(p, 64, 3, &mut s) }, QrStatus::Ok);
        unsafe {
            assert!(!qr_spectrum_is_converged(s));
            assert_eq!(qr_spectrum_cutoff(s), 64);
            let mut levels = [0.0f64; 3];
            qr_spectrum_levels(s, levels.as_mut_ptr(), 3);
            assert!((levels[0] - -0.5).abs() < 1e-10);
            qr_spectrum_free(s);
            qr_params_free(p);
        }
    }

    #[test]
    fn critical_ratio_functions_and_domains() {
        let mut v = 0.0;
        unsafe {
            assert_eq!(qr_critical_ratio_exact(1e-3, &mut v), QrStatus::Ok);
            assert!((v - 1.1753475208275995).abs() < 1e-12);
            assert_eq!(qr_critical_ratio_small(1e-3, &mut v), QrStatus::Ok);
            assert_eq!(qr_critical_ratio_large(1e-3, &mut v), QrStatus::Ok);
            assert_eq!(
                qr_critical_ratio_large(0.0, &mut v),
                QrStatus::InvalidArgument
            );
            assert_eq!(
                qr_critical_ratio_exact(1.0, ptr::null_mut()),
                QrStatus::InvalidArgument
            );
        }
    }

    #[test]
    fn branch_minimization_both_phases() {
        let p = make(1.0, 1.0, 0.2, 1.0, 3e-4);
        let (mut x, mut e, mut sx, mut sym) = (0.0, 0.0, 0.0, false);
        let status =
            unsafe { qr_minimize_branch(p, &mut x, &mut e, &mut sx, &mut sym) };
        assert_eq!(status, QrStatus::Ok);
        assert!(sym);
        assert_eq!(x, 0.0);
        assert!((e - -0.5).abs() < 1e-12);
        unsafe { qr_params_free(p) };

        let p = make(1.0, 1.0, 0.75, 1.0, 1e-3);
        let status =
            unsafe { qr_minimize_branch(p, &mut x, &mut e, &mut sx, &mut sym) };
        assert_eq!(status, QrStatus::Ok);
        assert!(!sym);
        assert!(x > 1.0);
        assert!(e < -0.5);
        assert!(sx < 0.0 && sx > -0.2);
        unsafe { qr_params_free(p) };
    }

    #[test]
    fn qfi_default_step_matches_explicit_default() {
        let p = make(1.0, 1.0, 0.2, 1.0, 3e-4);
        let (mut a, mut b) = (0.0, 0.0);
        unsafe {
            assert_eq!(qr_qfi(p, 0.0, 1e-8, 2048, &mut a), QrStatus::Ok);
            assert_eq!(qr_qfi(p, 2.5e-6, 1e-8, 2048, &mut b), QrStatus::Ok);
            qr_params_free(p);
        }
        assert!(a > 0.0);
        assert!(((a - b) / b).abs() < 1e-6, "a = {a}, b = {b}");
    }

    #[test]
    fn status_names_are_stable() {
        for (status, name) in [
            (QrStatus::Ok, "Ok"),
            (QrStatus::InvalidArgument, "InvalidArgument"),
            (QrStatus::SolverFailure, "SolverFailure"),
            (QrStatus::NotConverged, "NotConverged"),
            (QrStatus::Unstable, "Unstable"),
            (QrStatus::NearDegenerate, "NearDegenerate"),
            (QrStatus::Panic, "Panic"),
        ] {
            let s = unsafe { CStr::from_ptr(qr_status_name(status)) };
            assert_eq!(s.to_str().unwrap(), name);
        }
    }
}
