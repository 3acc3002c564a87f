/* C interface for the quartic-rabi solver. Generated by cbindgen; do not edit. */

#pragma once

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Outcome of a C-ABI call. Mirrors the library's error taxonomy.
typedef enum QrStatus {
  QR_STATUS_OK = 0,
  QR_STATUS_INVALID_ARGUMENT = 1,
  QR_STATUS_SOLVER_FAILURE = 2,
  QR_STATUS_NOT_CONVERGED = 3,
  QR_STATUS_UNSTABLE = 4,
  QR_STATUS_NEAR_DEGENERATE = 5,
  QR_STATUS_PANIC = 6,
} QrStatus;

// Opaque model-parameter handle.
typedef struct QrParams QrParams;

// Opaque spectrum handle: levels, states, gap, convergence metadata.
typedef struct QrSpectrum QrSpectrum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Last error message for this thread. Never null; empty before any failure.
// The pointer is invalidated by the next failing call on the same thread.
const char *qr_last_error_message(void);

// Static name of a status code (e.g. "NotConverged").
const char *qr_status_name(enum QrStatus status);

// Validates and allocates a parameter handle.
//
// # Safety
// `out` must be a valid pointer to a `QrParams*` slot.
enum QrStatus qr_params_new(double omega,
                            double qubit_splitting,
                            double g2,
                            double chi,
                            double a4,
                            struct QrParams **out);

// Releases a parameter handle. Null is a no-op.
//
// # Safety
// `params` must be null or a pointer obtained from `qr_params_new` that has
// not been freed yet.
void qr_params_free(struct QrParams *params);

// Collapse coupling g_T = ω / (2(1+χ)). Returns NaN on a null handle.
//
// # Safety
// `params` must be null or a live handle from `qr_params_new`.
double qr_params_g_t(const struct QrParams *params);

// Reduced quartic strength α₄ = A₄Ω/ω². Returns NaN on a null handle.
//
// # Safety
// `params` must be null or a live handle from `qr_params_new`.
double qr_params_alpha4(const struct QrParams *params);

// Lowest `k` eigenpairs via the cutoff-doubling ladder; fails with
// `NotConverged` if the ceiling is reached first.
//
// # Safety
// `params` must be a live handle; `out` must point to a `QrSpectrum*` slot.
enum QrStatus qr_spectrum_converged(const struct QrParams *params,
                                    size_t k,
                                    double tol,
                                    size_t ceiling,
                                    struct QrSpectrum **out);

// Lowest `k` eigenpairs at one fixed Fock cutoff, no convergence claim.
//
// # Safety
// `params` must be a live handle; `out` must point to a `QrSpectrum*` slot.
enum QrStatus qr_spectrum_fixed(const struct QrParams *params,
                                size_t cutoff,
                                size_t k,
                                struct QrSpectrum **out);

// Releases a spectrum handle. Null is a no-op.
//
// # Safety
// `spectrum` must be null or a live handle produced by a spectrum call.
void qr_spectrum_free(struct QrSpectrum *spectrum);

// Number of levels the handle carries. 0 on a null handle.
//
// # Safety
// `spectrum` must be null or a live spectrum handle.
size_t qr_spectrum_level_count(const struct QrSpectrum *spectrum);

// Copies up to `len` levels (ascending) into `buf`; returns the number the
// handle carries, which may exceed `len`.
//
// # Safety
// `spectrum` must be null or a live handle; `buf` must point to at least
// `len` writable doubles.
size_t qr_spectrum_levels(const struct QrSpectrum *spectrum, double *buf, size_t len);

// E₁ − E₀ from the full eigenvalue list. NaN on a null handle.
//
// # Safety
// `spectrum` must be null or a live spectrum handle.
double qr_spectrum_gap(const struct QrSpectrum *spectrum);

// Fock cutoff of the final diagonalization. 0 on a null handle.
//
// # Safety
// `spectrum` must be null or a live spectrum handle.
size_t qr_spectrum_cutoff(const struct QrSpectrum *spectrum);

// Whether the doubling ladder met its tolerance (always false for
// `qr_spectrum_fixed` results).
//
// # Safety
// `spectrum` must be null or a live spectrum handle.
bool qr_spectrum_is_converged(const struct QrSpectrum *spectrum);

// Copies up to `len` coefficients of eigenstate `index` (interleaved
// spin-up/spin-down per Fock level) into `buf`; returns the state dimension,
// or 0 if the handle or index is invalid.
//
// # Safety
// `spectrum` must be null or a live handle; `buf` must point to at least
// `len` writable doubles.
size_t qr_spectrum_state(const struct QrSpectrum *spectrum, size_t index, double *buf, size_t len);

// Photon-parity expectation of eigenstate `index`.
//
// # Safety
// `spectrum` must be a live handle; `out` must point to a writable double.
enum QrStatus qr_spectrum_parity(const struct QrSpectrum *spectrum, size_t index, double *out);

// ⟨σx⟩ of eigenstate `index`.
//
// # Safety
// `spectrum` must be a live handle; `out` must point to a writable double.
enum QrStatus qr_spectrum_sigma_x(const struct QrSpectrum *spectrum, size_t index, double *out);

// ⟨x̂²⟩ of eigenstate `index`.
//
// # Safety
// `spectrum` must be a live handle; `out` must point to a writable double.
enum QrStatus qr_spectrum_x2(const struct QrSpectrum *spectrum, size_t index, double *out);

// Exact critical coupling ratio ḡ₂c(α₄) of the frozen-mode analysis.
//
// # Safety
// `out` must point to a writable double.
enum QrStatus qr_critical_ratio_exact(double alpha4, double *out);

// Weak-quartic expansion of the critical ratio.
//
// # Safety
// `out` must point to a writable double.
enum QrStatus qr_critical_ratio_small(double alpha4, double *out);

// Strong-quartic expansion of the critical ratio.
//
// # Safety
// `out` must point to a writable double.
enum QrStatus qr_critical_ratio_large(double alpha4, double *out);

// Minimizes the lower adiabatic branch. Any out pointer may be null to skip
// that field.
//
// # Safety
// `params` must be a live handle; non-null out pointers must be writable.
enum QrStatus qr_minimize_branch(const struct QrParams *params,
                                 double *x_min,
                                 double *energy_min,
                                 double *sigma_x_at_min,
                                 bool *symmetric_phase);

// Ground-state quantum Fisher information with respect to g₂. Pass
// `delta <= 0` to use the default step (1e-5 of the collapse coupling).
//
// # Safety
// `params` must be a live handle; `out` must point to a writable double.
enum QrStatus qr_qfi(const struct QrParams *params,
                     double delta,
                     double tol,
                     size_t ceiling,
                     double *out);

// Locates the QFI peak for this parameter family (g₂ is scanned; the
// handle's own g₂ is ignored). Pass `delta <= 0` for the default step.
//
// # Safety
// `params` must be a live handle; non-null out pointers must be writable.
enum QrStatus qr_qfi_peak(const struct QrParams *params,
                          double delta,
                          double tol,
                          size_t ceiling,
                          double *g2_peak,
                          double *fq_peak);

// Adiabatic preparation-time summary. Any out pointer may be null.
//
// # Safety
// `params` must be a live handle; non-null out pointers must be writable.
enum QrStatus qr_ptps(const struct QrParams *params,
                      double tol,
                      size_t ceiling,
                      double *time,
                      double *g2c_omega,
                      bool *parity_crossing);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus
