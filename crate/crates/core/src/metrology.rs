//! Ground-state quantum Fisher information F_Q(λ), the fidelity
//! susceptibility cross-check, Cramér–Rao bounds, and the QFI-peak coupling
//! g_{2c,ω}.
//!
//! F_Q = 4[⟨∂λψ|∂λψ⟩ − |⟨∂λψ|ψ⟩|²] for a pure ground state; the tangent is a
//! central difference of eigenvectors diagonalized at a common cutoff so the
//! truncation error cancels between the endpoints. All eigenvectors are real,
//! so the second term must vanish up to differencing noise — that is checked,
//! not assumed.

use rayon::prelude::*;

use crate::model::{FockSpinBasis, ModelParams};
use crate::semiclassical::critical_ratio_exact;
use crate::spectrum::{converged_spectrum, solve_spectrum};
use crate::{Error, Result};

/// Parameter the QFI differentiates against. `G2` is the validated choice;
/// the others are plumbing with identical mechanics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lambda {
    G2,
    Omega,
    Splitting,
    A4,
}

impl Lambda {
    /// Current value of the swept parameter.
    pub fn value(self, p: &ModelParams) -> f64 {
        match self {
            Lambda::G2 => p.g2,
            Lambda::Omega => p.omega,
            Lambda::Splitting => p.splitting,
            Lambda::A4 => p.a4,
        }
    }

    fn displaced(self, p: &ModelParams, d: f64) -> Result<ModelParams> {
        let q = match self {
            Lambda::G2 => ModelParams { g2: p.g2 + d, ..*p },
            Lambda::Omega => ModelParams { omega: p.omega + d, ..*p },
            Lambda::Splitting => ModelParams { splitting: p.splitting + d, ..*p },
            Lambda::A4 => ModelParams { a4: p.a4 + d, ..*p },
        };
        q.validate()?;
        // fixed-cutoff endpoint solves bypass the ladder's stability gate
        if q.a4 == 0.0 && q.g2 > q.g_t() {
            return Err(Error::Unstable { g2: q.g2, g_t: q.g_t() });
        }
        Ok(q)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Align `state` to positive overlap with `reference`; returns the overlap
/// actually achieved.
fn align_sign(state: &mut [f64], reference: &[f64]) -> f64 {
    let ov = dot(state, reference);
    if ov < 0.0 {
        for c in state.iter_mut() {
            *c = -*c;
        }
        -ov
    } else {
        ov
    }
}

/// F_Q from a base state and two sign-unaligned endpoint states at λ ± δ.
///
/// Pure kernel shared by `qfi_at`; exposed so the differencing arithmetic is
/// testable against closed-form state families.
pub fn qfi_from_states(
    psi: &[f64],
    psi_plus: &[f64],
    psi_minus: &[f64],
    delta: f64,
) -> Result<f64> {
    if psi.len() != psi_plus.len() || psi.len() != psi_minus.len() {
        return Err(Error::InvalidArgument(
            "endpoint states must share the base state's dimension".into(),
        ));
    }
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "finite-difference step must be positive and finite, got {delta}"
        )));
    }
    let mut plus = psi_plus.to_vec();
    let mut minus = psi_minus.to_vec();
    align_sign(&mut plus, psi);
    align_sign(&mut minus, psi);
    let inv = 1.0 / (2.0 * delta);
    let tangent: Vec<f64> = plus
        .iter()
        .zip(&minus)
        .map(|(p, m)| (p - m) * inv)
        .collect();
    let first = dot(&tangent, &tangent);
    let overlap = dot(&tangent, psi);
    let second = overlap * overlap;
    // The differenced tangent picks up an O(δ²·F') projection onto the base
    // state; subtracting its square is exactly what the second term is for.
    // An order-unity projection relative to ⟨dψ|dψ⟩ cannot come from that
    // bias — it means sign alignment failed or the stencil crossed a
    // degeneracy, and no subtraction repairs those.
    if second > 1e-2 * first && second * delta * delta > 1e-24 {
        return Err(Error::Solver(format!(
            "tangent-state projection |<dψ|ψ>|² = {second:.3e} is not negligible \
             against <dψ|dψ> = {first:.3e}; differencing is unreliable here"
        )));
    }
    Ok(4.0 * (first - second))
}

/// Guard shared by the differencing operations: the pure-state QFI needs a
/// ground state that stays non-degenerate across the stencil.
fn degeneracy_guard(gap: f64, delta: f64, omega: f64) -> Result<()> {
    if gap < 100.0 * delta * omega {
        return Err(Error::NearDegenerate { gap, delta });
    }
    Ok(())
}

/// Ground-state QFI at one parameter point by central differencing with step
/// `delta`, at the cutoff the convergence ladder selects for the base point.
pub fn qfi_at(
    params: &ModelParams,
    lambda: Lambda,
    delta: f64,
    tol: f64,
    ceiling: usize,
) -> Result<f64> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "finite-difference step must be positive and finite, got {delta}"
        )));
    }
    let base = converged_spectrum(params, 1, tol, ceiling)?.require_converged(tol)?;
    degeneracy_guard(base.gap, delta, params.omega)?;
    let basis = FockSpinBasis::new(base.cutoff)?;
    let plus = solve_spectrum(&lambda.displaced(params, delta)?, &basis, 1)?;
    let minus = solve_spectrum(&lambda.displaced(params, -delta)?, &basis, 1)?;
    qfi_from_states(&base.states[0], &plus.states[0], &minus.states[0], delta)
}

/// Fidelity susceptibility χ_F = 2(1 − |⟨ψ(λ)|ψ(λ+δ)⟩|)/δ² with λ = g₂.
///
/// Forward-difference fidelity, no tangent construction: an independent
/// oracle for F_Q/4.
pub fn fidelity_susceptibility(
    params: &ModelParams,
    delta: f64,
    tol: f64,
    ceiling: usize,
) -> Result<f64> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "finite-difference step must be positive and finite, got {delta}"
        )));
    }
    let base = converged_spectrum(params, 1, tol, ceiling)?.require_converged(tol)?;
    degeneracy_guard(base.gap, delta, params.omega)?;
    let basis = FockSpinBasis::new(base.cutoff)?;
    let shifted = solve_spectrum(&Lambda::G2.displaced(params, delta)?, &basis, 1)?;
    let fidelity = dot(&base.states[0], &shifted.states[0]).abs();
    Ok(2.0 * (1.0 - fidelity) / (delta * delta))
}

/// QFI swept over a coupling grid, with the peak refined off-grid.
#[derive(Debug, Clone)]
pub struct QfiCurve {
    pub g2_grid: Vec<f64>,
    pub fq: Vec<f64>,
    pub chi_f: Vec<f64>,
    /// Cramér–Rao bounds F_Q^{−1/2}, pointwise.
    pub e_cr: Vec<f64>,
    /// Peak location g_{2c,ω}, golden-section refined between the grid
    /// neighbors of the discrete maximum.
    pub peak_g2: f64,
    pub peak_fq: f64,
    pub delta_lambda: f64,
}

fn golden_max(
    mut f: impl FnMut(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
    iters: usize,
) -> Result<(f64, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..iters {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc >= fd { (c, fc) } else { (d, fd) })
}

/// Golden-section refinement of a QFI maximum already bracketed by
/// `[lo, hi]` (λ = g₂). Returns `(g2_peak, fq_peak)`.
pub fn refine_peak(
    params: &ModelParams,
    lo: f64,
    hi: f64,
    delta: f64,
    tol: f64,
    ceiling: usize,
) -> Result<(f64, f64)> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidArgument(format!(
            "peak bracket [{lo}, {hi}] is not an ordered finite interval"
        )));
    }
    golden_max(
        |g2| qfi_at(&params.with_g2(g2), Lambda::G2, delta, tol, ceiling),
        lo,
        hi,
        32,
    )
}

/// Evaluate F_Q and χ_F across `g2_grid` (λ = g₂), enforce the 4χ_F = F_Q
/// identity pointwise, and refine the interior peak.
///
/// A discrete maximum on either grid endpoint is an error asking for a wider
/// grid — the refined peak would otherwise silently saturate the boundary.
pub fn qfi_curve(
    params: &ModelParams,
    g2_grid: &[f64],
    delta: f64,
    tol: f64,
    ceiling: usize,
) -> Result<QfiCurve> {
    if g2_grid.len() < 3 {
        return Err(Error::InvalidArgument(
            "QFI grid needs at least three points to bracket a peak".into(),
        ));
    }
    if g2_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "QFI grid must be strictly ascending".into(),
        ));
    }
    let points: Vec<Result<(f64, f64)>> = g2_grid
        .par_iter()
        .map(|&g2| {
            let p = params.with_g2(g2);
            let fq = qfi_at(&p, Lambda::G2, delta, tol, ceiling)?;
            let chi = fidelity_susceptibility(&p, delta, tol, ceiling)?;
            // The identity is only testable where the fidelity deficit
            // F·δ²/8 clears the eigensolver's overlap noise (~1e-15) by a
            // safe margin; below that χ_F is pure differencing noise.
            if fq * delta * delta > 1e-10 && ((fq - 4.0 * chi) / fq).abs() > 1e-3 {
                return Err(Error::Solver(format!(
                    "fidelity cross-check failed: F_Q = {fq:.6e} vs 4χ_F = {:.6e}",
                    4.0 * chi
                )));
            }
            Ok((fq, chi))
        })
        .collect();
    let mut fq = Vec::with_capacity(g2_grid.len());
    let mut chi_f = Vec::with_capacity(g2_grid.len());
    for (i, r) in points.into_iter().enumerate() {
        let (f, c) = r.map_err(|e| Error::at_point(i, g2_grid[i], e))?;
        fq.push(f);
        chi_f.push(c);
    }
    let imax = fq
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    if imax == 0 || imax == g2_grid.len() - 1 {
        return Err(Error::InvalidArgument(format!(
            "QFI maximum sits on the grid endpoint g2 = {}; widen the grid to bracket the peak",
            g2_grid[imax]
        )));
    }
    let (peak_g2, peak_fq) = golden_max(
        |g2| qfi_at(&params.with_g2(g2), Lambda::G2, delta, tol, ceiling),
        g2_grid[imax - 1],
        g2_grid[imax + 1],
        32,
    )?;
    let e_cr = fq.iter().map(|f| 1.0 / f.sqrt()).collect();
    Ok(QfiCurve {
        g2_grid: g2_grid.to_vec(),
        fq,
        chi_f,
        e_cr,
        peak_g2,
        peak_fq,
        delta_lambda: delta,
    })
}

/// QFI-peak location and height.
#[derive(Debug, Clone, Copy)]
pub struct QfiPeak {
    pub g2_peak: f64,
    pub fq_peak: f64,
}

/// Locate g_{2c,ω} without a user-supplied grid.
///
/// For A₄ > 0 the peak is bracketed on a grid spanning [0.85, 1.12] of the
/// frozen-mode critical coupling and refined by golden section. Grid points
/// rejected by the degeneracy guard bracket the peak from above — the
/// doublet only collapses past it — so the scan maximum may sit on the last
/// surviving point; it must still be interior to the window itself.
///
/// For A₄ = 0 the QFI grows monotonically up to the collapse coupling and
/// saturates at the boundary rather than peaking inside, so g_{2c,ω} := g_T
/// by convention and the height is measured just below it.
pub fn locate_qfi_peak(
    params: &ModelParams,
    delta: f64,
    tol: f64,
    ceiling: usize,
) -> Result<QfiPeak> {
    params.validate()?;
    let g_t = params.g_t();
    if params.a4 == 0.0 {
        let probe = params.with_g2(0.99999 * g_t);
        let fq_peak = qfi_at(&probe, Lambda::G2, delta, tol, ceiling)?;
        return Ok(QfiPeak { g2_peak: g_t, fq_peak });
    }
    let center = critical_ratio_exact(params.alpha4())? * g_t;
    let n = 19usize;
    let ratios: Vec<f64> = (0..n)
        .map(|i| 0.85 + (1.12 - 0.85) * i as f64 / (n - 1) as f64)
        .collect();
    let values: Vec<Option<f64>> = ratios
        .par_iter()
        .map(|r| {
            match qfi_at(&params.with_g2(r * center), Lambda::G2, delta, tol, ceiling) {
                Ok(v) => Ok(Some(v)),
                // points past the doublet collapse are not peak candidates
                Err(Error::NearDegenerate { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    let valid: Vec<(usize, f64)> = values
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|v| (i, v)))
        .collect();
    if valid.len() < 3 {
        return Err(Error::Solver(
            "fewer than three scan points survive the degeneracy guard; \
             reduce the differencing step"
                .into(),
        ));
    }
    let k = valid
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(k, _)| k)
        .unwrap();
    let raw = valid[k].0;
    if k == 0 || raw == 0 || raw == n - 1 {
        return Err(Error::Solver(format!(
            "QFI scan maximum is not bracketed (peak at ratio {:.3} of the \
             frozen-mode boundary)",
            ratios[raw]
        )));
    }
    // The upper bracket is the next surviving point, or — when the scan
    // maximum is the last survivor — the first guard-rejected point above
    // it: the doublet has already collapsed there, which only happens past
    // the peak.
    let lo = ratios[valid[k - 1].0] * center;
    let hi = if k < valid.len() - 1 {
        ratios[valid[k + 1].0] * center
    } else {
        ratios[raw + 1] * center
    };
    let (g2_peak, fq_peak) = golden_max(
        |g2| match qfi_at(&params.with_g2(g2), Lambda::G2, delta, tol, ceiling) {
            // past the doublet collapse: below any physical maximum
            Err(Error::NearDegenerate { .. }) => Ok(0.0),
            other => other,
        },
        lo,
        hi,
        28,
    )?;
    if fq_peak <= 0.0 {
        return Err(Error::Solver(
            "QFI refinement found no usable point inside the bracket".into(),
        ));
    }
    Ok(QfiPeak { g2_peak, fq_peak })
}

/// Default differencing step: 1e-5 · g_T.
pub fn default_delta(params: &ModelParams) -> f64 {
    1e-5 * params.g_t()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::CUTOFF_CEILING;

    fn params(omega: f64, splitting: f64, g2: f64, a4: f64) -> ModelParams {
        ModelParams::new(omega, splitting, g2, 1.0, a4).unwrap()
    }

    #[test]
    fn synthetic_rotation_family_gives_four() {
        // ψ(λ) = (cos λ, sin λ): F_Q = 4 (sin δ / δ)², ⟨ψ'|ψ⟩ = 0 exactly
        let lam = 0.3f64;
        let delta = 1e-3f64;
        let psi = [lam.cos(), lam.sin()];
        let plus = [(lam + delta).cos(), (lam + delta).sin()];
        let minus = [(lam - delta).cos(), (lam - delta).sin()];
        let want = 4.0 * (delta.sin() / delta).powi(2);
        let fq = qfi_from_states(&psi, &plus, &minus, delta).unwrap();
        assert!((fq - want).abs() < 1e-12);

        // gauge robustness: a flipped endpoint sign must not matter
        let flipped = [-plus[0], -plus[1]];
        let fq2 = qfi_from_states(&psi, &flipped, &minus, delta).unwrap();
        assert_eq!(fq, fq2);
    }

    #[test]
    fn lambda_independent_state_has_zero_information() {
        // g₂ = A₄ = 0: the ground state |0⟩ ⊗ |−x⟩ does not move with Ω
        let p = params(1.0, 1.0, 0.0, 0.0);
        let fq = qfi_at(&p, Lambda::Splitting, 1e-5, 1e-10, CUTOFF_CEILING).unwrap();
        assert!(fq.abs() < 1e-8, "fq = {fq}");
    }

    #[test]
    fn matches_fixed_cutoff_reference_value() {
        // frozen protocol: converge at λ, diagonalize λ±δ at the same cutoff
        let delta = 2.5e-6;
        let p = params(1.0, 1.0, 0.25, 3e-4);
        let basis = FockSpinBasis::new(512).unwrap();
        let base = solve_spectrum(&p, &basis, 1).unwrap();
        let plus = solve_spectrum(&p.with_g2(0.25 + delta), &basis, 1).unwrap();
        let minus = solve_spectrum(&p.with_g2(0.25 - delta), &basis, 1).unwrap();
        let fq =
            qfi_from_states(&base.states[0], &plus.states[0], &minus.states[0], delta).unwrap();
        // Differencing divides per-component eigenvector noise by 2δ, so two
        // different eigensolvers agree on F_Q only to ~ε‖H‖/(gap·δ) relative.
        assert!(
            ((fq - 284.42122057880169) / 284.42122057880169).abs() < 1e-6,
            "fq = {fq}"
        );

        // the ladder-driven operation lands on the same plateau
        let auto = qfi_at(&p, Lambda::G2, delta, 1e-9, CUTOFF_CEILING).unwrap();
        assert!(((auto - fq) / fq).abs() < 1e-3, "auto = {auto}, fixed = {fq}");

        // step-size plateau: δ and δ/2 agree
        let half = qfi_at(&p, Lambda::G2, delta / 2.0, 1e-9, CUTOFF_CEILING).unwrap();
        assert!(((half - auto) / auto).abs() < 1e-3);
    }

    #[test]
    fn fidelity_oracle_matches_qfi() {
        let delta = 2.5e-6;
        let p = params(1.0, 1.0, 0.25, 3e-4);
        let fq = qfi_at(&p, Lambda::G2, delta, 1e-9, CUTOFF_CEILING).unwrap();
        let chi = fidelity_susceptibility(&p, delta, 1e-9, CUTOFF_CEILING).unwrap();
        assert!(
            ((fq - 4.0 * chi) / fq).abs() < 1e-3,
            "fq = {fq}, 4chi = {}",
            4.0 * chi
        );
    }

    #[test]
    fn degenerate_doublet_is_guarded() {
        // deep in the broken phase the doublet gap is machine zero
        let p = params(1.0, 1.0, 0.3, 1e-4);
        match qfi_at(&p, Lambda::G2, 1e-6, 1e-9, CUTOFF_CEILING) {
            Err(Error::NearDegenerate { gap, delta }) => {
                assert!(gap < 100.0 * delta);
            }
            other => panic!("expected the degeneracy guard, got {other:?}"),
        }
        assert_eq!(
            qfi_at(&p, Lambda::G2, 1e-6, 1e-9, CUTOFF_CEILING)
                .unwrap_err()
                .exit_code(),
            3
        );
    }

    #[test]
    fn displacement_cannot_cross_into_the_unstable_regime() {
        let p = params(1.0, 1.0, 0.25, 0.0); // exactly at g_T
        match qfi_at(&p, Lambda::G2, 1e-5, 1e-8, CUTOFF_CEILING) {
            Err(Error::Unstable { .. }) => {}
            other => panic!("expected instability at g_T + δ, got {other:?}"),
        }
        // negative displacement must not produce negative couplings
        let q = params(1.0, 1.0, 0.0, 1e-4);
        assert!(qfi_at(&q, Lambda::G2, 1e-5, 1e-8, CUTOFF_CEILING).is_err());
    }

    #[test]
    fn curve_finds_the_interior_peak() {
        let p = params(1.0, 1.0, 0.0, 1e-3);
        let delta = 2.5e-6;
        let grid = [1.08 * 0.25, 1.14 * 0.25, 1.20 * 0.25, 1.26 * 0.25];
        // 4 points cannot bracket in general; use 5 with the known shape
        let grid5 = [1.02 * 0.25, grid[0], grid[1], grid[2], grid[3]];
        let curve = qfi_curve(&p, &grid5, delta, 1e-8, CUTOFF_CEILING).unwrap();
        assert!((curve.peak_g2 / 0.25 - 1.20).abs() < 0.04, "peak at {}", curve.peak_g2);
        assert!(curve.peak_fq > 6000.0 && curve.peak_fq < 7500.0, "peak fq {}", curve.peak_fq);
        for (f, e) in curve.fq.iter().zip(&curve.e_cr) {
            assert!(*f >= 0.0);
            assert_eq!(*e, 1.0 / f.sqrt());
        }
        for (f, c) in curve.fq.iter().zip(&curve.chi_f) {
            assert!((f - 4.0 * c).abs() <= 1e-3 * f);
        }
        // E_CR dips at the peak
        let imax = 3;
        assert!(curve.e_cr[imax] < curve.e_cr[1]);
        assert!(curve.e_cr[imax] < curve.e_cr[4]);
    }

    #[test]
    fn endpoint_peak_is_rejected() {
        // monotonically rising stretch well below the transition
        let p = params(1.0, 1.0, 0.0, 1e-3);
        let grid = [0.80 * 0.25, 0.88 * 0.25, 0.96 * 0.25];
        match qfi_curve(&p, &grid, 2.5e-6, 1e-8, CUTOFF_CEILING) {
            Err(Error::InvalidArgument(msg)) => assert!(msg.contains("widen")),
            other => panic!("expected an endpoint rejection, got {other:?}"),
        }
    }

    #[test]
    fn peak_locator_with_and_without_the_quartic_term() {
        let with = locate_qfi_peak(
            &params(1.0, 1.0, 0.0, 1e-3),
            2.5e-7,
            1e-8,
            CUTOFF_CEILING,
        )
        .unwrap();
        assert!((with.g2_peak / 0.25 - 1.20).abs() < 0.04, "peak at {}", with.g2_peak);
        assert!(with.fq_peak > 6000.0 && with.fq_peak < 7500.0);

        let without = locate_qfi_peak(
            &params(1.0, 1.0, 0.0, 0.0),
            2.5e-7,
            1e-8,
            CUTOFF_CEILING,
        )
        .unwrap();
        assert_eq!(without.g2_peak, 0.25); // boundary convention
        assert!(without.fq_peak > 1000.0);
    }

    #[test]
    fn rejects_bad_steps_and_grids() {
        let p = params(1.0, 1.0, 0.2, 1e-3);
        assert!(qfi_at(&p, Lambda::G2, 0.0, 1e-8, CUTOFF_CEILING).is_err());
        assert!(qfi_at(&p, Lambda::G2, -1e-6, 1e-8, CUTOFF_CEILING).is_err());
        assert!(qfi_curve(&p, &[0.1, 0.2], 1e-6, 1e-8, CUTOFF_CEILING).is_err());
        assert!(qfi_curve(&p, &[0.2, 0.1, 0.3], 1e-6, 1e-8, CUTOFF_CEILING).is_err());
    }
}
