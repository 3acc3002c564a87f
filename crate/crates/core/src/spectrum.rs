//! Dense diagonalization with cutoff-doubling convergence control.

use faer::Side;
use rayon::prelude::*;

use crate::model::{build_hamiltonian, FockSpinBasis, ModelParams};
use crate::{Error, Result};

/// Cutoff the doubling ladder starts from.
pub const INITIAL_CUTOFF: usize = 64;
/// Default ceiling for the doubling ladder.
pub const CUTOFF_CEILING: usize = 4096;

/// Maximum |i − j| of a nonzero Hamiltonian entry in the flat basis:
/// photon offsets up to ±4 land at flat distance 8.
const FLAT_BANDWIDTH: usize = 8;

/// Lowest part of the spectrum at a fixed photon cutoff.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub params: ModelParams,
    pub cutoff: usize,
    /// k lowest eigenvalues, ascending.
    pub levels: Vec<f64>,
    /// Eigenvectors matching `levels`; each has its largest-magnitude
    /// component positive (first such index on ties).
    pub states: Vec<Vec<f64>>,
    /// E₁ − E₀ from the full eigenvalue list, regardless of k.
    pub gap: f64,
    /// Whether a doubling step moved the tracked levels by less than the
    /// requested tolerance. `solve_spectrum` leaves this false: a single
    /// fixed-cutoff solve asserts nothing about truncation error.
    pub converged: bool,
    /// Level drift across the last doubling (∞ when never assessed).
    pub convergence_delta: f64,
}

impl SpectrumResult {
    /// Promote an unconverged result into a hard error.
    pub fn require_converged(self, tol: f64) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged {
                cutoff: self.cutoff,
                delta: self.convergence_delta,
                tol,
            })
        }
    }
}

/// Diagonalize at a fixed cutoff and return the k lowest eigenpairs.
///
/// Every returned pair is validated: residual ‖Hv − Ev‖∞ ≤ 1e-8 · ‖H‖₂ and
/// pairwise orthonormality to 1e-10.
pub fn solve_spectrum(
    params: &ModelParams,
    basis: &FockSpinBasis,
    k: usize,
) -> Result<SpectrumResult> {
    let dim = basis.dim();
    if k == 0 || k > dim {
        return Err(Error::InvalidArgument(format!(
            "requested {k} levels from a dimension-{dim} basis"
        )));
    }
    let h = build_hamiltonian(params, basis)?;
    let evd = h
        .entries
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Solver(format!("eigendecomposition failed: {e:?}")))?;

    // defensive ascending order
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| evd.S()[a].total_cmp(&evd.S()[b]));
    let all: Vec<f64> = order.iter().map(|&i| evd.S()[i]).collect();
    let gap = all[1] - all[0];

    let levels = all[..k].to_vec();
    let mut states = Vec::with_capacity(k);
    for &col in &order[..k] {
        let mut v: Vec<f64> = (0..dim).map(|r| evd.U()[(r, col)]).collect();
        let mut pivot = 0usize;
        let mut best = 0.0f64;
        for (i, c) in v.iter().enumerate() {
            if c.abs() > best {
                best = c.abs();
                pivot = i;
            }
        }
        if v[pivot] < 0.0 {
            for c in &mut v {
                *c = -*c;
            }
        }
        states.push(v);
    }

    let spectral_norm = all[0].abs().max(all[dim - 1].abs());
    for (level, state) in levels.iter().zip(&states) {
        let mut worst = 0.0f64;
        for i in 0..dim {
            let lo = i.saturating_sub(FLAT_BANDWIDTH);
            let hi = (i + FLAT_BANDWIDTH).min(dim - 1);
            let mut acc = 0.0;
            for j in lo..=hi {
                acc += h.entries[(i, j)] * state[j];
            }
            worst = worst.max((acc - level * state[i]).abs());
        }
        if worst > 1e-8 * spectral_norm {
            return Err(Error::Solver(format!(
                "eigenpair residual {worst:.3e} exceeds 1e-8 × spectral norm {spectral_norm:.3e}"
            )));
        }
    }
    for i in 0..k {
        for j in i..k {
            let dot: f64 = states[i].iter().zip(&states[j]).map(|(a, b)| a * b).sum();
            let expect = if i == j { 1.0 } else { 0.0 };
            if (dot - expect).abs() > 1e-10 {
                return Err(Error::Solver(format!(
                    "eigenvectors {i},{j} not orthonormal: |⟨i|j⟩ − δ| = {:.3e}",
                    (dot - expect).abs()
                )));
            }
        }
    }

    Ok(SpectrumResult {
        params: *params,
        cutoff: basis.cutoff(),
        levels,
        states,
        gap,
        converged: false,
        convergence_delta: f64::INFINITY,
    })
}

/// Double the cutoff from 64 until the k tracked levels move by at most
/// `tol`, or the ceiling is reached (then `converged` is false and the
/// caller decides whether that is fatal).
///
/// The unstable regime a₄ = 0, g₂ > g_T is rejected up front: there the
/// spectrum is unbounded from below and no cutoff converges.
pub fn converged_spectrum(
    params: &ModelParams,
    k: usize,
    tol: f64,
    ceiling: usize,
) -> Result<SpectrumResult> {
    params.validate()?;
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "convergence tolerance must be positive and finite, got {tol}"
        )));
    }
    if ceiling < INITIAL_CUTOFF {
        return Err(Error::InvalidArgument(format!(
            "cutoff ceiling {ceiling} is below the initial cutoff {INITIAL_CUTOFF}"
        )));
    }
    if params.a4 == 0.0 && params.g2 > params.g_t() {
        return Err(Error::Unstable { g2: params.g2, g_t: params.g_t() });
    }

    let mut cutoff = INITIAL_CUTOFF;
    // k never exceeds the current dimension
    while 2 * (cutoff + 1) < k {
        cutoff *= 2;
    }
    if cutoff > ceiling {
        return Err(Error::InvalidArgument(format!(
            "requesting {k} levels needs a cutoff above the ceiling {ceiling}"
        )));
    }

    let mut prev = solve_spectrum(params, &FockSpinBasis::new(cutoff)?, k)?;
    while 2 * cutoff <= ceiling {
        cutoff *= 2;
        let mut next = solve_spectrum(params, &FockSpinBasis::new(cutoff)?, k)?;
        // numeric collapse net for floating-point edges of the upfront check:
        // with a₄ = 0 a bounded spectrum never drops E₀ this fast per doubling
        if params.a4 == 0.0 && next.levels[0] < prev.levels[0] - 10.0 * (1.0 + prev.levels[0].abs())
        {
            return Err(Error::Unstable { g2: params.g2, g_t: params.g_t() });
        }
        let delta = next
            .levels
            .iter()
            .zip(&prev.levels)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        next.convergence_delta = delta;
        if delta <= tol {
            next.converged = true;
            return Ok(next);
        }
        prev = next;
    }
    Ok(prev)
}

/// Ground-state gap Δ = E₁ − E₀ along a coupling grid. Strict: the first
/// point that fails to converge aborts the whole curve.
pub fn gap_curve(
    params: &ModelParams,
    g2_values: &[f64],
    tol: f64,
    ceiling: usize,
) -> Result<Vec<(f64, f64)>> {
    let outcomes: Vec<Result<(f64, f64)>> = g2_values
        .par_iter()
        .map(|&g2| {
            let s = converged_spectrum(&params.with_g2(g2), 2, tol, ceiling)?
                .require_converged(tol)?;
            Ok((g2, s.gap))
        })
        .collect();
    outcomes
        .into_iter()
        .enumerate()
        .map(|(i, r)| r.map_err(|e| Error::at_point(i, g2_values[i], e)))
        .collect()
}
