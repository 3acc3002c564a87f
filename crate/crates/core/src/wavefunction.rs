//! Position-space projection of Fock-basis eigenvectors and the ⟨σ̂x⟩, ⟨x̂²⟩
//! observables.

use rayon::prelude::*;

use crate::model::{FockSpinBasis, Spin};
use crate::{Error, Result};

/// Spin-resolved real wavefunction sampled on a grid.
#[derive(Debug, Clone)]
pub struct PositionWavefunction {
    pub x_grid: Vec<f64>,
    pub psi_plus: Vec<f64>,
    pub psi_minus: Vec<f64>,
    /// Trapezoidal quadrature of |ψ₊|² + |ψ₋|²; ≈ 1 when the grid holds the
    /// state.
    pub norm_check: f64,
}

fn check_normalized(state: &[f64], basis: &FockSpinBasis) -> Result<()> {
    if state.len() != basis.dim() {
        return Err(Error::InvalidArgument(format!(
            "state length {} does not match basis dimension {}",
            state.len(),
            basis.dim()
        )));
    }
    let norm2: f64 = state.iter().map(|c| c * c).sum();
    if (norm2.sqrt() - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidArgument(format!(
            "state is not normalized: |norm - 1| = {:.3e}",
            (norm2.sqrt() - 1.0).abs()
        )));
    }
    Ok(())
}

/// Unit-frequency oscillator eigenfunctions φ₀..φ_{n_max} at one point, by
/// the normalized recurrence φ_{n+1} = x√(2/(n+1))φ_n − √(n/(n+1))φ_{n−1}.
///
/// The iteration carries a shared power-of-two exponent: φ₀ = π^{−1/4}e^{−x²/2}
/// underflows past |x| ≈ 38 while high-n functions there are O(1), so plain
/// f64 seeding would silently zero the classically allowed region of large n.
fn oscillator_functions(x: f64, n_max: usize) -> Vec<f64> {
    let log_phi0 = -0.5 * x * x - 0.25 * std::f64::consts::PI.ln();
    let mut exp2 = (log_phi0 / std::f64::consts::LN_2).floor();
    let mut p = (log_phi0 - exp2 * std::f64::consts::LN_2).exp(); // in [1, 2)
    let mut p_prev = 0.0f64;
    let mut out = Vec::with_capacity(n_max + 1);
    let mut scale = if exp2 < -1060.0 { 0.0 } else { (2.0f64).powi(exp2 as i32) };
    for n in 0..=n_max {
        out.push(p * scale);
        let next = x * (2.0 / (n as f64 + 1.0)).sqrt() * p
            - (n as f64 / (n as f64 + 1.0)).sqrt() * p_prev;
        p_prev = p;
        p = next;
        if p.abs() > 1e150 {
            p *= 2.0f64.powi(-500);
            p_prev *= 2.0f64.powi(-500);
            exp2 += 500.0;
            scale = if exp2 < -1060.0 { 0.0 } else { (2.0f64).powi(exp2 as i32) };
        }
    }
    out
}

/// Uniform 1024-point grid over ±(√(2N+1) + 4): the classical turning point
/// of the highest retained Fock state plus tail margin.
pub fn default_position_grid(basis: &FockSpinBasis) -> Vec<f64> {
    let half = ((2 * basis.cutoff() + 1) as f64).sqrt() + 4.0;
    let n = 1024usize;
    (0..n)
        .map(|i| -half + 2.0 * half * i as f64 / (n - 1) as f64)
        .collect()
}

/// Project a normalized Fock ⊗ spin state onto the position grid:
/// ψ_σ(x) = Σ_n c_{n,σ} φ_n(x).
pub fn to_position(
    state: &[f64],
    basis: &FockSpinBasis,
    x_grid: &[f64],
) -> Result<PositionWavefunction> {
    check_normalized(state, basis)?;
    if x_grid.len() < 2 {
        return Err(Error::InvalidArgument(
            "position grid needs at least two points".into(),
        ));
    }
    if x_grid.iter().any(|x| !x.is_finite()) || x_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "position grid must be finite and strictly ascending".into(),
        ));
    }

    let n_max = basis.cutoff();
    let (psi_plus, psi_minus): (Vec<f64>, Vec<f64>) = x_grid
        .par_iter()
        .map(|&x| {
            let phis = oscillator_functions(x, n_max);
            let mut up = 0.0;
            let mut down = 0.0;
            for (n, phi) in phis.iter().enumerate() {
                up += state[2 * n] * phi;
                down += state[2 * n + 1] * phi;
            }
            (up, down)
        })
        .unzip();

    let density =
        |i: usize| psi_plus[i] * psi_plus[i] + psi_minus[i] * psi_minus[i];
    let mut norm_check = 0.0;
    for i in 0..x_grid.len() - 1 {
        norm_check += 0.5 * (density(i) + density(i + 1)) * (x_grid[i + 1] - x_grid[i]);
    }
    if norm_check < 0.999 {
        return Err(Error::InvalidArgument(format!(
            "position grid captures only {norm_check:.6} of the state norm; widen or refine it"
        )));
    }
    Ok(PositionWavefunction {
        x_grid: x_grid.to_vec(),
        psi_plus,
        psi_minus,
        norm_check,
    })
}

/// ⟨σ̂x⟩ = 2 Σ_n c_{n,+} c_{n,−}.
pub fn observable_sigma_x(state: &[f64], basis: &FockSpinBasis) -> Result<f64> {
    check_normalized(state, basis)?;
    Ok(2.0
        * (0..=basis.cutoff())
            .map(|n| state[basis.index(n, Spin::Up)] * state[basis.index(n, Spin::Down)])
            .sum::<f64>())
}

/// ⟨x̂²⟩ from the exact Fock-space matrix: diagonal n + 1/2, off-diagonal
/// √((n+1)(n+2))/2 coupling n ↔ n+2.
///
/// Logs a warning when the boundary weight |c_N|² exceeds 1e-8: truncation is
/// then contaminating the second moment.
pub fn observable_x2(state: &[f64], basis: &FockSpinBasis) -> Result<f64> {
    check_normalized(state, basis)?;
    let n_max = basis.cutoff();
    let boundary: f64 = state[2 * n_max] * state[2 * n_max]
        + state[2 * n_max + 1] * state[2 * n_max + 1];
    if boundary > 1e-8 {
        log::warn!(
            "boundary Fock weight {boundary:.3e} exceeds 1e-8; <x^2> is truncation-contaminated"
        );
    }
    let mut x2 = 0.0;
    for n in 0..=n_max {
        for spin in [Spin::Up, Spin::Down] {
            let c = state[basis.index(n, spin)];
            x2 += (n as f64 + 0.5) * c * c;
            if n + 2 <= n_max {
                x2 += (((n + 1) * (n + 2)) as f64).sqrt()
                    * c
                    * state[basis.index(n + 2, spin)];
            }
        }
    }
    Ok(x2)
}
