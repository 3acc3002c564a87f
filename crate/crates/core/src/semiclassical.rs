//! Frozen-mode (kinetic-energy-free) two-branch analysis: the lower branch
//! ε(x), its minimization, the closed-form critical coupling ratio with both
//! asymptotic expansions, and the ⟨σx⟩ phase diagram.
//!
//! Under x² = (Ω/ω)u the branch becomes ε = (Ω/2)[u + 8α₄u² − √(1+ḡ²u²)],
//! so the phase boundary in ḡ = g₂/g_T depends on α₄ = A₄Ω/ω² alone; the
//! ratio functions below live in that reduced parametrization.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::model::{effective_potential, ModelParams, Spin};
use crate::{Error, Result};

/// Outcome of minimizing the lower branch over x ≥ 0.
#[derive(Debug, Clone, Copy)]
pub struct SemiclassicalSolution {
    /// Minimizing displacement, ≥ 0 (the branch is even in x).
    pub x_min: f64,
    /// ε(x_min).
    pub energy_min: f64,
    /// ε(0) = −Ω/2.
    pub energy_origin: f64,
    /// ⟨σx⟩ of the 2×2 ground eigenvector at x_min; in [−1, 0] for Ω > 0.
    pub sigma_x_at_min: f64,
    /// True iff x_min = 0.
    pub symmetric_phase: bool,
}

/// Lower branch ε(x) = ½[ωx² + 8A₄x⁴ − √(Ω² + (g₂/g_T)²ω²x⁴)].
pub fn lower_branch(params: &ModelParams, x: f64) -> f64 {
    let gbar = params.coupling_ratio();
    let x2 = x * x;
    let x4 = x2 * x2;
    0.5 * (params.omega * x2 + 8.0 * params.a4 * x4
        - (params.splitting * params.splitting
            + gbar * gbar * params.omega * params.omega * x4)
            .sqrt())
}

/// ⟨σx⟩ of the ground eigenvector of [[e₊, Ω/2], [Ω/2, e₋]] at fixed x.
fn ground_sigma_x(params: &ModelParams, x: f64) -> f64 {
    let half_split = 0.5 * params.splitting;
    let d = 0.5
        * (effective_potential(params, Spin::Up, x)
            - effective_potential(params, Spin::Down, x));
    let r = (d * d + half_split * half_split).sqrt();
    if r == 0.0 {
        return 0.0; // fully degenerate 2×2; no preferred spin direction
    }
    // unnormalized ground eigenvector (Ω/2, −d − r)
    -params.splitting * (d + r) / (half_split * half_split + (d + r) * (d + r))
}

/// dε/dx with the trivial x = 0 factor removed; roots are the nonzero
/// stationary points. Positive everywhere when g₂ ≤ g_T.
fn reduced_slope(params: &ModelParams, x: f64) -> f64 {
    let gbar = params.coupling_ratio();
    let x2 = x * x;
    let gw_x2 = gbar * params.omega * x2;
    params.omega + 16.0 * params.a4 * x2
        - gbar * params.omega * gw_x2
            / (params.splitting * params.splitting + gw_x2 * gw_x2).sqrt()
}

const SCAN_POINTS: usize = 2000;
const BISECTIONS: usize = 40;

/// Global minimum of the lower branch over x ≥ 0: coarse scan of dε/dx sign
/// changes on [0, 3·x_flat] (x_flat from the Ω = 0 closed form), 40 bisection
/// steps per bracket. Energy ties against the origin resolve to the
/// symmetric phase.
pub fn minimize_branch(params: &ModelParams) -> Result<SemiclassicalSolution> {
    params.validate()?;
    let origin = -0.5 * params.splitting;
    let symmetric = SemiclassicalSolution {
        x_min: 0.0,
        energy_min: origin,
        energy_origin: origin,
        sigma_x_at_min: ground_sigma_x(params, 0.0),
        symmetric_phase: true,
    };
    let gbar = params.coupling_ratio();
    if gbar <= 1.0 {
        // dε/dx ≥ ω(1 − ḡ)x + 16A₄x³ > 0 for x > 0: the origin wins outright
        return Ok(symmetric);
    }
    if params.a4 == 0.0 {
        return Err(Error::Unstable { g2: params.g2, g_t: params.g_t() });
    }

    // all stationary points sit below the Ω = 0 well position
    let x_max = 3.0 * (params.omega * (gbar - 1.0) / (16.0 * params.a4)).sqrt();
    let mut best_x = 0.0f64;
    let mut best_e = origin;
    let mut prev_x = x_max / SCAN_POINTS as f64;
    let mut prev_s = reduced_slope(params, prev_x);
    for i in 2..=SCAN_POINTS {
        let x = x_max * i as f64 / SCAN_POINTS as f64;
        let s = reduced_slope(params, x);
        let root = if prev_s == 0.0 {
            Some(prev_x)
        } else if prev_s * s < 0.0 {
            let (mut lo, mut hi, mut s_lo) = (prev_x, x, prev_s);
            for _ in 0..BISECTIONS {
                let mid = 0.5 * (lo + hi);
                let sm = reduced_slope(params, mid);
                if sm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if sm.signum() == s_lo.signum() {
                    lo = mid;
                    s_lo = sm;
                } else {
                    hi = mid;
                }
            }
            Some(0.5 * (lo + hi))
        } else {
            None
        };
        if let Some(r) = root {
            let e = lower_branch(params, r);
            if e < best_e {
                best_e = e;
                best_x = r;
            }
        }
        prev_x = x;
        prev_s = s;
    }

    if best_x > 1e-6 && best_e < origin {
        Ok(SemiclassicalSolution {
            x_min: best_x,
            energy_min: best_e,
            energy_origin: origin,
            sigma_x_at_min: ground_sigma_x(params, best_x),
            symmetric_phase: false,
        })
    } else {
        Ok(symmetric)
    }
}

/// Closed-form critical ratio ḡ₂c(α₄) through the cubic resolvent:
/// √(2/3 + (1+432α₄)/(3f^{1/3}) + f^{1/3}/3 + 16α₄) with
/// f = 1080α₄ − 1 + 24(972α₄² + √(6α₄(54α₄−1)³)).
///
/// For 54α₄ < 1 the inner square root goes negative; both it and the cube
/// root are taken on the principal complex branch and the result must come
/// back real to |Im| < 1e-10.
pub fn critical_ratio_exact(alpha4: f64) -> Result<f64> {
    if !(alpha4 >= 0.0) || !alpha4.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "alpha4 must be non-negative and finite, got {alpha4}"
        )));
    }
    let a = alpha4;
    let inner = Complex64::new(6.0 * a * (54.0 * a - 1.0).powi(3), 0.0);
    let f = Complex64::new(1080.0 * a - 1.0, 0.0)
        + 24.0 * (Complex64::new(972.0 * a * a, 0.0) + inner.sqrt());
    let f3 = f.cbrt();
    let val = Complex64::new(2.0 / 3.0 + 16.0 * a, 0.0)
        + Complex64::new(1.0 + 432.0 * a, 0.0) / (3.0 * f3)
        + f3 / 3.0;
    if val.im.abs() > 1e-10 {
        return Err(Error::Solver(format!(
            "critical-ratio branch left an imaginary residue {:.3e} at alpha4 = {a}",
            val.im
        )));
    }
    if val.re < 0.0 {
        return Err(Error::Solver(format!(
            "critical-ratio radicand came out negative ({:.3e}) at alpha4 = {a}",
            val.re
        )));
    }
    Ok(val.re.sqrt())
}

/// Small-α₄ expansion √(1 + 8√(2α₄) + 24α₄).
pub fn critical_ratio_small(alpha4: f64) -> Result<f64> {
    if !(alpha4 >= 0.0) || !alpha4.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "alpha4 must be non-negative and finite, got {alpha4}"
        )));
    }
    Ok((1.0 + 8.0 * (2.0 * alpha4).sqrt() + 24.0 * alpha4).sqrt())
}

/// Large-α₄ expansion
/// √(2/3 + 16α₄ + 12α₄^{2/3} + 4α₄^{1/3} + α₄^{−1/3}/27 − α₄^{−2/3}/324).
pub fn critical_ratio_large(alpha4: f64) -> Result<f64> {
    if !(alpha4 > 0.0) || !alpha4.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "alpha4 must be positive and finite for the large-alpha4 form, got {alpha4}"
        )));
    }
    let c = alpha4.powf(1.0 / 3.0);
    Ok((2.0 / 3.0 + 16.0 * alpha4 + 12.0 * c * c + 4.0 * c + 1.0 / (27.0 * c)
        - 1.0 / (324.0 * c * c))
        .sqrt())
}

/// Critical ratio located by bisecting the symmetric/broken indicator of
/// `minimize_branch` in the reduced parametrization (ω = Ω = 1, where
/// a₄ = α₄ and g_T = 1/4). Shares no algebra with `critical_ratio_exact`.
pub fn boundary_ratio_numeric(alpha4: f64) -> Result<f64> {
    if !(alpha4 > 0.0) || !alpha4.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "alpha4 must be positive and finite for the numeric boundary, got {alpha4}"
        )));
    }
    let base = ModelParams::new(1.0, 1.0, 0.0, 1.0, alpha4)?;
    let g_t = base.g_t();
    let broken = |ratio: f64| -> Result<bool> {
        Ok(!minimize_branch(&base.with_g2(ratio * g_t))?.symmetric_phase)
    };
    let mut lo = 1.0f64; // never broken at or below g_T
    let mut hi = 2.0f64.max(1.5 * critical_ratio_small(alpha4)?);
    for _ in 0..60 {
        if broken(hi)? {
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    if !broken(hi)? {
        return Err(Error::Solver(format!(
            "no broken phase found below ratio {hi:.3e} at alpha4 = {alpha4}"
        )));
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if broken(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// ⟨σx⟩ density grid with the analytic boundary overlay.
#[derive(Debug, Clone)]
pub struct PhaseDiagram {
    pub a4_values: Vec<f64>,
    pub g2_values: Vec<f64>,
    /// sigma_x[i][j] is ⟨σx⟩ at (a4_values[i], g2_values[j]).
    pub sigma_x: Vec<Vec<f64>>,
    /// (a₄, ḡ₂c(α₄)·g_T) pairs for the same a₄ grid.
    pub boundary: Vec<(f64, f64)>,
}

/// Evaluate ⟨σx⟩ at the branch minimum over an (a₄, g₂) grid, with the
/// analytic critical coupling attached per a₄ row. Cell failures carry
/// their grid coordinates (row, then column within the row).
pub fn phase_diagram(
    omega: f64,
    splitting: f64,
    a4_grid: &[f64],
    g2_grid: &[f64],
) -> Result<PhaseDiagram> {
    for (name, grid) in [("a4", a4_grid), ("g2", g2_grid)] {
        if grid.is_empty() {
            return Err(Error::InvalidArgument(format!("{name} grid is empty")));
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!(
                "{name} grid must be strictly ascending"
            )));
        }
    }
    let rows: Vec<Result<(Vec<f64>, (f64, f64))>> = a4_grid
        .par_iter()
        .enumerate()
        .map(|(i, &a4)| {
            let row = || -> Result<(Vec<f64>, (f64, f64))> {
                let base = ModelParams::new(omega, splitting, 0.0, 1.0, a4)?;
                let mut sig = Vec::with_capacity(g2_grid.len());
                for (j, &g2) in g2_grid.iter().enumerate() {
                    let sol = minimize_branch(&base.with_g2(g2))
                        .map_err(|e| Error::at_point(j, g2, e))?;
                    sig.push(sol.sigma_x_at_min);
                }
                let g2c = critical_ratio_exact(base.alpha4())? * base.g_t();
                Ok((sig, (a4, g2c)))
            };
            row().map_err(|e| Error::at_point(i, a4, e))
        })
        .collect();
    let mut sigma_x = Vec::with_capacity(a4_grid.len());
    let mut boundary = Vec::with_capacity(a4_grid.len());
    for r in rows {
        let (sig, b) = r?;
        sigma_x.push(sig);
        boundary.push(b);
    }
    Ok(PhaseDiagram {
        a4_values: a4_grid.to_vec(),
        g2_values: g2_grid.to_vec(),
        sigma_x,
        boundary,
    })
}
