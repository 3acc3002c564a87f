//! Probe-state preparation time T = ∫₀¹ dḡ₂ / Δ(ḡ₂), with the coupling
//! rescaled by the QFI-peak location: ḡ₂ = g₂ / g_{2c,ω}.

use std::sync::Mutex;

use rayon::prelude::*;

use crate::metrology::{default_delta, locate_qfi_peak};
use crate::model::{parity_expectation, FockSpinBasis, ModelParams};
use crate::spectrum::converged_spectrum;
use crate::{Error, Result};

/// Preparation-time estimate and its quadrature diagnostics.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct PtpsResult {
    /// T, in inverse energy units.
    pub time: f64,
    /// QFI-peak coupling used to rescale the integration variable.
    pub g2c_omega: f64,
    /// Number of gap evaluations the quadrature consumed.
    pub quadrature_points: usize,
    /// Accumulated Richardson error bound of the quadrature alone (the gap
    /// values themselves carry the convergence tolerance of their solves).
    pub estimated_error: f64,
    /// True when the parity character of the first excited state flips
    /// somewhere along ḡ₂ ∈ [0, 1] — the integrand then switches between
    /// same-parity and opposite-parity gaps.
    pub parity_crossing: bool,
}

/// Adaptive-Simpson integral of 1/Δ over ḡ₂ ∈ [0, 1].
#[derive(Debug, Clone, Copy)]
pub struct QuadratureOutcome {
    pub value: f64,
    pub estimated_error: f64,
    pub evaluations: usize,
}

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    s: f64,
    depth: u32,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

const MAX_DEPTH: u32 = 24;

/// Adaptive Simpson quadrature of 1/gap(ḡ₂) over [0, 1].
///
/// Panels are refined breadth-first so each round's new nodes evaluate in
/// parallel; every node is visited exactly once. Acceptance is the standard
/// Richardson criterion with the budget tol·S₀ spread over panel length, and
/// the accepted panels carry their |S₂−S₁|/15 correction.
pub fn preparation_time<F>(gap: F, tol: f64) -> Result<QuadratureOutcome>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    if !(tol > 0.0 && tol <= 0.5) {
        return Err(Error::InvalidArgument(format!(
            "quadrature tolerance must be in (0, 0.5], got {tol}"
        )));
    }
    let f = |g: f64| -> Result<f64> { Ok(1.0 / gap(g)?) };
    let first: Vec<f64> = [0.0, 0.5, 1.0]
        .par_iter()
        .map(|&g| f(g))
        .collect::<Result<_>>()?;
    let (fa, fm, fb) = (first[0], first[1], first[2]);
    let s0 = simpson(0.0, 1.0, fa, fm, fb);
    if !(s0 > 0.0) || !s0.is_finite() {
        return Err(Error::Solver(format!(
            "initial integral estimate {s0:.3e} is not positive and finite"
        )));
    }
    let eps = tol * s0;
    let mut evaluations = 3usize;
    let mut total = 0.0f64;
    let mut err = 0.0f64;
    let mut active = vec![Panel { a: 0.0, b: 1.0, fa, fm, fb, s: s0, depth: 0 }];
    while !active.is_empty() {
        let quarters: Vec<f64> = active
            .iter()
            .flat_map(|p| {
                let m = 0.5 * (p.a + p.b);
                [0.5 * (p.a + m), 0.5 * (m + p.b)]
            })
            .collect();
        let values: Vec<f64> = quarters
            .par_iter()
            .map(|&g| f(g))
            .collect::<Result<_>>()?;
        evaluations += values.len();
        let mut next = Vec::new();
        for (i, p) in active.iter().enumerate() {
            let m = 0.5 * (p.a + p.b);
            let (flm, frm) = (values[2 * i], values[2 * i + 1]);
            let s_l = simpson(p.a, m, p.fa, flm, p.fm);
            let s_r = simpson(m, p.b, p.fm, frm, p.fb);
            let d = s_l + s_r - p.s;
            if d.abs() <= 15.0 * eps * (p.b - p.a) || p.depth >= MAX_DEPTH {
                total += s_l + s_r + d / 15.0;
                err += d.abs() / 15.0;
            } else {
                next.push(Panel {
                    a: p.a,
                    b: m,
                    fa: p.fa,
                    fm: flm,
                    fb: p.fm,
                    s: s_l,
                    depth: p.depth + 1,
                });
                next.push(Panel {
                    a: m,
                    b: p.b,
                    fa: p.fm,
                    fm: frm,
                    fb: p.fb,
                    s: s_r,
                    depth: p.depth + 1,
                });
            }
        }
        active = next;
    }
    if err > tol * total.abs() {
        return Err(Error::Solver(format!(
            "quadrature error bound {err:.3e} exceeds {tol:.1e} of the integral {total:.6e}"
        )));
    }
    Ok(QuadratureOutcome { value: total, estimated_error: err, evaluations })
}

/// Preparation time for one (ω, Ω, A₄) family: locate g_{2c,ω} from the QFI
/// peak, then integrate the inverse global gap along ḡ₂ ∈ [0, 1] with
/// per-node converged diagonalization.
///
/// Node spectra converge to the absolute drift 1e-3·min(ω, Ω) — near the
/// collapse coupling at A₄ = 0 the first excited level approaches a
/// continuum edge and tightens only geometrically, so an absolute, not
/// relative, target keeps the ladder finite there.
pub fn ptps(params: &ModelParams, tol: f64, ceiling: usize) -> Result<PtpsResult> {
    params.validate()?;
    if params.splitting <= 0.0 {
        return Err(Error::InvalidArgument(
            "preparation time needs a positive qubit splitting (the ḡ₂ = 0 gap is min(ω, Ω))"
                .into(),
        ));
    }
    let scale = params.omega.min(params.splitting);
    let peak = locate_qfi_peak(params, default_delta(params), 1e-9 * scale, ceiling)?;
    let g2c = peak.g2_peak;
    let node_tol = 1e-3 * scale;
    let floor = 1e-10 * params.splitting;
    let records: Mutex<Vec<(f64, f64)>> = Mutex::new(Vec::new());
    let gap_at = |gbar: f64| -> Result<f64> {
        let p = params.with_g2(gbar * g2c);
        let s = converged_spectrum(&p, 2, node_tol, ceiling)?.require_converged(node_tol)?;
        if s.gap < floor {
            return Err(Error::Solver(format!(
                "gap {:.3e} at ḡ₂ = {gbar:.6} fell below the floor {floor:.3e}",
                s.gap
            )));
        }
        let basis = FockSpinBasis::new(s.cutoff)?;
        let parity_product =
            parity_expectation(&s.states[0], &basis)? * parity_expectation(&s.states[1], &basis)?;
        records.lock().unwrap().push((gbar, parity_product));
        Ok(s.gap)
    };
    let quad = preparation_time(&gap_at, tol)?;
    let mut recs = records.into_inner().unwrap();
    recs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let parity_crossing = recs
        .windows(2)
        .any(|w| w[0].1.signum() != w[1].1.signum());
    Ok(PtpsResult {
        time: quad.value,
        g2c_omega: g2c,
        quadrature_points: quad.evaluations,
        estimated_error: quad.estimated_error,
        parity_crossing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::CUTOFF_CEILING;

    #[test]
    fn constant_gap_is_exact() {
        let q = preparation_time(|_| Ok(2.0), 1e-6).unwrap();
        assert!((q.value - 0.5).abs() < 1e-14);
        assert!(q.estimated_error < 1e-14);
        assert_eq!(q.evaluations, 5);
    }

    #[test]
    fn linear_gap_matches_the_logarithm() {
        let d0 = 0.35f64;
        let q = preparation_time(|g| Ok(d0 * (1.0 + g)), 1e-8).unwrap();
        let want = std::f64::consts::LN_2 / d0;
        assert!(((q.value - want) / want).abs() < 2e-8, "T = {}", q.value);
        assert!(q.estimated_error <= 1e-8 * q.value);
        // bracketed by the extreme gaps
        assert!(q.value >= 1.0 / (2.0 * d0) && q.value <= 1.0 / d0);
    }

    #[test]
    fn tightening_the_tolerance_barely_moves_the_value() {
        let gap = |g: f64| Ok(1.0 + g * g);
        let coarse = preparation_time(gap, 1e-4).unwrap();
        let fine = preparation_time(gap, 1e-8).unwrap();
        assert!(((coarse.value - fine.value) / fine.value).abs() < 1e-4);
        assert!(fine.evaluations >= coarse.evaluations);
    }

    #[test]
    fn node_failures_propagate() {
        let res = preparation_time(
            |g| {
                if g > 0.7 {
                    Err(Error::Solver("synthetic node failure".into()))
                } else {
                    Ok(1.0)
                }
            },
            1e-6,
        );
        assert!(matches!(res, Err(Error::Solver(_))));
        assert!(preparation_time(|_| Ok(1.0), 0.0).is_err());
        assert!(preparation_time(|_| Ok(1.0), 0.9).is_err());
    }

    #[test]
    fn moderate_quartic_family_has_order_unity_time() {
        let p = ModelParams::new(1.0, 1.0, 0.0, 1.0, 1e-3).unwrap();
        let r = ptps(&p, 1e-2, CUTOFF_CEILING).unwrap();
        assert!(
            r.time > 2.0 && r.time < 2.8,
            "T = {} (expected ≈ 2.4)",
            r.time
        );
        assert!((r.g2c_omega / 0.25 - 1.20).abs() < 0.04);
        assert!(r.estimated_error <= 1e-2 * r.time);
        assert!(r.quadrature_points >= 5);
    }

    #[test]
    fn rejects_zero_splitting() {
        let p = ModelParams::new(1.0, 0.0, 0.0, 1.0, 1e-3).unwrap();
        assert!(matches!(
            ptps(&p, 1e-2, CUTOFF_CEILING),
            Err(Error::InvalidArgument(_))
        ));
    }
}
