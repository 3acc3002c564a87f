//! Model parameters and Hamiltonian construction in the truncated
//! Fock ⊗ spin basis.
//!
//! Basis ordering is part of the external contract: index = 2n + s with
//! photon number n major and spin s minor, s = 0 ↔ σz = +1, s = 1 ↔ σz = −1.

use faer::Mat;

use crate::{Error, Result};

/// Physical parameters of the stabilized two-photon model.
///
/// Derived quantities (`g_t`, `alpha4`) are always recomputed from the
/// stored fields so they can never go stale.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ModelParams {
    /// Mode frequency ω (energy units, > 0).
    pub omega: f64,
    /// Qubit splitting Ω (energy units, ≥ 0).
    pub splitting: f64,
    /// Two-photon coupling g₂ (energy units, ≥ 0).
    pub g2: f64,
    /// Stark-like coefficient χ in the coupling (a†)² + a² + χ(2a†a+1).
    pub chi: f64,
    /// Quartic coefficient A₄ (energy units, ≥ 0).
    pub a4: f64,
}

impl ModelParams {
    pub fn new(omega: f64, splitting: f64, g2: f64, chi: f64, a4: f64) -> Result<Self> {
        let p = ModelParams { omega, splitting, g2, chi, a4 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0) || !self.omega.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "mode frequency must be positive and finite, got {}",
                self.omega
            )));
        }
        for (name, v) in [("splitting", self.splitting), ("g2", self.g2), ("a4", self.a4)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be non-negative and finite, got {v}"
                )));
            }
        }
        if !self.chi.is_finite() || self.chi <= -1.0 {
            return Err(Error::InvalidArgument(format!(
                "chi must be finite and > -1, got {}",
                self.chi
            )));
        }
        Ok(())
    }

    /// Collapse coupling g_T = ω / (2(1+χ)).
    pub fn g_t(&self) -> f64 {
        self.omega / (2.0 * (1.0 + self.chi))
    }

    /// Dimensionless quartic strength α₄ = A₄ Ω / ω².
    pub fn alpha4(&self) -> f64 {
        self.a4 * self.splitting / (self.omega * self.omega)
    }

    /// Coupling ratio ḡ = g₂ / g_T.
    pub fn coupling_ratio(&self) -> f64 {
        self.g2 / self.g_t()
    }

    pub fn with_g2(&self, g2: f64) -> Self {
        ModelParams { g2, ..*self }
    }
}

/// Spin label along z: `Up` ↔ σz = +1, `Down` ↔ σz = −1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn sign(self) -> f64 {
        match self {
            Spin::Up => 1.0,
            Spin::Down => -1.0,
        }
    }

    fn offset(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }
}

/// Truncated Fock space (photon numbers 0..=cutoff) tensored with the spin.
///
/// Operator powers are formed at `aux_cutoff = cutoff + 4` and truncated,
/// so every retained matrix element of (a†+a)² and (a†+a)⁴ is exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockSpinBasis {
    cutoff: usize,
    aux_cutoff: usize,
}

impl FockSpinBasis {
    pub fn new(cutoff: usize) -> Result<Self> {
        if cutoff < 4 {
            return Err(Error::InvalidArgument(format!(
                "photon cutoff must be at least 4, got {cutoff}"
            )));
        }
        Ok(FockSpinBasis { cutoff, aux_cutoff: cutoff + 4 })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn aux_cutoff(&self) -> usize {
        self.aux_cutoff
    }

    /// Full dimension 2(cutoff+1).
    pub fn dim(&self) -> usize {
        2 * (self.cutoff + 1)
    }

    /// Flat index of |n, σ⟩.
    pub fn index(&self, n: usize, spin: Spin) -> usize {
        debug_assert!(n <= self.cutoff);
        2 * n + spin.offset()
    }
}

/// Real symmetric Hamiltonian matrix; symmetry is exact by mirrored fill.
#[derive(Debug, Clone)]
pub struct HamiltonianMatrix {
    pub dim: usize,
    pub entries: Mat<f64>,
}

/// B = A², restricted to the band |i−j| ≤ 2·bw that A² can populate when A
/// has bandwidth bw. Identical to a dense product for banded A, at O(n·bw²).
fn band_square(a: &Mat<f64>, bw: usize, n: usize) -> Mat<f64> {
    let mut b = Mat::<f64>::zeros(n, n);
    for i in 0..n {
        let jmax = (i + 2 * bw).min(n - 1);
        for j in i..=jmax {
            let klo = i.saturating_sub(bw).max(j.saturating_sub(bw));
            let khi = (i + bw).min(j + bw).min(n - 1);
            let mut acc = 0.0;
            for k in klo..=khi {
                acc += a[(i, k)] * a[(k, j)];
            }
            b[(i, j)] = acc;
            b[(j, i)] = acc;
        }
    }
    b
}

/// Matrix of H = ω a†a + (Ω/2)σx + g₂ σz [(a†)²+a²+χ(2a†a+1)] + A₄ (a†+a)⁴
/// in the (n, σz) basis.
pub fn build_hamiltonian(params: &ModelParams, basis: &FockSpinBasis) -> Result<HamiltonianMatrix> {
    params.validate()?;
    let n_ph = basis.cutoff() + 1; // retained photon states
    let m_ph = basis.aux_cutoff() + 1;

    // x = a† + a at the enlarged cutoff; bandwidth 1.
    let mut x = Mat::<f64>::zeros(m_ph, m_ph);
    for n in 0..m_ph - 1 {
        let v = ((n + 1) as f64).sqrt();
        x[(n, n + 1)] = v;
        x[(n + 1, n)] = v;
    }
    let x2 = band_square(&x, 1, m_ph); // bandwidth 2
    let x4 = band_square(&x2, 2, m_ph); // bandwidth 4

    // Coupling operator (a†)² + a² + χ(2a†a+1) = x² + (χ−1)(2a†a+1).
    let q_diag = |n: usize| (params.chi - 1.0) * (2.0 * n as f64 + 1.0);

    let dim = basis.dim();
    let mut h = Mat::<f64>::zeros(dim, dim);
    let half_split = params.splitting / 2.0;
    for n in 0..n_ph {
        // photon-diagonal spin flip
        h[(2 * n, 2 * n + 1)] = half_split;
        for spin in [Spin::Up, Spin::Down] {
            let i = basis.index(n, spin);
            let sz = spin.sign();
            // upper triangle in the photon index; |m−n| ≤ 4 suffices
            for m in n..(n + 5).min(n_ph) {
                let j = basis.index(m, spin);
                let mut v = params.g2 * sz * x2[(n, m)] + params.a4 * x4[(n, m)];
                if m == n {
                    v += params.omega * n as f64 + params.g2 * sz * q_diag(n);
                }
                h[(i, j)] = v;
            }
        }
    }
    // mirror: symmetry holds exactly, not just to rounding
    for i in 0..dim {
        for j in i + 1..dim {
            h[(j, i)] = h[(i, j)];
        }
    }
    Ok(HamiltonianMatrix { dim, entries: h })
}

/// Spin-dependent effective potential v_±(x) = (ω/2)(1 ± g₂/g_T)x² + 4A₄x⁴.
pub fn effective_potential(params: &ModelParams, spin: Spin, x: f64) -> f64 {
    let x2 = x * x;
    0.5 * params.omega * (1.0 + spin.sign() * params.coupling_ratio()) * x2
        + 4.0 * params.a4 * x2 * x2
}

/// Effective mass m_± = [1 ∓ ((1−χ)/(1+χ))(g₂/g_T)]⁻¹ of the
/// single-particle picture. Equals 1 for either spin at χ = 1.
pub fn effective_mass(params: &ModelParams, spin: Spin) -> f64 {
    let skew = (1.0 - params.chi) / (1.0 + params.chi);
    1.0 / (1.0 - spin.sign() * skew * params.coupling_ratio())
}

/// Photon-parity expectation ⟨e^{iπ a†a}⟩ = Σ_{n,σ} (−1)ⁿ |c_{n,σ}|².
///
/// For a non-degenerate eigenstate of the (parity-conserving) Hamiltonian
/// this is ±1 up to numerical noise.
pub fn parity_expectation(state: &[f64], basis: &FockSpinBasis) -> Result<f64> {
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
    let mut p = 0.0;
    for n in 0..=basis.cutoff() {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let cu = state[2 * n];
        let cd = state[2 * n + 1];
        p += sign * (cu * cu + cd * cd);
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mat_max_abs_diff(a: &Mat<f64>, b: &Mat<f64>) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                d = d.max((a[(i, j)] - b[(i, j)]).abs());
            }
        }
        d
    }

    #[test]
    fn rejects_bad_params() {
        assert!(ModelParams::new(0.0, 1.0, 0.0, 1.0, 0.0).is_err());
        assert!(ModelParams::new(-1.0, 1.0, 0.0, 1.0, 0.0).is_err());
        assert!(ModelParams::new(1.0, -0.5, 0.0, 1.0, 0.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, -0.1, 1.0, 0.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, 0.0, 1.0, -1e-9).is_err());
        assert!(ModelParams::new(1.0, 1.0, 0.0, -1.0, 0.0).is_err());
        assert!(ModelParams::new(f64::NAN, 1.0, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn derived_quantities() {
        let p = ModelParams::new(1.0, 1.0, 0.2, 1.0, 3e-4).unwrap();
        assert_eq!(p.g_t(), 0.25);
        assert_eq!(p.alpha4(), 3e-4);
        assert!((p.coupling_ratio() - 0.8).abs() < 1e-15);
        let q = ModelParams::new(0.05, 1.0, 0.0, 1.0, 5e-5).unwrap();
        assert!((q.alpha4() - 0.02).abs() < 1e-15);
    }

    #[test]
    fn basis_bookkeeping() {
        assert!(FockSpinBasis::new(3).is_err());
        let b = FockSpinBasis::new(40).unwrap();
        assert_eq!(b.dim(), 82);
        assert_eq!(b.aux_cutoff(), 44);
        assert_eq!(b.index(0, Spin::Up), 0);
        assert_eq!(b.index(0, Spin::Down), 1);
        assert_eq!(b.index(5, Spin::Up), 10);
    }

    #[test]
    fn hamiltonian_exactly_symmetric() {
        let p = ModelParams::new(1.0, 0.7, 0.21, 0.6, 2e-3).unwrap();
        let b = FockSpinBasis::new(30).unwrap();
        let h = build_hamiltonian(&p, &b).unwrap().entries;
        for i in 0..h.nrows() {
            for j in 0..h.ncols() {
                assert_eq!(h[(i, j)], h[(j, i)], "asymmetry at ({i},{j})");
            }
        }
    }

    #[test]
    fn quartic_matrix_elements_match_closed_form() {
        // isolate x⁴: Ω = 0, g₂ = 0, a₄ = 1, subtract the ω a†a diagonal
        let p = ModelParams::new(1.0, 0.0, 0.0, 1.0, 1.0).unwrap();
        let b = FockSpinBasis::new(12).unwrap();
        let h = build_hamiltonian(&p, &b).unwrap().entries;
        for n in 0..=12usize {
            let nf = n as f64;
            let diag = 3.0 * (2.0 * nf * nf + 2.0 * nf + 1.0);
            assert!((h[(2 * n, 2 * n)] - nf - diag).abs() < 1e-12);
            if n + 2 <= 12 {
                let v = (4.0 * nf + 6.0) * ((nf + 1.0) * (nf + 2.0)).sqrt();
                assert!((h[(2 * n, 2 * (n + 2))] - v).abs() < 1e-12);
            }
            if n + 4 <= 12 {
                let v = ((nf + 1.0) * (nf + 2.0) * (nf + 3.0) * (nf + 4.0)).sqrt();
                assert!((h[(2 * n, 2 * (n + 4))] - v).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn enlarging_the_cutoff_does_not_move_retained_elements() {
        let p = ModelParams::new(1.0, 1.0, 0.23, 1.0, 1e-3).unwrap();
        let small = build_hamiltonian(&p, &FockSpinBasis::new(20).unwrap()).unwrap().entries;
        let large = build_hamiltonian(&p, &FockSpinBasis::new(40).unwrap()).unwrap().entries;
        for i in 0..small.nrows() {
            for j in 0..small.ncols() {
                assert_eq!(small[(i, j)], large[(i, j)], "bleed-through at ({i},{j})");
            }
        }
    }

    #[test]
    fn spin_down_block_is_flat_at_the_collapse_coupling() {
        // At Ω = 0, χ = 1, g₂ = g_T the spin-down quadratic potential cancels
        // and the block reduces to (ω/2)p̂² − ω/2.
        let omega = 1.3;
        let p = ModelParams::new(omega, 0.0, omega / 4.0, 1.0, 0.0).unwrap();
        let n_max = 25usize;
        let b = FockSpinBasis::new(n_max).unwrap();
        let h = build_hamiltonian(&p, &b).unwrap().entries;
        for n in 0..=n_max {
            for m in 0..=n_max {
                // p̂² in Fock space: diag n + 1/2, off-diag −√((n+1)(n+2))/2
                let mut p2 = 0.0;
                if n == m {
                    p2 = n as f64 + 0.5;
                } else if m == n + 2 {
                    p2 = -(((n + 1) * (n + 2)) as f64).sqrt() / 2.0;
                } else if n == m + 2 {
                    p2 = -(((m + 1) * (m + 2)) as f64).sqrt() / 2.0;
                }
                let expect = 0.5 * omega * p2 - if n == m { 0.5 * omega } else { 0.0 };
                assert!(
                    (h[(2 * n + 1, 2 * m + 1)] - expect).abs() < 1e-12,
                    "spin-down block wrong at ({n},{m})"
                );
            }
        }
    }

    #[test]
    fn potential_examples() {
        let p = ModelParams::new(1.0, 1.0, 0.8 * 0.25, 1.0, 0.0).unwrap();
        assert!((effective_potential(&p, Spin::Down, 1.0) - 0.1).abs() < 1e-14);
        assert_eq!(effective_potential(&p, Spin::Up, 0.0), 0.0);
        assert_eq!(effective_potential(&p, Spin::Down, 0.0), 0.0);

        // inverted quadratic + quartic: minimum of v₋ at √(ω·0.2/(16 A₄))
        let p = ModelParams::new(1.0, 1.0, 1.2 * 0.25, 1.0, 1e-3).unwrap();
        let xmin = (1.0_f64 * 0.2 / (16.0 * 1e-3)).sqrt();
        let vmin = effective_potential(&p, Spin::Down, xmin);
        for dx in [-1e-3, 1e-3] {
            assert!(effective_potential(&p, Spin::Down, xmin + dx) > vmin);
        }
        // grid scan agrees with the stationary point
        let best = (0..4000)
            .map(|i| i as f64 * 0.005)
            .min_by(|a, b| {
                effective_potential(&p, Spin::Down, *a)
                    .total_cmp(&effective_potential(&p, Spin::Down, *b))
            })
            .unwrap();
        assert!((best - xmin).abs() < 0.01);
    }

    #[test]
    fn effective_mass_structure() {
        let p = ModelParams::new(1.0, 1.0, 0.2, 1.0, 0.0).unwrap();
        assert_eq!(effective_mass(&p, Spin::Up), 1.0);
        assert_eq!(effective_mass(&p, Spin::Down), 1.0);
        let p = ModelParams::new(1.0, 1.0, 0.1, 0.5, 0.0).unwrap();
        let skew = 0.5 / 1.5;
        let ratio = 0.1 / p.g_t();
        assert!((effective_mass(&p, Spin::Up) - 1.0 / (1.0 - skew * ratio)).abs() < 1e-14);
        assert!((effective_mass(&p, Spin::Down) - 1.0 / (1.0 + skew * ratio)).abs() < 1e-14);
    }

    #[test]
    fn parity_expectation_basics() {
        let b = FockSpinBasis::new(8).unwrap();
        let mut vac = vec![0.0; b.dim()];
        vac[b.index(0, Spin::Down)] = 1.0;
        assert_eq!(parity_expectation(&vac, &b).unwrap(), 1.0);

        let mut one = vec![0.0; b.dim()];
        one[b.index(1, Spin::Up)] = 1.0;
        assert_eq!(parity_expectation(&one, &b).unwrap(), -1.0);

        let bad = vec![0.5; b.dim()];
        assert!(parity_expectation(&bad, &b).is_err());
    }

    #[test]
    fn coupling_operator_matches_ladder_construction() {
        // independent oracle: assemble (a†)² + a² + χ(2a†a+1) from raw
        // ladder matrices and compare against the Hamiltonian's coupling block
        for &chi in &[1.0, 0.4, 2.3] {
            let p = ModelParams::new(1.0, 0.0, 1.0, chi, 0.0).unwrap();
            let n_max = 15usize;
            let b = FockSpinBasis::new(n_max).unwrap();
            let h = build_hamiltonian(&p, &b).unwrap().entries;
            let m = n_max + 3;
            let mut adag = Mat::<f64>::zeros(m, m);
            for n in 0..m - 1 {
                adag[(n + 1, n)] = ((n + 1) as f64).sqrt();
            }
            let mut q = Mat::<f64>::zeros(m, m);
            for i in 0..m {
                for j in 0..m {
                    let mut v = 0.0;
                    for k in 0..m {
                        v += adag[(i, k)] * adag[(k, j)]; // (a†)²
                        v += adag[(k, i)] * adag[(j, k)]; // a²
                    }
                    if i == j {
                        v += chi * (2.0 * i as f64 + 1.0);
                    }
                    q[(i, j)] = v;
                }
            }
            for n in 0..=n_max {
                for mm in 0..=n_max {
                    let mut expect = q[(n, mm)];
                    if n == mm {
                        expect += n as f64; // ω a†a diagonal
                    }
                    assert!(
                        (h[(2 * n, 2 * mm)] - expect).abs() < 1e-12,
                        "chi={chi} coupling mismatch at ({n},{mm})"
                    );
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn parity_blocks_are_exactly_zero(
            omega in 0.05f64..3.0,
            splitting in 0.0f64..3.0,
            g2 in 0.0f64..1.0,
            chi in 0.0f64..2.0,
            a4 in 0.0f64..0.01,
        ) {
            let p = ModelParams::new(omega, splitting, g2, chi, a4).unwrap();
            let b = FockSpinBasis::new(16).unwrap();
            let h = build_hamiltonian(&p, &b).unwrap().entries;
            for n in 0..=16usize {
                for m in 0..=16usize {
                    if (n + m) % 2 == 1 {
                        for (s, t) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                            prop_assert_eq!(h[(2 * n + s, 2 * m + t)], 0.0);
                        }
                    }
                }
            }
        }

        #[test]
        fn symmetric_for_random_params(
            omega in 0.05f64..3.0,
            splitting in 0.0f64..3.0,
            g2 in 0.0f64..1.0,
            chi in 0.0f64..2.0,
            a4 in 0.0f64..0.01,
        ) {
            let p = ModelParams::new(omega, splitting, g2, chi, a4).unwrap();
            let b = FockSpinBasis::new(12).unwrap();
            let h = build_hamiltonian(&p, &b).unwrap().entries;
            let mut ht = Mat::<f64>::zeros(h.nrows(), h.ncols());
            for i in 0..h.nrows() {
                for j in 0..h.ncols() {
                    ht[(i, j)] = h[(j, i)];
                }
            }
            prop_assert_eq!(mat_max_abs_diff(&h, &ht), 0.0);
        }
    }
}
