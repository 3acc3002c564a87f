//! Exact diagonalization and semiclassical analysis of a two-photon Rabi
//! model with a quartic stabilizer,
//!
//! ```text
//! H = ω a†a + (Ω/2) σx + g₂ σz [(a†)² + a² + χ(2a†a + 1)] + A₄ (a† + a)⁴ .
//! ```
//!
//! At χ = 1 the coupling reduces to g₂ σz (a† + a)². Without the quartic
//! term the spectrum collapses at g_T = ω/(2(1+χ)); with A₄ > 0 it stays
//! discrete for every coupling and the model instead shows a well-defined
//! phase transition, located here both semiclassically (closed form in
//! α₄ = A₄Ω/ω²) and through the peak of the ground-state quantum Fisher
//! information.

pub mod cli;
pub mod metrology;
pub mod model;
pub mod ptps;
pub mod semiclassical;
pub mod spectrum;
pub mod wavefunction;

/// Error type shared by every module.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("eigensolver failure: {0}")]
    Solver(String),

    #[error(
        "spectrum not converged at cutoff {cutoff}: tracked levels still move by {delta:.3e} (tol {tol:.3e})"
    )]
    NotConverged { cutoff: usize, delta: f64, tol: f64 },

    #[error(
        "unstable regime: g2 = {g2} exceeds g_T = {g_t} with a4 = 0; the spectrum is unbounded from below"
    )]
    Unstable { g2: f64, g_t: f64 },

    #[error(
        "near-degenerate ground state: gap {gap:.3e} is too small for finite-difference step {delta:.3e}"
    )]
    NearDegenerate { gap: f64, delta: f64 },

    #[error("at grid point {index} (value {value}): {source}")]
    AtPoint {
        index: usize,
        value: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code: 2 config/usage, 3 convergence, 4 instability.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) | Error::Io(_) => 2,
            Error::Solver(_) | Error::NotConverged { .. } | Error::NearDegenerate { .. } => 3,
            Error::Unstable { .. } => 4,
            Error::AtPoint { source, .. } => source.exit_code(),
        }
    }

    pub(crate) fn at_point(index: usize, value: f64, source: Error) -> Error {
        Error::AtPoint { index, value, source: Box::new(source) }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
