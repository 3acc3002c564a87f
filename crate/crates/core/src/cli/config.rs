//! Fully resolved run configuration.
//!
//! Every run is described by a [`RunConfig`] that serializes to JSON. The
//! sidecar metadata written next to each output embeds the same structure, so
//! a sidecar can be fed back through `--config` to reproduce a run exactly.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cli::grid::GridSpec;
use crate::model::ModelParams;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Worker threads for grid sweeps; `None` uses the rayon default.
    /// Output bytes never depend on this.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    #[serde(flatten)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "snake_case")]
pub enum Command {
    /// Fixed-cutoff eigenvalue sweep over a coupling grid.
    Spectrum {
        params: ModelParams,
        g2_grid: GridSpec,
        levels: usize,
        cutoff: usize,
        out: PathBuf,
    },
    /// Adiabatic potential branches v±(x) on a position grid.
    Potential {
        params: ModelParams,
        x_grid: GridSpec,
        out: PathBuf,
    },
    /// Lower Born-Oppenheimer branch ε(x) on a position grid.
    SemiclassicalBranch {
        params: ModelParams,
        x_grid: GridSpec,
        out: PathBuf,
    },
    /// Critical-ratio table: exact closed form plus both expansions.
    SemiclassicalTable {
        alpha4_grid: GridSpec,
        out: PathBuf,
    },
    /// ⟨σx⟩ order-parameter grid with the analytic phase boundary.
    SemiclassicalPhase {
        omega: f64,
        qubit_splitting: f64,
        a4_grid: GridSpec,
        g2_grid: GridSpec,
        out: PathBuf,
    },
    /// Quantum Fisher information sweep (λ = g₂) with peak refinement.
    Qfi {
        params: ModelParams,
        g2_grid: GridSpec,
        delta: f64,
        tol: f64,
        ceiling: usize,
        out: PathBuf,
    },
    /// Ground-state ⟨σx⟩ and ⟨x̂²⟩ over a coupling grid.
    Observables {
        params: ModelParams,
        g2_grid: GridSpec,
        tol: f64,
        ceiling: usize,
        out: PathBuf,
    },
    /// Ground-state position-space spinor, one file per coupling value.
    Wavefunction {
        params: ModelParams,
        g2_grid: GridSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        x_grid: Option<GridSpec>,
        tol: f64,
        ceiling: usize,
        out: PathBuf,
    },
    /// First excitation gap Δ over a coupling grid.
    Gap {
        params: ModelParams,
        g2_grid: GridSpec,
        tol: f64,
        ceiling: usize,
        out: PathBuf,
    },
    /// Adiabatic preparation-time summary for one parameter family.
    Ptps {
        params: ModelParams,
        tol: f64,
        ceiling: usize,
        out: PathBuf,
    },
}

impl Command {
    pub fn out(&self) -> &Path {
        match self {
            Command::Spectrum { out, .. }
            | Command::Potential { out, .. }
            | Command::SemiclassicalBranch { out, .. }
            | Command::SemiclassicalTable { out, .. }
            | Command::SemiclassicalPhase { out, .. }
            | Command::Qfi { out, .. }
            | Command::Observables { out, .. }
            | Command::Wavefunction { out, .. }
            | Command::Gap { out, .. }
            | Command::Ptps { out, .. } => out,
        }
    }
}

impl RunConfig {
    /// Parses a config file. Accepts either a bare [`RunConfig`] or a sidecar
    /// document wrapping one under a `"config"` key, so run metadata can be
    /// replayed directly.
    pub fn from_json(text: &str) -> Result<RunConfig> {
        let value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| Error::InvalidArgument(format!("config is not valid JSON: {e}")))?;
        let payload = match value.get("config") {
            Some(inner) => inner.clone(),
            None => value,
        };
        serde_json::from_value(payload)
            .map_err(|e| Error::InvalidArgument(format!("config does not describe a run: {e}")))
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)?;
        RunConfig::from_json(&text)
    }
}
