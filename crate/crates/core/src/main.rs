use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use quartic_rabi::cli::config::{Command, RunConfig};
use quartic_rabi::cli::grid::GridSpec;
use quartic_rabi::cli::run::execute;
use quartic_rabi::metrology;
use quartic_rabi::model::ModelParams;
use quartic_rabi::{Error, Result};

/// Spectra, semiclassics, and metrology of a two-photon qubit-oscillator
/// model stabilized by a quartic potential.
#[derive(Parser)]
#[command(name = "quartic-rabi", version)]
struct Cli {
    /// Worker threads for grid sweeps (default: all cores). Never changes
    /// output bytes, only wall time.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Run from a JSON config instead of a subcommand. Accepts a bare config
    /// or a sidecar metadata file from an earlier run.
    #[arg(long, value_name = "FILE", global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<CliCommand>,
}

/// Model parameters shared by every subcommand. Energies are absolute; the
/// defaults put the qubit splitting at 1 so it acts as the energy unit.
#[derive(Args)]
struct ParamArgs {
    /// Oscillator frequency omega.
    #[arg(long, default_value_t = 1.0)]
    omega: f64,

    /// Qubit splitting Omega.
    #[arg(long, default_value_t = 1.0)]
    qubit_splitting: f64,

    /// Two-photon coupling g2. Sweep subcommands override it per point.
    #[arg(long, default_value_t = 0.0)]
    g2: f64,

    /// Weight chi of the 2n+1 part of the coupling operator.
    #[arg(long, default_value_t = 1.0)]
    chi: f64,

    /// Quartic stabilizer amplitude A4, in absolute units.
    #[arg(long, conflicts_with = "a4_per_omega")]
    a4: Option<f64>,

    /// Quartic stabilizer amplitude as a fraction of omega.
    #[arg(long)]
    a4_per_omega: Option<f64>,
}

impl ParamArgs {
    fn resolve(&self) -> Result<ModelParams> {
        let a4 = match (self.a4, self.a4_per_omega) {
            (Some(a4), None) => a4,
            (None, Some(ratio)) => ratio * self.omega,
            (None, None) => 0.0,
            (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
        };
        ModelParams::new(self.omega, self.qubit_splitting, self.g2, self.chi, a4)
    }
}

/// Convergence policy for cutoff-doubling solves.
#[derive(Args)]
struct SolverArgs {
    /// Tolerance on the returned levels between successive cutoff doublings.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,

    /// Largest Fock cutoff the doubling ladder may reach.
    #[arg(long, default_value_t = 4096)]
    ceiling: usize,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Eigenvalue sweep at a fixed Fock cutoff (collapse signatures).
    Spectrum {
        #[command(flatten)]
        params: ParamArgs,
        /// Coupling grid, start:stop:count[:log].
        #[arg(long, value_name = "GRID")]
        g2_grid: GridSpec,
        /// Levels reported per grid point.
        #[arg(long, default_value_t = 8)]
        levels: usize,
        /// Fixed Fock cutoff for the whole sweep.
        #[arg(long, default_value_t = 256)]
        cutoff: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Adiabatic potential branches v+(x), v-(x).
    Potential {
        #[command(flatten)]
        params: ParamArgs,
        /// Position grid, start:stop:count[:log].
        #[arg(long, value_name = "GRID", allow_hyphen_values = true)]
        x_grid: GridSpec,
        #[arg(long)]
        out: PathBuf,
    },
    /// Frozen-mode analysis: branch profile, critical-ratio table, or
    /// order-parameter phase diagram. Pick exactly one mode.
    Semiclassical(SemiclassicalArgs),
    /// Quantum Fisher information sweep over g2 with peak refinement.
    Qfi {
        #[command(flatten)]
        params: ParamArgs,
        /// Coupling grid, start:stop:count[:log].
        #[arg(long, value_name = "GRID")]
        g2_grid: GridSpec,
        /// Finite-difference step in g2 (default: 1e-5 of the collapse
        /// coupling).
        #[arg(long)]
        delta: Option<f64>,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Ground-state observables (sigma_x, x^2, photon parity) over g2.
    Observables {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_name = "GRID")]
        g2_grid: GridSpec,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Ground-state position-space spinor, one CSV per coupling value.
    Wavefunction {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_name = "GRID")]
        g2_grid: GridSpec,
        /// Position grid (default: a uniform grid matched to the converged
        /// cutoff).
        #[arg(long, value_name = "GRID", allow_hyphen_values = true)]
        x_grid: Option<GridSpec>,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// First excitation gap over g2.
    Gap {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_name = "GRID")]
        g2_grid: GridSpec,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Adiabatic preparation-time summary for one parameter family.
    Ptps {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct SemiclassicalArgs {
    #[command(flatten)]
    params: ParamArgs,

    /// Critical-ratio table (exact + both expansions) over this alpha4 grid.
    #[arg(long, value_name = "GRID", conflicts_with_all = ["branch_profile", "phase_diagram"])]
    table: Option<GridSpec>,

    /// Lower-branch energy profile over this position grid.
    #[arg(long, value_name = "GRID", conflicts_with = "phase_diagram", allow_hyphen_values = true)]
    branch_profile: Option<GridSpec>,

    /// Order-parameter grid with the analytic phase boundary overlay.
    #[arg(long)]
    phase_diagram: bool,

    /// A4 grid for --phase-diagram.
    #[arg(long, value_name = "GRID", requires = "phase_diagram")]
    a4_grid: Option<GridSpec>,

    /// g2 grid for --phase-diagram.
    #[arg(long, value_name = "GRID", requires = "phase_diagram")]
    g2_grid: Option<GridSpec>,

    #[arg(long)]
    out: PathBuf,
}

impl CliCommand {
    fn into_command(self) -> Result<Command> {
        Ok(match self {
            CliCommand::Spectrum { params, g2_grid, levels, cutoff, out } => Command::Spectrum {
                params: params.resolve()?,
                g2_grid,
                levels,
                cutoff,
                out,
            },
            CliCommand::Potential { params, x_grid, out } => Command::Potential {
                params: params.resolve()?,
                x_grid,
                out,
            },
            CliCommand::Semiclassical(args) => args.into_command()?,
            CliCommand::Qfi { params, g2_grid, delta, solver, out } => {
                let params = params.resolve()?;
                let delta = delta.unwrap_or_else(|| metrology::default_delta(&params));
                Command::Qfi {
                    params,
                    g2_grid,
                    delta,
                    tol: solver.tol,
                    ceiling: solver.ceiling,
                    out,
                }
            }
            CliCommand::Observables { params, g2_grid, solver, out } => Command::Observables {
                params: params.resolve()?,
                g2_grid,
                tol: solver.tol,
                ceiling: solver.ceiling,
                out,
            },
            CliCommand::Wavefunction { params, g2_grid, x_grid, solver, out } => {
                Command::Wavefunction {
                    params: params.resolve()?,
                    g2_grid,
                    x_grid,
                    tol: solver.tol,
                    ceiling: solver.ceiling,
                    out,
                }
            }
            CliCommand::Gap { params, g2_grid, solver, out } => Command::Gap {
                params: params.resolve()?,
                g2_grid,
                tol: solver.tol,
                ceiling: solver.ceiling,
                out,
            },
            CliCommand::Ptps { params, solver, out } => Command::Ptps {
                params: params.resolve()?,
                tol: solver.tol,
                ceiling: solver.ceiling,
                out,
            },
        })
    }
}

impl SemiclassicalArgs {
    fn into_command(self) -> Result<Command> {
        match (self.table, self.branch_profile, self.phase_diagram) {
            (Some(alpha4_grid), None, false) => Ok(Command::SemiclassicalTable {
                alpha4_grid,
                out: self.out,
            }),
            (None, Some(x_grid), false) => Ok(Command::SemiclassicalBranch {
                params: self.params.resolve()?,
                x_grid,
                out: self.out,
            }),
            (None, None, true) => {
                let (a4_grid, g2_grid) = match (self.a4_grid, self.g2_grid) {
                    (Some(a), Some(g)) => (a, g),
                    _ => {
                        return Err(Error::InvalidArgument(
                            "--phase-diagram needs both --a4-grid and --g2-grid".into(),
                        ))
                    }
                };
                Ok(Command::SemiclassicalPhase {
                    omega: self.params.omega,
                    qubit_splitting: self.params.qubit_splitting,
                    a4_grid,
                    g2_grid,
                    out: self.out,
                })
            }
            _ => Err(Error::InvalidArgument(
                "pick exactly one of --table, --branch-profile, --phase-diagram".into(),
            )),
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    let config = match (cli.config, cli.command) {
        (Some(path), None) => {
            let mut config = RunConfig::load(&path)?;
            if cli.jobs.is_some() {
                config.jobs = cli.jobs;
            }
            config
        }
        (None, Some(command)) => RunConfig {
            jobs: cli.jobs,
            command: command.into_command()?,
        },
        (Some(_), Some(_)) => {
            return Err(Error::InvalidArgument(
                "--config replaces the subcommand; pass one or the other".into(),
            ))
        }
        (None, None) => {
            return Err(Error::InvalidArgument(
                "nothing to run: pass a subcommand or --config FILE".into(),
            ))
        }
    };
    if let Some(jobs) = config.jobs {
        if jobs == 0 {
            return Err(Error::InvalidArgument("--jobs must be at least 1".into()));
        }
        // Ignore the error from a pool that is already initialized.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    execute(&config)
}

fn main() {
    env_logger::init();
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            let record = serde_json::json!({
                "error": e.to_string(),
                "exit_code": e.exit_code(),
            });
            eprintln!("{record}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}
