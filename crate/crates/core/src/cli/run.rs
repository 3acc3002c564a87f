//! Subcommand runners.
//!
//! Grid sweeps evaluate points in parallel, write whatever succeeded in grid
//! order, record the rest in a failure manifest, and exit with the worst
//! per-point code. Config-level rejections (`Err`) produce no data files.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::json;

use crate::cli::config::{Command, RunConfig};
use crate::cli::grid::GridSpec;
use crate::cli::output::{
    write_csv, write_failure_manifest, write_sidecar, FailureRecord,
};
use crate::model::{self, FockSpinBasis, ModelParams, Spin};
use crate::{metrology, ptps, semiclassical, spectrum, wavefunction};
use crate::{Error, Result};

/// Executes a resolved run.
///
/// `Ok(code)` means output files were written; a nonzero code is the worst
/// exit code among failed grid points (recorded in `{out}.failures.json`).
pub fn execute(config: &RunConfig) -> Result<i32> {
    match &config.command {
        Command::Spectrum { params, g2_grid, levels, cutoff, out } => {
            run_spectrum(config, params, g2_grid, *levels, *cutoff, out)
        }
        Command::Potential { params, x_grid, out } => {
            run_potential(config, params, x_grid, out)
        }
        Command::SemiclassicalBranch { params, x_grid, out } => {
            run_branch(config, params, x_grid, out)
        }
        Command::SemiclassicalTable { alpha4_grid, out } => {
            run_table(config, alpha4_grid, out)
        }
        Command::SemiclassicalPhase { omega, qubit_splitting, a4_grid, g2_grid, out } => {
            run_phase(config, *omega, *qubit_splitting, a4_grid, g2_grid, out)
        }
        Command::Qfi { params, g2_grid, delta, tol, ceiling, out } => {
            run_qfi(config, params, g2_grid, *delta, *tol, *ceiling, out)
        }
        Command::Observables { params, g2_grid, tol, ceiling, out } => {
            run_observables(config, params, g2_grid, *tol, *ceiling, out)
        }
        Command::Wavefunction { params, g2_grid, x_grid, tol, ceiling, out } => {
            run_wavefunction(config, params, g2_grid, x_grid.as_ref(), *tol, *ceiling, out)
        }
        Command::Gap { params, g2_grid, tol, ceiling, out } => {
            run_gap(config, params, g2_grid, *tol, *ceiling, out)
        }
        Command::Ptps { params, tol, ceiling, out } => {
            run_ptps(config, params, *tol, *ceiling, out)
        }
    }
}

/// Evaluates one closure per grid value in parallel, preserving grid order.
fn sweep<T, F>(values: &[f64], eval: F) -> Vec<(usize, f64, Result<T>)>
where
    T: Send,
    F: Fn(f64) -> Result<T> + Sync,
{
    values
        .par_iter()
        .enumerate()
        .map(|(i, &v)| (i, v, eval(v)))
        .collect()
}

fn split<T>(outcomes: Vec<(usize, f64, Result<T>)>) -> (Vec<(usize, f64, T)>, Vec<FailureRecord>) {
    let mut ok = Vec::new();
    let mut failures = Vec::new();
    for (index, value, outcome) in outcomes {
        match outcome {
            Ok(t) => ok.push((index, value, t)),
            Err(e) => failures.push(FailureRecord {
                index,
                value,
                error: e.to_string(),
                exit_code: e.exit_code(),
            }),
        }
    }
    (ok, failures)
}

fn worst_code(failures: &[FailureRecord]) -> i32 {
    failures.iter().map(|f| f.exit_code).max().unwrap_or(0)
}

fn run_spectrum(
    config: &RunConfig,
    params: &ModelParams,
    g2_grid: &GridSpec,
    levels: usize,
    cutoff: usize,
    out: &Path,
) -> Result<i32> {
    params.validate()?;
    let basis = FockSpinBasis::new(cutoff)?;
    if levels == 0 || levels > basis.dim() {
        return Err(Error::InvalidArgument(format!(
            "levels must lie in 1..={}, got {levels}",
            basis.dim()
        )));
    }
    let values = g2_grid.values()?;
    let g_t = params.g_t();
    let outcomes = sweep(&values, |g2| {
        let p = params.with_g2(g2);
        p.validate()?;
        // The fixed-cutoff sweep still refuses the regime where the model
        // has no ground state: finite bases produce numbers there, but they
        // mean nothing.
        if p.a4 == 0.0 && g2 > g_t {
            return Err(Error::Unstable { g2, g_t });
        }
        Ok(spectrum::solve_spectrum(&p, &basis, levels)?.levels)
    });
    let (ok, failures) = split(outcomes);
    let mut header = vec!["g2".to_string()];
    header.extend((0..levels).map(|n| format!("E{n}")));
    let rows: Vec<Vec<f64>> = ok
        .into_iter()
        .map(|(_, g2, levels)| {
            let mut row = vec![g2];
            row.extend(levels);
            row
        })
        .collect();
    write_csv(out, &header, &rows)?;
    write_failure_manifest(out, &failures)?;
    write_sidecar(
        out,
        config,
        json!({
            "cutoff": cutoff,
            "levels": levels,
            "points_total": values.len(),
            "points_failed": failures.len(),
        }),
    )?;
    Ok(worst_code(&failures))
}

fn run_potential(
    config: &RunConfig,
    params: &ModelParams,
    x_grid: &GridSpec,
    out: &Path,
) -> Result<i32> {
    params.validate()?;
    let xs = x_grid.values()?;
    let rows: Vec<Vec<f64>> = xs
        .iter()
        .map(|&x| {
            vec![
                x,
                model::effective_potential(params, Spin::Up, x),
                model::effective_potential(params, Spin::Down, x),
            ]
        })
        .collect();
    write_csv(
        out,
        &["x".into(), "v_plus".into(), "v_minus".into()],
        &rows,
    )?;
    write_sidecar(
        out,
        config,
        json!({
            "mass_plus": model::effective_mass(params, Spin::Up),
            "mass_minus": model::effective_mass(params, Spin::Down),
            "points_total": xs.len(),
        }),
    )?;
    Ok(0)
}

fn run_branch(
    config: &RunConfig,
    params: &ModelParams,
    x_grid: &GridSpec,
    out: &Path,
) -> Result<i32> {
    params.validate()?;
    let xs = x_grid.values()?;
    let rows: Vec<Vec<f64>> = xs
        .iter()
        .map(|&x| vec![x, semiclassical::lower_branch(params, x)])
        .collect();
    write_csv(out, &["x".into(), "epsilon".into()], &rows)?;
    let minimum = semiclassical::minimize_branch(params)?;
    write_sidecar(
        out,
        config,
        json!({
            "x_min": minimum.x_min,
            "energy_min": minimum.energy_min,
            "energy_origin": minimum.energy_origin,
            "sigma_x_at_min": minimum.sigma_x_at_min,
            "symmetric_phase": minimum.symmetric_phase,
            "points_total": xs.len(),
        }),
    )?;
    Ok(0)
}

fn run_table(config: &RunConfig, alpha4_grid: &GridSpec, out: &Path) -> Result<i32> {
    let alphas = alpha4_grid.values()?;
    let outcomes = sweep(&alphas, |alpha4| {
        let exact = semiclassical::critical_ratio_exact(alpha4)?;
        let small = semiclassical::critical_ratio_small(alpha4)?;
        let large = semiclassical::critical_ratio_large(alpha4)?;
        Ok([exact, small, large])
    });
    let (ok, failures) = split(outcomes);
    let rows: Vec<Vec<f64>> = ok
        .into_iter()
        .map(|(_, alpha4, [exact, small, large])| vec![alpha4, exact, small, large])
        .collect();
    write_csv(
        out,
        &[
            "alpha4".into(),
            "g2c_exact".into(),
            "g2c_small".into(),
            "g2c_large".into(),
        ],
        &rows,
    )?;
    write_failure_manifest(out, &failures)?;
    write_sidecar(
        out,
        config,
        json!({
            "points_total": alphas.len(),
            "points_failed": failures.len(),
        }),
    )?;
    Ok(worst_code(&failures))
}

fn boundary_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let ext = out
        .extension()
        .map(|e| format!(".{}", e.to_string_lossy()))
        .unwrap_or_default();
    out.with_file_name(format!("{stem}_boundary{ext}"))
}

fn run_phase(
    config: &RunConfig,
    omega: f64,
    qubit_splitting: f64,
    a4_grid: &GridSpec,
    g2_grid: &GridSpec,
    out: &Path,
) -> Result<i32> {
    let a4s = a4_grid.values()?;
    let g2s = g2_grid.values()?;
    let diagram = semiclassical::phase_diagram(omega, qubit_splitting, &a4s, &g2s)?;
    let mut rows = Vec::with_capacity(a4s.len() * g2s.len());
    for (i, &a4) in diagram.a4_values.iter().enumerate() {
        for (j, &g2) in diagram.g2_values.iter().enumerate() {
            rows.push(vec![a4, g2, diagram.sigma_x[i][j]]);
        }
    }
    write_csv(out, &["a4".into(), "g2".into(), "sigma_x".into()], &rows)?;
    let boundary_out = boundary_path(out);
    let boundary_rows: Vec<Vec<f64>> = diagram
        .boundary
        .iter()
        .map(|&(a4, g2c)| vec![a4, g2c])
        .collect();
    write_csv(&boundary_out, &["a4".into(), "g2c".into()], &boundary_rows)?;
    write_sidecar(
        out,
        config,
        json!({
            "a4_points": a4s.len(),
            "g2_points": g2s.len(),
            "boundary_file": boundary_out.file_name().map(|s| s.to_string_lossy().into_owned()),
        }),
    )?;
    Ok(0)
}

fn run_qfi(
    config: &RunConfig,
    params: &ModelParams,
    g2_grid: &GridSpec,
    delta: f64,
    tol: f64,
    ceiling: usize,
    out: &Path,
) -> Result<i32> {
    params.validate()?;
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "differencing step must be positive and finite, got {delta}"
        )));
    }
    let values = g2_grid.values()?;
    if values.len() < 3 {
        return Err(Error::InvalidArgument(
            "a QFI sweep needs at least 3 grid points to bracket a peak".into(),
        ));
    }
    let outcomes = sweep(&values, |g2| {
        let p = params.with_g2(g2);
        let fq = metrology::qfi_at(&p, metrology::Lambda::G2, delta, tol, ceiling)?;
        let chi_f = metrology::fidelity_susceptibility(&p, delta, tol, ceiling)?;
        // Identity is testable only where F·δ²/8 clears overlap noise.
        if fq * delta * delta > 1e-10 && ((4.0 * chi_f - fq).abs() / fq) > 1e-3 {
            return Err(Error::Solver(format!(
                "fidelity identity violated at g2 = {g2}: F_Q = {fq:.6e} vs 4 chi_F = {:.6e}",
                4.0 * chi_f
            )));
        }
        Ok((fq, chi_f))
    });
    let (ok, failures) = split(outcomes);

    // The peak is refined only from a complete sweep: a missing point could
    // hide the true maximum.
    let mut peak: Option<(f64, f64)> = None;
    let mut endpoint_peak = false;
    if failures.is_empty() {
        let imax = ok
            .iter()
            .enumerate()
            .max_by(|a, b| (a.1).2 .0.total_cmp(&(b.1).2 .0))
            .map(|(i, _)| i)
            .unwrap();
        if imax == 0 || imax == ok.len() - 1 {
            endpoint_peak = true;
        } else {
            peak = Some(metrology::refine_peak(
                params,
                values[imax - 1],
                values[imax + 1],
                delta,
                tol,
                ceiling,
            )?);
        }
    }

    let rows: Vec<Vec<f64>> = ok
        .iter()
        .map(|&(_, g2, (fq, chi_f))| {
            let ratio = peak.map_or(f64::NAN, |(pg, _)| g2 / pg);
            vec![g2, ratio, fq, fq.ln(), chi_f, 1.0 / fq.sqrt()]
        })
        .collect();
    write_csv(
        out,
        &[
            "g2".into(),
            "g2_over_peak".into(),
            "fq".into(),
            "ln_fq".into(),
            "chi_f".into(),
            "e_cr".into(),
        ],
        &rows,
    )?;
    write_failure_manifest(out, &failures)?;
    write_sidecar(
        out,
        config,
        json!({
            "delta": delta,
            "peak": peak.map(|(g2, fq)| json!({"g2": g2, "fq": fq})),
            "points_total": values.len(),
            "points_failed": failures.len(),
        }),
    )?;
    if endpoint_peak {
        return Err(Error::InvalidArgument(
            "QFI maximum sits on a grid endpoint; widen the g2 grid to bracket the peak".into(),
        ));
    }
    Ok(worst_code(&failures))
}

fn run_observables(
    config: &RunConfig,
    params: &ModelParams,
    g2_grid: &GridSpec,
    tol: f64,
    ceiling: usize,
    out: &Path,
) -> Result<i32> {
    params.validate()?;
    let values = g2_grid.values()?;
    let outcomes = sweep(&values, |g2| {
        let p = params.with_g2(g2);
        let solved = spectrum::converged_spectrum(&p, 1, tol, ceiling)?.require_converged(tol)?;
        let basis = FockSpinBasis::new(solved.cutoff)?;
        let ground = &solved.states[0];
        let sigma_x = wavefunction::observable_sigma_x(ground, &basis)?;
        let x2 = wavefunction::observable_x2(ground, &basis)?;
        let parity = model::parity_expectation(ground, &basis)?;
        Ok([sigma_x, x2, parity])
    });
    let (ok, failures) = split(outcomes);
    let rows: Vec<Vec<f64>> = ok
        .into_iter()
        .map(|(_, g2, [sigma_x, x2, parity])| vec![g2, sigma_x, x2, parity])
        .collect();
    write_csv(
        out,
        &["g2".into(), "sigma_x".into(), "x2".into(), "parity".into()],
        &rows,
    )?;
    write_failure_manifest(out, &failures)?;
    write_sidecar(
        out,
        config,
        json!({
            "points_total": values.len(),
            "points_failed": failures.len(),
        }),
    )?;
    Ok(worst_code(&failures))
}

fn wavefunction_file(out: &Path, g2: f64) -> PathBuf {
    let mut name = out.as_os_str().to_os_string();
    name.push(format!("_g2_{g2:.9e}.csv"));
    PathBuf::from(name)
}

fn run_wavefunction(
    config: &RunConfig,
    params: &ModelParams,
    g2_grid: &GridSpec,
    x_grid: Option<&GridSpec>,
    tol: f64,
    ceiling: usize,
    out: &Path,
) -> Result<i32> {
    params.validate()?;
    if let Some(grid) = x_grid {
        grid.validate()?;
    }
    let values = g2_grid.values()?;
    let outcomes = sweep(&values, |g2| {
        let p = params.with_g2(g2);
        let solved = spectrum::converged_spectrum(&p, 1, tol, ceiling)?.require_converged(tol)?;
        let basis = FockSpinBasis::new(solved.cutoff)?;
        let xs = match x_grid {
            Some(grid) => grid.values()?,
            None => wavefunction::default_position_grid(&basis),
        };
        let wf = wavefunction::to_position(&solved.states[0], &basis, &xs)?;
        let rows: Vec<Vec<f64>> = (0..wf.x_grid.len())
            .map(|i| vec![wf.x_grid[i], wf.psi_plus[i], wf.psi_minus[i]])
            .collect();
        let path = wavefunction_file(out, g2);
        write_csv(
            &path,
            &["x".into(), "psi_plus".into(), "psi_minus".into()],
            &rows,
        )?;
        Ok(json!({
            "g2": g2,
            "file": path.file_name().map(|s| s.to_string_lossy().into_owned()),
            "cutoff": solved.cutoff,
            "norm_check": wf.norm_check,
        }))
    });
    let (ok, failures) = split(outcomes);
    let files: Vec<serde_json::Value> = ok.into_iter().map(|(_, _, entry)| entry).collect();
    write_failure_manifest(out, &failures)?;
    write_sidecar(
        out,
        config,
        json!({
            "files": files,
            "points_total": values.len(),
            "points_failed": failures.len(),
        }),
    )?;
    Ok(worst_code(&failures))
}

fn run_gap(
    config: &RunConfig,
    params: &ModelParams,
    g2_grid: &GridSpec,
    tol: f64,
    ceiling: usize,
    out: &Path,
) -> Result<i32> {
    params.validate()?;
    let values = g2_grid.values()?;
    let outcomes = sweep(&values, |g2| {
        let p = params.with_g2(g2);
        let solved = spectrum::converged_spectrum(&p, 2, tol, ceiling)?.require_converged(tol)?;
        Ok(solved.gap)
    });
    let (ok, failures) = split(outcomes);
    let rows: Vec<Vec<f64>> = ok
        .into_iter()
        .map(|(_, g2, gap)| vec![g2, gap])
        .collect();
    write_csv(out, &["g2".into(), "delta".into()], &rows)?;
    write_failure_manifest(out, &failures)?;
    write_sidecar(
        out,
        config,
        json!({
            "points_total": values.len(),
            "points_failed": failures.len(),
        }),
    )?;
    Ok(worst_code(&failures))
}

fn run_ptps(
    config: &RunConfig,
    params: &ModelParams,
    tol: f64,
    ceiling: usize,
    out: &Path,
) -> Result<i32> {
    params.validate()?;
    let result = ptps::ptps(params, tol, ceiling)?;
    let doc = serde_json::to_value(&result)
        .map_err(|e| Error::Solver(format!("summary serialization failed: {e}")))?;
    let text = serde_json::to_string_pretty(&doc)
        .map_err(|e| Error::Solver(format!("summary serialization failed: {e}")))?;
    std::fs::write(out, text + "\n")?;
    write_sidecar(out, config, doc)?;
    Ok(0)
}
