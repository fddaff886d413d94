//! Builders turning library results into output tables.

use std::thread;

use anyhow::Result;
use qthermo_core::dynamics::markov::integrate_master;
use qthermo_core::dynamics::operator_norm;
use qthermo_core::metrology::{self, find_peaks, qfi_qubit_closed_as_printed, scan};
use qthermo_core::qsl::QslReport;
use qthermo_core::thermal::{gibbs_state, per_state_populations};
use qthermo_core::{
    EnergySpectrum, MarkovParams, ScalingFit, SwapModel, SwapParams, TemperatureGrid, TimeGrid, Trajectory,
};

use crate::output::{Cell, Table};

pub fn qfi_table(name: &str, spectrum: &EnergySpectrum, grid: &TemperatureGrid) -> Table {
    let curve = scan(spectrum, grid, name);
    let mut t = Table::new(name, &["T", "qfi"]);
    for (temp, h) in curve.points {
        t.push(vec![temp.into(), h.into()]);
    }
    t
}

/// QFI table with the printed qubit closed form alongside.
pub fn qfi_table_as_printed(name: &str, gap: f64, spectrum: &EnergySpectrum, grid: &TemperatureGrid) -> Result<Table> {
    let curve = scan(spectrum, grid, name);
    let mut t = Table::new(name, &["T", "qfi", "qfi_as_printed"]);
    for (temp, h) in curve.points {
        t.push(vec![temp.into(), h.into(), qfi_qubit_closed_as_printed(gap, temp)?.into()]);
    }
    Ok(t)
}

pub fn peaks_table(name: &str, spectrum: &EnergySpectrum, grid: &TemperatureGrid) -> Result<Table> {
    let peaks = find_peaks(spectrum, grid)?;
    let mut t = Table::new(name, &["peak", "t_max", "h_max"]);
    for (i, p) in peaks.iter().enumerate() {
        t.push(vec![(i + 1).into(), p.t_max.into(), p.h_max.into()]);
    }
    Ok(t)
}

/// Per-state populations of each excited block, one column per block.
pub fn population_table(name: &str, spectrum: &EnergySpectrum, grid: &TemperatureGrid) -> Result<Table> {
    const COLUMNS: [&str; 4] = ["T", "p1", "p2", "p3"];
    let blocks = (spectrum.len() - 1).min(3);
    let mut t = Table::new(name, &COLUMNS[..=blocks]);
    for temp in grid.points() {
        let state = gibbs_state(spectrum, temp)?;
        let per_state = per_state_populations(&state, spectrum)?;
        let mut row: Vec<Cell> = vec![temp.into()];
        row.extend(per_state[1..=blocks].iter().map(|&p| Cell::from(p)));
        t.push(row);
    }
    Ok(t)
}

pub fn scaling_tables(prefix: &str, fit: &ScalingFit) -> (Table, Table) {
    let mut summary = Table::new(
        format!("{prefix}fit"),
        &["alpha", "inverse_h_coefficient", "t_residual", "inverse_h_residual"],
    );
    summary.push(vec![
        fit.alpha.into(),
        fit.inverse_h_coefficient.into(),
        fit.t_residual.into(),
        fit.inverse_h_residual.into(),
    ]);
    let mut points = Table::new(
        format!("{prefix}points"),
        &["delta", "t_max", "h_max", "inverse_h", "converged"],
    );
    for p in &fit.points {
        points.push(vec![
            p.gap.into(),
            p.t_max.into(),
            p.h_max.into(),
            (1.0 / p.h_max).into(),
            p.converged.into(),
        ]);
    }
    (summary, points)
}

/// Optimum over a gap sweep without the through-origin fit requirements.
pub fn optimum_sweep(name: &str, gaps: &[f64], spectrum_for: impl Fn(f64) -> Result<EnergySpectrum>) -> Result<Table> {
    let mut t = Table::new(name, &["delta", "t_max", "h_max", "inverse_h", "converged"]);
    for &g in gaps {
        let bracket = metrology::scaling_bracket(g);
        let opt = metrology::find_optimal_temperature(&spectrum_for(g)?, bracket)?;
        t.push(vec![
            g.into(),
            opt.t_max.into(),
            opt.h_max.into(),
            (1.0 / opt.h_max).into(),
            opt.converged.into(),
        ]);
    }
    Ok(t)
}

fn trajectory_tables(name: &str, traj: &Trajectory, qsl: bool) -> Result<Vec<Table>> {
    let mut main = Table::new(format!("{name}_trajectory"), &["t", "p_e", "gen_norm"]);
    for p in traj.points() {
        main.push(vec![
            p.t.into(),
            p.state.excited_population().into(),
            operator_norm(&p.generator)?.into(),
        ]);
    }
    let mut out = vec![main];
    if qsl {
        let t_end = traj.points().last().map(|p| p.t).unwrap_or(0.0);
        let taus = QslReport::window_times(traj, t_end);
        let report = QslReport::from_trajectory(traj, &taus)?;
        let mut series = Table::new(format!("{name}_qsl"), &["t", "fidelity", "bures", "v_qsl"]);
        for s in &report.series {
            series.push(vec![s.t.into(), s.fidelity.into(), s.bures.into(), s.v_qsl.into()]);
        }
        let mut windows = Table::new(format!("{name}_windows"), &["tau", "e_tau", "tau_qsl"]);
        for w in &report.windows {
            windows.push(vec![w.tau.into(), w.e_tau.into(), w.tau_qsl.into()]);
        }
        out.push(series);
        out.push(windows);
    }
    Ok(out)
}

/// Runs one job per temperature concurrently and concatenates the tables
/// in input order.
fn per_temperature<F>(temps: &[f64], job: F) -> Result<Vec<Table>>
where
    F: Fn(f64) -> Result<Vec<Table>> + Sync,
{
    let results: Vec<Result<Vec<Table>>> = thread::scope(|s| {
        let job = &job;
        let handles: Vec<_> = temps.iter().map(|&t| s.spawn(move || job(t))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

pub fn markov_tables(prefix: &str, gap: f64, gamma: f64, temps: &[f64], grid: TimeGrid, qsl: bool) -> Result<Vec<Table>> {
    per_temperature(temps, |temp| {
        let params = MarkovParams::new(gap, gamma, temp)?;
        let traj = integrate_master(&params, &grid)?;
        trajectory_tables(&format!("{prefix}markov_delta{gap}_gamma{gamma}_T{temp}"), &traj, qsl)
    })
}

pub fn swap_tables(prefix: &str, gap: f64, coupling: f64, temps: &[f64], grid: TimeGrid, qsl: bool) -> Result<Vec<Table>> {
    per_temperature(temps, |temp| {
        let model = SwapModel::new(SwapParams::new(gap, coupling, temp)?)?;
        let traj = model.trajectory(&grid)?;
        trajectory_tables(&format!("{prefix}swap_delta{gap}_j{coupling}_T{temp}"), &traj, qsl)
    })
}
