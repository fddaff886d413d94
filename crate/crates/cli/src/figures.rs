//! Curve sets behind each figure. One table per curve; table names encode
//! the parameters.

use std::f64::consts::PI;

use anyhow::Result;
use qthermo_core::metrology::ProbeFamily;
use qthermo_core::spectra::{degenerate_staircase, harmonic, oscillator_truncated, three_level};
use qthermo_core::{EnergySpectrum, TemperatureGrid, TimeGrid};

use crate::output::Table;
use crate::tables;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
    Fig4a,
    Fig4b,
    Fig5a,
    Fig5b,
}

/// Points on every reproduced QFI curve.
pub const FIGURE_GRID_POINTS: usize = 2000;
const TAIL_TOL: f64 = ProbeFamily::OSCILLATOR_TAIL_TOL;
const DYNAMICS_TEMPS: [f64; 4] = [0.25, 0.75, 1.5, 5.0];

fn qfi_grid(t_max: f64) -> Result<TemperatureGrid> {
    Ok(TemperatureGrid::log(0.01, t_max, FIGURE_GRID_POINTS)?)
}

fn oscillator(gap: f64, t_max: f64) -> Result<EnergySpectrum> {
    Ok(oscillator_truncated(gap, t_max, TAIL_TOL)?)
}

pub fn build(figure: Figure) -> Result<Vec<Table>> {
    match figure {
        Figure::Fig1 => fig1(),
        Figure::Fig2 => fig2(),
        Figure::Fig3 => fig3(),
        Figure::Fig4a => fig4("fig4a", [1.0, 5.0, 25.0]),
        Figure::Fig4b => fig4("fig4b", [1.0, 4.0, 15.0]),
        Figure::Fig5a => {
            let grid = TimeGrid::new(5.0, 10_000)?;
            tables::markov_tables("fig5a_", 1.0, 1.0, &DYNAMICS_TEMPS, grid, true)
        }
        Figure::Fig5b => {
            let grid = TimeGrid::new(2.0 * PI, 4000)?;
            tables::swap_tables("fig5b_", 1.0, 1.0, &DYNAMICS_TEMPS, grid, true)
        }
    }
}

fn fig1() -> Result<Vec<Table>> {
    let grid = qfi_grid(5.0)?;
    let mut out = Vec::new();
    for gap in [0.5, 1.0, 2.0] {
        out.push(tables::qfi_table(&format!("fig1a_qubit_delta{gap}"), &harmonic(2, gap)?, &grid));
        out.push(tables::qfi_table(
            &format!("fig1a_oscillator_delta{gap}"),
            &oscillator(gap, grid.max)?,
            &grid,
        ));
    }
    let gaps: Vec<f64> = (1..=16).map(|k| 0.25 * k as f64).collect();
    out.push(tables::optimum_sweep("fig1bc_qubit", &gaps, |g| Ok(harmonic(2, g)?))?);
    out.push(tables::optimum_sweep("fig1bc_oscillator", &gaps, |g| oscillator(g, 10.0 * g))?);
    Ok(out)
}

fn fig2() -> Result<Vec<Table>> {
    let grid = qfi_grid(5.0)?;
    let mut out = Vec::new();
    for d in 2..=5 {
        out.push(tables::qfi_table(&format!("fig2_harmonic_d{d}_delta1"), &harmonic(d, 1.0)?, &grid));
    }
    out.push(tables::qfi_table("fig2_oscillator_delta1", &oscillator(1.0, grid.max)?, &grid));
    Ok(out)
}

fn fig3() -> Result<Vec<Table>> {
    let grid = qfi_grid(5.0)?;
    let mut out = Vec::new();
    for gap2 in [1.0, 1.5, 2.0, 3.0] {
        out.push(tables::qfi_table(
            &format!("fig3_three_level_delta1_1_delta2_{gap2}"),
            &three_level(1.0, gap2)?,
            &grid,
        ));
    }
    out.push(tables::qfi_table("fig3_oscillator_delta1", &oscillator(1.0, grid.max)?, &grid));
    Ok(out)
}

fn fig4(id: &str, energies: [f64; 3]) -> Result<Vec<Table>> {
    let (n, m) = (100, 1_000_000);
    let grid = qfi_grid(50.0)?;
    let spectrum = degenerate_staircase(&[(0.0, 1), (energies[0], 1), (energies[1], n), (energies[2], m)])?;
    let tag = format!(
        "{id}_staircase_e{}_{}_{}_n{n}_m{m}",
        energies[0], energies[1], energies[2]
    );
    Ok(vec![
        tables::qfi_table(&tag, &spectrum, &grid),
        tables::peaks_table(&format!("{tag}_peaks"), &spectrum, &grid)?,
        tables::population_table(&format!("{tag}_populations"), &spectrum, &grid)?,
        tables::qfi_table(&format!("{id}_oscillator_delta1"), &oscillator(1.0, grid.max)?, &grid),
    ])
}
