//! Fixtures shared by the benchmarks.

use qthermo_core::spectra::{degenerate_staircase, harmonic, oscillator_truncated};
use qthermo_core::{EnergySpectrum, MarkovParams, SwapModel, SwapParams, TemperatureGrid, TimeGrid};

/// Four-block staircase with multiplicities up to 10^6.
pub fn staircase() -> EnergySpectrum {
    degenerate_staircase(&[(0.0, 1), (1.0, 1), (5.0, 100), (25.0, 1_000_000)]).expect("valid staircase")
}

pub fn qubit() -> EnergySpectrum {
    harmonic(2, 1.0).expect("valid qubit")
}

pub fn oscillator() -> EnergySpectrum {
    oscillator_truncated(1.0, 10.0, 1e-15).expect("valid oscillator")
}

pub fn temperature_grid(count: usize) -> TemperatureGrid {
    TemperatureGrid::log(0.01, 50.0, count).expect("valid grid")
}

pub fn markov_params() -> MarkovParams {
    MarkovParams::new(1.0, 1.0, 1.0).expect("valid parameters")
}

pub fn swap_model() -> SwapModel {
    SwapModel::new(SwapParams::new(1.0, 1.0, 1.0).expect("valid parameters")).expect("diagonalizable")
}

pub fn time_grid(t_max: f64, steps: usize) -> TimeGrid {
    TimeGrid::new(t_max, steps).expect("valid grid")
}
