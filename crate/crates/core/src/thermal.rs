//! Gibbs populations and energy statistics.
//!
//! Block populations are evaluated in the log domain with a max shift, so
//! `T → 0⁺` degrades to the ground-state point mass instead of `0/0`.

use thiserror::Error;

use crate::spectra::EnergySpectrum;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThermalError {
    #[error("temperature must be positive and finite, got {0}")]
    InvalidTemperature(f64),
    #[error("thermal state has {state} levels but spectrum has {spectrum}")]
    Misaligned { state: usize, spectrum: usize },
}

pub(crate) fn check_temperature(temperature: f64) -> Result<(), ThermalError> {
    if temperature > 0.0 && temperature.is_finite() {
        Ok(())
    } else {
        Err(ThermalError::InvalidTemperature(temperature))
    }
}

/// Canonical state of a spectrum at one temperature.
///
/// `populations[k]` is the total probability of level block `k`, i.e. the
/// multiplicity times the per-state Boltzmann weight.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalState {
    pub temperature: f64,
    pub populations: Vec<f64>,
    pub log_partition: f64,
    pub mean_energy: f64,
    pub energy_variance: f64,
}

impl ThermalState {
    /// Natural log of each block population, `ln g_k − E_k/T − ln Z`.
    pub fn log_populations(&self, spectrum: &EnergySpectrum) -> Result<Vec<f64>, ThermalError> {
        self.check_aligned(spectrum)?;
        Ok(spectrum
            .levels()
            .iter()
            .map(|l| (l.multiplicity as f64).ln() - l.energy / self.temperature - self.log_partition)
            .collect())
    }

    fn check_aligned(&self, spectrum: &EnergySpectrum) -> Result<(), ThermalError> {
        if self.populations.len() == spectrum.len() {
            Ok(())
        } else {
            Err(ThermalError::Misaligned {
                state: self.populations.len(),
                spectrum: spectrum.len(),
            })
        }
    }
}

/// Gibbs state `g_k e^{−E_k/T} / Z` of every level block.
pub fn gibbs_state(spectrum: &EnergySpectrum, temperature: f64) -> Result<ThermalState, ThermalError> {
    check_temperature(temperature)?;
    let log_weights: Vec<f64> = spectrum
        .levels()
        .iter()
        .map(|l| (l.multiplicity as f64).ln() - l.energy / temperature)
        .collect();
    let shift = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = log_weights.iter().map(|w| (w - shift).exp()).sum();
    let log_partition = shift + sum.ln();
    let populations: Vec<f64> = log_weights
        .iter()
        .map(|w| (w - log_partition).exp())
        .collect();

    let mean: f64 = populations
        .iter()
        .zip(spectrum.energies())
        .map(|(p, e)| p * e)
        .sum();
    let variance: f64 = populations
        .iter()
        .zip(spectrum.energies())
        .map(|(p, e)| p * (e - mean) * (e - mean))
        .sum();

    Ok(ThermalState {
        temperature,
        populations,
        log_partition,
        mean_energy: mean,
        energy_variance: variance,
    })
}

/// `Σ_k p_k E_k`.
pub fn mean_energy(state: &ThermalState, spectrum: &EnergySpectrum) -> Result<f64, ThermalError> {
    state.check_aligned(spectrum)?;
    Ok(state
        .populations
        .iter()
        .zip(spectrum.energies())
        .map(|(p, e)| p * e)
        .sum())
}

/// `Σ_k p_k E_k² − (Σ_k p_k E_k)²`, evaluated about the mean.
pub fn energy_variance(state: &ThermalState, spectrum: &EnergySpectrum) -> Result<f64, ThermalError> {
    let mean = mean_energy(state, spectrum)?;
    Ok(state
        .populations
        .iter()
        .zip(spectrum.energies())
        .map(|(p, e)| p * (e - mean) * (e - mean))
        .sum())
}

/// Per-state (not per-block) populations, e.g. for plotting a single
/// representative state of a degenerate block.
pub fn per_state_populations(state: &ThermalState, spectrum: &EnergySpectrum) -> Result<Vec<f64>, ThermalError> {
    state.check_aligned(spectrum)?;
    Ok(state
        .populations
        .iter()
        .zip(spectrum.levels())
        .map(|(p, l)| p / l.multiplicity as f64)
        .collect())
}
