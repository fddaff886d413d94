//! Single-probe quantum thermometry.
//!
//! Quantum Fisher information of Gibbs states over discrete spectra with
//! arbitrary degeneracies, optimal-temperature search, and speed-limit
//! functionals for two thermalization protocols of a qubit probe.
//!
//! Units are `k_B = ħ = 1` throughout.

pub mod dynamics;
pub mod metrology;
pub mod qsl;
pub mod spectra;
pub mod thermal;

use thiserror::Error;

pub use dynamics::markov::MarkovParams;
pub use dynamics::swap::{SwapModel, SwapParams};
pub use dynamics::{CMatrix, DensityMatrix, DynamicsError, TimeGrid, Trajectory, TrajectoryPoint};
pub use metrology::{
    CramerRaoBound, GridScale, MetrologyError, OptimumReport, ProbeFamily, QfiScan, ScalingFit, ScalingPoint,
    TemperatureGrid,
};
pub use qsl::{QslError, QslReport, QslSample, QslWindow};
pub use spectra::{EnergySpectrum, ErrorCategory, Level, SpectrumError};
pub use thermal::{ThermalError, ThermalState};

/// Any error raised by this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Thermal(#[from] ThermalError),
    #[error(transparent)]
    Metrology(#[from] MetrologyError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Qsl(#[from] QslError),
}
