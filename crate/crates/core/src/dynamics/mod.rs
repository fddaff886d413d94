//! Thermalization of a two-level probe.
//!
//! Two protocols are modelled, both starting from the probe ground state:
//!
//! * [`markov`]: a Lindblad master equation with a thermal bath at the
//!   probe gap, solved in closed form and by RK4;
//! * [`swap`]: unitary excitation-preserving coupling to a single thermal
//!   qubit, which swaps the environment state onto the probe at `t = π/J`.
//!
//! Basis convention for a qubit: index 0 is the ground state, index 1 the
//! excited state. Joint states are ordered probe ⊗ environment.

pub mod markov;
pub mod matrix;
pub mod swap;

use thiserror::Error;

pub use matrix::{hermitian_eigendecomposition, operator_norm, partial_trace_env, CMatrix, Eigen};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("trace must be 1, got {0}")]
    InvalidTrace(f64),
    #[error("state is not positive semi-definite (min eigenvalue {0:e})")]
    NotPositive(f64),
    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),
    #[error("step {step} exceeds the stability limit {max}")]
    StepTooLarge { step: f64, max: f64 },
    #[error("non-finite state encountered at t = {0}")]
    NonFinite(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("Jacobi iteration did not converge (off-diagonal norm {0:e})")]
    NoConvergence(f64),
}

pub(crate) fn check_positive(name: &str, value: f64) -> Result<(), DynamicsError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(DynamicsError::InvalidParameter(format!(
            "{name} must be positive and finite, got {value}"
        )))
    }
}

pub(crate) fn check_time(t: f64) -> Result<(), DynamicsError> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(DynamicsError::NegativeTime(t))
    }
}

/// Thermal occupation `1/(e^{Δ/T} − 1)`.
pub fn bose_occupation(gap: f64, temperature: f64) -> f64 {
    1.0 / (gap / temperature).exp_m1()
}

/// Excited-state Gibbs population of a qubit, `(1 − tanh(Δ/2T))/2`.
pub fn qubit_excited_population(gap: f64, temperature: f64) -> f64 {
    0.5 * (1.0 - (0.5 * gap / temperature).tanh())
}

pub mod pauli {
    //! Single-qubit operators in the (ground, excited) basis.
    use super::CMatrix;
    use num_complex::Complex64;

    fn m(entries: [(f64, f64); 4]) -> CMatrix {
        CMatrix::from_rows(2, entries.iter().map(|&(r, i)| Complex64::new(r, i)).collect())
            .expect("2x2")
    }

    /// `σ₊ = |e⟩⟨g|`
    pub fn raising() -> CMatrix {
        m([(0.0, 0.0), (0.0, 0.0), (1.0, 0.0), (0.0, 0.0)])
    }

    /// `σ₋ = |g⟩⟨e|`
    pub fn lowering() -> CMatrix {
        m([(0.0, 0.0), (1.0, 0.0), (0.0, 0.0), (0.0, 0.0)])
    }

    /// `σ₊ + σ₋`
    pub fn x() -> CMatrix {
        m([(0.0, 0.0), (1.0, 0.0), (1.0, 0.0), (0.0, 0.0)])
    }

    /// `−i(σ₊ − σ₋)`
    pub fn y() -> CMatrix {
        m([(0.0, 0.0), (0.0, 1.0), (0.0, -1.0), (0.0, 0.0)])
    }

    /// `|e⟩⟨e| − |g⟩⟨g|`
    pub fn z() -> CMatrix {
        CMatrix::from_real_diagonal(&[-1.0, 1.0])
    }

    /// `|e⟩⟨e|`
    pub fn excited_projector() -> CMatrix {
        CMatrix::from_real_diagonal(&[0.0, 1.0])
    }
}

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const POSITIVITY_TOL: f64 = 1e-10;

/// Validated density matrix: Hermitian, unit trace, positive semi-definite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self, DynamicsError> {
        if !matrix.is_finite() {
            return Err(DynamicsError::InvalidParameter("non-finite matrix entry".into()));
        }
        let defect = matrix.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(DynamicsError::NotHermitian(defect));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(DynamicsError::InvalidTrace(tr.re));
        }
        let min_eig = hermitian_eigendecomposition(&matrix)?.values[0];
        if min_eig < -POSITIVITY_TOL {
            return Err(DynamicsError::NotPositive(min_eig));
        }
        Ok(DensityMatrix(matrix))
    }

    /// Diagonal state with the given populations.
    pub fn diagonal(populations: &[f64]) -> Result<Self, DynamicsError> {
        Self::new(CMatrix::from_real_diagonal(populations))
    }

    /// Qubit ground state `|g⟩⟨g|`.
    pub fn ground() -> Self {
        DensityMatrix(CMatrix::from_real_diagonal(&[1.0, 0.0]))
    }

    /// Qubit Gibbs state for gap `Δ` at temperature `T`.
    pub fn qubit_gibbs(gap: f64, temperature: f64) -> Result<Self, DynamicsError> {
        check_positive("gap", gap)?;
        check_positive("temperature", temperature)?;
        let pe = qubit_excited_population(gap, temperature);
        Self::diagonal(&[1.0 - pe, pe])
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn populations(&self) -> Vec<f64> {
        self.0.real_diagonal()
    }

    /// Population of the last basis state (the excited state for a qubit).
    pub fn excited_population(&self) -> f64 {
        let n = self.0.dim();
        self.0[(n - 1, n - 1)].re
    }

    /// Largest off-diagonal magnitude.
    pub fn coherence(&self) -> f64 {
        self.0.max_abs_off_diagonal()
    }

    pub fn kron(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix(self.0.kron(&other.0))
    }

    /// Expectation value `Tr(ϱ O)` (real part).
    pub fn expectation(&self, observable: &CMatrix) -> f64 {
        (&self.0 * observable).trace().re
    }
}

/// One sample of a probe trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub state: DensityMatrix,
    /// Generator output `D(ϱ_s(t)) = dϱ_s/dt`.
    pub generator: CMatrix,
}

/// Time series of probe states on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    points: Vec<TrajectoryPoint>,
}

impl Trajectory {
    pub fn new(points: Vec<TrajectoryPoint>) -> Result<Self, DynamicsError> {
        if points.is_empty() {
            return Err(DynamicsError::InvalidParameter("empty trajectory".into()));
        }
        if points.windows(2).any(|w| w[1].t.is_nan() || w[1].t <= w[0].t) {
            return Err(DynamicsError::InvalidParameter(
                "trajectory times must be strictly increasing".into(),
            ));
        }
        Ok(Trajectory { points })
    }

    pub fn points(&self) -> &[TrajectoryPoint] {
        &self.points
    }

    pub fn initial(&self) -> &TrajectoryPoint {
        &self.points[0]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.t)
    }
}

/// Uniform grid `t_k = k·t_max/steps`, `k = 0..=steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t_max: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, steps: usize) -> Result<Self, DynamicsError> {
        check_positive("t_max", t_max)?;
        if steps == 0 {
            return Err(DynamicsError::InvalidParameter("steps must be at least 1".into()));
        }
        Ok(TimeGrid { t_max, steps })
    }

    pub fn step(&self) -> f64 {
        self.t_max / self.steps as f64
    }

    pub fn times(&self) -> Vec<f64> {
        let h = self.step();
        let mut ts: Vec<f64> = (0..=self.steps).map(|k| k as f64 * h).collect();
        ts[self.steps] = self.t_max;
        ts
    }
}
