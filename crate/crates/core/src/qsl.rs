//! Speed-limit functionals on probe trajectories.
//!
//! All states reached from the ground start are diagonal, so the fidelity
//! is the classical overlap `Σ √(p_k q_k)`. Inputs are checked for
//! diagonality rather than silently passed to a general Uhlmann fidelity.

use thiserror::Error;

use crate::dynamics::markov::{markov_excited_population, MarkovParams};
use crate::dynamics::{operator_norm, CMatrix, DensityMatrix, DynamicsError, Trajectory, TrajectoryPoint};

const NORMALIZATION_TOL: f64 = 1e-10;
const FIDELITY_CLAMP_TOL: f64 = 1e-15;
const DIAGONAL_TOL: f64 = 1e-12;
/// Minimum number of samples in `[0, τ]` for a window integral.
pub const MIN_WINDOW_POINTS: usize = 100;
const GRID_MATCH_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QslError {
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error("probability vector sums to {0}, not 1")]
    NotNormalized(f64),
    #[error("probability vectors have lengths {0} and {1}")]
    LengthMismatch(usize, usize),
    #[error("probability vector has a negative or non-finite entry")]
    InvalidProbability,
    #[error("fidelity {0} outside [0, 1]")]
    FidelityOutOfRange(f64),
    #[error("state is not diagonal (largest coherence {0:e})")]
    NotDiagonal(f64),
    #[error("speed is undefined at zero Bures angle (t = {0})")]
    UndefinedAtOrigin(f64),
    #[error("trajectory does not cover [0, {tau}] with at least {min} uniform samples")]
    InsufficientCoverage { tau: f64, min: usize },
    #[error("time must be positive, got {0}")]
    NonPositiveTime(f64),
}

pub type Result<T> = std::result::Result<T, QslError>;

fn check_probabilities(p: &[f64]) -> Result<()> {
    if p.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(QslError::InvalidProbability);
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > NORMALIZATION_TOL {
        return Err(QslError::NotNormalized(s));
    }
    Ok(())
}

/// `Σ_k √(p_k q_k)` for commuting states.
pub fn fidelity_diagonal(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(QslError::LengthMismatch(p.len(), q.len()));
    }
    check_probabilities(p)?;
    check_probabilities(q)?;
    let f: f64 = p.iter().zip(q).map(|(a, b)| (a * b).sqrt()).sum();
    Ok(f.min(1.0))
}

/// `arccos F`, with `F` clamped into `[0, 1]` within `1e-15`.
pub fn bures_angle(fidelity: f64) -> Result<f64> {
    if !(-FIDELITY_CLAMP_TOL..=1.0 + FIDELITY_CLAMP_TOL).contains(&fidelity) {
        return Err(QslError::FidelityOutOfRange(fidelity));
    }
    Ok(fidelity.clamp(0.0, 1.0).acos())
}

/// `max |λ|` of a Hermitian generator.
pub fn generator_op_norm(generator: &CMatrix) -> Result<f64> {
    Ok(operator_norm(generator)?)
}

fn diagonal_populations(state: &DensityMatrix) -> Result<Vec<f64>> {
    let c = state.coherence();
    if c > DIAGONAL_TOL {
        return Err(QslError::NotDiagonal(c));
    }
    Ok(state.populations())
}

/// Fidelity between two diagonal density matrices.
pub fn state_fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    fidelity_diagonal(&diagonal_populations(a)?, &diagonal_populations(b)?)
}

/// `sin B cos B` from `F = cos B`, as `F √((1 − F)(1 + F))`.
fn sin_cos(fidelity: f64) -> f64 {
    fidelity * ((1.0 - fidelity) * (1.0 + fidelity)).sqrt()
}

/// `‖D(ϱ_t)‖_op / (cos B sin B)` with `B` measured from `initial`.
pub fn v_qsl(initial: &DensityMatrix, point: &TrajectoryPoint) -> Result<f64> {
    let f = state_fidelity(initial, &point.state)?;
    let b = bures_angle(f)?;
    if b == 0.0 {
        return Err(QslError::UndefinedAtOrigin(point.t));
    }
    Ok(generator_op_norm(&point.generator)? / sin_cos(f))
}

fn window_end(traj: &Trajectory, tau: f64) -> Result<usize> {
    let coverage = QslError::InsufficientCoverage {
        tau,
        min: MIN_WINDOW_POINTS,
    };
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(QslError::NonPositiveTime(tau));
    }
    let pts = traj.points();
    if pts[0].t != 0.0 {
        return Err(coverage);
    }
    let k = pts
        .iter()
        .position(|p| (p.t - tau).abs() <= GRID_MATCH_TOL * tau.max(1.0))
        .ok_or(coverage.clone())?;
    if k + 1 < MIN_WINDOW_POINTS {
        return Err(coverage);
    }
    let h = pts[k].t / k as f64;
    let uniform = pts[..=k]
        .windows(2)
        .all(|w| ((w[1].t - w[0].t) - h).abs() <= 1e-9 * h);
    if !uniform {
        return Err(coverage);
    }
    Ok(k)
}

/// Composite Simpson on uniform samples; the 3/8 rule closes an odd count
/// of intervals.
fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len() - 1;
    let simpson_1_3 = |v: &[f64]| -> f64 {
        let m = v.len() - 1;
        let mut s = v[0] + v[m];
        for (i, x) in v.iter().enumerate().take(m).skip(1) {
            s += if i % 2 == 1 { 4.0 * x } else { 2.0 * x };
        }
        s * h / 3.0
    };
    match n {
        0 => 0.0,
        1 => 0.5 * h * (values[0] + values[1]),
        _ if n.is_multiple_of(2) => simpson_1_3(values),
        3 => 3.0 * h / 8.0 * (values[0] + 3.0 * values[1] + 3.0 * values[2] + values[3]),
        _ => {
            let tail = &values[n - 3..];
            simpson_1_3(&values[..=n - 3]) + 3.0 * h / 8.0 * (tail[0] + 3.0 * tail[1] + 3.0 * tail[2] + tail[3])
        }
    }
}

fn generator_norms(points: &[TrajectoryPoint]) -> Result<Vec<f64>> {
    points.iter().map(|p| generator_op_norm(&p.generator)).collect()
}

/// Window values from precomputed generator norms of the whole trajectory.
fn window(traj: &Trajectory, norms: &[f64], tau: f64) -> Result<QslWindow> {
    let k = window_end(traj, tau)?;
    let t_end = traj.points()[k].t;
    let e = simpson(&norms[..=k], t_end / k as f64) / t_end;
    let f = state_fidelity(&traj.initial().state, &traj.points()[k].state)?;
    let sin2 = (1.0 - f) * (1.0 + f);
    Ok(QslWindow {
        tau,
        e_tau: e,
        tau_qsl: sin2 / (2.0 * e),
    })
}

/// `E_τ = (1/τ) ∫₀^τ ‖D(ϱ_t)‖_op dt`; `τ` must be a grid time.
pub fn e_tau(traj: &Trajectory, tau: f64) -> Result<f64> {
    let k = window_end(traj, tau)?;
    let norms = generator_norms(&traj.points()[..=k])?;
    Ok(window(traj, &norms, tau)?.e_tau)
}

/// `τ_QSL = sin²B(τ) / (2E_τ)`.
pub fn tau_qsl(traj: &Trajectory, tau: f64) -> Result<f64> {
    let k = window_end(traj, tau)?;
    let norms = generator_norms(&traj.points()[..=k])?;
    Ok(window(traj, &norms, tau)?.tau_qsl)
}

/// `γn̄ e^{−Γt} / √(p_e(1 − p_e))` for the ground-start Markov protocol.
pub fn v_qsl_markov_closed(params: &MarkovParams, t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(QslError::NonPositiveTime(t));
    }
    let pe = markov_excited_population(params, t)?;
    let rate = params.gamma * params.nbar * (-params.rate * t).exp();
    Ok(rate / (pe * (1.0 - pe)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QslSample {
    pub t: f64,
    pub fidelity: f64,
    pub bures: f64,
    pub v_qsl: f64,
    pub generator_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QslWindow {
    pub tau: f64,
    pub e_tau: f64,
    pub tau_qsl: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QslReport {
    /// Points with `B > 0`; the origin is excluded.
    pub series: Vec<QslSample>,
    pub windows: Vec<QslWindow>,
}

impl QslReport {
    /// Speed series over the whole trajectory and one window per `τ`.
    pub fn from_trajectory(traj: &Trajectory, taus: &[f64]) -> Result<Self> {
        let initial = &traj.initial().state;
        let norms = generator_norms(traj.points())?;
        let mut series = Vec::with_capacity(traj.len());
        for (p, &generator_norm) in traj.points().iter().zip(&norms) {
            let fidelity = state_fidelity(initial, &p.state)?;
            let bures = bures_angle(fidelity)?;
            if bures == 0.0 {
                continue;
            }
            series.push(QslSample {
                t: p.t,
                fidelity,
                bures,
                v_qsl: generator_norm / sin_cos(fidelity),
                generator_norm,
            });
        }
        let windows = taus
            .iter()
            .map(|&tau| window(traj, &norms, tau))
            .collect::<Result<Vec<_>>>()?;
        Ok(QslReport { series, windows })
    }

    /// Every grid time from the first admissible window up to `t_limit`.
    pub fn window_times(traj: &Trajectory, t_limit: f64) -> Vec<f64> {
        traj.times()
            .skip(MIN_WINDOW_POINTS - 1)
            .filter(|&t| t <= t_limit * (1.0 + GRID_MATCH_TOL))
            .collect()
    }
}
