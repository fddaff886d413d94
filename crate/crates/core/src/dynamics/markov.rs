//! Markovian thermalization of a qubit probe.
//!
//! `dϱ/dt = −i[H_s, ϱ] + γ(n̄+1)(σ₋ϱσ₊ − ½{σ₊σ₋, ϱ}) + γn̄(σ₊ϱσ₋ − ½{σ₋σ₊, ϱ})`
//! with `H_s = (Δ/2)σ_z`. The populations obey
//! `dp_e/dt = γn̄ − Γ p_e`, `Γ = γ(2n̄+1)`, whose fixed point is the Gibbs
//! state at the bath temperature.

use num_complex::Complex64;

use super::{
    bose_occupation, check_positive, check_time, pauli, CMatrix, DensityMatrix, DynamicsError, TimeGrid,
    Trajectory, TrajectoryPoint,
};

/// Largest RK4 step accepted, in units of `1/Γ`.
pub const MAX_STEP_RATE_PRODUCT: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkovParams {
    pub gap: f64,
    pub gamma: f64,
    pub temperature: f64,
    /// `n̄ = 1/(e^{Δ/T} − 1)`
    pub nbar: f64,
    /// `Γ = γ(2n̄ + 1)`
    pub rate: f64,
}

impl MarkovParams {
    pub fn new(gap: f64, gamma: f64, temperature: f64) -> Result<Self, DynamicsError> {
        check_positive("gap", gap)?;
        check_positive("gamma", gamma)?;
        check_positive("temperature", temperature)?;
        let nbar = bose_occupation(gap, temperature);
        if nbar.is_nan() || nbar <= 0.0 {
            return Err(DynamicsError::InvalidParameter(format!(
                "thermal occupation underflows at Δ/T = {}",
                gap / temperature
            )));
        }
        Ok(MarkovParams {
            gap,
            gamma,
            temperature,
            nbar,
            rate: gamma * (2.0 * nbar + 1.0),
        })
    }

    /// Long-time excited population `n̄/(2n̄+1)`.
    pub fn steady_excited_population(&self) -> f64 {
        self.nbar / (2.0 * self.nbar + 1.0)
    }

    pub fn hamiltonian(&self) -> CMatrix {
        pauli::z().scale_real(0.5 * self.gap)
    }
}

/// `p_e(t) = (n̄/(2n̄+1))(1 − e^{−Γt})` from the ground state.
pub fn markov_excited_population(params: &MarkovParams, t: f64) -> Result<f64, DynamicsError> {
    check_time(t)?;
    Ok(params.steady_excited_population() * -(-params.rate * t).exp_m1())
}

/// `dp_e/dt` along the ground-start solution, `γn̄ e^{−Γt}`.
pub fn markov_excited_rate(params: &MarkovParams, t: f64) -> Result<f64, DynamicsError> {
    check_time(t)?;
    Ok(params.gamma * params.nbar * (-params.rate * t).exp())
}

/// Full right-hand side `D(ϱ)` of the master equation.
pub fn markov_generator(params: &MarkovParams, state: &CMatrix) -> Result<CMatrix, DynamicsError> {
    if state.dim() != 2 {
        return Err(DynamicsError::DimensionMismatch {
            expected: 2,
            got: state.dim(),
        });
    }
    let minus_i = Complex64::new(0.0, -1.0);
    let sp = pauli::raising();
    let sm = pauli::lowering();
    let spsm = &sp * &sm;
    let smsp = &sm * &sp;

    let unitary = params.hamiltonian().commutator(state).scale(minus_i);
    let emission = &(&(&sm * state) * &sp) - &spsm.anticommutator(state).scale_real(0.5);
    let absorption = &(&(&sp * state) * &sm) - &smsp.anticommutator(state).scale_real(0.5);
    let dissipator = &emission.scale_real(params.gamma * (params.nbar + 1.0))
        + &absorption.scale_real(params.gamma * params.nbar);
    Ok(&unitary + &dissipator)
}

/// Classic RK4 from the ground state on a uniform grid with `h ≤ 0.01/Γ`.
pub fn integrate_master(params: &MarkovParams, grid: &TimeGrid) -> Result<Trajectory, DynamicsError> {
    integrate_master_from(params, &DensityMatrix::ground(), grid)
}

pub fn integrate_master_from(
    params: &MarkovParams,
    initial: &DensityMatrix,
    grid: &TimeGrid,
) -> Result<Trajectory, DynamicsError> {
    if initial.dim() != 2 {
        return Err(DynamicsError::DimensionMismatch {
            expected: 2,
            got: initial.dim(),
        });
    }
    let h = grid.step();
    let max = MAX_STEP_RATE_PRODUCT / params.rate;
    if h > max * (1.0 + 1e-12) {
        return Err(DynamicsError::StepTooLarge { step: h, max });
    }
    let times = grid.times();
    let mut points = Vec::with_capacity(times.len());
    let mut rho = initial.matrix().clone();
    for (k, &t) in times.iter().enumerate() {
        if k > 0 {
            let dt = t - times[k - 1];
            rho = rk4_step(params, &rho, dt)?;
            if !rho.is_finite() {
                return Err(DynamicsError::NonFinite(t));
            }
        }
        let state = DensityMatrix::new(rho.clone())?;
        let generator = markov_generator(params, &rho)?;
        points.push(TrajectoryPoint { t, state, generator });
    }
    Trajectory::new(points)
}

fn rk4_step(params: &MarkovParams, rho: &CMatrix, h: f64) -> Result<CMatrix, DynamicsError> {
    let k1 = markov_generator(params, rho)?;
    let k2 = markov_generator(params, &(rho + &k1.scale_real(0.5 * h)))?;
    let k3 = markov_generator(params, &(rho + &k2.scale_real(0.5 * h)))?;
    let k4 = markov_generator(params, &(rho + &k3.scale_real(h)))?;
    let incr = &(&k1 + &k2.scale_real(2.0)) + &(&k3.scale_real(2.0) + &k4);
    Ok(rho + &incr.scale_real(h / 6.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::operator_norm;

    fn unit() -> MarkovParams {
        MarkovParams::new(1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        let p = unit();
        assert!((p.rate - 2.163954).abs() < 1e-6);
        assert_eq!(markov_excited_population(&p, 0.0).unwrap(), 0.0);
        assert!((markov_excited_population(&p, 100.0).unwrap() - 0.268941).abs() < 1e-6);
        let gibbs = 0.5 * (1.0 - 0.5f64.tanh());
        assert!((markov_excited_population(&p, 100.0).unwrap() - gibbs).abs() < 1e-15);
        assert!((markov_excited_population(&p, 1.0).unwrap() - 0.238048).abs() < 1e-6);
        assert!(markov_excited_population(&p, -1.0).is_err());
    }

    #[test]
    fn generator_examples() {
        let p = unit();
        let g = markov_generator(&p, DensityMatrix::ground().matrix()).unwrap();
        assert!((g[(1, 1)].re - 0.581977).abs() < 1e-6);
        assert!((g[(0, 0)].re + 0.581977).abs() < 1e-6);
        assert!((operator_norm(&g).unwrap() - 0.581977).abs() < 1e-6);

        let gibbs = DensityMatrix::qubit_gibbs(1.0, 1.0).unwrap();
        let g = markov_generator(&p, gibbs.matrix()).unwrap();
        assert!(g.frobenius_norm() < 1e-14);

        let mixed = DensityMatrix::diagonal(&[0.5, 0.5]).unwrap();
        let g = markov_generator(&p, mixed.matrix()).unwrap();
        assert!((g[(1, 1)].re + 0.5).abs() < 1e-14);
        assert!((g[(1, 1)].re - (p.gamma * p.nbar - 0.5 * p.rate)).abs() < 1e-15);

        assert!(markov_generator(&p, &CMatrix::zeros(4)).is_err());
    }

    #[test]
    fn generator_is_traceless_hermitian_with_coherences() {
        let p = unit();
        let mut m = CMatrix::from_real_diagonal(&[0.7, 0.3]);
        m[(0, 1)] = Complex64::new(0.1, 0.2);
        m[(1, 0)] = Complex64::new(0.1, -0.2);
        let g = markov_generator(&p, &m).unwrap();
        assert!(g.trace().norm() < 1e-15);
        assert!(g.hermiticity_defect() < 1e-15);
        // coherence decays at Γ/2 and rotates at Δ
        let expected = Complex64::new(-0.5 * p.rate, p.gap) * m[(0, 1)];
        assert!((g[(0, 1)] - expected).norm() < 1e-14);
    }

    #[test]
    fn rk4_matches_closed_form() {
        let p = unit();
        let grid = TimeGrid::new(5.0, 5000).unwrap();
        let traj = integrate_master(&p, &grid).unwrap();
        let end = traj.points().last().unwrap();
        assert!((end.state.excited_population() - 0.268936).abs() < 1e-6);
        let mut worst: f64 = 0.0;
        for pt in traj.points() {
            let exact = markov_excited_population(&p, pt.t).unwrap();
            worst = worst.max((pt.state.excited_population() - exact).abs());
            assert!((pt.state.matrix().trace().re - 1.0).abs() < 1e-12);
            assert!(pt.state.coherence() < 1e-12);
            let min = crate::dynamics::hermitian_eigendecomposition(pt.state.matrix())
                .unwrap()
                .values[0];
            assert!(min >= -1e-12);
        }
        assert!(worst < 1e-8, "sup error {worst:e}");
    }

    #[test]
    fn rk4_rejects_large_step() {
        let p = unit();
        let grid = TimeGrid::new(5.0, 100).unwrap();
        assert!(matches!(
            integrate_master(&p, &grid),
            Err(DynamicsError::StepTooLarge { .. })
        ));
    }

    #[test]
    fn params_validation() {
        assert!(MarkovParams::new(0.0, 1.0, 1.0).is_err());
        assert!(MarkovParams::new(1.0, -1.0, 1.0).is_err());
        assert!(MarkovParams::new(1.0, 1.0, 0.0).is_err());
        let p = unit();
        assert!(p.nbar > 0.0 && p.rate > p.gamma);
    }
}
