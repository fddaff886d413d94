//! Probe coupled to a single thermal qubit by a flip-flop interaction.
//!
//! `H = (Δ/2)(σ_z ⊗ 1 + 1 ⊗ σ_z) + (J/4)(σ_x ⊗ σ_x + σ_y ⊗ σ_y)`, joint
//! initial state `|g⟩⟨g| ⊗ Gibbs(T)`. The interaction preserves the total
//! excitation number, so the probe population Rabi-oscillates in the
//! one-excitation sector: `p_e(t) = q sin²(Jt/2)` with `q` the environment
//! excited population.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{
    check_positive, check_time, hermitian_eigendecomposition, partial_trace_env, pauli,
    qubit_excited_population, CMatrix, DensityMatrix, DynamicsError, Eigen, TimeGrid, Trajectory,
    TrajectoryPoint,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapParams {
    pub gap: f64,
    pub coupling: f64,
    pub temperature: f64,
}

impl SwapParams {
    pub fn new(gap: f64, coupling: f64, temperature: f64) -> Result<Self, DynamicsError> {
        check_positive("gap", gap)?;
        check_positive("coupling", coupling)?;
        check_positive("temperature", temperature)?;
        let p = SwapParams {
            gap,
            coupling,
            temperature,
        };
        if !p.swap_time().is_finite() {
            return Err(DynamicsError::InvalidParameter(format!(
                "swap time π/J is not finite for J = {coupling}"
            )));
        }
        Ok(p)
    }

    /// `π/J`
    pub fn swap_time(&self) -> f64 {
        PI / self.coupling
    }

    /// Environment excited population `q = (1 − tanh(Δ/2T))/2`.
    pub fn environment_excited_population(&self) -> f64 {
        qubit_excited_population(self.gap, self.temperature)
    }
}

/// Joint Hamiltonian, probe ⊗ environment ordering.
pub fn total_hamiltonian(gap: f64, coupling: f64) -> CMatrix {
    let id = CMatrix::identity(2);
    let z = pauli::z();
    let free = &z.kron(&id) + &id.kron(&z);
    let flip_flop = &pauli::x().kron(&pauli::x()) + &pauli::y().kron(&pauli::y());
    &free.scale_real(0.5 * gap) + &flip_flop.scale_real(0.25 * coupling)
}

/// Total excitation number `|e⟩⟨e| ⊗ 1 + 1 ⊗ |e⟩⟨e|`.
pub fn excitation_number() -> CMatrix {
    let id = CMatrix::identity(2);
    let n = pauli::excited_projector();
    &n.kron(&id) + &id.kron(&n)
}

/// `p_e(t) = q sin²(Jt/2)`.
pub fn swap_excited_population(params: &SwapParams, t: f64) -> Result<f64, DynamicsError> {
    check_time(t)?;
    Ok(params.environment_excited_population() * (0.5 * params.coupling * t).sin().powi(2))
}

/// `dp_e/dt = q (J/2) sin(Jt)`.
pub fn swap_excited_rate(params: &SwapParams, t: f64) -> Result<f64, DynamicsError> {
    check_time(t)?;
    Ok(params.environment_excited_population() * 0.5 * params.coupling * (params.coupling * t).sin())
}

/// Swap model with the joint Hamiltonian diagonalized once.
#[derive(Debug, Clone)]
pub struct SwapModel {
    params: SwapParams,
    hamiltonian: CMatrix,
    eigen: Eigen,
    initial: CMatrix,
}

impl SwapModel {
    pub fn new(params: SwapParams) -> Result<Self, DynamicsError> {
        let hamiltonian = total_hamiltonian(params.gap, params.coupling);
        let eigen = hermitian_eigendecomposition(&hamiltonian)?;
        let env = DensityMatrix::qubit_gibbs(params.gap, params.temperature)?;
        let initial = DensityMatrix::ground().kron(&env).matrix().clone();
        Ok(SwapModel {
            params,
            hamiltonian,
            eigen,
            initial,
        })
    }

    pub fn params(&self) -> &SwapParams {
        &self.params
    }

    pub fn hamiltonian(&self) -> &CMatrix {
        &self.hamiltonian
    }

    pub fn initial_joint_state(&self) -> &CMatrix {
        &self.initial
    }

    /// `U(t) = V e^{−iΛt} V†`.
    pub fn propagator(&self, t: f64) -> Result<CMatrix, DynamicsError> {
        check_time(t)?;
        Ok(self.eigen.apply(|l| Complex64::from_polar(1.0, -l * t)))
    }

    pub fn joint_state(&self, t: f64) -> Result<CMatrix, DynamicsError> {
        let u = self.propagator(t)?;
        Ok(&(&u * &self.initial) * &u.adjoint())
    }

    pub fn reduced_state(&self, t: f64) -> Result<DensityMatrix, DynamicsError> {
        let joint = self.joint_state(t)?;
        DensityMatrix::new(hermitian_part(&partial_trace_env(&joint)?))
    }

    /// `Tr_E(−i[H, ϱ(t)])`.
    pub fn generator(&self, t: f64) -> Result<CMatrix, DynamicsError> {
        let joint = self.joint_state(t)?;
        self.generator_of(&joint)
    }

    fn generator_of(&self, joint: &CMatrix) -> Result<CMatrix, DynamicsError> {
        let rhs = self.hamiltonian.commutator(joint).scale(Complex64::new(0.0, -1.0));
        Ok(hermitian_part(&partial_trace_env(&rhs)?))
    }

    pub fn trajectory(&self, grid: &TimeGrid) -> Result<Trajectory, DynamicsError> {
        let mut points = Vec::with_capacity(grid.steps + 1);
        for t in grid.times() {
            let joint = self.joint_state(t)?;
            if !joint.is_finite() {
                return Err(DynamicsError::NonFinite(t));
            }
            let state = DensityMatrix::new(hermitian_part(&partial_trace_env(&joint)?))?;
            let generator = self.generator_of(&joint)?;
            points.push(TrajectoryPoint { t, state, generator });
        }
        Trajectory::new(points)
    }
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + &m.adjoint()).scale_real(0.5)
}

pub fn swap_reduced_state(params: &SwapParams, t: f64) -> Result<DensityMatrix, DynamicsError> {
    SwapModel::new(*params)?.reduced_state(t)
}

pub fn swap_generator(params: &SwapParams, t: f64) -> Result<CMatrix, DynamicsError> {
    SwapModel::new(*params)?.generator(t)
}

pub fn swap_trajectory(params: &SwapParams, grid: &TimeGrid) -> Result<Trajectory, DynamicsError> {
    SwapModel::new(*params)?.trajectory(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(t: f64) -> SwapParams {
        SwapParams::new(1.0, 1.0, t).unwrap()
    }

    fn diag_fidelity(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
        a.populations()
            .iter()
            .zip(b.populations())
            .map(|(p, q)| (p.max(0.0) * q.max(0.0)).sqrt())
            .sum()
    }

    #[test]
    fn initial_state_is_ground() {
        let s = swap_reduced_state(&unit(1.0), 0.0).unwrap();
        assert!(s.matrix().max_abs_diff(DensityMatrix::ground().matrix()) < 1e-15);
        assert!(swap_reduced_state(&unit(1.0), -0.1).is_err());
    }

    #[test]
    fn rabi_half_swap() {
        let p = unit(1.0);
        let s = swap_reduced_state(&p, PI / 2.0).unwrap();
        assert!((s.excited_population() - 0.134470).abs() < 1e-6);
        assert!((s.excited_population() - swap_excited_population(&p, PI / 2.0).unwrap()).abs() < 1e-14);
        let g = swap_generator(&p, PI / 2.0).unwrap();
        assert!((g[(1, 1)].re - 0.134470).abs() < 1e-6);
        assert!((g[(0, 0)].re + 0.134470).abs() < 1e-6);
        assert!(g.max_abs_off_diagonal() < 1e-14);
    }

    #[test]
    fn full_swap_thermalizes() {
        for t in [0.25, 0.75, 1.0, 1.5, 5.0] {
            let p = unit(t);
            let s = swap_reduced_state(&p, p.swap_time()).unwrap();
            let gibbs = DensityMatrix::qubit_gibbs(1.0, t).unwrap();
            assert!(diag_fidelity(&s, &gibbs) >= 1.0 - 1e-12);
            assert!(swap_generator(&p, p.swap_time()).unwrap().frobenius_norm() < 1e-12);
        }
        assert!(swap_generator(&unit(1.0), 0.0).unwrap().frobenius_norm() < 1e-15);
    }

    #[test]
    fn closed_form_over_a_period() {
        let p = SwapParams::new(1.3, 0.7, 0.8).unwrap();
        let m = SwapModel::new(p).unwrap();
        for k in 0..=200 {
            let t = k as f64 * 0.05;
            let s = m.reduced_state(t).unwrap();
            assert!((s.excited_population() - swap_excited_population(&p, t).unwrap()).abs() < 1e-12);
            assert!(s.coherence() < 1e-12);
            let g = m.generator(t).unwrap();
            assert!((g[(1, 1)].re - swap_excited_rate(&p, t).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn periodicity_and_excitation_conservation() {
        let p = SwapParams::new(1.0, 1.0, 0.75).unwrap();
        let m = SwapModel::new(p).unwrap();
        let period = 2.0 * PI / p.coupling;
        let n = excitation_number();
        let n0 = (&m.initial_joint_state().clone() * &n).trace().re;
        for k in 0..20 {
            let t = 0.37 * k as f64;
            let a = m.reduced_state(t).unwrap();
            let b = m.reduced_state(t + period).unwrap();
            assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-12);
            let nt = (&m.joint_state(t).unwrap() * &n).trace().re;
            assert!((nt - n0).abs() < 1e-12);
        }
    }

    #[test]
    fn rk4_on_joint_von_neumann_equation() {
        let p = SwapParams::new(1.0, 1.0, 1.0).unwrap();
        let m = SwapModel::new(p).unwrap();
        let h_op = m.hamiltonian().clone();
        let rhs = |rho: &CMatrix| h_op.commutator(rho).scale(Complex64::new(0.0, -1.0));
        let steps = 4000;
        let t_end = PI;
        let h = t_end / steps as f64;
        let mut rho = m.initial_joint_state().clone();
        for _ in 0..steps {
            let k1 = rhs(&rho);
            let k2 = rhs(&(&rho + &k1.scale_real(0.5 * h)));
            let k3 = rhs(&(&rho + &k2.scale_real(0.5 * h)));
            let k4 = rhs(&(&rho + &k3.scale_real(h)));
            let incr = &(&k1 + &k2.scale_real(2.0)) + &(&k3.scale_real(2.0) + &k4);
            rho = &rho + &incr.scale_real(h / 6.0);
        }
        let exact = m.joint_state(t_end).unwrap();
        assert!(rho.max_abs_diff(&exact) < 1e-10);
    }

    #[test]
    fn trajectory_is_diagonal() {
        let p = unit(1.5);
        let traj = swap_trajectory(&p, &TimeGrid::new(2.0 * PI, 500).unwrap()).unwrap();
        assert_eq!(traj.len(), 501);
        for pt in traj.points() {
            assert!(pt.state.coherence() < 1e-12);
            assert!(pt.generator.trace().norm() < 1e-14);
        }
    }
}
