//! Temperature quantum Fisher information (QFI) and what is built on it.
//!
//! Thermal states commute with the Hamiltonian, so the QFI equals the
//! classical Fisher information of the energy-basis populations. Three
//! independent routes are provided and cross-checked in tests:
//!
//! * [`qfi_population`] sums `(∂_T p_k)² / p_k` with the analytic
//!   derivative `∂_T p_k = p_k (E_k − ⟨H⟩) / T²`;
//! * [`qfi_variance`] returns `Var(H) / T⁴`;
//! * [`qfi_fidelity_oracle`] differentiates the state fidelity by finite
//!   differences, `8 (1 − F) / δT²`.
//!
//! On top of these sit closed forms for harmonic probes, the Cramér–Rao
//! bound, a golden-section optimum finder, multi-peak detection and
//! power-law scaling fits.

use rayon::prelude::*;
use thiserror::Error;

use crate::spectra::{self, EnergySpectrum, SpectrumError};
use crate::thermal::{self, ThermalError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetrologyError {
    #[error(transparent)]
    Thermal(#[from] ThermalError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("finite-difference step {step:e} is too small to resolve the population change at T = {temperature}")]
    StepTooSmall { step: f64, temperature: f64 },
    #[error("invalid bracket [{lo}, {hi}]")]
    InvalidBracket { lo: f64, hi: f64 },
    #[error("grid has {points} points, at least {min} are required")]
    GridTooCoarse { points: usize, min: usize },
    #[error("peak search requires a logarithmic grid")]
    NotLogGrid,
    #[error("scaling study needs at least {min} distinct gaps, got {got}")]
    TooFewPoints { got: usize, min: usize },
    #[error("gaps must span at least one decade, got ratio {ratio}")]
    NarrowSpan { ratio: f64 },
}

pub type Result<T> = std::result::Result<T, MetrologyError>;

fn check_positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(MetrologyError::InvalidParameter(format!(
            "{name} must be positive and finite, got {value}"
        )))
    }
}

// ---------------------------------------------------------------------------
// Temperature grids

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridScale {
    Linear,
    Log,
}

/// `count` temperatures from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemperatureGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub scale: GridScale,
}

impl TemperatureGrid {
    pub fn new(min: f64, max: f64, count: usize, scale: GridScale) -> Result<Self> {
        if !(min > 0.0 && max.is_finite() && min < max) {
            return Err(MetrologyError::InvalidBracket { lo: min, hi: max });
        }
        if count < 2 {
            return Err(MetrologyError::GridTooCoarse { points: count, min: 2 });
        }
        Ok(TemperatureGrid {
            min,
            max,
            count,
            scale,
        })
    }

    pub fn log(min: f64, max: f64, count: usize) -> Result<Self> {
        Self::new(min, max, count, GridScale::Log)
    }

    pub fn linear(min: f64, max: f64, count: usize) -> Result<Self> {
        Self::new(min, max, count, GridScale::Linear)
    }

    /// Grid points. Log grids are built as `min·(max/min)^(i/(n−1))` so a
    /// grid scaled by a power of two scales exactly.
    pub fn points(&self) -> Vec<f64> {
        let n = self.count;
        let last = (n - 1) as f64;
        let mut pts: Vec<f64> = match self.scale {
            GridScale::Log => {
                let ratio = self.max / self.min;
                (0..n)
                    .map(|i| self.min * ratio.powf(i as f64 / last))
                    .collect()
            }
            GridScale::Linear => {
                let span = self.max - self.min;
                (0..n).map(|i| self.min + span * (i as f64 / last)).collect()
            }
        };
        pts[0] = self.min;
        pts[n - 1] = self.max;
        pts
    }
}

// ---------------------------------------------------------------------------
// QFI routes

/// Population route; `temperature` must already be validated.
fn population_qfi(spectrum: &EnergySpectrum, temperature: f64) -> f64 {
    let state = match thermal::gibbs_state(spectrum, temperature) {
        Ok(s) => s,
        Err(_) => return f64::NAN,
    };
    let t2 = temperature * temperature;
    // first pass: ⟨H⟩ from scratch so this route does not reuse the
    // variance stored on the state
    let mean: f64 = state
        .populations
        .iter()
        .zip(spectrum.energies())
        .map(|(p, e)| p * e)
        .sum();
    state
        .populations
        .iter()
        .zip(spectrum.energies())
        .filter(|(p, _)| **p > 0.0)
        .map(|(&p, e)| {
            let dp = p * (e - mean) / t2;
            dp * dp / p
        })
        .sum()
}

/// `Σ_k (∂_T p_k)² / p_k` over level blocks.
pub fn qfi_population(spectrum: &EnergySpectrum, temperature: f64) -> Result<f64> {
    thermal::check_temperature(temperature)?;
    Ok(population_qfi(spectrum, temperature))
}

/// `Var(H) / T⁴`.
pub fn qfi_variance(spectrum: &EnergySpectrum, temperature: f64) -> Result<f64> {
    let state = thermal::gibbs_state(spectrum, temperature)?;
    Ok(state.energy_variance / temperature.powi(4))
}

/// `1 − F` between the Gibbs states at `t1` and `t2`, with `F = Σ √(p_k q_k)`.
///
/// Evaluated as `½ Σ p_k (e^{(ln q_k − ln p_k)/2} − 1)²`, which is exact for
/// normalized populations and free of the cancellation in `1 − Σ √(pq)`.
/// Also returns the largest `|ln q_k − ln p_k|`.
fn one_minus_fidelity(spectrum: &EnergySpectrum, t1: f64, t2: f64) -> Result<(f64, f64)> {
    let s1 = thermal::gibbs_state(spectrum, t1)?;
    let s2 = thermal::gibbs_state(spectrum, t2)?;
    let lp = s1.log_populations(spectrum)?;
    let lq = s2.log_populations(spectrum)?;
    let mut sum = 0.0;
    let mut max_ratio: f64 = 0.0;
    for ((p, a), b) in s1.populations.iter().zip(&lp).zip(&lq) {
        let r = b - a;
        max_ratio = max_ratio.max(r.abs());
        let h = (0.5 * r).exp_m1();
        sum += p * h * h;
    }
    Ok((0.5 * sum, max_ratio))
}

fn fidelity_difference_quotient(spectrum: &EnergySpectrum, temperature: f64, step: f64) -> Result<f64> {
    let (gap, max_ratio) =
        one_minus_fidelity(spectrum, temperature - 0.5 * step, temperature + 0.5 * step)?;
    // the log-population change must be resolvable above rounding of the
    // log weights themselves
    let scale = 1.0 + spectrum.max_energy() / temperature;
    if max_ratio <= 64.0 * f64::EPSILON * scale {
        return Err(MetrologyError::StepTooSmall { step, temperature });
    }
    Ok(8.0 * gap / (step * step))
}

/// Finite-difference QFI from the fidelity between `ϱ_{T−δT/2}` and
/// `ϱ_{T+δT/2}`, with one Richardson step (`δT` and `δT/2`).
pub fn qfi_fidelity_oracle(spectrum: &EnergySpectrum, temperature: f64, step: f64) -> Result<f64> {
    thermal::check_temperature(temperature)?;
    if !(step > 0.0 && step < temperature) {
        return Err(MetrologyError::InvalidParameter(format!(
            "step must lie in (0, T), got {step}"
        )));
    }
    let coarse = fidelity_difference_quotient(spectrum, temperature, step)?;
    let fine = fidelity_difference_quotient(spectrum, temperature, 0.5 * step)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Fidelity oracle at the default step `δT = 10⁻³ T`.
pub fn qfi_fidelity_default(spectrum: &EnergySpectrum, temperature: f64) -> Result<f64> {
    qfi_fidelity_oracle(spectrum, temperature, 1e-3 * temperature)
}

// ---------------------------------------------------------------------------
// Closed forms

fn closed_prefactor(gap: f64, temperature: f64) -> Result<f64> {
    check_positive("gap", gap)?;
    check_positive("temperature", temperature)?;
    Ok(2.0 * gap.ln() - 4.0 * temperature.ln())
}

/// Two-level probe: `Δ² sech²(Δ/2T) / (4T⁴)`.
pub fn qfi_qubit_closed(gap: f64, temperature: f64) -> Result<f64> {
    let x = gap / temperature;
    let log_pref = closed_prefactor(gap, temperature)?;
    // sech²(x/2)/4 = e^{−x} / (1 + e^{−x})²
    Ok((log_pref - x - 2.0 * (-x).exp().ln_1p()).exp())
}

/// The two-level expression with the `1/2` coefficient as it is sometimes
/// printed; exactly twice [`qfi_qubit_closed`]. Kept for comparison output.
pub fn qfi_qubit_closed_as_printed(gap: f64, temperature: f64) -> Result<f64> {
    Ok(2.0 * qfi_qubit_closed(gap, temperature)?)
}

/// Infinite harmonic oscillator: `Δ² csch²(Δ/2T) / (4T⁴)`.
pub fn qfi_oscillator_closed(gap: f64, temperature: f64) -> Result<f64> {
    let x = gap / temperature;
    let log_pref = closed_prefactor(gap, temperature)?;
    // csch²(x/2)/4 = e^{−x} / (1 − e^{−x})²
    Ok((log_pref - x - 2.0 * (-(-x).exp_m1()).ln()).exp())
}

/// `d`-level harmonic ladder.
///
/// The textbook rational form in `e^{kΔ/T}` is multiplied through by
/// `e^{−2(d+1)Δ/T}` so no exponential overflows:
///
/// ```text
///  Δ² [e^{−x} + e^{−(2d+1)x} − d² e^{−(d+2)x} − d² e^{−dx} + 2(d²−1) e^{−(d+1)x}]
///  ─────────────────────────────────────────────────────────────────────────────
///                    T⁴ (1 − e^{−x})² (1 − e^{−dx})²
/// ```
pub fn qfi_harmonic_d_closed(d: usize, gap: f64, temperature: f64) -> Result<f64> {
    if d < 2 {
        return Err(MetrologyError::Spectrum(SpectrumError::DimensionTooSmall(d)));
    }
    let log_pref = closed_prefactor(gap, temperature)?;
    let x = gap / temperature;
    let df = d as f64;
    let d2 = df * df;
    let e = |k: f64| (-k * x).exp();
    let numerator = e(1.0) + e(2.0 * df + 1.0) - d2 * e(df + 2.0) - d2 * e(df)
        + 2.0 * (d2 - 1.0) * e(df + 1.0);
    let denominator = ((-x).exp_m1() * (-df * x).exp_m1()).powi(2);
    Ok(log_pref.exp() * numerator / denominator)
}

// ---------------------------------------------------------------------------
// Cramér–Rao

/// Lower bound on `Var(T)` after `m` independent measurements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CramerRaoBound {
    Finite(f64),
    /// Zero Fisher information: no finite bound exists.
    Unbounded,
}

impl CramerRaoBound {
    pub fn value(self) -> Option<f64> {
        match self {
            CramerRaoBound::Finite(v) => Some(v),
            CramerRaoBound::Unbounded => None,
        }
    }
}

pub fn cramer_rao_variance_bound(qfi: f64, measurements: u64) -> Result<CramerRaoBound> {
    if measurements == 0 {
        return Err(MetrologyError::InvalidParameter(
            "number of measurements must be at least 1".into(),
        ));
    }
    if !(qfi >= 0.0 && qfi.is_finite()) {
        return Err(MetrologyError::InvalidParameter(format!(
            "Fisher information must be non-negative and finite, got {qfi}"
        )));
    }
    if qfi == 0.0 {
        return Ok(CramerRaoBound::Unbounded);
    }
    Ok(CramerRaoBound::Finite(1.0 / (measurements as f64 * qfi)))
}

// ---------------------------------------------------------------------------
// Scans and optima

/// QFI sampled on a temperature grid.
#[derive(Debug, Clone, PartialEq)]
pub struct QfiScan {
    pub label: String,
    pub grid: TemperatureGrid,
    pub points: Vec<(f64, f64)>,
}

/// Population QFI at every grid point, computed in parallel; the result
/// order follows the grid.
pub fn scan(spectrum: &EnergySpectrum, grid: &TemperatureGrid, label: impl Into<String>) -> QfiScan {
    let temps = grid.points();
    let points = temps
        .par_iter()
        .map(|&t| (t, population_qfi(spectrum, t)))
        .collect();
    QfiScan {
        label: label.into(),
        grid: *grid,
        points,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimumReport {
    pub t_max: f64,
    pub h_max: f64,
    pub bracket: (f64, f64),
    /// False when the maximum sits on an edge of the search bracket.
    pub converged: bool,
}

/// Relative tolerance on the width of the final golden-section bracket.
pub const OPTIMUM_REL_TOL: f64 = 1e-10;
/// Points in the logarithmic pre-scan of [`find_optimal_temperature`].
pub const PRESCAN_POINTS: usize = 200;
/// Minimum grid size accepted by [`find_peaks`].
pub const PEAK_GRID_MIN: usize = 500;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximization on `[a, b]` in linear `T`.
fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, rel_tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..500 {
        if b - a <= rel_tol * 0.5 * (a + b).abs() {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

fn check_bracket(bracket: (f64, f64)) -> Result<()> {
    let (lo, hi) = bracket;
    if lo > 0.0 && hi.is_finite() && lo < hi {
        Ok(())
    } else {
        Err(MetrologyError::InvalidBracket { lo, hi })
    }
}

/// Maximizes any positive-temperature objective: a logarithmic pre-scan
/// picks the best grid point, then golden section refines between its
/// neighbours.
pub fn maximize_with_prescan(
    objective: impl Fn(f64) -> f64,
    bracket: (f64, f64),
    prescan_points: usize,
) -> Result<OptimumReport> {
    check_bracket(bracket)?;
    let grid = TemperatureGrid::log(bracket.0, bracket.1, prescan_points.max(3))?;
    let temps = grid.points();
    let values: Vec<f64> = temps.iter().map(|&t| objective(t)).collect();
    let best = values
        .iter()
        .enumerate()
        .fold(0, |best, (i, &v)| if v > values[best] { i } else { best });
    if best == 0 || best == temps.len() - 1 {
        return Ok(OptimumReport {
            t_max: temps[best],
            h_max: values[best],
            bracket,
            converged: false,
        });
    }
    let (t_max, h_max) = golden_max(&objective, temps[best - 1], temps[best + 1], OPTIMUM_REL_TOL);
    Ok(OptimumReport {
        t_max,
        h_max,
        bracket,
        converged: true,
    })
}

/// Temperature of maximal population QFI within `bracket`.
pub fn find_optimal_temperature(spectrum: &EnergySpectrum, bracket: (f64, f64)) -> Result<OptimumReport> {
    maximize_with_prescan(|t| population_qfi(spectrum, t), bracket, PRESCAN_POINTS)
}

/// Every interior local maximum of the QFI on a logarithmic grid, refined
/// by golden section between neighbouring grid points and sorted by `T`.
///
/// A plateau of equal values counts once, at its left edge.
pub fn find_peaks(spectrum: &EnergySpectrum, grid: &TemperatureGrid) -> Result<Vec<OptimumReport>> {
    if grid.scale != GridScale::Log {
        return Err(MetrologyError::NotLogGrid);
    }
    if grid.count < PEAK_GRID_MIN {
        return Err(MetrologyError::GridTooCoarse {
            points: grid.count,
            min: PEAK_GRID_MIN,
        });
    }
    let curve = scan(spectrum, grid, "");
    let temps: Vec<f64> = curve.points.iter().map(|p| p.0).collect();
    let values: Vec<f64> = curve.points.iter().map(|p| p.1).collect();
    let mut peaks = Vec::new();
    for (i, j) in local_maxima(&values) {
        let lo = temps[i - 1];
        let hi = temps[j + 1];
        let (t_max, h_max) = golden_max(&|t| population_qfi(spectrum, t), lo, hi, OPTIMUM_REL_TOL);
        peaks.push(OptimumReport {
            t_max,
            h_max,
            bracket: (lo, hi),
            converged: true,
        });
    }
    Ok(peaks)
}

/// Index ranges `(i, j)` of strict interior maxima: `values[i..=j]` are
/// equal, and both outer neighbours are strictly smaller.
fn local_maxima(values: &[f64]) -> Vec<(usize, usize)> {
    let n = values.len();
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        let mut j = i;
        while j + 1 < n && values[j + 1] == values[i] {
            j += 1;
        }
        if j + 1 < n && values[i - 1] < values[i] && values[j + 1] < values[j] {
            out.push((i, j));
        }
        i = j + 1;
    }
    out
}

// ---------------------------------------------------------------------------
// Scaling laws

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProbeFamily {
    Qubit,
    Oscillator,
    Harmonic(usize),
}

impl ProbeFamily {
    /// Tail tolerance used when the oscillator is realized by truncation.
    pub const OSCILLATOR_TAIL_TOL: f64 = 1e-15;

    /// Spectrum of this family with gap `gap`, valid up to `temp_max`.
    pub fn spectrum(self, gap: f64, temp_max: f64) -> std::result::Result<EnergySpectrum, SpectrumError> {
        match self {
            ProbeFamily::Qubit => spectra::harmonic(2, gap),
            ProbeFamily::Harmonic(d) => spectra::harmonic(d, gap),
            ProbeFamily::Oscillator => {
                spectra::oscillator_truncated(gap, temp_max, Self::OSCILLATOR_TAIL_TOL)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingPoint {
    pub gap: f64,
    pub t_max: f64,
    pub h_max: f64,
    pub converged: bool,
}

/// Least-squares fits `T_max = α Δ` and `1/H_max = c Δ²`, both through the
/// origin. Residuals are relative Euclidean norms.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub family: ProbeFamily,
    pub points: Vec<ScalingPoint>,
    pub alpha: f64,
    pub inverse_h_coefficient: f64,
    pub t_residual: f64,
    pub inverse_h_residual: f64,
}

/// Bracket searched for the optimum at gap `Δ`.
pub fn scaling_bracket(gap: f64) -> (f64, f64) {
    (0.01 * gap, 10.0 * gap)
}

pub fn scaling_study(gaps: &[f64], family: ProbeFamily) -> Result<ScalingFit> {
    const MIN_POINTS: usize = 5;
    for &g in gaps {
        check_positive("gap", g)?;
    }
    let mut distinct = gaps.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < MIN_POINTS {
        return Err(MetrologyError::TooFewPoints {
            got: distinct.len(),
            min: MIN_POINTS,
        });
    }
    let ratio = distinct[distinct.len() - 1] / distinct[0];
    if ratio < 10.0 {
        return Err(MetrologyError::NarrowSpan { ratio });
    }

    let points = gaps
        .iter()
        .map(|&gap| {
            let bracket = scaling_bracket(gap);
            let spectrum = family.spectrum(gap, bracket.1)?;
            let opt = find_optimal_temperature(&spectrum, bracket)?;
            Ok(ScalingPoint {
                gap,
                t_max: opt.t_max,
                h_max: opt.h_max,
                converged: opt.converged,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let (alpha, t_residual) = fit_through_origin(points.iter().map(|p| (p.gap, p.t_max)));
    let (c, inverse_h_residual) =
        fit_through_origin(points.iter().map(|p| (p.gap * p.gap, 1.0 / p.h_max)));
    Ok(ScalingFit {
        family,
        points,
        alpha,
        inverse_h_coefficient: c,
        t_residual,
        inverse_h_residual,
    })
}

/// Slope of `y = k x` and the relative residual norm `‖y − kx‖ / ‖y‖`.
fn fit_through_origin(data: impl Iterator<Item = (f64, f64)> + Clone) -> (f64, f64) {
    let sxy: f64 = data.clone().map(|(x, y)| x * y).sum();
    let sxx: f64 = data.clone().map(|(x, _)| x * x).sum();
    let k = sxy / sxx;
    let res: f64 = data.clone().map(|(x, y)| (y - k * x).powi(2)).sum::<f64>().sqrt();
    let norm: f64 = data.map(|(_, y)| y * y).sum::<f64>().sqrt();
    (k, res / norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::{degenerate_staircase, harmonic, oscillator_truncated, three_level};

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    /// Bisection root of a sign-changing function; independent of the
    /// golden-section code under test.
    fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        let flo = f(lo);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (f(mid) > 0.0) == (flo > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn qubit_values_all_routes() {
        let q = harmonic(2, 1.0).unwrap();
        let exact = 1.0 / (4.0 * 0.5f64.cosh().powi(2));
        assert!((exact - 0.196612).abs() < 1e-6);
        assert!(rel(qfi_population(&q, 1.0).unwrap(), exact) < 1e-14);
        assert!(rel(qfi_variance(&q, 1.0).unwrap(), exact) < 1e-14);
        assert!(rel(qfi_qubit_closed(1.0, 1.0).unwrap(), exact) < 1e-14);
        assert!((qfi_fidelity_oracle(&q, 1.0, 1e-3).unwrap() - exact).abs() < 1e-6);
        assert!(rel(qfi_qubit_closed_as_printed(1.0, 1.0).unwrap(), 0.393224) < 1e-5);
    }

    #[test]
    fn doubly_degenerate_binary_fisher() {
        let s = three_level(1.0, 1.0).unwrap();
        let w = 2.0 * (-1.0f64).exp();
        let pe = w / (1.0 + w);
        // dP_e/dT = P_e (1 − P_e) E / T² at E = T = 1
        let dpe = pe * (1.0 - pe);
        let binary = dpe * dpe / (pe * (1.0 - pe));
        assert!((binary - 0.244206).abs() < 1e-6);
        assert!(rel(qfi_population(&s, 1.0).unwrap(), binary) < 1e-14);
    }

    #[test]
    fn saturated_high_temperature() {
        let q = harmonic(2, 1.0).unwrap();
        assert!(qfi_population(&q, 1e6).unwrap() < 1e-20);
        let s = degenerate_staircase(&[(0.0, 1), (0.5, 3), (1.0, 2)]).unwrap();
        assert!(qfi_population(&s, 1e6).unwrap() < 1e-20);
    }

    #[test]
    fn non_positive_temperature_rejected() {
        let q = harmonic(2, 1.0).unwrap();
        assert!(qfi_population(&q, 0.0).is_err());
        assert!(qfi_variance(&q, -1.0).is_err());
        assert!(qfi_fidelity_oracle(&q, 0.0, 1e-3).is_err());
        assert!(qfi_fidelity_oracle(&q, 1.0, 2.0).is_err());
    }

    #[test]
    fn oscillator_variance_route() {
        let s = oscillator_truncated(1.0, 1.0, 1e-16).unwrap();
        let exact = 1.0 / (4.0 * 0.5f64.sinh().powi(2));
        assert!((exact - 0.920674).abs() < 1e-6);
        assert!(rel(qfi_variance(&s, 1.0).unwrap(), exact) < 1e-13);
        assert!(rel(qfi_oscillator_closed(1.0, 1.0).unwrap(), exact) < 1e-14);
    }

    #[test]
    fn fidelity_step_guard() {
        let q = harmonic(2, 1.0).unwrap();
        assert!(matches!(
            qfi_fidelity_oracle(&q, 1.0, 1e-14),
            Err(MetrologyError::StepTooSmall { .. })
        ));
    }

    #[test]
    fn fidelity_matches_population_on_ladder() {
        let s = harmonic(5, 1.0).unwrap();
        let pop = qfi_population(&s, 0.5).unwrap();
        let fid = qfi_fidelity_oracle(&s, 0.5, 1e-3).unwrap();
        assert!(rel(fid, pop) < 1e-5);
    }

    #[test]
    fn harmonic_closed_reduces_to_qubit() {
        for t in [0.05, 0.3, 1.0, 4.0] {
            let a = qfi_harmonic_d_closed(2, 1.0, t).unwrap();
            let b = qfi_qubit_closed(1.0, t).unwrap();
            assert!(rel(a, b) < 1e-12, "T={t}: {a} vs {b}");
        }
    }

    #[test]
    fn closed_forms_survive_extreme_ratio() {
        let tiny = qfi_qubit_closed(1.0, 1.0 / 800.0).unwrap();
        assert!(tiny.is_finite() && tiny >= 0.0);
        let tiny = qfi_oscillator_closed(1.0, 1.0 / 800.0).unwrap();
        assert!(tiny.is_finite() && tiny >= 0.0);
        let tiny = qfi_harmonic_d_closed(10, 1.0, 1.0 / 800.0).unwrap();
        assert!(tiny.is_finite() && tiny >= 0.0);
        // log-domain evaluation keeps a representable value near the edge
        let v = qfi_qubit_closed(700.0, 1.0).unwrap();
        let expected = ((700.0f64).ln() * 2.0 - 700.0).exp();
        assert!(rel(v, expected) < 1e-12);
    }

    #[test]
    fn cramer_rao_examples() {
        let b = cramer_rao_variance_bound(0.196612, 1).unwrap().value().unwrap();
        assert!((b - 5.08616).abs() < 1e-5);
        let b = cramer_rao_variance_bound(0.196612, 100).unwrap().value().unwrap();
        assert!((b - 0.0508616).abs() < 1e-7);
        let b = cramer_rao_variance_bound(4.532, 1).unwrap().value().unwrap();
        assert!((b - 0.220653).abs() < 1e-6);
        assert_eq!(cramer_rao_variance_bound(0.0, 3).unwrap(), CramerRaoBound::Unbounded);
        assert!(cramer_rao_variance_bound(1.0, 0).is_err());
        assert!(cramer_rao_variance_bound(-1.0, 1).is_err());
    }

    #[test]
    fn qubit_optimum_matches_stationarity_root() {
        let x = bisect(|x| x * x.tanh() - 2.0, 1.0, 3.0);
        let t_star = 1.0 / (2.0 * x);
        assert!((x - 2.0654).abs() < 1e-4);
        let r = find_optimal_temperature(&harmonic(2, 1.0).unwrap(), (0.01, 10.0)).unwrap();
        assert!(r.converged);
        assert!((r.t_max - 0.24209).abs() < 1e-4);
        assert!((r.t_max - t_star).abs() < 1e-7);
        assert!((r.h_max - 4.5320).abs() < 1e-3);
        let r2 = find_optimal_temperature(&harmonic(2, 2.0).unwrap(), (0.01, 10.0)).unwrap();
        assert!((r2.t_max - 0.48418).abs() < 2e-4);
    }

    #[test]
    fn oscillator_optimum_matches_stationarity_root() {
        let u = bisect(|u| u / u.tanh() - 2.0, 1.0, 3.0);
        assert!((u - 1.9150).abs() < 1e-4);
        let s = oscillator_truncated(1.0, 10.0, 1e-15).unwrap();
        let r = find_optimal_temperature(&s, (0.01, 10.0)).unwrap();
        assert!((r.t_max - 0.26110).abs() < 1e-4);
        assert!((r.t_max - 1.0 / (2.0 * u)).abs() < 1e-7);
        assert!((1.0 / r.h_max - 0.20480).abs() < 5e-4);
    }

    #[test]
    fn optimum_on_edge_is_flagged() {
        let r = find_optimal_temperature(&harmonic(2, 1.0).unwrap(), (0.01, 0.1)).unwrap();
        assert!(!r.converged);
        assert_eq!(r.t_max, 0.1);
        assert!(find_optimal_temperature(&harmonic(2, 1.0).unwrap(), (1.0, 0.5)).is_err());
        assert!(find_optimal_temperature(&harmonic(2, 1.0).unwrap(), (0.0, 0.5)).is_err());
    }

    #[test]
    fn single_peak_for_qubit() {
        let grid = TemperatureGrid::log(0.01, 20.0, 500).unwrap();
        let peaks = find_peaks(&harmonic(2, 1.0).unwrap(), &grid).unwrap();
        assert_eq!(peaks.len(), 1);
        assert!((peaks[0].t_max - 0.24209).abs() < 1e-4);
    }

    #[test]
    fn three_peaks_for_wide_staircase() {
        let s = degenerate_staircase(&[(0.0, 1), (1.0, 1), (5.0, 100), (25.0, 1_000_000)]).unwrap();
        let coarse = find_peaks(&s, &TemperatureGrid::log(0.01, 50.0, 2000).unwrap()).unwrap();
        let dense = find_peaks(&s, &TemperatureGrid::log(0.01, 50.0, 10_000).unwrap()).unwrap();
        assert_eq!(coarse.len(), 3);
        assert_eq!(dense.len(), 3);
        for (a, b) in coarse.iter().zip(&dense) {
            assert!(rel(a.t_max, b.t_max) < 1e-6);
        }
        assert!(coarse.windows(2).all(|w| w[0].t_max < w[1].t_max));
    }

    #[test]
    fn peak_grid_validation() {
        let q = harmonic(2, 1.0).unwrap();
        assert_eq!(
            find_peaks(&q, &TemperatureGrid::log(0.01, 20.0, 499).unwrap()),
            Err(MetrologyError::GridTooCoarse { points: 499, min: 500 })
        );
        assert_eq!(
            find_peaks(&q, &TemperatureGrid::linear(0.01, 20.0, 600).unwrap()),
            Err(MetrologyError::NotLogGrid)
        );
    }

    #[test]
    fn plateau_counts_once() {
        let flat = [0.0, 1.0, 2.0, 2.0, 2.0, 1.0, 0.0];
        assert_eq!(local_maxima(&flat), vec![(2, 4)]);
        // shoulder (non-strict on one side) is not a peak
        assert!(local_maxima(&[0.0, 1.0, 1.0, 2.0]).is_empty());
        assert_eq!(local_maxima(&[0.0, 3.0, 1.0, 4.0, 2.0]), vec![(1, 1), (3, 3)]);
        assert!(local_maxima(&[1.0, 1.0]).is_empty());
    }

    #[test]
    fn scaling_fit_is_exact_for_qubit() {
        let fit = scaling_study(&[0.5, 1.0, 2.0, 4.0, 8.0], ProbeFamily::Qubit).unwrap();
        assert!((fit.alpha - 0.24209).abs() < 1e-4);
        assert!((fit.inverse_h_coefficient - 0.22065).abs() < 1e-4);
        assert!(fit.t_residual < 1e-8);
        assert!(fit.inverse_h_residual < 1e-8);
        assert!(rel(fit.inverse_h_coefficient, std::f64::consts::PI.sqrt() / 8.0) < 5e-3);
    }

    #[test]
    fn scaling_fit_oscillator() {
        let fit = scaling_study(&[0.5, 1.0, 2.0, 4.0, 8.0], ProbeFamily::Oscillator).unwrap();
        let printed = std::f64::consts::PI.sqrt() / (5.0 * 3f64.sqrt());
        assert!((fit.inverse_h_coefficient - 0.20480).abs() < 5e-4);
        assert!(rel(fit.inverse_h_coefficient, printed) < 5e-3);
        assert!(fit.t_residual < 1e-8);
    }

    #[test]
    fn scaling_input_validation() {
        assert!(matches!(
            scaling_study(&[1.0, 2.0, 3.0, 4.0], ProbeFamily::Qubit),
            Err(MetrologyError::TooFewPoints { got: 4, .. })
        ));
        assert!(matches!(
            scaling_study(&[1.0, 2.0, 3.0, 4.0, 5.0], ProbeFamily::Qubit),
            Err(MetrologyError::NarrowSpan { .. })
        ));
        assert!(scaling_study(&[1.0, 1.0, 1.0, 1.0, 10.0], ProbeFamily::Qubit).is_err());
    }

    #[test]
    fn log_grid_is_exactly_scalable() {
        let (lo, hi) = scaling_bracket(1.0);
        let a = TemperatureGrid::log(lo, hi, 200).unwrap().points();
        let (lo, hi) = scaling_bracket(4.0);
        let b = TemperatureGrid::log(lo, hi, 200).unwrap().points();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(4.0 * x, *y);
        }
        let lin = TemperatureGrid::linear(1.0, 2.0, 3).unwrap().points();
        assert_eq!(lin, vec![1.0, 1.5, 2.0]);
    }
}
