//! Discrete energy spectra with degeneracy stored as integer multiplicities.
//!
//! Every spectrum is kept in a normalized form: levels sorted by energy,
//! duplicate energies merged, and the ground energy shifted to zero. Units
//! are `k_B = ħ = 1`, so energies and temperatures share one scale.
//!
//! Degenerate blocks are never enumerated. A level with multiplicity `10⁶`
//! costs the same as a non-degenerate one in every downstream evaluation.

use serde::Deserialize;
use thiserror::Error;

/// Largest Hilbert-space dimension `oscillator_truncated` will produce.
pub const TRUNCATION_CAP: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error("a spectrum needs at least two distinct levels, got {0}")]
    TooFewLevels(usize),
    #[error("gap must be positive and finite, got {0}")]
    NonPositiveGap(f64),
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("multiplicity must be a positive integer, got {0}")]
    InvalidMultiplicity(i64),
    #[error("energy must be finite, got {0}")]
    NonFiniteEnergy(f64),
    #[error("energy must be non-negative, got {0}")]
    NegativeEnergy(f64),
    #[error("second gap {gap2} is smaller than first gap {gap1}")]
    GapOrder { gap1: f64, gap2: f64 },
    #[error("the first entry must be the unique ground state")]
    GroundNotFirst,
    #[error("truncation needs more than {cap} levels to reach tail tolerance {tail_tol:e}")]
    TruncationFailure { tail_tol: f64, cap: u64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("malformed spectrum JSON: {0}")]
    MalformedJson(String),
    #[error("spectrum JSON does not match the schema: {0}")]
    Schema(String),
}

/// Coarse grouping of [`SpectrumError`] used by callers that only need to
/// know what kind of input problem occurred.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Malformed,
    Schema,
    Invariant,
    Argument,
}

impl SpectrumError {
    pub fn category(&self) -> ErrorCategory {
        match self {
            SpectrumError::MalformedJson(_) => ErrorCategory::Malformed,
            SpectrumError::Schema(_) => ErrorCategory::Schema,
            SpectrumError::NonPositiveGap(_)
            | SpectrumError::DimensionTooSmall(_)
            | SpectrumError::GapOrder { .. }
            | SpectrumError::InvalidArgument(_)
            | SpectrumError::TruncationFailure { .. } => ErrorCategory::Argument,
            _ => ErrorCategory::Invariant,
        }
    }
}

/// One distinct energy level and its degeneracy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level {
    pub energy: f64,
    pub multiplicity: u64,
}

impl Level {
    pub fn new(energy: f64, multiplicity: u64) -> Self {
        Level {
            energy,
            multiplicity,
        }
    }
}

/// A normalized discrete spectrum.
///
/// Invariants: at least two levels, energies strictly increasing, ground
/// energy exactly zero, every multiplicity at least one.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergySpectrum {
    levels: Vec<Level>,
}

impl EnergySpectrum {
    /// Builds a spectrum from `(energy, multiplicity)` pairs in any order.
    ///
    /// Duplicate energies are merged with summed multiplicity (a warning is
    /// logged) and the lowest energy is shifted to zero.
    pub fn from_levels<I>(levels: I) -> Result<Self, SpectrumError>
    where
        I: IntoIterator<Item = (f64, u64)>,
    {
        let mut raw: Vec<Level> = Vec::new();
        for (energy, multiplicity) in levels {
            if !energy.is_finite() {
                return Err(SpectrumError::NonFiniteEnergy(energy));
            }
            if multiplicity == 0 {
                return Err(SpectrumError::InvalidMultiplicity(0));
            }
            raw.push(Level::new(energy, multiplicity));
        }
        raw.sort_by(|a, b| a.energy.total_cmp(&b.energy));

        let mut merged: Vec<Level> = Vec::with_capacity(raw.len());
        for level in raw {
            match merged.last_mut() {
                Some(last) if last.energy == level.energy => {
                    log::warn!(
                        "duplicate energy {} merged (multiplicities {} + {})",
                        level.energy,
                        last.multiplicity,
                        level.multiplicity
                    );
                    last.multiplicity = last
                        .multiplicity
                        .checked_add(level.multiplicity)
                        .ok_or_else(|| {
                            SpectrumError::InvalidArgument("total multiplicity overflows".into())
                        })?;
                }
                _ => merged.push(level),
            }
        }
        if merged.len() < 2 {
            return Err(SpectrumError::TooFewLevels(merged.len()));
        }

        let ground = merged[0].energy;
        for level in &mut merged {
            level.energy -= ground;
        }
        // Shifting can collapse nearly equal energies in floating point.
        if merged.windows(2).any(|w| w[1].energy <= w[0].energy) {
            return Err(SpectrumError::InvalidArgument(
                "energies are not distinguishable after shifting the ground to zero".into(),
            ));
        }
        Ok(EnergySpectrum { levels: merged })
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// Number of distinct levels.
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Hilbert-space dimension (total multiplicity).
    pub fn dimension(&self) -> u64 {
        self.levels.iter().map(|l| l.multiplicity).sum()
    }

    pub fn max_energy(&self) -> f64 {
        self.levels[self.levels.len() - 1].energy
    }

    /// Energy of the first excited level above the ground.
    pub fn first_gap(&self) -> f64 {
        self.levels[1].energy
    }

    pub fn energies(&self) -> impl Iterator<Item = f64> + '_ {
        self.levels.iter().map(|l| l.energy)
    }

    /// Multiplies every energy by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self, SpectrumError> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(SpectrumError::InvalidArgument(format!(
                "scale factor must be positive, got {factor}"
            )));
        }
        Self::from_levels(
            self.levels
                .iter()
                .map(|l| (l.energy * factor, l.multiplicity)),
        )
    }
}

fn check_gap(gap: f64) -> Result<(), SpectrumError> {
    if gap > 0.0 && gap.is_finite() {
        Ok(())
    } else {
        Err(SpectrumError::NonPositiveGap(gap))
    }
}

/// Equally spaced ladder `{k·gap}` for `k = 0..d`.
pub fn harmonic(d: usize, gap: f64) -> Result<EnergySpectrum, SpectrumError> {
    if d < 2 {
        return Err(SpectrumError::DimensionTooSmall(d));
    }
    check_gap(gap)?;
    EnergySpectrum::from_levels((0..d).map(|k| (k as f64 * gap, 1)))
}

/// Relative bound on the QFI error from cutting the oscillator ladder
/// after `d` levels at inverse-scale `x = gap / T`.
///
/// The dropped second moment of the geometric distribution is at most
/// `2 e^{-dx} (1 + dx)²` in units of `T²`; it is compared against the
/// untruncated variance `x² / (4 sinh²(x/2))`.
fn truncation_error_bound(d: u64, x: f64) -> f64 {
    let dx = d as f64 * x;
    let half = 0.5 * x;
    let variance = if half < 1e-8 {
        1.0
    } else {
        // (x/2)² / sinh²(x/2), written to survive large x
        let s = x.ln() - half - (-(-x).exp_m1()).ln();
        (2.0 * s).exp()
    };
    4.0 * (-dx).exp() * (1.0 + dx).powi(2) / variance
}

/// Harmonic ladder truncated so that the infinite oscillator is reproduced
/// at every temperature up to `temp_max` with relative QFI error below
/// `tail_tol`.
pub fn oscillator_truncated(
    gap: f64,
    temp_max: f64,
    tail_tol: f64,
) -> Result<EnergySpectrum, SpectrumError> {
    check_gap(gap)?;
    if !(temp_max > 0.0 && temp_max.is_finite()) {
        return Err(SpectrumError::InvalidArgument(format!(
            "temp_max must be positive, got {temp_max}"
        )));
    }
    if !(tail_tol > 0.0 && tail_tol < 1.0) {
        return Err(SpectrumError::InvalidArgument(format!(
            "tail_tol must lie in (0, 1), got {tail_tol}"
        )));
    }
    let x = gap / temp_max;
    // Start from the bare Boltzmann tail e^{-dx} < tol and walk upward.
    let start = ((-tail_tol.ln()) / x).floor();
    if start > TRUNCATION_CAP as f64 {
        return Err(SpectrumError::TruncationFailure {
            tail_tol,
            cap: TRUNCATION_CAP,
        });
    }
    let mut d = (start as u64).max(2);
    while truncation_error_bound(d, x) >= tail_tol {
        d += 1;
        if d > TRUNCATION_CAP {
            return Err(SpectrumError::TruncationFailure {
                tail_tol,
                cap: TRUNCATION_CAP,
            });
        }
    }
    harmonic(d as usize, gap)
}

/// Three-level spectrum with excited energies `gap1 ≤ gap2` above the
/// ground. Equal gaps give one doubly degenerate excited level.
pub fn three_level(gap1: f64, gap2: f64) -> Result<EnergySpectrum, SpectrumError> {
    check_gap(gap1)?;
    check_gap(gap2)?;
    if gap2 < gap1 {
        return Err(SpectrumError::GapOrder { gap1, gap2 });
    }
    EnergySpectrum::from_levels([(0.0, 1), (gap1, 1), (gap2, 1)])
}

/// Spectrum listed as `(absolute energy, multiplicity)` blocks, the first
/// entry being the unique ground state.
pub fn degenerate_staircase(levels: &[(f64, i64)]) -> Result<EnergySpectrum, SpectrumError> {
    let first = levels.first().ok_or(SpectrumError::TooFewLevels(0))?;
    for &(energy, g) in levels {
        if !energy.is_finite() {
            return Err(SpectrumError::NonFiniteEnergy(energy));
        }
        if energy < 0.0 {
            return Err(SpectrumError::NegativeEnergy(energy));
        }
        if g < 1 {
            return Err(SpectrumError::InvalidMultiplicity(g));
        }
    }
    if first.1 != 1 || levels[1..].iter().any(|&(e, _)| e <= first.0) {
        return Err(SpectrumError::GroundNotFirst);
    }
    EnergySpectrum::from_levels(levels.iter().map(|&(e, g)| (e, g as u64)))
}

/// Staircase whose entries after the ground give successive gaps rather
/// than absolute energies: block `k` sits at the running sum of gaps.
pub fn staircase_from_gaps(levels: &[(f64, i64)]) -> Result<EnergySpectrum, SpectrumError> {
    let mut absolute = Vec::with_capacity(levels.len());
    let mut running = 0.0;
    for (k, &(value, g)) in levels.iter().enumerate() {
        if k > 0 {
            if value.is_nan() || value <= 0.0 {
                return Err(SpectrumError::NonPositiveGap(value));
            }
            running += value;
        } else {
            running = value;
        }
        absolute.push((running, g));
    }
    degenerate_staircase(&absolute)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpectrum {
    levels: Vec<RawLevel>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLevel {
    energy: f64,
    g: i64,
}

/// Parses `{"levels":[{"energy":<number>,"g":<positive integer>}...]}`.
pub fn parse_spectrum(text: &str) -> Result<EnergySpectrum, SpectrumError> {
    let raw: RawSpectrum = serde_json::from_str(text).map_err(|e| {
        use serde_json::error::Category;
        match e.classify() {
            Category::Data => SpectrumError::Schema(e.to_string()),
            _ => SpectrumError::MalformedJson(e.to_string()),
        }
    })?;
    if raw.levels.is_empty() {
        return Err(SpectrumError::Schema("`levels` must not be empty".into()));
    }
    let mut pairs = Vec::with_capacity(raw.levels.len());
    for level in raw.levels {
        if level.g < 1 {
            return Err(SpectrumError::InvalidMultiplicity(level.g));
        }
        pairs.push((level.energy, level.g as u64));
    }
    EnergySpectrum::from_levels(pairs)
}

/// Serializes a spectrum in the same JSON schema `parse_spectrum` reads.
pub fn to_json(spectrum: &EnergySpectrum) -> String {
    let body: Vec<String> = spectrum
        .levels()
        .iter()
        .map(|l| format!("{{\"energy\":{:?},\"g\":{}}}", l.energy, l.multiplicity))
        .collect();
    format!("{{\"levels\":[{}]}}", body.join(","))
}
