//! Command-line front end for `qthermo-core`.
//!
//! Exit codes: 0 on success, 1 on a domain or I/O error, 2 on a usage
//! error.

pub mod figures;
pub mod output;
pub mod tables;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use qthermo_core::metrology::{self, find_optimal_temperature, ProbeFamily};
use qthermo_core::spectra::{
    degenerate_staircase, harmonic, oscillator_truncated, parse_spectrum, staircase_from_gaps, three_level,
};
use qthermo_core::{EnergySpectrum, GridScale, TemperatureGrid, TimeGrid};

use crate::figures::Figure;
use crate::output::{emit, emit_to_path, Format, Output, Table};

#[derive(Debug, Parser)]
#[command(name = "qthermo", version, about = "Quantum thermometry precision limits and thermalization speed limits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// QFI of a spectrum over a temperature grid.
    Qfi(QfiArgs),
    /// Temperature maximizing the QFI.
    Optimum(OptimumArgs),
    /// Interior local maxima of the QFI on a log grid.
    Peaks(PeaksArgs),
    /// Linear and quadratic laws of the optimum across gaps.
    Scaling(ScalingArgs),
    /// Probe thermalization trajectories.
    #[command(subcommand)]
    Dynamics(DynamicsCommand),
    /// Write the curve set of one figure as CSV files.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Qubit,
    Oscillator,
    Harmonic,
    ThreeLevel,
    Staircase,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Built-in spectrum family.
    #[arg(long, value_enum, required_unless_present = "spectrum", conflicts_with = "spectrum")]
    pub family: Option<Family>,
    /// JSON spectrum file: {"levels":[{"energy":E,"g":N},...]}.
    #[arg(long, value_name = "FILE")]
    pub spectrum: Option<PathBuf>,
    /// Level spacing (first gap for three-level).
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub delta: f64,
    /// Second excited energy of the three-level family.
    #[arg(long, allow_negative_numbers = true)]
    pub delta2: Option<f64>,
    /// Dimension of the harmonic family.
    #[arg(long)]
    pub d: Option<usize>,
    /// Staircase blocks as `E:g,E:g,...`, ground first.
    #[arg(long)]
    pub levels: Option<String>,
    /// Read staircase entries after the ground as successive gaps.
    #[arg(long)]
    pub gaps: bool,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub tmin: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub tmax: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Linear instead of logarithmic spacing.
    #[arg(long)]
    pub linear: bool,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file (a directory for multi-table output).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct QfiArgs {
    #[command(flatten)]
    pub spectrum: SpectrumArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Add the printed qubit closed form as an extra column.
    #[arg(long)]
    pub as_printed: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct OptimumArgs {
    #[command(flatten)]
    pub spectrum: SpectrumArgs,
    /// Bracket lower end (default 0.01 × first gap).
    #[arg(long, allow_negative_numbers = true)]
    pub tmin: Option<f64>,
    /// Bracket upper end (default 10 × first gap).
    #[arg(long, allow_negative_numbers = true)]
    pub tmax: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct PeaksArgs {
    #[command(flatten)]
    pub spectrum: SpectrumArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScalingFamily {
    Qubit,
    Oscillator,
    Harmonic,
}

#[derive(Debug, Args)]
pub struct ScalingArgs {
    #[arg(long, value_enum)]
    pub family: ScalingFamily,
    #[arg(long)]
    pub d: Option<usize>,
    /// Gaps to optimize at.
    #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,1,2,4,8", allow_negative_numbers = true)]
    pub deltas: Vec<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Subcommand)]
pub enum DynamicsCommand {
    /// Lindblad thermalization with a bath at the probe gap.
    Markov(MarkovArgs),
    /// Flip-flop coupling to a single thermal qubit.
    Swap(SwapArgs),
}

#[derive(Debug, Args)]
pub struct TrajectoryArgs {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub delta: f64,
    /// Bath temperature; repeat for several runs.
    #[arg(long = "temp", required = true, allow_negative_numbers = true)]
    pub temps: Vec<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub tmax: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub steps: usize,
    /// Also emit speed-limit series and window tables.
    #[arg(long)]
    pub qsl: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct MarkovArgs {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub gamma: f64,
    #[command(flatten)]
    pub common: TrajectoryArgs,
}

#[derive(Debug, Args)]
pub struct SwapArgs {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub j: f64,
    #[command(flatten)]
    pub common: TrajectoryArgs,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub figure: Figure,
    /// Directory receiving the CSV files.
    #[arg(long, default_value = "figures")]
    pub out: PathBuf,
}

enum Failure {
    Usage(String),
    Domain(anyhow::Error),
}

impl<E: std::error::Error + Send + Sync + 'static> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Domain(e.into())
    }
}

fn domain(e: anyhow::Error) -> Failure {
    Failure::Domain(e)
}

type Outcome<T> = Result<T, Failure>;

const DEFAULT_GRID_POINTS: usize = 500;
const DEFAULT_PEAK_POINTS: usize = 2000;

fn parse_levels(text: &str) -> Outcome<Vec<(f64, i64)>> {
    text.split(',')
        .map(|item| {
            let (e, g) = item
                .split_once(':')
                .ok_or_else(|| Failure::Usage(format!("--levels entry `{item}` is not of the form E:g")))?;
            let e: f64 = e
                .trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("invalid energy `{e}` in --levels")))?;
            let g: i64 = g
                .trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("invalid multiplicity `{g}` in --levels")))?;
            Ok((e, g))
        })
        .collect()
}

impl SpectrumArgs {
    /// `temp_max` sets the oscillator truncation.
    fn build(&self, temp_max: f64) -> Outcome<EnergySpectrum> {
        if self.gaps && self.family != Some(Family::Staircase) {
            return Err(Failure::Usage("--gaps applies to --family staircase only".into()));
        }
        if let Some(path) = &self.spectrum {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))
                .map_err(domain)?;
            return Ok(parse_spectrum(&text)?);
        }
        let family = self.family.expect("clap enforces a spectrum source");
        let spectrum = match family {
            Family::Qubit => harmonic(2, self.delta)?,
            Family::Oscillator => oscillator_truncated(self.delta, temp_max, ProbeFamily::OSCILLATOR_TAIL_TOL)?,
            Family::Harmonic => {
                let d = self
                    .d
                    .ok_or_else(|| Failure::Usage("--family harmonic requires --d".into()))?;
                harmonic(d, self.delta)?
            }
            Family::ThreeLevel => {
                let gap2 = self
                    .delta2
                    .ok_or_else(|| Failure::Usage("--family three-level requires --delta2".into()))?;
                three_level(self.delta, gap2)?
            }
            Family::Staircase => {
                let text = self
                    .levels
                    .as_deref()
                    .ok_or_else(|| Failure::Usage("--family staircase requires --levels".into()))?;
                let levels = parse_levels(text)?;
                if self.gaps {
                    staircase_from_gaps(&levels)?
                } else {
                    degenerate_staircase(&levels)?
                }
            }
        };
        Ok(spectrum)
    }
}

impl GridArgs {
    fn resolve(&self, default_min: f64, default_max: f64, default_points: usize) -> Outcome<TemperatureGrid> {
        let scale = if self.linear { GridScale::Linear } else { GridScale::Log };
        Ok(TemperatureGrid::new(
            self.tmin.unwrap_or(default_min),
            self.tmax.unwrap_or(default_max),
            self.points.unwrap_or(default_points),
            scale,
        )?)
    }
}

fn deliver(output: Output, args: &OutputArgs, default: Format, stdout: &mut dyn Write) -> Outcome<()> {
    let format = args.format.unwrap_or(default);
    match &args.out {
        Some(path) => {
            emit_to_path(&output, format, path)
                .with_context(|| format!("writing {}", path.display()))
                .map_err(domain)?;
        }
        None => emit(&output, format, stdout)?,
    }
    Ok(())
}

fn qfi(args: &QfiArgs, stdout: &mut dyn Write) -> Outcome<()> {
    let grid = args.grid.resolve(0.01, 10.0, DEFAULT_GRID_POINTS)?;
    let spectrum = args.spectrum.build(grid.max)?;
    let table = if args.as_printed {
        if spectrum.len() != 2 || spectrum.dimension() != 2 {
            return Err(Failure::Usage("--as-printed needs a non-degenerate two-level spectrum".into()));
        }
        tables::qfi_table_as_printed("qfi", spectrum.first_gap(), &spectrum, &grid).map_err(domain)?
    } else {
        tables::qfi_table("qfi", &spectrum, &grid)
    };
    deliver(Output::Table(table), &args.output, Format::Csv, stdout)
}

fn optimum(args: &OptimumArgs, stdout: &mut dyn Write) -> Outcome<()> {
    let provisional_max = args.tmax.unwrap_or(10.0 * args.spectrum.delta);
    let spectrum = args.spectrum.build(provisional_max)?;
    let (lo, hi) = metrology::scaling_bracket(spectrum.first_gap());
    let bracket = (args.tmin.unwrap_or(lo), args.tmax.unwrap_or(hi));
    let report = find_optimal_temperature(&spectrum, bracket)?;
    let mut t = Table::new("optimum", &["t_max", "h_max", "converged", "bracket_lo", "bracket_hi"]);
    t.push(vec![
        report.t_max.into(),
        report.h_max.into(),
        report.converged.into(),
        bracket.0.into(),
        bracket.1.into(),
    ]);
    deliver(Output::Record(t), &args.output, Format::Json, stdout)
}

fn peaks(args: &PeaksArgs, stdout: &mut dyn Write) -> Outcome<()> {
    let grid = args.grid.resolve(0.01, 50.0, DEFAULT_PEAK_POINTS)?;
    let spectrum = args.spectrum.build(grid.max)?;
    let table = tables::peaks_table("peaks", &spectrum, &grid).map_err(domain)?;
    deliver(Output::Table(table), &args.output, Format::Csv, stdout)
}

fn scaling(args: &ScalingArgs, stdout: &mut dyn Write) -> Outcome<()> {
    let family = match args.family {
        ScalingFamily::Qubit => ProbeFamily::Qubit,
        ScalingFamily::Oscillator => ProbeFamily::Oscillator,
        ScalingFamily::Harmonic => ProbeFamily::Harmonic(
            args.d
                .ok_or_else(|| Failure::Usage("--family harmonic requires --d".into()))?,
        ),
    };
    let fit = metrology::scaling_study(&args.deltas, family)?;
    let (summary, points) = tables::scaling_tables("scaling_", &fit);
    deliver(Output::Tables(vec![summary, points]), &args.output, Format::Json, stdout)
}

fn single_or_many(mut tables: Vec<Table>) -> Output {
    if tables.len() == 1 {
        Output::Table(tables.remove(0))
    } else {
        Output::Tables(tables)
    }
}

fn dynamics(cmd: &DynamicsCommand, stdout: &mut dyn Write) -> Outcome<()> {
    let (tables, common) = match cmd {
        DynamicsCommand::Markov(a) => {
            let c = &a.common;
            let grid = TimeGrid::new(c.tmax.unwrap_or(5.0), c.steps)?;
            (
                tables::markov_tables("", c.delta, a.gamma, &c.temps, grid, c.qsl).map_err(domain)?,
                c,
            )
        }
        DynamicsCommand::Swap(a) => {
            let c = &a.common;
            let default_tmax = 2.0 * std::f64::consts::PI / a.j;
            let grid = TimeGrid::new(c.tmax.unwrap_or(default_tmax), c.steps)?;
            (tables::swap_tables("", c.delta, a.j, &c.temps, grid, c.qsl).map_err(domain)?, c)
        }
    };
    deliver(single_or_many(tables), &common.output, Format::Csv, stdout)
}

fn reproduce(args: &ReproduceArgs, stdout: &mut dyn Write) -> Outcome<()> {
    let tables = figures::build(args.figure).map_err(domain)?;
    let written = emit_to_path(&Output::Tables(tables), Format::Csv, &args.out)
        .with_context(|| format!("writing into {}", args.out.display()))
        .map_err(domain)?;
    for path in written {
        writeln!(stdout, "{}", path.display())?;
    }
    Ok(())
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Outcome<()> {
    match &cli.command {
        Command::Qfi(a) => qfi(a, stdout),
        Command::Optimum(a) => optimum(a, stdout),
        Command::Peaks(a) => peaks(a, stdout),
        Command::Scaling(a) => scaling(a, stdout),
        Command::Dynamics(c) => dynamics(c, stdout),
        Command::Reproduce(a) => reproduce(a, stdout),
    }
}

/// Parses `args` (program name first), runs one subcommand and returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return e.exit_code();
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let e = Cli::command().error(clap::error::ErrorKind::ArgumentConflict, msg);
            let _ = write!(stderr, "{}", e.render());
            2
        }
        Err(Failure::Domain(e)) => {
            let _ = writeln!(stderr, "error: {e:#}");
            1
        }
    }
}
