//! `kobalt`: hyperbolic and Kobayashi geometry on planar domains from the
//! command line. Every command prints a JSON report; `sweep`, `lattice-gaps`
//! and the family form of `rescale` can also print CSV.

mod commands;
mod error;
mod report;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use kobalt::c01::ConstantsConfig;

use commands::*;
use error::{invalid, CliError};
use report::{Outcome, Report};

/// Seed used when neither `--seed` nor `KOBALT_SEED` is given.
const DEFAULT_SEED: u64 = 0x6b6f_6261_6c74;

#[derive(Debug, Parser)]
#[command(name = "kobalt", version, about = "Kobayashi and Poincaré geometry on planar domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format. Defaults to CSV for `sweep` and `lattice-gaps`, JSON otherwise.
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Seed for sampling harnesses; overrides KOBALT_SEED.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Lower bound for the Bloch–Landau constant.
    #[arg(long, global = true)]
    bloch_landau_c: Option<f64>,
    /// Radius of the charts around 0, 1 and ∞.
    #[arg(long, global = true)]
    chart_radius: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Poincaré distance ω(z, w) on the unit disk.
    Omega(OmegaArgs),
    /// Two-sided Kobayashi distance estimate with a validated disc chain.
    Distance(DistanceArgs),
    /// Infinitesimal metric, exact where known and as bounds on ℂ∖{0,1}.
    Metric(MetricArgs),
    /// Radius interval beyond which no map with f(0)=a, f′(0)=b omits 0 and 1.
    Landau(LandauArgs),
    /// Modulus bound for maps of the unit disk into a domain.
    Schottky(SchottkyArgs),
    /// Length of the circle |z| = r in the punctured disk and the ball it fits in.
    PicardCircle(PicardCircleArgs),
    /// Rescale one function, or the family exp(n·z), and check the two-bound.
    Rescale(RescaleArgs),
    /// n-th root of a zero-free function.
    RootTrick(RootTrickArgs),
    /// Build and check the lattice-omitting map of a function omitting 0 and 1.
    LatticeMap(LatticeMapArgs),
    /// Heights and gaps of the omitted lattice.
    LatticeGaps(LatticeGapsArgs),
    /// The comparison metric μ and its curvature at a point.
    Curvature(CurvatureArgs),
    /// Evaluate a quantity on a rectangular grid.
    Sweep(SweepArgs),
    /// Witnesses for the equivalent hyperbolicity properties of a domain.
    Equivalence(EquivalenceArgs),
    /// Distances along a sequence approaching a boundary point.
    Escape(EscapeArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Omega(_) => "omega",
            Command::Distance(_) => "distance",
            Command::Metric(_) => "metric",
            Command::Landau(_) => "landau",
            Command::Schottky(_) => "schottky",
            Command::PicardCircle(_) => "picard-circle",
            Command::Rescale(_) => "rescale",
            Command::RootTrick(_) => "root-trick",
            Command::LatticeMap(_) => "lattice-map",
            Command::LatticeGaps(_) => "lattice-gaps",
            Command::Curvature(_) => "curvature",
            Command::Sweep(_) => "sweep",
            Command::Equivalence(_) => "equivalence",
            Command::Escape(_) => "escape",
        }
    }

    fn default_format(&self) -> Format {
        match self {
            Command::Sweep(_) | Command::LatticeGaps(_) => Format::Csv,
            _ => Format::Json,
        }
    }

    fn args(&self) -> serde_json::Value {
        let v = match self {
            Command::Omega(a) => serde_json::to_value(a),
            Command::Distance(a) => serde_json::to_value(a),
            Command::Metric(a) => serde_json::to_value(a),
            Command::Landau(a) => serde_json::to_value(a),
            Command::Schottky(a) => serde_json::to_value(a),
            Command::PicardCircle(a) => serde_json::to_value(a),
            Command::Rescale(a) => serde_json::to_value(a),
            Command::RootTrick(a) => serde_json::to_value(a),
            Command::LatticeMap(a) => serde_json::to_value(a),
            Command::LatticeGaps(a) => serde_json::to_value(a),
            Command::Curvature(a) => serde_json::to_value(a),
            Command::Sweep(a) => serde_json::to_value(a),
            Command::Equivalence(a) => serde_json::to_value(a),
            Command::Escape(a) => serde_json::to_value(a),
        };
        v.expect("arguments serialize")
    }

    fn run(&self, ctx: &Context) -> Result<Outcome, CliError> {
        match self {
            Command::Omega(a) => omega(a),
            Command::Distance(a) => distance(a, ctx),
            Command::Metric(a) => metric(a, ctx),
            Command::Landau(a) => landau(a, ctx),
            Command::Schottky(a) => schottky(a, ctx),
            Command::PicardCircle(a) => picard_circle(a),
            Command::Rescale(a) => rescale(a),
            Command::RootTrick(a) => root_trick_cmd(a),
            Command::LatticeMap(a) => lattice_map(a),
            Command::LatticeGaps(a) => lattice_gaps_cmd(a),
            Command::Curvature(a) => curvature(a),
            Command::Sweep(a) => sweep(a, ctx),
            Command::Equivalence(a) => equivalence(a, ctx),
            Command::Escape(a) => escape(a),
        }
    }
}

fn seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("KOBALT_SEED") {
        Ok(s) => {
            let s = s.trim();
            let parsed = match s.strip_prefix("0x") {
                Some(hex) => u64::from_str_radix(hex, 16),
                None => s.parse(),
            };
            parsed.map_err(|_| invalid(format!("KOBALT_SEED must be an unsigned integer, got '{s}'")))
        }
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let defaults = ConstantsConfig::default();
    let constants = ConstantsConfig::new(
        cli.bloch_landau_c.unwrap_or(defaults.bloch_landau_c),
        cli.chart_radius.unwrap_or(defaults.chart_radius),
    )?;
    let ctx = Context { seed: seed(cli.seed)?, constants };
    let format = cli.format.unwrap_or(cli.command.default_format());
    let outcome = cli.command.run(&ctx)?;
    let mut out: Box<dyn Write> = match &cli.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match format {
        Format::Csv => {
            let Some(table) = &outcome.table else {
                return Err(invalid(format!("`{}` has no CSV form", cli.command.name())));
            };
            table.write(&mut out)?;
        }
        Format::Json => {
            let config = json!({
                "args": cli.command.args(),
                "seed": ctx.seed,
                "constants": ctx.constants,
                "format": format,
            });
            let report = Report::new(cli.command.name(), config, outcome);
            serde_json::to_writer_pretty(&mut out, &report).map_err(io::Error::other)?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kobalt: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
