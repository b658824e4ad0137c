//! Command-line front end: simulate grooved-substrate scenarios, sweep
//! groove angles, calibrate gait parameters, design courses, export
//! printable tiles, and plot trajectories.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use groove_gait::cli;

#[derive(Parser)]
#[command(
    name = "groove-gait",
    version,
    about = "Inchworm crawler on grooved substrates: simulate, sweep, calibrate, plan, mesh, plot"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write the trajectory CSV
    Simulate {
        /// Scenario file
        scenario: PathBuf,
        /// Output CSV path
        output: PathBuf,
    },
    /// Re-run a scenario at several uniform groove angles and write a summary CSV
    Sweep {
        /// Base scenario file
        scenario: PathBuf,
        /// Output CSV path
        output: PathBuf,
        /// Comma-separated groove angles in degrees, right-turn positive
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        angles: Vec<f64>,
    },
    /// Fit free gait parameters to an observed heading series
    Calibrate {
        /// Problem file: a scenario plus [fit] and [[free]] sections
        problem: PathBuf,
        /// Observation CSV with header time_s,heading_deg
        observations: PathBuf,
        /// Output report path
        output: PathBuf,
    },
    /// Design a groove course that steers the crawler through waypoints
    Plan {
        /// Target file with [target] and [[waypoints]] sections
        target: PathBuf,
        /// Palette file with a [palette] section
        palette: PathBuf,
        /// Output plan path; the predicted CSV lands beside it
        output: PathBuf,
    },
    /// Export substrate tiles from a scenario or plan file as binary STL
    Mesh {
        /// Scenario file or plan file
        input: PathBuf,
        /// Directory for tile_<id>.stl files
        outdir: PathBuf,
        /// Slab thickness under the ridges
        #[arg(long, default_value_t = 2.0)]
        thickness_mm: f64,
        /// Depth of the printable strips cut from a plan
        #[arg(long, default_value_t = 150.0)]
        strip_width_mm: f64,
    },
    /// Draw heading-versus-time curves from trajectory CSVs as one SVG
    Plot {
        /// Output SVG path
        #[arg(short, long)]
        output: PathBuf,
        /// Trajectory CSV files
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Mark samples where a foot changed tiles
        #[arg(long)]
        markers: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    let result = match cli.command {
        Command::Simulate { scenario, output } => cli::simulate(&scenario, &output),
        Command::Sweep {
            scenario,
            output,
            angles,
        } => cli::sweep(&scenario, &angles, &output),
        Command::Calibrate {
            problem,
            observations,
            output,
        } => cli::calibrate(&problem, &observations, &output),
        Command::Plan {
            target,
            palette,
            output,
        } => cli::plan(&target, &palette, &output),
        Command::Mesh {
            input,
            outdir,
            thickness_mm,
            strip_width_mm,
        } => cli::mesh(&input, &outdir, thickness_mm, strip_width_mm),
        Command::Plot {
            output,
            inputs,
            markers,
        } => cli::plot(&inputs, &output, markers),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 1 } else { 2 })
        }
    }
}
