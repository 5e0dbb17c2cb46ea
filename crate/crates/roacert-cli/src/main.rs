//! `roacert`: learn and certify piecewise-affine Lyapunov functions and
//! region-of-attraction estimates from sampled dynamics.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use roacert_cli::config::{Overrides, RunConfig};
use roacert_cli::{commands, CliError, EXIT_CONFIG};
use roacert_core::program::BoundaryMode;

#[derive(Parser)]
#[command(
    name = "roacert",
    about = "Data-driven Lyapunov certification and region-of-attraction estimation",
    long_about = "Learns a piecewise-affine Lyapunov function from sampled (state, velocity)\n\
        pairs by solving a robust second-order cone program, certifies it from the\n\
        optimal value, and extracts a region-of-attraction estimate.\n\n\
        Exit codes: 0 success, 1 config/IO error, 2 certification or verification\n\
        failure, 3 covering failure, 4 sequential stage failure.\n\n\
        Set ROACERT_EXTERNAL_SOLVER to a shell command template containing\n\
        '{problem}' and '{solution}' placeholders to route standalone solves to an\n\
        external conic solver (see 'solve-problem' for the file formats)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Path to the run-config JSON file.
    #[arg(long)]
    config: PathBuf,
    /// Override: dataset CSV path (clears any oracle fixture).
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Override: Lipschitz bound M.
    #[arg(long)]
    m: Option<f64>,
    /// Override: negativity tolerance epsilon.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Override: boundary level alpha.
    #[arg(long)]
    alpha: Option<f64>,
    /// Override: boundary mode (with_boundary | no_boundary).
    #[arg(long)]
    mode: Option<String>,
    /// Override: number of tessellation seed points.
    #[arg(long)]
    n_seeds: Option<usize>,
    /// Override: tessellation RNG seed.
    #[arg(long)]
    rng_seed: Option<u64>,
    /// Override: covering refinement budget.
    #[arg(long)]
    refinement_budget: Option<usize>,
    /// Override: negativity grid resolution per axis.
    #[arg(long)]
    grid_resolution: Option<usize>,
    /// Override: number of soundness trajectories.
    #[arg(long)]
    trajectories: Option<usize>,
    /// Override: output directory.
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

impl ConfigArgs {
    fn load(&self) -> Result<RunConfig, CliError> {
        let mode = match self.mode.as_deref() {
            None => None,
            Some("with_boundary") => Some(BoundaryMode::WithBoundary),
            Some("no_boundary") => Some(BoundaryMode::NoBoundary),
            Some(other) => {
                return Err(CliError::Config(format!(
                    "mode must be 'with_boundary' or 'no_boundary', got '{other}'"
                )))
            }
        };
        let overrides = Overrides {
            dataset_path: self.dataset.clone(),
            m: self.m,
            epsilon: self.epsilon,
            alpha: self.alpha,
            mode,
            n_seeds: self.n_seeds,
            rng_seed: self.rng_seed,
            refinement_budget: self.refinement_budget,
            grid_resolution: self.grid_resolution,
            n_trajectories: self.trajectories,
            output_dir: self.output_dir.clone(),
        };
        RunConfig::load(&self.config, &overrides)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Tessellate the region and test whether the dataset covers every vertex.
    CheckCovering(ConfigArgs),
    /// Learn, certify, and export a Lyapunov function (and RoA artifacts).
    Learn(ConfigArgs),
    /// Learn with the boundary level condition dropped (RoA extraction mode).
    LearnRoa(ConfigArgs),
    /// Grow the certified region through a nested region sequence.
    Sequential(ConfigArgs),
    /// Check a learnt function against a named oracle's true dynamics.
    Verify {
        /// Path to lyapunov.json.
        #[arg(long)]
        lyapunov: PathBuf,
        /// Path to roa.json (recomputed from the function when omitted).
        #[arg(long)]
        roa: Option<PathBuf>,
        /// Oracle name: linear-stable | nonpoly-2d | vdp-reverse.
        #[arg(long)]
        oracle: String,
        #[arg(long, default_value_t = 200)]
        grid_resolution: usize,
        #[arg(long, default_value_t = 100)]
        trajectories: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value = "out")]
        output_dir: PathBuf,
    },
    /// Assemble the conic program for a config and dump it as JSON.
    ExportProblem {
        #[command(flatten)]
        config: ConfigArgs,
        /// Problem file to write.
        #[arg(long, default_value = "problem.json")]
        output: PathBuf,
    },
    /// Solve a standard-form problem file with the built-in solver.
    SolveProblem {
        /// Problem JSON (fields A_triplets, b, c, cones).
        problem: PathBuf,
        /// Solution JSON to write (fields z, y, s, status, residuals).
        solution: PathBuf,
    },
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::CheckCovering(args) => commands::cmd_check_covering(&args.load()?),
        Command::Learn(args) => commands::cmd_learn(&args.load()?, false),
        Command::LearnRoa(args) => commands::cmd_learn(&args.load()?, true),
        Command::Sequential(args) => commands::cmd_sequential(&args.load()?),
        Command::Verify {
            lyapunov,
            roa,
            oracle,
            grid_resolution,
            trajectories,
            seed,
            output_dir,
        } => commands::cmd_verify(
            &lyapunov,
            roa.as_deref(),
            &oracle,
            grid_resolution,
            trajectories,
            seed,
            &output_dir,
        ),
        Command::ExportProblem { config, output } => {
            commands::cmd_export_problem(&config.load()?, &output)
        }
        Command::SolveProblem { problem, solution } => {
            commands::cmd_solve_problem(&problem, &solution)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG as u8)
        }
    }
}
