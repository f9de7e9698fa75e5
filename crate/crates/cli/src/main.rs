//! Command-line front end: train one algorithm, compare all of them, or
//! analyze the reduced single-particle dynamics.
//!
//! Exit codes: 0 success, 2 configuration errors (including bad flags),
//! 3 data errors, 4 numeric failures.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use swarmnn::runner::{
    compare_algorithms, emit_outputs, run_experiment, Algorithm, ExperimentConfig,
};
use swarmnn::stability;
use swarmnn::{Error, Result};

#[derive(Parser)]
#[command(
    name = "swarmnn",
    version,
    about = "Train feed-forward classifiers with swarm and gravitational optimizers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one algorithm on a CSV dataset over a list of seeds.
    Train(TrainArgs),
    /// Run all five algorithms on one dataset and rank best-of-seeds accuracy.
    Compare(CompareArgs),
    /// Eigenvalue analysis of the reduced particle dynamics at one point,
    /// with optional trajectory and region-map CSV output.
    Stability(StabilityArgs),
}

/// Experiment settings shared by `train` and `compare`. A config file
/// provides the base values; every flag given here overrides the file.
#[derive(Args)]
struct ExperimentArgs {
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV dataset path (features then one label column).
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Swarm population size.
    #[arg(long)]
    pop: Option<usize>,
    /// Iteration budget.
    #[arg(long)]
    iters: Option<usize>,
    /// Hidden-layer size (default: 2*features + 1).
    #[arg(long)]
    hidden: Option<usize>,
    /// Comma-separated seed list, e.g. 0,1,2.
    #[arg(long)]
    seeds: Option<String>,
    /// Train fraction of the holdout split, in (0, 1).
    #[arg(long)]
    split: Option<f64>,
    /// Output directory for CSV/JSON/summary files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overwrite existing output files.
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
    /// PPSO, BPSO, SGPSO, GSA, or PSOGSA.
    #[arg(long)]
    algorithm: Option<String>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
}

#[derive(Args)]
struct StabilityArgs {
    /// Inertia weight of the reduced update.
    #[arg(long, allow_hyphen_values = true)]
    omega: f64,
    /// Combined attraction strength, (c1 + c2) / 2 at the mean random draw.
    #[arg(long, allow_hyphen_values = true)]
    psi: f64,
    /// Initial velocity for the simulated trajectory.
    #[arg(long, default_value_t = 1e-3, allow_hyphen_values = true)]
    v0: f64,
    /// Initial displacement from the attractor.
    #[arg(long, default_value_t = 1e-3, allow_hyphen_values = true)]
    y0: f64,
    /// Trajectory length in steps.
    #[arg(long, default_value_t = 200)]
    steps: usize,
    /// Write trajectory.csv and region.csv into this directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overwrite existing output files.
    #[arg(long)]
    force: bool,
}

impl ExperimentArgs {
    /// Base config from the file (or built-in defaults), then flag overrides.
    fn resolve(&self, algorithm: Option<&str>) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load_config_file(path)?,
            None => {
                let dataset = self.dataset.clone().ok_or_else(|| {
                    Error::InvalidConfig(
                        "no dataset given; pass --dataset or --config".into(),
                    )
                })?;
                ExperimentConfig::new(dataset, Algorithm::Ppso)
            }
        };
        if let Some(d) = &self.dataset {
            cfg.dataset = d.clone();
        }
        if let Some(a) = algorithm {
            cfg.algorithm = a.parse()?;
        }
        if let Some(p) = self.pop {
            cfg.pop = p;
        }
        if let Some(i) = self.iters {
            cfg.iters = i;
        }
        if let Some(h) = self.hidden {
            cfg.hidden = Some(h);
        }
        if let Some(s) = &self.seeds {
            cfg.apply_key_value("seeds", s)?;
        }
        if let Some(f) = self.split {
            cfg.split = f;
        }
        if let Some(o) = &self.out {
            cfg.out = Some(o.clone());
        }
        Ok(cfg)
    }
}

fn cmd_train(args: &TrainArgs) -> Result<()> {
    let cfg = args.experiment.resolve(args.algorithm.as_deref())?;
    if args.experiment.config.is_none() && args.algorithm.is_none() {
        return Err(Error::InvalidConfig(
            "no algorithm given; pass --algorithm or --config".into(),
        ));
    }
    let report = run_experiment(&cfg)?;
    print!("{}", report.summary_text());
    if let Some(dir) = &cfg.out {
        let files = emit_outputs(&report, dir, args.experiment.force)?;
        println!("wrote {} files to {}", files.len(), dir.display());
    }
    Ok(())
}

fn cmd_compare(args: &CompareArgs) -> Result<()> {
    let base = args.experiment.resolve(None)?;
    let configs: Vec<ExperimentConfig> = Algorithm::ALL
        .iter()
        .map(|&algorithm| ExperimentConfig {
            algorithm,
            ..base.clone()
        })
        .collect();
    let comparison = compare_algorithms(&configs)?;
    print!("{}", comparison.to_text_table());
    if let Some(dir) = &base.out {
        for report in &comparison.reports {
            let sub = dir.join(report.config.algorithm.to_string().to_lowercase());
            emit_outputs(report, &sub, args.experiment.force)?;
        }
        println!("wrote per-algorithm outputs under {}", dir.display());
    }
    Ok(())
}

fn cmd_stability(args: &StabilityArgs) -> Result<()> {
    let report = stability::analyze(args.omega, args.psi);
    let (l1, l2) = report.eigenvalues;
    println!("omega = {}, psi = {}", report.omega, report.psi);
    println!(
        "matrix = [[{}, {}], [{}, {}]]",
        report.matrix[0][0], report.matrix[0][1], report.matrix[1][0], report.matrix[1][1]
    );
    println!(
        "trace = {}, determinant = {}",
        report.trace, report.determinant
    );
    println!("eigenvalues = {} and {}", l1, l2);
    println!("spectral radius = {}", report.spectral_radius);
    println!(
        "spectral criterion (|lambda| < 1):           {}",
        verdict(report.spectral_stable)
    );
    println!(
        "continuous-time criterion (0 < omega < psi-1): {}",
        verdict(report.continuous_stable)
    );
    if report.spectral_stable != report.continuous_stable {
        println!("the two criteria disagree at this point");
    }

    let trajectory = stability::simulate_trajectory(
        args.omega, args.psi, args.v0, args.y0, args.steps,
    );
    let last = trajectory.states.last().expect("at least the initial state");
    println!(
        "trajectory from (v0, y0) = ({}, {}): {} steps, final |state| = {:.6e}{}",
        args.v0,
        args.y0,
        trajectory.states.len() - 1,
        (last.v * last.v + last.y * last.y).sqrt(),
        if trajectory.diverged {
            ", diverged"
        } else {
            ""
        }
    );

    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.clone(),
            source,
        })?;
        let targets = [
            (dir.join("trajectory.csv"), stability::trajectory_csv(&trajectory)),
            (
                dir.join("region.csv"),
                stability::region_csv((-0.5, 1.5), (0.0, 4.0), 80, 160),
            ),
        ];
        if !args.force {
            for (path, _) in &targets {
                if path.exists() {
                    return Err(Error::InvalidConfig(format!(
                        "{} already exists; pass --force to overwrite",
                        path.display()
                    )));
                }
            }
        }
        for (path, content) in targets {
            std::fs::write(&path, content).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn verdict(stable: bool) -> &'static str {
    if stable {
        "stable"
    } else {
        "unstable"
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Train(args) => cmd_train(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Stability(args) => cmd_stability(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
