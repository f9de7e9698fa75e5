//! Swarm-trained feed-forward classifiers.
//!
//! This crate trains fixed-topology neural network classifiers by treating
//! the flattened weight vector as a point in a bounded search space and
//! minimizing mean squared error with population-based optimizers:
//!
//! * [`swarm`]: particle swarm variants, including one initialized from a
//!   Sobol low-discrepancy sequence with a tanh-shaped increasing inertia
//!   schedule, plus classical decreasing-inertia and geometric-center
//!   variants.
//! * [`gravsearch`]: gravitational search and its particle-swarm hybrid.
//! * [`lowdisc`]: the Sobol sequence generator behind swarm initialization.
//! * [`network`]: the one-hidden-layer sigmoid network and its fitness.
//! * [`stability`]: eigenvalue analysis of the linearized single-particle
//!   dynamics, with trajectory simulation to check the verdicts.
//! * [`datapipe`]: CSV loading, min-max normalization, stratified splits.
//! * [`evaluate`]: confusion matrices, precision/recall/F, metrics export.
//! * [`runner`]: config-file driven experiments tying it all together.
//!
//! Every run is deterministic given its seed list: optimizers use counter-
//! mode RNG streams keyed by (seed, role), so results are reproducible to
//! the byte across processes and thread counts.

pub mod datapipe;
pub mod error;
pub mod evaluate;
pub mod gravsearch;
pub mod lowdisc;
pub mod network;
pub mod runner;
pub mod stability;
pub mod swarm;

pub use datapipe::{
    apply_normalization, fit_normalization, holdout_split, load_csv, normalize, DataSplit,
    Dataset, LabelColumn, NormalizationStats,
};
pub use error::{Error, ErrorCategory, Result};
pub use evaluate::{
    class_metrics, confusion_matrix, metrics_json, ClassMetrics, ClassStats, ConfusionMatrix,
};
pub use gravsearch::{run_gsa, run_psogsa, GsaConfig, PsoGsaConfig};
pub use lowdisc::{sobol_points, SobolStream};
pub use network::{decode, mse_fitness, predict, LabeledSample, NetworkWeights, Topology};
pub use runner::{
    compare_algorithms, emit_outputs, run_experiment, Algorithm, Comparison, ExperimentConfig,
    RunReport, SeedOutcome,
};
pub use stability::{analyze, simulate_trajectory, StabilityReport, Trajectory};
pub use swarm::{
    inertia_at, minimize, run_pso, ConvergenceTrace, InertiaSchedule, PsoVariant, SwarmConfig,
    TraceRecord,
};
