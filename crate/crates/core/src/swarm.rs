//! Global-best particle swarm optimization over box-bounded real vectors,
//! with the three PSO flavors used by the experiment runner: low-discrepancy
//! initialization with a tanh-increasing inertia weight, the classic
//! linearly decreasing baseline, and the geometric-center variant with a
//! third attraction term.
//!
//! The engine is generic over the fitness function; the classifier-training
//! entry point wraps the network's mean-squared-error fitness around it.
//! Within an iteration all fitness evaluations see the same position
//! snapshot, and the social term uses the global best from the end of the
//! previous iteration, so parallel evaluation cannot change results.

use crate::error::{Error, Result};
use crate::lowdisc::{scale_to_bounds, sobol_points};
use crate::network::{mse_fitness, LabeledSample, Topology};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::fmt::Write as _;
use std::path::Path;

/// Inertia-weight schedule over iterations 0..=I_max.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InertiaSchedule {
    /// omega(t) = omega_min + tanh(t * (omega_max - omega_min) / I_max).
    /// Increasing, saturating below omega_max (tanh never reaches 1).
    TanhIncreasing { omega_min: f64, omega_max: f64 },
    /// omega(t) = omega_max - (omega_max - omega_min) * t / I_max.
    LinearDecreasing { omega_min: f64, omega_max: f64 },
    Constant { omega: f64 },
}

impl InertiaSchedule {
    /// Value at t = 0, defined even when the run performs no iterations.
    pub fn initial_value(&self) -> f64 {
        match *self {
            InertiaSchedule::TanhIncreasing { omega_min, .. } => omega_min,
            InertiaSchedule::LinearDecreasing { omega_max, .. } => omega_max,
            InertiaSchedule::Constant { omega } => omega,
        }
    }

    fn validate(&self) -> Result<()> {
        let (lo, hi) = match *self {
            InertiaSchedule::TanhIncreasing {
                omega_min,
                omega_max,
            }
            | InertiaSchedule::LinearDecreasing {
                omega_min,
                omega_max,
            } => (omega_min, omega_max),
            InertiaSchedule::Constant { omega } => (omega, omega),
        };
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(Error::InvalidConfig(format!(
                "inertia schedule requires finite omega_min <= omega_max, got {lo} and {hi}"
            )));
        }
        Ok(())
    }
}

/// Inertia weight at iteration `t` of a run with `i_max` iterations.
pub fn inertia_at(schedule: InertiaSchedule, t: usize, i_max: usize) -> Result<f64> {
    schedule.validate()?;
    if let InertiaSchedule::Constant { omega } = schedule {
        return Ok(omega);
    }
    if i_max == 0 {
        return Err(Error::InvalidConfig(
            "time-varying inertia schedule needs at least one iteration".into(),
        ));
    }
    if t > i_max {
        return Err(Error::InvalidConfig(format!(
            "inertia queried at t={t} beyond I_max={i_max}"
        )));
    }
    let frac = t as f64 / i_max as f64;
    Ok(match schedule {
        InertiaSchedule::TanhIncreasing {
            omega_min,
            omega_max,
        } => omega_min + (frac * (omega_max - omega_min)).tanh(),
        InertiaSchedule::LinearDecreasing {
            omega_min,
            omega_max,
        } => {
            // The subtraction can undershoot omega_min by an ulp at t = I_max;
            // pin the result into the schedule's range.
            (omega_max - (omega_max - omega_min) * frac).clamp(omega_min, omega_max)
        }
        InertiaSchedule::Constant { omega } => omega,
    })
}

/// Which velocity rule the swarm runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsoVariant {
    /// Sobol initialization + tanh-increasing inertia.
    Ppso,
    /// Linearly decreasing inertia baseline.
    Bpso,
    /// Baseline plus a third attraction toward a fixed geometric center.
    Sgpso,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwarmConfig {
    pub algorithm: PsoVariant,
    /// Population size.
    pub pop: usize,
    /// Iteration budget I_max; the initial evaluation is iteration 0.
    pub iters: usize,
    pub c1: f64,
    pub c2: f64,
    /// Geometric-center attraction coefficient; only read for Sgpso.
    pub c3: f64,
    /// Center value broadcast across all dimensions (Sgpso only).
    pub geometric_center: f64,
    pub schedule: InertiaSchedule,
    /// Position bounds, identical for every dimension.
    pub lb: f64,
    pub ub: f64,
    /// Velocity clamp magnitude, > 0.
    pub v_max: f64,
    pub seed: u64,
    /// Initialize velocities from the second block of the low-discrepancy
    /// stream (scaled to [-v_max, v_max]); false starts them at zero.
    pub sobol_velocities: bool,
    /// Draw one r1/r2 (and r3) pair per particle per iteration instead of
    /// per dimension.
    pub scalar_draws: bool,
}

impl SwarmConfig {
    /// Tanh-increasing variant with its published settings: c1=1.6, c2=1.7,
    /// inertia 0.4 -> 0.9.
    pub fn ppso_defaults(seed: u64) -> Self {
        SwarmConfig {
            algorithm: PsoVariant::Ppso,
            pop: 50,
            iters: 500,
            c1: 1.6,
            c2: 1.7,
            c3: 0.0,
            geometric_center: 0.0,
            schedule: InertiaSchedule::TanhIncreasing {
                omega_min: 0.4,
                omega_max: 0.9,
            },
            lb: -10.0,
            ub: 10.0,
            v_max: 4.0,
            seed,
            sobol_velocities: true,
            scalar_draws: false,
        }
    }

    /// Linear-inertia baseline: c1=c2=1.5, inertia 0.9 -> 0.3, pseudo-random
    /// initialization is not modeled; the same Sobol init is used so the two
    /// variants differ only in schedule and coefficients.
    pub fn bpso_defaults(seed: u64) -> Self {
        SwarmConfig {
            algorithm: PsoVariant::Bpso,
            c1: 1.5,
            c2: 1.5,
            schedule: InertiaSchedule::LinearDecreasing {
                omega_min: 0.3,
                omega_max: 0.9,
            },
            ..SwarmConfig::ppso_defaults(seed)
        }
    }

    /// Geometric-center variant: baseline settings plus c3=0.5 pulling
    /// toward 100 in every dimension.
    pub fn sgpso_defaults(seed: u64) -> Self {
        SwarmConfig {
            algorithm: PsoVariant::Sgpso,
            c3: 0.5,
            geometric_center: 100.0,
            ..SwarmConfig::bpso_defaults(seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.pop == 0 {
            return Err(Error::InvalidConfig("population must be >= 1".into()));
        }
        if !(self.c1 >= 0.0 && self.c2 >= 0.0 && self.c3 >= 0.0) {
            return Err(Error::InvalidConfig(
                "acceleration coefficients must be non-negative".into(),
            ));
        }
        if !(self.v_max > 0.0) {
            return Err(Error::InvalidConfig("v_max must be positive".into()));
        }
        if !(self.lb < self.ub) {
            return Err(Error::InvalidBounds {
                index: 0,
                lb: self.lb,
                ub: self.ub,
            });
        }
        self.schedule.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
}

/// One row per iteration: (t, best fitness so far, inertia used at t).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub iteration: usize,
    pub best_mse: f64,
    pub omega: f64,
}

/// Best-so-far fitness per iteration; the fitness column is non-increasing
/// by construction in every optimizer of this crate.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvergenceTrace {
    pub records: Vec<TraceRecord>,
}

impl ConvergenceTrace {
    pub fn push(&mut self, iteration: usize, best_mse: f64, omega: f64) {
        self.records.push(TraceRecord {
            iteration,
            best_mse,
            omega,
        });
    }

    pub fn is_non_increasing(&self) -> bool {
        self.records
            .windows(2)
            .all(|w| w[1].best_mse <= w[0].best_mse)
    }

    /// CSV with header `iteration,best_mse,omega`. Floats are written in
    /// shortest round-trip form, so parsing the text reproduces the trace
    /// bit for bit.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("iteration,best_mse,omega\n");
        for r in &self.records {
            writeln!(out, "{},{},{}", r.iteration, r.best_mse, r.omega).unwrap();
        }
        out
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut records = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if i == 0 {
                if line != "iteration,best_mse,omega" {
                    return Err(Error::CsvFormat {
                        path: "<trace>".into(),
                        row: 1,
                        message: format!("unexpected trace header {line:?}"),
                    });
                }
                continue;
            }
            let mut cells = line.split(',');
            let mut next = |name: &str| {
                cells.next().ok_or_else(|| Error::CsvFormat {
                    path: "<trace>".into(),
                    row: i + 1,
                    message: format!("missing {name} column"),
                })
            };
            let iteration = next("iteration")?.parse().map_err(|_| Error::CsvFormat {
                path: "<trace>".into(),
                row: i + 1,
                message: "bad iteration".into(),
            })?;
            let best_mse = next("best_mse")?.parse().map_err(|_| Error::CsvFormat {
                path: "<trace>".into(),
                row: i + 1,
                message: "bad best_mse".into(),
            })?;
            let omega = next("omega")?.parse().map_err(|_| Error::CsvFormat {
                path: "<trace>".into(),
                row: i + 1,
                message: "bad omega".into(),
            })?;
            records.push(TraceRecord {
                iteration,
                best_mse,
                omega,
            });
        }
        Ok(ConvergenceTrace { records })
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// New velocity for one particle: inertia carry-over plus cognitive and
/// social attraction (plus the center term for Sgpso), clamped to
/// [-v_max, v_max] componentwise. `r3` is only read for Sgpso.
pub fn velocity_update(
    particle: &Particle,
    global_best: &[f64],
    omega: f64,
    cfg: &SwarmConfig,
    r1: &[f64],
    r2: &[f64],
    r3: Option<&[f64]>,
) -> Result<Vec<f64>> {
    let d = particle.position.len();
    for (len, what) in [
        (particle.velocity.len(), "velocity"),
        (particle.best_position.len(), "personal best"),
        (global_best.len(), "global best"),
        (r1.len(), "r1 draws"),
        (r2.len(), "r2 draws"),
    ] {
        if len != d {
            return Err(Error::DimensionMismatch {
                context: "velocity_update",
                expected: d,
                got: len,
            });
        }
        let _ = what;
    }
    let center_pull = match cfg.algorithm {
        PsoVariant::Sgpso => {
            let r3 = r3.ok_or(Error::InvalidConfig(
                "geometric-center update requires r3 draws".into(),
            ))?;
            if r3.len() != d {
                return Err(Error::DimensionMismatch {
                    context: "velocity_update",
                    expected: d,
                    got: r3.len(),
                });
            }
            Some(r3)
        }
        _ => None,
    };
    let mut out = Vec::with_capacity(d);
    for i in 0..d {
        let x = particle.position[i];
        let mut v = omega * particle.velocity[i]
            + cfg.c1 * r1[i] * (particle.best_position[i] - x)
            + cfg.c2 * r2[i] * (global_best[i] - x);
        if let Some(r3) = center_pull {
            v += cfg.c3 * r3[i] * (cfg.geometric_center - x);
        }
        out.push(v.clamp(-cfg.v_max, cfg.v_max));
    }
    Ok(out)
}

/// Move by the new velocity and clamp into the box.
pub fn position_update(x: &[f64], v: &[f64], lb: f64, ub: f64) -> Vec<f64> {
    x.iter()
        .zip(v)
        .map(|(xi, vi)| (xi + vi).clamp(lb, ub))
        .collect()
}

/// Low-discrepancy swarm initialization. One stream supplies both blocks:
/// columns [0, dim) become positions in [lb, ub), columns [dim, 2*dim)
/// become velocities in [-v_max, v_max) when `sobol_velocities` is set.
pub(crate) fn init_particles(cfg: &SwarmConfig, dim: usize) -> Result<Vec<Particle>> {
    let width = if cfg.sobol_velocities { 2 * dim } else { dim };
    let unit = sobol_points(width, cfg.pop, cfg.seed)?;
    let pos_unit: Vec<Vec<f64>> = unit.iter().map(|row| row[..dim].to_vec()).collect();
    let positions = scale_to_bounds(&pos_unit, &vec![cfg.lb; dim], &vec![cfg.ub; dim])?;
    let velocities: Vec<Vec<f64>> = if cfg.sobol_velocities {
        let vel_unit: Vec<Vec<f64>> = unit.iter().map(|row| row[dim..].to_vec()).collect();
        scale_to_bounds(&vel_unit, &vec![-cfg.v_max; dim], &vec![cfg.v_max; dim])?
    } else {
        vec![vec![0.0; dim]; cfg.pop]
    };
    Ok(positions
        .into_iter()
        .zip(velocities)
        .map(|(position, velocity)| Particle {
            best_position: position.clone(),
            position,
            velocity,
            best_fitness: f64::INFINITY,
        })
        .collect())
}

fn check_finite(fit: f64, particle: usize, iteration: usize) -> Result<f64> {
    if fit.is_finite() {
        Ok(fit)
    } else {
        Err(Error::NumericFailure(format!(
            "fitness {fit} for particle {particle} at iteration {iteration}"
        )))
    }
}

/// Run the configured swarm against an arbitrary fitness function over
/// [lb, ub]^dim. Returns the best position, its fitness, and the
/// per-iteration trace (length iters + 1, including the initial evaluation).
pub fn minimize<F>(cfg: &SwarmConfig, dim: usize, fitness: F) -> Result<(Vec<f64>, f64, ConvergenceTrace)>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    cfg.validate()?;
    if dim == 0 {
        return Err(Error::InvalidConfig("dimension must be >= 1".into()));
    }
    let mut particles = init_particles(cfg, dim)?;

    particles
        .par_iter_mut()
        .enumerate()
        .try_for_each(|(i, p)| -> Result<()> {
            p.best_fitness = check_finite(fitness(&p.position)?, i, 0)?;
            Ok(())
        })?;

    // Strict-minimum scan in index order: ties keep the earlier particle.
    let mut gbest_idx = 0;
    for (i, p) in particles.iter().enumerate() {
        if p.best_fitness < particles[gbest_idx].best_fitness {
            gbest_idx = i;
        }
    }
    let mut gbest_pos = particles[gbest_idx].position.clone();
    let mut gbest_fit = particles[gbest_idx].best_fitness;

    let mut trace = ConvergenceTrace::default();
    trace.push(0, gbest_fit, cfg.schedule.initial_value());

    // One independent stream per particle keeps parallel updates
    // deterministic regardless of scheduling. Stream 0 is left to the
    // initializer's digital shift, which derives from the same seed.
    let mut rngs: Vec<ChaCha8Rng> = (0..cfg.pop)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(i as u64 + 1);
            rng
        })
        .collect();

    let wants_r3 = cfg.algorithm == PsoVariant::Sgpso;
    for t in 1..=cfg.iters {
        let omega = inertia_at(cfg.schedule, t, cfg.iters)?;
        let gbest_snapshot = gbest_pos.clone();
        particles
            .par_iter_mut()
            .zip(rngs.par_iter_mut())
            .enumerate()
            .try_for_each(|(i, (p, rng))| -> Result<()> {
                let (r1, r2, r3) = draw_coefficients(rng, dim, cfg.scalar_draws, wants_r3);
                let v = velocity_update(p, &gbest_snapshot, omega, cfg, &r1, &r2, r3.as_deref())?;
                p.position = position_update(&p.position, &v, cfg.lb, cfg.ub);
                p.velocity = v;
                let fit = check_finite(fitness(&p.position)?, i, t)?;
                if fit < p.best_fitness {
                    p.best_fitness = fit;
                    p.best_position.copy_from_slice(&p.position);
                }
                Ok(())
            })?;
        for p in &particles {
            if p.best_fitness < gbest_fit {
                gbest_fit = p.best_fitness;
                gbest_pos.copy_from_slice(&p.best_position);
            }
        }
        trace.push(t, gbest_fit, omega);
    }
    Ok((gbest_pos, gbest_fit, trace))
}

/// Per-iteration random coefficients for one particle. Interleaved order
/// (r1_d, r2_d, r3_d per dimension) so adding the center term does not
/// shift the r1/r2 streams of other variants.
fn draw_coefficients(
    rng: &mut ChaCha8Rng,
    dim: usize,
    scalar: bool,
    wants_r3: bool,
) -> (Vec<f64>, Vec<f64>, Option<Vec<f64>>) {
    if scalar {
        let a = rng.gen::<f64>();
        let b = rng.gen::<f64>();
        let c = wants_r3.then(|| rng.gen::<f64>());
        return (vec![a; dim], vec![b; dim], c.map(|v| vec![v; dim]));
    }
    let mut r1 = vec![0.0; dim];
    let mut r2 = vec![0.0; dim];
    let mut r3 = wants_r3.then(|| vec![0.0; dim]);
    for d in 0..dim {
        r1[d] = rng.gen();
        r2[d] = rng.gen();
        if let Some(r3) = r3.as_mut() {
            r3[d] = rng.gen();
        }
    }
    (r1, r2, r3)
}

/// Train a classifier: minimize the network's mean squared error on the
/// training samples and return the best parameter vector found.
pub fn run_pso(
    cfg: &SwarmConfig,
    topology: Topology,
    train: &[LabeledSample],
) -> Result<(Vec<f64>, f64, ConvergenceTrace)> {
    if train.is_empty() {
        return Err(Error::EmptyInput("training samples"));
    }
    minimize(cfg, topology.param_count(), |params| {
        mse_fitness(params, topology, train)
    })
}
