//! Gravitational search and its PSO hybrid.
//!
//! Agents attract each other with forces proportional to fitness-derived
//! masses under a constant G(t) that decays exponentially over the run. Only
//! a shrinking elite of the fittest agents exerts force. The hybrid replaces
//! the plain velocity rule with an inertia-weighted blend of the
//! gravitational acceleration and attraction toward the best position found
//! so far.
//!
//! Both optimizers draw every random factor from one run-level stream in a
//! fixed order (all acceleration factors, then the velocity factors, agent
//! by agent, dimension by dimension), so runs are reproducible bit for bit
//! even though fitness evaluation is parallel.

use crate::error::{Error, Result};
use crate::lowdisc::{scale_to_bounds, sobol_points};
use crate::network::{mse_fitness, LabeledSample, Topology};
use crate::swarm::{inertia_at, ConvergenceTrace, InertiaSchedule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Distance regularizer in the force denominator.
const DIST_EPS: f64 = 1e-12;
/// RNG stream for the run-level draw sequence; stream 0 is left to the
/// initializer's digital shift.
const RUN_STREAM: u64 = 0x6772_6176;

#[derive(Debug, Clone, PartialEq)]
pub struct GsaConfig {
    pub pop: usize,
    pub iters: usize,
    pub seed: u64,
    pub lb: f64,
    pub ub: f64,
    /// Initial gravitational constant G(0).
    pub g0: f64,
    /// Decay rate in G(t) = G0 * exp(-alpha * t / iters).
    pub alpha: f64,
    /// Final fraction of agents exerting force; the fraction decreases
    /// linearly from 1.0 to this floor over the run.
    pub kbest_floor: f64,
}

impl GsaConfig {
    pub fn defaults(seed: u64) -> Self {
        GsaConfig {
            pop: 50,
            iters: 500,
            seed,
            lb: -10.0,
            ub: 10.0,
            g0: 1.0,
            alpha: 20.0,
            kbest_floor: 0.025,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.pop == 0 {
            return Err(Error::InvalidConfig("population must be >= 1".into()));
        }
        if !(self.g0 > 0.0) {
            return Err(Error::InvalidConfig("G0 must be positive".into()));
        }
        if !(self.alpha >= 0.0) {
            return Err(Error::InvalidConfig("alpha must be non-negative".into()));
        }
        if !(self.kbest_floor > 0.0 && self.kbest_floor <= 1.0) {
            return Err(Error::InvalidConfig(
                "kbest floor must lie in (0, 1]".into(),
            ));
        }
        if !(self.lb < self.ub) {
            return Err(Error::InvalidBounds {
                index: 0,
                lb: self.lb,
                ub: self.ub,
            });
        }
        Ok(())
    }
}

/// Hybrid settings: the gravitational machinery plus PSO-style coefficients
/// and a linearly decreasing inertia weight (0.9 -> 0.5 by default).
#[derive(Debug, Clone, PartialEq)]
pub struct PsoGsaConfig {
    pub gsa: GsaConfig,
    pub c1: f64,
    pub c2: f64,
    pub schedule: InertiaSchedule,
}

impl PsoGsaConfig {
    pub fn defaults(seed: u64) -> Self {
        PsoGsaConfig {
            gsa: GsaConfig::defaults(seed),
            c1: 1.0,
            c2: 1.0,
            schedule: InertiaSchedule::LinearDecreasing {
                omega_min: 0.5,
                omega_max: 0.9,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.gsa.validate()?;
        if !(self.c1 >= 0.0 && self.c2 >= 0.0) {
            return Err(Error::InvalidConfig(
                "acceleration coefficients must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// G(t) = G0 * exp(-alpha * t / i_max); G(0) = G0 for any decay rate.
pub fn gravitational_constant(g0: f64, alpha: f64, t: usize, i_max: usize) -> f64 {
    if t == 0 {
        return g0;
    }
    g0 * (-alpha * t as f64 / i_max as f64).exp()
}

/// Fitness-derived masses, normalized to sum 1. Minimization: the lowest
/// fitness gets the largest mass, the worst gets 0. A degenerate population
/// (best == worst) gets uniform masses.
pub fn normalized_masses(fitness: &[f64]) -> Vec<f64> {
    let n = fitness.len();
    let best = fitness.iter().cloned().fold(f64::INFINITY, f64::min);
    let worst = fitness.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if best == worst {
        return vec![1.0 / n as f64; n];
    }
    let raw: Vec<f64> = fitness.iter().map(|&f| (f - worst) / (best - worst)).collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|m| m / sum).collect()
}

/// Number of force-exerting agents at iteration t: the fraction shrinks
/// linearly from 1.0 at t=0 to the floor at t=i_max, never below one agent.
pub fn kbest_count(pop: usize, floor: f64, t: usize, i_max: usize) -> usize {
    let frac = if i_max == 0 {
        1.0
    } else {
        1.0 - (1.0 - floor) * t as f64 / i_max as f64
    };
    ((pop as f64 * frac).round() as usize).clamp(1, pop)
}

/// Agent indices sorted best-first by (fitness, index); ties preserve the
/// original ordering.
fn ranked_indices(fitness: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..fitness.len()).collect();
    idx.sort_by(|&a, &b| {
        fitness[a]
            .partial_cmp(&fitness[b])
            .expect("fitness values checked finite")
            .then(a.cmp(&b))
    });
    idx
}

/// Accelerations from randomly weighted pairwise attractions toward the
/// elite. The acting agent's own mass cancels out of acceleration = force /
/// mass analytically, which also keeps zero-mass agents well-defined. Draw
/// order: agents in index order, elite members in rank order, dimensions in
/// order.
pub fn accelerations(
    positions: &[Vec<f64>],
    masses: &[f64],
    elite: &[usize],
    g: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<f64>> {
    let dim = positions.first().map_or(0, Vec::len);
    let mut acc = vec![vec![0.0; dim]; positions.len()];
    for (i, acc_i) in acc.iter_mut().enumerate() {
        for &j in elite {
            if j == i {
                continue;
            }
            let dist = positions[i]
                .iter()
                .zip(&positions[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let scale = g * masses[j] / (dist + DIST_EPS);
            for d in 0..dim {
                let r: f64 = rng.gen();
                acc_i[d] += r * scale * (positions[j][d] - positions[i][d]);
            }
        }
    }
    acc
}

struct Agents {
    positions: Vec<Vec<f64>>,
    velocities: Vec<Vec<f64>>,
    fitness: Vec<f64>,
    best_pos: Vec<f64>,
    best_fit: f64,
}

fn evaluate_all<F>(positions: &[Vec<f64>], fitness: &F, t: usize) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    positions
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let fit = fitness(x)?;
            if fit.is_finite() {
                Ok(fit)
            } else {
                Err(Error::NumericFailure(format!(
                    "fitness {fit} for agent {i} at iteration {t}"
                )))
            }
        })
        .collect()
}

/// Sobol positions, zero velocities, initial evaluation, initial best.
fn init_agents<F>(cfg: &GsaConfig, dim: usize, fitness: &F) -> Result<Agents>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let unit = sobol_points(dim, cfg.pop, cfg.seed)?;
    let positions = scale_to_bounds(&unit, &vec![cfg.lb; dim], &vec![cfg.ub; dim])?;
    let fit = evaluate_all(&positions, fitness, 0)?;
    let mut best = 0;
    for (i, f) in fit.iter().enumerate() {
        if *f < fit[best] {
            best = i;
        }
    }
    Ok(Agents {
        best_pos: positions[best].clone(),
        best_fit: fit[best],
        velocities: vec![vec![0.0; dim]; cfg.pop],
        positions,
        fitness: fit,
    })
}

fn track_best(agents: &mut Agents) {
    for (i, f) in agents.fitness.iter().enumerate() {
        if *f < agents.best_fit {
            agents.best_fit = *f;
            agents.best_pos.copy_from_slice(&agents.positions[i]);
        }
    }
}

fn run_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(RUN_STREAM);
    rng
}

/// Gravitational search over [lb, ub]^dim. The trace's omega column is
/// fixed at 1.0: the algorithm has no inertia schedule and the previous
/// velocity enters the update with a fresh random weight instead.
pub fn minimize_gsa<F>(
    cfg: &GsaConfig,
    dim: usize,
    fitness: F,
) -> Result<(Vec<f64>, f64, ConvergenceTrace)>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    cfg.validate()?;
    if dim == 0 {
        return Err(Error::InvalidConfig("dimension must be >= 1".into()));
    }
    let mut agents = init_agents(cfg, dim, &fitness)?;
    let mut trace = ConvergenceTrace::default();
    trace.push(0, agents.best_fit, 1.0);
    let mut rng = run_rng(cfg.seed);

    for t in 1..=cfg.iters {
        let g = gravitational_constant(cfg.g0, cfg.alpha, t, cfg.iters);
        let masses = normalized_masses(&agents.fitness);
        let k = kbest_count(cfg.pop, cfg.kbest_floor, t, cfg.iters);
        let ranked = ranked_indices(&agents.fitness);
        let acc = accelerations(&agents.positions, &masses, &ranked[..k], g, &mut rng);
        for i in 0..cfg.pop {
            for d in 0..dim {
                let r: f64 = rng.gen();
                agents.velocities[i][d] = r * agents.velocities[i][d] + acc[i][d];
                agents.positions[i][d] =
                    (agents.positions[i][d] + agents.velocities[i][d]).clamp(cfg.lb, cfg.ub);
            }
        }
        agents.fitness = evaluate_all(&agents.positions, &fitness, t)?;
        track_best(&mut agents);
        trace.push(t, agents.best_fit, 1.0);
    }
    Ok((agents.best_pos, agents.best_fit, trace))
}

/// Hybrid: v' = omega(t)*v + c1*r1*acceleration + c2*r2*(best - x), position
/// clamped into the box. The social target is the best position from the
/// end of the previous iteration.
pub fn minimize_psogsa<F>(
    cfg: &PsoGsaConfig,
    dim: usize,
    fitness: F,
) -> Result<(Vec<f64>, f64, ConvergenceTrace)>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    cfg.validate()?;
    if dim == 0 {
        return Err(Error::InvalidConfig("dimension must be >= 1".into()));
    }
    let gsa = &cfg.gsa;
    let mut agents = init_agents(gsa, dim, &fitness)?;
    let mut trace = ConvergenceTrace::default();
    trace.push(0, agents.best_fit, cfg.schedule.initial_value());
    let mut rng = run_rng(gsa.seed);

    for t in 1..=gsa.iters {
        let omega = inertia_at(cfg.schedule, t, gsa.iters)?;
        let g = gravitational_constant(gsa.g0, gsa.alpha, t, gsa.iters);
        let masses = normalized_masses(&agents.fitness);
        let k = kbest_count(gsa.pop, gsa.kbest_floor, t, gsa.iters);
        let ranked = ranked_indices(&agents.fitness);
        let acc = accelerations(&agents.positions, &masses, &ranked[..k], g, &mut rng);
        let social = agents.best_pos.clone();
        for i in 0..gsa.pop {
            for d in 0..dim {
                let r1: f64 = rng.gen();
                let r2: f64 = rng.gen();
                agents.velocities[i][d] = omega * agents.velocities[i][d]
                    + cfg.c1 * r1 * acc[i][d]
                    + cfg.c2 * r2 * (social[d] - agents.positions[i][d]);
                agents.positions[i][d] =
                    (agents.positions[i][d] + agents.velocities[i][d]).clamp(gsa.lb, gsa.ub);
            }
        }
        agents.fitness = evaluate_all(&agents.positions, &fitness, t)?;
        track_best(&mut agents);
        trace.push(t, agents.best_fit, omega);
    }
    Ok((agents.best_pos, agents.best_fit, trace))
}

/// Train a classifier by gravitational search on the network's mean squared
/// error.
pub fn run_gsa(
    cfg: &GsaConfig,
    topology: Topology,
    train: &[LabeledSample],
) -> Result<(Vec<f64>, f64, ConvergenceTrace)> {
    if train.is_empty() {
        return Err(Error::EmptyInput("training samples"));
    }
    minimize_gsa(cfg, topology.param_count(), |params| {
        mse_fitness(params, topology, train)
    })
}

/// Train a classifier with the hybrid optimizer.
pub fn run_psogsa(
    cfg: &PsoGsaConfig,
    topology: Topology,
    train: &[LabeledSample],
) -> Result<(Vec<f64>, f64, ConvergenceTrace)> {
    if train.is_empty() {
        return Err(Error::EmptyInput("training samples"));
    }
    minimize_psogsa(cfg, topology.param_count(), |params| {
        mse_fitness(params, topology, train)
    })
}
