//! Stability analysis of the reduced single-particle swarm dynamics.
//!
//! With the random attraction coefficients frozen at a value psi and the
//! personal/global bests merged into one attraction point p, one particle's
//! update collapses to a linear recurrence in (velocity, displacement from
//! p), governed by the 2x2 matrix [[omega, -psi], [omega, 1-psi]].
//!
//! Two stability verdicts are computed side by side and never reconciled:
//! the closed-form condition 0 < omega < psi - 1 (obtained by requiring
//! negative real parts of the eigenvalues, a continuous-time argument), and
//! the discrete-time criterion max |eigenvalue| < 1. The region sweep marks
//! every cell where the two disagree.

use num_complex::Complex64;
use std::fmt::Write as _;

/// Attraction coefficient summarizing stochastic c1, c2 draws by their
/// expectation: psi = (c1 + c2) / 2, since each uniform factor averages 1/2.
pub fn reduced_attraction(c1: f64, c2: f64) -> f64 {
    (c1 + c2) / 2.0
}

/// Coefficient matrix of the reduced recurrence:
/// v' = omega*v - psi*y, y' = omega*v + (1-psi)*y.
pub fn coefficient_matrix(omega: f64, psi: f64) -> [[f64; 2]; 2] {
    [[omega, -psi], [omega, 1.0 - psi]]
}

/// Eigenvalues of a 2x2 matrix via the characteristic quadratic
/// lambda^2 - trace*lambda + det = 0, taking the complex branch when the
/// discriminant is negative.
pub fn eigenvalues(g: [[f64; 2]; 2]) -> (Complex64, Complex64) {
    let trace = g[0][0] + g[1][1];
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    let disc = trace * trace - 4.0 * det;
    if disc >= 0.0 {
        let root = disc.sqrt();
        (
            Complex64::new((trace + root) / 2.0, 0.0),
            Complex64::new((trace - root) / 2.0, 0.0),
        )
    } else {
        let imag = (-disc).sqrt() / 2.0;
        (
            Complex64::new(trace / 2.0, imag),
            Complex64::new(trace / 2.0, -imag),
        )
    }
}

/// Closed-form verdict: stable iff 0 < omega and omega < psi - 1. The
/// condition asks for negative real parts of the eigenvalues, which is a
/// continuous-time notion applied to a discrete recurrence; see
/// [`spectral_radius_stable`] for the discrete criterion.
pub fn continuous_time_stable(omega: f64, psi: f64) -> bool {
    0.0 < omega && omega < psi - 1.0
}

/// Discrete-time verdict: largest eigenvalue magnitude, stable iff
/// strictly below 1.
pub fn spectral_radius_stable(omega: f64, psi: f64) -> (f64, bool) {
    let (l1, l2) = eigenvalues(coefficient_matrix(omega, psi));
    let radius = l1.norm().max(l2.norm());
    (radius, radius < 1.0)
}

/// Everything the two criteria derive from one (omega, psi) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    pub omega: f64,
    pub psi: f64,
    pub matrix: [[f64; 2]; 2],
    pub trace: f64,
    pub determinant: f64,
    pub eigenvalues: (Complex64, Complex64),
    pub continuous_stable: bool,
    pub spectral_radius: f64,
    pub spectral_stable: bool,
}

pub fn analyze(omega: f64, psi: f64) -> StabilityReport {
    let matrix = coefficient_matrix(omega, psi);
    let eig = eigenvalues(matrix);
    let (spectral_radius, spectral_stable) = spectral_radius_stable(omega, psi);
    StabilityReport {
        omega,
        psi,
        matrix,
        trace: matrix[0][0] + matrix[1][1],
        determinant: matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0],
        eigenvalues: eig,
        continuous_stable: continuous_time_stable(omega, psi),
        spectral_radius,
        spectral_stable,
    }
}

/// One step of the reduced system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryState {
    pub v: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// States at t = 0.., starting with the initial state; length steps + 1
    /// unless truncated by divergence.
    pub states: Vec<TrajectoryState>,
    pub diverged: bool,
}

const DIVERGENCE_LIMIT: f64 = 1e12;

/// Iterate the reduced recurrence for `steps` updates. Divergence (any
/// component beyond 1e12 in magnitude) truncates the sequence after the
/// offending state and sets the flag; it is an outcome, not an error.
pub fn simulate_trajectory(omega: f64, psi: f64, v0: f64, y0: f64, steps: usize) -> Trajectory {
    let mut states = Vec::with_capacity(steps + 1);
    let mut state = TrajectoryState { v: v0, y: y0 };
    states.push(state);
    let mut diverged = false;
    for _ in 0..steps {
        state = TrajectoryState {
            v: omega * state.v - psi * state.y,
            y: omega * state.v + (1.0 - psi) * state.y,
        };
        states.push(state);
        if state.v.abs() > DIVERGENCE_LIMIT || state.y.abs() > DIVERGENCE_LIMIT {
            diverged = true;
            break;
        }
    }
    Trajectory { states, diverged }
}

/// The un-reduced single-particle system with an explicit attraction point:
/// v' = omega*v + psi*(p - x), x' = x + v'. Subtracting p from its x
/// component reproduces [`simulate_trajectory`] exactly.
pub fn simulate_attraction(
    omega: f64,
    psi: f64,
    p: f64,
    v0: f64,
    x0: f64,
    steps: usize,
) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(steps + 1);
    let (mut v, mut x) = (v0, x0);
    out.push((v, x));
    for _ in 0..steps {
        v = omega * v + psi * (p - x);
        x += v;
        out.push((v, x));
    }
    out
}

/// CSV rows `t,v,y` for phase-portrait plotting.
pub fn trajectory_csv(trajectory: &Trajectory) -> String {
    let mut out = String::from("t,v,y\n");
    for (t, s) in trajectory.states.iter().enumerate() {
        // + 0.0 folds negative zero into plain zero for the output.
        writeln!(out, "{},{},{}", t, s.v + 0.0, s.y + 0.0).unwrap();
    }
    out
}

/// Verdict sweep over an (omega, psi) grid, one CSV row per cell:
/// both criteria, the spectral radius, and a disagreement marker.
pub fn region_csv(
    omega_range: (f64, f64),
    psi_range: (f64, f64),
    omega_steps: usize,
    psi_steps: usize,
) -> String {
    let mut out = String::from("omega,psi,continuous_stable,spectral_radius,spectral_stable,disagree\n");
    for i in 0..=omega_steps {
        let omega = omega_range.0
            + (omega_range.1 - omega_range.0) * i as f64 / omega_steps.max(1) as f64;
        for j in 0..=psi_steps {
            let psi =
                psi_range.0 + (psi_range.1 - psi_range.0) * j as f64 / psi_steps.max(1) as f64;
            let r = analyze(omega, psi);
            writeln!(
                out,
                "{},{},{},{},{},{}",
                omega,
                psi,
                u8::from(r.continuous_stable),
                r.spectral_radius,
                u8::from(r.spectral_stable),
                u8::from(r.continuous_stable != r.spectral_stable)
            )
            .unwrap();
        }
    }
    out
}
