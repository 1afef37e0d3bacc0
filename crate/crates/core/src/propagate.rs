//! Schrödinger propagation and trajectory construction.
//!
//! Numeric trajectories use the exponential midpoint rule: each step applies
//! `exp(−i·H(t_mid)·δt)`, computed exactly through the 3×3 eigendecomposition.
//! The rule is second order and unitary to rounding.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{StateVector3, NORM_TOL};
use crate::rescale::RescaleParams;
use crate::stirap::{dark_state_at, Drive, StirapParams};
use crate::transform::TimeDependentHamiltonian;

/// Uniform steps used for a reference protocol over its full duration.
pub const DEFAULT_REFERENCE_STEPS: usize = 8000;

/// Max amplitude change tolerated when the step count is doubled.
pub const CONVERGENCE_TOL: f64 = 1e-8;

/// Step count for a rescaled run over `t_f/a`, keeping the fastest
/// oscillation of the bracket factor resolved:
/// `steps·max(1, ⌈ḟ_max⌉)/a`.
pub fn rescaled_steps(reference_steps: usize, r: &RescaleParams) -> usize {
    let factor = r.f_dot_max().ceil().max(1.0);
    ((reference_steps as f64 * factor / r.a()).ceil() as usize).max(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Numeric,
    Adiabatic,
    Reparametrized,
}

/// States and level populations on an increasing time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<StateVector3>,
    populations: Vec<[f64; 3]>,
    method: Method,
}

impl Trajectory {
    fn new(times: Vec<f64>, states: Vec<StateVector3>, method: Method) -> Self {
        let populations = states.iter().map(StateVector3::populations).collect();
        Self {
            times,
            states,
            populations,
            method,
        }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[StateVector3] {
        &self.states
    }

    pub fn populations(&self) -> &[[f64; 3]] {
        &self.populations
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn start_time(&self) -> f64 {
        self.times[0]
    }

    pub fn end_time(&self) -> f64 {
        *self.times.last().expect("non-empty trajectory")
    }

    pub fn final_state(&self) -> &StateVector3 {
        self.states.last().expect("non-empty trajectory")
    }

    pub fn final_populations(&self) -> [f64; 3] {
        *self.populations.last().expect("non-empty trajectory")
    }

    /// Largest `|‖ψ‖² − 1|` along the trajectory.
    pub fn max_norm_drift(&self) -> f64 {
        self.states
            .iter()
            .map(|s| (s.norm_sq() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// State at an arbitrary time inside the span: four-point Lagrange
    /// interpolation of real and imaginary parts, then renormalised.
    pub fn sample(&self, t: f64) -> Result<StateVector3> {
        let (lo, hi) = (self.start_time(), self.end_time());
        let slack = 1e-12 * (hi - lo).abs().max(1.0);
        if !(t >= lo - slack && t <= hi + slack) {
            return Err(Error::Domain { t, lo, hi });
        }
        let n = self.times.len();
        if n == 1 {
            return Ok(self.states[0]);
        }
        let t = t.clamp(lo, hi);
        // index of the interval containing t
        let i = match self.times.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => return Ok(self.states[i]),
            Err(i) => i - 1,
        };
        let width = 4.min(n);
        let start = i.saturating_sub(1).min(n - width);
        let nodes = start..start + width;

        let mut v = nalgebra::Vector3::zeros();
        for j in nodes.clone() {
            let mut w = 1.0;
            for k in nodes.clone() {
                if k != j {
                    w *= (t - self.times[k]) / (self.times[j] - self.times[k]);
                }
            }
            v += self.states[j].amplitudes() * num_complex::Complex64::new(w, 0.0);
        }
        StateVector3::normalized(v)
    }
}

fn check_grid(grid: &[f64], duration: f64) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Grid("empty grid".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Grid("times must be strictly increasing".into()));
    }
    let slack = 1e-12 * duration.max(1.0);
    let (first, last) = (grid[0], grid[grid.len() - 1]);
    if first < -slack || last > duration + slack || !first.is_finite() || !last.is_finite() {
        return Err(Error::Domain {
            t: if first < -slack { first } else { last },
            lo: 0.0,
            hi: duration,
        });
    }
    Ok(())
}

/// Integrates `i∂ψ/∂t = H(t)ψ` from `grid[0]`, recording the state at every
/// grid point. Each grid interval is split into `steps_per_interval` equal
/// midpoint-exponential steps.
pub fn evolve<H: TimeDependentHamiltonian + ?Sized>(
    hamiltonian: &H,
    psi0: &StateVector3,
    grid: &[f64],
    steps_per_interval: usize,
) -> Result<Trajectory> {
    let norm_sq = psi0.norm_sq();
    if (norm_sq - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized { norm_sq });
    }
    if steps_per_interval == 0 {
        return Err(Error::Grid("steps_per_interval must be ≥ 1".into()));
    }
    check_grid(grid, hamiltonian.duration())?;

    let mut psi = *psi0;
    let mut states = Vec::with_capacity(grid.len());
    states.push(psi);
    for w in grid.windows(2) {
        let dt = (w[1] - w[0]) / steps_per_interval as f64;
        for k in 0..steps_per_interval {
            let mid = w[0] + (k as f64 + 0.5) * dt;
            let u = hamiltonian.at(mid)?.propagator(dt);
            psi = psi.evolve(&u);
        }
        states.push(psi);
    }
    Ok(Trajectory::new(grid.to_vec(), states, Method::Numeric))
}

/// Uniform run over the Hamiltonian's whole duration with `steps` steps,
/// recording every `record_every`-th step.
pub fn evolve_uniform<H: TimeDependentHamiltonian + ?Sized>(
    hamiltonian: &H,
    psi0: &StateVector3,
    steps: usize,
    record_every: usize,
) -> Result<Trajectory> {
    if steps == 0 || record_every == 0 || !steps.is_multiple_of(record_every) {
        return Err(Error::Grid(format!(
            "steps ({steps}) must be a positive multiple of record_every ({record_every})"
        )));
    }
    let intervals = steps / record_every;
    let grid = crate::stirap::uniform_grid(hamiltonian.duration(), intervals);
    evolve(hamiltonian, psi0, &grid, record_every)
}

/// Result of rerunning a propagation with twice the steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceReport {
    /// Max amplitude difference between the two final states.
    pub max_change: f64,
    /// Same, maximised over every recorded grid point.
    pub max_path_change: f64,
    pub converged: bool,
}

/// [`evolve`] plus a step-doubling check. The finer trajectory is returned.
pub fn evolve_checked<H: TimeDependentHamiltonian + ?Sized>(
    hamiltonian: &H,
    psi0: &StateVector3,
    grid: &[f64],
    steps_per_interval: usize,
) -> Result<(Trajectory, ConvergenceReport)> {
    let coarse = evolve(hamiltonian, psi0, grid, steps_per_interval)?;
    let fine = evolve(hamiltonian, psi0, grid, 2 * steps_per_interval)?;
    let max_path_change = coarse
        .states
        .iter()
        .zip(fine.states.iter())
        .map(|(a, b)| a.distance(b))
        .fold(0.0, f64::max);
    let max_change = coarse.final_state().distance(fine.final_state());
    Ok((
        fine,
        ConvergenceReport {
            max_change,
            max_path_change,
            converged: max_change < CONVERGENCE_TOL,
        },
    ))
}

/// Dark-state route `cos θ(t)|1⟩ − sin θ(t)|3⟩`. No dynamical phase since the
/// dark energy is zero.
pub fn adiabatic_trajectory(p: &StirapParams, grid: &[f64]) -> Result<Trajectory> {
    check_grid(grid, p.t_f)?;
    let n = grid.len();
    let mut states = Vec::with_capacity(n);
    for (i, &t) in grid.iter().enumerate() {
        if i > 0 && i + 1 < n && p.rabi(t) == 0.0 {
            return Err(Error::Degenerate { t });
        }
        states.push(dark_state_at(p.theta(t)));
    }
    Ok(Trajectory::new(grid.to_vec(), states, Method::Adiabatic))
}

/// Rescaled dark-state route `cos θ[f(t)]|1⟩ − sin θ[f(t)]|3⟩` on a grid
/// over `[0, t_f/a]`, in closed form.
pub fn reparametrized_adiabatic(
    p: &StirapParams,
    r: &RescaleParams,
    grid: &[f64],
) -> Result<Trajectory> {
    check_grid(grid, r.duration())?;
    let states = grid
        .iter()
        .map(|&t| Ok(dark_state_at(p.theta(r.f(t)?))))
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory::new(
        grid.to_vec(),
        states,
        Method::Reparametrized,
    ))
}

/// `ψ̃(t) = ψ(f(t))`, placing each reference sample at `t = f⁻¹(s)`.
/// Exact: no interpolation is involved.
pub fn reparametrized_trajectory(reference: &Trajectory, r: &RescaleParams) -> Result<Trajectory> {
    let times = reference
        .times
        .iter()
        .map(|&s| r.inverse(s))
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory::new(
        times,
        reference.states.clone(),
        Method::Reparametrized,
    ))
}

/// `ψ̃(t) = ψ(f(t))` on a caller-chosen grid over `[0, t_f/a]`, interpolating
/// the reference at `f(t)`.
pub fn reparametrized_on_grid(
    reference: &Trajectory,
    r: &RescaleParams,
    grid: &[f64],
) -> Result<Trajectory> {
    check_grid(grid, r.duration())?;
    let states = grid
        .iter()
        .map(|&t| reference.sample(r.f(t)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory::new(
        grid.to_vec(),
        states,
        Method::Reparametrized,
    ))
}

/// `|⟨target|ψ⟩|²`, clamped to `[0, 1]`.
pub fn fidelity(psi: &StateVector3, target: &StateVector3) -> f64 {
    target.inner(psi).norm_sqr().clamp(0.0, 1.0)
}
