//! Invariant checks run by `tr-stirap verify`.

use serde::Serialize;

use crate::error::Result;
use crate::linalg::StateVector3;
use crate::propagate::{evolve, rescaled_steps};
use crate::rescale::RescaleParams;
use crate::stirap::{uniform_grid, Drive, StirapParams};
use crate::transform::{commutator_check, tr_hamiltonian};

pub const COMMUTATOR_REL_TOL: f64 = 1e-12;
/// Max amplitude deviation between the two routes on the compared grid.
pub const ROUTE_TOL: f64 = 1e-4;
pub const EIGEN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckOutcome {
    fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            passed: value <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Runs the invariant suite for one pulse set and rescaling.
///
/// `intervals` is the number of reference grid intervals compared between
/// the two routes; the reference run uses `reference_steps` in total.
pub fn verify(
    p: &StirapParams,
    r: &RescaleParams,
    reference_steps: usize,
    intervals: usize,
) -> Result<VerifyReport> {
    let mut checks = Vec::new();

    let props = r.validate_properties(4001)?;
    for (name, c) in props.checks() {
        checks.push(CheckOutcome {
            name: format!("rescale.{name}"),
            value: c.residual,
            tolerance: crate::rescale::PROPERTY_TOL,
            passed: c.passed,
        });
    }

    let gammas: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
    let comm = commutator_check(p, *r, &gammas)?;
    checks.push(CheckOutcome {
        name: "commutator".into(),
        value: comm.max_norm / (comm.max_h_norm * comm.max_h_norm),
        tolerance: COMMUTATOR_REL_TOL,
        passed: comm.within(COMMUTATOR_REL_TOL),
    });

    // Same route, two clocks: the rescaled run sampled at f⁻¹(s) must match
    // the reference run at s.
    let intervals = intervals.max(1);
    let per = reference_steps.div_ceil(intervals).max(1);
    let slow_grid = uniform_grid(p.t_f, intervals);
    let fast_grid = slow_grid
        .iter()
        .map(|&s| r.inverse(s))
        .collect::<Result<Vec<_>>>()?;
    let psi0 = StateVector3::basis(1);
    let slow = evolve(p, &psi0, &slow_grid, per)?;
    let fast_per = rescaled_steps(per * intervals, r).div_ceil(intervals);
    let fast = evolve(&tr_hamiltonian(p, *r)?, &psi0, &fast_grid, fast_per)?;
    let route = slow
        .states()
        .iter()
        .zip(fast.states())
        .map(|(a, b)| a.distance(b))
        .fold(0.0, f64::max);
    checks.push(CheckOutcome::at_most("route_equivalence", route, ROUTE_TOL));
    checks.push(CheckOutcome::at_most(
        "unitarity",
        slow.max_norm_drift().max(fast.max_norm_drift()),
        crate::linalg::NORM_TOL,
    ));

    if p.delta_2 == 0.0 {
        let mut eig = 0.0f64;
        for &t in &uniform_grid(p.t_f, 50)[1..50] {
            let es = p.eigensystem(t)?;
            let h = p.hamiltonian(t);
            for (e, v) in es.energies.iter().zip(es.states.iter()) {
                let hv = h.apply(v);
                let resid = (hv - v.amplitudes().scale(*e)).camax();
                eig = eig.max(resid / h.max_norm().max(1.0));
            }
        }
        checks.push(CheckOutcome::at_most("eigen_residual", eig, EIGEN_TOL));
    }

    Ok(VerifyReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_parameters_pass() {
        let p = StirapParams::default();
        let r = RescaleParams::new(10.0, p.t_f).unwrap();
        let report = verify(&p, &r, 2000, 50).unwrap();
        for c in &report.checks {
            assert!(c.passed, "{c:?}");
        }
        assert!(report.checks.iter().any(|c| c.name == "route_equivalence"));
    }

    #[test]
    fn detuned_parameters_skip_nothing_essential() {
        let p = StirapParams::default()
            .with_two_photon_detuning(0.5)
            .unwrap();
        let r = RescaleParams::new(3.0, p.t_f).unwrap();
        let report = verify(&p, &r, 2000, 20).unwrap();
        assert!(report.all_passed(), "{report:?}");
        assert!(!report.checks.iter().any(|c| c.name == "eigen_residual"));
    }
}
