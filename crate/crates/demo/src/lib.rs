//! wasm-bindgen exports backing the static page in `www/`.
//!
//! Each export returns a flat `Float64Array` of fixed-width rows. The
//! `*_rows` functions hold the logic and are what the native tests call.

use std::f64::consts::PI;

use tr_stirap::experiments::{run_scan, ErrorKind, ProtocolKind, ScanSpec};
use tr_stirap::output::pulse_table;
use tr_stirap::propagate::{evolve, rescaled_steps};
use tr_stirap::stirap::uniform_grid;
use tr_stirap::{tr_hamiltonian, RescaleParams, StateVector3, StirapParams};
use wasm_bindgen::prelude::*;

const ROWS: usize = 400;

fn base(omega0_mhz: f64) -> Result<StirapParams, String> {
    let d = StirapParams::default();
    StirapParams::new(2.0 * PI * omega0_mhz, d.t_f, d.t0, d.sigma, 0.0).map_err(|e| e.to_string())
}

/// Rows `[t, P1, P2, P3]` of the rescaled protocol; `a = 1` is the reference.
pub fn population_rows(omega0_mhz: f64, a: f64, steps: usize) -> Result<Vec<f64>, String> {
    let p = base(omega0_mhz)?;
    let r = RescaleParams::new(a, p.t_f).map_err(|e| e.to_string())?;
    let h = tr_hamiltonian(p, r).map_err(|e| e.to_string())?;
    let per = rescaled_steps(steps.max(ROWS), &r).div_ceil(ROWS);
    let grid = uniform_grid(r.duration(), ROWS);
    let traj = evolve(&h, &StateVector3::basis(1), &grid, per).map_err(|e| e.to_string())?;
    Ok(traj
        .times()
        .iter()
        .zip(traj.populations())
        .flat_map(|(t, q)| [*t, q[0], q[1], q[2]])
        .collect())
}

/// Rows `[t, Ω̃p, Ω̃s, ḟ]` with frequencies in MHz.
pub fn pulse_rows(omega0_mhz: f64, a: f64) -> Result<Vec<f64>, String> {
    let p = base(omega0_mhz)?;
    let r = RescaleParams::new(a, p.t_f).map_err(|e| e.to_string())?;
    let rows = pulse_table(&p, &r, ROWS).map_err(|e| e.to_string())?;
    Ok(rows
        .iter()
        .flat_map(|s| {
            [
                s.t_tr,
                s.omega_p_tr / (2.0 * PI),
                s.omega_s_tr / (2.0 * PI),
                s.f_dot,
            ]
        })
        .collect())
}

/// Rows `[x, F]` of a fidelity scan with 1 µs operation time. `x` is β for
/// `kind = "amplitude"` and the detuning in MHz for `kind = "detuning"`.
pub fn scan_rows(
    protocol: &str,
    kind: &str,
    a: f64,
    points: usize,
    steps: usize,
) -> Result<Vec<f64>, String> {
    let protocol = match protocol {
        "tr" => ProtocolKind::Tr { a },
        "cd" => ProtocolKind::Cd,
        "pi_pulse" => ProtocolKind::PiPulse,
        other => return Err(format!("unknown protocol `{other}`")),
    };
    let (error_kind, lo, hi, unit) = match kind {
        "amplitude" => (ErrorKind::AmplitudeBeta, -0.3, 0.3, 1.0),
        "detuning" => (ErrorKind::DetuningShift, -6.0, 6.0, 2.0 * PI),
        other => return Err(format!("unknown error kind `{other}`")),
    };
    let spec = ScanSpec {
        reference_steps: steps,
        ..ScanSpec::new(protocol, error_kind).with_range(lo * unit, hi * unit, points)
    };
    let result = run_scan(&spec).map_err(|e| e.to_string())?;
    Ok(result
        .error_values()
        .iter()
        .zip(result.fidelities())
        .flat_map(|(x, f)| [x / unit, f])
        .collect())
}

#[wasm_bindgen]
pub fn populations(omega0_mhz: f64, a: f64, steps: u32) -> Result<Vec<f64>, JsError> {
    population_rows(omega0_mhz, a, steps as usize).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn pulses(omega0_mhz: f64, a: f64) -> Result<Vec<f64>, JsError> {
    pulse_rows(omega0_mhz, a).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn fidelity_scan(
    protocol: &str,
    kind: &str,
    a: f64,
    points: u32,
    steps: u32,
) -> Result<Vec<f64>, JsError> {
    scan_rows(protocol, kind, a, points as usize, steps as usize).map_err(|e| JsError::new(&e))
}
