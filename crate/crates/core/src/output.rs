//! CSV and JSON writers. Floats are written with 17 significant digits.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::error::Result as SimResult;
use crate::experiments::ScanResult;
use crate::propagate::Trajectory;
use crate::rescale::RescaleParams;
use crate::stirap::{uniform_grid, StirapParams};
use crate::transform::tr_pulses_closed_form;

pub const TRAJECTORY_HEADER: &str = "t_us,re1,im1,re2,im2,re3,im3,P1,P2,P3";
pub const SCAN_HEADER: &str = "error_value,fidelity,protocol,a,T_us";
pub const PULSE_HEADER: &str = "t_us,omega_p,omega_s,t_tr_us,omega_p_tr,omega_s_tr,delta_tr,fdot";

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

fn io_at(path: &Path) -> impl FnOnce(io::Error) -> OutputError + '_ {
    move |source| OutputError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_trajectory<W: Write>(mut w: W, traj: &Trajectory) -> io::Result<()> {
    writeln!(w, "{TRAJECTORY_HEADER}")?;
    for (t, psi) in traj.times().iter().zip(traj.states()) {
        let mut row = vec![num(*t)];
        for k in 1..=3 {
            let c = psi.amplitude(k);
            row.push(num(c.re));
            row.push(num(c.im));
        }
        row.extend(psi.populations().iter().map(|p| num(*p)));
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()
}

pub fn emit_trajectory(path: &Path, traj: &Trajectory) -> Result<(), OutputError> {
    let file = File::create(path).map_err(io_at(path))?;
    write_trajectory(BufWriter::new(file), traj).map_err(io_at(path))
}

/// Failed points are written with an empty fidelity field.
pub fn write_scan<W: Write>(mut w: W, scan: &ScanResult) -> io::Result<()> {
    writeln!(w, "{SCAN_HEADER}")?;
    for p in &scan.points {
        let fid = p.fidelity.map(num).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{}",
            num(p.error_value),
            fid,
            scan.protocol,
            num(scan.a),
            num(scan.operation_time)
        )?;
    }
    w.flush()
}

/// `scan.csv` → `scan.json`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

#[derive(Serialize)]
struct Sidecar<'a, C: Serialize> {
    config: &'a C,
    scan: &'a ScanResult,
    failures: usize,
}

/// Writes the scan CSV and a JSON sidecar echoing `config`. Returns the
/// sidecar path.
pub fn emit_scan<C: Serialize>(
    csv: &Path,
    scan: &ScanResult,
    config: &C,
) -> Result<PathBuf, OutputError> {
    let file = File::create(csv).map_err(io_at(csv))?;
    write_scan(BufWriter::new(file), scan).map_err(io_at(csv))?;
    let json_path = sidecar_path(csv);
    let sidecar = Sidecar {
        config,
        scan,
        failures: scan.failures(),
    };
    let text = serde_json::to_string_pretty(&sidecar)?;
    std::fs::write(&json_path, text + "\n").map_err(io_at(&json_path))?;
    Ok(json_path)
}

/// One row of the pulse table. Reference controls at `t`, rescaled controls
/// at the same sample index of a grid over `[0, t_f/a]`. All in rad/µs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PulseSample {
    pub t: f64,
    pub omega_p: f64,
    pub omega_s: f64,
    pub t_tr: f64,
    pub omega_p_tr: f64,
    pub omega_s_tr: f64,
    pub delta_tr: f64,
    pub f_dot: f64,
}

/// Samples the reference and rescaled pulses on `intervals + 1` points.
pub fn pulse_table(
    p: &StirapParams,
    r: &RescaleParams,
    intervals: usize,
) -> SimResult<Vec<PulseSample>> {
    let slow = uniform_grid(p.t_f, intervals);
    let fast = uniform_grid(r.duration(), intervals);
    slow.iter()
        .zip(&fast)
        .map(|(&t, &t_tr)| {
            let c = tr_pulses_closed_form(p, r, t_tr)?;
            Ok(PulseSample {
                t,
                omega_p: p.pump_pulse(t),
                omega_s: p.stokes_pulse(t),
                t_tr,
                omega_p_tr: c.pump,
                omega_s_tr: c.stokes,
                delta_tr: c.detuning,
                f_dot: r.f_dot(t_tr)?,
            })
        })
        .collect()
}

pub fn write_pulses<W: Write>(mut w: W, rows: &[PulseSample]) -> io::Result<()> {
    writeln!(w, "{PULSE_HEADER}")?;
    for s in rows {
        let row = [
            s.t,
            s.omega_p,
            s.omega_s,
            s.t_tr,
            s.omega_p_tr,
            s.omega_s_tr,
            s.delta_tr,
            s.f_dot,
        ]
        .map(num);
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()
}

pub fn emit_pulses(path: &Path, rows: &[PulseSample]) -> Result<(), OutputError> {
    let file = File::create(path).map_err(io_at(path))?;
    write_pulses(BufWriter::new(file), rows).map_err(io_at(path))
}
