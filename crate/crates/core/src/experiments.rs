//! Robustness scans: final transfer fidelity under systematic amplitude and
//! detuning errors, for the rescaled protocol and the baselines.

use serde::{Deserialize, Serialize};

use crate::baselines::{BaselineSpec, Counterdiabatic, PiPulse};
use crate::error::{invalid, Result};
use crate::linalg::StateVector3;
use crate::propagate::{evolve, fidelity, rescaled_steps, DEFAULT_REFERENCE_STEPS};
use crate::rescale::RescaleParams;
use crate::stirap::StirapParams;
use crate::transform::{tr_hamiltonian, DiagonalOffset, TimeDependentHamiltonian};

/// Which protocol a scan drives, before it is fitted to an operation time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProtocolKind {
    Reference,
    Tr { a: f64 },
    Cd,
    PiPulse,
}

impl ProtocolKind {
    pub fn tag(&self) -> &'static str {
        match self {
            ProtocolKind::Reference => "reference",
            ProtocolKind::Tr { .. } => "tr",
            ProtocolKind::Cd => "cd",
            ProtocolKind::PiPulse => "pi_pulse",
        }
    }

    pub fn a(&self) -> f64 {
        match self {
            ProtocolKind::Tr { a } => *a,
            _ => 1.0,
        }
    }
}

/// A protocol with concrete parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Protocol {
    Reference(StirapParams),
    Rescaled {
        reference: StirapParams,
        rescale: RescaleParams,
    },
    Counterdiabatic(StirapParams),
    PiPulse(PiPulse),
}

/// How a detuning error enters a Λ-system Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetuningModel {
    /// Offset on the intermediate level only (one-photon detuning Δ).
    #[default]
    OnePhoton,
    /// A pump-frequency error: shifts Δ and the two-photon detuning δ equally.
    PumpFrequency,
}

/// Systematic errors applied when a protocol is executed.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SystematicError {
    /// Relative amplitude error β: every field amplitude is multiplied by `1 + β`.
    pub amplitude: f64,
    /// Static detuning offset δΔ (rad/µs), not modulated by the rescaling.
    pub detuning: f64,
    pub model: DetuningModel,
}

type BoxedHamiltonian = Box<dyn TimeDependentHamiltonian + Send + Sync>;

impl Protocol {
    /// Fits `kind` to operation time `duration`, starting from `base`.
    ///
    /// The rescaled protocol uses a reference of length `a·duration`; the
    /// counterdiabatic baseline uses `base` compressed to `duration` with
    /// `t0 = duration/8`.
    pub fn build(kind: ProtocolKind, base: &StirapParams, duration: f64) -> Result<Self> {
        if !(duration.is_finite() && duration > 0.0) {
            return Err(invalid("duration", "operation time must be > 0"));
        }
        Ok(match kind {
            ProtocolKind::Reference => Protocol::Reference(base.time_scaled(duration)?),
            ProtocolKind::Tr { a } => {
                let reference = base.time_scaled(a * duration)?;
                Protocol::Rescaled {
                    reference,
                    rescale: RescaleParams::new(a, reference.t_f)?,
                }
            }
            ProtocolKind::Cd => {
                let mut p = base.time_scaled(duration)?;
                p.t0 = duration / 8.0;
                Protocol::Counterdiabatic(p)
            }
            ProtocolKind::PiPulse => Protocol::PiPulse(PiPulse::new(duration)?),
        })
    }

    pub fn from_baseline(spec: &BaselineSpec) -> Result<Self> {
        spec.validate()?;
        Ok(match spec.kind {
            crate::baselines::BaselineKind::Counterdiabatic => {
                Protocol::Counterdiabatic(spec.stirap)
            }
            crate::baselines::BaselineKind::PiPulse => Protocol::PiPulse(PiPulse {
                rabi: spec.rabi,
                duration: spec.duration,
            }),
        })
    }

    pub fn duration(&self) -> f64 {
        match self {
            Protocol::Reference(p) | Protocol::Counterdiabatic(p) => p.t_f,
            Protocol::Rescaled { rescale, .. } => rescale.duration(),
            Protocol::PiPulse(p) => p.duration,
        }
    }

    /// Step count for one run, given the steps used for a reference protocol.
    pub fn steps(&self, reference_steps: usize) -> usize {
        match self {
            Protocol::Rescaled { rescale, .. } => rescaled_steps(reference_steps, rescale),
            _ => reference_steps,
        }
    }

    /// The Hamiltonian actually run in the presence of `err`.
    pub fn executed(&self, err: &SystematicError) -> Result<BoxedHamiltonian> {
        let gain = 1.0 + err.amplitude;
        let lambda_offsets = match err.model {
            DetuningModel::OnePhoton => [0.0, err.detuning, 0.0],
            DetuningModel::PumpFrequency => [0.0, err.detuning, err.detuning],
        };
        let scaled = |p: &StirapParams| StirapParams {
            omega0: p.omega0 * gain,
            ..*p
        };
        Ok(match self {
            Protocol::Reference(p) => Box::new(DiagonalOffset {
                inner: scaled(p),
                offsets: lambda_offsets,
            }),
            Protocol::Rescaled { reference, rescale } => Box::new(DiagonalOffset {
                inner: tr_hamiltonian(scaled(reference), *rescale)?,
                offsets: lambda_offsets,
            }),
            Protocol::Counterdiabatic(p) => Box::new(DiagonalOffset {
                inner: Counterdiabatic::new(scaled(p))?.with_correction_amplitude(gain),
                offsets: lambda_offsets,
            }),
            // |2⟩ is not coupled; the offset acts on the target level.
            Protocol::PiPulse(p) => Box::new(DiagonalOffset {
                inner: p.with_rabi(p.rabi * gain),
                offsets: [0.0, 0.0, err.detuning],
            }),
        })
    }

    /// Final `|⟨3|ψ(T)⟩|²` starting from |1⟩.
    pub fn final_fidelity(&self, err: &SystematicError, reference_steps: usize) -> Result<f64> {
        let h = self.executed(err)?;
        let steps = self.steps(reference_steps);
        let traj = evolve(&h, &StateVector3::basis(1), &[0.0, self.duration()], steps)?;
        Ok(fidelity(traj.final_state(), &StateVector3::basis(3)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    AmplitudeBeta,
    DetuningShift,
}

/// A one-dimensional sweep of a systematic error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub protocol: ProtocolKind,
    pub error_kind: ErrorKind,
    /// Closed interval of error values (β, or δΔ in rad/µs).
    pub range: (f64, f64),
    pub n_points: usize,
    /// Operation time T (µs).
    pub operation_time: f64,
    /// Pulse parameters the protocol is built from.
    pub base: StirapParams,
    pub detuning_model: DetuningModel,
    /// Steps for a reference-length run; rescaled runs scale it up.
    pub reference_steps: usize,
}

/// Default β grid: 121 points over [−0.3, 0.3].
pub const DEFAULT_BETA_RANGE: (f64, f64) = (-0.3, 0.3);
/// Default detuning grid: 121 points over ±2π×6 rad/µs.
pub const DEFAULT_DETUNING_RANGE: (f64, f64) = (
    -2.0 * std::f64::consts::PI * 6.0,
    2.0 * std::f64::consts::PI * 6.0,
);
pub const DEFAULT_SCAN_POINTS: usize = 121;

impl ScanSpec {
    /// Default grid for `error_kind`, one microsecond of operation time.
    pub fn new(protocol: ProtocolKind, error_kind: ErrorKind) -> Self {
        Self {
            protocol,
            error_kind,
            range: match error_kind {
                ErrorKind::AmplitudeBeta => DEFAULT_BETA_RANGE,
                ErrorKind::DetuningShift => DEFAULT_DETUNING_RANGE,
            },
            n_points: DEFAULT_SCAN_POINTS,
            operation_time: 1.0,
            base: StirapParams::default(),
            detuning_model: DetuningModel::OnePhoton,
            reference_steps: DEFAULT_REFERENCE_STEPS,
        }
    }

    pub fn with_range(self, lo: f64, hi: f64, n_points: usize) -> Self {
        Self {
            range: (lo, hi),
            n_points,
            ..self
        }
    }

    pub fn with_operation_time(self, operation_time: f64) -> Self {
        Self {
            operation_time,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_points < 2 {
            return Err(invalid("n_points", "need at least 2 points"));
        }
        if !(self.range.0.is_finite() && self.range.1.is_finite() && self.range.0 <= self.range.1) {
            return Err(invalid("range", "must be a finite interval lo ≤ hi"));
        }
        if self.reference_steps == 0 {
            return Err(invalid("steps", "must be ≥ 1"));
        }
        Ok(())
    }

    /// Evenly spaced error values, endpoints included.
    pub fn error_values(&self) -> Vec<f64> {
        let (lo, hi) = self.range;
        let n = self.n_points;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }

    fn error_at(&self, value: f64) -> SystematicError {
        match self.error_kind {
            ErrorKind::AmplitudeBeta => SystematicError {
                amplitude: value,
                detuning: 0.0,
                model: self.detuning_model,
            },
            ErrorKind::DetuningShift => SystematicError {
                amplitude: 0.0,
                detuning: value,
                model: self.detuning_model,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanPoint {
    pub error_value: f64,
    /// `None` when propagation failed at this point.
    pub fidelity: Option<f64>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanResult {
    pub protocol: String,
    pub a: f64,
    pub operation_time: f64,
    pub error_kind: ErrorKind,
    pub detuning_model: DetuningModel,
    pub points: Vec<ScanPoint>,
    pub spec: ScanSpec,
}

impl ScanResult {
    pub fn error_values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.error_value).collect()
    }

    /// Fidelities, NaN where a point failed.
    pub fn fidelities(&self) -> Vec<f64> {
        self.points
            .iter()
            .map(|p| p.fidelity.unwrap_or(f64::NAN))
            .collect()
    }

    pub fn failures(&self) -> usize {
        self.points.iter().filter(|p| p.failure.is_some()).count()
    }

    /// Fidelity at the grid point nearest to `value`.
    pub fn fidelity_near(&self, value: f64) -> Option<f64> {
        self.points
            .iter()
            .min_by(|a, b| {
                (a.error_value - value)
                    .abs()
                    .partial_cmp(&(b.error_value - value).abs())
                    .unwrap()
            })
            .and_then(|p| p.fidelity)
    }
}

#[cfg(feature = "parallel")]
fn map_points<F>(values: &[f64], f: F) -> Vec<ScanPoint>
where
    F: Fn(f64) -> ScanPoint + Sync + Send,
{
    use rayon::prelude::*;
    values.par_iter().map(|&v| f(v)).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_points<F>(values: &[f64], f: F) -> Vec<ScanPoint>
where
    F: Fn(f64) -> ScanPoint,
{
    values.iter().map(|&v| f(v)).collect()
}

/// Runs every point of `spec`. Per-point failures are recorded, not raised.
pub fn run_scan(spec: &ScanSpec) -> Result<ScanResult> {
    spec.validate()?;
    let protocol = Protocol::build(spec.protocol, &spec.base, spec.operation_time)?;
    let values = spec.error_values();
    let points = map_points(&values, |v| {
        match protocol.final_fidelity(&spec.error_at(v), spec.reference_steps) {
            Ok(f) => ScanPoint {
                error_value: v,
                fidelity: Some(f),
                failure: None,
            },
            Err(e) => ScanPoint {
                error_value: v,
                fidelity: None,
                failure: Some(e.to_string()),
            },
        }
    });
    Ok(ScanResult {
        protocol: spec.protocol.tag().to_string(),
        a: spec.protocol.a(),
        operation_time: spec.operation_time,
        error_kind: spec.error_kind,
        detuning_model: spec.detuning_model,
        points,
        spec: *spec,
    })
}

/// Fidelity under `Ω₀ → Ω₀(1+β)` on every drive field.
pub fn run_amplitude_scan(spec: &ScanSpec) -> Result<ScanResult> {
    if spec.error_kind != ErrorKind::AmplitudeBeta {
        return Err(invalid(
            "error_kind",
            "amplitude scan needs error_kind = amplitude_beta",
        ));
    }
    run_scan(spec)
}

/// Fidelity under a static detuning offset δΔ.
pub fn run_detuning_scan(spec: &ScanSpec) -> Result<ScanResult> {
    if spec.error_kind != ErrorKind::DetuningShift {
        return Err(invalid(
            "error_kind",
            "detuning scan needs error_kind = detuning_shift",
        ));
    }
    run_scan(spec)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AIndependence {
    /// `max |F_a(x) − F_a'(x)|` over all pairs and grid points.
    pub max_distance: f64,
    pub curves: Vec<ScanResult>,
}

/// Scans the same reference protocol rescaled by each `a`, with operation
/// time `t_f/a`, and compares the curves.
pub fn a_independence_check(
    a_values: &[f64],
    error_kind: ErrorKind,
    range: (f64, f64),
    n_points: usize,
    base: &StirapParams,
) -> Result<AIndependence> {
    let curves = a_values
        .iter()
        .map(|&a| {
            RescaleParams::new(a, base.t_f)?;
            let spec = ScanSpec {
                base: *base,
                ..ScanSpec::new(ProtocolKind::Tr { a }, error_kind)
            }
            .with_range(range.0, range.1, n_points)
            .with_operation_time(base.t_f / a);
            run_scan(&spec)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut max_distance = 0.0f64;
    for (i, x) in curves.iter().enumerate() {
        for y in &curves[i + 1..] {
            for (fx, fy) in x.fidelities().iter().zip(y.fidelities()) {
                max_distance = max_distance.max((fx - fy).abs());
            }
        }
    }
    Ok(AIndependence {
        max_distance,
        curves,
    })
}
