//! INI-style run configuration.
//!
//! ```text
//! # frequencies in MHz (converted with 2π to rad/µs), times in µs
//! [run]
//! protocol = tr            # reference | tr | cd | pi_pulse
//! steps = 8000             # steps per reference-length run
//! [stirap]
//! omega0_mhz = 3
//! t_f = 10
//! [rescale]
//! a = 10
//! [scan]
//! error = amplitude        # amplitude | detuning
//! ```
//!
//! Every key is optional; missing values take the default protocol set.
//! `t0` and `sigma` default to `t_f/10` and `t_f/6`. A `tr` protocol needs a
//! `[rescale]` section.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::error::Error as SimError;
use crate::experiments::{DetuningModel, ErrorKind, ProtocolKind, ScanSpec};
use crate::propagate::DEFAULT_REFERENCE_STEPS;
use crate::rescale::{RescaleParams, DEFAULT_INV_TOL};
use crate::stirap::StirapParams;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("`{key}`: {message}")]
    Semantic { key: String, message: String },
    #[error("missing section [{0}]")]
    MissingSection(String),
}

fn semantic(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Semantic {
        key: key.to_string(),
        message: message.into(),
    }
}

fn from_sim(key: &str, e: SimError) -> ConfigError {
    match e {
        SimError::InvalidParameter { reason, .. } => semantic(key, reason),
        other => semantic(key, other.to_string()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunProtocol {
    Reference,
    Tr,
    Cd,
    PiPulse,
}

impl RunProtocol {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "reference" => RunProtocol::Reference,
            "tr" => RunProtocol::Tr,
            "cd" => RunProtocol::Cd,
            "pi_pulse" => RunProtocol::PiPulse,
            _ => return None,
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            RunProtocol::Reference => "reference",
            RunProtocol::Tr => "tr",
            RunProtocol::Cd => "cd",
            RunProtocol::PiPulse => "pi_pulse",
        }
    }
}

/// Pulse parameters as written in the file (MHz and µs).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StirapSection {
    pub omega0_mhz: f64,
    pub t_f: f64,
    pub t0: f64,
    pub sigma: f64,
    pub delta_p_mhz: f64,
    pub delta_2_mhz: f64,
}

impl Default for StirapSection {
    fn default() -> Self {
        Self {
            omega0_mhz: 3.0,
            t_f: 10.0,
            t0: 1.0,
            sigma: 10.0 / 6.0,
            delta_p_mhz: 0.0,
            delta_2_mhz: 0.0,
        }
    }
}

impl StirapSection {
    pub fn to_params(&self) -> Result<StirapParams, ConfigError> {
        let p = StirapParams::new(
            2.0 * PI * self.omega0_mhz,
            self.t_f,
            self.t0,
            self.sigma,
            2.0 * PI * self.delta_p_mhz,
        )
        .map_err(|e| from_sim("stirap", e))?;
        p.with_two_photon_detuning(2.0 * PI * self.delta_2_mhz)
            .map_err(|e| from_sim("stirap.delta_2_mhz", e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanSection {
    pub protocol: RunProtocol,
    pub error: ErrorKind,
    /// β, or δΔ in MHz for detuning scans.
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub operation_time: f64,
    pub detuning_model: DetuningModel,
}

impl Default for ScanSection {
    fn default() -> Self {
        Self {
            protocol: RunProtocol::Reference,
            error: ErrorKind::AmplitudeBeta,
            min: -0.3,
            max: 0.3,
            points: 121,
            operation_time: 1.0,
            detuning_model: DetuningModel::OnePhoton,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputSection {
    pub trajectory: String,
    pub scan: String,
    pub pulses: String,
    /// Record every n-th propagation step in trajectory output.
    pub record_every: usize,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            trajectory: "trajectory.csv".into(),
            scan: "scan.csv".into(),
            pulses: "pulses.csv".into(),
            record_every: 10,
        }
    }
}

/// Fully validated configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub protocol: RunProtocol,
    /// Steps per reference-length run.
    pub steps: usize,
    /// Absolute tolerance for the rescaling inverse (µs).
    pub f_inv_tol: f64,
    pub stirap: StirapSection,
    /// Time-contraction parameter, present when a `[rescale]` section is.
    pub a: Option<f64>,
    /// Operation time of the baselines (µs).
    pub baseline_duration: f64,
    pub scan: ScanSection,
    pub output: OutputSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            protocol: RunProtocol::Reference,
            steps: DEFAULT_REFERENCE_STEPS,
            f_inv_tol: DEFAULT_INV_TOL,
            stirap: StirapSection::default(),
            a: None,
            baseline_duration: 1.0,
            scan: ScanSection::default(),
            output: OutputSection::default(),
        }
    }
}

impl RunConfig {
    pub fn stirap_params(&self) -> Result<StirapParams, ConfigError> {
        self.stirap.to_params()
    }

    pub fn rescale_params(&self) -> Result<RescaleParams, ConfigError> {
        let a = self
            .a
            .ok_or_else(|| ConfigError::MissingSection("rescale".into()))?;
        RescaleParams::new(a, self.stirap.t_f).map_err(|e| from_sim("rescale.a", e))
    }

    fn protocol_kind(&self, p: RunProtocol) -> Result<ProtocolKind, ConfigError> {
        Ok(match p {
            RunProtocol::Reference => ProtocolKind::Reference,
            RunProtocol::Tr => ProtocolKind::Tr {
                a: self.rescale_params()?.a(),
            },
            RunProtocol::Cd => ProtocolKind::Cd,
            RunProtocol::PiPulse => ProtocolKind::PiPulse,
        })
    }

    /// Scan description in internal units.
    pub fn scan_spec(&self) -> Result<ScanSpec, ConfigError> {
        let s = &self.scan;
        let unit = match s.error {
            ErrorKind::AmplitudeBeta => 1.0,
            ErrorKind::DetuningShift => 2.0 * PI,
        };
        let spec = ScanSpec {
            protocol: self.protocol_kind(s.protocol)?,
            error_kind: s.error,
            range: (s.min * unit, s.max * unit),
            n_points: s.points,
            operation_time: s.operation_time,
            base: self.stirap_params()?,
            detuning_model: s.detuning_model,
            reference_steps: self.steps,
        };
        spec.validate().map_err(|e| from_sim("scan", e))?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.stirap_params()?;
        if self.steps == 0 {
            return Err(semantic("run.steps", "must be ≥ 1"));
        }
        if !(self.f_inv_tol > 0.0) {
            return Err(semantic("run.f_inv_tol", "must be > 0"));
        }
        if let Some(a) = self.a {
            if !(a >= 1.0) {
                return Err(semantic("rescale.a", "a must be ≥ 1"));
            }
        }
        if self.protocol == RunProtocol::Tr || self.scan.protocol == RunProtocol::Tr {
            self.rescale_params()?;
        }
        if !(self.baseline_duration > 0.0 && self.baseline_duration.is_finite()) {
            return Err(semantic("baseline.duration", "must be > 0"));
        }
        if self.output.record_every == 0 {
            return Err(semantic("output.record_every", "must be ≥ 1"));
        }
        self.scan_spec()?;
        Ok(())
    }

    /// Writes the configuration back as INI text; `parse_config` of the
    /// result reproduces `self`.
    pub fn to_ini(&self) -> String {
        let mut out = String::from("# frequencies in MHz, times in µs\n");
        let s = &self.stirap;
        let _ = writeln!(out, "[run]\nprotocol = {}", self.protocol.as_str());
        let _ = writeln!(
            out,
            "steps = {}\nf_inv_tol = {:?}",
            self.steps, self.f_inv_tol
        );
        let _ = writeln!(
            out,
            "\n[stirap]\nomega0_mhz = {:?}\nt_f = {:?}\nt0 = {:?}\nsigma = {:?}\ndelta_p_mhz = {:?}\ndelta_2_mhz = {:?}",
            s.omega0_mhz, s.t_f, s.t0, s.sigma, s.delta_p_mhz, s.delta_2_mhz
        );
        if let Some(a) = self.a {
            let _ = writeln!(out, "\n[rescale]\na = {a:?}");
        }
        let _ = writeln!(out, "\n[baseline]\nduration = {:?}", self.baseline_duration);
        let sc = &self.scan;
        let _ = writeln!(
            out,
            "\n[scan]\nprotocol = {}\nerror = {}\nmin = {:?}\nmax = {:?}\npoints = {}\noperation_time = {:?}\ndetuning_model = {}",
            sc.protocol.as_str(),
            error_kind_str(sc.error),
            sc.min,
            sc.max,
            sc.points,
            sc.operation_time,
            detuning_model_str(sc.detuning_model)
        );
        let o = &self.output;
        let _ = writeln!(
            out,
            "\n[output]\ntrajectory = {}\nscan = {}\npulses = {}\nrecord_every = {}",
            o.trajectory, o.scan, o.pulses, o.record_every
        );
        out
    }
}

fn error_kind_str(k: ErrorKind) -> &'static str {
    match k {
        ErrorKind::AmplitudeBeta => "amplitude",
        ErrorKind::DetuningShift => "detuning",
    }
}

fn detuning_model_str(m: DetuningModel) -> &'static str {
    match m {
        DetuningModel::OnePhoton => "one_photon",
        DetuningModel::PumpFrequency => "pump_frequency",
    }
}

struct Entry {
    value: String,
    line: usize,
}

type Sections = BTreeMap<String, BTreeMap<String, Entry>>;

fn tokenize(text: &str) -> Result<Sections, ConfigError> {
    let mut sections: Sections = BTreeMap::new();
    let mut current: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw.find(['#', ';']) {
            Some(i) => &raw[..i],
            None => raw,
        };
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start().len();
        let column = raw[..indent].chars().count() + 1;
        if let Some(rest) = trimmed.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or(ConfigError::Parse {
                line,
                column,
                message: "unterminated section header".into(),
            })?;
            let name = name.trim().to_string();
            if name.is_empty() {
                return Err(ConfigError::Parse {
                    line,
                    column,
                    message: "empty section name".into(),
                });
            }
            if sections.contains_key(&name) {
                return Err(ConfigError::Parse {
                    line,
                    column,
                    message: format!("duplicate section [{name}]"),
                });
            }
            sections.insert(name.clone(), BTreeMap::new());
            current = Some(name);
            continue;
        }
        let eq = trimmed.find('=').ok_or(ConfigError::Parse {
            line,
            column,
            message: "expected `key = value`".into(),
        })?;
        let key = trimmed[..eq].trim();
        let value = trimmed[eq + 1..].trim();
        if key.is_empty() {
            return Err(ConfigError::Parse {
                line,
                column,
                message: "empty key".into(),
            });
        }
        let section = current.as_ref().ok_or(ConfigError::Parse {
            line,
            column,
            message: format!("key `{key}` outside of any section"),
        })?;
        let table = sections.get_mut(section).expect("section inserted");
        if table.contains_key(key) {
            return Err(ConfigError::Parse {
                line,
                column,
                message: format!("duplicate key `{key}` in [{section}]"),
            });
        }
        table.insert(
            key.to_string(),
            Entry {
                value: value.to_string(),
                line,
            },
        );
    }
    Ok(sections)
}

struct Section<'a> {
    name: &'a str,
    entries: BTreeMap<String, Entry>,
}

impl Section<'_> {
    fn take<T>(
        &mut self,
        key: &str,
        parse: impl Fn(&str) -> Option<T>,
        expected: &str,
    ) -> Result<Option<T>, ConfigError> {
        match self.entries.remove(key) {
            None => Ok(None),
            Some(e) => parse(&e.value).map(Some).ok_or_else(|| {
                semantic(
                    &format!("{}.{key}", self.name),
                    format!("line {}: expected {expected}, got `{}`", e.line, e.value),
                )
            }),
        }
    }

    fn float(&mut self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.take(
            key,
            |s| s.parse::<f64>().ok().filter(|x| x.is_finite()),
            "a finite number",
        )
    }

    fn count(&mut self, key: &str) -> Result<Option<usize>, ConfigError> {
        self.take(key, |s| s.parse::<usize>().ok(), "a non-negative integer")
    }

    fn finish(self) -> Result<(), ConfigError> {
        match self.entries.into_iter().next() {
            None => Ok(()),
            Some((key, e)) => Err(semantic(
                &format!("{}.{key}", self.name),
                format!("line {}: unknown key", e.line),
            )),
        }
    }
}

/// Parses and validates a configuration file.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut sections = tokenize(text)?;
    const KNOWN: [&str; 6] = ["run", "stirap", "rescale", "baseline", "scan", "output"];
    if let Some(unknown) = sections.keys().find(|k| !KNOWN.contains(&k.as_str())) {
        return Err(semantic(unknown, "unknown section"));
    }
    let mut open = |name: &'static str| {
        sections
            .remove(name)
            .map(|entries| Section { name, entries })
    };

    let mut cfg = RunConfig::default();

    if let Some(mut s) = open("stirap") {
        let t_f = s.float("t_f")?.unwrap_or(cfg.stirap.t_f);
        cfg.stirap = StirapSection {
            omega0_mhz: s.float("omega0_mhz")?.unwrap_or(cfg.stirap.omega0_mhz),
            t_f,
            t0: s.float("t0")?.unwrap_or(t_f / 10.0),
            sigma: s.float("sigma")?.unwrap_or(t_f / 6.0),
            delta_p_mhz: s.float("delta_p_mhz")?.unwrap_or(0.0),
            delta_2_mhz: s.float("delta_2_mhz")?.unwrap_or(0.0),
        };
        s.finish()?;
    }

    if let Some(mut s) = open("run") {
        if let Some(p) = s.take(
            "protocol",
            RunProtocol::parse,
            "reference | tr | cd | pi_pulse",
        )? {
            cfg.protocol = p;
        }
        cfg.steps = s.count("steps")?.unwrap_or(cfg.steps);
        cfg.f_inv_tol = s.float("f_inv_tol")?.unwrap_or(cfg.f_inv_tol);
        s.finish()?;
    }

    let mut rescale_present = false;
    if let Some(mut s) = open("rescale") {
        rescale_present = true;
        let a = s.float("a")?.unwrap_or(10.0);
        if a < 1.0 {
            return Err(semantic("rescale.a", "a must be ≥ 1"));
        }
        cfg.a = Some(a);
        s.finish()?;
    }

    if let Some(mut s) = open("baseline") {
        cfg.baseline_duration = s.float("duration")?.unwrap_or(cfg.baseline_duration);
        s.finish()?;
    }

    if let Some(mut s) = open("scan") {
        let mut scan = ScanSection {
            protocol: if rescale_present {
                RunProtocol::Tr
            } else {
                RunProtocol::Reference
            },
            ..ScanSection::default()
        };
        if let Some(p) = s.take(
            "protocol",
            RunProtocol::parse,
            "reference | tr | cd | pi_pulse",
        )? {
            scan.protocol = p;
        }
        if let Some(e) = s.take(
            "error",
            |v| match v {
                "amplitude" => Some(ErrorKind::AmplitudeBeta),
                "detuning" => Some(ErrorKind::DetuningShift),
                _ => None,
            },
            "amplitude | detuning",
        )? {
            scan.error = e;
            if e == ErrorKind::DetuningShift {
                scan.min = -6.0;
                scan.max = 6.0;
            }
        }
        scan.min = s.float("min")?.unwrap_or(scan.min);
        scan.max = s.float("max")?.unwrap_or(scan.max);
        scan.points = s.count("points")?.unwrap_or(scan.points);
        scan.operation_time = s.float("operation_time")?.unwrap_or(scan.operation_time);
        if let Some(m) = s.take(
            "detuning_model",
            |v| match v {
                "one_photon" => Some(DetuningModel::OnePhoton),
                "pump_frequency" => Some(DetuningModel::PumpFrequency),
                _ => None,
            },
            "one_photon | pump_frequency",
        )? {
            scan.detuning_model = m;
        }
        cfg.scan = scan;
        s.finish()?;
    }

    if let Some(mut s) = open("output") {
        let text = |v: &str| (!v.is_empty()).then(|| v.to_string());
        let o = &mut cfg.output;
        o.trajectory = s
            .take("trajectory", text, "a path")?
            .unwrap_or(o.trajectory.clone());
        o.scan = s.take("scan", text, "a path")?.unwrap_or(o.scan.clone());
        o.pulses = s
            .take("pulses", text, "a path")?
            .unwrap_or(o.pulses.clone());
        o.record_every = s.count("record_every")?.unwrap_or(o.record_every);
        s.finish()?;
    }

    let needs_rescale = cfg.protocol == RunProtocol::Tr || cfg.scan.protocol == RunProtocol::Tr;
    if needs_rescale && !rescale_present {
        return Err(ConfigError::MissingSection("rescale".into()));
    }
    cfg.validate()?;
    Ok(cfg)
}
