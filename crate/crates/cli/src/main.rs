use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use tr_stirap::config::{parse_config, ConfigError, RunConfig, RunProtocol};
use tr_stirap::experiments::{run_scan, ErrorKind, Protocol, SystematicError};
use tr_stirap::output::{emit_pulses, emit_scan, emit_trajectory, pulse_table, OutputError};
use tr_stirap::propagate::evolve_checked;
use tr_stirap::stirap::uniform_grid;
use tr_stirap::verify::verify;
use tr_stirap::StateVector3;

const DEFAULT_A: f64 = 10.0;

#[derive(Parser)]
#[command(
    name = "tr-stirap",
    version,
    about = "Time-rescaled STIRAP simulations"
)]
struct Cli {
    /// INI configuration file. Defaults apply when omitted.
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate one protocol from |1⟩ and write the trajectory CSV.
    Simulate {
        #[arg(long)]
        protocol: Option<ProtocolArg>,
        /// Time-contraction parameter (implies a [rescale] section).
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Fidelity against a systematic error; writes CSV plus a JSON sidecar.
    Scan {
        #[arg(long)]
        protocol: Option<ProtocolArg>,
        /// Error kind to sweep.
        #[arg(long, alias = "error")]
        kind: Option<ErrorArg>,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant checks; exit status 2 if any fails.
    Verify {
        /// Defaults to the config value, or 10.
        #[arg(long)]
        a: Option<f64>,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Write reference and rescaled pulse shapes.
    EmitPulses {
        /// Defaults to the config value, or 10.
        #[arg(long)]
        a: Option<f64>,
        /// Grid intervals (rows minus one).
        #[arg(long, default_value_t = 1000)]
        intervals: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ProtocolArg {
    Reference,
    Tr,
    Cd,
    #[value(name = "pi_pulse", alias = "pi-pulse")]
    PiPulse,
}

impl From<ProtocolArg> for RunProtocol {
    fn from(p: ProtocolArg) -> Self {
        match p {
            ProtocolArg::Reference => RunProtocol::Reference,
            ProtocolArg::Tr => RunProtocol::Tr,
            ProtocolArg::Cd => RunProtocol::Cd,
            ProtocolArg::PiPulse => RunProtocol::PiPulse,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ErrorArg {
    Amplitude,
    Detuning,
}

enum Failure {
    Config(String),
    Verification,
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Verification => 2,
            Failure::Io(_) => 3,
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<tr_stirap::Error> for Failure {
    fn from(e: tr_stirap::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<OutputError> for Failure {
    fn from(e: OutputError) -> Self {
        Failure::Io(e.to_string())
    }
}

fn load(path: Option<&Path>) -> Result<RunConfig, Failure> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
            parse_config(&text).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))
        }
    }
}

fn with_a(cfg: &mut RunConfig, a: Option<f64>) -> Result<(), Failure> {
    if let Some(a) = a {
        if !(a >= 1.0) {
            return Err(Failure::Config("a must be ≥ 1".into()));
        }
        cfg.a = Some(a);
    }
    Ok(())
}

fn with_fallback_a(cfg: &mut RunConfig, a: Option<f64>) -> Result<(), Failure> {
    with_a(cfg, a)?;
    cfg.a.get_or_insert(DEFAULT_A);
    cfg.validate()?;
    Ok(())
}

fn simulate(
    mut cfg: RunConfig,
    protocol: Option<ProtocolArg>,
    a: Option<f64>,
    steps: Option<usize>,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    with_a(&mut cfg, a)?;
    if let Some(p) = protocol {
        cfg.protocol = p.into();
    }
    if let Some(s) = steps {
        cfg.steps = s;
    }
    cfg.validate()?;

    let base = cfg.stirap_params()?;
    let protocol = match cfg.protocol {
        RunProtocol::Reference => Protocol::Reference(base),
        RunProtocol::Tr => Protocol::Rescaled {
            reference: base,
            rescale: cfg.rescale_params()?,
        },
        RunProtocol::Cd => Protocol::build(
            tr_stirap::experiments::ProtocolKind::Cd,
            &base,
            cfg.baseline_duration,
        )?,
        RunProtocol::PiPulse => Protocol::build(
            tr_stirap::experiments::ProtocolKind::PiPulse,
            &base,
            cfg.baseline_duration,
        )?,
    };
    let h = protocol.executed(&SystematicError::default())?;
    let every = cfg.output.record_every;
    let intervals = protocol.steps(cfg.steps).div_ceil(every);
    let grid = uniform_grid(protocol.duration(), intervals);
    let (traj, conv) = evolve_checked(&h, &StateVector3::basis(1), &grid, every)?;

    let path = out.unwrap_or_else(|| PathBuf::from(&cfg.output.trajectory));
    emit_trajectory(&path, &traj)?;
    let [p1, p2, p3] = traj.final_populations();
    let p2_max = traj.populations().iter().map(|q| q[1]).fold(0.0, f64::max);
    println!("protocol      {}", cfg.protocol.as_str());
    println!("duration_us   {}", protocol.duration());
    println!("steps         {}", 2 * intervals * every);
    println!("final         P1={p1:.9} P2={p2:.9} P3={p3:.9}");
    println!("max_P2        {p2_max:.9}");
    println!(
        "doubling      {:.3e} ({})",
        conv.max_change,
        if conv.converged {
            "converged"
        } else {
            "NOT converged"
        }
    );
    println!("wrote         {}", path.display());
    if !conv.converged {
        eprintln!(
            "warning: step doubling changed the final state by {:.3e}",
            conv.max_change
        );
    }
    Ok(())
}

fn scan(
    mut cfg: RunConfig,
    protocol: Option<ProtocolArg>,
    error: Option<ErrorArg>,
    a: Option<f64>,
    points: Option<usize>,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    with_a(&mut cfg, a)?;
    if let Some(p) = protocol {
        cfg.scan.protocol = p.into();
    } else if a.is_some() {
        cfg.scan.protocol = RunProtocol::Tr;
    }
    if let Some(e) = error {
        let kind = match e {
            ErrorArg::Amplitude => ErrorKind::AmplitudeBeta,
            ErrorArg::Detuning => ErrorKind::DetuningShift,
        };
        if kind != cfg.scan.error {
            cfg.scan.error = kind;
            (cfg.scan.min, cfg.scan.max) = match kind {
                ErrorKind::AmplitudeBeta => (-0.3, 0.3),
                ErrorKind::DetuningShift => (-6.0, 6.0),
            };
        }
    }
    if let Some(n) = points {
        cfg.scan.points = n;
    }
    cfg.validate()?;

    let result = run_scan(&cfg.scan_spec()?)?;
    let path = out.unwrap_or_else(|| PathBuf::from(&cfg.output.scan));
    let sidecar = emit_scan(&path, &result, &cfg)?;
    let fids: Vec<f64> = result
        .fidelities()
        .into_iter()
        .filter(|f| f.is_finite())
        .collect();
    let min = fids.iter().copied().fold(f64::INFINITY, f64::min);
    let max = fids.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    println!("protocol      {} (a = {})", result.protocol, result.a);
    println!(
        "points        {} ({} failed)",
        result.points.len(),
        result.failures()
    );
    println!("fidelity      min={min:.6} max={max:.6}");
    println!("wrote         {} and {}", path.display(), sidecar.display());
    Ok(())
}

fn run_verify(mut cfg: RunConfig, a: Option<f64>, json: bool) -> Result<(), Failure> {
    with_fallback_a(&mut cfg, a)?;
    let report = verify(
        &cfg.stirap_params()?,
        &cfg.rescale_params()?,
        cfg.steps,
        200,
    )?;
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).map_err(|e| Failure::Io(e.to_string()))?
        );
    } else {
        for c in &report.checks {
            println!(
                "{} {:<34} {:.3e} (tol {:.0e})",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.value,
                c.tolerance
            );
        }
    }
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn pulses(
    mut cfg: RunConfig,
    a: Option<f64>,
    intervals: usize,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    with_fallback_a(&mut cfg, a)?;
    if intervals == 0 {
        return Err(Failure::Config("intervals must be ≥ 1".into()));
    }
    let rows = pulse_table(&cfg.stirap_params()?, &cfg.rescale_params()?, intervals)?;
    let path = out.unwrap_or_else(|| PathBuf::from(&cfg.output.pulses));
    emit_pulses(&path, &rows)?;
    println!("wrote {} rows to {}", rows.len(), path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors share the invalid-configuration status
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = load(cli.config.as_deref()).and_then(|cfg| match cli.command {
        Command::Simulate {
            protocol,
            a,
            steps,
            out,
        } => simulate(cfg, protocol, a, steps, out),
        Command::Scan {
            protocol,
            kind,
            a,
            points,
            out,
        } => scan(cfg, protocol, kind, a, points, out),
        Command::Verify { a, json } => run_verify(cfg, a, json),
        Command::EmitPulses { a, intervals, out } => pulses(cfg, a, intervals, out),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Config(m) => eprintln!("error: invalid configuration: {m}"),
                Failure::Verification => eprintln!("error: verification failed"),
                Failure::Io(m) => eprintln!("error: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
