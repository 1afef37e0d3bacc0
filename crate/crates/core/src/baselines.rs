//! Comparison protocols: transitionless (counterdiabatic) STIRAP and a flat
//! resonant π pulse between |1⟩ and |3⟩.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::HermitianOperator3;
use crate::stirap::{Drive, StirapParams};
use crate::transform::TimeDependentHamiltonian;

/// `iθ̇(|1⟩⟨3| − |3⟩⟨1|)`, the correction that keeps the dark state exact.
pub fn cd_correction<D: Drive + ?Sized>(drive: &D, t: f64) -> HermitianOperator3 {
    let z = Complex64::new(0.0, 0.0);
    HermitianOperator3::from_upper([0.0; 3], z, Complex64::new(0.0, drive.theta_dot(t)), z)
}

/// Reference Hamiltonian plus the transitionless correction. Resonant drives only.
pub fn cd_hamiltonian<D: Drive + ?Sized>(drive: &D, t: f64) -> Result<HermitianOperator3> {
    if drive.one_photon_detuning() != 0.0 || drive.two_photon_detuning() != 0.0 {
        return Err(Error::Unsupported(
            "counterdiabatic baseline is defined for the resonant case (Δ = δ = 0)".into(),
        ));
    }
    Ok(drive.hamiltonian(t).add(&cd_correction(drive, t)))
}

/// Counterdiabatic STIRAP as a time-dependent Hamiltonian.
///
/// `correction_amplitude` multiplies the 1–3 correction field; a systematic
/// power error scales it together with the pump and Stokes pulses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Counterdiabatic {
    drive: StirapParams,
    correction_amplitude: f64,
}

impl Counterdiabatic {
    pub fn new(drive: StirapParams) -> Result<Self> {
        drive.validate()?;
        if drive.delta_p != 0.0 || drive.delta_2 != 0.0 {
            return Err(Error::Unsupported(
                "counterdiabatic baseline is defined for the resonant case (Δ = δ = 0)".into(),
            ));
        }
        Ok(Self {
            drive,
            correction_amplitude: 1.0,
        })
    }

    pub fn with_correction_amplitude(self, factor: f64) -> Self {
        Self {
            correction_amplitude: factor,
            ..self
        }
    }

    pub fn drive(&self) -> &StirapParams {
        &self.drive
    }
}

impl TimeDependentHamiltonian for Counterdiabatic {
    fn duration(&self) -> f64 {
        self.drive.t_f
    }

    fn at(&self, t: f64) -> Result<HermitianOperator3> {
        Ok(self
            .drive
            .hamiltonian(t)
            .add(&cd_correction(&self.drive, t).scale(self.correction_amplitude)))
    }
}

/// Constant coupling `Ω_eff/2` between |1⟩ and |3⟩ on `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiPulse {
    pub rabi: f64,
    pub duration: f64,
}

impl PiPulse {
    /// Area-π pulse of length `duration`: `Ω_eff = π/T`.
    pub fn new(duration: f64) -> Result<Self> {
        if !(duration.is_finite() && duration > 0.0) {
            return Err(invalid("duration", "must be > 0"));
        }
        Ok(Self {
            rabi: PI / duration,
            duration,
        })
    }

    pub fn with_rabi(self, rabi: f64) -> Self {
        Self { rabi, ..self }
    }
}

impl TimeDependentHamiltonian for PiPulse {
    fn duration(&self) -> f64 {
        self.duration
    }

    fn at(&self, t: f64) -> Result<HermitianOperator3> {
        let hi = self.duration;
        if !(t >= -1e-12 * hi && t <= hi * (1.0 + 1e-12)) {
            return Err(Error::Domain { t, lo: 0.0, hi });
        }
        let z = Complex64::new(0.0, 0.0);
        Ok(HermitianOperator3::from_upper(
            [0.0; 3],
            z,
            Complex64::new(0.5 * self.rabi, 0.0),
            z,
        ))
    }
}

/// Two-level transfer probability with Rabi frequency `rabi` and detuning
/// `detuning` after time `t`: `Ω²/(Ω²+d²)·sin²(√(Ω²+d²)·t/2)`.
pub fn rabi_transfer(rabi: f64, detuning: f64, t: f64) -> f64 {
    let w_sq = rabi * rabi + detuning * detuning;
    if w_sq == 0.0 {
        return 0.0;
    }
    rabi * rabi / w_sq * (0.5 * w_sq.sqrt() * t).sin().powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineKind {
    Counterdiabatic,
    PiPulse,
}

/// Which baseline and how long it runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineSpec {
    pub kind: BaselineKind,
    pub duration: f64,
    /// Pulse parameters of the counterdiabatic protocol (`t_f == duration`).
    pub stirap: StirapParams,
    /// Effective Rabi frequency of the π pulse (`rabi·duration == π`).
    pub rabi: f64,
}

impl BaselineSpec {
    /// Default pulse set compressed to `duration`, with the pulse delay set to
    /// `t0 = duration/8`.
    pub fn standard_cd(duration: f64) -> Result<Self> {
        let mut stirap = StirapParams::default().time_scaled(duration)?;
        stirap.t0 = duration / 8.0;
        stirap.validate()?;
        Ok(Self {
            kind: BaselineKind::Counterdiabatic,
            duration,
            stirap,
            rabi: PI / duration,
        })
    }

    pub fn pi_pulse(duration: f64) -> Result<Self> {
        let pulse = PiPulse::new(duration)?;
        Ok(Self {
            kind: BaselineKind::PiPulse,
            duration,
            stirap: StirapParams::default().time_scaled(duration)?,
            rabi: pulse.rabi,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(invalid("duration", "must be > 0"));
        }
        match self.kind {
            BaselineKind::Counterdiabatic => {
                self.stirap.validate()?;
                if (self.stirap.t_f - self.duration).abs() > 1e-12 * self.duration {
                    return Err(invalid("duration", "CD pulse t_f must equal the duration"));
                }
            }
            BaselineKind::PiPulse => {
                if (self.rabi * self.duration - PI).abs() > 1e-12 {
                    return Err(invalid("rabi", "π pulse needs rabi·duration = π"));
                }
            }
        }
        Ok(())
    }
}

/// Value of the π-pulse Hamiltonian at `t`.
pub fn pi_pulse_hamiltonian(spec: &BaselineSpec, t: f64) -> Result<HermitianOperator3> {
    PiPulse {
        rabi: spec.rabi,
        duration: spec.duration,
    }
    .at(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::StateVector3;
    use crate::propagate::{evolve_uniform, fidelity};
    use crate::stirap::ConstantDrive;
    use approx::assert_abs_diff_eq;

    fn ket(k: usize) -> StateVector3 {
        StateVector3::basis(k)
    }

    fn final_p3<H: TimeDependentHamiltonian>(h: &H) -> f64 {
        let traj = evolve_uniform(h, &ket(1), 8000, 8000).unwrap();
        fidelity(traj.final_state(), &ket(3))
    }

    #[test]
    fn correction_vanishes_for_static_pulses() {
        let d = ConstantDrive {
            omega_p: 3.0,
            omega_s: 1.0,
            delta_p: 0.0,
        };
        assert_eq!(cd_correction(&d, 0.4), HermitianOperator3::zero());
        assert_eq!(cd_hamiltonian(&d, 0.4).unwrap(), d.hamiltonian(0.4));
    }

    #[test]
    fn rejects_detuned_drive() {
        let p = StirapParams {
            delta_p: 1.0,
            ..StirapParams::default()
        };
        assert!(cd_hamiltonian(&p, 1.0).is_err());
        assert!(Counterdiabatic::new(p).is_err());
    }

    #[test]
    fn correction_keeps_dark_state_exact() {
        // H_total|n0⟩ = i·d|n0⟩/dt  ⇔  adiabatic couplings out of the dark state cancel.
        let spec = BaselineSpec::standard_cd(1.0).unwrap();
        let p = spec.stirap;
        let h = 1e-6;
        for i in 1..20 {
            let t = i as f64 / 20.0;
            let n0 = p.dark_state(t);
            let dn0 = (p.dark_state(t + h).amplitudes() - p.dark_state(t - h).amplitudes())
                / Complex64::new(2.0 * h, 0.0);
            let lhs = cd_hamiltonian(&p, t).unwrap().apply(&n0);
            let rhs = dn0 * Complex64::new(0.0, 1.0);
            let err = (lhs - rhs).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(err < 1e-6, "t={t} err={err}");
        }
    }

    #[test]
    fn cd_total_is_hermitian() {
        let spec = BaselineSpec::standard_cd(1.0).unwrap();
        let cd = Counterdiabatic::new(spec.stirap).unwrap();
        for i in 0..=50 {
            let m = *cd.at(i as f64 / 50.0).unwrap().matrix();
            assert!(HermitianOperator3::new(m).is_ok());
        }
    }

    #[test]
    fn cd_transfer_is_complete_for_any_duration() {
        for &t in &[0.5, 1.0, 2.0] {
            let spec = BaselineSpec::standard_cd(t).unwrap();
            let f = final_p3(&Counterdiabatic::new(spec.stirap).unwrap());
            assert!(f >= 0.999, "T={t} F={f}");
        }
    }

    #[test]
    fn pi_pulse_examples() {
        let spec = BaselineSpec::pi_pulse(1.0).unwrap();
        assert!(spec.validate().is_ok());
        let pulse = PiPulse::new(1.0).unwrap();
        assert_abs_diff_eq!(final_p3(&pulse), 1.0, epsilon = 1e-12);

        let strong = pulse.with_rabi(pulse.rabi * 1.2);
        let expected = (0.6 * PI).sin().powi(2);
        assert_abs_diff_eq!(final_p3(&strong), expected, epsilon = 1e-6);
        assert_abs_diff_eq!(expected, 0.904_508_497_187_473_7, epsilon = 1e-15);

        assert_eq!(final_p3(&pulse.with_rabi(0.0)), 0.0);

        let h = pi_pulse_hamiltonian(&spec, 0.5).unwrap();
        assert_abs_diff_eq!(h.entry(0, 2).re, PI / 2.0, epsilon = 1e-15);
        assert!(pi_pulse_hamiltonian(&spec, 1.5).is_err());
    }

    #[test]
    fn pi_pulse_never_populates_intermediate_level() {
        let pulse = PiPulse::new(1.0).unwrap().with_rabi(2.3);
        let traj = evolve_uniform(&pulse, &ket(1), 1000, 10).unwrap();
        for (t, q) in traj.times().iter().zip(traj.populations()) {
            assert!(q[1] < 1e-24);
            assert_abs_diff_eq!(q[2], rabi_transfer(2.3, 0.0, *t), epsilon = 1e-6);
        }
    }

    #[test]
    fn baseline_spec_validation() {
        let mut spec = BaselineSpec::pi_pulse(1.0).unwrap();
        spec.rabi = 2.0;
        assert!(spec.validate().is_err());
        let mut spec = BaselineSpec::standard_cd(1.0).unwrap();
        assert_abs_diff_eq!(spec.stirap.t0, 0.125);
        assert_abs_diff_eq!(spec.stirap.sigma, 1.0 / 6.0, epsilon = 1e-15);
        spec.duration = 2.0;
        assert!(spec.validate().is_err());
        assert!(BaselineSpec::pi_pulse(0.0).is_err());
    }

    #[test]
    fn generalized_rabi_formula() {
        assert_abs_diff_eq!(rabi_transfer(PI, 0.0, 1.0), 1.0, epsilon = 1e-15);
        assert_eq!(rabi_transfer(0.0, 0.0, 1.0), 0.0);
        // detuning equal to the Rabi frequency: ½·sin²(π/√2)
        let expected = 0.5 * (PI / 2f64.sqrt()).sin().powi(2);
        assert_abs_diff_eq!(rabi_transfer(PI, PI, 1.0), expected, epsilon = 1e-15);
    }
}
