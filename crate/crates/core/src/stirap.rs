//! Three-level Λ system driven by pump and Stokes fields.
//!
//! Units: ħ = 1, time in µs, frequencies in rad/µs.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{HermitianOperator3, StateVector3};

/// Number of points of the composite Simpson rule used for the pulse area.
pub const PULSE_AREA_POINTS: usize = 2001;

/// Gaussian pump/Stokes protocol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StirapParams {
    /// Peak Rabi frequency Ω₀ (rad/µs).
    pub omega0: f64,
    /// Protocol duration (µs).
    pub t_f: f64,
    /// Half the separation between the pulse peaks (µs).
    pub t0: f64,
    /// Pulse width (µs).
    pub sigma: f64,
    /// One-photon detuning Δ (rad/µs).
    pub delta_p: f64,
    /// Two-photon detuning δ (rad/µs). Zero for STIRAP proper.
    pub delta_2: f64,
}

impl Default for StirapParams {
    /// Ω₀ = 2π×3 rad/µs, t_f = 10 µs, t0 = t_f/10, σ = t_f/6, on resonance.
    fn default() -> Self {
        let t_f = 10.0;
        Self {
            omega0: 2.0 * PI * 3.0,
            t_f,
            t0: t_f / 10.0,
            sigma: t_f / 6.0,
            delta_p: 0.0,
            delta_2: 0.0,
        }
    }
}

impl StirapParams {
    /// Two-photon resonant protocol (δ = 0).
    pub fn new(omega0: f64, t_f: f64, t0: f64, sigma: f64, delta_p: f64) -> Result<Self> {
        let p = Self {
            omega0,
            t_f,
            t0,
            sigma,
            delta_p,
            delta_2: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    /// General constructor with a two-photon detuning; only meant for error scans.
    pub fn with_two_photon_detuning(self, delta_2: f64) -> Result<Self> {
        let p = Self { delta_2, ..self };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega0.is_finite() && self.omega0 > 0.0) {
            return Err(invalid("omega0", "must be > 0"));
        }
        if !(self.t_f.is_finite() && self.t_f > 0.0) {
            return Err(invalid("t_f", "must be > 0"));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(invalid("sigma", "must be > 0"));
        }
        if !(self.t0 > 0.0 && self.t0 < self.t_f / 2.0) {
            return Err(invalid("t0", "must satisfy 0 < t0 < t_f/2"));
        }
        if !(self.delta_p.is_finite() && self.delta_2.is_finite()) {
            return Err(invalid("delta", "detunings must be finite"));
        }
        Ok(())
    }

    /// Same pulse shapes on a new duration: `t0/t_f` and `σ/t_f` are kept.
    pub fn time_scaled(&self, t_f: f64) -> Result<Self> {
        let k = t_f / self.t_f;
        let p = Self {
            t_f,
            t0: self.t0 * k,
            sigma: self.sigma * k,
            ..*self
        };
        p.validate()?;
        Ok(p)
    }

    fn gaussian(&self, t: f64, centre: f64) -> f64 {
        let x = (t - centre) / self.sigma;
        self.omega0 * (-x * x).exp()
    }

    pub fn pump_centre(&self) -> f64 {
        self.t_f / 2.0 + self.t0
    }

    pub fn stokes_centre(&self) -> f64 {
        self.t_f / 2.0 - self.t0
    }

    /// Pump Rabi frequency Ωp(t).
    pub fn pump_pulse(&self, t: f64) -> f64 {
        self.gaussian(t, self.pump_centre())
    }

    /// Stokes Rabi frequency Ωs(t); precedes the pump.
    pub fn stokes_pulse(&self, t: f64) -> f64 {
        self.gaussian(t, self.stokes_centre())
    }

    /// Time-integrated total Rabi frequency over `[0, t_f]`, composite Simpson
    /// on [`PULSE_AREA_POINTS`] uniform nodes.
    pub fn pulse_area(&self) -> f64 {
        simpson(|t| self.rabi(t), 0.0, self.t_f, PULSE_AREA_POINTS - 1)
    }

    /// Local ratio `Ω/|θ̇|` minimised over `grid` together with the pulse area.
    /// Points where `θ̇ = 0` count as `+∞`.
    pub fn adiabaticity_report(&self, grid: &[f64]) -> Result<AdiabaticityReport> {
        adiabaticity_report(self, grid, self.pulse_area())
    }
}

/// A pair of pump/Stokes envelopes plus static detunings.
///
/// The mixing angles, eigensystem and the transitionless correction are all
/// expressed through this trait, so they apply to any pulse shape.
pub trait Drive {
    fn pump(&self, t: f64) -> f64;
    fn stokes(&self, t: f64) -> f64;
    /// Time derivative of [`Drive::pump`].
    fn pump_rate(&self, t: f64) -> f64;
    /// Time derivative of [`Drive::stokes`].
    fn stokes_rate(&self, t: f64) -> f64;

    fn one_photon_detuning(&self) -> f64 {
        0.0
    }

    fn two_photon_detuning(&self) -> f64 {
        0.0
    }

    /// Total Rabi frequency `Ω = √(Ωp² + Ωs²)`.
    fn rabi(&self, t: f64) -> f64 {
        self.pump(t).hypot(self.stokes(t))
    }

    /// `½·[[0, Ωp, 0], [Ωp, 2Δ, Ωs], [0, Ωs, 2δ]]`.
    fn hamiltonian(&self, t: f64) -> HermitianOperator3 {
        let half = |x: f64| Complex64::new(0.5 * x, 0.0);
        HermitianOperator3::from_upper(
            [0.0, self.one_photon_detuning(), self.two_photon_detuning()],
            half(self.pump(t)),
            Complex64::new(0.0, 0.0),
            half(self.stokes(t)),
        )
    }

    /// `θ = atan2(Ωp, Ωs)`. Returns 0 where both pulses vanish.
    fn theta(&self, t: f64) -> f64 {
        self.pump(t).atan2(self.stokes(t))
    }

    fn mixing_angles(&self, t: f64) -> Result<MixingAngles> {
        let omega = self.rabi(t);
        if omega == 0.0 {
            return Err(Error::Degenerate { t });
        }
        Ok(MixingAngles {
            theta: self.theta(t),
            phi: 0.5 * omega.atan2(self.one_photon_detuning()),
        })
    }

    /// `θ̇ = (Ω̇p·Ωs − Ωp·Ω̇s)/Ω²`, zero where Ω vanishes.
    fn theta_dot(&self, t: f64) -> f64 {
        let (p, s) = (self.pump(t), self.stokes(t));
        let omega_sq = p * p + s * s;
        if omega_sq == 0.0 {
            return 0.0;
        }
        (self.pump_rate(t) * s - p * self.stokes_rate(t)) / omega_sq
    }

    /// Closed-form eigenpairs of the two-photon resonant Hamiltonian.
    fn eigensystem(&self, t: f64) -> Result<Eigensystem> {
        if self.two_photon_detuning() != 0.0 {
            return Err(Error::Unsupported(
                "closed-form eigensystem requires two-photon resonance".into(),
            ));
        }
        let omega = self.rabi(t);
        let MixingAngles { theta, phi } = self.mixing_angles(t)?;
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        let state = |c: [f64; 3]| StateVector3::from_real(c);
        Ok(Eigensystem {
            energies: [0.0, 0.5 * omega * cp / sp, -0.5 * omega * sp / cp],
            states: [
                state([ct, 0.0, -st])?,
                state([st * sp, cp, ct * sp])?,
                state([st * cp, -sp, ct * cp])?,
            ],
        })
    }

    /// Populations of the dark state: `(cos²θ, 0, sin²θ)`.
    fn dark_state_populations(&self, t: f64) -> [f64; 3] {
        let (s, c) = self.theta(t).sin_cos();
        [c * c, 0.0, s * s]
    }

    /// Dark state `cos θ|1⟩ − sin θ|3⟩`.
    fn dark_state(&self, t: f64) -> StateVector3 {
        dark_state_at(self.theta(t))
    }
}

pub(crate) fn dark_state_at(theta: f64) -> StateVector3 {
    let (s, c) = theta.sin_cos();
    // cos² + sin² = 1 up to rounding
    StateVector3::from_real([c, 0.0, -s]).expect("unit vector")
}

impl Drive for StirapParams {
    fn pump(&self, t: f64) -> f64 {
        self.pump_pulse(t)
    }

    fn stokes(&self, t: f64) -> f64 {
        self.stokes_pulse(t)
    }

    fn pump_rate(&self, t: f64) -> f64 {
        -2.0 * (t - self.pump_centre()) / (self.sigma * self.sigma) * self.pump_pulse(t)
    }

    fn stokes_rate(&self, t: f64) -> f64 {
        -2.0 * (t - self.stokes_centre()) / (self.sigma * self.sigma) * self.stokes_pulse(t)
    }

    fn one_photon_detuning(&self) -> f64 {
        self.delta_p
    }

    fn two_photon_detuning(&self) -> f64 {
        self.delta_2
    }
}

/// Time-independent pump and Stokes amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantDrive {
    pub omega_p: f64,
    pub omega_s: f64,
    pub delta_p: f64,
}

impl Drive for ConstantDrive {
    fn pump(&self, _t: f64) -> f64 {
        self.omega_p
    }

    fn stokes(&self, _t: f64) -> f64 {
        self.omega_s
    }

    fn pump_rate(&self, _t: f64) -> f64 {
        0.0
    }

    fn stokes_rate(&self, _t: f64) -> f64 {
        0.0
    }

    fn one_photon_detuning(&self) -> f64 {
        self.delta_p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixingAngles {
    pub theta: f64,
    pub phi: f64,
}

/// Eigenpairs ordered as (dark, +, −).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigensystem {
    pub energies: [f64; 3],
    pub states: [StateVector3; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdiabaticityReport {
    /// `min Ω/|θ̇|` over the grid; `+∞` when θ̇ vanishes everywhere.
    pub min_local_ratio: f64,
    /// Where the minimum is attained (NaN if never finite).
    pub argmin: f64,
    /// `Θ = ∫₀^{t_f} Ω dt`.
    pub pulse_area: f64,
}

impl AdiabaticityReport {
    /// Global condition `Θ ≫ π/2`, read as `Θ ≥ 10·π/2`.
    pub fn global_ok(&self) -> bool {
        self.pulse_area >= 10.0 * PI / 2.0
    }
}

pub fn adiabaticity_report<D: Drive + ?Sized>(
    drive: &D,
    grid: &[f64],
    pulse_area: f64,
) -> Result<AdiabaticityReport> {
    if grid.is_empty() {
        return Err(Error::Grid("empty grid".into()));
    }
    let mut min_local_ratio = f64::INFINITY;
    let mut argmin = f64::NAN;
    for &t in grid {
        let rate = drive.theta_dot(t).abs();
        if rate == 0.0 {
            continue;
        }
        let r = drive.rabi(t) / rate;
        if r < min_local_ratio {
            min_local_ratio = r;
            argmin = t;
        }
    }
    Ok(AdiabaticityReport {
        min_local_ratio,
        argmin,
        pulse_area,
    })
}

/// θ sampled on a grid, continuing the previous value across points where
/// both pulses vanish. The flag reports whether that happened.
pub fn theta_series<D: Drive + ?Sized>(drive: &D, grid: &[f64]) -> (Vec<f64>, bool) {
    let mut degenerate = false;
    let mut prev = 0.0;
    let thetas = grid
        .iter()
        .map(|&t| {
            if drive.rabi(t) == 0.0 {
                degenerate = true;
            } else {
                prev = drive.theta(t);
            }
            prev
        })
        .collect();
    (thetas, degenerate)
}

pub(crate) fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let n = if intervals.is_multiple_of(2) {
        intervals
    } else {
        intervals + 1
    };
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

pub fn uniform_grid(t_end: f64, intervals: usize) -> Vec<f64> {
    (0..=intervals)
        .map(|i| i as f64 * t_end / intervals as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::Matrix3;
    use proptest::prelude::*;

    fn standard() -> StirapParams {
        StirapParams::default()
    }

    #[test]
    fn default_parameter_set() {
        let p = standard();
        assert_eq!(p.omega0, 2.0 * PI * 3.0);
        assert_eq!((p.t_f, p.t0, p.delta_p, p.delta_2), (10.0, 1.0, 0.0, 0.0));
        assert_abs_diff_eq!(p.sigma, 10.0 / 6.0, epsilon = 1e-15);
        assert!(p.validate().is_ok());
    }

    #[test]
    fn constructor_rejects_bad_values() {
        assert!(StirapParams::new(-1.0, 10.0, 1.0, 1.0, 0.0).is_err());
        assert!(StirapParams::new(1.0, 10.0, 0.0, 1.0, 0.0).is_err());
        assert!(StirapParams::new(1.0, 10.0, 5.0, 1.0, 0.0).is_err());
        assert!(StirapParams::new(1.0, 10.0, 1.0, 0.0, 0.0).is_err());
        let p = StirapParams::new(1.0, 10.0, 1.0, 1.0, 0.3).unwrap();
        assert_eq!(p.delta_2, 0.0);
        assert_eq!(p.with_two_photon_detuning(0.2).unwrap().delta_2, 0.2);
    }

    #[test]
    fn pulse_values() {
        let p = standard();
        let w0 = p.omega0;
        assert_abs_diff_eq!(p.pump_pulse(6.0), w0, epsilon = 1e-14);
        assert_abs_diff_eq!(p.stokes_pulse(4.0), w0, epsilon = 1e-14);
        assert_abs_diff_eq!(p.pump_pulse(5.0), w0 * (-0.36f64).exp(), epsilon = 1e-13);
        // 30-digit reference value of Ω₀·e^{−0.36}
        assert_abs_diff_eq!(p.pump_pulse(5.0), 13.150_888_923_409_61, epsilon = 1e-12);
        assert_eq!(p.pump_pulse(5.0), p.stokes_pulse(5.0));
        assert_abs_diff_eq!(
            p.pump_pulse(0.0) / w0,
            2.352_575_200_009_773e-6,
            epsilon = 1e-18
        );
        assert_abs_diff_eq!(
            p.stokes_pulse(10.0) / w0,
            2.352_575_200_009_773e-6,
            epsilon = 1e-18
        );
    }

    #[test]
    fn counterintuitive_ordering() {
        let p = standard();
        assert!(p.stokes_centre() < p.pump_centre());
        assert!(p.stokes_pulse(2.0) > p.pump_pulse(2.0));
        assert!(p.stokes_pulse(8.0) < p.pump_pulse(8.0));
    }

    #[test]
    fn rates_match_finite_differences() {
        let p = standard();
        let h = 1e-5;
        for i in 0..=20 {
            let t = i as f64 * 0.5;
            let fd_p = (p.pump(t + h) - p.pump(t - h)) / (2.0 * h);
            let fd_s = (p.stokes(t + h) - p.stokes(t - h)) / (2.0 * h);
            assert_abs_diff_eq!(p.pump_rate(t), fd_p, epsilon = 1e-6);
            assert_abs_diff_eq!(p.stokes_rate(t), fd_s, epsilon = 1e-6);
            let fd_theta = (p.theta(t + h) - p.theta(t - h)) / (2.0 * h);
            assert_abs_diff_eq!(p.theta_dot(t), fd_theta, epsilon = 1e-7);
        }
    }

    #[test]
    fn hamiltonian_examples() {
        let p = standard();
        let h = p.hamiltonian(5.0);
        let half = 0.5 * p.omega0 * (-0.36f64).exp();
        assert_abs_diff_eq!(h.entry(0, 1).re, half, epsilon = 1e-13);
        assert_abs_diff_eq!(h.entry(1, 2).re, half, epsilon = 1e-13);
        for k in 0..3 {
            assert_eq!(h.entry(k, k), Complex64::new(0.0, 0.0));
        }

        let off = ConstantDrive {
            omega_p: 0.0,
            omega_s: 0.0,
            delta_p: 0.0,
        };
        assert_eq!(off.hamiltonian(1.0), HermitianOperator3::zero());

        let detuned = StirapParams {
            delta_p: 1.0,
            ..standard()
        };
        assert_eq!(
            detuned.hamiltonian(3.7).entry(1, 1),
            Complex64::new(1.0, 0.0)
        );

        let m = *p.hamiltonian(2.3).matrix();
        assert!(HermitianOperator3::new(m).is_ok());
    }

    #[test]
    fn mixing_angle_examples() {
        let p = standard();
        let a = p.mixing_angles(5.0).unwrap();
        assert_abs_diff_eq!(a.theta, PI / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a.phi, PI / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.mixing_angles(2.0).unwrap().phi, PI / 4.0, epsilon = 1e-15);
        // atan(e^{−7.2}), 30-digit reference
        assert_abs_diff_eq!(p.theta(0.0), 7.465_856_696_634_793e-4, epsilon = 1e-17);
        assert_abs_diff_eq!(p.theta(2.0), 1.329_909_943_392_786_9e-2, epsilon = 1e-16);

        let off = ConstantDrive {
            omega_p: 0.0,
            omega_s: 0.0,
            delta_p: 0.0,
        };
        assert!(matches!(
            off.mixing_angles(0.0),
            Err(Error::Degenerate { .. })
        ));
    }

    #[test]
    fn boundary_angles_near_zero_and_right_angle() {
        let p = standard();
        assert!(p.theta(0.0) <= 1e-3);
        assert!(PI / 2.0 - p.theta(p.t_f) <= 1e-3);
    }

    #[test]
    fn theta_series_continues_through_degenerate_points() {
        let d = ConstantDrive {
            omega_p: 0.0,
            omega_s: 0.0,
            delta_p: 0.0,
        };
        let (th, flag) = theta_series(&d, &[0.0, 1.0]);
        assert!(flag);
        assert_eq!(th, vec![0.0, 0.0]);
        let (_, flag) = theta_series(&standard(), &uniform_grid(10.0, 100));
        assert!(!flag);
    }

    #[test]
    fn resonant_eigenvalues_are_plus_minus_half_rabi() {
        let p = standard();
        for &t in &[1.0, 3.3, 5.0, 8.9] {
            let e = p.eigensystem(t).unwrap();
            let w = p.rabi(t);
            assert_eq!(e.energies[0], 0.0);
            assert_abs_diff_eq!(e.energies[1], 0.5 * w, epsilon = 1e-12 * w);
            assert_abs_diff_eq!(e.energies[2], -0.5 * w, epsilon = 1e-12 * w);
        }
        let e = p.eigensystem(5.0).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(e.states[0].amplitude(1).re, s, epsilon = 1e-15);
        assert_abs_diff_eq!(e.states[0].amplitude(2).norm(), 0.0);
        assert_abs_diff_eq!(e.states[0].amplitude(3).re, -s, epsilon = 1e-15);
    }

    fn assert_eigenpairs(d: &impl Drive, t: f64) {
        let h = d.hamiltonian(t);
        let e = d.eigensystem(t).unwrap();
        let scale = h.max_norm();
        for (energy, state) in e.energies.iter().zip(e.states.iter()) {
            let residual = h.apply(state) - state.amplitudes() * Complex64::new(*energy, 0.0);
            let r = residual.iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(r <= 1e-12 * scale, "t={t} residual {r}");
        }
        // Independent numerical eigensolver oracle.
        let (values, vectors) = h.eigen();
        let mut numeric: Vec<(f64, usize)> = values.iter().copied().zip(0..3).collect();
        numeric.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut closed: Vec<(f64, usize)> = e.energies.iter().copied().zip(0..3).collect();
        closed.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for ((en, jn), (ec, jc)) in numeric.iter().zip(closed.iter()) {
            assert!((en - ec).abs() <= 1e-10, "eigenvalue {en} vs {ec}");
            let v: nalgebra::Vector3<Complex64> = vectors.column(*jn).into();
            let overlap = e.states[*jc].amplitudes().dotc(&v).norm();
            assert!((overlap - 1.0).abs() <= 1e-10, "overlap {overlap}");
        }
    }

    #[test]
    fn closed_form_matches_numerical_eigensolver() {
        assert_eigenpairs(&standard(), 2.0);
        assert_eigenpairs(
            &StirapParams {
                delta_p: 7.0,
                ..standard()
            },
            4.2,
        );
        assert_eigenpairs(
            &StirapParams {
                delta_p: -3.0,
                ..standard()
            },
            6.1,
        );
    }

    #[test]
    fn eigensystem_rejects_two_photon_detuning() {
        let p = standard().with_two_photon_detuning(1.0).unwrap();
        assert!(matches!(p.eigensystem(5.0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn dark_state_population_examples() {
        let p = standard();
        let [p1, p2, p3] = p.dark_state_populations(5.0);
        assert_abs_diff_eq!(p1, 0.5, epsilon = 1e-15);
        assert_eq!(p2, 0.0);
        assert_abs_diff_eq!(p3, 0.5, epsilon = 1e-15);
        let start = p.dark_state_populations(0.0);
        assert!(start[0] > 1.0 - 1e-6 && start[2] < 1e-6);
        let end = p.dark_state_populations(10.0);
        assert!(end[2] > 1.0 - 1e-6 && end[0] < 1e-6);
    }

    #[test]
    fn adiabaticity_of_default_protocol() {
        let p = standard();
        let rep = p.adiabaticity_report(&uniform_grid(10.0, 2000)).unwrap();
        // 30-digit adaptive quadrature of √(Ωp²+Ωs²) over [0, 10]
        assert_abs_diff_eq!(rep.pulse_area, 94.188_710_428_233_19, epsilon = 1e-8);
        assert!(rep.global_ok());
        // exact θ' evaluated with 30-digit arithmetic on the same grid
        assert_abs_diff_eq!(rep.min_local_ratio, 25.830_785_378_816_64, epsilon = 1e-9);
        assert_abs_diff_eq!(rep.argmin, 5.0, epsilon = 1e-12);
        assert!(rep.min_local_ratio > 10.0);
    }

    #[test]
    fn static_pulses_report_infinite_ratio() {
        let d = ConstantDrive {
            omega_p: 2.0,
            omega_s: 2.0,
            delta_p: 0.0,
        };
        assert_eq!(d.theta_dot(0.3), 0.0);
        let rep = adiabaticity_report(&d, &[0.0, 0.5, 1.0], 4.0).unwrap();
        assert_eq!(rep.min_local_ratio, f64::INFINITY);
        assert!(adiabaticity_report(&d, &[], 0.0).is_err());
    }

    #[test]
    fn time_scaling_keeps_ratios() {
        let q = standard().time_scaled(1.0).unwrap();
        assert_abs_diff_eq!(q.t0, 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(q.sigma, 1.0 / 6.0, epsilon = 1e-15);
        assert_eq!(q.omega0, standard().omega0);
    }

    proptest! {
        #[test]
        fn hamiltonian_always_hermitian(t in -5.0f64..15.0, delta in -50.0f64..50.0) {
            let p = StirapParams { delta_p: delta, ..standard() };
            let m: Matrix3<Complex64> = *p.hamiltonian(t).matrix();
            prop_assert!(HermitianOperator3::new(m).is_ok());
        }

        #[test]
        fn dark_populations_sum_to_one(t in 0.0f64..10.0) {
            let [a, b, c] = standard().dark_state_populations(t);
            prop_assert_eq!(b, 0.0);
            prop_assert!((a + b + c - 1.0).abs() < 1e-15);
        }

        #[test]
        fn eigensystem_agrees_with_oracle(t in 0.5f64..9.5, delta in -30.0f64..30.0) {
            assert_eigenpairs(&StirapParams { delta_p: delta, ..standard() }, t);
        }
    }
}
