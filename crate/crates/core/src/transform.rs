//! Time-rescaled Hamiltonians, `𝓗(t) = H[f(t)]·ḟ(t)`.

use crate::error::{invalid, Error, Result};
use crate::linalg::{commutator_norm, HermitianOperator3};
use crate::rescale::RescaleParams;
use crate::stirap::StirapParams;

/// A Hamiltonian defined on `[0, duration]`.
pub trait TimeDependentHamiltonian {
    fn duration(&self) -> f64;

    /// Value at time `t`. Implementations return [`Error::Domain`] outside
    /// their window when it matters.
    fn at(&self, t: f64) -> Result<HermitianOperator3>;
}

impl<H: TimeDependentHamiltonian + ?Sized> TimeDependentHamiltonian for &H {
    fn duration(&self) -> f64 {
        (**self).duration()
    }

    fn at(&self, t: f64) -> Result<HermitianOperator3> {
        (**self).at(t)
    }
}

impl<H: TimeDependentHamiltonian + ?Sized> TimeDependentHamiltonian for Box<H> {
    fn duration(&self) -> f64 {
        (**self).duration()
    }

    fn at(&self, t: f64) -> Result<HermitianOperator3> {
        (**self).at(t)
    }
}

/// The reference STIRAP Hamiltonian on `[0, t_f]`.
impl TimeDependentHamiltonian for StirapParams {
    fn duration(&self) -> f64 {
        self.t_f
    }

    fn at(&self, t: f64) -> Result<HermitianOperator3> {
        Ok(crate::stirap::Drive::hamiltonian(self, t))
    }
}

/// Wraps a closure `t -> H(t)` with a declared duration.
pub struct FnHamiltonian<F> {
    duration: f64,
    f: F,
}

impl<F> FnHamiltonian<F>
where
    F: Fn(f64) -> HermitianOperator3,
{
    pub fn new(duration: f64, f: F) -> Self {
        Self { duration, f }
    }
}

impl<F> TimeDependentHamiltonian for FnHamiltonian<F>
where
    F: Fn(f64) -> HermitianOperator3,
{
    fn duration(&self) -> f64 {
        self.duration
    }

    fn at(&self, t: f64) -> Result<HermitianOperator3> {
        Ok((self.f)(t))
    }
}

/// `𝓗(t) = H[f(t)]·ḟ(t)` on `[0, t_f/a]`.
#[derive(Debug, Clone)]
pub struct TimeRescaled<H> {
    reference: H,
    rescale: RescaleParams,
}

/// Builds the time-rescaled Hamiltonian of `reference`.
///
/// Fails if the reference does not cover `[0, t_f]`.
pub fn tr_hamiltonian<H: TimeDependentHamiltonian>(
    reference: H,
    rescale: RescaleParams,
) -> Result<TimeRescaled<H>> {
    if reference.duration() < rescale.t_f() * (1.0 - 1e-12) {
        return Err(invalid(
            "t_f",
            format!(
                "reference covers [0, {}] but rescaling needs [0, {}]",
                reference.duration(),
                rescale.t_f()
            ),
        ));
    }
    Ok(TimeRescaled { reference, rescale })
}

impl<H> TimeRescaled<H> {
    pub fn rescale(&self) -> &RescaleParams {
        &self.rescale
    }

    pub fn reference(&self) -> &H {
        &self.reference
    }
}

impl<H: TimeDependentHamiltonian> TimeDependentHamiltonian for TimeRescaled<H> {
    fn duration(&self) -> f64 {
        self.rescale.duration()
    }

    fn at(&self, t: f64) -> Result<HermitianOperator3> {
        let s = self.rescale.f(t)?;
        let rate = self.rescale.f_dot(t)?;
        Ok(self.reference.at(s)?.scale(rate))
    }
}

/// Adds a static diagonal offset to every sample of `inner`.
#[derive(Debug, Clone)]
pub struct DiagonalOffset<H> {
    pub inner: H,
    pub offsets: [f64; 3],
}

impl<H: TimeDependentHamiltonian> TimeDependentHamiltonian for DiagonalOffset<H> {
    fn duration(&self) -> f64 {
        self.inner.duration()
    }

    fn at(&self, t: f64) -> Result<HermitianOperator3> {
        Ok(self.inner.at(t)?.shift_diagonal(self.offsets))
    }
}

/// Explicit rescaled controls `(Ω̃p, Ω̃s, Δ̃)` in rad/µs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RescaledControls {
    pub pump: f64,
    pub stokes: f64,
    pub detuning: f64,
}

/// Evaluates the rescaled Gaussian pulses and detuning written out in full,
/// without going through [`tr_hamiltonian`].
pub fn tr_pulses_closed_form(
    p: &StirapParams,
    r: &RescaleParams,
    t: f64,
) -> Result<RescaledControls> {
    let hi = r.duration();
    if !(t >= -1e-12 * hi && t <= hi * (1.0 + 1e-12)) {
        return Err(Error::Domain { t, lo: 0.0, hi });
    }
    let (a, t_f) = (r.a(), r.t_f());
    let phase = 2.0 * std::f64::consts::PI * (a * t / t_f);
    let warped = a * t - (a - 1.0) / (2.0 * std::f64::consts::PI * a) * t_f * phase.sin();
    let bracket = a - (a - 1.0) * phase.cos();
    let gauss = |centre: f64| {
        let x = (warped - centre) / p.sigma;
        p.omega0 * (-x * x).exp()
    };
    Ok(RescaledControls {
        pump: gauss(p.t_f / 2.0 + p.t0) * bracket,
        stokes: gauss(p.t_f / 2.0 - p.t0) * bracket,
        detuning: p.delta_p * bracket,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutatorReport {
    /// `max_γ ‖[H(γt_f), 𝓗(f⁻¹(γt_f))]‖_max`
    pub max_norm: f64,
    /// `max_γ ‖H(γt_f)‖_max`, the scale the commutator is compared against.
    pub max_h_norm: f64,
}

impl CommutatorReport {
    /// `max_norm ≤ rel_tol·max_h_norm²`.
    pub fn within(&self, rel_tol: f64) -> bool {
        self.max_norm <= rel_tol * self.max_h_norm * self.max_h_norm
    }
}

/// Commutator between the reference Hamiltonian at `γ·t_f` and the rescaled
/// Hamiltonian at the time the same point of the route is reached.
pub fn commutator_check<H: TimeDependentHamiltonian>(
    reference: &H,
    rescale: RescaleParams,
    gammas: &[f64],
) -> Result<CommutatorReport> {
    let rescaled = tr_hamiltonian(reference, rescale)?;
    let mut report = CommutatorReport {
        max_norm: 0.0,
        max_h_norm: 0.0,
    };
    for &g in gammas {
        if !(0.0..=1.0).contains(&g) {
            return Err(invalid(
                "gamma",
                format!("route fraction {g} outside [0, 1]"),
            ));
        }
        let s = g * rescale.t_f();
        let h = reference.at(s)?;
        let fast = rescaled.at(rescale.inverse(s)?)?;
        report.max_norm = report.max_norm.max(commutator_norm(&h, &fast));
        report.max_h_norm = report.max_h_norm.max(h.max_norm());
    }
    Ok(report)
}
