//! The sinusoidal time-rescaling function and its admissibility checks.
//!
//! `f(t) = a·t − (a−1)·t_f/(2πa)·sin(2πa·t/t_f)` maps the fast protocol
//! window `[0, t_f/a]` onto the reference window `[0, t_f]`. Its derivative
//! `ḟ(t) = a − (a−1)·cos(2πa·t/t_f)` equals one at both ends, so the
//! rescaled Hamiltonian starts and finishes where the reference does.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Default absolute tolerance (µs) for [`RescaleParams::f_inv`].
pub const DEFAULT_INV_TOL: f64 = 1e-12;

/// Iteration budget for [`RescaleParams::f_inv`].
pub const INV_MAX_ITER: usize = 200;

/// Relative slack on the domain endpoints, absorbing rounding in grids that
/// are built as `i·T/n`.
const DOMAIN_SLACK: f64 = 1e-12;

/// Time-contraction parameter `a` and reference duration `t_f` (µs).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RescaleParams {
    a: f64,
    t_f: f64,
}

impl RescaleParams {
    pub fn new(a: f64, t_f: f64) -> Result<Self> {
        if !(a.is_finite() && a >= 1.0) {
            return Err(invalid("a", format!("a must be ≥ 1 (got {a})")));
        }
        if !(t_f.is_finite() && t_f > 0.0) {
            return Err(invalid("t_f", format!("t_f must be > 0 (got {t_f})")));
        }
        Ok(Self { a, t_f })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn t_f(&self) -> f64 {
        self.t_f
    }

    /// Duration of the rescaled protocol, `t_f/a`.
    pub fn duration(&self) -> f64 {
        self.t_f / self.a
    }

    /// `2π·a·t/t_f`, grouped so that mid-protocol gives exactly π.
    fn phase(&self, t: f64) -> f64 {
        2.0 * PI * (self.a * t / self.t_f)
    }

    fn check_time(&self, t: f64) -> Result<f64> {
        let hi = self.duration();
        let slack = DOMAIN_SLACK * hi;
        if !(t >= -slack && t <= hi + slack) {
            return Err(Error::Domain { t, lo: 0.0, hi });
        }
        Ok(t.clamp(0.0, hi))
    }

    /// Rescaled (reference) time for fast-protocol time `t`.
    pub fn f(&self, t: f64) -> Result<f64> {
        let t = self.check_time(t)?;
        Ok(self.f_unchecked(t))
    }

    /// Derivative `ḟ(t)`, the bracket factor that multiplies every field.
    pub fn f_dot(&self, t: f64) -> Result<f64> {
        let t = self.check_time(t)?;
        Ok(self.f_dot_unchecked(t))
    }

    fn f_unchecked(&self, t: f64) -> f64 {
        let a = self.a;
        a * t - (a - 1.0) / (2.0 * PI * a) * self.t_f * self.phase(t).sin()
    }

    fn f_dot_unchecked(&self, t: f64) -> f64 {
        self.a - (self.a - 1.0) * self.phase(t).cos()
    }

    /// Largest value of `ḟ`, reached at mid-protocol: `2a − 1`.
    pub fn f_dot_max(&self) -> f64 {
        2.0 * self.a - 1.0
    }

    /// Inverse with the default tolerance.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        self.f_inv(y, DEFAULT_INV_TOL)
    }

    /// Solves `f(t) = y` for `t ∈ [0, t_f/a]`.
    ///
    /// Newton steps on the analytic derivative, kept inside a bisection
    /// bracket. Once the step falls below `tol`, one more Newton step polishes
    /// the root to rounding level.
    pub fn f_inv(&self, y: f64, tol: f64) -> Result<f64> {
        if !(tol > 0.0) {
            return Err(invalid("tol", "tolerance must be > 0"));
        }
        let slack = DOMAIN_SLACK * self.t_f;
        if !(y >= -slack && y <= self.t_f + slack) {
            return Err(Error::Domain {
                t: y,
                lo: 0.0,
                hi: self.t_f,
            });
        }
        let y = y.clamp(0.0, self.t_f);
        if y == 0.0 {
            return Ok(0.0);
        }
        if y == self.t_f {
            return Ok(self.duration());
        }

        let (mut lo, mut hi) = (0.0, self.duration());
        let mut t = y / self.a;
        let mut residual = f64::INFINITY;
        for _ in 0..INV_MAX_ITER {
            residual = self.f_unchecked(t) - y;
            if residual == 0.0 {
                return Ok(t);
            }
            if residual > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let newton = t - residual / self.f_dot_unchecked(t);
            let next = if newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            let step = (next - t).abs();
            t = next;
            if step <= tol {
                let polished = t - (self.f_unchecked(t) - y) / self.f_dot_unchecked(t);
                if polished >= lo && polished <= hi {
                    t = polished;
                }
                return Ok(t);
            }
        }
        Err(Error::NoConvergence {
            iterations: INV_MAX_ITER,
            residual: residual.abs(),
        })
    }

    /// Checks properties (i)–(iv) of an admissible rescaling plus strict
    /// monotonicity of `f` on `n_samples` uniform points.
    pub fn validate_properties(&self, n_samples: usize) -> Result<PropertyReport> {
        if n_samples < 2 {
            return Err(invalid("n_samples", "need at least 2 samples"));
        }
        let end = self.inverse(self.t_f)?;
        let start = self.inverse(0.0)?;

        let initial_time = PropertyCheck::new(start.abs(), start.abs() <= PROPERTY_TOL);
        let faster = PropertyCheck::new(self.t_f - end, end < self.t_f);
        let initial_rate = {
            let r = (self.f_dot(0.0)? - 1.0).abs();
            PropertyCheck::new(r, r <= PROPERTY_TOL)
        };
        let final_rate = {
            let r = (self.f_dot(end)? - 1.0).abs();
            PropertyCheck::new(r, r <= PROPERTY_TOL)
        };

        let h = self.duration() / (n_samples - 1) as f64;
        let values: Vec<f64> = (0..n_samples)
            .map(|i| self.f_unchecked(i as f64 * h))
            .collect();
        let min_increment = values
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        let monotone = PropertyCheck::new(min_increment, min_increment > 0.0);

        Ok(PropertyReport {
            initial_time,
            faster,
            initial_rate,
            final_rate,
            monotone,
        })
    }
}

/// Tolerance for the equality properties (i), (iii), (iv).
pub const PROPERTY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PropertyCheck {
    pub residual: f64,
    pub passed: bool,
}

impl PropertyCheck {
    fn new(residual: f64, passed: bool) -> Self {
        Self { residual, passed }
    }
}

/// Outcome of [`RescaleParams::validate_properties`].
///
/// For `faster` the residual is `t_f − f⁻¹(t_f)` (positive when it passes);
/// for `monotone` it is the smallest increment of `f` between samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PropertyReport {
    /// (i) `f⁻¹(0) = 0`
    pub initial_time: PropertyCheck,
    /// (ii) `f⁻¹(t_f) < t_f`
    pub faster: PropertyCheck,
    /// (iii) `ḟ(0) = 1`
    pub initial_rate: PropertyCheck,
    /// (iv) `ḟ(f⁻¹(t_f)) = 1`
    pub final_rate: PropertyCheck,
    pub monotone: PropertyCheck,
}

impl PropertyReport {
    pub fn all_passed(&self) -> bool {
        self.checks().iter().all(|(_, c)| c.passed)
    }

    pub fn checks(&self) -> [(&'static str, PropertyCheck); 5] {
        [
            ("(i) f^-1(0) = 0", self.initial_time),
            ("(ii) f^-1(t_f) < t_f", self.faster),
            ("(iii) fdot(0) = 1", self.initial_rate),
            ("(iv) fdot(f^-1(t_f)) = 1", self.final_rate),
            ("monotone f", self.monotone),
        ]
    }
}
