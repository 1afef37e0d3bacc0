//! Three-level operators and states.
//!
//! Everything is fixed at dimension 3 and stored in `nalgebra` statically
//! sized types, so no heap allocation happens inside the propagation loop.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on `‖M − M†‖_max` accepted by [`HermitianOperator3::new`].
pub const HERMITICITY_TOL: f64 = 1e-14;

/// Tolerance on `|‖ψ‖² − 1|` accepted by [`StateVector3::new`].
pub const NORM_TOL: f64 = 1e-10;

/// A 3×3 complex Hermitian matrix (ħ = 1, entries in rad/µs).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitianOperator3(Matrix3<Complex64>);

impl HermitianOperator3 {
    /// Wraps `m`, rejecting it if it is not Hermitian within [`HERMITICITY_TOL`].
    pub fn new(m: Matrix3<Complex64>) -> Result<Self> {
        let deviation = max_abs(&(m - m.adjoint()));
        if deviation > HERMITICITY_TOL || !deviation.is_finite() {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self(m))
    }

    /// Builds the operator from its real diagonal and upper triangle.
    /// Hermitian by construction.
    pub fn from_upper(diag: [f64; 3], h12: Complex64, h13: Complex64, h23: Complex64) -> Self {
        let z = Complex64::new(0.0, 0.0);
        let mut m = Matrix3::from_element(z);
        for (k, d) in diag.iter().enumerate() {
            m[(k, k)] = Complex64::new(*d, 0.0);
        }
        m[(0, 1)] = h12;
        m[(1, 0)] = h12.conj();
        m[(0, 2)] = h13;
        m[(2, 0)] = h13.conj();
        m[(1, 2)] = h23;
        m[(2, 1)] = h23.conj();
        Self(m)
    }

    pub fn zero() -> Self {
        Self(Matrix3::from_element(Complex64::new(0.0, 0.0)))
    }

    pub fn matrix(&self) -> &Matrix3<Complex64> {
        &self.0
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    /// Multiplies by a real scalar; the result stays Hermitian.
    pub fn scale(&self, s: f64) -> Self {
        Self(self.0 * Complex64::new(s, 0.0))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0 + other.0)
    }

    /// Adds real values to the diagonal.
    pub fn shift_diagonal(&self, offsets: [f64; 3]) -> Self {
        let mut m = self.0;
        for (k, d) in offsets.iter().enumerate() {
            m[(k, k)] += Complex64::new(*d, 0.0);
        }
        Self(m)
    }

    /// Largest absolute entry, `‖M‖_max`.
    pub fn max_norm(&self) -> f64 {
        max_abs(&self.0)
    }

    pub fn apply(&self, psi: &StateVector3) -> Vector3<Complex64> {
        self.0 * psi.0
    }

    /// Real eigenvalues and orthonormal eigenvectors (columns), unsorted.
    pub fn eigen(&self) -> (Vector3<f64>, Matrix3<Complex64>) {
        let eig = self.0.symmetric_eigen();
        (eig.eigenvalues, eig.eigenvectors)
    }

    /// `exp(−i·H·dt)`, computed through the eigendecomposition so the result
    /// is unitary to rounding.
    pub fn propagator(&self, dt: f64) -> Matrix3<Complex64> {
        let (values, vectors) = self.eigen();
        let phases = Matrix3::from_diagonal(&values.map(|e| Complex64::from_polar(1.0, -e * dt)));
        vectors * phases * vectors.adjoint()
    }
}

/// `‖[A, B]‖_max`.
pub fn commutator_norm(a: &HermitianOperator3, b: &HermitianOperator3) -> f64 {
    max_abs(&(a.0 * b.0 - b.0 * a.0))
}

pub(crate) fn max_abs(m: &Matrix3<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// A normalized 3-component amplitude vector over `{|1⟩, |2⟩, |3⟩}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector3(Vector3<Complex64>);

impl StateVector3 {
    /// Wraps `v`, rejecting it if `‖v‖²` differs from one by more than [`NORM_TOL`].
    pub fn new(v: Vector3<Complex64>) -> Result<Self> {
        let norm_sq = v.norm_squared();
        if (norm_sq - 1.0).abs() > NORM_TOL || !norm_sq.is_finite() {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(Self(v))
    }

    /// Rescales `v` to unit norm.
    pub fn normalized(v: Vector3<Complex64>) -> Result<Self> {
        let n = v.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized { norm_sq: n * n });
        }
        Ok(Self(v / Complex64::new(n, 0.0)))
    }

    /// Basis state `|k⟩` for `k ∈ {1, 2, 3}`.
    pub fn basis(k: usize) -> Self {
        assert!((1..=3).contains(&k), "basis index must be 1, 2 or 3");
        let mut v = Vector3::from_element(Complex64::new(0.0, 0.0));
        v[k - 1] = Complex64::new(1.0, 0.0);
        Self(v)
    }

    /// State with real amplitudes, normalized.
    pub fn from_real(c: [f64; 3]) -> Result<Self> {
        Self::normalized(Vector3::new(
            Complex64::new(c[0], 0.0),
            Complex64::new(c[1], 0.0),
            Complex64::new(c[2], 0.0),
        ))
    }

    pub fn amplitudes(&self) -> &Vector3<Complex64> {
        &self.0
    }

    pub fn amplitude(&self, k: usize) -> Complex64 {
        self.0[k - 1]
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.norm_squared()
    }

    pub fn populations(&self) -> [f64; 3] {
        [
            self.0[0].norm_sqr(),
            self.0[1].norm_sqr(),
            self.0[2].norm_sqr(),
        ]
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.0.dotc(&other.0)
    }

    /// Max componentwise distance after removing the relative global phase.
    pub fn gauge_distance(&self, other: &Self) -> f64 {
        let overlap = other.inner(self);
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        (self.0 - other.0 * phase)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Max componentwise distance, phase included.
    pub fn distance(&self, other: &Self) -> f64 {
        (self.0 - other.0)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub(crate) fn evolve(&self, u: &Matrix3<Complex64>) -> Self {
        Self(u * self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample() -> HermitianOperator3 {
        HermitianOperator3::from_upper([0.3, -1.2, 2.0], c(0.5, 0.1), c(0.0, -0.7), c(1.1, 0.4))
    }

    // Truncated Taylor series with scaling and squaring, independent of the
    // eigendecomposition route.
    fn expm_taylor(m: &Matrix3<Complex64>) -> Matrix3<Complex64> {
        let squarings = 8;
        let a = m / Complex64::new(2f64.powi(squarings), 0.0);
        let mut term = Matrix3::identity();
        let mut sum = Matrix3::identity();
        for k in 1..30 {
            term = term * a / Complex64::new(k as f64, 0.0);
            sum += term;
        }
        for _ in 0..squarings {
            sum = sum * sum;
        }
        sum
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = *sample().matrix();
        m[(0, 1)] += c(1e-10, 0.0);
        assert!(matches!(
            HermitianOperator3::new(m),
            Err(Error::NotHermitian { .. })
        ));
        assert!(HermitianOperator3::new(*sample().matrix()).is_ok());
    }

    #[test]
    fn propagator_matches_taylor_series() {
        let h = sample();
        let dt = 0.37;
        let u = h.propagator(dt);
        let reference = expm_taylor(&(h.matrix() * c(0.0, -dt)));
        assert!(max_abs(&(u - reference)) < 1e-13);
        let id: Matrix3<Complex64> = Matrix3::identity();
        assert!(max_abs(&(u.adjoint() * u - id)) < 1e-14);
    }

    #[test]
    fn commutator_of_scalar_multiple_vanishes() {
        let h = sample();
        assert!(commutator_norm(&h, &h.scale(7.5)) < 1e-13);
        let other = HermitianOperator3::from_upper([0.0; 3], c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        assert!(commutator_norm(&h, &other) > 0.1);
    }

    #[test]
    fn state_normalization_checks() {
        let v = Vector3::new(c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        assert!(matches!(
            StateVector3::new(v),
            Err(Error::NotNormalized { .. })
        ));
        let s = StateVector3::normalized(v).unwrap();
        assert!((s.norm_sq() - 1.0).abs() < 1e-15);
        assert!(StateVector3::normalized(Vector3::zeros()).is_err());
    }

    #[test]
    fn gauge_distance_ignores_global_phase() {
        let s = StateVector3::from_real([0.6, 0.0, 0.8]).unwrap();
        let rotated = StateVector3::new(s.amplitudes() * Complex64::from_polar(1.0, 1.3)).unwrap();
        assert!(s.gauge_distance(&rotated) < 1e-15);
        assert!(s.distance(&rotated) > 0.1);
    }
}
