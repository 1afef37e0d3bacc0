//! Three-level STIRAP under time rescaling.
//!
//! A reference Hamiltonian `H(t)` on `[0, t_f]` is compressed into
//! `𝓗(t) = H[f(t)]·ḟ(t)` on `[0, t_f/a]` with
//! `f(t) = a·t − (a−1)/(2πa)·t_f·sin(2πa·t/t_f)`. The state follows the same
//! route `ψ̃(t) = ψ(f(t))`, so the fast protocol inherits the transfer
//! fidelity and the error resilience of the slow one.
//!
//! Units: ħ = 1, time in µs, angular frequency in rad/µs.

pub mod baselines;
pub mod config;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod output;
pub mod propagate;
pub mod rescale;
pub mod stirap;
pub mod transform;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{HermitianOperator3, StateVector3};
pub use propagate::Trajectory;
pub use rescale::RescaleParams;
pub use stirap::{Drive, StirapParams};
pub use transform::{tr_hamiltonian, TimeDependentHamiltonian};
