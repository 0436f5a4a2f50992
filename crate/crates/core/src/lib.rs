//! Maximal qubit violation of n-local inequalities in quantum networks.
//!
//! Two network shapes are supported:
//!
//! - **chain**: `n` independent two-qubit sources joined by `n - 1` middle
//!   parties performing the coarse-grained Bell-state measurement
//!   (`σz⊗σz`, `σx⊗σx`), with dichotomic end parties.
//! - **star**: `n` sources shared between `n` peripheral parties and a
//!   central node measuring in the generalized GHZ basis.
//!
//! [`closedform`] holds the analytic maxima as functions of the correlation
//! spectra of the sources. [`oracle`] assembles the full network density
//! matrix, evaluates the inequalities by exact traces and maximizes them over
//! measurement settings, so every closed form can be checked independently.

pub mod cli;
pub mod closedform;
pub mod error;
pub mod matkernel;
pub mod netmodel;
pub mod oracle;
pub mod qstate;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
