//! Exact state-vector simulation of a string of three-level ions sharing a
//! quantized center-of-mass phonon mode.
//!
//! Two backends live here:
//!
//! - [`StateVector`]: the full pulse-level register. Each ion carries the
//!   levels `|0⟩`, `|1⟩` and an auxiliary level `|aux⟩`; the shared phonon
//!   bus is truncated to a configurable number of Fock states. The three
//!   laser operations ([`StateVector::apply_v_pulse`],
//!   [`StateVector::apply_u_pulse`], [`StateVector::apply_uaux_pulse`]) are
//!   applied as exact two-level block rotations of the sideband ladder, so
//!   unitarity holds to rounding error.
//! - [`QubitState`]: a plain qubit register (no aux level, no phonon) for
//!   fast gate-level execution.
//!
//! Basis index convention, used by every serialized state and test in this
//! crate: the ion levels form a base-3 word with ion 0 the most significant
//! digit, and the global index is `word * phonon_dim + fock`.

mod qubit;
mod shape;
mod state;

pub use qubit::{gates, QubitState};
pub use shape::{IonLevel, RegisterShape, DEFAULT_MAX_AMPLITUDES};
pub use state::{Measurement, Pulse, PulseKind, Snapshot, StateVector, DEFAULT_LEAK_TOLERANCE};

use thiserror::Error;

/// Errors raised by the state-vector and qubit backends.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("register dimension {requested} exceeds the configured maximum of {max} amplitudes")]
    DimensionOverflow { requested: u128, max: usize },
    #[error("invalid register shape: {0}")]
    InvalidShape(String),
    #[error("ion index {ion} out of range for {num_ions} ions")]
    IonIndexOutOfRange { ion: usize, num_ions: usize },
    #[error(
        "sideband pulse would push {leaked:.3e} of probability past the phonon cutoff \
         (tolerance {tolerance:.0e}); increase phonon_dim"
    )]
    TruncationLeakage { leaked: f64, tolerance: f64 },
    #[error("state shapes do not match")]
    ShapeMismatch,
    #[error("pulse angle is not finite")]
    NonFiniteAngle,
    #[error("pulse area must be non-negative, got {0}")]
    NegativePulseArea(f64),
    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NonUnitaryMatrix { deviation: f64 },
    #[error("bad gate targets: {0}")]
    BadTargets(String),
    #[error("amplitude vector has wrong length or norm (norm deviation {0:.3e})")]
    NotNormalized(f64),
}
