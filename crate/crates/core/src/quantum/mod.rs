//! Small-dimension linear algebra for one and two qubits: kets, density
//! matrices, gates, projective measurements, the Born rule, Lüders updates
//! and the Mach–Zehnder toolkit.
//!
//! Everything is generic over [`Scalar`], so the same code runs exactly in
//! ℚ(i, √2) ([`ExactComplex`](crate::field::ExactComplex)) or in `Complex64`
//! when an arbitrary phase angle is involved.

mod ket;
mod mz;
mod operator;
mod scalar;
mod state;

use thiserror::Error;

pub use ket::{tensor, Ket, PmState};
pub use mz::{
    detection_probabilities, mz_evolve, mz_evolve_with_phase, mz_gate_sequence, MzSource,
};
pub use operator::Operator;
pub use scalar::{RealValue, Scalar, FLOAT_TOLERANCE};
pub use state::{
    apply_lueders, born_probability, lueders_unnormalized, DensityMatrix, LuedersUpdate,
    ProjectiveMeasurement, UnitaryGate,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuantumError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("zero-dimensional object")]
    EmptyDimension,
    #[error("ket is not normalized (squared norm {0})")]
    NotNormalized(String),
    #[error("operator is not Hermitian")]
    NotHermitian,
    #[error("density matrix trace is {0}, expected 1")]
    BadTrace(String),
    #[error("operator is not positive semidefinite")]
    NotPositive,
    #[error("operator is not unitary")]
    NotUnitary,
    #[error("measurement has no effects")]
    EmptyMeasurement,
    #[error("effect `{0}` is not positive semidefinite")]
    EffectNotPositive(String),
    #[error("measurement effects do not sum to the identity")]
    IncompleteMeasurement,
    #[error("duplicate outcome label `{0}`")]
    DuplicateOutcome(String),
    #[error("unknown outcome label `{0}`")]
    UnknownOutcome(String),
    #[error("outcome has probability zero")]
    ImpossibleOutcome,
}
