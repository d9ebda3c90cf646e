use std::fmt;

use serde::{Deserialize, Serialize};

use super::scalar::{RealValue, Scalar};
use super::QuantumError;

/// A normalized pure state.
#[derive(Clone, PartialEq)]
pub struct Ket<S> {
    amplitudes: Vec<S>,
}

impl<S: Scalar> Ket<S> {
    /// Builds a ket, rejecting anything whose squared norm is not 1.
    pub fn new(amplitudes: Vec<S>) -> Result<Self, QuantumError> {
        if amplitudes.is_empty() {
            return Err(QuantumError::EmptyDimension);
        }
        let ket = Self { amplitudes };
        let norm = ket.norm_sqr();
        if !norm.approx_eq(&S::Real::one()) {
            return Err(QuantumError::NotNormalized(norm.to_string()));
        }
        Ok(ket)
    }

    /// Builds a ket without checking normalization. Only for values that are
    /// normalized by construction (unitary images, tensor products).
    pub(crate) fn from_unchecked(amplitudes: Vec<S>) -> Self {
        Self { amplitudes }
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self, QuantumError> {
        if index >= dim {
            return Err(QuantumError::DimensionMismatch { expected: dim, found: index + 1 });
        }
        let mut amplitudes = vec![S::zero(); dim];
        amplitudes[index] = S::one();
        Ok(Self { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[S] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> S::Real {
        self.amplitudes
            .iter()
            .fold(S::Real::zero(), |acc, a| acc + a.norm_sqr())
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &Self) -> Result<S, QuantumError> {
        if self.dim() != other.dim() {
            return Err(QuantumError::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(S::zero(), |acc, (a, b)| acc + a.conj() * b.clone()))
    }

    /// |⟨self|other⟩|²
    pub fn overlap(&self, other: &Self) -> Result<S::Real, QuantumError> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Kets are equal as rays when |⟨a|b⟩| = 1.
    pub fn equals_up_to_phase(&self, other: &Self) -> bool {
        self.overlap(other)
            .map(|o| o.approx_eq(&S::Real::one()))
            .unwrap_or(false)
    }

    /// Multiplies by a unit-modulus factor.
    pub fn with_global_phase(&self, phase: &S) -> Result<Self, QuantumError> {
        Self::new(self.amplitudes.iter().map(|a| a.clone() * phase.clone()).collect())
    }

    /// Equal superposition (1/√2)(|self⟩ + phase·|other⟩) of two orthogonal kets.
    pub fn superpose(&self, phase: &S, other: &Self) -> Result<Self, QuantumError> {
        if self.dim() != other.dim() {
            return Err(QuantumError::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        let h = S::frac_1_sqrt2();
        Self::new(
            self.amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(a, b)| h.clone() * (a.clone() + phase.clone() * b.clone()))
                .collect(),
        )
    }
}

impl<S: Scalar> fmt::Debug for Ket<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.amplitudes.iter().map(|a| a.to_string()))
            .finish()
    }
}

/// Kronecker product |a⟩ ⊗ |b⟩.
pub fn tensor<S: Scalar>(a: &Ket<S>, b: &Ket<S>) -> Ket<S> {
    let mut amplitudes = Vec::with_capacity(a.dim() * b.dim());
    for x in a.amplitudes() {
        for y in b.amplitudes() {
            amplitudes.push(x.clone() * y.clone());
        }
    }
    // product of two unit vectors is a unit vector
    Ket::from_unchecked(amplitudes)
}

/// The six single-qubit states the toy theory mirrors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PmState {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
    #[serde(rename = "+i")]
    PlusI,
    #[serde(rename = "-i")]
    MinusI,
}

impl PmState {
    pub const ALL: [PmState; 6] = [
        PmState::Zero,
        PmState::One,
        PmState::Plus,
        PmState::Minus,
        PmState::PlusI,
        PmState::MinusI,
    ];

    pub fn label(self) -> &'static str {
        match self {
            PmState::Zero => "0",
            PmState::One => "1",
            PmState::Plus => "+",
            PmState::Minus => "-",
            PmState::PlusI => "+i",
            PmState::MinusI => "-i",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.label() == label)
    }

    /// The orthogonal partner on the Bloch sphere.
    pub fn antipode(self) -> Self {
        match self {
            PmState::Zero => PmState::One,
            PmState::One => PmState::Zero,
            PmState::Plus => PmState::Minus,
            PmState::Minus => PmState::Plus,
            PmState::PlusI => PmState::MinusI,
            PmState::MinusI => PmState::PlusI,
        }
    }

    pub fn ket<S: Scalar>(self) -> Ket<S> {
        let h = S::frac_1_sqrt2();
        let amps = match self {
            PmState::Zero => vec![S::one(), S::zero()],
            PmState::One => vec![S::zero(), S::one()],
            PmState::Plus => vec![h.clone(), h],
            PmState::Minus => vec![h.clone(), -h],
            PmState::PlusI => vec![h.clone(), h * S::i()],
            PmState::MinusI => vec![h.clone(), -(h * S::i())],
        };
        Ket::from_unchecked(amps)
    }

    /// Identifies which of the six states `ket` is, up to global phase.
    pub fn identify<S: Scalar>(ket: &Ket<S>) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.ket::<S>().equals_up_to_phase(ket))
    }
}

impl fmt::Display for PmState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{}⟩", self.label())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{ratio, ExactComplex, QSqrt2};

    type E = ExactComplex;

    #[test]
    fn tensor_examples() {
        let z = PmState::Zero.ket::<E>();
        let zz = tensor(&z, &z);
        assert_eq!(zz.amplitudes(), &[E::from_int(1), E::zero(), E::zero(), E::zero()][..]);

        let zp = tensor(&z, &PmState::Plus.ket::<E>());
        let h = E::frac_1_sqrt2();
        assert_eq!(zp.amplitudes(), &[h.clone(), h, E::zero(), E::zero()][..]);
        assert_eq!(zp.norm_sqr(), QSqrt2::one());
    }

    #[test]
    fn six_states_are_normalized_and_pairwise_half_or_zero() {
        for a in PmState::ALL {
            let ka = a.ket::<E>();
            assert_eq!(ka.norm_sqr(), QSqrt2::one());
            for b in PmState::ALL {
                let o = ka.overlap(&b.ket()).unwrap();
                let expected = if a == b {
                    ratio(1, 1)
                } else if a.antipode() == b {
                    ratio(0, 1)
                } else {
                    ratio(1, 2)
                };
                assert_eq!(o, QSqrt2::from_rational(expected), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn rejects_unnormalized() {
        assert!(Ket::new(vec![E::from_int(1), E::from_int(1)]).is_err());
        assert!(Ket::<E>::new(vec![]).is_err());
    }

    #[test]
    fn identify_up_to_phase() {
        let k = PmState::MinusI.ket::<E>().with_global_phase(&E::unit_eighth(3)).unwrap();
        assert_eq!(PmState::identify(&k), Some(PmState::MinusI));
    }
}
