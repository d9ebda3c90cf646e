//! Mach–Zehnder interferometer on a spatial qubit: |↗⟩ = |0⟩, |↘⟩ = |1⟩.
//!
//! The photon passes a 50/50 beam splitter (Hadamard), the mirrors (σ_x), an
//! optional phase shifter acting on the |↗⟩ component after the mirrors, and
//! a second beam splitter. Detector d₁ registers |↗⟩, d₂ registers |↘⟩.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ket::Ket;
use super::scalar::Scalar;
use super::state::UnitaryGate;

/// Where the photon enters the interferometer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MzSource {
    /// Emitted as |↗⟩ towards the first beam splitter.
    FirstSplitter,
    /// Emitted as |↗⟩ directly into the upper arm, skipping the first splitter.
    UpperArm,
}

/// The gates met by a photon entering at the first splitter: Û_H, σ̂_x,
/// optionally Φ̂(π), Û_H.
pub fn mz_gate_sequence<S: Scalar>(phase_in: bool) -> Vec<UnitaryGate<S>> {
    let mut gates = vec![UnitaryGate::hadamard(), UnitaryGate::pauli_x()];
    if phase_in {
        gates.push(UnitaryGate::phase_pi());
    }
    gates.push(UnitaryGate::hadamard());
    gates
}

fn run<S: Scalar>(source: MzSource, phase: Option<UnitaryGate<S>>) -> Ket<S> {
    let h = UnitaryGate::<S>::hadamard();
    let x = UnitaryGate::<S>::pauli_x();
    let mut ket = Ket::basis(2, 0).expect("|↗⟩");
    let step = |g: &UnitaryGate<S>, k: &Ket<S>| g.apply(k).expect("2-dim gate on 2-dim ket");
    if source == MzSource::FirstSplitter {
        ket = step(&h, &ket);
    }
    ket = step(&x, &ket);
    if let Some(phase) = phase {
        ket = step(&phase, &ket);
    }
    step(&h, &ket)
}

/// Final ket with the phase shifter set to θ = π (`phase_in`) or removed.
pub fn mz_evolve<S: Scalar>(phase_in: bool, source: MzSource) -> Ket<S> {
    run(source, phase_in.then(UnitaryGate::phase_pi))
}

/// Final ket for an arbitrary phase θ (floating-point mode).
pub fn mz_evolve_with_phase(theta: f64, source: MzSource) -> Ket<Complex64> {
    let gate = UnitaryGate::phase_on_first(Complex64::from_polar(1.0, theta))
        .expect("unit-modulus phase is unitary");
    run(source, Some(gate))
}

/// (Pr(d₁), Pr(d₂)) for a final interferometer ket.
pub fn detection_probabilities<S: Scalar>(ket: &Ket<S>) -> (S::Real, S::Real) {
    let a = ket.amplitudes();
    (a[0].norm_sqr(), a[1].norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{ratio, ExactComplex, QSqrt2};

    type E = ExactComplex;

    #[test]
    fn phase_in_ends_in_minus_down() {
        let k = mz_evolve::<E>(true, MzSource::FirstSplitter);
        assert_eq!(k.amplitudes(), &[E::zero(), E::from_int(-1)][..]);
        let (d1, d2) = detection_probabilities(&k);
        assert_eq!((d1, d2), (QSqrt2::zero(), QSqrt2::one()));
    }

    #[test]
    fn phase_out_returns_up() {
        let k = mz_evolve::<E>(false, MzSource::FirstSplitter);
        assert_eq!(k.amplitudes(), &[E::from_int(1), E::zero()][..]);
    }

    #[test]
    fn upper_arm_source_is_equiprobable() {
        let half = QSqrt2::from_rational(ratio(1, 2));
        for phase in [false, true] {
            let k = mz_evolve::<E>(phase, MzSource::UpperArm);
            let h = E::frac_1_sqrt2();
            assert_eq!(k.amplitudes(), &[h.clone(), -h][..]);
            assert_eq!(detection_probabilities(&k), (half.clone(), half.clone()));
        }
    }

    #[test]
    fn general_phase_follows_cos_squared() {
        for i in 0..=16 {
            let theta = i as f64 * std::f64::consts::PI / 8.0;
            let (d1, d2) = detection_probabilities(&mz_evolve_with_phase(theta, MzSource::FirstSplitter));
            assert!((d1 - (theta / 2.0).cos().powi(2)).abs() < 1e-12);
            assert!((d1 + d2 - 1.0).abs() < 1e-12);
        }
    }
}
