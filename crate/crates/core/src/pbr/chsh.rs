//! CHSH comparison: the singlet reaches 2√2, while deterministic local
//! strategies and every knowledge-balanced toy composite stay at or below 2.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::field::format_rational;
use crate::quantum::{Ket, Operator};
use crate::toy::{CompositeToyState, ToyMeasurement};

/// Alice's angles 0, π/2 and Bob's π/4, −π/4.
pub const TSIRELSON_ANGLES: [f64; 4] = [
    0.0,
    std::f64::consts::FRAC_PI_2,
    std::f64::consts::FRAC_PI_4,
    -std::f64::consts::FRAC_PI_4,
];

/// cos θ σ_z + sin θ σ_x.
fn spin_observable(theta: f64) -> Operator<Complex64> {
    let (c, s) = (Complex64::new(theta.cos(), 0.0), Complex64::new(theta.sin(), 0.0));
    Operator::from_rows(vec![vec![c, s], vec![s, -c]]).expect("2x2")
}

fn singlet() -> Ket<Complex64> {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let z = Complex64::new(0.0, 0.0);
    Ket::new(vec![z, h, -h, z]).expect("normalized")
}

/// ⟨ψ⁻| A(a) ⊗ B(b) |ψ⁻⟩.
pub fn singlet_correlation(a: f64, b: f64) -> f64 {
    let psi = singlet();
    let op = spin_observable(a).kron(&spin_observable(b));
    let image = Ket::new(op.apply(&psi).expect("4-dim")).expect("unitary image");
    psi.inner(&image).expect("4-dim").re
}

/// E(a₀,b₀) + E(a₀,b₁) + E(a₁,b₀) − E(a₁,b₁).
pub fn chsh_quantum(angles: [f64; 4]) -> f64 {
    let [a0, a1, b0, b1] = angles;
    singlet_correlation(a0, b0) + singlet_correlation(a0, b1) + singlet_correlation(a1, b0)
        - singlet_correlation(a1, b1)
}

/// max |S| over the 16 assignments of ±1 to A₀, A₁, B₀, B₁.
pub fn chsh_local_bound() -> i64 {
    let mut best = 0;
    for bits in 0u8..16 {
        let v = |k: u8| if bits & (1 << k) != 0 { 1i64 } else { -1 };
        let (a0, a1, b0, b1) = (v(0), v(1), v(2), v(3));
        best = best.max((a0 * b0 + a0 * b1 + a1 * b0 - a1 * b1).abs());
    }
    best
}

/// A ±1-valued toy observable: a partition with the sign of its first block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ToyObservable {
    pub partition: ToyMeasurement,
    pub first_block_sign: i64,
}

impl ToyObservable {
    pub fn all() -> Vec<ToyObservable> {
        ToyMeasurement::standard()
            .into_iter()
            .flat_map(|m| [1, -1].map(|s| ToyObservable { partition: m, first_block_sign: s }))
            .collect()
    }

    fn value(&self, lambda: u8) -> i64 {
        if self.partition.blocks()[0].contains(lambda) {
            self.first_block_sign
        } else {
            -self.first_block_sign
        }
    }
}

fn toy_correlation(state: CompositeToyState, a: ToyObservable, b: ToyObservable) -> BigRational {
    let support = state.support();
    let total: i64 = support.iter().map(|&(x, y)| a.value(x) * b.value(y)).sum();
    BigRational::new(total.into(), (support.len() as i64).into())
}

/// Largest |S| of one composite over all choices of four toy observables.
pub fn chsh_toy_max(state: CompositeToyState) -> BigRational {
    let obs = ToyObservable::all();
    let mut best = BigRational::zero();
    for &a0 in &obs {
        for &a1 in &obs {
            for &b0 in &obs {
                for &b1 in &obs {
                    let s = toy_correlation(state, a0, b0) + toy_correlation(state, a0, b1)
                        + toy_correlation(state, a1, b0)
                        - toy_correlation(state, a1, b1);
                    if s.abs() > best {
                        best = s.abs();
                    }
                }
            }
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChshReport {
    pub quantum: f64,
    pub local_bound: i64,
    #[serde(serialize_with = "ser_rational")]
    pub toy_max: BigRational,
    pub toy_states_checked: usize,
    pub gap: f64,
}

fn ser_rational<S: serde::Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(v))
}

pub fn chsh_gap_demo() -> ChshReport {
    let quantum = chsh_quantum(TSIRELSON_ANGLES).abs();
    let local_bound = chsh_local_bound();
    let states = CompositeToyState::all_kb_valid();
    let toy_max = states.iter().map(|&s| chsh_toy_max(s)).max().unwrap_or_else(BigRational::zero);
    ChshReport {
        quantum,
        local_bound,
        toy_max,
        toy_states_checked: states.len(),
        gap: quantum - local_bound as f64,
    }
}
