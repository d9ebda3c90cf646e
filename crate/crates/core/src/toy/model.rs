use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{correspondence, ONTIC_STATES};
use crate::field::ExactComplex;
use crate::om::{BornTable, EpistemicState, OnticSpace, OntologicalModel, Probability, ResponseFunction};
use crate::quantum::PmState;

/// The three measurements, each named by its two outcomes.
pub const MEASUREMENT_LABELS: [(&str, PmState, PmState); 3] = [
    ("0/1", PmState::Zero, PmState::One),
    ("+/-", PmState::Plus, PmState::Minus),
    ("+i/-i", PmState::PlusI, PmState::MinusI),
];

/// The toy theory as an ontological model: Λ = {1,2,3,4}, the six
/// P/M-states as uniform two-element states, and the three partition
/// measurements with 0/1 response functions.
pub fn toy_model() -> OntologicalModel {
    let space = OnticSpace::numbered(4).expect("four labels");
    let preparations = PmState::ALL
        .iter()
        .map(|&s| {
            let state = EpistemicState::new(space.clone(), correspondence(s).probabilities().to_vec())
                .expect("uniform on two states");
            (s.label().to_string(), state)
        })
        .collect();
    let measurements = MEASUREMENT_LABELS
        .iter()
        .map(|&(name, a, b)| {
            let table = [a, b]
                .iter()
                .map(|&o| {
                    ONTIC_STATES
                        .iter()
                        .map(|&l| {
                            if correspondence(o).contains(l) {
                                BigRational::one()
                            } else {
                                BigRational::zero()
                            }
                        })
                        .collect()
                })
                .collect();
            let outcomes = vec![a.label().to_string(), b.label().to_string()];
            let response =
                ResponseFunction::new(space.clone(), outcomes, table).expect("partition indicator");
            (name.to_string(), response)
        })
        .collect();
    OntologicalModel::new(space, preparations, measurements).expect("shared space")
}

/// |⟨outcome|state⟩|² for every triple of the toy model, computed exactly
/// from the qubit kets.
pub fn toy_born_table() -> BornTable {
    let mut table = BTreeMap::new();
    for prep in PmState::ALL {
        let ket = prep.ket::<ExactComplex>();
        for &(name, a, b) in &MEASUREMENT_LABELS {
            for outcome in [a, b] {
                let p = outcome
                    .ket::<ExactComplex>()
                    .overlap(&ket)
                    .expect("qubits")
                    .as_rational()
                    .cloned()
                    .expect("P/M overlaps are rational");
                table.insert(
                    (prep.label().to_string(), name.to_string(), outcome.label().to_string()),
                    Probability::Exact(p),
                );
            }
        }
    }
    table
}
