use std::fmt;

use serde::{Deserialize, Serialize};

use super::{ToyError, ToyPermutation, ToyState};
use crate::field::ExactComplex;
use crate::quantum::{mz_evolve, Ket, MzSource, PmState};

/// The four ways of combining two antipodal toy states, each tagged with the
/// relative phase e^{iφ} it mimics in (1/√2)(|a⟩ + e^{iφ}|b⟩).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CombinationRule {
    #[serde(rename = "+1")]
    Plus1,
    #[serde(rename = "+2")]
    Plus2,
    #[serde(rename = "+3")]
    Plus3,
    #[serde(rename = "+4")]
    Plus4,
}

impl CombinationRule {
    pub const ALL: [CombinationRule; 4] = [Self::Plus1, Self::Plus2, Self::Plus3, Self::Plus4];

    /// The phase tag φ in units of π/4: 0, π, π/2 and 3π/2 respectively.
    pub fn phase_eighths(self) -> i64 {
        match self {
            Self::Plus1 => 0,
            Self::Plus2 => 4,
            Self::Plus3 => 2,
            Self::Plus4 => 6,
        }
    }

    pub fn phase(self) -> ExactComplex {
        ExactComplex::unit_eighth(self.phase_eighths())
    }

    /// Which ontic state is taken from each operand: `(from_a_high, from_b_high)`.
    /// The +₃/+₄ ordering reproduces every worked instance of the rules.
    fn selectors(self) -> (bool, bool) {
        match self {
            Self::Plus1 => (false, false),
            Self::Plus2 => (true, true),
            Self::Plus3 => (true, false),
            Self::Plus4 => (false, true),
        }
    }
}

impl fmt::Display for CombinationRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self {
            Self::Plus1 => 1,
            Self::Plus2 => 2,
            Self::Plus3 => 3,
            Self::Plus4 => 4,
        };
        write!(f, "+{k}")
    }
}

/// Combines two disjoint two-element states into a new one.
pub fn combine(a: ToyState, b: ToyState, rule: CombinationRule) -> Result<ToyState, ToyError> {
    if !a.is_pure() || !b.is_pure() || a.mask() & b.mask() != 0 {
        return Err(ToyError::NotCombinable);
    }
    let (a_high, b_high) = rule.selectors();
    let pick = |s: ToyState, high: bool| {
        let members = s.support();
        if high {
            members[1]
        } else {
            members[0]
        }
    };
    ToyState::pair(pick(a, a_high), pick(b, b_high))
}

/// The toy analogue of each of the six P/M-states.
pub fn correspondence(state: PmState) -> ToyState {
    let (j, k) = match state {
        PmState::Zero => (1, 2),
        PmState::One => (3, 4),
        PmState::Plus => (1, 3),
        PmState::Minus => (2, 4),
        PmState::PlusI => (2, 3),
        PmState::MinusI => (1, 4),
    };
    ToyState::pair(j, k).expect("fixed pairs are valid")
}

impl ToyState {
    /// The P/M-state this toy state mirrors, if it has maximal knowledge.
    pub fn to_pm(self) -> Option<PmState> {
        PmState::ALL.into_iter().find(|&s| correspondence(s) == self)
    }
}

/// One row comparing a toy combination with the quantum superposition it mimics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalogyEntry {
    pub a: ToyState,
    pub b: ToyState,
    pub rule: CombinationRule,
    pub toy_result: ToyState,
    pub quantum_state: PmState,
    /// Global phase of the quantum superposition relative to the standard
    /// ket of `quantum_state`, in units of π/4.
    pub quantum_phase_eighths: i64,
    pub quantum_support: ToyState,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalogyReport {
    pub entries: Vec<AnalogyEntry>,
}

impl AnalogyReport {
    pub fn mismatches(&self) -> impl Iterator<Item = &AnalogyEntry> {
        self.entries.iter().filter(|e| !e.matches)
    }

    pub fn find(&self, a: ToyState, b: ToyState, rule: CombinationRule) -> Option<&AnalogyEntry> {
        self.entries.iter().find(|e| e.a == a && e.b == b && e.rule == rule)
    }
}

fn analogy_entry(a: PmState, b: PmState, rule: CombinationRule) -> AnalogyEntry {
    let (ta, tb) = (correspondence(a), correspondence(b));
    let toy_result = combine(ta, tb, rule).expect("antipodal states combine");
    let ket: Ket<ExactComplex> = a
        .ket()
        .superpose(&rule.phase(), &b.ket())
        .expect("orthogonal kets superpose to a unit vector");
    let quantum_state =
        PmState::identify(&ket).expect("superposing antipodes with an eighth-root phase stays in the six");
    let phase = quantum_state
        .ket::<ExactComplex>()
        .inner(&ket)
        .expect("same dimension")
        .as_unit_eighth()
        .expect("eighth-root global phase");
    let quantum_support = correspondence(quantum_state);
    AnalogyEntry {
        a: ta,
        b: tb,
        rule,
        toy_result,
        quantum_state,
        quantum_phase_eighths: phase,
        quantum_support,
        matches: toy_result == quantum_support,
    }
}

/// Every rule applied to every ordered pair of antipodal states: 24 rows.
pub fn combination_table() -> AnalogyReport {
    let mut entries = Vec::with_capacity(24);
    for a in PmState::ALL {
        for rule in CombinationRule::ALL {
            entries.push(analogy_entry(a, a.antipode(), rule));
        }
    }
    AnalogyReport { entries }
}

/// The three combinations singled out when comparing the rules with quantum
/// superpositions: (1∨3)+₃(2∨4), (1∨3)+₄(2∨4) and (1∨2)+₁(3∨4).
pub fn analogy_failure_check() -> AnalogyReport {
    AnalogyReport {
        entries: vec![
            analogy_entry(PmState::Plus, PmState::Minus, CombinationRule::Plus3),
            analogy_entry(PmState::Plus, PmState::Minus, CombinationRule::Plus4),
            analogy_entry(PmState::Zero, PmState::One, CombinationRule::Plus1),
        ],
    }
}

/// One stage of the toy Mach–Zehnder run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MzStep {
    pub element: String,
    pub toy: ToyState,
    pub quantum: PmState,
}

fn toy_elements(phase_in: bool) -> Vec<(&'static str, ToyPermutation)> {
    let t = |j, k| ToyPermutation::transposition(j, k).expect("valid transposition");
    let mut out = vec![("beam splitter", t(2, 3)), ("mirrors", t(1, 3))];
    if phase_in {
        let phase = ToyPermutation::from_transpositions(&[(1, 2), (3, 4)]).expect("valid");
        out.push(("phase shifter", phase));
    }
    out.push(("beam splitter", t(2, 3)));
    out
}

/// The toy interferometer: start in 1∨2, then (23), (13), optionally (12)(34), (23).
pub fn mz_toy_run(phase_in: bool) -> ToyState {
    toy_elements(phase_in)
        .into_iter()
        .fold(ToyState::pair(1, 2).expect("1∨2"), |s, (_, p)| p.apply(s))
}

/// Step-by-step toy run alongside the quantum state after the same element.
pub fn mz_toy_transcript(phase_in: bool) -> Vec<MzStep> {
    let mut toy = ToyState::pair(1, 2).expect("1∨2");
    let mut steps = vec![MzStep { element: "source".into(), toy, quantum: PmState::Zero }];
    let quantum_gates = crate::quantum::mz_gate_sequence::<ExactComplex>(phase_in);
    let mut ket = PmState::Zero.ket::<ExactComplex>();
    for ((name, perm), gate) in toy_elements(phase_in).into_iter().zip(quantum_gates) {
        toy = perm.apply(toy);
        ket = gate.apply(&ket).expect("qubit gate");
        let quantum = PmState::identify(&ket).expect("gates keep the six states");
        steps.push(MzStep { element: name.into(), toy, quantum });
    }
    debug_assert!(mz_evolve::<ExactComplex>(phase_in, MzSource::FirstSplitter).equals_up_to_phase(&ket));
    steps
}
