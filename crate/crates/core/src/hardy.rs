//! Hardy's interferometric argument as possibilistic inference.
//!
//! Two preparations enter the Mach–Zehnder setup: |φ⟩, emitted straight into
//! the upper arm, and |ψ⟩, emitted through the first beam splitter. Every
//! ontic state λ fixes which detector clicks are possible at each phase
//! setting θ ∈ {0, π}. Born zeros of |ψ⟩, invariance of the flags of |φ⟩'s
//! ontic states under the phase shifter, and the rule that some detector
//! always clicks together rule out any λ shared by both preparations.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{format_rational, ExactComplex};
use crate::quantum::{detection_probabilities, mz_evolve, MzSource};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HardyError {
    #[error("ontic space needs at least 2 states, got {0}")]
    LambdaSize(usize),
    #[error("ontic state {0} is out of range")]
    LambdaRange(usize),
    #[error("ontic state {lambda} has no possible detector at theta = {theta}")]
    Totality { lambda: usize, theta: Theta },
    #[error("preparation {0} has empty support")]
    EmptySupport(Preparation),
    #[error("flag table has {flags} rows for {size} ontic states")]
    Shape { flags: usize, size: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preparation {
    /// Photon emitted into the upper arm.
    Phi,
    /// Photon emitted towards the first beam splitter.
    Psi,
}

impl Preparation {
    pub const ALL: [Preparation; 2] = [Preparation::Phi, Preparation::Psi];

    fn source(self) -> MzSource {
        match self {
            Preparation::Phi => MzSource::UpperArm,
            Preparation::Psi => MzSource::FirstSplitter,
        }
    }
}

impl fmt::Display for Preparation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preparation::Phi => "phi",
            Preparation::Psi => "psi",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Theta {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "pi")]
    Pi,
}

impl Theta {
    pub const ALL: [Theta; 2] = [Theta::Zero, Theta::Pi];

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Theta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Theta::Zero => "0",
            Theta::Pi => "pi",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Detector {
    D1,
    D2,
}

impl Detector {
    pub const ALL: [Detector; 2] = [Detector::D1, Detector::D2];

    fn index(self) -> usize {
        self as usize
    }
}

/// A Born-rule statement about one (preparation, θ, detector) triple.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ZeroFact {
    pub preparation: Preparation,
    pub theta: Theta,
    pub detector: Detector,
    pub is_zero: bool,
    #[serde(with = "crate::field::serde_rational")]
    pub probability: BigRational,
}

/// Evaluates the interferometer exactly for both preparations and settings.
pub fn derive_zero_probability_facts() -> Vec<ZeroFact> {
    let mut facts = Vec::with_capacity(8);
    for preparation in Preparation::ALL {
        for theta in Theta::ALL {
            let ket = mz_evolve::<ExactComplex>(theta == Theta::Pi, preparation.source());
            let (d1, d2) = detection_probabilities(&ket);
            for (detector, p) in Detector::ALL.into_iter().zip([d1, d2]) {
                let probability =
                    p.as_rational().cloned().expect("interferometer probabilities are rational");
                facts.push(ZeroFact {
                    preparation,
                    theta,
                    detector,
                    is_zero: probability.is_zero(),
                    probability,
                });
            }
        }
    }
    facts
}

/// Possible-click flags indexed by `[θ][detector]`.
pub type Flags = [[bool; 2]; 2];

/// Supports of the two preparations plus the possibility flags of every
/// ontic state. Ontic states are numbered from 1 in serialized form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PossibilisticAssignment {
    pub size: usize,
    pub phi_support: BTreeSet<usize>,
    pub psi_support: BTreeSet<usize>,
    pub flags: Vec<Flags>,
}

impl PossibilisticAssignment {
    /// Checks that supports are nonempty and in range, and that some detector
    /// is possible for every λ and θ.
    pub fn new(
        phi_support: BTreeSet<usize>,
        psi_support: BTreeSet<usize>,
        flags: Vec<Flags>,
    ) -> Result<Self, HardyError> {
        let size = flags.len();
        let a = PossibilisticAssignment { size, phi_support, psi_support, flags };
        a.validate()?;
        Ok(a)
    }

    /// Every λ in both supports, every flag possible.
    pub fn unconstrained(size: usize) -> Self {
        let all: BTreeSet<usize> = (1..=size).collect();
        PossibilisticAssignment {
            size,
            phi_support: all.clone(),
            psi_support: all,
            flags: vec![[[true; 2]; 2]; size],
        }
    }

    pub fn validate(&self) -> Result<(), HardyError> {
        if self.flags.len() != self.size {
            return Err(HardyError::Shape { flags: self.flags.len(), size: self.size });
        }
        for (prep, support) in [(Preparation::Phi, &self.phi_support), (Preparation::Psi, &self.psi_support)] {
            if support.is_empty() {
                return Err(HardyError::EmptySupport(prep));
            }
            if let Some(&bad) = support.iter().find(|&&l| l == 0 || l > self.size) {
                return Err(HardyError::LambdaRange(bad));
            }
        }
        for (i, f) in self.flags.iter().enumerate() {
            for theta in Theta::ALL {
                if !f[theta.index()].iter().any(|&b| b) {
                    return Err(HardyError::Totality { lambda: i + 1, theta });
                }
            }
        }
        Ok(())
    }

    pub fn support(&self, preparation: Preparation) -> &BTreeSet<usize> {
        match preparation {
            Preparation::Phi => &self.phi_support,
            Preparation::Psi => &self.psi_support,
        }
    }

    pub fn overlap(&self) -> BTreeSet<usize> {
        self.phi_support.intersection(&self.psi_support).copied().collect()
    }

    pub fn possible(&self, lambda: usize, theta: Theta, detector: Detector) -> bool {
        self.flags[lambda - 1][theta.index()][detector.index()]
    }

    /// Λ^{d}_{prep}[θ]: the support states at which `detector` may click.
    pub fn detector_set(&self, preparation: Preparation, theta: Theta, detector: Detector) -> BTreeSet<usize> {
        self.support(preparation)
            .iter()
            .copied()
            .filter(|&l| self.possible(l, theta, detector))
            .collect()
    }

    /// Whether the preparation gives the click nonzero probability, i.e. some
    /// λ in its support allows it.
    pub fn predicts_possible(&self, preparation: Preparation, theta: Theta, detector: Detector) -> bool {
        !self.detector_set(preparation, theta, detector).is_empty()
    }

    /// Whether every Born zero and every Born nonzero is reproduced.
    pub fn replays(&self, facts: &[ZeroFact]) -> bool {
        facts
            .iter()
            .all(|f| self.predicts_possible(f.preparation, f.theta, f.detector) != f.is_zero)
    }

    /// Whether the flags of |φ⟩'s support states agree across θ.
    pub fn is_phase_invariant(&self) -> bool {
        self.phi_support.iter().all(|&l| {
            let f = self.flags[l - 1];
            f[0] == f[1]
        })
    }
}

/// The λ that lost every detector at some θ and the Born zeros responsible.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HardyCertificate {
    pub lambda: usize,
    pub theta: Theta,
    pub facts: Vec<ZeroFact>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("ontic state {} admits no detector at theta = {}", .0.lambda, .0.theta)]
pub struct HardyContradiction(pub HardyCertificate);

/// Clears the flags ruled out by the zero facts on each preparation's
/// support, then equates the θ = 0 and θ = π flags of every λ in |φ⟩'s
/// support, keeping a click possible only if both settings allow it.
/// A λ left without any possible detector is a contradiction.
pub fn apply_ontic_indifference(
    assignment: &PossibilisticAssignment,
    facts: &[ZeroFact],
) -> Result<PossibilisticAssignment, HardyContradiction> {
    let mut out = assignment.clone();
    let mut applied: Vec<Vec<ZeroFact>> = vec![Vec::new(); out.size];
    for fact in facts.iter().filter(|f| f.is_zero) {
        for &l in assignment.support(fact.preparation) {
            out.flags[l - 1][fact.theta.index()][fact.detector.index()] = false;
            applied[l - 1].push(fact.clone());
        }
    }
    for &l in &assignment.phi_support {
        let f = &mut out.flags[l - 1];
        for d in 0..2 {
            let both = f[0][d] && f[1][d];
            f[0][d] = both;
            f[1][d] = both;
        }
    }
    for l in 1..=out.size {
        for theta in Theta::ALL {
            if !out.flags[l - 1][theta.index()].iter().any(|&b| b) {
                return Err(HardyContradiction(HardyCertificate {
                    lambda: l,
                    theta,
                    facts: std::mem::take(&mut applied[l - 1]),
                }));
            }
        }
    }
    Ok(out)
}

/// What one ontic state looks like: membership in each support plus flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct LocalType {
    in_phi: bool,
    in_psi: bool,
    flags: Flags,
}

const FLAG_ROWS: [[bool; 2]; 3] = [[true, false], [false, true], [true, true]];

fn all_local_types() -> Vec<LocalType> {
    let mut out = Vec::with_capacity(36);
    for (in_phi, in_psi) in [(false, false), (true, false), (false, true), (true, true)] {
        for r0 in FLAG_ROWS {
            for r1 in FLAG_ROWS {
                out.push(LocalType { in_phi, in_psi, flags: [r0, r1] });
            }
        }
    }
    out
}

/// Whether a λ of this type respects the Born zeros of the preparations it
/// belongs to and, when required, phase invariance on |φ⟩'s support.
fn locally_consistent(t: &LocalType, facts: &[ZeroFact], invar: bool) -> bool {
    let member = |p: Preparation| match p {
        Preparation::Phi => t.in_phi,
        Preparation::Psi => t.in_psi,
    };
    let zeros_ok = facts
        .iter()
        .filter(|f| f.is_zero && member(f.preparation))
        .all(|f| !t.flags[f.theta.index()][f.detector.index()]);
    zeros_ok && !(invar && t.in_phi && t.flags[0] != t.flags[1])
}

/// Requirements that depend on the whole assignment: nonempty supports,
/// the overlap condition, and every Born nonzero being possible somewhere.
fn globally_consistent(types: &[LocalType], facts: &[ZeroFact], overlap: bool) -> bool {
    let phi = types.iter().any(|t| t.in_phi);
    let psi = types.iter().any(|t| t.in_psi);
    let shared = types.iter().any(|t| t.in_phi && t.in_psi);
    let nonzeros = facts.iter().filter(|f| !f.is_zero).all(|f| {
        types.iter().any(|t| {
            let member = match f.preparation {
                Preparation::Phi => t.in_phi,
                Preparation::Psi => t.in_psi,
            };
            member && t.flags[f.theta.index()][f.detector.index()]
        })
    });
    phi && psi && shared == overlap && nonzeros
}

fn assignment_from_types(types: &[LocalType], size: usize) -> PossibilisticAssignment {
    let filled: Vec<LocalType> =
        (0..size).map(|i| types[i.min(types.len() - 1)]).collect();
    let pick = |f: fn(&LocalType) -> bool| -> BTreeSet<usize> {
        filled.iter().enumerate().filter(|(_, t)| f(t)).map(|(i, _)| i + 1).collect()
    };
    PossibilisticAssignment {
        size,
        phi_support: pick(|t| t.in_phi),
        psi_support: pick(|t| t.in_psi),
        flags: filled.iter().map(|t| t.flags).collect(),
    }
}

/// Searches every assignment on `size` ontic states. The constraints are
/// per-λ filters plus existence requirements, so an assignment exists
/// exactly when some set of at most `size` distinct locally consistent
/// types meets the existence requirements; those sets are enumerated in
/// canonical order and the first hit is expanded by repeating its last type.
pub fn search_assignment(
    size: usize,
    facts: &[ZeroFact],
    invar: bool,
    overlap: bool,
) -> Result<Option<PossibilisticAssignment>, HardyError> {
    if size < 2 {
        return Err(HardyError::LambdaSize(size));
    }
    let local: Vec<LocalType> =
        all_local_types().into_iter().filter(|t| locally_consistent(t, facts, invar)).collect();
    let max = size.min(local.len());
    for k in 1..=max {
        let mut chosen = Vec::with_capacity(k);
        if let Some(types) = first_subset(&local, k, 0, &mut chosen, facts, overlap) {
            return Ok(Some(assignment_from_types(&types, size)));
        }
    }
    Ok(None)
}

fn first_subset(
    pool: &[LocalType],
    k: usize,
    start: usize,
    chosen: &mut Vec<LocalType>,
    facts: &[ZeroFact],
    overlap: bool,
) -> Option<Vec<LocalType>> {
    if chosen.len() == k {
        return globally_consistent(chosen, facts, overlap).then(|| chosen.clone());
    }
    for i in start..pool.len() {
        chosen.push(pool[i]);
        if let Some(hit) = first_subset(pool, k, i + 1, chosen, facts, overlap) {
            return Some(hit);
        }
        chosen.pop();
    }
    None
}

/// Outcome of the exhaustive search at one ontic-space size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HardyReport {
    pub lambda_size: usize,
    pub invariance: bool,
    pub overlap_possible: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub certificate: Option<HardyCertificate>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub escape_assignment: Option<PossibilisticAssignment>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub escape_replays: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub disjoint_assignment: Option<PossibilisticAssignment>,
}

impl HardyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Searches for an assignment with overlapping supports. When none exists
/// the contradiction certificate comes from running the indifference step
/// on the assignment whose only shared state is λ = 1; the disjoint case is
/// always exhibited alongside.
pub fn hardy_verdict(lambda_size: usize, drop_invar: bool) -> Result<HardyReport, HardyError> {
    let facts = derive_zero_probability_facts();
    let invariance = !drop_invar;
    let found = search_assignment(lambda_size, &facts, invariance, true)?;
    let disjoint_assignment = search_assignment(lambda_size, &facts, invariance, false)?;
    let (certificate, escape_replays) = match &found {
        Some(a) => (None, Some(a.replays(&facts))),
        None => {
            let mut candidate = PossibilisticAssignment::unconstrained(lambda_size);
            candidate.psi_support = [1].into();
            let certificate = apply_ontic_indifference(&candidate, &facts)
                .err()
                .map(|HardyContradiction(c)| c);
            (certificate, None)
        }
    };
    Ok(HardyReport {
        lambda_size,
        invariance,
        overlap_possible: found.is_some(),
        certificate,
        escape_assignment: found,
        escape_replays,
        disjoint_assignment,
    })
}

/// Born probability of a triple, formatted as `p/q`.
pub fn fact_probability(facts: &[ZeroFact], p: Preparation, theta: Theta, d: Detector) -> Option<String> {
    facts
        .iter()
        .find(|f| f.preparation == p && f.theta == theta && f.detector == d)
        .map(|f| format_rational(&f.probability))
}
