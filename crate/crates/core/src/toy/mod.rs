//! Spekkens' toy theory for one and two elementary systems.
//!
//! An elementary system has four ontic states, labelled 1 to 4. Epistemic
//! states obeying the knowledge-balance principle are uniform distributions
//! over two of them (maximal knowledge) or over all four (total ignorance).
//! Measurements are partitions into two blocks of two; obtaining a block
//! resamples the ontic state uniformly within it.

mod combine;
mod composite;
mod model;

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use combine::{
    analogy_failure_check, combination_table, combine, correspondence, mz_toy_run, mz_toy_transcript,
    AnalogyEntry, AnalogyReport, CombinationRule, MzStep,
};
pub use composite::{
    bayesian_retrodiction, make_correlated, BobStatistics, no_signaling_check, product, retrodict,
    steering_inference, CompositeToyState, DisturbanceRule, NoSignalingReport, SteeringResult,
    Subsystem,
};
pub use model::{toy_born_table, toy_model, MEASUREMENT_LABELS};

/// An ontic state label in 1..=4.
pub type Ontic = u8;

pub const ONTIC_STATES: [Ontic; 4] = [1, 2, 3, 4];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ToyError {
    #[error("ontic label {0} outside 1..=4")]
    BadOntic(i64),
    #[error("support must have 2 or 4 elements, found {0}")]
    BadSupportSize(usize),
    #[error("duplicate ontic label {0} in support")]
    DuplicateOntic(Ontic),
    #[error("partition blocks must be two disjoint pairs covering 1..=4")]
    BadPartition,
    #[error("block is not part of the measurement")]
    UnknownBlock,
    #[error("outcome block has probability zero")]
    ImpossibleOutcome,
    #[error("permutation is not a bijection on 1..=4")]
    BadPermutation,
    #[error("combination needs two disjoint two-element states")]
    NotCombinable,
    #[error("composite support must be nonempty")]
    EmptyComposite,
    #[error("pairing is not a bijection on 1..=4")]
    BadPairing,
    #[error("posterior is not uniform and has no toy-state form")]
    NonUniformPosterior,
    #[error("probability vector must have four nonnegative entries summing to 1")]
    BadDistribution,
}

fn check_ontic(value: i64) -> Result<Ontic, ToyError> {
    if (1..=4).contains(&value) {
        Ok(value as Ontic)
    } else {
        Err(ToyError::BadOntic(value))
    }
}

fn bit(lambda: Ontic) -> u8 {
    1 << (lambda - 1)
}

fn mask_members(mask: u8) -> Vec<Ontic> {
    ONTIC_STATES.into_iter().filter(|&l| mask & bit(l) != 0).collect()
}

/// A knowledge-balanced epistemic state: uniform over 2 or 4 ontic states.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ToyState {
    mask: u8,
}

impl ToyState {
    pub const IGNORANCE: ToyState = ToyState { mask: 0b1111 };

    pub fn new(support: &[i64]) -> Result<Self, ToyError> {
        let mut mask = 0u8;
        for &v in support {
            let l = check_ontic(v)?;
            if mask & bit(l) != 0 {
                return Err(ToyError::DuplicateOntic(l));
            }
            mask |= bit(l);
        }
        Self::from_mask(mask)
    }

    /// The state j∨k.
    pub fn pair(j: Ontic, k: Ontic) -> Result<Self, ToyError> {
        Self::new(&[j as i64, k as i64])
    }

    pub(crate) fn from_mask(mask: u8) -> Result<Self, ToyError> {
        let n = mask.count_ones() as usize;
        if mask > 0b1111 || !(n == 2 || n == 4) {
            return Err(ToyError::BadSupportSize(n));
        }
        Ok(Self { mask })
    }

    /// All seven knowledge-balanced single-system states.
    pub fn all() -> Vec<ToyState> {
        (0u8..16).filter_map(|m| Self::from_mask(m).ok()).collect()
    }

    pub fn mask(self) -> u8 {
        self.mask
    }

    pub fn support(self) -> Vec<Ontic> {
        mask_members(self.mask)
    }

    pub fn contains(self, lambda: Ontic) -> bool {
        (1..=4).contains(&lambda) && self.mask & bit(lambda) != 0
    }

    pub fn is_pure(self) -> bool {
        self.mask.count_ones() == 2
    }

    /// The complementary support; total ignorance is its own complement.
    pub fn complement(self) -> ToyState {
        if self.is_pure() {
            ToyState { mask: !self.mask & 0b1111 }
        } else {
            self
        }
    }

    pub fn probabilities(self) -> [BigRational; 4] {
        let n = BigRational::from_integer(self.mask.count_ones().into());
        ONTIC_STATES.map(|l| {
            if self.contains(l) {
                BigRational::one() / &n
            } else {
                BigRational::zero()
            }
        })
    }
}

impl fmt::Display for ToyState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.support().iter().map(|l| l.to_string()).collect();
        f.write_str(&parts.join("∨"))
    }
}

impl fmt::Debug for ToyState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ToyState({self})")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SupportDoc<T> {
    support: Vec<T>,
}

impl Serialize for ToyState {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SupportDoc { support: self.support() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ToyState {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = SupportDoc::<i64>::deserialize(d)?;
        ToyState::new(&doc.support).map_err(serde::de::Error::custom)
    }
}

/// A measurement partitioning the ontic states into two pairs.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ToyMeasurement {
    blocks: [ToyState; 2],
}

impl ToyMeasurement {
    pub fn new(first: ToyState, second: ToyState) -> Result<Self, ToyError> {
        if !first.is_pure() || second != first.complement() {
            return Err(ToyError::BadPartition);
        }
        let blocks = if first.contains(1) { [first, second] } else { [second, first] };
        Ok(Self { blocks })
    }

    /// Builds a partition from two lists of ontic labels.
    pub fn from_blocks(a: &[i64], b: &[i64]) -> Result<Self, ToyError> {
        let a = ToyState::new(a).map_err(|_| ToyError::BadPartition)?;
        let b = ToyState::new(b).map_err(|_| ToyError::BadPartition)?;
        Self::new(a, b)
    }

    /// {{1,2},{3,4}}, mirroring {|0⟩, |1⟩}.
    pub fn z() -> Self {
        Self::from_blocks(&[1, 2], &[3, 4]).expect("valid partition")
    }

    /// {{1,3},{2,4}}, mirroring {|+⟩, |−⟩}.
    pub fn x() -> Self {
        Self::from_blocks(&[1, 3], &[2, 4]).expect("valid partition")
    }

    /// {{2,3},{1,4}}, mirroring {|+i⟩, |−i⟩}.
    pub fn y() -> Self {
        Self::from_blocks(&[2, 3], &[1, 4]).expect("valid partition")
    }

    pub fn standard() -> [ToyMeasurement; 3] {
        [Self::z(), Self::x(), Self::y()]
    }

    /// The two blocks, the one containing ontic state 1 first.
    pub fn blocks(self) -> [ToyState; 2] {
        self.blocks
    }

    pub fn block_of(self, lambda: Ontic) -> ToyState {
        if self.blocks[0].contains(lambda) {
            self.blocks[0]
        } else {
            self.blocks[1]
        }
    }

    pub fn has_block(self, block: ToyState) -> bool {
        self.blocks.contains(&block)
    }
}

impl fmt::Display for ToyMeasurement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b] = self.blocks;
        let list = |s: ToyState| {
            s.support().iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",")
        };
        write!(f, "{{{{{}}},{{{}}}}}", list(a), list(b))
    }
}

impl fmt::Debug for ToyMeasurement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ToyMeasurement({self})")
    }
}

/// A bijection on the four ontic states.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ToyPermutation {
    images: [Ontic; 4],
}

impl ToyPermutation {
    pub fn identity() -> Self {
        Self { images: [1, 2, 3, 4] }
    }

    /// `images[k]` is where ontic state `k + 1` is sent.
    pub fn new(images: [i64; 4]) -> Result<Self, ToyError> {
        let mut seen = 0u8;
        let mut out = [0; 4];
        for (slot, &v) in out.iter_mut().zip(&images) {
            let l = check_ontic(v).map_err(|_| ToyError::BadPermutation)?;
            if seen & bit(l) != 0 {
                return Err(ToyError::BadPermutation);
            }
            seen |= bit(l);
            *slot = l;
        }
        Ok(Self { images: out })
    }

    /// The transposition (jk).
    pub fn transposition(j: Ontic, k: Ontic) -> Result<Self, ToyError> {
        check_ontic(j.into()).map_err(|_| ToyError::BadPermutation)?;
        check_ontic(k.into()).map_err(|_| ToyError::BadPermutation)?;
        let mut images = [1, 2, 3, 4];
        images.swap(usize::from(j - 1), usize::from(k - 1));
        Ok(Self { images })
    }

    /// A product of transpositions, the leftmost applied first.
    pub fn from_transpositions(pairs: &[(Ontic, Ontic)]) -> Result<Self, ToyError> {
        pairs.iter().try_fold(Self::identity(), |acc, &(j, k)| {
            Ok(acc.then(Self::transposition(j, k)?))
        })
    }

    /// All 24 permutations.
    pub fn all() -> Vec<ToyPermutation> {
        let mut out = Vec::with_capacity(24);
        for a in 1..=4 {
            for b in 1..=4 {
                for c in 1..=4 {
                    for d in 1..=4 {
                        if let Ok(p) = Self::new([a, b, c, d]) {
                            out.push(p);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn image(self, lambda: Ontic) -> Ontic {
        self.images[usize::from(lambda - 1)]
    }

    pub fn images(self) -> [Ontic; 4] {
        self.images
    }

    /// First `self`, then `next`.
    pub fn then(self, next: Self) -> Self {
        Self { images: self.images.map(|l| next.image(l)) }
    }

    pub fn inverse(self) -> Self {
        let mut images = [0; 4];
        for l in ONTIC_STATES {
            images[usize::from(self.image(l) - 1)] = l;
        }
        Self { images }
    }

    pub fn apply(self, state: ToyState) -> ToyState {
        let mask = state.support().into_iter().fold(0, |m, l| m | bit(self.image(l)));
        ToyState { mask }
    }
}

impl fmt::Debug for ToyPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ToyPermutation{:?}", self.images)
    }
}

/// Maps a single-system state through a permutation.
pub fn apply_permutation(state: ToyState, perm: ToyPermutation) -> ToyState {
    perm.apply(state)
}

fn check_distribution(p: &[BigRational; 4]) -> Result<(), ToyError> {
    let sum: BigRational = p.iter().sum();
    if p.iter().any(|x| x < &BigRational::zero()) || !sum.is_one() {
        return Err(ToyError::BadDistribution);
    }
    Ok(())
}

/// A yes/no question "is λ in this subset?", as a bit mask.
fn question_answer_known(p: &[BigRational; 4], question: u8) -> bool {
    let mass: BigRational = ONTIC_STATES
        .iter()
        .filter(|&&l| question & bit(l) != 0)
        .map(|&l| p[usize::from(l - 1)].clone())
        .sum();
    mass.is_zero() || mass.is_one()
}

/// Every canonical set: a minimal collection of yes/no questions whose
/// answers pin down the ontic state. For four ontic states these are the
/// pairs of questions separating all four.
pub fn canonical_sets() -> Vec<[u8; 2]> {
    let questions: Vec<u8> = (1u8..15).collect();
    let mut sets = Vec::new();
    for (i, &q1) in questions.iter().enumerate() {
        for &q2 in &questions[i + 1..] {
            let mut seen = 0u8;
            let separates = ONTIC_STATES.iter().all(|&l| {
                let code = u8::from(q1 & bit(l) != 0) | (u8::from(q2 & bit(l) != 0) << 1);
                let fresh = seen & (1 << code) == 0;
                seen |= 1 << code;
                fresh
            });
            if separates {
                sets.push([q1, q2]);
            }
        }
    }
    sets
}

/// Largest number of questions with certain answers, over all canonical sets.
pub fn knowledge_measure(p: &[BigRational; 4]) -> Result<usize, ToyError> {
    check_distribution(p)?;
    Ok(canonical_sets()
        .iter()
        .map(|set| set.iter().filter(|&&q| question_answer_known(p, q)).count())
        .max()
        .unwrap_or(0))
}

/// True iff `p` is uniform over exactly two or all four ontic states.
pub fn kb_validate(p: &[BigRational; 4]) -> Result<bool, ToyError> {
    check_distribution(p)?;
    let support: Vec<&BigRational> = p.iter().filter(|x| !x.is_zero()).collect();
    let uniform = support.windows(2).all(|w| w[0] == w[1]);
    Ok(uniform && (support.len() == 2 || support.len() == 4))
}

/// Posterior knowledge after obtaining `block`: uniform on the block.
pub fn measure_update(
    state: ToyState,
    meas: ToyMeasurement,
    block: ToyState,
) -> Result<ToyState, ToyError> {
    if !meas.has_block(block) {
        return Err(ToyError::UnknownBlock);
    }
    if state.mask & block.mask == 0 {
        return Err(ToyError::ImpossibleOutcome);
    }
    Ok(block)
}

/// One ontic-level run: the outcome is the block holding λ, and the new λ is
/// drawn uniformly from that block.
pub fn ontic_simulate_measurement<R: Rng + ?Sized>(
    lambda: Ontic,
    meas: ToyMeasurement,
    rng: &mut R,
) -> Result<(ToyState, Ontic), ToyError> {
    check_ontic(lambda.into())?;
    let block = meas.block_of(lambda);
    let members = block.support();
    let new_lambda = *members.choose(rng).expect("blocks are nonempty");
    Ok((block, new_lambda))
}

/// Prepares `state` by sampling λ uniformly from its support, measures
/// `trials` times independently and counts each block.
pub fn simulate_outcome_counts(
    state: ToyState,
    meas: ToyMeasurement,
    trials: usize,
    seed: u64,
) -> BTreeMap<ToyState, usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let support = state.support();
    let mut counts: BTreeMap<ToyState, usize> = meas.blocks().iter().map(|&b| (b, 0)).collect();
    for _ in 0..trials {
        let lambda = *support.choose(&mut rng).expect("nonempty support");
        let (block, _) = ontic_simulate_measurement(lambda, meas, &mut rng).expect("valid λ");
        *counts.entry(block).or_default() += 1;
    }
    counts
}

/// Exact joint distribution of outcome sequences for a measurement sequence
/// on a system prepared in `initial`, with uniform resampling after each step.
pub fn sequence_distribution(
    initial: ToyState,
    sequence: &[ToyMeasurement],
) -> BTreeMap<Vec<ToyState>, BigRational> {
    let mut branches: Vec<(Vec<ToyState>, [BigRational; 4])> =
        vec![(Vec::new(), initial.probabilities())];
    for &meas in sequence {
        let mut next = Vec::new();
        for (history, dist) in branches {
            for block in meas.blocks() {
                let mass: BigRational = block
                    .support()
                    .iter()
                    .map(|&l| dist[usize::from(l - 1)].clone())
                    .sum();
                if mass.is_zero() {
                    continue;
                }
                let mut h = history.clone();
                h.push(block);
                let spread = block.probabilities().map(|p| p * &mass);
                next.push((h, spread));
            }
        }
        branches = next;
    }
    branches
        .into_iter()
        .map(|(h, dist)| (h, dist.iter().sum()))
        .collect()
}

/// One ordering of the non-commutativity experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderingTranscript {
    pub order: Vec<String>,
    /// Distribution of the knowledge state after the final measurement.
    #[serde(serialize_with = "serialize_state_distribution")]
    pub final_states: BTreeMap<ToyState, BigRational>,
    /// Distribution of the outcome of measurement A within this ordering.
    #[serde(serialize_with = "serialize_state_distribution")]
    pub a_outcomes: BTreeMap<ToyState, BigRational>,
}

fn serialize_state_distribution<S: Serializer>(
    dist: &BTreeMap<ToyState, BigRational>,
    s: S,
) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(dist.len()))?;
    for (state, p) in dist.iter().rev() {
        seq.serialize_element(&serde_json::json!({
            "state": state,
            "probability": crate::field::format_rational(p),
        }))?;
    }
    seq.end()
}

/// A = {{1,2},{3,4}} and B = {{1,3},{2,4}} applied in both orders to 1∨2.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoncommutativityDemo {
    pub initial: ToyState,
    pub a_then_b: OrderingTranscript,
    pub b_then_a: OrderingTranscript,
    pub a_then_a: OrderingTranscript,
}

impl NoncommutativityDemo {
    pub fn order_matters(&self) -> bool {
        self.a_then_b.a_outcomes != self.b_then_a.a_outcomes
    }
}

pub fn noncommutativity_demo() -> NoncommutativityDemo {
    let initial = ToyState::pair(1, 2).expect("1∨2");
    let (a, b) = (ToyMeasurement::z(), ToyMeasurement::x());
    let run = |names: [&str; 2], seq: [ToyMeasurement; 2]| {
        let dist = sequence_distribution(initial, &seq);
        let mut final_states = BTreeMap::new();
        let mut a_outcomes = BTreeMap::new();
        for (history, p) in &dist {
            *final_states.entry(history[1]).or_insert_with(BigRational::zero) += p;
            for (k, &m) in seq.iter().enumerate() {
                if m == a {
                    *a_outcomes.entry(history[k]).or_insert_with(BigRational::zero) += p;
                }
            }
        }
        if seq.iter().filter(|&&m| m == a).count() > 1 {
            a_outcomes.values_mut().for_each(|p| *p /= BigRational::from_integer(2.into()));
        }
        OrderingTranscript { order: names.map(String::from).to_vec(), final_states, a_outcomes }
    };
    NoncommutativityDemo {
        initial,
        a_then_b: run(["A", "B"], [a, b]),
        b_then_a: run(["B", "A"], [b, a]),
        a_then_a: run(["A", "A"], [a, a]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ratio;

    fn dist(v: [(i64, i64); 4]) -> [BigRational; 4] {
        v.map(|(n, d)| ratio(n, d))
    }

    fn st(a: Ontic, b: Ontic) -> ToyState {
        ToyState::pair(a, b).unwrap()
    }

    #[test]
    fn knowledge_examples() {
        assert_eq!(knowledge_measure(&dist([(1, 2), (1, 2), (0, 1), (0, 1)])).unwrap(), 1);
        assert_eq!(knowledge_measure(&dist([(1, 4); 4])).unwrap(), 0);
        assert_eq!(knowledge_measure(&dist([(1, 1), (0, 1), (0, 1), (0, 1)])).unwrap(), 2);
        assert_eq!(canonical_sets().len(), 12);
        assert!(knowledge_measure(&dist([(1, 2); 4])).is_err());
    }

    #[test]
    fn kb_examples() {
        assert!(kb_validate(&dist([(1, 2), (0, 1), (1, 2), (0, 1)])).unwrap());
        assert!(!kb_validate(&dist([(1, 1), (0, 1), (0, 1), (0, 1)])).unwrap());
        assert!(!kb_validate(&dist([(1, 2), (1, 4), (1, 4), (0, 1)])).unwrap());
        assert!(kb_validate(&dist([(1, 4); 4])).unwrap());
    }

    #[test]
    fn state_construction() {
        assert_eq!(ToyState::new(&[1]), Err(ToyError::BadSupportSize(1)));
        assert_eq!(ToyState::new(&[1, 5]), Err(ToyError::BadOntic(5)));
        assert_eq!(ToyState::new(&[2, 2]), Err(ToyError::DuplicateOntic(2)));
        assert_eq!(ToyState::all().len(), 7);
        assert_eq!(st(2, 1), st(1, 2));
        assert_eq!(st(1, 2).to_string(), "1∨2");
    }

    #[test]
    fn json_round_trip() {
        let s = st(3, 1);
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"support":[1,3]}"#);
        assert_eq!(serde_json::from_str::<ToyState>(&text).unwrap(), s);
        assert!(serde_json::from_str::<ToyState>(r#"{"support":[1,2,3]}"#).is_err());
        assert!(serde_json::from_str::<ToyState>(r#"{"support":[0,1]}"#).is_err());
    }

    #[test]
    fn measurement_update_examples() {
        let x = ToyMeasurement::x();
        let z = ToyMeasurement::z();
        assert_eq!(measure_update(ToyState::IGNORANCE, x, st(1, 3)).unwrap(), st(1, 3));
        assert_eq!(measure_update(st(1, 2), z, st(1, 2)).unwrap(), st(1, 2));
        assert_eq!(measure_update(st(1, 2), z, st(3, 4)), Err(ToyError::ImpossibleOutcome));
        assert_eq!(measure_update(st(1, 2), z, st(1, 3)), Err(ToyError::UnknownBlock));
        assert_eq!(ToyMeasurement::from_blocks(&[1, 2], &[2, 3]), Err(ToyError::BadPartition));
    }

    #[test]
    fn ontic_simulation_and_repeatability() {
        let z = ToyMeasurement::z();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let (block, new) = ontic_simulate_measurement(1, z, &mut rng).unwrap();
            assert_eq!(block, st(1, 2));
            assert!(block.contains(new));
            let (again, _) = ontic_simulate_measurement(new, z, &mut rng).unwrap();
            assert_eq!(again, block);
        }
        assert_eq!(ontic_simulate_measurement(0, z, &mut rng), Err(ToyError::BadOntic(0)));
    }

    #[test]
    fn noncommutativity() {
        let demo = noncommutativity_demo();
        let half = ratio(1, 2);
        let ab = &demo.a_then_b;
        assert_eq!(ab.a_outcomes, BTreeMap::from([(st(1, 2), ratio(1, 1))]));
        assert_eq!(ab.final_states, BTreeMap::from([(st(1, 3), half.clone()), (st(2, 4), half.clone())]));
        let ba = &demo.b_then_a;
        assert_eq!(ba.final_states, BTreeMap::from([(st(1, 2), half.clone()), (st(3, 4), half)]));
        assert_eq!(demo.a_then_a.final_states, BTreeMap::from([(st(1, 2), ratio(1, 1))]));
        assert!(demo.order_matters());
    }

    #[test]
    fn permutation_examples() {
        let t23 = ToyPermutation::transposition(2, 3).unwrap();
        let t13 = ToyPermutation::transposition(1, 3).unwrap();
        assert_eq!(apply_permutation(st(1, 2), t23), st(1, 3));
        assert_eq!(apply_permutation(st(1, 3), t13), st(1, 3));
        assert_eq!(apply_permutation(st(1, 2), ToyPermutation::identity()), st(1, 2));
        assert_eq!(ToyPermutation::all().len(), 24);
        assert!(ToyPermutation::new([1, 1, 2, 3]).is_err());
    }
}
