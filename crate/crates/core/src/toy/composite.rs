use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{check_ontic, Ontic, SupportDoc, ToyError, ToyMeasurement, ToyPermutation, ToyState, ONTIC_STATES};
use crate::field::format_rational;

/// Which half of a two-system composite an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subsystem {
    Alice,
    Bob,
}

fn pair_bit(a: Ontic, b: Ontic) -> u16 {
    1 << ((usize::from(a) - 1) * 4 + usize::from(b) - 1)
}

/// Uniform distribution over a nonempty set of ontic pairs (λ_a, λ_b).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CompositeToyState {
    mask: u16,
}

type Joint = [[BigRational; 4]; 4];

fn zero_joint() -> Joint {
    std::array::from_fn(|_| std::array::from_fn(|_| BigRational::zero()))
}

fn idx(l: Ontic) -> usize {
    usize::from(l) - 1
}

impl CompositeToyState {
    pub const IGNORANCE: CompositeToyState = CompositeToyState { mask: u16::MAX };

    pub fn new(pairs: &[(i64, i64)]) -> Result<Self, ToyError> {
        let mut mask = 0u16;
        for &(a, b) in pairs {
            mask |= pair_bit(check_ontic(a)?, check_ontic(b)?);
        }
        Self::from_mask(mask)
    }

    pub fn from_mask(mask: u16) -> Result<Self, ToyError> {
        if mask == 0 {
            return Err(ToyError::EmptyComposite);
        }
        Ok(Self { mask })
    }

    pub fn mask(self) -> u16 {
        self.mask
    }

    pub fn support(self) -> Vec<(Ontic, Ontic)> {
        let mut out = Vec::new();
        for a in ONTIC_STATES {
            for b in ONTIC_STATES {
                if self.contains(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn len(self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.mask == 0
    }

    pub fn contains(self, a: Ontic, b: Ontic) -> bool {
        (1..=4).contains(&a) && (1..=4).contains(&b) && self.mask & pair_bit(a, b) != 0
    }

    fn joint(self) -> Joint {
        let w = BigRational::new(1.into(), self.len().into());
        let mut j = zero_joint();
        for (a, b) in self.support() {
            j[idx(a)][idx(b)] = w.clone();
        }
        j
    }

    fn from_joint(j: &Joint) -> Result<Self, ToyError> {
        let mut mask = 0u16;
        let mut weight: Option<&BigRational> = None;
        for a in ONTIC_STATES {
            for b in ONTIC_STATES {
                let w = &j[idx(a)][idx(b)];
                if w.is_positive() {
                    if weight.is_some_and(|x| x != w) {
                        return Err(ToyError::NonUniformPosterior);
                    }
                    weight = Some(w);
                    mask |= pair_bit(a, b);
                }
            }
        }
        Self::from_mask(mask)
    }

    /// Marginal distribution of one subsystem.
    pub fn marginal(self, which: Subsystem) -> [BigRational; 4] {
        let j = self.joint();
        std::array::from_fn(|k| match which {
            Subsystem::Alice => j[k].iter().sum(),
            Subsystem::Bob => j.iter().map(|row| row[k].clone()).sum(),
        })
    }

    /// The ontic states of one subsystem that occur in the support.
    pub fn marginal_support(self, which: Subsystem) -> Vec<Ontic> {
        let m = self.marginal(which);
        ONTIC_STATES.into_iter().filter(|&l| m[idx(l)].is_positive()).collect()
    }

    /// Whether the state has a knowledge-balanced composite form. Products of
    /// balanced single-system states qualify, as do correlated bijections
    /// between the two supports and total ignorance.
    pub fn is_kb_valid(self) -> bool {
        if self == Self::IGNORANCE {
            return true;
        }
        if self.len() != 4 {
            return false;
        }
        let alice = self.marginal_support(Subsystem::Alice);
        let bob = self.marginal_support(Subsystem::Bob);
        let is_product = alice.len() == 2
            && bob.len() == 2
            && alice.iter().all(|&a| bob.iter().all(|&b| self.contains(a, b)));
        let is_correlated = alice.len() == 4 && bob.len() == 4;
        is_product || is_correlated
    }

    /// All 61 knowledge-balanced composites: 36 products, 24 correlated
    /// bijections and total ignorance.
    pub fn all_kb_valid() -> Vec<CompositeToyState> {
        let pure: Vec<ToyState> = ToyState::all().into_iter().filter(|s| s.is_pure()).collect();
        let mut out: Vec<CompositeToyState> = pure
            .iter()
            .flat_map(|&a| pure.iter().map(move |&b| product(a, b)))
            .collect();
        out.extend(ToyPermutation::all().into_iter().map(make_correlated));
        out.push(Self::IGNORANCE);
        out
    }

    /// Applies `perm` to one subsystem's coordinate.
    pub fn apply_permutation(self, perm: ToyPermutation, on: Subsystem) -> Self {
        let mask = self.support().into_iter().fold(0, |m, (a, b)| match on {
            Subsystem::Alice => m | pair_bit(perm.image(a), b),
            Subsystem::Bob => m | pair_bit(a, perm.image(b)),
        });
        Self { mask }
    }
}

impl fmt::Display for CompositeToyState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.support().iter().map(|(a, b)| format!("[{a}(a)∧{b}(b)]")).collect();
        f.write_str(&parts.join("∨"))
    }
}

impl fmt::Debug for CompositeToyState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CompositeToyState({self})")
    }
}

impl Serialize for CompositeToyState {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let support: Vec<[Ontic; 2]> = self.support().into_iter().map(|(a, b)| [a, b]).collect();
        SupportDoc { support }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CompositeToyState {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = SupportDoc::<[i64; 2]>::deserialize(d)?;
        let pairs: Vec<(i64, i64)> = doc.support.into_iter().map(|[a, b]| (a, b)).collect();
        CompositeToyState::new(&pairs).map_err(serde::de::Error::custom)
    }
}

/// [j(a)∨k(a)] ∧ [ℓ(b)∨m(b)], or any other product of single-system states.
pub fn product(a: ToyState, b: ToyState) -> CompositeToyState {
    let mask = a
        .support()
        .into_iter()
        .flat_map(|x| b.support().into_iter().map(move |y| pair_bit(x, y)))
        .fold(0, |m, bit| m | bit);
    CompositeToyState { mask }
}

/// Support {(i, pairing(i))}: the two systems are known to be related by
/// `pairing` but neither state is known.
pub fn make_correlated(pairing: ToyPermutation) -> CompositeToyState {
    let mask = ONTIC_STATES.iter().fold(0, |m, &i| m | pair_bit(i, pairing.image(i)));
    CompositeToyState { mask }
}

/// What Alice learns by measuring her half of a composite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteeringResult {
    #[serde(serialize_with = "ser_rational")]
    pub probability: BigRational,
    /// Joint support conditioned on Alice's outcome, before any disturbance.
    pub conditioned: CompositeToyState,
    #[serde(serialize_with = "ser_rational_array")]
    pub bob_marginal: [BigRational; 4],
    /// Bob's inferred knowledge state, if it is knowledge balanced.
    pub bob_knowledge: Option<ToyState>,
    /// Joint state after Alice's system is resampled within her outcome block.
    pub post_disturbance: CompositeToyState,
}

fn ser_rational<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(v))
}

fn ser_rational_array<S: Serializer>(v: &[BigRational; 4], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(format_rational))
}

fn check_block(meas: ToyMeasurement, block: ToyState) -> Result<(), ToyError> {
    if meas.has_block(block) {
        Ok(())
    } else {
        Err(ToyError::UnknownBlock)
    }
}

/// Alice measures her subsystem and obtains `block`.
pub fn steering_inference(
    state: CompositeToyState,
    meas: ToyMeasurement,
    block: ToyState,
) -> Result<SteeringResult, ToyError> {
    check_block(meas, block)?;
    let kept: u16 = state
        .support()
        .into_iter()
        .filter(|&(a, _)| block.contains(a))
        .fold(0, |m, (a, b)| m | pair_bit(a, b));
    let conditioned =
        CompositeToyState::from_mask(kept).map_err(|_| ToyError::ImpossibleOutcome)?;
    let probability = BigRational::new(conditioned.len().into(), state.len().into());
    let bob_marginal = conditioned.marginal(Subsystem::Bob);
    let bob_mask = ONTIC_STATES
        .iter()
        .filter(|&&l| bob_marginal[idx(l)].is_positive())
        .fold(0u8, |m, &l| m | (1 << (l - 1)));
    let bob_knowledge = ToyState::from_mask(bob_mask).ok();

    let prior = conditioned.joint();
    let share = BigRational::new(1.into(), 2.into());
    let mut post = zero_joint();
    for (a, b) in conditioned.support() {
        for a2 in block.support() {
            post[idx(a2)][idx(b)] += &prior[idx(a)][idx(b)] * &share;
        }
    }
    let post_disturbance = CompositeToyState::from_joint(&post)?;
    Ok(SteeringResult { probability, conditioned, bob_marginal, bob_knowledge, post_disturbance })
}

/// Joint pairs consistent with Alice's outcome sequence when every outcome is
/// read as a fact about the ontic state held before the first measurement,
/// that is, conditioning sequentially with no disturbance in between.
pub fn retrodict(
    state: CompositeToyState,
    outcomes: &[(ToyMeasurement, ToyState)],
) -> Result<CompositeToyState, ToyError> {
    let mut mask = state.mask;
    for &(meas, block) in outcomes {
        check_block(meas, block)?;
        mask = state
            .support()
            .into_iter()
            .filter(|&(a, b)| mask & pair_bit(a, b) != 0 && block.contains(a))
            .fold(0, |m, (a, b)| m | pair_bit(a, b));
    }
    CompositeToyState::from_mask(mask).map_err(|_| ToyError::ImpossibleOutcome)
}

/// Posterior over the initial ontic pair given Alice's outcome sequence, when
/// each measurement resamples her system uniformly within its outcome block.
pub fn bayesian_retrodiction(
    state: CompositeToyState,
    outcomes: &[(ToyMeasurement, ToyState)],
) -> Result<BTreeMap<(Ontic, Ontic), BigRational>, ToyError> {
    let half = BigRational::new(1.into(), 2.into());
    let mut joint = BTreeMap::new();
    for (a, b) in state.support() {
        let mut alice = [BigRational::zero(), BigRational::zero(), BigRational::zero(), BigRational::zero()];
        alice[idx(a)] = BigRational::one();
        let mut likelihood = BigRational::one();
        for &(meas, block) in outcomes {
            check_block(meas, block)?;
            let p: BigRational = block.support().iter().map(|&l| alice[idx(l)].clone()).sum();
            likelihood *= &p;
            alice = std::array::from_fn(|k| {
                if block.contains(k as Ontic + 1) {
                    half.clone()
                } else {
                    BigRational::zero()
                }
            });
        }
        if likelihood.is_positive() {
            joint.insert((a, b), likelihood);
        }
    }
    let total: BigRational = joint.values().sum();
    if total.is_zero() {
        return Err(ToyError::ImpossibleOutcome);
    }
    Ok(joint.into_iter().map(|(k, v)| (k, v / &total)).collect())
}

/// How Alice's ontic state changes after her measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisturbanceRule {
    /// Uniform resampling within the outcome block.
    UniformResample,
    /// Deterministic jump to the smallest ontic state of the block.
    CollapseToMin,
}

/// Bob's outcome distribution for one of his measurements, given Alice's choice.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BobStatistics {
    pub alice: String,
    pub bob: String,
    pub blocks: Vec<ToyState>,
    #[serde(serialize_with = "ser_rational_vec")]
    pub probabilities: Vec<BigRational>,
}

fn ser_rational_vec<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(format_rational))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoSignalingReport {
    pub rule: DisturbanceRule,
    pub rows: Vec<BobStatistics>,
    /// Largest spread, over Bob's measurements and outcomes, of his outcome
    /// probability across Alice's choices.
    #[serde(serialize_with = "ser_rational")]
    pub max_variation: BigRational,
}

fn after_alice(state: CompositeToyState, meas: ToyMeasurement, rule: DisturbanceRule) -> Joint {
    let prior = state.joint();
    let half = BigRational::new(1.into(), 2.into());
    let mut post = zero_joint();
    for (a, b) in state.support() {
        let block = meas.block_of(a);
        let w = &prior[idx(a)][idx(b)];
        match rule {
            DisturbanceRule::UniformResample => {
                for a2 in block.support() {
                    post[idx(a2)][idx(b)] += w * &half;
                }
            }
            DisturbanceRule::CollapseToMin => {
                post[idx(block.support()[0])][idx(b)] += w;
            }
        }
    }
    post
}

/// For each Alice measurement, enumerates the joint state after her
/// measurement and disturbance, then Bob's outcome distribution for each of
/// his three standard measurements.
pub fn no_signaling_check(
    state: CompositeToyState,
    alice_options: &[ToyMeasurement],
    rule: DisturbanceRule,
) -> NoSignalingReport {
    let mut rows = Vec::new();
    for &alice in alice_options {
        let joint = after_alice(state, alice, rule);
        for bob in ToyMeasurement::standard() {
            let blocks = bob.blocks().to_vec();
            let probabilities = blocks
                .iter()
                .map(|blk| {
                    joint
                        .iter()
                        .flat_map(|row| {
                            blk.support().into_iter().map(move |l| row[idx(l)].clone())
                        })
                        .sum()
                })
                .collect();
            rows.push(BobStatistics {
                alice: alice.to_string(),
                bob: bob.to_string(),
                blocks,
                probabilities,
            });
        }
    }
    let mut max_variation = BigRational::zero();
    for bob in ToyMeasurement::standard() {
        let name = bob.to_string();
        let same: Vec<&BobStatistics> = rows.iter().filter(|r| r.bob == name).collect();
        for k in 0..2 {
            for x in &same {
                for y in &same {
                    let d = (&x.probabilities[k] - &y.probabilities[k]).abs();
                    if d > max_variation {
                        max_variation = d;
                    }
                }
            }
        }
    }
    NoSignalingReport { rule, rows, max_variation }
}
