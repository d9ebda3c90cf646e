//! The PBR scenario as a linear feasibility problem.
//!
//! Two qubits are prepared independently in |0⟩ or |+⟩ and measured in the
//! entangled basis 𝓡 = {φ₁, …, φ₄}, where each φ_k is orthogonal to the
//! product preparation Ψ_k. An ontological model with single-system ontic
//! space Λ₁ of size n assigns each single-qubit preparation a distribution
//! over Λ₁, the product preparations the product distributions, and the
//! measurement response functions ξ(k | λ₁, λ₂).
//!
//! The joint problem is bilinear, so the search is split in two: an outer grid
//! over epistemic weights (multiples of 1/D), and for each grid point an exact
//! linear feasibility problem over ξ. An infeasible grid point comes with an
//! exact Farkas certificate, which for forced-overlap points is the chain
//! "Born probability 0 for (Ψ_k, φ_k) forces ξ(k|λ*,λ*) = 0 for every k,
//! contradicting Σ_k ξ(k|λ*,λ*) = 1".

pub mod chsh;
mod null;

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{format_rational, serde_rational, ExactComplex};
use crate::lp::{LinearSystem, LpOutcome};
use crate::om::{
    BornTable, EpistemicState, ModelDocument, ModelError, OnticSpace, OntologicalModel,
    Probability, ReproductionReport, ResponseFunction,
};
use crate::quantum::{tensor, Ket, PmState};

pub use null::{null_outcome_extension, NullWitnessCheck};

/// Largest single-system ontic space the search accepts.
pub const MAX_LAMBDA_SIZE: usize = 8;

pub const MEASUREMENT_LABEL: &str = "R";
pub const NULL_OUTCOME: &str = "null";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PbrError {
    #[error("scenario self-check failed: {0}")]
    SelfCheck(String),
    #[error("overlap floor q must lie in (0, 1], got {0}")]
    BadQ(String),
    #[error("ontic space size {0} outside 1..={MAX_LAMBDA_SIZE}")]
    LambdaSize(usize),
    #[error("grid denominator must be positive")]
    BadDenominator,
    #[error("no grid point satisfies the constraints")]
    EmptyGrid,
    #[error("null budget must lie in [0, 1), got {0}")]
    BadBudget(String),
    #[error("epistemic states live on different ontic spaces")]
    SpaceMismatch,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Preparations Ψ₁..Ψ₄ = |00⟩, |0+⟩, |+0⟩, |++⟩ and the basis 𝓡.
#[derive(Debug, Clone, PartialEq)]
pub struct PbrScenario {
    pub preparations: [Ket<ExactComplex>; 4],
    pub basis: [Ket<ExactComplex>; 4],
    /// `born[j][k] = |⟨φ_k|Ψ_j⟩|²`.
    pub born: [[BigRational; 4]; 4],
}

/// Which single-qubit preparations make up Ψ_j: `false` is |0⟩, `true` is |+⟩.
pub const PREPARATION_FACTORS: [(bool, bool); 4] =
    [(false, false), (false, true), (true, false), (true, true)];

pub fn preparation_label(j: usize) -> String {
    format!("psi{}", j + 1)
}

pub fn outcome_label(k: usize) -> String {
    format!("phi{}", k + 1)
}

pub fn build_pbr_scenario() -> Result<PbrScenario, PbrError> {
    let single = |plus: bool| if plus { PmState::Plus.ket() } else { PmState::Zero.ket() };
    let preparations = PREPARATION_FACTORS.map(|(a, b)| tensor(&single(a), &single(b)));
    let pm = |s: PmState| s.ket::<ExactComplex>();
    let entangled = |a: PmState, b: PmState, c: PmState, d: PmState| {
        tensor(&pm(a), &pm(b))
            .superpose(&ExactComplex::from_int(1), &tensor(&pm(c), &pm(d)))
            .map_err(|e| PbrError::SelfCheck(e.to_string()))
    };
    use PmState::{Minus, One, Plus, Zero};
    let basis = [
        entangled(Zero, One, One, Zero)?,
        entangled(Zero, Minus, One, Plus)?,
        entangled(Plus, One, Minus, Zero)?,
        entangled(Plus, Minus, Minus, Plus)?,
    ];
    for (j, a) in basis.iter().enumerate() {
        for (k, b) in basis.iter().enumerate() {
            let g = a.inner(b).map_err(|e| PbrError::SelfCheck(e.to_string()))?;
            let expected = if j == k { ExactComplex::from_int(1) } else { ExactComplex::from_int(0) };
            if g != expected {
                return Err(PbrError::SelfCheck(format!("⟨φ{}|φ{}⟩ = {g}", j + 1, k + 1)));
            }
        }
    }
    let mut born: [[BigRational; 4]; 4] = Default::default();
    for (j, psi) in preparations.iter().enumerate() {
        for (k, phi) in basis.iter().enumerate() {
            let o = phi.overlap(psi).map_err(|e| PbrError::SelfCheck(e.to_string()))?;
            born[j][k] = o
                .as_rational()
                .cloned()
                .ok_or_else(|| PbrError::SelfCheck(format!("irrational overlap {o}")))?;
        }
        if !born[j][j].is_zero() {
            return Err(PbrError::SelfCheck(format!("⟨φ{0}|Ψ{0}⟩ ≠ 0", j + 1)));
        }
    }
    Ok(PbrScenario { preparations, basis, born })
}

impl PbrScenario {
    pub fn born_table(&self) -> BornTable {
        let mut table = BTreeMap::new();
        for j in 0..4 {
            for k in 0..4 {
                table.insert(
                    (preparation_label(j), MEASUREMENT_LABEL.to_string(), outcome_label(k)),
                    Probability::Exact(self.born[j][k].clone()),
                );
            }
        }
        table
    }
}

/// Result of testing the overlap lemma for one pair of single-system states.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaLemma {
    pub holds: bool,
    /// Index of an ontic state carrying at least q under both preparations.
    pub lambda: Option<usize>,
    /// Lower bound q² on the mass every product preparation puts on (λ*, λ*).
    #[serde(with = "option_rational")]
    pub joint_bound: Option<BigRational>,
    /// Mass each of Ψ₁..Ψ₄ actually puts on (λ*, λ*).
    #[serde(with = "serde_rational::vec")]
    pub joint_masses: Vec<BigRational>,
}

mod option_rational {
    use num_rational::BigRational;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(r) => s.serialize_str(&crate::field::format_rational(r)),
            None => s.serialize_none(),
        }
    }
}

fn check_q(q: &BigRational) -> Result<(), PbrError> {
    if !q.is_positive() || *q > BigRational::one() {
        return Err(PbrError::BadQ(format_rational(q)));
    }
    Ok(())
}

pub fn check_delta_lemma(
    p0: &EpistemicState,
    pplus: &EpistemicState,
    q: &BigRational,
) -> Result<DeltaLemma, PbrError> {
    check_q(q)?;
    if p0.space() != pplus.space() {
        return Err(PbrError::SpaceMismatch);
    }
    let lambda = (0..p0.space().len()).find(|&l| p0.weight(l) >= q && pplus.weight(l) >= q);
    let Some(star) = lambda else {
        return Ok(DeltaLemma { holds: false, lambda: None, joint_bound: None, joint_masses: vec![] });
    };
    let singles = [p0.weight(star), pplus.weight(star)];
    let joint_masses = PREPARATION_FACTORS
        .map(|(a, b)| singles[usize::from(a)] * singles[usize::from(b)])
        .to_vec();
    Ok(DeltaLemma { holds: true, lambda: Some(star), joint_bound: Some(q * q), joint_masses })
}

/// Settings of the two-stage search.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityProblem {
    pub lambda_size: usize,
    pub grid_denominator: u32,
    pub q: BigRational,
    /// Require some λ* with p₀(λ*) ≥ q and p₊(λ*) ≥ q.
    pub force_overlap: bool,
    /// Replace product preparations by arbitrary joint distributions that
    /// merely share one ontic pair of positive mass.
    pub relax_product: bool,
    /// Joint distributions sampled in relaxed mode.
    pub relaxed_samples: usize,
    pub seed: u64,
}

impl Default for FeasibilityProblem {
    fn default() -> Self {
        Self {
            lambda_size: 4,
            grid_denominator: 4,
            q: BigRational::new(1.into(), 4.into()),
            force_overlap: true,
            relax_product: false,
            relaxed_samples: 200,
            seed: 0,
        }
    }
}

impl FeasibilityProblem {
    pub(crate) fn validate(&self) -> Result<(), PbrError> {
        if self.lambda_size == 0 || self.lambda_size > MAX_LAMBDA_SIZE {
            return Err(PbrError::LambdaSize(self.lambda_size));
        }
        if self.grid_denominator == 0 {
            return Err(PbrError::BadDenominator);
        }
        check_q(&self.q)
    }
}

/// All vectors of n nonnegative multiples of 1/D summing to 1, in
/// descending lexicographic order.
pub fn simplex_grid(n: usize, denominator: u32) -> Vec<Vec<BigRational>> {
    fn rec(n: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for v in (0..=left).rev() {
            prefix.push(v);
            rec(n - 1, left - v, prefix, out);
            prefix.pop();
        }
    }
    let mut raw = Vec::new();
    if n > 0 {
        rec(n, denominator, &mut Vec::new(), &mut raw);
    }
    let d = BigRational::from_integer(denominator.into());
    raw.into_iter()
        .map(|v| v.into_iter().map(|x| BigRational::from_integer(x.into()) / &d).collect())
        .collect()
}

/// The outer grid. Jointly relabelling Λ₁ maps feasible points to feasible
/// points, so p₀ is restricted to nonincreasing vectors.
pub fn weight_grid(problem: &FeasibilityProblem) -> Vec<(Vec<BigRational>, Vec<BigRational>)> {
    let all = simplex_grid(problem.lambda_size, problem.grid_denominator);
    let canonical: Vec<&Vec<BigRational>> =
        all.iter().filter(|p| p.windows(2).all(|w| w[0] >= w[1])).collect();
    let mut out = Vec::new();
    for p0 in canonical {
        for pplus in &all {
            let overlapping = p0.iter().zip(pplus).any(|(a, b)| *a >= problem.q && *b >= problem.q);
            if !problem.force_overlap || overlapping {
                out.push((p0.clone(), pplus.clone()));
            }
        }
    }
    out
}

/// Joint preparation distributions, indexed `[j][λ₁ * n + λ₂]`.
pub type Joints = [Vec<BigRational>; 4];

pub fn product_joints(p0: &[BigRational], pplus: &[BigRational]) -> Joints {
    let n = p0.len();
    PREPARATION_FACTORS.map(|(a, b)| {
        let first = if a { pplus } else { p0 };
        let second = if b { pplus } else { p0 };
        (0..n * n).map(|c| &first[c / n] * &second[c % n]).collect()
    })
}

/// ξ variables for every ontic pair and outcome, optionally with null.
pub(crate) struct ResponseLp {
    pub system: LinearSystem,
    pub n: usize,
    pub null_vars: BTreeMap<usize, usize>,
    pub outc_rows: Vec<usize>,
    pub born_rows: [[usize; 4]; 4],
}

pub(crate) fn xi_var(c: usize, k: usize) -> usize {
    c * 4 + k
}

/// Builds Σ_k ξ(k|c) (+ ξ_∅(c)) = 1 for every pair and
/// Σ_c p_j(c) ξ(k|c) (+ B_jk Σ_c p_j(c) ξ_∅(c)) = B_jk for every (j, k).
pub(crate) fn build_response_lp(
    born: &[[BigRational; 4]; 4],
    joints: &Joints,
    n: usize,
    null_region: &[usize],
) -> ResponseLp {
    let pairs = n * n;
    let mut system = LinearSystem::new(pairs * 4);
    let null_vars: BTreeMap<usize, usize> =
        null_region.iter().map(|&c| (c, system.add_var())).collect();
    let outc_rows = (0..pairs)
        .map(|c| {
            let terms = (0..4)
                .map(|k| (xi_var(c, k), BigRational::one()))
                .chain(null_vars.get(&c).map(|&v| (v, BigRational::one())));
            system.add_eq(terms, BigRational::one())
        })
        .collect();
    let mut born_rows = [[0; 4]; 4];
    for j in 0..4 {
        for k in 0..4 {
            let terms = (0..pairs)
                .filter(|&c| joints[j][c].is_positive())
                .map(|c| (xi_var(c, k), joints[j][c].clone()))
                .chain(null_vars.iter().filter(|(c, _)| joints[j][**c].is_positive()).map(
                    |(&c, &v)| (v, &born[j][k] * &joints[j][c]),
                ))
                .collect::<Vec<_>>();
            born_rows[j][k] = system.add_eq(terms, born[j][k].clone());
        }
    }
    ResponseLp { system, n, null_vars, outc_rows, born_rows }
}

/// Exhibited contradiction for an infeasible grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    /// (j, k), 1-based: preparation Ψ_j and outcome φ_k with Born probability 0.
    pub pair: [usize; 2],
    /// (λ₁, λ₂), 1-based: the ontic pair where the model is forced to be positive.
    pub lambda: [usize; 2],
    pub violated_equation: String,
}

pub const VIOLATED_EQUATION: &str = "Born=0 vs model>0";

/// Feasible ξ for one grid point, with the weights it was found at.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub n: usize,
    pub joints: Joints,
    pub single: Option<(Vec<BigRational>, Vec<BigRational>)>,
    /// `xi[c][k]`.
    pub xi: Vec<[BigRational; 4]>,
    /// ξ_∅(c) where a null outcome is allowed.
    pub null: Option<Vec<BigRational>>,
}

fn pair_label(n: usize, c: usize) -> String {
    format!("{},{}", c / n + 1, c % n + 1)
}

impl Witness {
    /// The witness as an ontological model over ontic pairs.
    pub fn to_model(&self) -> Result<OntologicalModel, PbrError> {
        let n = self.n;
        let space = OnticSpace::new((0..n * n).map(|c| pair_label(n, c)))?;
        let preparations = (0..4)
            .map(|j| Ok((preparation_label(j), EpistemicState::new(space.clone(), self.joints[j].clone())?)))
            .collect::<Result<_, ModelError>>()?;
        let mut outcomes: Vec<String> = (0..4).map(outcome_label).collect();
        let mut table: Vec<Vec<BigRational>> =
            (0..4).map(|k| self.xi.iter().map(|row| row[k].clone()).collect()).collect();
        if let Some(null) = &self.null {
            outcomes.push(NULL_OUTCOME.to_string());
            table.push(null.clone());
        }
        let response = ResponseFunction::new(space.clone(), outcomes, table)?;
        let measurements = BTreeMap::from([(MEASUREMENT_LABEL.to_string(), response)]);
        Ok(OntologicalModel::new(space, preparations, measurements)?)
    }

    /// Replays the witness through the reproduction check against the
    /// scenario's exact Born table.
    pub fn replay(&self, scenario: &PbrScenario) -> Result<ReproductionReport, PbrError> {
        let mut table = scenario.born_table();
        if self.null.is_some() {
            for j in 0..4 {
                table.insert(
                    (preparation_label(j), MEASUREMENT_LABEL.into(), NULL_OUTCOME.into()),
                    Probability::Exact(BigRational::zero()),
                );
            }
        }
        Ok(self.to_model()?.reproduction_check(&table)?)
    }
}

/// What was searched.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSummary {
    pub lambda_size: usize,
    pub grid_denominator: u32,
    #[serde(with = "serde_rational")]
    pub q: BigRational,
    pub force_overlap: bool,
    pub relax_product: bool,
    pub points_checked: usize,
    pub scope: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum VerdictBody {
    Feasible(Box<Witness>),
    Infeasible { certificate: Certificate, farkas: Vec<BigRational> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityVerdict {
    pub body: VerdictBody,
    pub search: SearchSummary,
}

impl FeasibilityVerdict {
    pub fn is_feasible(&self) -> bool {
        matches!(self.body, VerdictBody::Feasible(_))
    }

    pub fn witness(&self) -> Option<&Witness> {
        match &self.body {
            VerdictBody::Feasible(w) => Some(w),
            VerdictBody::Infeasible { .. } => None,
        }
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match &self.body {
            VerdictBody::Infeasible { certificate, .. } => Some(certificate),
            VerdictBody::Feasible(_) => None,
        }
    }

    pub fn to_document(&self) -> Result<VerdictDocument, PbrError> {
        Ok(match &self.body {
            VerdictBody::Feasible(w) => VerdictDocument {
                status: VerdictStatus::Feasible,
                witness: Some(w.to_model()?.to_document()),
                certificate: None,
                search: Some(self.search.clone()),
            },
            VerdictBody::Infeasible { certificate, .. } => VerdictDocument {
                status: VerdictStatus::Infeasible,
                witness: None,
                certificate: Some(certificate.clone()),
                search: Some(self.search.clone()),
            },
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictStatus {
    Feasible,
    Infeasible,
}

impl fmt::Display for VerdictStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictStatus::Feasible => "feasible",
            VerdictStatus::Infeasible => "infeasible",
        })
    }
}

/// JSON wire form of a verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerdictDocument {
    pub status: VerdictStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<ModelDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchSummary>,
}

impl VerdictDocument {
    /// Parses and checks that the payload agrees with the status. A witness
    /// must be a valid model.
    pub fn from_json(text: &str) -> Result<Self, PbrError> {
        let doc: VerdictDocument = serde_json::from_str(text)
            .map_err(|e| PbrError::Model(ModelError::Document(e.to_string())))?;
        let consistent = match doc.status {
            VerdictStatus::Feasible => doc.witness.is_some() && doc.certificate.is_none(),
            VerdictStatus::Infeasible => doc.witness.is_none() && doc.certificate.is_some(),
        };
        if !consistent {
            return Err(PbrError::Model(ModelError::Document(
                "payload does not match status".into(),
            )));
        }
        if let Some(w) = &doc.witness {
            OntologicalModel::from_document(w.clone())?;
        }
        if let Some(c) = &doc.certificate {
            if c.pair.iter().any(|&x| !(1..=4).contains(&x)) || c.lambda.contains(&0) {
                return Err(PbrError::Model(ModelError::Document("certificate out of range".into())));
            }
        }
        Ok(doc)
    }
}

/// Outcome of the inner problem at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub enum PointVerdict {
    Feasible(Box<Witness>),
    Infeasible { certificate: Certificate, farkas: Vec<BigRational> },
}

/// Reads the (Ψ_j, φ_k, λ) chain out of a Farkas vector: the outcome-sum row
/// with negative multiplier names the ontic pair, and the heaviest zero-Born
/// row with positive multiplier and support there names (j, k).
pub(crate) fn certificate_from_farkas(lp: &ResponseLp, born: &[[BigRational; 4]; 4], joints: &Joints, y: &[BigRational]) -> Certificate {
    let n = lp.n;
    let c = lp
        .outc_rows
        .iter()
        .position(|&r| y[r].is_negative())
        .unwrap_or(0);
    let mut best: Option<(BigRational, usize, usize)> = None;
    for j in 0..4 {
        for k in 0..4 {
            let r = lp.born_rows[j][k];
            if born[j][k].is_zero() && y[r].is_positive() && joints[j][c].is_positive() {
                let score = &y[r] * &joints[j][c];
                if best.as_ref().is_none_or(|(s, _, _)| score > *s) {
                    best = Some((score, j, k));
                }
            }
        }
    }
    let (j, k) = best.map(|(_, j, k)| (j, k)).unwrap_or((0, 0));
    Certificate {
        pair: [j + 1, k + 1],
        lambda: [c / n + 1, c % n + 1],
        violated_equation: VIOLATED_EQUATION.to_string(),
    }
}

pub(crate) fn solve_joints(
    scenario: &PbrScenario,
    joints: &Joints,
    n: usize,
    single: Option<(Vec<BigRational>, Vec<BigRational>)>,
) -> PointVerdict {
    let lp = build_response_lp(&scenario.born, joints, n, &[]);
    match lp.system.solve() {
        LpOutcome::Feasible(x) => {
            let xi = (0..n * n)
                .map(|c| std::array::from_fn(|k| x[xi_var(c, k)].clone()))
                .collect();
            PointVerdict::Feasible(Box::new(Witness { n, joints: joints.clone(), single, xi, null: None }))
        }
        LpOutcome::Infeasible(cert) => PointVerdict::Infeasible {
            certificate: certificate_from_farkas(&lp, &scenario.born, joints, &cert.y),
            farkas: cert.y,
        },
    }
}

/// The inner problem for fixed single-system weights.
pub fn solve_point(scenario: &PbrScenario, p0: &[BigRational], pplus: &[BigRational]) -> PointVerdict {
    let joints = product_joints(p0, pplus);
    solve_joints(scenario, &joints, p0.len(), Some((p0.to_vec(), pplus.to_vec())))
}

fn scope(problem: &FeasibilityProblem, points: usize) -> String {
    if problem.relax_product {
        format!(
            "{points} seeded joint distributions over a {0}x{0} ontic grid with a common positive pair",
            problem.lambda_size
        )
    } else {
        format!(
            "{points} weight assignments with denominator {} on a single-system ontic space of size {}",
            problem.grid_denominator, problem.lambda_size
        )
    }
}

/// Seeded joint distributions sharing one positive ontic pair.
pub fn sample_relaxed_joints(problem: &FeasibilityProblem) -> Vec<Joints> {
    let n = problem.lambda_size;
    let mut rng = ChaCha8Rng::seed_from_u64(problem.seed);
    let d = problem.grid_denominator.max(1);
    (0..problem.relaxed_samples)
        .map(|_| {
            let common = rng.gen_range(0..n * n);
            std::array::from_fn(|_| {
                let mut raw: Vec<u32> = (0..n * n).map(|_| rng.gen_range(0..=d)).collect();
                raw[common] = raw[common].max(1);
                let total: u32 = raw.iter().sum();
                raw.into_iter()
                    .map(|x| BigRational::new(x.into(), total.into()))
                    .collect()
            })
        })
        .collect()
}

/// Two-stage search over the grid. Returns the first feasible grid point in
/// grid order, or, when none exists, the certificate of the first point.
pub(crate) type Candidate = (Joints, Option<(Vec<BigRational>, Vec<BigRational>)>);

/// Grid points (product mode) or sampled joints (relaxed mode), in search order.
pub(crate) fn candidates(problem: &FeasibilityProblem) -> Vec<Candidate> {
    if problem.relax_product {
        sample_relaxed_joints(problem).into_iter().map(|j| (j, None)).collect()
    } else {
        weight_grid(problem)
            .into_iter()
            .map(|(p0, pplus)| (product_joints(&p0, &pplus), Some((p0, pplus))))
            .collect()
    }
}

pub(crate) fn summary(problem: &FeasibilityProblem, points: usize) -> SearchSummary {
    SearchSummary {
        lambda_size: problem.lambda_size,
        grid_denominator: problem.grid_denominator,
        q: problem.q.clone(),
        force_overlap: problem.force_overlap,
        relax_product: problem.relax_product,
        points_checked: points,
        scope: scope(problem, points),
    }
}

pub fn solve_feasibility(problem: &FeasibilityProblem) -> Result<FeasibilityVerdict, PbrError> {
    problem.validate()?;
    let scenario = build_pbr_scenario()?;
    let n = problem.lambda_size;
    let candidates = candidates(problem);
    let Some((first_joints, first_single)) = candidates.first() else {
        return Err(PbrError::EmptyGrid);
    };
    let found = candidates.par_iter().find_map_first(|(joints, single)| {
        match solve_joints(&scenario, joints, n, single.clone()) {
            PointVerdict::Feasible(w) => Some(w),
            PointVerdict::Infeasible { .. } => None,
        }
    });
    let body = match found {
        Some(w) => VerdictBody::Feasible(w),
        None => match solve_joints(&scenario, first_joints, n, first_single.clone()) {
            PointVerdict::Infeasible { certificate, farkas } => {
                VerdictBody::Infeasible { certificate, farkas }
            }
            PointVerdict::Feasible(_) => unreachable!("every candidate was found infeasible"),
        },
    };
    Ok(FeasibilityVerdict { body, search: summary(problem, candidates.len()) })
}
