//! The built-in inefficiency escape: a null outcome ∅ allowed where the
//! supports of the preparations overlap, with Born statistics reproduced
//! only after discarding null runs.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::{
    build_pbr_scenario, build_response_lp, candidates, certificate_from_farkas, format_rational,
    solve_feasibility, summary, xi_var, FeasibilityProblem, FeasibilityVerdict, Joints,
    PbrError, PbrScenario, PointVerdict, VerdictBody, Witness,
};
use crate::lp::LpOutcome;

/// Ontic pairs in the support of at least two preparations.
pub fn overlap_region(joints: &Joints) -> Vec<usize> {
    (0..joints[0].len())
        .filter(|&c| joints.iter().filter(|p| p[c].is_positive()).count() >= 2)
        .collect()
}

fn solve_null_point(
    scenario: &PbrScenario,
    joints: &Joints,
    n: usize,
    single: Option<(Vec<BigRational>, Vec<BigRational>)>,
    budget: &BigRational,
) -> PointVerdict {
    let region = overlap_region(joints);
    let mut lp = build_response_lp(&scenario.born, joints, n, &region);
    for p in joints {
        let terms: Vec<_> = lp
            .null_vars
            .iter()
            .filter(|(c, _)| p[**c].is_positive())
            .map(|(&c, &v)| (v, p[c].clone()))
            .collect();
        lp.system.add_le(terms, budget.clone());
    }
    match lp.system.solve() {
        LpOutcome::Feasible(x) => {
            let xi = (0..n * n)
                .map(|c| std::array::from_fn(|k| x[xi_var(c, k)].clone()))
                .collect();
            let null = (0..n * n)
                .map(|c| lp.null_vars.get(&c).map_or_else(BigRational::zero, |&v| x[v].clone()))
                .collect();
            PointVerdict::Feasible(Box::new(Witness {
                n,
                joints: joints.clone(),
                single,
                xi,
                null: Some(null),
            }))
        }
        LpOutcome::Infeasible(cert) => PointVerdict::Infeasible {
            certificate: certificate_from_farkas(&lp, &scenario.born, joints, &cert.y),
            farkas: cert.y,
        },
    }
}

/// How a null-outcome witness relates to the Born table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NullWitnessCheck {
    /// Probability of ∅ under each preparation.
    #[serde(serialize_with = "ser_vec")]
    pub null_probabilities: Vec<BigRational>,
    /// Statistics conditioned on a non-null outcome equal Born exactly.
    pub post_selected_matches: bool,
    /// Unconditioned statistics (∅ counted as an outcome) equal Born.
    pub unconditioned_matches: bool,
}

fn ser_vec<S: serde::Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(format_rational))
}

impl Witness {
    pub fn null_check(&self, scenario: &PbrScenario) -> Result<NullWitnessCheck, PbrError> {
        let zeros = vec![BigRational::zero(); self.xi.len()];
        let null = self.null.as_ref().unwrap_or(&zeros);
        let mut null_probabilities = Vec::with_capacity(4);
        let mut post_selected_matches = true;
        for (j, p) in self.joints.iter().enumerate() {
            let n_j: BigRational = p.iter().zip(null).map(|(a, b)| a * b).sum();
            let kept = BigRational::one() - &n_j;
            for k in 0..4 {
                let raw: BigRational = p.iter().zip(&self.xi).map(|(a, xi)| a * &xi[k]).sum();
                if kept.is_zero() || raw / &kept != scenario.born[j][k] {
                    post_selected_matches = false;
                }
            }
            null_probabilities.push(n_j);
        }
        let unconditioned_matches = self.replay(scenario)?.all_match();
        Ok(NullWitnessCheck { null_probabilities, post_selected_matches, unconditioned_matches })
    }
}

/// Result of the null-outcome search.
#[derive(Debug, Clone, PartialEq)]
pub struct NullOutcomeVerdict {
    pub budget: BigRational,
    pub verdict: FeasibilityVerdict,
    pub check: Option<NullWitnessCheck>,
}

/// Allows ξ_∅ on the joint overlap region, replaces the outcome sum by one
/// including ∅, requires Born statistics after discarding ∅, and caps the
/// null probability of every preparation at `budget`. A zero budget is the
/// plain feasibility problem.
pub fn null_outcome_extension(
    problem: &FeasibilityProblem,
    budget: &BigRational,
) -> Result<NullOutcomeVerdict, PbrError> {
    if budget.is_negative() || *budget >= BigRational::one() {
        return Err(PbrError::BadBudget(format_rational(budget)));
    }
    if budget.is_zero() {
        return Ok(NullOutcomeVerdict {
            budget: budget.clone(),
            verdict: solve_feasibility(problem)?,
            check: None,
        });
    }
    problem.validate()?;
    let scenario = build_pbr_scenario()?;
    let n = problem.lambda_size;
    let points = candidates(problem);
    let Some((first_joints, first_single)) = points.first() else {
        return Err(PbrError::EmptyGrid);
    };
    let found = points.par_iter().find_map_first(|(joints, single)| {
        match solve_null_point(&scenario, joints, n, single.clone(), budget) {
            PointVerdict::Feasible(w) => Some(w),
            PointVerdict::Infeasible { .. } => None,
        }
    });
    let (body, check) = match found {
        Some(w) => {
            let check = w.null_check(&scenario)?;
            (VerdictBody::Feasible(w), Some(check))
        }
        None => match solve_null_point(&scenario, first_joints, n, first_single.clone(), budget) {
            PointVerdict::Infeasible { certificate, farkas } => {
                (VerdictBody::Infeasible { certificate, farkas }, None)
            }
            PointVerdict::Feasible(_) => unreachable!("every candidate was found infeasible"),
        },
    };
    Ok(NullOutcomeVerdict {
        budget: budget.clone(),
        verdict: FeasibilityVerdict { body, search: summary(problem, points.len()) },
        check,
    })
}
