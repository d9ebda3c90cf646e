use epistemic_core::field::ratio;
use epistemic_core::lp::{LinearSystem, LpOutcome};
use epistemic_core::pbr::{
    build_pbr_scenario, null_outcome_extension, product_joints, simplex_grid, solve_feasibility, solve_point,
    weight_grid, FeasibilityProblem, PointVerdict, VerdictDocument,
};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn grid_point() -> impl Strategy<Value = Vec<BigRational>> {
    prop::sample::select(simplex_grid(4, 4))
}

fn permuted(v: &[BigRational], order: &[usize]) -> Vec<BigRational> {
    order.iter().map(|&i| v[i].clone()).collect()
}

/// Weights with disjoint supports, which always admit a model.
fn disjoint_pair() -> impl Strategy<Value = (Vec<BigRational>, Vec<BigRational>)> {
    (1usize..4, prop::collection::vec(1i64..4, 4)).prop_map(|(cut, raw)| {
        let norm = |range: std::ops::Range<usize>| {
            let total: i64 = raw[range.clone()].iter().sum();
            (0..4)
                .map(|i| if range.contains(&i) { ratio(raw[i], total) } else { BigRational::zero() })
                .collect::<Vec<_>>()
        };
        (norm(0..cut), norm(cut..4))
    })
}

fn is_feasible(v: &PointVerdict) -> bool {
    matches!(v, PointVerdict::Feasible(_))
}

#[derive(Debug, Clone)]
struct RandomSystem {
    vars: usize,
    rows: Vec<(Vec<i64>, i64)>,
    extra: Vec<(Vec<i64>, i64)>,
}

fn random_system() -> impl Strategy<Value = RandomSystem> {
    (2usize..5).prop_flat_map(|vars| {
        let row = (prop::collection::vec(-3i64..4, vars), -3i64..4);
        (
            Just(vars),
            prop::collection::vec(row.clone(), 1..4),
            prop::collection::vec(row, 1..3),
        )
            .prop_map(|(vars, rows, extra)| RandomSystem { vars, rows, extra })
    })
}

fn assemble(vars: usize, rows: &[(Vec<i64>, i64)]) -> LinearSystem {
    let mut sys = LinearSystem::new(vars);
    for (coeffs, rhs) in rows {
        sys.add_eq(
            coeffs.iter().enumerate().map(|(i, &c)| (i, ratio(c, 1))),
            ratio(*rhs, 1),
        );
    }
    sys
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn verdict_stable_under_relabeling(p0 in grid_point(), pplus in grid_point(), order in Just(vec![0usize, 1, 2, 3]).prop_shuffle()) {
        let scenario = build_pbr_scenario().unwrap();
        let a = solve_point(&scenario, &p0, &pplus);
        let b = solve_point(&scenario, &permuted(&p0, &order), &permuted(&pplus, &order));
        prop_assert_eq!(is_feasible(&a), is_feasible(&b));
    }

    #[test]
    fn certificates_name_a_zero_born_pair(p0 in grid_point(), pplus in grid_point()) {
        let scenario = build_pbr_scenario().unwrap();
        if let PointVerdict::Infeasible { certificate, .. } = solve_point(&scenario, &p0, &pplus) {
            let [j, k] = certificate.pair;
            prop_assert!(scenario.born[j - 1][k - 1].is_zero());
            let joints = product_joints(&p0, &pplus);
            let c = (certificate.lambda[0] - 1) * 4 + certificate.lambda[1] - 1;
            prop_assert!(joints[j - 1][c].is_positive());
        }
    }

    #[test]
    fn feasible_witnesses_replay((p0, pplus) in disjoint_pair(), swap in any::<bool>()) {
        let scenario = build_pbr_scenario().unwrap();
        let (a, b) = if swap { (pplus, p0) } else { (p0, pplus) };
        let PointVerdict::Feasible(w) = solve_point(&scenario, &a, &b) else {
            return Err(TestCaseError::fail("disjoint weights must be feasible"));
        };
        let report = w.replay(&scenario).unwrap();
        prop_assert_eq!(report.rows.len(), 16);
        prop_assert!(report.all_match());
    }

    #[test]
    fn adding_constraints_preserves_infeasibility(s in random_system()) {
        let base = assemble(s.vars, &s.rows);
        let mut all = s.rows.clone();
        all.extend(s.extra.iter().cloned());
        let bigger = assemble(s.vars, &all);
        match base.solve() {
            LpOutcome::Infeasible(cert) => {
                prop_assert!(base.is_farkas(&cert.y));
                let mut padded = cert.y.clone();
                padded.resize(bigger.rows().len(), BigRational::zero());
                prop_assert!(bigger.is_farkas(&padded));
                prop_assert!(matches!(bigger.solve(), LpOutcome::Infeasible(_)));
            }
            LpOutcome::Feasible(x) => {
                prop_assert!(base.is_solution(&x));
                match bigger.solve() {
                    LpOutcome::Feasible(y) => {
                        prop_assert!(bigger.is_solution(&y));
                        prop_assert!(base.is_solution(&y));
                    }
                    LpOutcome::Infeasible(cert) => prop_assert!(bigger.is_farkas(&cert.y)),
                }
            }
        }
    }
}

#[test]
fn scenario_is_exact() {
    let scenario = build_pbr_scenario().unwrap();
    for j in 0..4 {
        assert!(scenario.born[j][j].is_zero());
        assert_eq!(scenario.born[j].iter().sum::<BigRational>(), BigRational::one());
        for k in 0..4 {
            assert!(scenario.born[j][k] == ratio(0, 1) || scenario.born[j][k] == ratio(1, 4) || scenario.born[j][k] == ratio(1, 2));
            assert_eq!(scenario.preparations[j].norm_sqr(), scenario.basis[k].norm_sqr());
        }
    }
}

#[test]
fn default_search_is_infeasible_with_certificate() {
    let verdict = solve_feasibility(&FeasibilityProblem::default()).unwrap();
    assert!(!verdict.is_feasible());
    let text = serde_json::to_string(&verdict.to_document().unwrap()).unwrap();
    let doc = VerdictDocument::from_json(&text).unwrap();
    assert_eq!(doc.certificate.as_ref(), verdict.certificate());
}

#[test]
fn shrinking_null_budget_recovers_the_plain_verdict() {
    let problem = FeasibilityProblem::default();
    let plain = solve_feasibility(&problem).unwrap();
    let budgets = [ratio(1, 2), ratio(1, 4), ratio(1, 8), ratio(0, 1)];
    let verdicts: Vec<_> = budgets
        .iter()
        .map(|b| null_outcome_extension(&problem, b).unwrap())
        .collect();
    for v in &verdicts {
        if let Some(check) = &v.check {
            assert!(check.post_selected_matches);
            assert!(check.null_probabilities.iter().all(|p| p <= &v.budget));
        }
    }
    let last = verdicts.last().unwrap();
    assert_eq!(last.verdict.is_feasible(), plain.is_feasible());
    assert_eq!(last.verdict.certificate(), plain.certificate());
    let flips = verdicts.windows(2).filter(|w| w[0].verdict.is_feasible() != w[1].verdict.is_feasible()).count();
    assert!(flips <= 1, "feasibility must change at most once as the budget shrinks");
    println!(
        "null budget verdicts: {:?}",
        verdicts.iter().map(|v| v.verdict.is_feasible()).collect::<Vec<_>>()
    );
}

/// Every response row with entries in multiples of 1/4 at the shared pair
/// gives some outcome positive weight where a preparation with zero Born
/// probability for that outcome also has weight.
#[test]
fn forced_overlap_matches_brute_force_rows() {
    let scenario = build_pbr_scenario().unwrap();
    let mut rows = Vec::new();
    for a in 0..=4i64 {
        for b in 0..=4 - a {
            for c in 0..=4 - a - b {
                rows.push([a, b, c, 4 - a - b - c].map(|x| ratio(x, 4)));
            }
        }
    }
    assert_eq!(rows.len(), 35);
    let points = weight_grid(&FeasibilityProblem::default());
    assert!(!points.is_empty());
    for (p0, pplus) in points {
        let star = (0..4).find(|&l| p0[l] >= ratio(1, 4) && pplus[l] >= ratio(1, 4)).unwrap();
        let joints = product_joints(&p0, &pplus);
        let c = star * 4 + star;
        let refuted = rows.iter().all(|row| {
            (0..4).any(|k| {
                row[k].is_positive()
                    && (0..4).any(|j| scenario.born[j][k].is_zero() && joints[j][c].is_positive())
            })
        });
        assert!(refuted);
        assert!(!is_feasible(&solve_point(&scenario, &p0, &pplus)));
    }
}
