use std::collections::BTreeMap;

use epistemic_core::field::ratio;
use epistemic_core::om::{
    overlap_witness, Classification, EpistemicState, OnticSpace, OntologicalModel, ResponseFunction,
};
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

/// Normalizes nonnegative integer weights, putting all mass on the first
/// entry when they sum to zero.
fn normalize(raw: &[u8]) -> Vec<BigRational> {
    let total: i64 = raw.iter().map(|&x| i64::from(x)).sum();
    if total == 0 {
        let mut v = vec![BigRational::zero(); raw.len()];
        v[0] = BigRational::one();
        return v;
    }
    raw.iter().map(|&x| ratio(i64::from(x), total)).collect()
}

#[derive(Debug, Clone)]
struct Shape {
    n: usize,
    preps: Vec<Vec<u8>>,
    /// `meas[m][lambda]`: raw outcome weights at λ.
    meas: Vec<Vec<Vec<u8>>>,
}

fn shape() -> impl Strategy<Value = Shape> {
    (1usize..6, 2usize..5, 1usize..3, 2usize..4).prop_flat_map(|(n, np, nm, no)| {
        (
            prop::collection::vec(prop::collection::vec(0u8..4, n), np),
            prop::collection::vec(prop::collection::vec(prop::collection::vec(0u8..4, no), n), nm),
        )
            .prop_map(move |(preps, meas)| Shape { n, preps, meas })
    })
}

fn build(s: &Shape) -> OntologicalModel {
    let space = OnticSpace::numbered(s.n).unwrap();
    let preparations = s
        .preps
        .iter()
        .enumerate()
        .map(|(i, w)| (format!("p{i}"), EpistemicState::new(space.clone(), normalize(w)).unwrap()))
        .collect();
    let measurements = s
        .meas
        .iter()
        .enumerate()
        .map(|(m, per_lambda)| {
            let columns: Vec<Vec<BigRational>> = per_lambda.iter().map(|w| normalize(w)).collect();
            let outcomes: Vec<String> = (0..columns[0].len()).map(|k| format!("o{k}")).collect();
            let table = (0..outcomes.len())
                .map(|k| columns.iter().map(|c| c[k].clone()).collect())
                .collect();
            (format!("m{m}"), ResponseFunction::new(space.clone(), outcomes, table).unwrap())
        })
        .collect();
    OntologicalModel::new(space, preparations, measurements).unwrap()
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

fn psi_complete(n: usize, order: &[usize]) -> OntologicalModel {
    let space = OnticSpace::numbered(n).unwrap();
    let preparations: BTreeMap<_, _> = order
        .iter()
        .enumerate()
        .map(|(i, &l)| (format!("p{i}"), EpistemicState::point_mass(space.clone(), l).unwrap()))
        .collect();
    let table = vec![vec![BigRational::one(); n]];
    let m = ResponseFunction::new(space.clone(), vec!["yes".into()], table).unwrap();
    OntologicalModel::new(space, preparations, BTreeMap::from([("m".to_string(), m)])).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn predictions_sum_to_one(s in shape()) {
        let model = build(&s);
        for p in model.preparations().keys() {
            for (m, r) in model.measurements() {
                let total: BigRational = r
                    .outcomes()
                    .iter()
                    .map(|o| model.predicted_probability(p, m, o).unwrap())
                    .sum();
                prop_assert_eq!(total, BigRational::one());
            }
        }
    }

    #[test]
    fn classification_ignores_relabeling(
        (s, order) in shape().prop_flat_map(|s| { let n = s.n; (Just(s), permutation(n)) })
    ) {
        let model = build(&s);
        let permuted = model.permute_space(&order).unwrap();
        prop_assert_eq!(model.classify().unwrap(), permuted.classify().unwrap());
        for p in model.preparations().keys() {
            for (m, r) in model.measurements() {
                for o in r.outcomes() {
                    prop_assert_eq!(
                        model.predicted_probability(p, m, o).unwrap(),
                        permuted.predicted_probability(p, m, o).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn merging_destroys_completeness(
        (order, keep, drop) in (2usize..7).prop_flat_map(|n| (permutation(n), 0..n, 0..n))
            .prop_filter("distinct", |(_, k, d)| k != d)
    ) {
        let model = psi_complete(order.len(), &order);
        prop_assert_eq!(model.classify().unwrap(), Classification::PsiComplete);
        let merged = model.merge_states(keep, drop).unwrap();
        prop_assert_ne!(merged.classify().unwrap(), Classification::PsiComplete);
    }

    #[test]
    fn overlap_witness_is_symmetric(s in shape()) {
        let model = build(&s);
        let states: Vec<&EpistemicState> = model.preparations().values().collect();
        for a in &states {
            for b in &states {
                let ab = overlap_witness(a, b).unwrap();
                let ba = overlap_witness(b, a).unwrap();
                prop_assert_eq!(ab.is_some(), ba.is_some());
                if let Some(l) = ab {
                    prop_assert!(!a.weight(l).is_zero() && !b.weight(l).is_zero());
                }
            }
        }
    }

    #[test]
    fn json_round_trip(s in shape()) {
        let model = build(&s);
        prop_assert_eq!(OntologicalModel::from_json(&model.to_json()).unwrap(), model);
    }
}

#[test]
fn classification_examples() {
    assert_eq!(psi_complete(3, &[2, 0, 1]).classify().unwrap(), Classification::PsiComplete);
    let space = OnticSpace::numbered(3).unwrap();
    let preps = BTreeMap::from([
        ("a".to_string(), EpistemicState::point_mass(space.clone(), 0).unwrap()),
        ("b".to_string(), EpistemicState::point_mass(space.clone(), 1).unwrap()),
    ]);
    let m = ResponseFunction::new(space.clone(), vec!["yes".into()], vec![vec![BigRational::one(); 3]]).unwrap();
    let model = OntologicalModel::new(space, preps, BTreeMap::from([("m".to_string(), m)])).unwrap();
    assert_eq!(model.classify().unwrap(), Classification::PsiSupplemented);
}
