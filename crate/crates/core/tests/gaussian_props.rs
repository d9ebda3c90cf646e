use epistemic_core::gaussian::{
    epr_correlated, epr_inference, grid_entropy, linear_variance, perturbed_grid_entropy,
    single_mode_symplectic, GaussianEpistemicState, Quadrature, SymplecticForm,
};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

/// Direct sum of two one-mode maps followed by a passive rotation mixing
/// the modes, in (q₁, q₂, p₁, p₂) order.
fn two_mode_symplectic(a: (f64, f64, f64), b: (f64, f64, f64), mix: f64) -> DMatrix<f64> {
    let sa = single_mode_symplectic(a.0, a.1, a.2);
    let sb = single_mode_symplectic(b.0, b.1, b.2);
    let mut local = DMatrix::zeros(4, 4);
    for (mode, s) in [(0, &sa), (1, &sb)] {
        let idx = [mode, mode + 2];
        for r in 0..2 {
            for c in 0..2 {
                local[(idx[r], idx[c])] = s[(r, c)];
            }
        }
    }
    let (c, s) = (mix.cos(), mix.sin());
    let rot = DMatrix::from_row_slice(2, 2, &[c, s, -s, c]);
    let mut passive = DMatrix::zeros(4, 4);
    passive.view_mut((0, 0), (2, 2)).copy_from(&rot);
    passive.view_mut((2, 2), (2, 2)).copy_from(&rot);
    passive * local
}

fn one_mode() -> impl Strategy<Value = (f64, f64, f64)> {
    (-3.2f64..3.2, -1.0f64..1.0, -1.0f64..1.0)
}

fn assert_close(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> Result<(), TestCaseError> {
    let scale = a.amax().max(b.amax()).max(1.0);
    prop_assert!((a - b).amax() <= tol * scale, "{a} vs {b}");
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn validity_invariant_under_symplectic_maps(
        a in one_mode(), b in one_mode(), mix in -3.2f64..3.2,
        nu in prop::sample::select(vec![0.3, 0.8, 1.0, 1.5, 3.0]),
        hbar in 0.2f64..3.0,
    ) {
        let s = two_mode_symplectic(a, b, mix);
        prop_assert!(SymplecticForm::new(2).preserved_by(&s, 1e-9));
        let state = GaussianEpistemicState::thermal(2, nu, hbar).unwrap();
        let moved = state.transform(&s).unwrap();
        prop_assert_eq!(state.validity_check().valid, moved.validity_check().valid);
        prop_assert_eq!(state.validity_check().valid, nu >= 1.0);
    }

    #[test]
    fn entropy_invariant_under_symplectic_maps(
        a in one_mode(), b in one_mode(), mix in -3.2f64..3.2, nu in 1.0f64..4.0, hbar in 0.2f64..3.0,
    ) {
        let state = GaussianEpistemicState::thermal(2, nu, hbar).unwrap();
        let moved = state.transform(&two_mode_symplectic(a, b, mix)).unwrap();
        prop_assert!((state.entropy().unwrap() - moved.entropy().unwrap()).abs() < 1e-9);
    }

    #[test]
    fn conditioning_commutes_with_marginalizing(
        entries in prop::collection::vec(-1.5f64..1.5, 36),
        mean in prop::collection::vec(-2.0f64..2.0, 6),
        hbar in 0.3f64..2.0,
        cond in 0usize..3,
        offset in 1usize..3,
        quadrature in prop::sample::select(vec![Quadrature::Position, Quadrature::Momentum]),
        value in -3.0f64..3.0,
    ) {
        let a = DMatrix::from_vec(6, 6, entries);
        let gamma = (DMatrix::identity(6, 6) + &a * a.transpose()) * hbar;
        let state = GaussianEpistemicState::new(DVector::from_vec(mean), gamma, hbar).unwrap();
        prop_assert!(state.validity_check().valid);
        let keep = (cond + offset) % 3;
        let shifted = if keep > cond { keep - 1 } else { keep };
        let first = state.condition(cond, quadrature, value).unwrap().marginalize_modes(&[shifted]).unwrap();
        let second = state.marginalize_modes(&[cond, keep]).unwrap().condition(0, quadrature, value).unwrap();
        assert_close(first.gamma(), second.gamma(), 1e-9)?;
        let (m1, m2) = (DMatrix::from_column_slice(2, 1, first.mean().as_slice()), DMatrix::from_column_slice(2, 1, second.mean().as_slice()));
        assert_close(&m1, &m2, 1e-9)?;
        prop_assert!(first.validity_check().valid);
    }

    #[test]
    fn epr_correlations_tighten_with_squeezing(r in 0.05f64..4.0, dr in 0.01f64..1.0, hbar in 0.2f64..3.0) {
        let (lo, hi) = (epr_correlated(r, hbar).unwrap(), epr_correlated(r + dr, hbar).unwrap());
        let diff = |s: &GaussianEpistemicState| linear_variance(s, &[(0, 1.0), (1, -1.0)]);
        prop_assert!(diff(&hi) < diff(&lo));
        prop_assert!((diff(&lo) - hbar * (-2.0 * r).exp()).abs() < 1e-9 * (2.0 * r).cosh());
        let alice = |s: &GaussianEpistemicState| s.marginalize_modes(&[0]).unwrap().entropy().unwrap();
        prop_assert!(alice(&hi) > alice(&lo));
    }

    #[test]
    fn bob_posterior_tracks_alice_result(r in 0.1f64..5.0, value in -5.0f64..5.0, hbar in 0.2f64..3.0) {
        let state = epr_correlated(r, hbar).unwrap();
        let q = epr_inference(&state, Quadrature::Position, value).unwrap();
        let p = epr_inference(&state, Quadrature::Momentum, value).unwrap();
        let t = (2.0 * r).tanh();
        prop_assert!((q.mean()[0] - t * value).abs() < 1e-9 * value.abs().max(1.0));
        prop_assert!((p.mean()[1] + t * value).abs() < 1e-9 * value.abs().max(1.0));
        prop_assert!(q.validity_check().valid && p.validity_check().valid);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn quadrature_matches_closed_form_entropy(a in one_mode(), nu in 1.0f64..3.0, hbar in 0.2f64..3.0) {
        let state = GaussianEpistemicState::thermal(1, nu, hbar).unwrap().transform(&single_mode_symplectic(a.0, a.1, a.2)).unwrap();
        let exact = state.entropy().unwrap();
        prop_assert!((grid_entropy(&state, 400, 10.0).unwrap() - exact).abs() < 1e-6);
        let perturbed = perturbed_grid_entropy(&state, 0.1, 400, 10.0).unwrap();
        prop_assert!(perturbed < exact);
    }
}

#[test]
fn epr_states_are_valid() {
    for r in [0.5, 1.0, 2.0, 3.0, 5.0] {
        for hbar in [0.5, 1.0, 2.0] {
            let state = epr_correlated(r, hbar).unwrap();
            assert!(state.validity_check().valid, "r = {r}");
        }
    }
}
