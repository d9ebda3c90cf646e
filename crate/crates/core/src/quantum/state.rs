use super::ket::Ket;
use super::operator::Operator;
use super::scalar::Scalar;
use super::QuantumError;

/// A Hermitian, unit-trace, positive semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<S: Scalar> {
    op: Operator<S>,
}

impl<S: Scalar> DensityMatrix<S> {
    pub fn new(op: Operator<S>) -> Result<Self, QuantumError> {
        if !op.is_hermitian() {
            return Err(QuantumError::NotHermitian);
        }
        let trace = op.trace();
        if !trace.approx_eq(&S::one()) {
            return Err(QuantumError::BadTrace(trace.to_string()));
        }
        if !op.is_positive_semidefinite() {
            return Err(QuantumError::NotPositive);
        }
        Ok(Self { op })
    }

    pub fn pure(ket: &Ket<S>) -> Self {
        Self { op: Operator::projector(ket) }
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn operator(&self) -> &Operator<S> {
        &self.op
    }
}

/// A unitary matrix, checked on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryGate<S: Scalar> {
    op: Operator<S>,
}

impl<S: Scalar> UnitaryGate<S> {
    pub fn new(op: Operator<S>) -> Result<Self, QuantumError> {
        let product = op.adjoint().matmul(&op)?;
        if !product.approx_eq(&Operator::identity(op.dim())) {
            return Err(QuantumError::NotUnitary);
        }
        Ok(Self { op })
    }

    pub fn hadamard() -> Self {
        let h = S::frac_1_sqrt2();
        Self {
            op: Operator::from_rows(vec![vec![h.clone(), h.clone()], vec![h.clone(), -h]])
                .expect("2x2"),
        }
    }

    pub fn pauli_x() -> Self {
        Self {
            op: Operator::from_rows(vec![vec![S::zero(), S::one()], vec![S::one(), S::zero()]])
                .expect("2x2"),
        }
    }

    /// diag(phase, 1): a phase on the first basis component only.
    pub fn phase_on_first(phase: S) -> Result<Self, QuantumError> {
        Self::new(Operator::diagonal(vec![phase, S::one()]))
    }

    /// Φ(π) = diag(-1, 1).
    pub fn phase_pi() -> Self {
        Self { op: Operator::diagonal(vec![-S::one(), S::one()]) }
    }

    pub fn operator(&self) -> &Operator<S> {
        &self.op
    }

    pub fn apply(&self, ket: &Ket<S>) -> Result<Ket<S>, QuantumError> {
        Ok(Ket::from_unchecked(self.op.apply(ket)?))
    }
}

/// A measurement given by labelled positive effects that sum to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveMeasurement<S: Scalar> {
    effects: Vec<(String, Operator<S>)>,
}

impl<S: Scalar> ProjectiveMeasurement<S> {
    pub fn new(effects: Vec<(String, Operator<S>)>) -> Result<Self, QuantumError> {
        let first = effects.first().ok_or(QuantumError::EmptyMeasurement)?;
        let dim = first.1.dim();
        let mut sum = Operator::zeros(dim);
        for (label, effect) in &effects {
            if !effect.is_positive_semidefinite() {
                return Err(QuantumError::EffectNotPositive(label.clone()));
            }
            sum = sum.add(effect)?;
        }
        if !sum.approx_eq(&Operator::identity(dim)) {
            return Err(QuantumError::IncompleteMeasurement);
        }
        for (i, (label, _)) in effects.iter().enumerate() {
            if effects[..i].iter().any(|(l, _)| l == label) {
                return Err(QuantumError::DuplicateOutcome(label.clone()));
            }
        }
        Ok(Self { effects })
    }

    /// Rank-one projectors onto the given kets, which must form an orthonormal basis.
    pub fn from_basis<L: Into<String>>(basis: Vec<(L, Ket<S>)>) -> Result<Self, QuantumError> {
        Self::new(
            basis
                .into_iter()
                .map(|(label, ket)| (label.into(), Operator::projector(&ket)))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.effects[0].1.dim()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.effects.iter().map(|(l, _)| l.as_str())
    }

    pub fn effect(&self, outcome: &str) -> Result<&Operator<S>, QuantumError> {
        self.effects
            .iter()
            .find(|(l, _)| l == outcome)
            .map(|(_, e)| e)
            .ok_or_else(|| QuantumError::UnknownOutcome(outcome.to_string()))
    }
}

/// Tr(E_k ρ).
pub fn born_probability<S: Scalar>(
    rho: &DensityMatrix<S>,
    meas: &ProjectiveMeasurement<S>,
    outcome: &str,
) -> Result<S::Real, QuantumError> {
    let effect = meas.effect(outcome)?;
    Ok(effect.matmul(rho.operator())?.trace().re())
}

/// Post-measurement state of a Lüders update together with its probability.
#[derive(Debug, Clone, PartialEq)]
pub struct LuedersUpdate<S: Scalar> {
    pub state: DensityMatrix<S>,
    pub probability: S::Real,
}

/// M ρ M†, without normalization.
pub fn lueders_unnormalized<S: Scalar>(
    rho: &DensityMatrix<S>,
    kraus: &Operator<S>,
) -> Result<Operator<S>, QuantumError> {
    kraus.matmul(rho.operator())?.matmul(&kraus.adjoint())
}

/// M ρ M† / Tr(M ρ M†). A zero-probability outcome is reported as an error
/// rather than mapped to some conventional state.
pub fn apply_lueders<S: Scalar>(
    rho: &DensityMatrix<S>,
    kraus: &Operator<S>,
) -> Result<LuedersUpdate<S>, QuantumError> {
    let unnormalized = lueders_unnormalized(rho, kraus)?;
    let trace = unnormalized.trace();
    if trace.is_negligible() {
        return Err(QuantumError::ImpossibleOutcome);
    }
    let inv = trace.inv().ok_or(QuantumError::ImpossibleOutcome)?;
    let state = DensityMatrix { op: unnormalized.scale(&inv) };
    Ok(LuedersUpdate { state, probability: trace.re() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{ratio, ExactComplex, QSqrt2};
    use crate::quantum::PmState;

    type E = ExactComplex;

    fn half() -> QSqrt2 {
        QSqrt2::from_rational(ratio(1, 2))
    }

    fn pm_measurement() -> ProjectiveMeasurement<E> {
        ProjectiveMeasurement::from_basis(vec![
            ("+", PmState::Plus.ket()),
            ("-", PmState::Minus.ket()),
        ])
        .unwrap()
    }

    #[test]
    fn born_examples() {
        let m = pm_measurement();
        let p = |s: PmState| born_probability(&DensityMatrix::pure(&s.ket::<E>()), &m, "+").unwrap();
        assert_eq!(p(PmState::Zero), half());
        assert_eq!(p(PmState::Plus), QSqrt2::one());
        assert_eq!(p(PmState::Minus), QSqrt2::zero());
    }

    #[test]
    fn born_errors() {
        let m = pm_measurement();
        let rho = DensityMatrix::pure(&PmState::Zero.ket::<E>());
        assert!(matches!(born_probability(&rho, &m, "x"), Err(QuantumError::UnknownOutcome(_))));
        let rho4 = DensityMatrix::pure(&Ket::<E>::basis(4, 0).unwrap());
        assert!(matches!(
            born_probability(&rho4, &m, "+"),
            Err(QuantumError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn lueders_examples() {
        let p0 = Operator::projector(&PmState::Zero.ket::<E>());
        let p1 = Operator::projector(&PmState::One.ket::<E>());
        let plus = DensityMatrix::pure(&PmState::Plus.ket::<E>());
        let zero = DensityMatrix::pure(&PmState::Zero.ket::<E>());

        let up = apply_lueders(&plus, &p0).unwrap();
        assert_eq!(up.probability, half());
        assert_eq!(up.state, zero);

        let up = apply_lueders(&zero, &p0).unwrap();
        assert_eq!(up.probability, QSqrt2::one());
        assert_eq!(up.state, zero);

        assert_eq!(apply_lueders(&zero, &p1), Err(QuantumError::ImpossibleOutcome));
        assert!(apply_lueders(&zero, &Operator::identity(4)).is_err());
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::new(Operator::<E>::identity(2)).is_err());
        let mixed = Operator::<E>::identity(2).scale(&E::from_rational(ratio(1, 2)));
        assert!(DensityMatrix::new(mixed).is_ok());
        let bad = Operator::<E>::diagonal(vec![E::from_int(2), E::from_int(-1)]);
        assert_eq!(DensityMatrix::new(bad), Err(QuantumError::NotPositive));
    }

    #[test]
    fn measurement_validation() {
        let incomplete = ProjectiveMeasurement::<E>::from_basis(vec![("0", PmState::Zero.ket())]);
        assert_eq!(incomplete, Err(QuantumError::IncompleteMeasurement));
        let dup = ProjectiveMeasurement::<E>::from_basis(vec![
            ("a", PmState::Zero.ket()),
            ("a", PmState::One.ket()),
        ]);
        assert!(matches!(dup, Err(QuantumError::DuplicateOutcome(_))));
    }

    #[test]
    fn gates_are_unitary() {
        assert!(UnitaryGate::new(UnitaryGate::<E>::hadamard().operator().clone()).is_ok());
        assert!(UnitaryGate::new(UnitaryGate::<E>::pauli_x().operator().clone()).is_ok());
        assert!(UnitaryGate::new(UnitaryGate::<E>::phase_pi().operator().clone()).is_ok());
        assert_eq!(
            UnitaryGate::new(Operator::<E>::diagonal(vec![E::from_int(2), E::from_int(1)])),
            Err(QuantumError::NotUnitary)
        );
    }
}
