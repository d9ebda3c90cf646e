//! Epistemically restricted Liouville mechanics with Gaussian states.
//!
//! Coordinates are ordered z = (q₁, …, q_n, p₁, …, p_n) for n modes and the
//! matrix γ stored in a state is twice the covariance of the distribution.
//! A state is valid when γ + iƛΣ is positive semidefinite.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GaussianError {
    #[error("phase-space dimension {0} is not a positive even number")]
    OddDimension(usize),
    #[error("covariance is {rows}x{cols} but the mean has length {mean}")]
    Shape { rows: usize, cols: usize, mean: usize },
    #[error("covariance is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("non-finite entry in the state")]
    NonFinite,
    #[error("hbar analogue must be positive, got {0}")]
    BadHbar(f64),
    #[error("covariance is singular")]
    Singular,
    #[error("kept coordinates break the (q, p) pairing at index {0}")]
    BrokenPairing(usize),
    #[error("coordinate selection is empty or repeats an index")]
    BadSelection,
    #[error("mode {0} is out of range")]
    ModeRange(usize),
    #[error("squeezing must be positive and finite, got {0}")]
    BadSqueeze(f64),
    #[error("expected a two-mode state, got {0} modes")]
    NotTwoMode(usize),
    #[error("the numeric oracle handles one mode only")]
    NotSingleMode,
    #[error("the conditioned state fails the uncertainty constraint (min eigenvalue {0})")]
    InvalidPosterior(f64),
    #[error("malformed state document: {0}")]
    Document(String),
}

/// Σ = [[0, I], [−I, 0]] on n modes.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm {
    matrix: DMatrix<f64>,
}

impl SymplecticForm {
    pub fn new(modes: usize) -> Self {
        let n = modes;
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        for k in 0..n {
            m[(k, n + k)] = 1.0;
            m[(n + k, k)] = -1.0;
        }
        SymplecticForm { matrix: m }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Whether SΣSᵀ = Σ within `tol`.
    pub fn preserved_by(&self, s: &DMatrix<f64>, tol: f64) -> bool {
        s.shape() == self.matrix.shape() && (s * &self.matrix * s.transpose() - &self.matrix).amax() <= tol
    }
}

/// Position or momentum of one mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quadrature {
    #[serde(alias = "q")]
    Position,
    #[serde(alias = "p")]
    Momentum,
}

/// A Gaussian on phase space with mean, γ and the free parameter ƛ.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianEpistemicState {
    mean: DVector<f64>,
    gamma: DMatrix<f64>,
    hbar: f64,
}

/// Verdict and minimal eigenvalue of γ + iƛΣ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Validity {
    pub valid: bool,
    pub min_eigenvalue: f64,
}

/// Allowed negative slack on eigenvalues, relative to the largest entry.
pub const VALIDITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianDocument {
    pub mean: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
    pub hbar_analogue: f64,
}

impl GaussianEpistemicState {
    pub fn new(mean: DVector<f64>, gamma: DMatrix<f64>, hbar: f64) -> Result<Self, GaussianError> {
        let dim = mean.len();
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(GaussianError::OddDimension(dim));
        }
        if gamma.shape() != (dim, dim) {
            return Err(GaussianError::Shape { rows: gamma.nrows(), cols: gamma.ncols(), mean: dim });
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(GaussianError::BadHbar(hbar));
        }
        if mean.iter().chain(gamma.iter()).any(|x| !x.is_finite()) {
            return Err(GaussianError::NonFinite);
        }
        let scale = gamma.amax().max(1.0);
        for i in 0..dim {
            for j in i + 1..dim {
                if (gamma[(i, j)] - gamma[(j, i)]).abs() > 1e-12 * scale {
                    return Err(GaussianError::NotSymmetric(i, j));
                }
            }
        }
        let gamma = &gamma * 0.5 + gamma.transpose() * 0.5;
        Ok(GaussianEpistemicState { mean, gamma, hbar })
    }

    /// Zero mean, γ = ƛ·ν·I on `modes` modes; ν = 1 is the boundary case.
    pub fn thermal(modes: usize, nu: f64, hbar: f64) -> Result<Self, GaussianError> {
        let d = 2 * modes;
        Self::new(DVector::zeros(d), DMatrix::identity(d, d) * (hbar * nu), hbar)
    }

    pub fn dimension(&self) -> usize {
        self.mean.len()
    }

    pub fn modes(&self) -> usize {
        self.mean.len() / 2
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    /// The matrix γ, twice the covariance.
    pub fn gamma(&self) -> &DMatrix<f64> {
        &self.gamma
    }

    pub fn covariance(&self) -> DMatrix<f64> {
        &self.gamma * 0.5
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn q_index(&self, mode: usize) -> usize {
        mode
    }

    pub fn p_index(&self, mode: usize) -> usize {
        self.modes() + mode
    }

    pub fn index_of(&self, mode: usize, quadrature: Quadrature) -> usize {
        match quadrature {
            Quadrature::Position => self.q_index(mode),
            Quadrature::Momentum => self.p_index(mode),
        }
    }

    /// Spectrum check of the Hermitian matrix γ + iƛΣ through its real
    /// symmetric embedding [[γ, −ƛΣ], [ƛΣ, γ]], which has the same
    /// eigenvalues with doubled multiplicity.
    pub fn validity_check(&self) -> Validity {
        let d = self.dimension();
        let sigma = SymplecticForm::new(self.modes()).matrix * self.hbar;
        let mut big = DMatrix::zeros(2 * d, 2 * d);
        big.view_mut((0, 0), (d, d)).copy_from(&self.gamma);
        big.view_mut((d, d), (d, d)).copy_from(&self.gamma);
        big.view_mut((0, d), (d, d)).copy_from(&(-&sigma));
        big.view_mut((d, 0), (d, d)).copy_from(&sigma);
        let min = SymmetricEigen::new(big).eigenvalues.min();
        let slack = VALIDITY_TOLERANCE * self.gamma.amax().max(self.hbar).max(1.0);
        Validity { valid: min >= -slack, min_eigenvalue: min }
    }

    /// Differential entropy ½·ln((2πe)^N · det Cov) with Cov = γ/2.
    pub fn entropy(&self) -> Result<f64, GaussianError> {
        let det = self.covariance().determinant();
        if !(det > 0.0) || !det.is_finite() {
            return Err(GaussianError::Singular);
        }
        let n = self.dimension() as f64;
        Ok(0.5 * (n * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln() + det.ln()))
    }

    /// Image under the affine symplectic map z ↦ Sz.
    pub fn transform(&self, s: &DMatrix<f64>) -> Result<Self, GaussianError> {
        Self::new(s * &self.mean, s * &self.gamma * s.transpose(), self.hbar)
    }

    /// Keeps the listed coordinates, which must come in (q_k, p_k) pairs.
    pub fn marginalize(&self, keep: &[usize]) -> Result<Self, GaussianError> {
        let n = self.modes();
        let mut sorted = keep.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.is_empty() || sorted.len() != keep.len() {
            return Err(GaussianError::BadSelection);
        }
        if let Some(&bad) = sorted.iter().find(|&&i| i >= self.dimension()) {
            return Err(GaussianError::ModeRange(bad));
        }
        for &i in &sorted {
            let partner = if i < n { i + n } else { i - n };
            if sorted.binary_search(&partner).is_err() {
                return Err(GaussianError::BrokenPairing(i));
            }
        }
        let modes: Vec<usize> = sorted.iter().copied().filter(|&i| i < n).collect();
        self.marginalize_modes(&modes)
    }

    /// Keeps whole modes, in the given order.
    pub fn marginalize_modes(&self, modes: &[usize]) -> Result<Self, GaussianError> {
        if modes.is_empty() {
            return Err(GaussianError::BadSelection);
        }
        if let Some(&bad) = modes.iter().find(|&&m| m >= self.modes()) {
            return Err(GaussianError::ModeRange(bad));
        }
        let mut idx: Vec<usize> = modes.iter().map(|&m| self.q_index(m)).collect();
        idx.extend(modes.iter().map(|&m| self.p_index(m)));
        let mut seen = idx.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != idx.len() {
            return Err(GaussianError::BadSelection);
        }
        Self::new(self.mean.select_rows(&idx), self.gamma.select_rows(&idx).select_columns(&idx), self.hbar)
    }

    /// Conditions on one quadrature of `mode` taking `value` and returns the
    /// Gaussian over the remaining modes.
    pub fn condition(&self, mode: usize, quadrature: Quadrature, value: f64) -> Result<Self, GaussianError> {
        if mode >= self.modes() {
            return Err(GaussianError::ModeRange(mode));
        }
        if self.modes() < 2 {
            return Err(GaussianError::BadSelection);
        }
        let rest: Vec<usize> = (0..self.modes()).filter(|&m| m != mode).collect();
        let mut idx: Vec<usize> = rest.iter().map(|&m| self.q_index(m)).collect();
        idx.extend(rest.iter().map(|&m| self.p_index(m)));
        let a = self.index_of(mode, quadrature);
        let var = self.gamma[(a, a)];
        if !(var > 0.0) {
            return Err(GaussianError::Singular);
        }
        let cross = DVector::from_iterator(idx.len(), idx.iter().map(|&i| self.gamma[(i, a)]));
        let mean = self.mean.select_rows(&idx) + &cross * ((value - self.mean[a]) / var);
        let gamma = self.gamma.select_rows(&idx).select_columns(&idx) - &cross * cross.transpose() / var;
        Self::new(mean, gamma, self.hbar)
    }

    pub fn to_document(&self) -> GaussianDocument {
        GaussianDocument {
            mean: self.mean.iter().copied().collect(),
            covariance: self.gamma.row_iter().map(|r| r.iter().copied().collect()).collect(),
            hbar_analogue: self.hbar,
        }
    }

    pub fn from_document(doc: &GaussianDocument) -> Result<Self, GaussianError> {
        let d = doc.mean.len();
        if doc.covariance.len() != d || doc.covariance.iter().any(|r| r.len() != d) {
            return Err(GaussianError::Shape {
                rows: doc.covariance.len(),
                cols: doc.covariance.first().map_or(0, Vec::len),
                mean: d,
            });
        }
        let gamma = DMatrix::from_row_iterator(d, d, doc.covariance.iter().flatten().copied());
        Self::new(DVector::from_vec(doc.mean.clone()), gamma, doc.hbar_analogue)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_document()).expect("finite floats serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, GaussianError> {
        let doc: GaussianDocument =
            serde_json::from_str(text).map_err(|e| GaussianError::Document(e.to_string()))?;
        Self::from_document(&doc)
    }
}

/// Two-mode squeezed state: γ = ƛ·[[C, 0], [0, C']] in (q_A, q_B, p_A, p_B)
/// order with C = [[c, s], [s, c]], C' = [[c, −s], [−s, c]], c = cosh 2r,
/// s = sinh 2r. Var(q_A − q_B) = Var(p_A + p_B) = ƛ·e^{−2r}.
pub fn epr_correlated(squeeze: f64, hbar: f64) -> Result<GaussianEpistemicState, GaussianError> {
    if !(squeeze.is_finite() && squeeze > 0.0) {
        return Err(GaussianError::BadSqueeze(squeeze));
    }
    let (c, s) = ((2.0 * squeeze).cosh(), (2.0 * squeeze).sinh());
    #[rustfmt::skip]
    let gamma = DMatrix::from_row_slice(4, 4, &[
        c, s, 0.0, 0.0,
        s, c, 0.0, 0.0,
        0.0, 0.0, c, -s,
        0.0, 0.0, -s, c,
    ]) * hbar;
    let state = GaussianEpistemicState::new(DVector::zeros(4), gamma, hbar)?;
    let v = state.validity_check();
    if !v.valid {
        return Err(GaussianError::InvalidPosterior(v.min_eigenvalue));
    }
    Ok(state)
}

/// Variance of a linear combination Σ wᵢ zᵢ of coordinates.
pub fn linear_variance(state: &GaussianEpistemicState, weights: &[(usize, f64)]) -> f64 {
    let cov = state.covariance();
    weights
        .iter()
        .flat_map(|&(i, a)| weights.iter().map(move |&(j, b)| (i, j, a * b)))
        .map(|(i, j, w)| w * cov[(i, j)])
        .sum()
}

/// Bob's state after Alice, holding mode 0, finds `value` for `quadrature`.
pub fn epr_inference(
    state: &GaussianEpistemicState,
    quadrature: Quadrature,
    value: f64,
) -> Result<GaussianEpistemicState, GaussianError> {
    if state.modes() != 2 {
        return Err(GaussianError::NotTwoMode(state.modes()));
    }
    let bob = state.condition(0, quadrature, value)?;
    let v = bob.validity_check();
    if !v.valid {
        return Err(GaussianError::InvalidPosterior(v.min_eigenvalue));
    }
    Ok(bob)
}

/// Bob's marginal with and without Alice's measurement, the latter averaged
/// over her outcome by the law of total covariance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussianNoSignaling {
    pub unconditioned: GaussianDocument,
    pub after_position: GaussianDocument,
    pub after_momentum: GaussianDocument,
    pub max_deviation: f64,
}

pub fn gaussian_no_signaling(state: &GaussianEpistemicState) -> Result<GaussianNoSignaling, GaussianError> {
    if state.modes() != 2 {
        return Err(GaussianError::NotTwoMode(state.modes()));
    }
    let marginal = state.marginalize_modes(&[1])?;
    let averaged = |quadrature: Quadrature| -> Result<GaussianEpistemicState, GaussianError> {
        let a = state.index_of(0, quadrature);
        let at_mean = state.condition(0, quadrature, state.mean[a])?;
        let shifted = state.condition(0, quadrature, state.mean[a] + 1.0)?;
        let gain = shifted.mean() - at_mean.mean();
        let spread = &gain * gain.transpose() * state.gamma()[(a, a)];
        GaussianEpistemicState::new(at_mean.mean().clone(), at_mean.gamma() + spread, state.hbar())
    };
    let q = averaged(Quadrature::Position)?;
    let p = averaged(Quadrature::Momentum)?;
    let dev = |s: &GaussianEpistemicState| {
        (s.gamma() - marginal.gamma()).amax().max((s.mean() - marginal.mean()).amax())
    };
    Ok(GaussianNoSignaling {
        max_deviation: dev(&q).max(dev(&p)),
        unconditioned: marginal.to_document(),
        after_position: q.to_document(),
        after_momentum: p.to_document(),
    })
}

/// −∫ μ ln μ for a one-mode density given in principal-axis coordinates,
/// by the midpoint rule on a square grid of ±`half_width` standard
/// deviations with `cells` cells per axis. `density` receives coordinates
/// in units of the standard deviations and must integrate to one in them.
fn grid_entropy_principal(
    sigmas: [f64; 2],
    cells: usize,
    half_width: f64,
    density: impl Fn(f64, f64) -> f64,
) -> f64 {
    let h = 2.0 * half_width / cells as f64;
    let jac = sigmas[0] * sigmas[1];
    let mut total = 0.0;
    for i in 0..cells {
        let x = -half_width + (i as f64 + 0.5) * h;
        for j in 0..cells {
            let y = -half_width + (j as f64 + 0.5) * h;
            let m = density(x, y);
            if m > 0.0 {
                let mu = m / jac;
                total -= m * mu.ln();
            }
        }
    }
    total * h * h
}

fn principal_sigmas(state: &GaussianEpistemicState) -> Result<[f64; 2], GaussianError> {
    if state.modes() != 1 {
        return Err(GaussianError::NotSingleMode);
    }
    let eig = SymmetricEigen::new(state.covariance()).eigenvalues;
    if eig.iter().any(|&e| !(e > 0.0)) {
        return Err(GaussianError::Singular);
    }
    Ok([eig[0].sqrt(), eig[1].sqrt()])
}

fn std_normal(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Probabilists' Hermite polynomial He₄; orthogonal to 1, x and x² under
/// the standard normal weight, so adding it keeps mean and covariance.
fn hermite4(x: f64) -> f64 {
    let x2 = x * x;
    x2 * x2 - 6.0 * x2 + 3.0
}

/// Numerical entropy of a one-mode state's Gaussian density.
pub fn grid_entropy(state: &GaussianEpistemicState, cells: usize, half_width: f64) -> Result<f64, GaussianError> {
    let s = principal_sigmas(state)?;
    Ok(grid_entropy_principal(s, cells, half_width, |x, y| std_normal(x) * std_normal(y)))
}

/// Numerical entropy of the density φ(x)φ(y)(1 + ε·He₄(x)) in principal
/// coordinates, which shares mean and covariance with the Gaussian.
/// Positivity needs 0 ≤ ε < 1/6.
pub fn perturbed_grid_entropy(
    state: &GaussianEpistemicState,
    epsilon: f64,
    cells: usize,
    half_width: f64,
) -> Result<f64, GaussianError> {
    let s = principal_sigmas(state)?;
    Ok(grid_entropy_principal(s, cells, half_width, |x, y| {
        std_normal(x) * std_normal(y) * (1.0 + epsilon * hermite4(x))
    }))
}

/// One-mode symplectic map [[a, b], [c, d]] with ad − bc = 1: a rotation
/// followed by a squeeze by e^{t}, then a shear.
pub fn single_mode_symplectic(angle: f64, squeeze: f64, shear: f64) -> DMatrix<f64> {
    let (c, s) = (angle.cos(), angle.sin());
    let rot = DMatrix::from_row_slice(2, 2, &[c, s, -s, c]);
    let sq = DMatrix::from_row_slice(2, 2, &[squeeze.exp(), 0.0, 0.0, (-squeeze).exp()]);
    let sh = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, shear, 1.0]);
    sh * sq * rot
}
