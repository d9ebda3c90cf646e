use std::fmt;

use super::ket::Ket;
use super::scalar::{RealValue, Scalar};
use super::QuantumError;

/// A dense square matrix of amplitudes, row-major.
#[derive(Clone, PartialEq)]
pub struct Operator<S> {
    dim: usize,
    entries: Vec<S>,
}

impl<S: Scalar> Operator<S> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, entries: vec![S::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zeros(dim);
        for k in 0..dim {
            op.entries[k * dim + k] = S::one();
        }
        op
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self, QuantumError> {
        let dim = rows.len();
        if dim == 0 {
            return Err(QuantumError::EmptyDimension);
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(QuantumError::DimensionMismatch { expected: dim, found: bad.len() });
        }
        Ok(Self { dim, entries: rows.into_iter().flatten().collect() })
    }

    pub fn diagonal(values: Vec<S>) -> Self {
        let dim = values.len();
        let mut op = Self::zeros(dim);
        for (k, v) in values.into_iter().enumerate() {
            op.entries[k * dim + k] = v;
        }
        op
    }

    /// |a⟩⟨b|
    pub fn outer(a: &Ket<S>, b: &Ket<S>) -> Result<Self, QuantumError> {
        check_dim(a.dim(), b.dim())?;
        let dim = a.dim();
        let mut entries = Vec::with_capacity(dim * dim);
        for x in a.amplitudes() {
            for y in b.amplitudes() {
                entries.push(x.clone() * y.conj());
            }
        }
        Ok(Self { dim, entries })
    }

    pub fn projector(ket: &Ket<S>) -> Self {
        Self::outer(ket, ket).expect("same ket has matching dimensions")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> &S {
        &self.entries[row * self.dim + col]
    }

    pub fn scale(&self, factor: &S) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e.clone() * factor.clone()).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, QuantumError> {
        check_dim(self.dim, other.dim)?;
        Ok(Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, QuantumError> {
        check_dim(self.dim, other.dim)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = S::zero();
                for k in 0..n {
                    acc = acc + self.get(i, k).clone() * other.get(k, j).clone();
                }
                out.entries[i * n + j] = acc;
            }
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.entries[j * n + i] = self.get(i, j).conj();
            }
        }
        out
    }

    pub fn apply(&self, ket: &Ket<S>) -> Result<Vec<S>, QuantumError> {
        check_dim(self.dim, ket.dim())?;
        Ok((0..self.dim)
            .map(|i| {
                ket.amplitudes()
                    .iter()
                    .enumerate()
                    .fold(S::zero(), |acc, (j, a)| acc + self.get(i, j).clone() * a.clone())
            })
            .collect())
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        let dim = n * m;
        let mut out = Self::zeros(dim);
        for i in 0..n {
            for j in 0..n {
                for k in 0..m {
                    for l in 0..m {
                        out.entries[(i * m + k) * dim + (j * m + l)] =
                            self.get(i, j).clone() * other.get(k, l).clone();
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> S {
        (0..self.dim).fold(S::zero(), |acc, k| acc + self.get(k, k).clone())
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.entries.iter().zip(&other.entries).all(|(a, b)| a.approx_eq(b))
    }

    pub fn is_hermitian(&self) -> bool {
        self.approx_eq(&self.adjoint())
    }

    /// Determinant of the principal submatrix on `indices` (Laplace expansion;
    /// only used for dimensions up to 4).
    fn minor(&self, indices: &[usize]) -> S {
        self.sub_determinant(indices, indices)
    }

    fn sub_determinant(&self, rows: &[usize], cols: &[usize]) -> S {
        match rows.len() {
            0 => S::one(),
            1 => self.get(rows[0], cols[0]).clone(),
            _ => {
                let mut acc = S::zero();
                for (pos, &col) in cols.iter().enumerate() {
                    let rest: Vec<usize> =
                        cols.iter().enumerate().filter(|&(p, _)| p != pos).map(|(_, &c)| c).collect();
                    let term = self.get(rows[0], col).clone() * self.sub_determinant(&rows[1..], &rest);
                    acc = if pos % 2 == 0 { acc + term } else { acc - term };
                }
                acc
            }
        }
    }

    pub fn determinant(&self) -> S {
        let all: Vec<usize> = (0..self.dim).collect();
        self.minor(&all)
    }

    /// Positive semidefiniteness of a Hermitian matrix via the sign of every
    /// principal minor. Exact in ℚ(i, √2).
    pub fn is_positive_semidefinite(&self) -> bool {
        if !self.is_hermitian() {
            return false;
        }
        let n = self.dim;
        (1u32..(1u32 << n)).all(|mask| {
            let idx: Vec<usize> = (0..n).filter(|k| mask & (1 << k) != 0).collect();
            self.minor(&idx).re().is_nonnegative()
        })
    }
}

fn check_dim(expected: usize, found: usize) -> Result<(), QuantumError> {
    if expected == found {
        Ok(())
    } else {
        Err(QuantumError::DimensionMismatch { expected, found })
    }
}

impl<S: Scalar> fmt::Debug for Operator<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_list();
        for r in 0..self.dim {
            list.entry(&(0..self.dim).map(|c| self.get(r, c).to_string()).collect::<Vec<_>>());
        }
        list.finish()
    }
}
