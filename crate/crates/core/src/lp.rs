//! Exact linear feasibility over the rationals.
//!
//! Decides whether `A x = b, x ≥ 0` has a solution. Feasible systems return a
//! solution; infeasible ones return a Farkas vector `y` with `yᵀA ≥ 0` and
//! `yᵀb < 0`. Both answers are re-verified exactly before being returned.
//!
//! A presolve pass first looks for rows with right-hand side 0 and only
//! nonnegative coefficients: every variable with a positive coefficient in
//! such a row must vanish. If removing those variables empties a row whose
//! right-hand side is nonzero, the system is infeasible without pivoting.
//! Otherwise the reduced system goes through a Phase I simplex with Bland's
//! rule.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A sparse equality row `Σ coeffs[v]·x_v = rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coeffs: BTreeMap<usize, BigRational>,
    pub rhs: BigRational,
}

/// The system `A x = b, x ≥ 0`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearSystem {
    num_vars: usize,
    rows: Vec<Row>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Feasible(Vec<BigRational>),
    Infeasible(FarkasCertificate),
}

/// `y` with `yᵀA ≥ 0` componentwise and `yᵀb < 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FarkasCertificate {
    pub y: Vec<BigRational>,
    /// Rows whose emptying exposed the contradiction, when presolve alone
    /// decided infeasibility.
    pub presolve_row: Option<usize>,
}

impl LinearSystem {
    pub fn new(num_vars: usize) -> Self {
        Self { num_vars, rows: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    /// Adds a fresh nonnegative variable and returns its index.
    pub fn add_var(&mut self) -> usize {
        self.num_vars += 1;
        self.num_vars - 1
    }

    /// Adds `Σ terms = rhs` and returns the row index. Repeated variables add up.
    pub fn add_eq(&mut self, terms: impl IntoIterator<Item = (usize, BigRational)>, rhs: BigRational) -> usize {
        let mut coeffs = BTreeMap::new();
        for (v, c) in terms {
            assert!(v < self.num_vars, "variable {v} out of range");
            *coeffs.entry(v).or_insert_with(BigRational::zero) += c;
        }
        coeffs.retain(|_, c| !c.is_zero());
        self.rows.push(Row { coeffs, rhs });
        self.rows.len() - 1
    }

    /// Adds `Σ terms ≤ rhs` through a fresh slack variable.
    pub fn add_le(&mut self, terms: impl IntoIterator<Item = (usize, BigRational)>, rhs: BigRational) -> usize {
        let slack = self.add_var();
        let terms: Vec<_> = terms.into_iter().chain([(slack, BigRational::one())]).collect();
        self.add_eq(terms, rhs)
    }

    /// Adds `Σ terms ≥ rhs` through a fresh surplus variable.
    pub fn add_ge(&mut self, terms: impl IntoIterator<Item = (usize, BigRational)>, rhs: BigRational) -> usize {
        let surplus = self.add_var();
        let terms: Vec<_> = terms.into_iter().chain([(surplus, -BigRational::one())]).collect();
        self.add_eq(terms, rhs)
    }

    pub fn is_solution(&self, x: &[BigRational]) -> bool {
        x.len() == self.num_vars
            && x.iter().all(|v| !v.is_negative())
            && self.rows.iter().all(|r| {
                let lhs: BigRational = r.coeffs.iter().map(|(&v, c)| c * &x[v]).sum();
                lhs == r.rhs
            })
    }

    /// yᵀA as a dense vector.
    pub fn combine_columns(&self, y: &[BigRational]) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); self.num_vars];
        for (r, yi) in self.rows.iter().zip(y) {
            if yi.is_zero() {
                continue;
            }
            for (&v, c) in &r.coeffs {
                out[v] += c * yi;
            }
        }
        out
    }

    pub fn is_farkas(&self, y: &[BigRational]) -> bool {
        if y.len() != self.rows.len() {
            return false;
        }
        let yb: BigRational = self.rows.iter().zip(y).map(|(r, yi)| &r.rhs * yi).sum();
        yb.is_negative() && self.combine_columns(y).iter().all(|v| !v.is_negative())
    }

    pub fn solve(&self) -> LpOutcome {
        let outcome = match presolve(self) {
            Presolved::Infeasible { row, fixings } => {
                let sign = if self.rows[row].rhs.is_positive() { -1 } else { 1 };
                let mut y = vec![BigRational::zero(); self.rows.len()];
                y[row] = BigRational::from_integer(sign.into());
                repair(self, &mut y, &fixings);
                LpOutcome::Infeasible(FarkasCertificate { y, presolve_row: Some(row) })
            }
            Presolved::Reduced { fixings, live_vars, live_rows } => {
                match simplex(self, &live_vars, &live_rows) {
                    Ok(x) => LpOutcome::Feasible(x),
                    Err(mut y) => {
                        repair(self, &mut y, &fixings);
                        LpOutcome::Infeasible(FarkasCertificate { y, presolve_row: None })
                    }
                }
            }
        };
        match &outcome {
            LpOutcome::Feasible(x) => assert!(self.is_solution(x), "simplex produced an invalid point"),
            LpOutcome::Infeasible(c) => assert!(self.is_farkas(&c.y), "invalid Farkas certificate"),
        }
        outcome
    }
}

/// A zero row and the variables it forced to zero, in the order discovered.
type Fixings = Vec<(usize, Vec<usize>)>;

enum Presolved {
    Infeasible { row: usize, fixings: Fixings },
    Reduced { fixings: Fixings, live_vars: Vec<usize>, live_rows: Vec<usize> },
}

fn presolve(sys: &LinearSystem) -> Presolved {
    let mut fixed = vec![false; sys.num_vars];
    let mut used_row = vec![false; sys.rows.len()];
    let mut fixings: Fixings = Vec::new();
    loop {
        let mut progress = false;
        for (r, row) in sys.rows.iter().enumerate() {
            if used_row[r] || !row.rhs.is_zero() {
                continue;
            }
            let live: Vec<(usize, &BigRational)> =
                row.coeffs.iter().filter(|(v, _)| !fixed[**v]).map(|(v, c)| (*v, c)).collect();
            if live.is_empty() || live.iter().any(|(_, c)| c.is_negative()) {
                continue;
            }
            let vars: Vec<usize> = live.iter().map(|(v, _)| *v).collect();
            for &v in &vars {
                fixed[v] = true;
            }
            used_row[r] = true;
            fixings.push((r, vars));
            progress = true;
        }
        if !progress {
            break;
        }
    }
    for (r, row) in sys.rows.iter().enumerate() {
        if !row.rhs.is_zero() && row.coeffs.keys().all(|&v| fixed[v]) {
            return Presolved::Infeasible { row: r, fixings };
        }
    }
    let live_vars = (0..sys.num_vars).filter(|&v| !fixed[v]).collect();
    let live_rows = (0..sys.rows.len())
        .filter(|&r| !used_row[r] && sys.rows[r].coeffs.keys().any(|&v| !fixed[v]))
        .collect();
    Presolved::Reduced { fixings, live_vars, live_rows }
}

/// Raises the multipliers of presolve zero rows, latest first, until every
/// column of a fixed variable has a nonnegative combination. Each zero row
/// only has negative coefficients on variables fixed before it, so walking
/// backwards never undoes earlier work.
fn repair(sys: &LinearSystem, y: &mut [BigRational], fixings: &Fixings) {
    for (row, vars) in fixings.iter().rev() {
        let combo = sys.combine_columns(y);
        let coeffs = &sys.rows[*row].coeffs;
        let mut t = BigRational::zero();
        for v in vars {
            if combo[*v].is_negative() {
                let need = -&combo[*v] / &coeffs[v];
                if need > t {
                    t = need;
                }
            }
        }
        y[*row] += t;
    }
}

/// Phase I simplex on the rows and columns left after presolve. Returns a
/// solution of the full system (fixed variables set to 0) or a Farkas vector
/// supported on `live_rows`.
fn simplex(
    sys: &LinearSystem,
    live_vars: &[usize],
    live_rows: &[usize],
) -> Result<Vec<BigRational>, Vec<BigRational>> {
    let m = live_rows.len();
    let n = live_vars.len();
    let col_of: BTreeMap<usize, usize> = live_vars.iter().enumerate().map(|(j, &v)| (v, j)).collect();
    let width = n + m + 1;
    let mut flip = vec![false; m];
    let mut t: Vec<Vec<BigRational>> = Vec::with_capacity(m);
    for (i, &r) in live_rows.iter().enumerate() {
        let row = &sys.rows[r];
        let mut line = vec![BigRational::zero(); width];
        for (v, c) in &row.coeffs {
            if let Some(&j) = col_of.get(v) {
                line[j] = c.clone();
            }
        }
        line[n + i] = BigRational::one();
        line[width - 1] = row.rhs.clone();
        if row.rhs.is_negative() {
            flip[i] = true;
            for (j, x) in line.iter_mut().enumerate() {
                if j != n + i {
                    *x = -x.clone();
                }
            }
        }
        t.push(line);
    }
    let mut cost = vec![BigRational::zero(); width];
    for line in &t {
        for j in 0..n {
            cost[j] -= &line[j];
        }
        cost[width - 1] -= &line[width - 1];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    while let Some(enter) = (0..n + m).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<usize> = None;
        let mut best: Option<BigRational> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &t[i][width - 1] / &t[i][enter];
                let better = match &best {
                    None => true,
                    Some(b) => ratio < *b || (ratio == *b && basis[i] < basis[leave.unwrap_or(i)]),
                };
                if better {
                    best = Some(ratio);
                    leave = Some(i);
                }
            }
        }
        let Some(p) = leave else {
            unreachable!("phase I objective is bounded below by zero")
        };
        let pivot = t[p][enter].clone();
        for x in t[p].iter_mut() {
            *x /= &pivot;
        }
        let pivot_row = t[p].clone();
        for (i, line) in t.iter_mut().enumerate() {
            if i != p && !line[enter].is_zero() {
                let f = line[enter].clone();
                for (x, y) in line.iter_mut().zip(&pivot_row) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        let f = cost[enter].clone();
        for (x, y) in cost.iter_mut().zip(&pivot_row) {
            if !y.is_zero() {
                *x -= &f * y;
            }
        }
        basis[p] = enter;
    }

    if cost[width - 1].is_zero() {
        let mut x = vec![BigRational::zero(); sys.num_vars];
        for (i, &b) in basis.iter().enumerate() {
            if b < n {
                x[live_vars[b]] = t[i][width - 1].clone();
            }
        }
        Ok(x)
    } else {
        let mut y = vec![BigRational::zero(); sys.rows.len()];
        for (i, &r) in live_rows.iter().enumerate() {
            let dual = BigRational::one() - &cost[n + i];
            let farkas = -dual;
            y[r] = if flip[i] { -farkas } else { farkas };
        }
        Err(y)
    }
}
