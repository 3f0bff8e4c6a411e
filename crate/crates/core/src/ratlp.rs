//! Exact rational feasibility of `A·λ ≥ b, λ ≥ 0`.
//!
//! Phase-1 simplex over arbitrary-precision rationals with Bland's
//! smallest-index rule, so every pivot sequence terminates and no rounding
//! can turn a feasible system into an infeasible one.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Canonical arbitrary-precision fraction (reduced, positive denominator).
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("row {row} has {found} coefficients, expected {expected}")]
    RowLength {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("matrix has {rows} rows but right-hand side has {rhs} entries")]
    RhsLength { rows: usize, rhs: usize },
    #[error("witness has {found} entries, expected {expected}")]
    WitnessLength { expected: usize, found: usize },
}

/// The system `A·λ ≥ b` over `λ ≥ 0`, with one row per constraint and one
/// column per variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityProblem {
    a: Vec<Vec<BigInt>>,
    b: Vec<BigInt>,
    vars: usize,
}

impl FeasibilityProblem {
    pub fn new(a: Vec<Vec<BigInt>>, b: Vec<BigInt>, vars: usize) -> Result<Self, LpError> {
        if a.len() != b.len() {
            return Err(LpError::RhsLength {
                rows: a.len(),
                rhs: b.len(),
            });
        }
        for (row, r) in a.iter().enumerate() {
            if r.len() != vars {
                return Err(LpError::RowLength {
                    row,
                    expected: vars,
                    found: r.len(),
                });
            }
        }
        Ok(FeasibilityProblem { a, b, vars })
    }

    /// Convenience constructor from small integers.
    pub fn from_i64(a: &[Vec<i64>], b: &[i64], vars: usize) -> Result<Self, LpError> {
        Self::new(
            a.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
            b.iter().map(|&x| BigInt::from(x)).collect(),
            vars,
        )
    }

    pub fn rows(&self) -> usize {
        self.a.len()
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn matrix(&self) -> &[Vec<BigInt>] {
        &self.a
    }

    pub fn rhs(&self) -> &[BigInt] {
        &self.b
    }

    /// Whether `λ` is non-negative and satisfies every row exactly.
    pub fn satisfied_by(&self, lambda: &[Rational]) -> Result<bool, LpError> {
        if lambda.len() != self.vars {
            return Err(LpError::WitnessLength {
                expected: self.vars,
                found: lambda.len(),
            });
        }
        if lambda.iter().any(Signed::is_negative) {
            return Ok(false);
        }
        Ok(self.a.iter().zip(&self.b).all(|(row, rhs)| {
            let lhs: Rational = row
                .iter()
                .zip(lambda)
                .map(|(c, l)| Rational::from_integer(c.clone()) * l)
                .sum();
            lhs >= Rational::from_integer(rhs.clone())
        }))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(Vec<Rational>),
    Infeasible,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }

    pub fn witness(&self) -> Option<&[Rational]> {
        match self {
            Feasibility::Feasible(w) => Some(w),
            Feasibility::Infeasible => None,
        }
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    /// Reduced costs of the phase-1 objective; last entry is minus its value.
    cost: Vec<Rational>,
    basis: Vec<usize>,
}

impl Tableau {
    fn rhs_col(&self) -> usize {
        self.cost.len() - 1
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for x in self.rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        if !self.cost[c].is_zero() {
            let f = self.cost[c].clone();
            for (x, p) in self.cost.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Runs Bland-rule pivots until the phase-1 objective is optimal or zero.
    fn solve(&mut self) {
        let rhs = self.rhs_col();
        loop {
            if self.cost[rhs].is_zero() {
                return;
            }
            let Some(enter) = (0..rhs).find(|&j| self.cost[j].is_negative()) else {
                return;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[enter].is_positive() {
                    continue;
                }
                let ratio = &row[rhs] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((best, best_ratio)) => {
                        ratio < *best_ratio
                            || (ratio == *best_ratio && self.basis[i] < self.basis[*best])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            // the phase-1 objective is bounded below by zero
            let (r, _) = leave.expect("phase-1 objective cannot be unbounded");
            self.pivot(r, enter);
        }
    }
}

/// Decides whether some rational `λ ≥ 0` satisfies `A·λ ≥ b`, returning a
/// witness when it does.
pub fn feasible(p: &FeasibilityProblem) -> Feasibility {
    let n = p.vars;
    let m = p.rows();
    let needs_artificial: Vec<usize> = (0..m).filter(|&i| p.b[i].is_positive()).collect();
    if needs_artificial.is_empty() {
        return Feasibility::Feasible(vec![Rational::zero(); n]);
    }

    // Columns: λ (n), surplus s (m), artificials (k), rhs.
    // Row i: A_i·λ - s_i = b_i, negated when b_i ≤ 0 so s_i can start basic.
    let k = needs_artificial.len();
    let width = n + m + k + 1;
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut art = 0;
    for i in 0..m {
        let mut row = vec![Rational::zero(); width];
        let positive = p.b[i].is_positive();
        let sign = if positive { BigInt::one() } else { -BigInt::one() };
        for j in 0..n {
            row[j] = Rational::from_integer(&p.a[i][j] * &sign);
        }
        row[n + i] = Rational::from_integer(-sign.clone());
        row[width - 1] = Rational::from_integer(&p.b[i] * &sign);
        if positive {
            row[n + m + art] = Rational::one();
            basis.push(n + m + art);
            art += 1;
        } else {
            basis.push(n + i);
        }
        rows.push(row);
    }

    let mut cost = vec![Rational::zero(); width];
    for j in n + m..n + m + k {
        cost[j] = Rational::one();
    }
    for &i in &needs_artificial {
        for (c, x) in cost.iter_mut().zip(&rows[i]) {
            *c -= x;
        }
    }

    let mut tab = Tableau { rows, cost, basis };
    tab.solve();
    if !tab.cost[width - 1].is_zero() {
        return Feasibility::Infeasible;
    }
    let mut lambda = vec![Rational::zero(); n];
    for (i, &v) in tab.basis.iter().enumerate() {
        if v < n {
            lambda[v] = tab.rows[i][width - 1].clone();
        }
    }
    debug_assert!(p.satisfied_by(&lambda).unwrap_or(false));
    Feasibility::Feasible(lambda)
}
