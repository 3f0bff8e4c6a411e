//! Fourier–Motzkin elimination for `{λ ≥ 0 : A·λ ≥ b}` over the rationals.
//!
//! Deliberately naive and written without reference to the simplex code:
//! it is the oracle the LP solver is checked against.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

type Q = BigRational;

/// One constraint `coef · λ ≥ rhs`.
#[derive(Clone, Debug)]
struct Row {
    coef: Vec<Q>,
    rhs: Q,
}

fn q(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// Decides whether some rational `λ ≥ 0` satisfies `a·λ ≥ b`.
pub fn feasible(a: &[Vec<i64>], b: &[i64], vars: usize) -> bool {
    let mut rows: Vec<Row> = a
        .iter()
        .zip(b)
        .map(|(r, &rhs)| Row {
            coef: r.iter().map(|&c| q(c)).collect(),
            rhs: q(rhs),
        })
        .collect();
    for j in 0..vars {
        let mut unit = vec![q(0); vars];
        unit[j] = q(1);
        rows.push(Row {
            coef: unit,
            rhs: q(0),
        });
    }

    for j in 0..vars {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for r in rows {
            if r.coef[j].is_positive() {
                pos.push(r);
            } else if r.coef[j].is_negative() {
                neg.push(r);
            } else {
                rest.push(r);
            }
        }
        // c_p·λ_j ≥ …  and  −c_n·λ_j ≤ …  combine into a row free of λ_j
        for p in &pos {
            for n in &neg {
                let wp = -n.coef[j].clone();
                let wn = p.coef[j].clone();
                let coef: Vec<Q> = p
                    .coef
                    .iter()
                    .zip(&n.coef)
                    .map(|(x, y)| x * &wp + y * &wn)
                    .collect();
                debug_assert!(coef[j].is_zero());
                rest.push(Row {
                    coef,
                    rhs: &p.rhs * &wp + &n.rhs * &wn,
                });
            }
        }
        rows = dedup(rest);
    }
    // every remaining row reads 0 ≥ rhs
    rows.iter().all(|r| !r.rhs.is_positive())
}

/// Normalises rows so that the first nonzero coefficient has magnitude 1,
/// then drops duplicates, to keep the pairwise blow-up in check.
fn dedup(rows: Vec<Row>) -> Vec<Row> {
    let mut out: Vec<Row> = Vec::new();
    for mut r in rows {
        if let Some(lead) = r.coef.iter().find(|c| !c.is_zero()).cloned() {
            let s = lead.abs();
            r.coef.iter_mut().for_each(|c| *c = &*c / &s);
            r.rhs = &r.rhs / &s;
        } else if !r.rhs.is_positive() {
            continue; // 0 ≥ nonpositive: always true
        }
        if !out.iter().any(|o| o.coef == r.coef && o.rhs == r.rhs) {
            out.push(r);
        }
    }
    out
}

/// Exact check of `λ ≥ 0` and `a·λ ≥ b`.
pub fn satisfies(a: &[Vec<i64>], b: &[i64], lambda: &[Q]) -> bool {
    lambda.iter().all(|x| !x.is_negative())
        && a.iter().zip(b).all(|(row, &rhs)| {
            let lhs: Q = row.iter().zip(lambda).map(|(&c, x)| q(c) * x).sum();
            lhs >= q(rhs)
        })
}
