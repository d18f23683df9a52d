//! Exact matrix utilities over the rationals and the integers.
//!
//! Everything here is deterministic: pivots are always chosen at the lowest
//! feasible index, so repeated runs produce identical bases and identical
//! solutions.

use crate::rat::Rat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

pub type Matrix = Vec<Vec<Rat>>;

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Rat::one() } else { Rat::zero() })
                .collect()
        })
        .collect()
}

pub fn transpose(a: &Matrix) -> Matrix {
    if a.is_empty() {
        return Vec::new();
    }
    let rows = a.len();
    let cols = a[0].len();
    (0..cols)
        .map(|j| (0..rows).map(|i| a[i][j].clone()).collect())
        .collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let inner = if n > 0 { a[0].len() } else { 0 };
    let m = if b.is_empty() { 0 } else { b[0].len() };
    assert!(inner == b.len(), "shape mismatch in mat_mul");
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut acc = Rat::zero();
                    for k in 0..inner {
                        acc += &(&a[i][k] * &b[k][j]);
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &Matrix, v: &[Rat]) -> Vec<Rat> {
    a.iter()
        .map(|row| {
            let mut acc = Rat::zero();
            for (x, y) in row.iter().zip(v) {
                acc += &(x * y);
            }
            acc
        })
        .collect()
}

/// Inverse of a square matrix, or `None` if singular.
pub fn invert(a: &Matrix) -> Option<Matrix> {
    let n = a.len();
    let mut work: Vec<Vec<Rat>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            assert!(row.len() == n, "invert expects a square matrix");
            let mut r = row.clone();
            r.extend(identity(n)[i].iter().cloned());
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !work[r][col].is_zero())?;
        work.swap(col, pivot);
        let p = work[col][col].clone();
        let inv = p.recip()?;
        for x in work[col].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != col && !work[r][col].is_zero() {
                let f = work[r][col].clone();
                for c in 0..2 * n {
                    let delta = &f * &work[col][c];
                    work[r][c] -= &delta;
                }
            }
        }
    }
    Some(work.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Solves `A x = b` for square `A`; `None` if `A` is singular.
pub fn solve_square(a: &Matrix, b: &[Rat]) -> Option<Vec<Rat>> {
    let inv = invert(a)?;
    Some(mat_vec(&inv, b))
}

/// Row Hermite normal form of an integer matrix.
///
/// Returns the nonzero rows of the Hermite form: row-style echelon, positive
/// pivots, entries above each pivot reduced into `[0, pivot)`.  The result is
/// a canonical basis of the row span as a group under addition.
pub fn hermite_rows(mut m: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    if m.is_empty() {
        return m;
    }
    let cols = m[0].len();
    let mut row = 0;
    for col in 0..cols {
        // Clear the column below `row` by repeated Euclidean steps.
        loop {
            let mut idx: Option<usize> = None;
            for r in row..m.len() {
                if !m[r][col].is_zero() {
                    idx = match idx {
                        None => Some(r),
                        Some(best) => {
                            if m[r][col].abs() < m[best][col].abs() {
                                Some(r)
                            } else {
                                Some(best)
                            }
                        }
                    };
                }
            }
            let Some(best) = idx else { break };
            m.swap(row, best);
            if m[row][col].is_negative() {
                for x in m[row].iter_mut() {
                    *x = -&*x;
                }
            }
            let mut done = true;
            let pivot = m[row][col].clone();
            for r in row + 1..m.len() {
                if !m[r][col].is_zero() {
                    let q = m[r][col].div_floor(&pivot);
                    for c in 0..cols {
                        let delta = &q * &m[row][c];
                        m[r][c] -= delta;
                    }
                    if !m[r][col].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if row < m.len() && !m[row][col].is_zero() {
            // Reduce entries above the pivot.
            let pivot = m[row][col].clone();
            for r in 0..row {
                let q = m[r][col].div_floor(&pivot);
                if !q.is_zero() {
                    for c in 0..cols {
                        let delta = &q * &m[row][c];
                        m[r][c] -= delta;
                    }
                }
            }
            row += 1;
        }
        if row == m.len() {
            break;
        }
    }
    m.truncate(row);
    m
}
