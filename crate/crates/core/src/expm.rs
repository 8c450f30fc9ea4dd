//! Action of a matrix exponential on vectors by scaled Taylor series.
//!
//! exp(cA)v is computed as s successive applications of exp(cA/s), with s
//! chosen so that ‖cA/s‖₁ ≤ 1. Each factor is summed until two consecutive
//! terms fall below unit roundoff relative to the partial sum, which keeps
//! the truncation remainder under 1e-16 per step.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::sparse::CsrMatrix;

type C = Complex64;

const TERM_TOL: f64 = 1e-17;
const MAX_TERMS: usize = 80;

fn inf_norm(v: &[C]) -> f64 {
    v.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Number of scaling steps used for exp(cA).
pub fn scaling_steps(a_norm1: f64, c: C) -> usize {
    let x = c.norm() * a_norm1;
    if x <= 1.0 {
        1
    } else {
        x.ceil() as usize
    }
}

/// exp(c·A)·v.
pub fn expm_multiply(a: &CsrMatrix, c: C, v: &[C]) -> Vec<C> {
    expm_multiply_with_norm(a, a.norm1(), c, v)
}

/// As [`expm_multiply`] with a precomputed ‖A‖₁.
pub fn expm_multiply_with_norm(a: &CsrMatrix, a_norm1: f64, c: C, v: &[C]) -> Vec<C> {
    let s = scaling_steps(a_norm1, c);
    let h = c / s as f64;
    let mut w = v.to_vec();
    let mut term = vec![C::new(0.0, 0.0); v.len()];
    let mut next = vec![C::new(0.0, 0.0); v.len()];
    for _ in 0..s {
        term.copy_from_slice(&w);
        let mut small_in_row = 0;
        for k in 1..=MAX_TERMS {
            a.matvec_into(&term, &mut next);
            let f = h / k as f64;
            for (t, n) in term.iter_mut().zip(&next) {
                *t = n * f;
            }
            for (wi, ti) in w.iter_mut().zip(&term) {
                *wi += ti;
            }
            if inf_norm(&term) <= TERM_TOL * inf_norm(&w).max(f64::MIN_POSITIVE) {
                small_in_row += 1;
                if small_in_row == 2 {
                    break;
                }
            } else {
                small_in_row = 0;
            }
        }
    }
    w
}

/// Dense exp(c·A), assembled column by column.
pub fn expm_dense(a: &CsrMatrix, c: C) -> DMatrix<C> {
    let n = a.nrows();
    let norm = a.norm1();
    let mut out = DMatrix::from_element(n, n, C::new(0.0, 0.0));
    let mut e = vec![C::new(0.0, 0.0); n];
    for j in 0..n {
        e[j] = C::new(1.0, 0.0);
        let col = expm_multiply_with_norm(a, norm, c, &e);
        for (i, v) in col.into_iter().enumerate() {
            out[(i, j)] = v;
        }
        e[j] = C::new(0.0, 0.0);
    }
    out
}

/// Sparse exp(c·A) with entries below `prune` in magnitude dropped.
pub fn expm_sparse(a: &CsrMatrix, c: C, prune: f64) -> CsrMatrix {
    let n = a.nrows();
    let norm = a.norm1();
    let mut entries = Vec::new();
    let mut e = vec![C::new(0.0, 0.0); n];
    for j in 0..n {
        e[j] = C::new(1.0, 0.0);
        let col = expm_multiply_with_norm(a, norm, c, &e);
        for (i, v) in col.into_iter().enumerate() {
            if v.norm() > prune {
                entries.push((i, j, v));
            }
        }
        e[j] = C::new(0.0, 0.0);
    }
    CsrMatrix::from_triplets(n, n, entries)
}
