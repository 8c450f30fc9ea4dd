//! Operators on the composite qubit ⊗ phonon space.
//!
//! Conventions: σ₊ = |e⟩⟨g|, σ_φ = e^{−iφ}σ₊ + e^{iφ}σ₋ (so σ_φ(0) = σ_x and
//! σ_φ(π/2) = σ_y), x = a + a†, p = −i(a − a†) with [x, p] = 2i, and the
//! rotated quadrature x_φ = e^{−iφ}a + e^{iφ}a†.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::layout::{Factor, HilbertLayout, Mode};
use crate::sparse::CsrMatrix;

type C = Complex64;

const ONE: C = C { re: 1.0, im: 0.0 };

/// Qubit operator selector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PauliAxis {
    X,
    Y,
    Z,
    Plus,
    Minus,
    Phi(f64),
}

/// Single-factor matrices, independent of any layout.
pub mod local {
    use super::*;

    /// Truncated annihilation operator on levels 0..dim.
    pub fn annihilation(dim: usize) -> CsrMatrix {
        CsrMatrix::from_triplets(
            dim,
            dim,
            (1..dim).map(|n| (n - 1, n, C::new((n as f64).sqrt(), 0.0))),
        )
    }

    pub fn creation(dim: usize) -> CsrMatrix {
        annihilation(dim).adjoint()
    }

    pub fn number(dim: usize) -> CsrMatrix {
        CsrMatrix::diagonal(&(0..dim).map(|n| C::new(n as f64, 0.0)).collect::<Vec<_>>())
    }

    /// e^{−iφ}a + e^{iφ}a†
    pub fn rotated_quadrature(dim: usize, phi: f64) -> CsrMatrix {
        let a = annihilation(dim);
        a.lincomb(C::from_polar(1.0, -phi), &a.adjoint(), C::from_polar(1.0, phi))
    }

    pub fn pauli(axis: PauliAxis) -> CsrMatrix {
        let e = |entries: Vec<(usize, usize, C)>| CsrMatrix::from_triplets(2, 2, entries);
        match axis {
            PauliAxis::X => pauli(PauliAxis::Phi(0.0)),
            PauliAxis::Y => pauli(PauliAxis::Phi(std::f64::consts::FRAC_PI_2)),
            PauliAxis::Z => e(vec![(0, 0, -ONE), (1, 1, ONE)]),
            PauliAxis::Plus => e(vec![(1, 0, ONE)]),
            PauliAxis::Minus => e(vec![(0, 1, ONE)]),
            PauliAxis::Phi(phi) => e(vec![
                (1, 0, C::from_polar(1.0, -phi)),
                (0, 1, C::from_polar(1.0, phi)),
            ]),
        }
    }
}

/// Operator on a [`HilbertLayout`], stored sparsely.
#[derive(Clone, Debug)]
pub struct LinearOperator {
    layout: Arc<HilbertLayout>,
    matrix: CsrMatrix,
}

impl PartialEq for LinearOperator {
    fn eq(&self, other: &Self) -> bool {
        self.layout == other.layout && self.matrix == other.matrix
    }
}

impl LinearOperator {
    pub fn new(layout: Arc<HilbertLayout>, matrix: CsrMatrix) -> Result<Self> {
        let d = layout.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::LayoutMismatch);
        }
        Ok(LinearOperator { layout, matrix })
    }

    pub fn identity(layout: &Arc<HilbertLayout>) -> Self {
        let d = layout.total_dim();
        LinearOperator {
            layout: layout.clone(),
            matrix: CsrMatrix::identity(d),
        }
    }

    pub fn zero(layout: &Arc<HilbertLayout>) -> Self {
        let d = layout.total_dim();
        LinearOperator {
            layout: layout.clone(),
            matrix: CsrMatrix::zeros(d, d),
        }
    }

    /// Lifts `local`, acting on the tensor product of `factors` (first factor
    /// most significant), to the full layout with identity elsewhere.
    pub fn embed(layout: &Arc<HilbertLayout>, factors: &[Factor], local: &CsrMatrix) -> Result<Self> {
        for (k, &f) in factors.iter().enumerate() {
            layout.check_factor(f)?;
            if factors[..k].contains(&f) {
                return Err(Error::IdenticalModes);
            }
        }
        let dims: Vec<usize> = factors.iter().map(|&f| layout.factor_dim(f)).collect();
        let strides: Vec<usize> = factors.iter().map(|&f| layout.stride(f)).collect();
        let local_dim: usize = dims.iter().product();
        if local.nrows() != local_dim || local.ncols() != local_dim {
            return Err(Error::LayoutMismatch);
        }
        let mut local_strides = vec![1; dims.len()];
        for k in (0..dims.len().saturating_sub(1)).rev() {
            local_strides[k] = local_strides[k + 1] * dims[k + 1];
        }
        let total = layout.total_dim();
        let mut entries = Vec::with_capacity(total * (local.nnz() / local_dim.max(1) + 1));
        for i in 0..total {
            let mut li = 0;
            let mut rest = i;
            for k in 0..dims.len() {
                let d = (i / strides[k]) % dims[k];
                li += d * local_strides[k];
                rest -= d * strides[k];
            }
            for (lc, v) in local.row(li) {
                let mut j = rest;
                let mut r = lc;
                for k in 0..dims.len() {
                    j += (r / local_strides[k]) * strides[k];
                    r %= local_strides[k];
                }
                entries.push((i, j, v));
            }
        }
        Ok(LinearOperator {
            layout: layout.clone(),
            matrix: CsrMatrix::from_triplets(total, total, entries),
        })
    }

    pub fn layout(&self) -> &Arc<HilbertLayout> {
        &self.layout
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.layout, &other.layout) || *self.layout == *other.layout {
            Ok(())
        } else {
            Err(Error::LayoutMismatch)
        }
    }

    fn wrap(&self, matrix: CsrMatrix) -> Self {
        LinearOperator {
            layout: self.layout.clone(),
            matrix,
        }
    }

    pub fn adjoint(&self) -> Self {
        self.wrap(self.matrix.adjoint())
    }

    pub fn scale(&self, s: C) -> Self {
        self.wrap(self.matrix.scale(s))
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C::new(s, 0.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.wrap(self.matrix.add(&other.matrix)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.wrap(self.matrix.sub(&other.matrix)))
    }

    /// a·self + b·other
    pub fn lincomb(&self, a: C, other: &Self, b: C) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.wrap(self.matrix.lincomb(a, &other.matrix, b)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.wrap(self.matrix.matmul(&other.matrix)))
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.wrap(self.matrix.commutator(&other.matrix)))
    }

    /// self + self†
    pub fn plus_adjoint(&self) -> Self {
        self.wrap(self.matrix.add(&self.matrix.adjoint()))
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.matrix.sub(&self.matrix.adjoint()).max_abs()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() < tol
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.max_abs()
    }

    pub fn norm1(&self) -> f64 {
        self.matrix.norm1()
    }

    pub fn to_dense(&self) -> DMatrix<C> {
        self.matrix.to_dense()
    }

    /// Flat indices whose phonon counts all lie at or below `cutoff`.
    pub fn indices_below(&self, cutoff: usize) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| {
                let (_, n) = self.layout.decompose(i);
                n.iter().take(self.layout.n_modes()).all(|&k| k <= cutoff)
            })
            .collect()
    }

    /// Dense block on the basis states with every phonon count ≤ `cutoff`.
    pub fn block_below(&self, cutoff: usize) -> DMatrix<C> {
        let idx = self.indices_below(cutoff);
        self.matrix.restrict(&idx, &idx)
    }
}

/// σ-operator on the qubit factor.
pub fn pauli(axis: PauliAxis, layout: &Arc<HilbertLayout>) -> LinearOperator {
    LinearOperator::embed(layout, &[Factor::Qubit], &local::pauli(axis))
        .expect("qubit factor always exists")
}

pub fn annihilation(mode: Mode, layout: &Arc<HilbertLayout>) -> Result<LinearOperator> {
    layout.check_mode(mode)?;
    LinearOperator::embed(layout, &[Factor::Mode(mode)], &local::annihilation(layout.mode_dim()))
}

pub fn creation(mode: Mode, layout: &Arc<HilbertLayout>) -> Result<LinearOperator> {
    Ok(annihilation(mode, layout)?.adjoint())
}

pub fn number(mode: Mode, layout: &Arc<HilbertLayout>) -> Result<LinearOperator> {
    layout.check_mode(mode)?;
    LinearOperator::embed(layout, &[Factor::Mode(mode)], &local::number(layout.mode_dim()))
}

/// (x, p) with x = a + a†, p = −i(a − a†).
pub fn quadratures(mode: Mode, layout: &Arc<HilbertLayout>) -> Result<(LinearOperator, LinearOperator)> {
    Ok((
        rotated_quadrature(mode, 0.0, layout)?,
        rotated_quadrature(mode, std::f64::consts::FRAC_PI_2, layout)?,
    ))
}

/// x_φ = e^{−iφ}a + e^{iφ}a†.
pub fn rotated_quadrature(mode: Mode, phi: f64, layout: &Arc<HilbertLayout>) -> Result<LinearOperator> {
    layout.check_mode(mode)?;
    LinearOperator::embed(
        layout,
        &[Factor::Mode(mode)],
        &local::rotated_quadrature(layout.mode_dim(), phi),
    )
}

/// Parity e^{iπ Σ n_s} over the listed modes.
pub fn parity(modes: &[Mode], layout: &Arc<HilbertLayout>) -> Result<LinearOperator> {
    for &m in modes {
        layout.check_mode(m)?;
    }
    let diag: Vec<C> = (0..layout.total_dim())
        .map(|i| {
            let total: usize = modes.iter().map(|&m| layout.digit(i, Factor::Mode(m))).sum();
            if total.is_multiple_of(2) {
                ONE
            } else {
                -ONE
            }
        })
        .collect();
    LinearOperator::new(layout.clone(), CsrMatrix::diagonal(&diag))
}

#[cfg(test)]
mod tests {
    use super::*;

    const I: C = C { re: 0.0, im: 1.0 };
    use crate::layout::DEFAULT_DIM_CAP;

    fn layout(modes: usize, n: usize) -> Arc<HilbertLayout> {
        Arc::new(HilbertLayout::with_cap(modes, n, 0, DEFAULT_DIM_CAP).unwrap())
    }

    #[test]
    fn ladder_elements() {
        let l = layout(1, 2);
        let a = annihilation(Mode::A, &l).unwrap();
        let at = |n0: usize, n1: usize| a.matrix().get(l.index(0, &[n0]), l.index(0, &[n1]));
        assert!((at(0, 1).re - 1.0).abs() < 1e-15);
        assert!((at(1, 2).re - 2f64.sqrt()).abs() < 1e-15);
        assert!(annihilation(Mode::B, &l).is_err());
    }

    #[test]
    fn canonical_commutators_on_interior_block() {
        let l = layout(1, 10);
        let a = annihilation(Mode::A, &l).unwrap();
        let comm = a.commutator(&a.adjoint()).unwrap();
        let block = comm.block_below(9);
        let eye = DMatrix::<C>::identity(block.nrows(), block.ncols());
        assert!((block - eye).camax() < 1e-12);

        let (x, p) = quadratures(Mode::A, &l).unwrap();
        let xp = x.commutator(&p).unwrap().block_below(9);
        let two_i = DMatrix::<C>::identity(xp.nrows(), xp.ncols()) * C::new(0.0, 2.0);
        assert!((xp - two_i).camax() < 1e-12);
        let x2 = x.mul(&x).unwrap();
        assert!((x2.matrix().get(0, 0).re - 1.0).abs() < 1e-15);
        let pr = rotated_quadrature(Mode::A, std::f64::consts::FRAC_PI_2, &l).unwrap();
        assert!(pr.sub(&p).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn pauli_conventions() {
        let sx = local::pauli(PauliAxis::X).to_dense();
        let sy = local::pauli(PauliAxis::Y).to_dense();
        let sz = local::pauli(PauliAxis::Z).to_dense();
        assert!((&sx * &sy - sz * I).camax() < 1e-15);
        let s0 = local::pauli(PauliAxis::Phi(0.0)).to_dense();
        assert!((s0 - sx).camax() < 1e-15);
        let sp = local::pauli(PauliAxis::Plus).to_dense();
        // σ₊|g⟩ = |e⟩
        assert_eq!(sp[(1, 0)], ONE);
    }

    #[test]
    fn disjoint_factors_commute() {
        let l = layout(3, 3);
        let a = annihilation(Mode::A, &l).unwrap();
        let b = creation(Mode::B, &l).unwrap();
        let s = pauli(PauliAxis::Phi(0.4), &l);
        assert_eq!(a.commutator(&b).unwrap().max_abs(), 0.0);
        assert_eq!(s.commutator(&b).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn embed_two_factor_matches_product() {
        let l = layout(2, 3);
        let d = l.mode_dim();
        let local_ab = local::creation(d).kron(&local::annihilation(d));
        let direct = LinearOperator::embed(&l, &[Factor::Mode(Mode::A), Factor::Mode(Mode::B)], &local_ab).unwrap();
        let prod = creation(Mode::A, &l).unwrap().mul(&annihilation(Mode::B, &l).unwrap()).unwrap();
        assert!(direct.sub(&prod).unwrap().max_abs() < 1e-15);
        // the same local matrix on (B, A) is b†a
        let rev = LinearOperator::embed(&l, &[Factor::Mode(Mode::B), Factor::Mode(Mode::A)], &local_ab).unwrap();
        let prod_rev = creation(Mode::B, &l).unwrap().mul(&annihilation(Mode::A, &l).unwrap()).unwrap();
        assert!(rev.sub(&prod_rev).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn parity_signs() {
        let l = layout(2, 2);
        let p = parity(&[Mode::A, Mode::B], &l).unwrap();
        assert_eq!(p.matrix().get(l.index(0, &[1, 0]), l.index(0, &[1, 0])), -ONE);
        assert_eq!(p.matrix().get(l.index(1, &[1, 1]), l.index(1, &[1, 1])), ONE);
    }
}
