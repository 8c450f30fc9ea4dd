//! Angular-momentum (Schwinger) picture of two motional modes.
//!
//! J₊ = a†b, J_z = (n_a − n_b)/2. States with a fixed total phonon number
//! N′ = n_a + n_b span a spin-N′/2 block that the beam splitter rotates.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expm::expm_dense;
use crate::gates::{GateParams, IdealGate};
use crate::layout::{Factor, HilbertLayout, Mode};
use crate::operator::{local, LinearOperator};
use crate::sparse::CsrMatrix;

type C = Complex64;

/// Basis |n, N′−n⟩ for n = N′, …, 0, i.e. J_z eigenvalue m = n − N′/2
/// in decreasing order.
#[derive(Clone, Debug, PartialEq)]
pub struct SchwingerBlock {
    pub total_n: usize,
    pub j: f64,
    pub basis: Vec<(usize, usize)>,
}

impl SchwingerBlock {
    pub fn new(total_n: usize) -> Self {
        SchwingerBlock {
            total_n,
            j: total_n as f64 / 2.0,
            basis: (0..=total_n).rev().map(|n| (n, total_n - n)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Flat indices of the block inside the two-mode local space of dimension d².
    pub fn local_indices(&self, mode_dim: usize) -> Vec<usize> {
        self.basis.iter().map(|&(na, nb)| na * mode_dim + nb).collect()
    }

    /// Spin matrices (J_x, J_y, J_z) in the block basis, from the
    /// standard ladder elements √(j(j+1) − m(m+1)).
    pub fn spin_matrices(&self) -> (DMatrix<C>, DMatrix<C>, DMatrix<C>) {
        let d = self.dim();
        let j = self.j;
        let m = |k: usize| j - k as f64;
        let mut jp = DMatrix::<C>::zeros(d, d);
        for k in 1..d {
            // J₊|m⟩ = c|m+1⟩, row k−1 holds m+1
            let mk = m(k);
            jp[(k - 1, k)] = C::new((j * (j + 1.0) - mk * (mk + 1.0)).sqrt(), 0.0);
        }
        let jm = jp.adjoint();
        let jx = (&jp + &jm) * C::new(0.5, 0.0);
        let jy = (&jp - &jm) * C::new(0.0, -0.5);
        let jz = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(d, |k, _| C::new(m(k), 0.0)));
        (jx, jy, jz)
    }
}

/// All blocks that fit inside the nominal cutoff.
pub fn blocks(layout: &HilbertLayout) -> Vec<SchwingerBlock> {
    (0..=layout.nominal_cutoff()).map(SchwingerBlock::new).collect()
}

#[derive(Clone, Debug)]
pub struct JOperators {
    pub jx: LinearOperator,
    pub jy: LinearOperator,
    pub jz: LinearOperator,
    pub j2: LinearOperator,
}

fn distinct(modes: (Mode, Mode), layout: &HilbertLayout) -> Result<()> {
    if modes.0 == modes.1 {
        return Err(Error::IdenticalModes);
    }
    layout.check_mode(modes.0)?;
    layout.check_mode(modes.1)
}

fn local_j(d: usize) -> (CsrMatrix, CsrMatrix, CsrMatrix) {
    let a = local::annihilation(d);
    let jp = a.adjoint().kron(&a);
    let jm = jp.adjoint();
    let jx = jp.lincomb(C::new(0.5, 0.0), &jm, C::new(0.5, 0.0));
    let jy = jp.lincomb(C::new(0.0, -0.5), &jm, C::new(0.0, 0.5));
    let id = CsrMatrix::identity(d);
    let n = local::number(d);
    let jz = n.kron(&id).lincomb(C::new(0.5, 0.0), &id.kron(&n), C::new(-0.5, 0.0));
    (jx, jy, jz)
}

/// (J_x, J_y, J_z, J²) on the full layout for the mode pair (a, b).
pub fn j_operators(modes: (Mode, Mode), layout: &Arc<HilbertLayout>) -> Result<JOperators> {
    distinct(modes, layout)?;
    let (jx, jy, jz) = local_j(layout.mode_dim());
    let j2 = jx.matmul(&jx).add(&jy.matmul(&jy)).add(&jz.matmul(&jz));
    let f = [Factor::Mode(modes.0), Factor::Mode(modes.1)];
    Ok(JOperators {
        jx: LinearOperator::embed(layout, &f, &jx)?,
        jy: LinearOperator::embed(layout, &f, &jy)?,
        jz: LinearOperator::embed(layout, &f, &jz)?,
        j2: LinearOperator::embed(layout, &f, &j2)?,
    })
}

/// Restriction of a two-mode local operator to one block.
pub fn restrict_local(op: &CsrMatrix, block: &SchwingerBlock, mode_dim: usize) -> DMatrix<C> {
    let idx = block.local_indices(mode_dim);
    op.restrict(&idx, &idx)
}

/// Largest |element| of a two-mode local operator connecting different blocks.
pub fn off_block_norm(op: &CsrMatrix, mode_dim: usize) -> f64 {
    let total = |i: usize| i / mode_dim + i % mode_dim;
    op.triplets()
        .filter(|&(r, c, _)| total(r) != total(c))
        .map(|(_, _, v)| v.norm())
        .fold(0.0, f64::max)
}

/// Rotation axis angle χ for which the beam splitter with phase ψ equals
/// exp(−i·2θ·(cos χ J_x + sin χ J_y)).
pub fn rotation_axis(mix_phase: f64) -> f64 {
    -mix_phase - std::f64::consts::FRAC_PI_2
}

/// Worst-case deviation between the ideal beam splitter and the spin
/// rotation exp(−i·2θ·J_χ), over every block inside the nominal cutoff.
/// Also checks that the beam splitter does not couple different blocks.
pub fn verify_bs_rotation(mix_phase: f64, mix_angle: f64, modes: (Mode, Mode), layout: &Arc<HilbertLayout>) -> Result<f64> {
    distinct(modes, layout)?;
    let gate = IdealGate::with_leak_tol(
        GateParams::BeamSplitter {
            a: modes.0,
            b: modes.1,
            mix_angle,
            mix_phase,
        },
        layout,
        f64::INFINITY,
    )?;
    let d = layout.mode_dim();
    let u = gate.local_matrix();
    let chi = rotation_axis(mix_phase);
    let mut worst = off_block_norm(&u, d);
    for block in blocks(layout) {
        let (jx, jy, _) = block.spin_matrices();
        let jchi = jx * C::new(chi.cos(), 0.0) + jy * C::new(chi.sin(), 0.0);
        let rot = expm_dense(&CsrMatrix::from_dense(&jchi), C::new(0.0, -2.0 * mix_angle));
        let ub = restrict_local(&u, &block, d);
        worst = worst.max((ub - rot).camax());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::DEFAULT_DIM_CAP;

    fn layout(n: usize) -> Arc<HilbertLayout> {
        Arc::new(HilbertLayout::with_cap(2, n, 4, DEFAULT_DIM_CAP).unwrap())
    }

    #[test]
    fn block_basis_and_dimension() {
        let b = SchwingerBlock::new(3);
        assert_eq!(b.dim(), 4);
        assert_eq!(b.basis[0], (3, 0));
        assert_eq!(b.basis[3], (0, 3));
    }

    #[test]
    fn local_j_matches_spin_matrices_on_blocks() {
        let d = 10;
        let (jx, jy, jz) = local_j(d);
        for n in 0..=5 {
            let b = SchwingerBlock::new(n);
            let (sx, sy, sz) = b.spin_matrices();
            assert!((restrict_local(&jx, &b, d) - sx).camax() < 1e-13);
            assert!((restrict_local(&jy, &b, d) - sy).camax() < 1e-13);
            assert!((restrict_local(&jz, &b, d) - sz).camax() < 1e-13);
        }
    }

    #[test]
    fn zero_angle_has_no_deviation() {
        assert_eq!(verify_bs_rotation(0.4, 0.0, (Mode::A, Mode::B), &layout(4)).unwrap(), 0.0);
    }

    #[test]
    fn rejects_identical_modes() {
        assert!(matches!(
            verify_bs_rotation(0.0, 1.0, (Mode::B, Mode::B), &layout(3)),
            Err(Error::IdenticalModes)
        ));
    }

    #[test]
    fn spin_half_block_is_a_plain_rotation() {
        // N′ = 1: exp(−iθ(e^{-iχ}J₊ + h.c.)) on {|1,0⟩, |0,1⟩}
        let l = layout(3);
        let (theta, psi) = (0.7, 0.3);
        let g = IdealGate::beamsplitter(theta, psi, Mode::A, Mode::B, &l).unwrap();
        let u = restrict_local(&g.local_matrix(), &SchwingerBlock::new(1), l.mode_dim());
        let expected = DMatrix::from_row_slice(
            2,
            2,
            &[
                C::new(theta.cos(), 0.0),
                C::from_polar(theta.sin(), psi),
                -C::from_polar(theta.sin(), -psi),
                C::new(theta.cos(), 0.0),
            ],
        );
        assert!((u - expected).camax() < 1e-12);
    }
}
