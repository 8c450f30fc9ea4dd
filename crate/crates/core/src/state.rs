//! State vectors, qubit preparations, and reduced-state diagnostics.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::layout::{Factor, HilbertLayout, Mode};
use crate::operator::LinearOperator;

type C = Complex64;

const ZERO: C = C { re: 0.0, im: 0.0 };

/// Qubit level, g ↦ digit 0 and e ↦ digit 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QubitLevel {
    G,
    E,
}

impl QubitLevel {
    pub fn digit(self) -> usize {
        match self {
            QubitLevel::G => 0,
            QubitLevel::E => 1,
        }
    }
}

/// Sign of a σ_φ eigenvalue.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// Two-component qubit state in the (|g⟩, |e⟩) basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitState(pub [C; 2]);

impl QubitState {
    pub fn ground() -> Self {
        QubitState([C::new(1.0, 0.0), ZERO])
    }

    pub fn excited() -> Self {
        QubitState([ZERO, C::new(1.0, 0.0)])
    }

    /// |±⟩_φ = (|e⟩ ± e^{iφ}|g⟩)/√2, the σ_φ eigenstate with eigenvalue ±1.
    pub fn eigenstate(phi: f64, sign: Sign) -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        QubitState([C::from_polar(sign.value() * h, phi), C::new(h, 0.0)])
    }

    pub fn g(&self) -> C {
        self.0[0]
    }

    pub fn e(&self) -> C {
        self.0[1]
    }
}

/// Coefficients ⟨n|α⟩ = e^{−|α|²/2} αⁿ/√(n!) for n < dim (not renormalized).
pub fn coherent_amplitudes(alpha: C, dim: usize) -> Vec<C> {
    let mut out = Vec::with_capacity(dim);
    let mut c = C::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..dim {
        out.push(c);
        c = c * alpha / ((n + 1) as f64).sqrt();
    }
    out
}

/// Normalized pure state on a layout.
#[derive(Clone, Debug)]
pub struct StateVector {
    layout: Arc<HilbertLayout>,
    amps: Vec<C>,
}

impl StateVector {
    /// Wraps raw amplitudes without normalizing.
    pub fn from_amplitudes(layout: Arc<HilbertLayout>, amps: Vec<C>) -> Result<Self> {
        if amps.len() != layout.total_dim() {
            return Err(Error::LayoutMismatch);
        }
        Ok(StateVector { layout, amps })
    }

    /// |q, n_a, n_b, n_c⟩; counts beyond the configured modes must be zero.
    pub fn basis(layout: &Arc<HilbertLayout>, q: QubitLevel, phonons: &[usize]) -> Result<Self> {
        let counts = Self::check_counts(layout, phonons)?;
        let mut amps = vec![ZERO; layout.total_dim()];
        amps[layout.index(q.digit(), &counts)] = C::new(1.0, 0.0);
        Ok(StateVector {
            layout: layout.clone(),
            amps,
        })
    }

    fn check_counts(layout: &HilbertLayout, phonons: &[usize]) -> Result<Vec<usize>> {
        let mut counts = vec![0; layout.n_modes()];
        for (k, &n) in phonons.iter().enumerate() {
            let mode = Mode::from_index(k).ok_or(Error::InvalidArgument(format!(
                "{} phonon counts given, at most 3 modes exist",
                phonons.len()
            )))?;
            if k >= layout.n_modes() {
                if n != 0 {
                    return Err(Error::UnknownMode(mode));
                }
                continue;
            }
            if n > layout.nominal_cutoff() {
                return Err(Error::CountExceedsTruncation {
                    mode,
                    count: n,
                    max: layout.nominal_cutoff(),
                });
            }
            counts[k] = n;
        }
        Ok(counts)
    }

    /// Qubit state ⊗ Fock states |n_a, n_b, …⟩.
    pub fn qubit_fock(layout: &Arc<HilbertLayout>, qubit: QubitState, phonons: &[usize]) -> Result<Self> {
        let counts = Self::check_counts(layout, phonons)?;
        let mut amps = vec![ZERO; layout.total_dim()];
        for q in 0..2 {
            amps[layout.index(q, &counts)] = qubit.0[q];
        }
        Ok(StateVector {
            layout: layout.clone(),
            amps,
        })
    }

    /// Qubit state ⊗ per-mode local amplitude vectors (shorter vectors are
    /// zero-padded); the result is normalized.
    pub fn product(layout: &Arc<HilbertLayout>, qubit: QubitState, modes: &[Vec<C>]) -> Result<Self> {
        if modes.len() != layout.n_modes() {
            return Err(Error::InvalidArgument(format!(
                "{} mode states for {} modes",
                modes.len(),
                layout.n_modes()
            )));
        }
        let d = layout.mode_dim();
        if let Some(v) = modes.iter().find(|v| v.len() > d) {
            return Err(Error::InvalidArgument(format!(
                "mode state of length {} exceeds mode dimension {d}",
                v.len()
            )));
        }
        let mut amps = vec![ZERO; layout.total_dim()];
        for (i, amp) in amps.iter_mut().enumerate() {
            let (q, n) = layout.decompose(i);
            let mut c = qubit.0[q];
            for (k, v) in modes.iter().enumerate() {
                c *= v.get(n[k]).copied().unwrap_or(ZERO);
            }
            *amp = c;
        }
        let mut s = StateVector {
            layout: layout.clone(),
            amps,
        };
        s.normalize();
        Ok(s)
    }

    /// Qubit state ⊗ vacuum on every mode.
    pub fn vacuum(layout: &Arc<HilbertLayout>, qubit: QubitState) -> Self {
        Self::qubit_fock(layout, qubit, &[]).expect("vacuum is always representable")
    }

    pub fn layout(&self) -> &Arc<HilbertLayout> {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[C] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C> {
        self.amps
    }

    pub fn amplitude(&self, q: QubitLevel, phonons: &[usize]) -> C {
        let mut counts = vec![0; self.layout.n_modes()];
        for (k, &n) in phonons.iter().enumerate().take(self.layout.n_modes()) {
            counts[k] = n;
        }
        self.amps[self.layout.index(q.digit(), &counts)]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) -> f64 {
        let n = self.norm();
        if n > 0.0 {
            for c in &mut self.amps {
                *c /= n;
            }
        }
        n
    }

    pub fn same_layout(&self, other: &HilbertLayout) -> Result<()> {
        if *self.layout == *other {
            Ok(())
        } else {
            Err(Error::LayoutMismatch)
        }
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &StateVector) -> Result<C> {
        other.same_layout(&self.layout)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn apply(&self, op: &LinearOperator) -> Result<StateVector> {
        self.same_layout(op.layout())?;
        Ok(StateVector {
            layout: self.layout.clone(),
            amps: op.matrix().matvec(&self.amps),
        })
    }

    /// ⟨ψ|A|ψ⟩
    pub fn expectation(&self, op: &LinearOperator) -> Result<C> {
        let applied = self.apply(op)?;
        self.inner(&applied)
    }

    /// Probability of each flat basis index.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|c| c.norm_sqr()).collect()
    }

    /// Joint phonon distribution with the qubit traced out, keyed by flat
    /// motional index (qubit digit dropped).
    pub fn phonon_distribution(&self) -> Vec<f64> {
        let half = self.layout.total_dim() / 2;
        (0..half)
            .map(|i| self.amps[i].norm_sqr() + self.amps[i + half].norm_sqr())
            .collect()
    }

    /// Marginal phonon-number distribution of one mode.
    pub fn mode_distribution(&self, mode: Mode) -> Result<Vec<f64>> {
        self.layout.check_mode(mode)?;
        let mut p = vec![0.0; self.layout.mode_dim()];
        for (i, c) in self.amps.iter().enumerate() {
            p[self.layout.digit(i, Factor::Mode(mode))] += c.norm_sqr();
        }
        Ok(p)
    }

    /// Population with any mode above the nominal cutoff.
    pub fn guard_population(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| self.layout.in_guard_band(*i))
            .map(|(_, c)| c.norm_sqr())
            .sum()
    }

    /// Reduced density matrix on `keep` (ordered as given).
    pub fn partial_trace(&self, keep: &[Factor]) -> Result<DensityMatrix> {
        reduce(&self.layout, keep, std::iter::once((1.0, &self.amps[..])))
    }

    /// Tr ρ_q² of the reduced qubit state.
    pub fn qubit_purity(&self) -> f64 {
        self.partial_trace(&[Factor::Qubit])
            .expect("qubit factor always exists")
            .purity()
    }

    /// Global phase that best aligns `self` with `reference`, applied.
    pub fn phase_aligned_to(&self, reference: &StateVector) -> Result<StateVector> {
        let ov = self.inner(reference)?;
        let ph = if ov.norm() > 0.0 { ov / ov.norm() } else { C::new(1.0, 0.0) };
        Ok(StateVector {
            layout: self.layout.clone(),
            amps: self.amps.iter().map(|c| c * ph).collect(),
        })
    }
}

/// Weighted mixture of pure states on one layout.
#[derive(Clone, Debug)]
pub struct Ensemble {
    members: Vec<(f64, StateVector)>,
}

impl Ensemble {
    /// Weights are normalized to sum to one.
    pub fn new(members: Vec<(f64, StateVector)>) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty ensemble".into()))?;
        let layout = first.1.layout().clone();
        let mut total = 0.0;
        for (w, s) in &members {
            s.same_layout(&layout)?;
            if !(*w >= 0.0 && w.is_finite()) {
                return Err(Error::InvalidArgument(format!("negative ensemble weight {w}")));
            }
            total += w;
        }
        if total <= 0.0 {
            return Err(Error::InvalidArgument("ensemble weights sum to zero".into()));
        }
        Ok(Ensemble {
            members: members.into_iter().map(|(w, s)| (w / total, s)).collect(),
        })
    }

    pub fn pure(state: StateVector) -> Self {
        Ensemble {
            members: vec![(1.0, state)],
        }
    }

    pub fn members(&self) -> &[(f64, StateVector)] {
        &self.members
    }

    pub fn layout(&self) -> &Arc<HilbertLayout> {
        self.members[0].1.layout()
    }

    pub fn partial_trace(&self, keep: &[Factor]) -> Result<DensityMatrix> {
        reduce(
            self.layout(),
            keep,
            self.members.iter().map(|(w, s)| (*w, s.amplitudes())),
        )
    }

    /// Σ w_k ⟨ψ_k|A|ψ_k⟩
    pub fn expectation(&self, op: &LinearOperator) -> Result<C> {
        let mut acc = ZERO;
        for (w, s) in &self.members {
            acc += s.expectation(op)? * *w;
        }
        Ok(acc)
    }
}

fn reduce<'a, I>(layout: &HilbertLayout, keep: &[Factor], members: I) -> Result<DensityMatrix>
where
    I: Iterator<Item = (f64, &'a [C])>,
{
    if keep.is_empty() {
        return Err(Error::EmptyKeep);
    }
    for (k, &f) in keep.iter().enumerate() {
        layout.check_factor(f)?;
        if keep[..k].contains(&f) {
            return Err(Error::IdenticalModes);
        }
    }
    let dims: Vec<usize> = keep.iter().map(|&f| layout.factor_dim(f)).collect();
    let strides: Vec<usize> = keep.iter().map(|&f| layout.stride(f)).collect();
    let dk: usize = dims.iter().product();
    let total = layout.total_dim();
    let dr = total / dk;
    // rest index: enumerate the remaining digits in flat order
    let mut rest_of = vec![0usize; total];
    let mut kept_of = vec![0usize; total];
    {
        let mut rest_ids = std::collections::HashMap::new();
        for i in 0..total {
            let mut k_idx = 0;
            let mut rest = i;
            for j in 0..dims.len() {
                let d = (i / strides[j]) % dims[j];
                k_idx = k_idx * dims[j] + d;
                rest -= d * strides[j];
            }
            let next = rest_ids.len();
            rest_of[i] = *rest_ids.entry(rest).or_insert(next);
            kept_of[i] = k_idx;
        }
    }
    let mut rho = DMatrix::from_element(dk, dk, ZERO);
    for (w, amps) in members {
        let mut psi = DMatrix::from_element(dk, dr, ZERO);
        for i in 0..total {
            psi[(kept_of[i], rest_of[i])] = amps[i];
        }
        rho += (&psi * psi.adjoint()) * C::new(w, 0.0);
    }
    Ok(DensityMatrix {
        factors: keep.to_vec(),
        dims,
        matrix: rho,
    })
}

/// Density matrix over an ordered list of factors.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    factors: Vec<Factor>,
    dims: Vec<usize>,
    matrix: DMatrix<C>,
}

impl DensityMatrix {
    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &DMatrix<C> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Tr ρ²
    pub fn purity(&self) -> f64 {
        // Tr ρ² = Σ |ρ_ij|² for Hermitian ρ
        self.matrix.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.matrix + self.matrix.adjoint()) * C::new(0.5, 0.0);
        herm.symmetric_eigenvalues().iter().copied().collect()
    }

    /// Further reduction onto a subset of this matrix's factors.
    pub fn partial_trace(&self, keep: &[Factor]) -> Result<DensityMatrix> {
        if keep.is_empty() {
            return Err(Error::EmptyKeep);
        }
        let pos: Vec<usize> = keep
            .iter()
            .map(|f| {
                self.factors
                    .iter()
                    .position(|g| g == f)
                    .ok_or(Error::InvalidArgument(format!("factor {f:?} is not present")))
            })
            .collect::<Result<_>>()?;
        let n = self.dims.len();
        let mut strides = vec![1; n];
        for k in (0..n.saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.dims[k + 1];
        }
        let total = self.matrix.nrows();
        let kdims: Vec<usize> = pos.iter().map(|&p| self.dims[p]).collect();
        let dk: usize = kdims.iter().product();
        let split = |i: usize| {
            let mut k_idx = 0;
            let mut rest = i;
            for (j, &p) in pos.iter().enumerate() {
                let d = (i / strides[p]) % self.dims[p];
                k_idx = k_idx * kdims[j] + d;
                rest -= d * strides[p];
            }
            (k_idx, rest)
        };
        let parts: Vec<(usize, usize)> = (0..total).map(split).collect();
        let mut out = DMatrix::from_element(dk, dk, ZERO);
        for i in 0..total {
            for j in 0..total {
                if parts[i].1 == parts[j].1 {
                    out[(parts[i].0, parts[j].0)] += self.matrix[(i, j)];
                }
            }
        }
        Ok(DensityMatrix {
            factors: keep.to_vec(),
            dims: kdims,
            matrix: out,
        })
    }
}
