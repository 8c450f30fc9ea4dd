//! Interaction-picture Hamiltonian before the rotating-wave approximation.
//!
//! Each tone contributes ½Ω e^{−i(δt+φ)} σ₊ M(t) + h.c., where M(t) is the
//! Lamb-Dicke expansion to second order:
//!
//! M(t) = (1 − Σ η_s²) + Σ η_s x_s(t) − Σ η_s²(n_s + s² e^{−2iω_s t} + s†² e^{2iω_s t})
//!        − 2 Σ_{s<s'} η_s η_s' x_s(t) x_s'(t),   x_s(t) = s e^{−iω_s t} + s† e^{iω_s t}.
//!
//! Terms sharing an operator are grouped, so H(t)ψ costs one sparse product
//! per distinct monomial and its adjoint.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;

use crate::drive::DriveConfig;
use crate::error::Result;
use crate::layout::{Factor, HilbertLayout, Mode};
use crate::operator::{local, LinearOperator, PauliAxis};
use crate::sparse::CsrMatrix;
use crate::system::System;

type C = Complex64;

/// Motional monomial multiplying σ₊.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Monomial {
    One,
    Lower(Mode),
    Raise(Mode),
    Number(Mode),
    Lower2(Mode),
    Raise2(Mode),
    /// (raise first?, raise second?) for modes (s, s')
    Cross(Mode, bool, Mode, bool),
}

#[derive(Clone, Debug)]
struct Group {
    op: CsrMatrix,
    op_adj: CsrMatrix,
    /// (amplitude, angular frequency): coefficient Σ amp·e^{−i f t}
    parts: Vec<(C, f64)>,
}

/// H(t) = Σ_j c_j(t) A_j + c_j(t)* A_j†.
#[derive(Clone, Debug)]
pub struct TimeDependentHamiltonian {
    layout: Arc<HilbertLayout>,
    groups: Vec<Group>,
}

impl TimeDependentHamiltonian {
    pub fn from_config(config: &DriveConfig, sys: &System) -> Result<Self> {
        let trap = sys.trap();
        let eta = config.lamb_dicke(trap)?;
        let modes: Vec<Mode> = trap.modes().collect();
        let w = |m: Mode| trap.freq(m);
        let e = |m: Mode| eta[m.index()];
        let sum_eta2: f64 = eta.iter().map(|x| x * x).sum();

        let mut terms: BTreeMap<Monomial, Vec<(C, f64)>> = BTreeMap::new();
        for tone in &config.tones {
            let pre = C::from_polar(0.5 * tone.rabi, -tone.phase);
            let d = tone.detuning;
            let mut push = |mono: Monomial, amp: f64, freq: f64| {
                if amp != 0.0 {
                    terms.entry(mono).or_default().push((pre * amp, freq));
                }
            };
            push(Monomial::One, 1.0 - sum_eta2, d);
            for &s in &modes {
                push(Monomial::Lower(s), e(s), d + w(s));
                push(Monomial::Raise(s), e(s), d - w(s));
                push(Monomial::Number(s), -e(s) * e(s), d);
                push(Monomial::Lower2(s), -e(s) * e(s), d + 2.0 * w(s));
                push(Monomial::Raise2(s), -e(s) * e(s), d - 2.0 * w(s));
            }
            for (i, &s) in modes.iter().enumerate() {
                for &r in &modes[i + 1..] {
                    let c = -2.0 * e(s) * e(r);
                    for (rs, rr) in [(false, false), (false, true), (true, false), (true, true)] {
                        let fs = if rs { -w(s) } else { w(s) };
                        let fr = if rr { -w(r) } else { w(r) };
                        push(Monomial::Cross(s, rs, r, rr), c, d + fs + fr);
                    }
                }
            }
        }

        let layout = sys.layout().clone();
        let dim = layout.mode_dim();
        let sp = local::pauli(PauliAxis::Plus);
        let lower = local::annihilation(dim);
        let raise = local::creation(dim);
        let pick = |r: bool| if r { &raise } else { &lower };
        let mut groups = Vec::with_capacity(terms.len());
        for (mono, parts) in terms {
            let (factors, local_op): (Vec<Factor>, CsrMatrix) = match mono {
                Monomial::One => (vec![Factor::Qubit], sp.clone()),
                Monomial::Lower(s) => (vec![Factor::Qubit, Factor::Mode(s)], sp.kron(&lower)),
                Monomial::Raise(s) => (vec![Factor::Qubit, Factor::Mode(s)], sp.kron(&raise)),
                Monomial::Number(s) => (vec![Factor::Qubit, Factor::Mode(s)], sp.kron(&local::number(dim))),
                Monomial::Lower2(s) => (vec![Factor::Qubit, Factor::Mode(s)], sp.kron(&lower.matmul(&lower))),
                Monomial::Raise2(s) => (vec![Factor::Qubit, Factor::Mode(s)], sp.kron(&raise.matmul(&raise))),
                Monomial::Cross(s, rs, r, rr) => (
                    vec![Factor::Qubit, Factor::Mode(s), Factor::Mode(r)],
                    sp.kron(pick(rs)).kron(pick(rr)),
                ),
            };
            let op = LinearOperator::embed(&layout, &factors, &local_op)?.matrix().clone();
            let op_adj = op.adjoint();
            groups.push(Group { op, op_adj, parts });
        }
        Ok(TimeDependentHamiltonian { layout, groups })
    }

    /// Wraps a time-independent Hermitian operator.
    pub fn constant(h: &LinearOperator) -> Self {
        let half = h.matrix().scale(C::new(0.5, 0.0));
        TimeDependentHamiltonian {
            layout: h.layout().clone(),
            groups: vec![Group {
                op_adj: half.adjoint(),
                op: half,
                parts: vec![(C::new(1.0, 0.0), 0.0)],
            }],
        }
    }

    pub fn layout(&self) -> &Arc<HilbertLayout> {
        &self.layout
    }

    fn coefficients(&self, t: f64) -> Vec<C> {
        self.groups
            .iter()
            .map(|g| g.parts.iter().map(|(a, f)| a * C::from_polar(1.0, -f * t)).sum())
            .collect()
    }

    /// out ← H(t)ψ
    pub fn apply_into(&self, t: f64, psi: &[C], out: &mut [C]) {
        out.iter_mut().for_each(|x| *x = C::new(0.0, 0.0));
        for (g, c) in self.groups.iter().zip(self.coefficients(t)) {
            g.op.matvec_acc(c, psi, out);
            g.op_adj.matvec_acc(c.conj(), psi, out);
        }
    }

    /// H(t) as an explicit operator.
    pub fn at(&self, t: f64) -> LinearOperator {
        let d = self.layout.total_dim();
        let mut m = CsrMatrix::zeros(d, d);
        for (g, c) in self.groups.iter().zip(self.coefficients(t)) {
            m = m.add(&g.op.lincomb(c, &g.op_adj, c.conj()));
        }
        LinearOperator::new(self.layout.clone(), m).expect("dimensions match by construction")
    }

    /// Uniform bound on ‖H(t)‖₁.
    pub fn norm_bound(&self) -> f64 {
        self.groups
            .iter()
            .map(|g| {
                let amp: f64 = g.parts.iter().map(|(a, _)| a.norm()).sum();
                amp * (g.op.norm1() + g.op_adj.norm1())
            })
            .sum()
    }

    /// Average of H(t) over [0, period] by composite Simpson quadrature.
    pub fn time_average(&self, period: f64, samples: usize) -> LinearOperator {
        let n = (samples.max(2) + 1) & !1;
        let h = period / n as f64;
        let d = self.layout.total_dim();
        let mut acc: Vec<C> = vec![C::new(0.0, 0.0); self.groups.len()];
        for k in 0..=n {
            let w = if k == 0 || k == n {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            for (a, c) in acc.iter_mut().zip(self.coefficients(k as f64 * h)) {
                *a += c * (w * h / 3.0 / period);
            }
        }
        let mut m = CsrMatrix::zeros(d, d);
        for (g, c) in self.groups.iter().zip(acc) {
            m = m.add(&g.op.lincomb(c, &g.op_adj, c.conj()));
        }
        LinearOperator::new(self.layout.clone(), m).expect("dimensions match by construction")
    }
}
