//! Motional-state readout through the qubit.
//!
//! Two protocols: Fock populations from the beat notes of a carrier Rabi
//! flop (P_e(t) = Σ_n p_n sin²(Ω_n t/2)), and Wigner values from the parity of
//! the phonon distribution, either computed directly or mapped onto the
//! qubit by a timed carrier drive.

use std::f64::consts::{FRAC_2_PI, PI};
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::drive;
use crate::error::{Error, Result};
use crate::evolution::{evolve_static, replace_qubit};
use crate::expm::expm_sparse;
use crate::gates::{GateParams, IdealGate, DEFAULT_LEAK_TOL};
use crate::layout::{Mode, TrapSpec};
use crate::numfmt;
use crate::operator::{self, LinearOperator, PauliAxis};
use crate::sparse::CsrMatrix;
use crate::state::{Ensemble, QubitState, StateVector};
use crate::system::System;

type C = Complex64;

/// Frequencies closer than this (relative to Ω) count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-12;
/// Largest accepted condition number of the sinusoid dictionary.
pub const DEFAULT_COND_LIMIT: f64 = 1e8;

/// Laguerre polynomial L_n(x) by the three-term recurrence.
pub fn laguerre(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 1.0 - x);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// ⟨n|exp(iη(a + a†))|n⟩ = e^{−η²/2} L_n(η²).
pub fn carrier_matrix_element(eta: f64, n: usize) -> f64 {
    (-0.5 * eta * eta).exp() * laguerre(n, eta * eta)
}

/// Phonon tuples with every configured mode in 0..=cap.
pub fn phonon_tuples(n_modes: usize, cap: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    let count = (cap + 1).pow(n_modes as u32);
    for idx in 0..count {
        let mut n = [0usize; 3];
        let mut rest = idx;
        for k in (0..n_modes).rev() {
            n[k] = rest % (cap + 1);
            rest /= cap + 1;
        }
        out.push(n);
    }
    out
}

/// Ω_n = Ω′ − Ω Σ_s η_s² n_s.
pub fn rabi_frequency(trap: &TrapSpec, omega: f64, n: &[usize; 3]) -> f64 {
    let eta = trap.lamb_dicke();
    drive::reduced_rabi(omega, eta) - omega * eta.iter().zip(n).map(|(e, &k)| e * e * k as f64).sum::<f64>()
}

/// First-order carrier Rabi frequencies for every phonon tuple up to `cap`.
pub fn rabi_frequencies(trap: &TrapSpec, omega: f64, cap: usize) -> Vec<([usize; 3], f64)> {
    phonon_tuples(trap.n_modes(), cap)
        .into_iter()
        .map(|n| (n, rabi_frequency(trap, omega, &n)))
        .collect()
}

/// Smallest gap between distinct entries, or 0 when two coincide.
pub fn min_frequency_gap(freqs: &[f64]) -> f64 {
    let mut f = freqs.to_vec();
    f.sort_by(|a, b| a.partial_cmp(b).unwrap());
    f.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}

/// η_s = η_a + s·δη, the evenly split choice that keeps Σ η_s² n_s distinct.
pub fn split_lamb_dicke(eta_a: f64, delta: f64, n_modes: usize) -> Vec<f64> {
    (0..n_modes).map(|s| eta_a + s as f64 * delta).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct RabiTrace {
    pub times: Vec<f64>,
    pub p_excited: Vec<f64>,
    pub rabi: f64,
    pub eta: Vec<f64>,
    pub warnings: Vec<String>,
}

impl RabiTrace {
    /// CSV with columns t, p_excited.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,p_excited\n");
        for (t, p) in self.times.iter().zip(&self.p_excited) {
            let _ = writeln!(s, "{},{}", numfmt::float(*t), numfmt::float(*p));
        }
        s
    }

    /// Copy with additive Gaussian noise of width `sigma`, clipped to [0, 1].
    pub fn with_noise(&self, sigma: f64, seed: u64) -> Result<RabiTrace> {
        let normal = Normal::new(0.0, sigma).map_err(|e| Error::InvalidArgument(format!("noise width {sigma}: {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = self.clone();
        for p in &mut out.p_excited {
            *p = (*p + normal.sample(&mut rng)).clamp(0.0, 1.0);
        }
        Ok(out)
    }
}

fn reset_qubit(state: &StateVector) -> Result<StateVector> {
    replace_qubit(state, QubitState::ground())
}

fn excited_population(amps: &[C]) -> f64 {
    amps[amps.len() / 2..].iter().map(|c| c.norm_sqr()).sum()
}

/// Carrier plus number-dependent Hamiltonian ½σ_x ⊗ (Ω′ − Ω Σ η_s² n_s).
pub fn readout_hamiltonian(sys: &System, omega: f64) -> Result<LinearOperator> {
    let layout = sys.layout();
    let mut h = drive::carrier(omega, 0.0, sys).operator;
    let sx = operator::pauli(PauliAxis::X, layout);
    for m in sys.trap().modes() {
        let e = sys.trap().eta(m);
        let term = sx.mul(&operator::number(m, layout)?)?;
        h = h.add(&term.scale_re(-0.5 * omega * e * e))?;
    }
    Ok(h)
}

/// Records P_e(t) on the grid 0, dt, …, ≤ t_total while driving the carrier.
/// The qubit is reset to |g⟩ first; a non-separable input is an error.
pub fn simulate_rabi(state: &StateVector, sys: &System, omega: f64, t_total: f64, dt: f64) -> Result<RabiTrace> {
    if !(dt > 0.0 && t_total >= 0.0 && dt.is_finite() && t_total.is_finite()) {
        return Err(Error::InvalidArgument(format!("bad time grid T = {t_total}, dt = {dt}")));
    }
    state.same_layout(sys.layout())?;
    let h = readout_hamiltonian(sys, omega)?;
    let mut warnings = Vec::new();
    let omega_max = drive::reduced_rabi(omega, sys.trap().lamb_dicke()).abs();
    if dt > PI / omega_max {
        let w = format!("sample spacing {dt} exceeds the Nyquist limit {} for Ω′ = {omega_max}", PI / omega_max);
        log::warn!("{w}");
        warnings.push(w);
    }
    let step = expm_sparse(h.matrix(), C::new(0.0, -dt), 0.0);
    let mut amps = reset_qubit(state)?.into_amplitudes();
    let n = (t_total / dt + 1e-9).floor() as usize;
    let mut times = Vec::with_capacity(n + 1);
    let mut p = Vec::with_capacity(n + 1);
    let mut buf = vec![C::new(0.0, 0.0); amps.len()];
    for k in 0..=n {
        times.push(k as f64 * dt);
        p.push(excited_population(&amps).clamp(0.0, 1.0));
        step.matvec_into(&amps, &mut buf);
        std::mem::swap(&mut amps, &mut buf);
    }
    Ok(RabiTrace {
        times,
        p_excited: p,
        rabi: omega,
        eta: sys.trap().lamb_dicke().to_vec(),
        warnings,
    })
}

/// Weighted sum of member traces: P_e is linear in the density matrix.
pub fn simulate_rabi_ensemble(ens: &Ensemble, sys: &System, omega: f64, t_total: f64, dt: f64) -> Result<RabiTrace> {
    let mut acc: Option<RabiTrace> = None;
    for (w, member) in ens.members() {
        let tr = simulate_rabi(member, sys, omega, t_total, dt)?;
        match acc.as_mut() {
            None => {
                let mut first = tr;
                first.p_excited.iter_mut().for_each(|p| *p *= w);
                acc = Some(first);
            }
            Some(a) => {
                for (x, y) in a.p_excited.iter_mut().zip(&tr.p_excited) {
                    *x += w * y;
                }
            }
        }
    }
    let mut out = acc.ok_or_else(|| Error::InvalidArgument("empty ensemble".into()))?;
    out.p_excited.iter_mut().for_each(|p| *p = p.clamp(0.0, 1.0));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PopulationEstimate {
    pub populations: Vec<([usize; 3], f64)>,
    /// RMS misfit of the trace.
    pub residual: f64,
    /// Condition number of the sinusoid dictionary.
    pub condition: f64,
}

impl PopulationEstimate {
    pub fn get(&self, n: [usize; 3]) -> f64 {
        self.populations.iter().find(|(k, _)| *k == n).map_or(0.0, |(_, p)| *p)
    }

    pub fn total(&self) -> f64 {
        self.populations.iter().map(|(_, p)| p).sum()
    }
}

/// Least-squares fit of the trace onto sin²(Ω_n t/2) over n_s ≤ basis_cap.
pub fn infer_populations(trace: &RabiTrace, trap: &TrapSpec, basis_cap: usize) -> Result<PopulationEstimate> {
    infer_populations_with(trace, trap, basis_cap, DEFAULT_COND_LIMIT)
}

pub fn infer_populations_with(trace: &RabiTrace, trap: &TrapSpec, basis_cap: usize, cond_limit: f64) -> Result<PopulationEstimate> {
    let trap = trap.with_lamb_dicke(trace.eta.clone())?;
    let dict = rabi_frequencies(&trap, trace.rabi, basis_cap);
    let freqs: Vec<f64> = dict.iter().map(|(_, f)| *f).collect();
    if dict.len() > 1 && min_frequency_gap(&freqs) <= DEGENERACY_TOL * trace.rabi.abs() {
        return Err(Error::IllConditioned { cond: f64::INFINITY });
    }
    let k = dict.len();
    let m = trace.times.len();
    if m < k {
        return Err(Error::InvalidArgument(format!("{m} samples cannot resolve {k} populations")));
    }
    let a = DMatrix::from_fn(m, k, |i, j| {
        let s = (0.5 * freqs[j] * trace.times[i]).sin();
        s * s
    });
    let y = DVector::from_column_slice(&trace.p_excited);
    let gram = a.transpose() * &a;
    let rhs = a.transpose() * &y;
    let eig = gram.clone().symmetric_eigen();
    let (lo, hi) = eig
        .eigenvalues
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &l| (lo.min(l), hi.max(l)));
    let cond = if lo > 0.0 { (hi / lo).sqrt() } else { f64::INFINITY };
    // NaN counts as ill-conditioned
    if cond.is_nan() || cond > cond_limit {
        return Err(Error::IllConditioned { cond });
    }
    let p = gram
        .cholesky()
        .ok_or(Error::IllConditioned { cond })?
        .solve(&rhs);
    let resid = (&a * &p - &y).norm() / (m as f64).sqrt();
    Ok(PopulationEstimate {
        populations: dict.iter().zip(p.iter()).map(|((n, _), &v)| (*n, v)).collect(),
        residual: resid,
        condition: cond,
    })
}

/// Σ (−1)^{Σ n_s} |d_n|² over the chosen modes (the qubit is traced out).
pub fn parity_expectation(state: &StateVector, modes: &[Mode]) -> Result<f64> {
    let layout = state.layout();
    for &m in modes {
        layout.check_mode(m)?;
    }
    Ok(state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let (_, n) = layout.decompose(i);
            let odd = modes.iter().map(|m| n[m.index()]).sum::<usize>() % 2 == 1;
            if odd {
                -c.norm_sqr()
            } else {
                c.norm_sqr()
            }
        })
        .sum())
}

/// Prefactor multiplying the displaced parity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum WignerNorm {
    /// (2/π)^M for M modes; integrates to 1 over each mode's phase plane.
    #[default]
    PerMode,
    /// 2/π regardless of the number of modes.
    Literal,
}

impl WignerNorm {
    pub fn factor(self, n_modes: usize) -> f64 {
        match self {
            WignerNorm::PerMode => FRAC_2_PI.powi(n_modes as i32),
            WignerNorm::Literal => FRAC_2_PI,
        }
    }
}

/// W at phase-space point α_s = x_s + i p_s on each listed mode:
/// norm · ⟨ψ|D(α)P D(α)†|ψ⟩.
pub fn wigner_point(state: &StateVector, point: &[(f64, f64)], modes: &[Mode], norm: WignerNorm) -> Result<f64> {
    wigner_point_with(state, point, modes, norm, DEFAULT_LEAK_TOL)
}

pub fn wigner_point_with(state: &StateVector, point: &[(f64, f64)], modes: &[Mode], norm: WignerNorm, leak_tol: f64) -> Result<f64> {
    if point.len() != modes.len() {
        return Err(Error::InvalidArgument(format!(
            "{} phase-space coordinates for {} modes",
            point.len(),
            modes.len()
        )));
    }
    let mut psi = state.clone();
    for (&(x, p), &m) in point.iter().zip(modes) {
        if x == 0.0 && p == 0.0 {
            continue;
        }
        let g = IdealGate::with_leak_tol(
            GateParams::Displacement {
                mode: m,
                alpha: -C::new(x, p),
            },
            state.layout(),
            f64::INFINITY,
        )?;
        psi = g.apply(&psi)?;
    }
    let leak = psi.guard_population();
    if leak > leak_tol {
        return Err(Error::Leak { leak, tol: leak_tol });
    }
    Ok(norm.factor(modes.len()) * parity_expectation(&psi, modes)?)
}

/// Row-major grid over (x, p) with x fastest; returns (x, p, w) rows.
pub fn wigner_grid(state: &StateVector, mode: Mode, xs: &[f64], ps: &[f64], norm: WignerNorm) -> Result<Vec<(f64, f64, f64)>> {
    wigner_grid_with(state, mode, xs, ps, norm, DEFAULT_LEAK_TOL)
}

pub fn wigner_grid_with(
    state: &StateVector,
    mode: Mode,
    xs: &[f64],
    ps: &[f64],
    norm: WignerNorm,
    leak_tol: f64,
) -> Result<Vec<(f64, f64, f64)>> {
    let mut out = Vec::with_capacity(xs.len() * ps.len());
    for &p in ps {
        for &x in xs {
            out.push((x, p, wigner_point_with(state, &[(x, p)], &[mode], norm, leak_tol)?));
        }
    }
    Ok(out)
}

/// CSV with columns x, p, w.
pub fn wigner_csv(rows: &[(f64, f64, f64)]) -> String {
    let mut s = String::from("x,p,w\n");
    for (x, p, w) in rows {
        let _ = writeln!(s, "{},{},{}", numfmt::float(*x), numfmt::float(*p), numfmt::float(*w));
    }
    s
}

/// n evenly spaced points from lo to hi inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

/// Number-dependent carrier rates used by the parity protocol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ParityModel {
    /// Ω_n = Ω₀ − (1 + n)ΔΩ, exactly linear in n.
    Linear,
    /// Ω_n = (Ω₀ − ΔΩ) Π_s L_{n_s}(η²): the full carrier matrix element with
    /// the vacuum rate calibrated to Ω₀ − ΔΩ. Agrees with `Linear` to first
    /// order in η².
    #[default]
    Laguerre,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParityReadout {
    pub p_excited: f64,
    pub p_ground: f64,
    /// (2/π)(P_e − P_g)
    pub w: f64,
    /// Directly computed parity for comparison.
    pub parity: f64,
    pub t0: f64,
    pub delta_omega: f64,
}

/// Maps the phonon parity onto the qubit with a carrier drive of duration
/// t₀ = π/ΔΩ, ΔΩ = η²Ω₀, and reads W(0) = (2/π)(P_e − P_g). Requires equal
/// Lamb-Dicke parameters and Ω₀/ΔΩ = 1/η² = 4m.
pub fn parity_protocol(state: &StateVector, sys: &System, omega0: f64, m: u32, model: ParityModel) -> Result<ParityReadout> {
    state.same_layout(sys.layout())?;
    let eta = sys.trap().lamb_dicke();
    let e = eta[0];
    if eta.iter().any(|x| (x - e).abs() > 1e-12 * e) {
        return Err(Error::InvalidArgument(format!(
            "parity readout needs equal Lamb-Dicke parameters, got {eta:?}"
        )));
    }
    if m == 0 {
        return Err(Error::Commensurability("m must be a positive integer".into()));
    }
    let ratio = 1.0 / (e * e);
    let target = 4.0 * m as f64;
    if (ratio - target).abs() > 1e-9 * target {
        return Err(Error::Commensurability(format!(
            "Ω₀/ΔΩ = 1/η² = {ratio} but 4m = {target}; use η = {}",
            1.0 / target.sqrt()
        )));
    }
    if !(omega0 > 0.0 && omega0.is_finite()) {
        return Err(Error::InvalidArgument(format!("carrier rate {omega0} must be positive")));
    }
    let delta = e * e * omega0;
    // smallest odd multiple: P_e = sin²(Ω_n t₀/2) = 1 for even n, 0 for odd n
    let t0 = PI / delta;
    let layout = sys.layout();
    let modes: Vec<Mode> = sys.trap().modes().collect();
    let rates: Vec<C> = (0..layout.total_dim())
        .map(|i| {
            let (_, n) = layout.decompose(i);
            let total: usize = modes.iter().map(|m| n[m.index()]).sum();
            let w = match model {
                ParityModel::Linear => omega0 - (1.0 + total as f64) * delta,
                ParityModel::Laguerre => {
                    (omega0 - delta) * modes.iter().map(|m| laguerre(n[m.index()], e * e)).product::<f64>()
                }
            };
            C::new(0.5 * w, 0.0)
        })
        .collect();
    let sx = operator::pauli(PauliAxis::X, layout);
    let h = LinearOperator::new(layout.clone(), CsrMatrix::diagonal(&rates))?.mul(&sx)?;
    let start = reset_qubit(state)?;
    let out = evolve_static(&h, 1.0, t0, &start)?.final_state;
    let pe = excited_population(out.amplitudes());
    let pg = 1.0 - pe;
    Ok(ParityReadout {
        p_excited: pe,
        p_ground: pg,
        w: FRAC_2_PI * (pe - pg),
        parity: parity_expectation(&start, &modes)?,
        t0,
        delta_omega: delta,
    })
}

/// Parity protocol on a mixed state: populations add with the weights.
pub fn parity_protocol_ensemble(ens: &Ensemble, sys: &System, omega0: f64, m: u32, model: ParityModel) -> Result<ParityReadout> {
    let mut out: Option<ParityReadout> = None;
    for (w, member) in ens.members() {
        let r = parity_protocol(member, sys, omega0, m, model)?;
        match out.as_mut() {
            None => {
                out = Some(ParityReadout {
                    p_excited: w * r.p_excited,
                    p_ground: w * r.p_ground,
                    w: w * r.w,
                    parity: w * r.parity,
                    ..r
                })
            }
            Some(o) => {
                o.p_excited += w * r.p_excited;
                o.p_ground += w * r.p_ground;
                o.w += w * r.w;
                o.parity += w * r.parity;
            }
        }
    }
    out.ok_or_else(|| Error::InvalidArgument("empty ensemble".into()))
}
