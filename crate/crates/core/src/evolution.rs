//! Time evolution under static and time-dependent Hamiltonians.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::drive::{self, DriveConfig, QubitPrep};
use crate::error::{Error, Result};
use crate::expm::expm_multiply;
use crate::gates::{laser_to_gate, IdealGate, DEFAULT_LEAK_TOL};
use crate::layout::HilbertLayout;
use crate::operator::LinearOperator;
use crate::state::{QubitState, Sign, StateVector};
use crate::system::System;
use crate::timedep::TimeDependentHamiltonian;

type C = Complex64;

pub const DEFAULT_TIMEDEP_TOL: f64 = 1e-9;
pub const MIN_TOL: f64 = 1e-12;
pub const MAX_TOL: f64 = 1e-4;
/// Purity below which a state is not treated as qubit ⊗ motion.
pub const SEPARABILITY_TOL: f64 = 1e-9;
/// Purity loss that flags a Gaussian gate as entangling.
pub const GAUSSIAN_PURITY_FLAG: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct EvolutionReport {
    /// Normalized final state.
    pub final_state: StateVector,
    /// Population above the nominal cutoff.
    pub leak: f64,
    /// Integrator steps (zero for the static path).
    pub steps: usize,
    /// Accumulated local error estimate.
    pub est_error: f64,
    /// |‖ψ‖ − 1| before renormalization.
    pub norm_drift: f64,
}

fn finish(layout: &std::sync::Arc<HilbertLayout>, amps: Vec<C>, steps: usize, est_error: f64) -> Result<EvolutionReport> {
    let mut s = StateVector::from_amplitudes(layout.clone(), amps)?;
    let norm = s.normalize();
    Ok(EvolutionReport {
        leak: s.guard_population(),
        final_state: s,
        steps,
        est_error,
        norm_drift: (norm - 1.0).abs(),
    })
}

/// Applies exp(−i·coupling·H·t).
pub fn evolve_static(h: &LinearOperator, coupling: f64, t: f64, state: &StateVector) -> Result<EvolutionReport> {
    state.same_layout(h.layout())?;
    let amps = if t == 0.0 || coupling == 0.0 {
        state.amplitudes().to_vec()
    } else {
        expm_multiply(h.matrix(), C::new(0.0, -coupling * t), state.amplitudes())
    };
    finish(state.layout(), amps, 0, 0.0)
}

/// Step-control settings for the adaptive integrator.
#[derive(Clone, Copy, Debug)]
pub struct IntegratorOptions {
    pub max_steps: usize,
    /// Smallest step relative to t_final before giving up.
    pub min_step_fraction: f64,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            max_steps: 5_000_000,
            min_step_fraction: 1e-14,
        }
    }
}

// Dormand–Prince 5(4) tableau
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

/// Solves i dψ/dt = H(t)ψ on [0, t_final].
///
/// Steps are accepted when the embedded error estimate is below
/// tol·h/t_final, so the accumulated error stays of order tol.
pub fn evolve_timedep(h: &TimeDependentHamiltonian, t_final: f64, tol: f64, state: &StateVector) -> Result<EvolutionReport> {
    evolve_timedep_with(h, t_final, tol, state, IntegratorOptions::default())
}

pub fn evolve_timedep_with(
    h: &TimeDependentHamiltonian,
    t_final: f64,
    tol: f64,
    state: &StateVector,
    opts: IntegratorOptions,
) -> Result<EvolutionReport> {
    if !(MIN_TOL..=MAX_TOL).contains(&tol) {
        return Err(Error::InvalidTolerance(tol));
    }
    state.same_layout(h.layout())?;
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidArgument(format!("final time {t_final} must be non-negative")));
    }
    let n = state.amplitudes().len();
    let mut y = state.amplitudes().to_vec();
    if t_final == 0.0 {
        return finish(state.layout(), y, 0, 0.0);
    }
    // f(t, y) = −i H(t) y
    let rhs = |t: f64, y: &[C], out: &mut [C]| {
        h.apply_into(t, y, out);
        for v in out.iter_mut() {
            *v = C::new(v.im, -v.re);
        }
    };
    let zero = C::new(0.0, 0.0);
    let mut k: Vec<Vec<C>> = (0..7).map(|_| vec![zero; n]).collect();
    let mut tmp = vec![zero; n];
    let mut y_new = vec![zero; n];

    let norm_bound = h.norm_bound().max(1e-12);
    let mut step = (0.5 / norm_bound).min(t_final);
    let h_min = opts.min_step_fraction * t_final;
    let mut t = 0.0;
    let mut steps = 0usize;
    let mut est_error = 0.0;
    rhs(t, &y, &mut k[0]);
    while t < t_final {
        if steps >= opts.max_steps {
            return Err(Error::TooManySteps {
                steps: opts.max_steps,
                t_final,
            });
        }
        let last = t + step >= t_final;
        let hs = if last { t_final - t } else { step };
        let stage = |coeffs: &[(usize, f64)], k: &[Vec<C>], y: &[C], out: &mut [C]| {
            for i in 0..y.len() {
                let mut acc = y[i];
                for &(j, a) in coeffs {
                    acc += k[j][i] * (a * hs);
                }
                out[i] = acc;
            }
        };
        stage(&[(0, A21)], &k, &y, &mut tmp);
        rhs(t + C2 * hs, &tmp, &mut k[1]);
        stage(&[(0, A31), (1, A32)], &k, &y, &mut tmp);
        rhs(t + C3 * hs, &tmp, &mut k[2]);
        stage(&[(0, A41), (1, A42), (2, A43)], &k, &y, &mut tmp);
        rhs(t + C4 * hs, &tmp, &mut k[3]);
        stage(&[(0, A51), (1, A52), (2, A53), (3, A54)], &k, &y, &mut tmp);
        rhs(t + C5 * hs, &tmp, &mut k[4]);
        stage(&[(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)], &k, &y, &mut tmp);
        rhs(t + hs, &tmp, &mut k[5]);
        stage(&[(0, B1), (2, B3), (3, B4), (4, B5), (5, B6)], &k, &y, &mut y_new);
        rhs(t + hs, &y_new, &mut k[6]);
        let err = (0..n)
            .map(|i| ((k[0][i] * E1 + k[2][i] * E3 + k[3][i] * E4 + k[4][i] * E5 + k[5][i] * E6 + k[6][i] * E7) * hs).norm())
            .fold(0.0f64, f64::max);
        let allowed = tol * hs / t_final;
        if err <= allowed {
            t = if last { t_final } else { t + hs };
            std::mem::swap(&mut y, &mut y_new);
            k.swap(0, 6);
            steps += 1;
            est_error += err;
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * (allowed / err).powf(0.2)).clamp(0.2, 5.0)
        };
        step = hs * factor;
        if t < t_final && step < h_min {
            return Err(Error::StepUnderflow { t, h: step });
        }
    }
    finish(state.layout(), y, steps, est_error)
}

/// |⟨a|b⟩|²
pub fn state_fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().clamp(0.0, 1.0))
}

/// Which Hamiltonian a gate run integrates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunMode {
    Rwa,
    Full,
}

/// How the qubit is brought into the eigenstate a drive requires.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PrepModel {
    /// Replace the (separable) qubit state directly.
    Instant,
    /// Reset to |g⟩, then apply a resonant π/2 carrier pulse.
    CarrierPulse { rabi: f64 },
}

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    pub leak_tol: f64,
    pub timedep_tol: f64,
    pub prep: PrepModel,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            leak_tol: DEFAULT_LEAK_TOL,
            timedep_tol: DEFAULT_TIMEDEP_TOL,
            prep: PrepModel::Instant,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GateRun {
    pub report: EvolutionReport,
    /// State right after qubit preparation.
    pub prepared: StateVector,
    /// Reduced qubit purity after the gate.
    pub purity: f64,
    /// Set when a Gaussian gate left the qubit entangled (full mode only;
    /// in RWA mode this is an error).
    pub separability_flag: bool,
}

/// Motional part χ of a separable state |q⟩⊗|χ⟩.
fn motional_part(state: &StateVector) -> Result<(QubitState, Vec<C>)> {
    let purity = state.qubit_purity();
    if purity < 1.0 - SEPARABILITY_TOL {
        return Err(Error::Separability { purity });
    }
    let half = state.amplitudes().len() / 2;
    let amps = state.amplitudes();
    let (g, e) = amps.split_at(half);
    let ng: f64 = g.iter().map(|c| c.norm_sqr()).sum();
    let ne: f64 = e.iter().map(|c| c.norm_sqr()).sum();
    let (chi, big) = if ng >= ne { (g, ng) } else { (e, ne) };
    let scale = 1.0 / big.sqrt();
    let chi: Vec<C> = chi.iter().map(|c| c * scale).collect();
    // qubit amplitudes ⟨q|⊗⟨χ|ψ⟩
    let qg: C = chi.iter().zip(g).map(|(x, y)| x.conj() * y).sum();
    let qe: C = chi.iter().zip(e).map(|(x, y)| x.conj() * y).sum();
    Ok((QubitState([qg, qe]), chi))
}

/// |q⟩ ⊗ motional part of a separable state.
pub fn replace_qubit(state: &StateVector, qubit: QubitState) -> Result<StateVector> {
    let (_, chi) = motional_part(state)?;
    let half = chi.len();
    let mut amps = vec![C::new(0.0, 0.0); 2 * half];
    for (i, c) in chi.iter().enumerate() {
        amps[i] = qubit.g() * c;
        amps[i + half] = qubit.e() * c;
    }
    let mut s = StateVector::from_amplitudes(state.layout().clone(), amps)?;
    s.normalize();
    Ok(s)
}

/// Brings the qubit into the σ_axis eigenstate named by `prep`.
pub fn prepare_qubit(state: &StateVector, prep: QubitPrep, model: PrepModel, sys: &System) -> Result<StateVector> {
    match model {
        PrepModel::Instant => replace_qubit(state, QubitState::eigenstate(prep.axis, prep.sign)),
        PrepModel::CarrierPulse { rabi } => {
            let reset = replace_qubit(state, QubitState::ground())?;
            // exp(−iπ/4 σ_ψ)|g⟩ = |+⟩_{ψ+π/2} up to phase
            let psi = match prep.sign {
                Sign::Plus => prep.axis - FRAC_PI_2,
                Sign::Minus => prep.axis + FRAC_PI_2,
            };
            let c = drive::carrier(rabi, psi, sys);
            let omega_p = drive::reduced_rabi(rabi, sys.trap().lamb_dicke());
            Ok(evolve_static(&c.operator, 1.0, prep_pulse_duration(omega_p), &reset)?.final_state)
        }
    }
}

/// Duration π/(2Ω′) of a carrier π/2 pulse.
pub fn prep_pulse_duration(omega_prime: f64) -> f64 {
    PI / (2.0 * omega_prime)
}

/// Runs one drive: qubit preparation, evolution, leak and separability checks.
pub fn run_gate(config: &DriveConfig, sys: &System, state: &StateVector, mode: RunMode, opts: RunOptions) -> Result<GateRun> {
    state.same_layout(sys.layout())?;
    let prepared = match config.qubit_prep {
        Some(p) => prepare_qubit(state, p, opts.prep, sys)?,
        None => state.clone(),
    };
    let report = if config.duration == 0.0 {
        evolve_static(&LinearOperator::zero(sys.layout()), 0.0, 0.0, &prepared)?
    } else {
        match mode {
            RunMode::Rwa => {
                let h = drive::rwa_from_config(config, sys)?;
                evolve_static(&h.operator, h.effective_coupling, config.duration, &prepared)?
            }
            RunMode::Full => {
                let h = TimeDependentHamiltonian::from_config(config, sys)?;
                evolve_timedep(&h, config.duration, opts.timedep_tol, &prepared)?
            }
        }
    };
    if report.leak > opts.leak_tol {
        return Err(Error::Leak {
            leak: report.leak,
            tol: opts.leak_tol,
        });
    }
    let purity = report.final_state.qubit_purity();
    let entangled = config.kind.is_gaussian() && purity < 1.0 - GAUSSIAN_PURITY_FLAG;
    if entangled && mode == RunMode::Rwa {
        return Err(Error::Separability { purity });
    }
    Ok(GateRun {
        report,
        prepared,
        purity,
        separability_flag: entangled,
    })
}

/// Ideal gate the drive should realize, applied to `prepared`.
pub fn ideal_output(config: &DriveConfig, sys: &System, prepared: &StateVector) -> Result<StateVector> {
    let params = laser_to_gate(config, sys)?;
    IdealGate::with_leak_tol(params, sys.layout(), f64::INFINITY)?.apply(prepared)
}

/// Reduced qubit state of a separable state, if it is one.
pub fn qubit_state(state: &StateVector) -> Result<QubitState> {
    motional_part(state).map(|(q, _)| q)
}
