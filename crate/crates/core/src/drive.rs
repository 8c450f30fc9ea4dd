//! Laser drives and their resonant (rotating-wave) Hamiltonians.
//!
//! A bichromatic pair with phases φ₁ (at +δ) and φ₂ (at −δ) produces, after
//! time averaging, σ_μ ⊗ G_ν with qubit axis μ = (φ₁+φ₂)/2 and motional
//! phase ν = (φ₂−φ₁)/2. Each tone of the pair carries Rabi frequency 2Ω
//! when the gate rate is Ω; monochromatic drives use the tone rate directly.
//!
//! Builder outputs exclude the Lamb-Dicke prefactor, which is carried in
//! `effective_coupling`: the evolution over time t is exp(−i·coupling·H·t).

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::layout::{Factor, HilbertLayout, Mode, TrapSpec};
use crate::operator::{self, local, LinearOperator, PauliAxis};
use crate::sparse::CsrMatrix;
use crate::state::Sign;
use crate::system::System;

type C = Complex64;

/// Relative tolerance on "same intensity" and on detuning matching.
pub const TONE_REL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LaserTone {
    /// δ = ω_L − ω₀ (rad/µs)
    pub detuning: f64,
    /// Optical phase (rad)
    pub phase: f64,
    /// Rabi frequency (rad/µs)
    pub rabi: f64,
}

impl LaserTone {
    pub fn new(detuning: f64, phase: f64, rabi: f64) -> Result<Self> {
        if !(rabi > 0.0 && rabi.is_finite()) {
            return Err(Error::InvalidArgument(format!("tone Rabi frequency must be positive, got {rabi}")));
        }
        if !detuning.is_finite() || !phase.is_finite() {
            return Err(Error::InvalidArgument("tone detuning and phase must be finite".into()));
        }
        Ok(LaserTone { detuning, phase, rabi })
    }
}

/// Required qubit preparation: the σ_axis eigenstate with the given sign.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitPrep {
    pub axis: f64,
    pub sign: Sign,
}

impl QubitPrep {
    pub fn new(axis: f64, sign: Sign) -> Self {
        QubitPrep { axis, sign }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GateKind {
    Carrier,
    Displacement(Mode),
    Squeezer(Mode),
    Fourier(Vec<Mode>),
    BeamSplitter(Mode, Mode),
    Tms(Mode, Mode),
    Conditional(Mode, Mode),
    Blue(Mode),
    Red(Mode),
}

impl GateKind {
    /// Gaussian toolbox gates, for which the qubit must factor out.
    pub fn is_gaussian(&self) -> bool {
        matches!(
            self,
            GateKind::Displacement(_)
                | GateKind::Squeezer(_)
                | GateKind::Fourier(_)
                | GateKind::BeamSplitter(..)
                | GateKind::Tms(..)
                | GateKind::Conditional(..)
        )
    }

    pub fn modes(&self) -> Vec<Mode> {
        match self {
            GateKind::Carrier => vec![],
            GateKind::Displacement(m) | GateKind::Squeezer(m) | GateKind::Blue(m) | GateKind::Red(m) => vec![*m],
            GateKind::Fourier(ms) => ms.clone(),
            GateKind::BeamSplitter(a, b) | GateKind::Tms(a, b) | GateKind::Conditional(a, b) => vec![*a, *b],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateKind::Carrier => "carrier",
            GateKind::Displacement(_) => "displacement",
            GateKind::Squeezer(_) => "squeezer",
            GateKind::Fourier(_) => "fourier",
            GateKind::BeamSplitter(..) => "beamsplitter",
            GateKind::Tms(..) => "tms",
            GateKind::Conditional(..) => "conditional",
            GateKind::Blue(_) => "blue",
            GateKind::Red(_) => "red",
        }
    }

    fn check(&self, trap: &TrapSpec) -> Result<()> {
        let modes = self.modes();
        for (k, &m) in modes.iter().enumerate() {
            trap.check_mode(m)?;
            if modes[..k].contains(&m) {
                return Err(Error::IdenticalModes);
            }
        }
        if matches!(self, GateKind::Fourier(ms) if ms.is_empty()) {
            return Err(Error::InvalidArgument("Fourier drive needs at least one mode".into()));
        }
        Ok(())
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())?;
        let modes = self.modes();
        if !modes.is_empty() {
            let labels: Vec<String> = modes.iter().map(|m| m.to_string()).collect();
            write!(f, "({})", labels.join(","))?;
        }
        Ok(())
    }
}

/// A laser drive applied for a fixed duration.
#[derive(Clone, Debug, PartialEq)]
pub struct DriveConfig {
    pub tones: Vec<LaserTone>,
    /// Per-mode Lamb-Dicke parameters replacing the trap's (beam direction).
    pub lamb_dicke_override: Option<Vec<f64>>,
    /// µs
    pub duration: f64,
    pub qubit_prep: Option<QubitPrep>,
    pub kind: GateKind,
}

impl DriveConfig {
    pub fn new(kind: GateKind, tones: Vec<LaserTone>, duration: f64) -> Self {
        DriveConfig {
            tones,
            lamb_dicke_override: None,
            duration,
            qubit_prep: None,
            kind,
        }
    }

    pub fn with_prep(mut self, prep: QubitPrep) -> Self {
        self.qubit_prep = Some(prep);
        self
    }

    pub fn with_lamb_dicke(mut self, eta: Vec<f64>) -> Self {
        self.lamb_dicke_override = Some(eta);
        self
    }

    /// Lamb-Dicke parameters in force for this drive.
    pub fn lamb_dicke(&self, trap: &TrapSpec) -> Result<Vec<f64>> {
        match &self.lamb_dicke_override {
            None => Ok(trap.lamb_dicke().to_vec()),
            Some(v) => {
                if v.len() != trap.n_modes() {
                    return Err(Error::InvalidArgument(format!(
                        "{} Lamb-Dicke overrides for {} modes",
                        v.len(),
                        trap.n_modes()
                    )));
                }
                if let Some(e) = v.iter().find(|e| !(**e >= 0.0 && **e < 1.0)) {
                    return Err(Error::InvalidArgument(format!("Lamb-Dicke override {e} outside [0, 1)")));
                }
                Ok(v.clone())
            }
        }
    }
}

/// Power of the Lamb-Dicke parameters multiplying a drive Hamiltonian.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CouplingOrder {
    /// η⁰
    Zero,
    /// η_s
    Linear(Mode),
    /// η_s²
    Quadratic(Mode),
    /// η_a η_b (times a numeric factor)
    Cross(Mode, Mode),
}

impl CouplingOrder {
    /// Total exponent of the Lamb-Dicke parameters.
    pub fn exponent(&self) -> u32 {
        match self {
            CouplingOrder::Zero => 0,
            CouplingOrder::Linear(_) => 1,
            CouplingOrder::Quadratic(_) | CouplingOrder::Cross(..) => 2,
        }
    }
}

/// Time-independent resonant Hamiltonian with its coupling metadata.
#[derive(Clone, Debug)]
pub struct RwaHamiltonian {
    pub operator: LinearOperator,
    pub gate_kind: GateKind,
    /// Scalar prefactor including Lamb-Dicke powers.
    pub effective_coupling: f64,
    pub coupling_order: CouplingOrder,
    /// Axis φ with [H, σ_φ] = 0, for drives that leave a σ_φ eigenstate intact.
    pub qubit_axis: Option<f64>,
}

impl RwaHamiltonian {
    /// coupling·H, the generator of the evolution.
    pub fn scaled(&self) -> LinearOperator {
        self.operator.scale_re(self.effective_coupling)
    }
}

/// Colour of a first sideband.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sideband {
    Blue,
    Red,
}

fn layout_of(sys: &System) -> &Arc<HilbertLayout> {
    sys.layout()
}

fn sigma_times(layout: &Arc<HilbertLayout>, axis: f64, motional: &LinearOperator) -> LinearOperator {
    operator::pauli(PauliAxis::Phi(axis), layout)
        .mul(motional)
        .expect("same layout")
}

fn mode_op(layout: &Arc<HilbertLayout>, modes: &[Mode], local_op: &CsrMatrix) -> Result<LinearOperator> {
    let factors: Vec<Factor> = modes.iter().map(|&m| Factor::Mode(m)).collect();
    LinearOperator::embed(layout, &factors, local_op)
}

/// e^{iν}A + e^{−iν}A†
fn phased_hermitian(a: &LinearOperator, nu: f64) -> LinearOperator {
    a.scale(C::from_polar(1.0, nu)).plus_adjoint()
}

fn distinct(a: Mode, b: Mode) -> Result<()> {
    if a == b {
        Err(Error::IdenticalModes)
    } else {
        Ok(())
    }
}

/// ½Ω′σ_φ with Ω′ = (1 − Σ_s η_s²)Ω over all configured modes.
pub fn carrier(omega: f64, phi: f64, sys: &System) -> RwaHamiltonian {
    carrier_with_eta(omega, phi, sys.trap().lamb_dicke(), sys)
}

fn carrier_with_eta(omega: f64, phi: f64, eta: &[f64], sys: &System) -> RwaHamiltonian {
    let omega_p = reduced_rabi(omega, eta);
    RwaHamiltonian {
        operator: operator::pauli(PauliAxis::Phi(phi), layout_of(sys)).scale_re(0.5 * omega_p),
        gate_kind: GateKind::Carrier,
        effective_coupling: 1.0,
        coupling_order: CouplingOrder::Zero,
        qubit_axis: Some(phi),
    }
}

/// Ω′ = (1 − Σ η²)Ω
pub fn reduced_rabi(omega: f64, eta: &[f64]) -> f64 {
    (1.0 - eta.iter().map(|e| e * e).sum::<f64>()) * omega
}

/// Blue: ½Ω(e^{−iφ}σ₊s† + h.c.); red: ½Ω(e^{−iφ}σ₊s + h.c.); coupling η_s.
pub fn sideband(mode: Mode, color: Sideband, omega: f64, phi: f64, sys: &System) -> Result<RwaHamiltonian> {
    sideband_with_eta(mode, color, omega, phi, sys.trap().eta(mode), sys)
}

fn sideband_with_eta(mode: Mode, color: Sideband, omega: f64, phi: f64, eta: f64, sys: &System) -> Result<RwaHamiltonian> {
    let layout = layout_of(sys);
    sys.trap().check_mode(mode)?;
    let a = operator::annihilation(mode, layout)?;
    let s = match color {
        Sideband::Blue => a.adjoint(),
        Sideband::Red => a,
    };
    let sp = operator::pauli(PauliAxis::Plus, layout);
    let term = sp.mul(&s)?.scale(C::from_polar(0.5 * omega, -phi));
    Ok(RwaHamiltonian {
        operator: term.plus_adjoint(),
        gate_kind: match color {
            Sideband::Blue => GateKind::Blue(mode),
            Sideband::Red => GateKind::Red(mode),
        },
        effective_coupling: eta,
        coupling_order: CouplingOrder::Linear(mode),
        qubit_axis: None,
    })
}

/// iσ_{φ−π/2}(α̃s† − α̃*s), α̃ = Ωe^{i(φ−π/2)}. Coupling η_s, or η_s² under
/// the compatibility convention.
pub fn displacement_drive(mode: Mode, omega: f64, phi: f64, sys: &System) -> Result<RwaHamiltonian> {
    displacement_general(mode, omega, phi - FRAC_PI_2, phi, sys.trap().eta(mode), sys)
}

/// Ωσ_μ(e^{iν}s† + e^{−iν}s).
fn displacement_general(mode: Mode, omega: f64, mu: f64, nu: f64, eta: f64, sys: &System) -> Result<RwaHamiltonian> {
    let layout = layout_of(sys);
    sys.trap().check_mode(mode)?;
    let sdag = operator::creation(mode, layout)?;
    let g = phased_hermitian(&sdag, nu).scale_re(omega);
    let coupling = if sys.conventions().displacement_eta_squared {
        eta * eta
    } else {
        eta
    };
    Ok(RwaHamiltonian {
        operator: sigma_times(layout, mu, &g),
        gate_kind: GateKind::Displacement(mode),
        effective_coupling: coupling,
        coupling_order: if sys.conventions().displacement_eta_squared {
            CouplingOrder::Quadratic(mode)
        } else {
            CouplingOrder::Linear(mode)
        },
        qubit_axis: Some(mu),
    })
}

/// iσ_φ(ξ̃*s² − ξ̃s†²), ξ̃ = Ωe^{i(φ−π/2)}; coupling η_s².
pub fn squeezer_drive(mode: Mode, omega: f64, phi: f64, sys: &System) -> Result<RwaHamiltonian> {
    squeezer_general(mode, omega, phi, phi, sys.trap().eta(mode), sys)
}

/// −Ωσ_μ(e^{iν}s†² + e^{−iν}s²).
fn squeezer_general(mode: Mode, omega: f64, mu: f64, nu: f64, eta: f64, sys: &System) -> Result<RwaHamiltonian> {
    let layout = layout_of(sys);
    sys.trap().check_mode(mode)?;
    let d = layout.mode_dim();
    let sdag2 = mode_op(layout, &[mode], &local::creation(d).matmul(&local::creation(d)))?;
    let g = phased_hermitian(&sdag2, nu).scale_re(-omega);
    Ok(RwaHamiltonian {
        operator: sigma_times(layout, mu, &g),
        gate_kind: GateKind::Squeezer(mode),
        effective_coupling: eta * eta,
        coupling_order: CouplingOrder::Quadratic(mode),
        qubit_axis: Some(mu),
    })
}

/// Number-dependent part of the δ = 0 drive, −½Ωσ_φ Σ_s (η_s/η_1)² n_s,
/// with coupling η_1² for the first listed mode. The second-order sign is
/// part of the operator; the carrier term ½Ω′σ_φ is left out because it
/// only contributes a global phase on a σ_φ eigenstate.
pub fn fourier_drive(modes: &[Mode], omega: f64, phi: f64, sys: &System) -> Result<RwaHamiltonian> {
    fourier_with_eta(modes, omega, phi, sys.trap().lamb_dicke(), sys)
}

fn fourier_with_eta(modes: &[Mode], omega: f64, phi: f64, eta: &[f64], sys: &System) -> Result<RwaHamiltonian> {
    let kind = GateKind::Fourier(modes.to_vec());
    kind.check(sys.trap())?;
    let layout = layout_of(sys);
    let reference = eta[modes[0].index()];
    if reference <= 0.0 {
        return Err(Error::InvalidArgument("Fourier drive on a mode with η = 0".into()));
    }
    let mut g = LinearOperator::zero(layout);
    for &m in modes {
        let ratio = (eta[m.index()] / reference).powi(2);
        g = g.add(&operator::number(m, layout)?.scale_re(ratio))?;
    }
    Ok(RwaHamiltonian {
        operator: sigma_times(layout, phi, &g.scale_re(-0.5 * omega)),
        gate_kind: kind,
        effective_coupling: reference * reference,
        coupling_order: CouplingOrder::Quadratic(modes[0]),
        qubit_axis: Some(phi),
    })
}

/// Ωσ_φ(e^{−iφ}ab† + e^{iφ}a†b); coupling 2η_aη_b.
pub fn beamsplitter_drive(a: Mode, b: Mode, omega: f64, phi: f64, sys: &System) -> Result<RwaHamiltonian> {
    distinct(a, b)?;
    let t = sys.trap();
    two_mode_general(TwoMode::BeamSplitter, a, b, omega, phi + PI, phi, 2.0 * t.eta(a) * t.eta(b), sys)
}

/// Ωσ_φ(e^{−iφ}ab + e^{iφ}a†b†); coupling 2η_aη_b.
pub fn tms_drive(a: Mode, b: Mode, omega: f64, phi: f64, sys: &System) -> Result<RwaHamiltonian> {
    distinct(a, b)?;
    let t = sys.trap();
    two_mode_general(TwoMode::Tms, a, b, omega, phi + PI, phi, 2.0 * t.eta(a) * t.eta(b), sys)
}

/// Ωσ_φ x_a x_{φ,b}; coupling 2η_aη_b.
pub fn conditional_drive(a: Mode, b: Mode, omega: f64, phi: f64, sys: &System) -> Result<RwaHamiltonian> {
    distinct(a, b)?;
    let t = sys.trap();
    conditional_general(a, b, omega, phi + PI, 0.0, phi, 2.0 * t.eta(a) * t.eta(b), sys)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum TwoMode {
    BeamSplitter,
    Tms,
}

/// −Ωσ_μ(e^{iν}a†b + h.c.) or −Ωσ_μ(e^{iν}a†b† + h.c.).
#[allow(clippy::too_many_arguments)]
fn two_mode_general(
    which: TwoMode,
    a: Mode,
    b: Mode,
    omega: f64,
    mu: f64,
    nu: f64,
    coupling: f64,
    sys: &System,
) -> Result<RwaHamiltonian> {
    distinct(a, b)?;
    sys.trap().check_mode(a)?;
    sys.trap().check_mode(b)?;
    let layout = layout_of(sys);
    let d = layout.mode_dim();
    let b_part = match which {
        TwoMode::BeamSplitter => local::annihilation(d),
        TwoMode::Tms => local::creation(d),
    };
    let raising = mode_op(layout, &[a, b], &local::creation(d).kron(&b_part))?;
    let g = phased_hermitian(&raising, nu).scale_re(-omega);
    Ok(RwaHamiltonian {
        operator: sigma_times(layout, mu, &g),
        gate_kind: match which {
            TwoMode::BeamSplitter => GateKind::BeamSplitter(a, b),
            TwoMode::Tms => GateKind::Tms(a, b),
        },
        effective_coupling: coupling,
        coupling_order: CouplingOrder::Cross(a, b),
        qubit_axis: Some(mu),
    })
}

/// −Ωσ_μ x_{χ,a} x_{φ,b}.
#[allow(clippy::too_many_arguments)]
fn conditional_general(
    a: Mode,
    b: Mode,
    omega: f64,
    mu: f64,
    chi: f64,
    phi: f64,
    coupling: f64,
    sys: &System,
) -> Result<RwaHamiltonian> {
    distinct(a, b)?;
    sys.trap().check_mode(a)?;
    sys.trap().check_mode(b)?;
    let layout = layout_of(sys);
    let d = layout.mode_dim();
    let xx = local::rotated_quadrature(d, chi).kron(&local::rotated_quadrature(d, phi));
    let g = mode_op(layout, &[a, b], &xx)?.scale_re(-omega);
    Ok(RwaHamiltonian {
        operator: sigma_times(layout, mu, &g),
        gate_kind: GateKind::Conditional(a, b),
        effective_coupling: coupling,
        coupling_order: CouplingOrder::Cross(a, b),
        qubit_axis: Some(mu),
    })
}

/// Resonance structure of a tagged drive, read off from its tones.
#[derive(Clone, Debug, PartialEq)]
pub enum DriveAnalysis {
    /// Single δ = 0 tone.
    Mono { phase: f64, rabi: f64 },
    /// Single sideband tone.
    Sideband { phase: f64, rabi: f64 },
    /// Bichromatic pair: gate rate Ω = tone Rabi / 2.
    Pair { mu: f64, nu: f64, omega: f64 },
    /// Two pairs sharing a qubit axis: ν₁ from the difference pair, ν₂
    /// from the sum pair.
    Quad { mu: f64, nu1: f64, nu2: f64, omega: f64 },
}

fn rel_close(x: f64, y: f64, scale: f64) -> bool {
    (x - y).abs() <= TONE_REL_TOL * scale.max(1e-300)
}

fn find_tone(tones: &[LaserTone], detuning: f64, scale: f64) -> Option<LaserTone> {
    tones.iter().copied().find(|t| rel_close(t.detuning, detuning, scale))
}

fn pair(tones: &[LaserTone], delta: f64, label: &str) -> Result<(f64, f64, f64)> {
    let scale = delta.abs();
    let plus = find_tone(tones, delta, scale);
    let minus = find_tone(tones, -delta, scale);
    let (p, m) = match (plus, minus) {
        (Some(p), Some(m)) => (p, m),
        _ => {
            return Err(Error::UnrecognizedPattern(format!(
                "{label} needs tones at ±{delta}, got detunings {:?}",
                tones.iter().map(|t| t.detuning).collect::<Vec<_>>()
            )))
        }
    };
    if !rel_close(p.rabi, m.rabi, p.rabi.max(m.rabi)) {
        return Err(Error::UnequalTones(format!(
            "{label} pair has Rabi frequencies {} and {}",
            p.rabi, m.rabi
        )));
    }
    let mu = 0.5 * (p.phase + m.phase);
    let nu = 0.5 * (m.phase - p.phase);
    Ok((mu, nu, 0.5 * p.rabi))
}

fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// Checks that the tones of `config` realize its tagged gate kind.
pub fn analyze(config: &DriveConfig, trap: &TrapSpec) -> Result<DriveAnalysis> {
    config.kind.check(trap)?;
    let tones = &config.tones;
    let expect_count = |n: usize| -> Result<()> {
        if tones.len() == n {
            Ok(())
        } else {
            Err(Error::UnrecognizedPattern(format!(
                "{} drive needs {n} tone(s), got {}",
                config.kind.name(),
                tones.len()
            )))
        }
    };
    let w = |m: Mode| trap.freq(m);
    match &config.kind {
        GateKind::Carrier | GateKind::Fourier(_) => {
            expect_count(1)?;
            let t = tones[0];
            let scale = trap.mode_freqs().iter().copied().fold(0.0, f64::max);
            if !rel_close(t.detuning, 0.0, scale) {
                return Err(Error::UnrecognizedPattern(format!(
                    "{} drive must be resonant (δ = 0), got δ = {}",
                    config.kind.name(),
                    t.detuning
                )));
            }
            Ok(DriveAnalysis::Mono { phase: t.phase, rabi: t.rabi })
        }
        GateKind::Blue(m) | GateKind::Red(m) => {
            expect_count(1)?;
            let target = if matches!(config.kind, GateKind::Blue(_)) { w(*m) } else { -w(*m) };
            let t = tones[0];
            if !rel_close(t.detuning, target, w(*m)) {
                return Err(Error::UnrecognizedPattern(format!(
                    "{} sideband of mode {m} needs δ = {target}, got {}",
                    config.kind.name(),
                    t.detuning
                )));
            }
            Ok(DriveAnalysis::Sideband { phase: t.phase, rabi: t.rabi })
        }
        GateKind::Displacement(m) => {
            expect_count(2)?;
            let (mu, nu, omega) = pair(tones, w(*m), "displacement")?;
            Ok(DriveAnalysis::Pair { mu, nu, omega })
        }
        GateKind::Squeezer(m) => {
            expect_count(2)?;
            let (mu, nu, omega) = pair(tones, 2.0 * w(*m), "squeezer")?;
            Ok(DriveAnalysis::Pair { mu, nu, omega })
        }
        GateKind::BeamSplitter(a, b) => {
            expect_count(2)?;
            let (mu, nu, omega) = pair(tones, w(*a) - w(*b), "beam splitter")?;
            Ok(DriveAnalysis::Pair { mu, nu, omega })
        }
        GateKind::Tms(a, b) => {
            expect_count(2)?;
            let (mu, nu, omega) = pair(tones, w(*a) + w(*b), "two-mode squeezer")?;
            Ok(DriveAnalysis::Pair { mu, nu, omega })
        }
        GateKind::Conditional(a, b) => {
            expect_count(4)?;
            let (mu1, nu1, om1) = pair(tones, w(*a) - w(*b), "conditional difference")?;
            let (mu2, mut nu2, om2) = pair(tones, w(*a) + w(*b), "conditional sum")?;
            if !rel_close(om1, om2, om1.max(om2)) {
                return Err(Error::UnequalTones(format!(
                    "conditional pairs have Rabi frequencies {} and {}",
                    2.0 * om1,
                    2.0 * om2
                )));
            }
            let d = wrap_angle(mu2 - mu1);
            if (d.abs() - PI).abs() < 1e-9 {
                // σ_{μ+π} = −σ_μ: fold the sign into the motional phase
                nu2 += PI;
            } else if d.abs() >= 1e-9 {
                return Err(Error::UnrecognizedPattern(format!(
                    "conditional pairs act on different qubit axes ({mu1} vs {mu2})"
                )));
            }
            Ok(DriveAnalysis::Quad { mu: mu1, nu1, nu2, omega: om1 })
        }
    }
}

/// Time-averaged Hamiltonian that the tones of `config` select.
pub fn rwa_from_config(config: &DriveConfig, sys: &System) -> Result<RwaHamiltonian> {
    let trap = sys.trap();
    let eta = config.lamb_dicke(trap)?;
    let analysis = analyze(config, trap)?;
    let e = |m: &Mode| eta[m.index()];
    match (&config.kind, analysis) {
        (GateKind::Carrier, DriveAnalysis::Mono { phase, rabi }) => Ok(carrier_with_eta(rabi, phase, &eta, sys)),
        (GateKind::Fourier(ms), DriveAnalysis::Mono { phase, rabi }) => fourier_with_eta(ms, rabi, phase, &eta, sys),
        (GateKind::Blue(m), DriveAnalysis::Sideband { phase, rabi }) => {
            sideband_with_eta(*m, Sideband::Blue, rabi, phase, e(m), sys)
        }
        (GateKind::Red(m), DriveAnalysis::Sideband { phase, rabi }) => {
            sideband_with_eta(*m, Sideband::Red, rabi, phase, e(m), sys)
        }
        (GateKind::Displacement(m), DriveAnalysis::Pair { mu, nu, omega }) => {
            displacement_general(*m, omega, mu, nu, e(m), sys)
        }
        (GateKind::Squeezer(m), DriveAnalysis::Pair { mu, nu, omega }) => squeezer_general(*m, omega, mu, nu, e(m), sys),
        (GateKind::BeamSplitter(a, b), DriveAnalysis::Pair { mu, nu, omega }) => {
            two_mode_general(TwoMode::BeamSplitter, *a, *b, omega, mu, nu, 2.0 * e(a) * e(b), sys)
        }
        (GateKind::Tms(a, b), DriveAnalysis::Pair { mu, nu, omega }) => {
            two_mode_general(TwoMode::Tms, *a, *b, omega, mu, nu, 2.0 * e(a) * e(b), sys)
        }
        (GateKind::Conditional(a, b), DriveAnalysis::Quad { mu, nu1, nu2, omega }) => {
            let chi = 0.5 * (nu1 + nu2);
            let phi = 0.5 * (nu2 - nu1);
            conditional_general(*a, *b, omega, mu, chi, phi, 2.0 * e(a) * e(b), sys)
        }
        (kind, a) => Err(Error::UnrecognizedPattern(format!("{kind} with tone structure {a:?}"))),
    }
}
