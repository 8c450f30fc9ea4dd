//! Pulse schedules and the compiler from circuit programs.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};
use trapcv_core::drive::reduced_rabi;
use trapcv_core::evolution::{prep_pulse_duration, PrepModel};
use trapcv_core::gates::{GateParams, DEFAULT_LEAK_TOL};
use trapcv_core::layout::{DEFAULT_DIM_CAP, DEFAULT_GUARD};
use trapcv_core::{Conventions, DriveConfig, GateKind, LaserTone, Mode, QubitPrep, Sign, System, TrapSpec};

use crate::dsl::{CircuitProgram, GateOp, StatementKind};
use crate::json;
use crate::spectrum::{spectrum_check, SpectrumReport};

/// Gate rate used when the program does not set Omega.
pub const DEFAULT_OMEGA: f64 = 1.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrapRecord {
    pub mode_freqs: Vec<f64>,
    pub lamb_dicke: Vec<f64>,
    pub truncation: usize,
    pub guard: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToneRecord {
    pub detuning: f64,
    pub phase: f64,
    pub rabi: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrepRecord {
    pub axis: f64,
    pub sign: char,
    /// Carrier pulse length; zero for an instantaneous preparation.
    pub pulse_us: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Target {
    Carrier { angle: f64, axis: f64 },
    Displacement { mode: char, alpha: [f64; 2] },
    Squeezer { mode: char, xi: [f64; 2] },
    Fourier { modes: Vec<char>, thetas: Vec<f64> },
    Beamsplitter { a: char, b: char, mix_angle: f64, mix_phase: f64 },
    Tms { a: char, b: char, zeta: [f64; 2] },
    Conditional { a: char, b: char, strength: f64, chi: f64, phi: f64 },
    Blue { mode: char, area: f64, phase: f64 },
    Red { mode: char, area: f64, phase: f64 },
}

fn pair(z: C) -> [f64; 2] {
    [z.re, z.im]
}

fn cx(p: [f64; 2]) -> C {
    C::new(p[0], p[1])
}

fn mode_of(c: char) -> Result<Mode, ScheduleError> {
    Mode::parse(&c.to_string()).ok_or_else(|| ScheduleError::Malformed(format!("unknown mode '{c}'")))
}

impl Target {
    pub fn from_params(p: &GateParams) -> Self {
        match p {
            GateParams::Carrier { angle, axis } => Target::Carrier { angle: *angle, axis: *axis },
            GateParams::Displacement { mode, alpha } => Target::Displacement { mode: mode.label(), alpha: pair(*alpha) },
            GateParams::Squeezer { mode, xi } => Target::Squeezer { mode: mode.label(), xi: pair(*xi) },
            GateParams::Fourier { modes, thetas } => Target::Fourier {
                modes: modes.iter().map(|m| m.label()).collect(),
                thetas: thetas.clone(),
            },
            GateParams::BeamSplitter { a, b, mix_angle, mix_phase } => Target::Beamsplitter {
                a: a.label(),
                b: b.label(),
                mix_angle: *mix_angle,
                mix_phase: *mix_phase,
            },
            GateParams::Tms { a, b, zeta } => Target::Tms { a: a.label(), b: b.label(), zeta: pair(*zeta) },
            GateParams::Conditional { a, b, strength, chi, phi } => Target::Conditional {
                a: a.label(),
                b: b.label(),
                strength: *strength,
                chi: *chi,
                phi: *phi,
            },
            GateParams::Blue { mode, area, phase } => Target::Blue { mode: mode.label(), area: *area, phase: *phase },
            GateParams::Red { mode, area, phase } => Target::Red { mode: mode.label(), area: *area, phase: *phase },
        }
    }

    pub fn params(&self) -> Result<GateParams, ScheduleError> {
        Ok(match self {
            Target::Carrier { angle, axis } => GateParams::Carrier { angle: *angle, axis: *axis },
            Target::Displacement { mode, alpha } => GateParams::Displacement { mode: mode_of(*mode)?, alpha: cx(*alpha) },
            Target::Squeezer { mode, xi } => GateParams::Squeezer { mode: mode_of(*mode)?, xi: cx(*xi) },
            Target::Fourier { modes, thetas } => GateParams::Fourier {
                modes: modes.iter().map(|&m| mode_of(m)).collect::<Result<_, _>>()?,
                thetas: thetas.clone(),
            },
            Target::Beamsplitter { a, b, mix_angle, mix_phase } => GateParams::BeamSplitter {
                a: mode_of(*a)?,
                b: mode_of(*b)?,
                mix_angle: *mix_angle,
                mix_phase: *mix_phase,
            },
            Target::Tms { a, b, zeta } => GateParams::Tms { a: mode_of(*a)?, b: mode_of(*b)?, zeta: cx(*zeta) },
            Target::Conditional { a, b, strength, chi, phi } => GateParams::Conditional {
                a: mode_of(*a)?,
                b: mode_of(*b)?,
                strength: *strength,
                chi: *chi,
                phi: *phi,
            },
            Target::Blue { mode, area, phase } => GateParams::Blue { mode: mode_of(*mode)?, area: *area, phase: *phase },
            Target::Red { mode, area, phase } => GateParams::Red { mode: mode_of(*mode)?, area: *area, phase: *phase },
        })
    }
}

/// Gate kind label of a step that only prepares the qubit.
pub const PREP_KIND: &str = "prep";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleStep {
    pub step_index: usize,
    pub prep: Option<PrepRecord>,
    pub tones: Vec<ToneRecord>,
    pub duration_us: f64,
    pub gate_kind: String,
    pub modes: Vec<char>,
    /// Per-mode Lamb-Dicke parameters of the beam, when not the trap's.
    pub lamb_dicke: Option<Vec<f64>>,
    pub target: Option<Target>,
    pub source_line: usize,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseSchedule {
    pub trap: TrapRecord,
    pub omega: f64,
    pub prep_pulses: bool,
    pub displacement_eta_squared: bool,
    pub steps: Vec<ScheduleStep>,
}

#[derive(Debug, thiserror::Error)]
pub enum ScheduleError {
    #[error("malformed schedule: {0}")]
    Malformed(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Core(#[from] trapcv_core::Error),
}

fn gate_kind(name: &str, modes: &[Mode]) -> Result<GateKind, ScheduleError> {
    let one = || modes.first().copied().ok_or_else(|| ScheduleError::Malformed(format!("{name} step has no mode")));
    let two = || match modes {
        [a, b] => Ok((*a, *b)),
        _ => Err(ScheduleError::Malformed(format!("{name} step needs two modes"))),
    };
    Ok(match name {
        "carrier" => GateKind::Carrier,
        "displacement" => GateKind::Displacement(one()?),
        "squeezer" => GateKind::Squeezer(one()?),
        "fourier" => GateKind::Fourier(modes.to_vec()),
        "beamsplitter" => {
            let (a, b) = two()?;
            GateKind::BeamSplitter(a, b)
        }
        "tms" => {
            let (a, b) = two()?;
            GateKind::Tms(a, b)
        }
        "conditional" => {
            let (a, b) = two()?;
            GateKind::Conditional(a, b)
        }
        "blue" => GateKind::Blue(one()?),
        "red" => GateKind::Red(one()?),
        other => return Err(ScheduleError::Malformed(format!("unknown gate kind '{other}'"))),
    })
}

fn prep_of(r: &PrepRecord) -> Result<QubitPrep, ScheduleError> {
    let sign = match r.sign {
        '+' => Sign::Plus,
        '-' => Sign::Minus,
        s => return Err(ScheduleError::Malformed(format!("qubit sign '{s}'"))),
    };
    Ok(QubitPrep::new(r.axis, sign))
}

impl ScheduleStep {
    pub fn is_prep_only(&self) -> bool {
        self.gate_kind == PREP_KIND
    }

    pub fn qubit_prep(&self) -> Result<Option<QubitPrep>, ScheduleError> {
        self.prep.as_ref().map(prep_of).transpose()
    }

    pub fn drive_config(&self) -> Result<DriveConfig, ScheduleError> {
        let modes: Vec<Mode> = self.modes.iter().map(|&c| mode_of(c)).collect::<Result<_, _>>()?;
        let kind = gate_kind(&self.gate_kind, &modes)?;
        let tones = self
            .tones
            .iter()
            .map(|t| LaserTone::new(t.detuning, t.phase, t.rabi))
            .collect::<Result<Vec<_>, _>>()?;
        let mut cfg = DriveConfig::new(kind, tones, self.duration_us);
        cfg.qubit_prep = self.qubit_prep()?;
        cfg.lamb_dicke_override = self.lamb_dicke.clone();
        Ok(cfg)
    }

    pub fn target_params(&self) -> Result<Option<GateParams>, ScheduleError> {
        self.target.as_ref().map(Target::params).transpose()
    }
}

impl PulseSchedule {
    pub fn trap_spec(&self) -> Result<TrapSpec, ScheduleError> {
        let t = &self.trap;
        Ok(TrapSpec::new(t.mode_freqs.clone(), t.lamb_dicke.clone(), t.truncation)?)
    }

    pub fn conventions(&self) -> Conventions {
        Conventions {
            displacement_eta_squared: self.displacement_eta_squared,
        }
    }

    pub fn system(&self) -> Result<System, ScheduleError> {
        Ok(System::with_options(self.trap_spec()?, self.trap.guard, DEFAULT_DIM_CAP, self.conventions())?)
    }

    pub fn prep_model(&self) -> PrepModel {
        if self.prep_pulses {
            PrepModel::CarrierPulse { rabi: self.omega }
        } else {
            PrepModel::Instant
        }
    }

    pub fn total_duration(&self) -> f64 {
        self.steps.iter().map(|s| s.duration_us + s.prep.map_or(0.0, |p| p.pulse_us)).sum()
    }

    pub fn to_json(&self) -> String {
        json::to_string(self)
    }

    pub fn from_json(text: &str) -> Result<Self, ScheduleError> {
        let s: PulseSchedule = serde_json::from_str(text)?;
        s.trap_spec()?;
        for (k, step) in s.steps.iter().enumerate() {
            if step.step_index != k {
                return Err(ScheduleError::Malformed(format!("step {k} carries index {}", step.step_index)));
            }
            if !step.is_prep_only() {
                step.drive_config()?;
            }
            step.target_params()?;
        }
        Ok(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompileOptions {
    /// Gate rate when the program does not set Omega.
    pub omega: f64,
    /// Expand qubit preparations into carrier π/2 pulses.
    pub prep_pulses: bool,
    pub conventions: Conventions,
    pub leak_tol: f64,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            omega: DEFAULT_OMEGA,
            prep_pulses: false,
            conventions: Conventions::default(),
            leak_tol: DEFAULT_LEAK_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum CompileError {
    #[error("line {line}: gate {gate} exceeds the truncation budget (estimated leak {leak:.3e} > tolerance {tol:.3e})")]
    Budget { line: usize, gate: String, leak: f64, tol: f64 },
    #[error("line {line}: gate {gate} cannot be realized: {reason}")]
    NonInvertible { line: usize, gate: String, reason: String },
}

struct Solved {
    tones: Vec<ToneRecord>,
    duration: f64,
    gaussian: bool,
    lamb_dicke: Option<Vec<f64>>,
}

fn tone(detuning: f64, phase: f64, rabi: f64) -> ToneRecord {
    ToneRecord { detuning, phase, rabi }
}

/// Tones at ±δ with μ = (φ₁ + φ₂)/2, ν = (φ₂ − φ₁)/2.
fn bichromatic(delta: f64, mu: f64, nu: f64, rabi: f64) -> [ToneRecord; 2] {
    [tone(delta, mu - nu, rabi), tone(-delta, mu + nu, rabi)]
}

/// Drive realizing `g` on the qubit eigenstate `prep`; gate rate Ω is half
/// the tone Rabi frequency for bichromatic pairs.
fn solve(g: &GateOp, trap: &TrapSpec, omega: f64, prep: QubitPrep, conv: Conventions) -> Result<Solved, String> {
    let w = |m: Mode| trap.freq(m);
    let e = |m: Mode| trap.eta(m);
    let lam = prep.sign.value();
    let mu = prep.axis;
    let i = C::new(0.0, 1.0);
    let rate = |coupling: f64| {
        let r = coupling * omega;
        if r > 0.0 && r.is_finite() {
            Ok(r)
        } else {
            Err(format!("coupling rate {r} is not positive"))
        }
    };
    let gaussian = |tones: Vec<ToneRecord>, duration: f64| Solved {
        tones,
        duration,
        gaussian: true,
        lamb_dicke: None,
    };
    Ok(match *g {
        GateOp::D { mode, alpha } => {
            let c = if conv.displacement_eta_squared { e(mode) * e(mode) } else { e(mode) };
            let nu = (i * lam * alpha).arg();
            gaussian(bichromatic(w(mode), mu, nu, 2.0 * omega).to_vec(), alpha.norm() / rate(c)?)
        }
        GateOp::S { mode, xi } => {
            let nu = (i * lam * xi).arg();
            gaussian(bichromatic(2.0 * w(mode), mu, nu, 2.0 * omega).to_vec(), xi.norm() / rate(e(mode) * e(mode))?)
        }
        GateOp::Tms { a, b, zeta } => {
            let nu = (i * lam * zeta).arg();
            gaussian(
                bichromatic(w(a) + w(b), mu, nu, 2.0 * omega).to_vec(),
                zeta.norm() / rate(2.0 * e(a) * e(b))?,
            )
        }
        GateOp::Bs { a, b, theta, phase } => {
            let (theta, phase) = if theta < 0.0 { (-theta, phase + PI) } else { (theta, phase) };
            let nu = phase - lam * FRAC_PI_2;
            gaussian(
                bichromatic(w(a) - w(b), mu, nu, 2.0 * omega).to_vec(),
                theta / rate(2.0 * e(a) * e(b))?,
            )
        }
        GateOp::Cx { a, b, s } => {
            // realized strength is −λ·2η_aη_bΩt; x_{χ+π} = −x_χ absorbs the sign
            let chi = if -lam * s >= 0.0 { 0.0 } else { PI };
            let (nu1, nu2) = (chi - FRAC_PI_2, chi + FRAC_PI_2);
            let mut tones = bichromatic(w(a) - w(b), mu, nu1, 2.0 * omega).to_vec();
            tones.extend(bichromatic(w(a) + w(b), mu, nu2, 2.0 * omega));
            gaussian(tones, s.abs() / rate(2.0 * e(a) * e(b))?)
        }
        GateOp::F { mode, theta } => {
            // θ = λ'η²Ωt/2 with λ' the eigenvalue along the tone phase
            let phase = if lam * theta >= 0.0 { mu } else { mu + PI };
            let mut eta = vec![0.0; trap.n_modes()];
            eta[mode.index()] = e(mode);
            Solved {
                tones: vec![tone(0.0, phase, omega)],
                duration: 2.0 * theta.abs() / rate(e(mode) * e(mode))?,
                gaussian: true,
                lamb_dicke: Some(eta),
            }
        }
        GateOp::Blue { mode, area, phase } | GateOp::Red { mode, area, phase } => {
            let (area, phase) = if area < 0.0 { (-area, phase + PI) } else { (area, phase) };
            let delta = if matches!(g, GateOp::Blue { .. }) { w(mode) } else { -w(mode) };
            Solved {
                tones: vec![tone(delta, phase, omega)],
                duration: area / rate(e(mode))?,
                gaussian: false,
                lamb_dicke: None,
            }
        }
    })
}

fn kind_name(g: &GateOp) -> &'static str {
    match g {
        GateOp::D { .. } => "displacement",
        GateOp::S { .. } => "squeezer",
        GateOp::F { .. } => "fourier",
        GateOp::Bs { .. } => "beamsplitter",
        GateOp::Tms { .. } => "tms",
        GateOp::Cx { .. } => "conditional",
        GateOp::Blue { .. } => "blue",
        GateOp::Red { .. } => "red",
    }
}

fn selectivity_warnings(tones: &[ToneRecord], spectrum: &SpectrumReport) -> Vec<String> {
    let mut out = Vec::new();
    for t in tones {
        if t.detuning == 0.0 {
            continue;
        }
        let d = t.detuning.abs();
        let hits: Vec<&str> = spectrum
            .lines
            .iter()
            .filter(|l| (l.detuning - d).abs() <= 1e-9 * d)
            .map(|l| l.label.as_str())
            .collect();
        if hits.len() > 1 {
            out.push(format!("tone at {d} is resonant with several lines: {}", hits.join(", ")));
        }
    }
    out.dedup();
    out
}

pub fn compile(program: &CircuitProgram, omega_default: f64) -> Result<PulseSchedule, CompileError> {
    compile_with(
        program,
        &CompileOptions {
            omega: omega_default,
            ..CompileOptions::default()
        },
    )
}

pub fn compile_with(program: &CircuitProgram, opts: &CompileOptions) -> Result<PulseSchedule, CompileError> {
    let decl = &program.trap_decl;
    let trap = &decl.trap;
    let omega = decl.omega.unwrap_or(opts.omega);
    let spectrum = spectrum_check(trap.mode_freqs());
    let pulse_us = if opts.prep_pulses {
        prep_pulse_duration(reduced_rabi(omega, trap.lamb_dicke()))
    } else {
        0.0
    };
    let record = |p: QubitPrep| PrepRecord {
        axis: p.axis,
        sign: p.sign.symbol(),
        pulse_us,
    };
    let mut current = QubitPrep::new(0.0, Sign::Plus);
    let mut steps: Vec<ScheduleStep> = Vec::new();
    for stmt in &program.statements {
        let step = match &stmt.kind {
            StatementKind::Measure(_) => continue,
            StatementKind::Prep(p) => {
                current = *p;
                ScheduleStep {
                    step_index: steps.len(),
                    prep: Some(record(*p)),
                    tones: vec![],
                    duration_us: 0.0,
                    gate_kind: PREP_KIND.into(),
                    modes: vec![],
                    lamb_dicke: None,
                    target: None,
                    source_line: stmt.line,
                    warnings: vec![],
                }
            }
            StatementKind::Gate(g) => {
                let target = g.params();
                if target.is_identity() {
                    continue;
                }
                let leak = target.vacuum_leak_estimate(trap.truncation());
                if leak > opts.leak_tol {
                    return Err(CompileError::Budget {
                        line: stmt.line,
                        gate: g.name().into(),
                        leak,
                        tol: opts.leak_tol,
                    });
                }
                let solved = solve(g, trap, omega, current, opts.conventions).map_err(|reason| {
                    CompileError::NonInvertible {
                        line: stmt.line,
                        gate: g.name().into(),
                        reason,
                    }
                })?;
                ScheduleStep {
                    step_index: steps.len(),
                    prep: solved.gaussian.then(|| record(current)),
                    warnings: selectivity_warnings(&solved.tones, &spectrum),
                    tones: solved.tones,
                    duration_us: solved.duration,
                    gate_kind: kind_name(g).into(),
                    modes: g.modes().iter().map(|m| m.label()).collect(),
                    lamb_dicke: solved.lamb_dicke,
                    target: Some(Target::from_params(&target)),
                    source_line: stmt.line,
                }
            }
        };
        steps.push(step);
    }
    Ok(PulseSchedule {
        trap: TrapRecord {
            mode_freqs: trap.mode_freqs().to_vec(),
            lamb_dicke: trap.lamb_dicke().to_vec(),
            truncation: trap.truncation(),
            guard: decl.guard.unwrap_or(DEFAULT_GUARD),
        },
        omega,
        prep_pulses: opts.prep_pulses,
        displacement_eta_squared: opts.conventions.displacement_eta_squared,
        steps,
    })
}
