//! Target unitaries of the toolbox and the map from drives to gate parameters.
//!
//! D(α) = exp(αs† − α*s), S(ξ) = exp(ξ*s² − ξs†²), F(θ) = e^{iθn},
//! B(θ, ψ) = exp(θ(e^{iψ}a†b − e^{−iψ}ab†)), S₂(ζ) = exp(ζ*ab − ζa†b†),
//! C(s; χ, φ) = exp(−i s x_{χ,a} x_{φ,b}); the controlled displacement
//! exp(−i s x_a p_b) is χ = 0, φ = π/2.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use num_complex::Complex64;

use crate::drive::{analyze, reduced_rabi, DriveAnalysis, DriveConfig, GateKind, QubitPrep};
use crate::error::{Error, Result};
use crate::expm::{expm_multiply_with_norm, expm_sparse};
use crate::layout::{Factor, HilbertLayout, Mode};
use crate::operator::{local, LinearOperator, PauliAxis};
use crate::sparse::CsrMatrix;
use crate::state::StateVector;
use crate::system::System;

type C = Complex64;

/// Population allowed above the nominal cutoff before a gate is refused.
pub const DEFAULT_LEAK_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub enum GateParams {
    /// exp(−i(angle/2)σ_axis)
    Carrier { angle: f64, axis: f64 },
    Displacement { mode: Mode, alpha: C },
    Squeezer { mode: Mode, xi: C },
    /// One rotation angle per listed mode.
    Fourier { modes: Vec<Mode>, thetas: Vec<f64> },
    BeamSplitter { a: Mode, b: Mode, mix_angle: f64, mix_phase: f64 },
    Tms { a: Mode, b: Mode, zeta: C },
    Conditional { a: Mode, b: Mode, strength: f64, chi: f64, phi: f64 },
    /// exp(−i(area/2)(e^{−iφ}σ₊s† + h.c.))
    Blue { mode: Mode, area: f64, phase: f64 },
    /// exp(−i(area/2)(e^{−iφ}σ₊s + h.c.))
    Red { mode: Mode, area: f64, phase: f64 },
}

impl GateParams {
    pub fn kind(&self) -> GateKind {
        match self {
            GateParams::Carrier { .. } => GateKind::Carrier,
            GateParams::Displacement { mode, .. } => GateKind::Displacement(*mode),
            GateParams::Squeezer { mode, .. } => GateKind::Squeezer(*mode),
            GateParams::Fourier { modes, .. } => GateKind::Fourier(modes.clone()),
            GateParams::BeamSplitter { a, b, .. } => GateKind::BeamSplitter(*a, *b),
            GateParams::Tms { a, b, .. } => GateKind::Tms(*a, *b),
            GateParams::Conditional { a, b, .. } => GateKind::Conditional(*a, *b),
            GateParams::Blue { mode, .. } => GateKind::Blue(*mode),
            GateParams::Red { mode, .. } => GateKind::Red(*mode),
        }
    }

    /// Controlled displacement exp(−i·strength·x_control p_target).
    pub fn controlled_displacement(strength: f64, control: Mode, target: Mode) -> Self {
        GateParams::Conditional {
            a: control,
            b: target,
            strength,
            chi: 0.0,
            phi: FRAC_PI_2,
        }
    }

    /// Whether the parameters describe the identity.
    pub fn is_identity(&self) -> bool {
        match self {
            GateParams::Carrier { angle, .. } => *angle == 0.0,
            GateParams::Displacement { alpha, .. } => alpha.norm() == 0.0,
            GateParams::Squeezer { xi, .. } => xi.norm() == 0.0,
            GateParams::Fourier { thetas, .. } => thetas.iter().all(|t| *t == 0.0),
            GateParams::BeamSplitter { mix_angle, .. } => *mix_angle == 0.0,
            GateParams::Tms { zeta, .. } => zeta.norm() == 0.0,
            GateParams::Conditional { strength, .. } => *strength == 0.0,
            GateParams::Blue { area, .. } | GateParams::Red { area, .. } => *area == 0.0,
        }
    }

    /// Estimated population pushed above `cutoff` when acting on vacuum.
    pub fn vacuum_leak_estimate(&self, cutoff: usize) -> f64 {
        match self {
            GateParams::Displacement { alpha, .. } => poisson_tail(alpha.norm_sqr(), cutoff),
            // S(ξ) without the ½ squeezes by r = 2|ξ|
            GateParams::Squeezer { xi, .. } => squeezed_tail(2.0 * xi.norm(), cutoff),
            GateParams::Tms { zeta, .. } => zeta.norm().tanh().powi(2 * (cutoff as i32 + 1)),
            // vacuum control displaces the target by a Gaussian spread of
            // amplitudes; bound it with a 6σ displacement
            GateParams::Conditional { strength, .. } => poisson_tail((6.0 * strength).powi(2), cutoff),
            _ => 0.0,
        }
    }
}

/// P(n > cutoff) for a Poisson distribution of mean `mean`.
pub fn poisson_tail(mean: f64, cutoff: usize) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    let mut p = (-mean).exp();
    let mut cdf = p;
    for n in 1..=cutoff {
        p *= mean / n as f64;
        cdf += p;
    }
    if mean >= cutoff as f64 {
        return (1.0 - cdf).max(0.0);
    }
    // terms decrease past the mean: sum the tail directly to keep precision
    let mut tail = 0.0;
    let mut n = cutoff + 1;
    loop {
        p *= mean / n as f64;
        tail += p;
        if p <= 1e-30 * tail || p == 0.0 {
            break;
        }
        n += 1;
    }
    tail
}

/// Population above `cutoff` of a squeezed vacuum with squeezing parameter r.
fn squeezed_tail(r: f64, cutoff: usize) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    let t = r.tanh();
    // P(2k) = tanh^{2k} r (2k)! / (4^k (k!)² cosh r)
    let mut p = 1.0 / r.cosh();
    let mut tail = 0.0;
    let mut k = 0usize;
    loop {
        if 2 * k > cutoff {
            tail += p;
        }
        let kf = (k + 1) as f64;
        p *= t * t * (2.0 * kf) * (2.0 * kf - 1.0) / (4.0 * kf * kf);
        k += 1;
        if 2 * k > cutoff && p < 1e-30 || k > 100_000 {
            break;
        }
    }
    tail
}

/// Ideal gate on a layout: U = exp(G) with G anti-Hermitian, or an exact
/// diagonal phase for rotations.
#[derive(Clone, Debug)]
pub struct IdealGate {
    params: GateParams,
    layout: Arc<HilbertLayout>,
    factors: Vec<Factor>,
    local_generator: CsrMatrix,
    local_exact: Option<CsrMatrix>,
    generator: LinearOperator,
    generator_norm: f64,
}

fn modes_distinct(a: Mode, b: Mode) -> Result<()> {
    if a == b {
        Err(Error::IdenticalModes)
    } else {
        Ok(())
    }
}

impl IdealGate {
    /// Builds the gate, refusing parameters whose vacuum leak estimate
    /// exceeds `DEFAULT_LEAK_TOL`.
    pub fn new(params: GateParams, layout: &Arc<HilbertLayout>) -> Result<Self> {
        Self::with_leak_tol(params, layout, DEFAULT_LEAK_TOL)
    }

    pub fn with_leak_tol(params: GateParams, layout: &Arc<HilbertLayout>, leak_tol: f64) -> Result<Self> {
        let d = layout.mode_dim();
        let i = C::new(0.0, 1.0);
        let m = |x: Mode| Factor::Mode(x);
        let (factors, gen, exact): (Vec<Factor>, CsrMatrix, Option<CsrMatrix>) = match &params {
            GateParams::Carrier { angle, axis } => (
                vec![Factor::Qubit],
                local::pauli(PauliAxis::Phi(*axis)).scale(-i * (0.5 * angle)),
                None,
            ),
            GateParams::Displacement { mode, alpha } => {
                let a = local::annihilation(d);
                (vec![m(*mode)], a.adjoint().lincomb(*alpha, &a, -alpha.conj()), None)
            }
            GateParams::Squeezer { mode, xi } => {
                let a = local::annihilation(d);
                let a2 = a.matmul(&a);
                (vec![m(*mode)], a2.lincomb(xi.conj(), &a2.adjoint(), -xi), None)
            }
            GateParams::Fourier { modes, thetas } => {
                if modes.len() != thetas.len() || modes.is_empty() {
                    return Err(Error::InvalidArgument("Fourier gate needs one angle per mode".into()));
                }
                for (k, x) in modes.iter().enumerate() {
                    if modes[..k].contains(x) {
                        return Err(Error::IdenticalModes);
                    }
                }
                let nloc = d.pow(modes.len() as u32);
                let diag_gen: Vec<C> = (0..nloc)
                    .map(|idx| {
                        let mut rest = idx;
                        let mut phase = 0.0;
                        for k in (0..modes.len()).rev() {
                            phase += thetas[k] * (rest % d) as f64;
                            rest /= d;
                        }
                        i * phase
                    })
                    .collect();
                let exact = CsrMatrix::diagonal(&diag_gen.iter().map(|g| g.exp()).collect::<Vec<_>>());
                (modes.iter().map(|&x| m(x)).collect(), CsrMatrix::diagonal(&diag_gen), Some(exact))
            }
            GateParams::BeamSplitter { a, b, mix_angle, mix_phase } => {
                modes_distinct(*a, *b)?;
                let up = local::creation(d).kron(&local::annihilation(d));
                let c = C::from_polar(*mix_angle, *mix_phase);
                (vec![m(*a), m(*b)], up.lincomb(c, &up.adjoint(), -c.conj()), None)
            }
            GateParams::Tms { a, b, zeta } => {
                modes_distinct(*a, *b)?;
                let low = local::annihilation(d).kron(&local::annihilation(d));
                (vec![m(*a), m(*b)], low.lincomb(zeta.conj(), &low.adjoint(), -zeta), None)
            }
            GateParams::Conditional { a, b, strength, chi, phi } => {
                modes_distinct(*a, *b)?;
                let xx = local::rotated_quadrature(d, *chi).kron(&local::rotated_quadrature(d, *phi));
                (vec![m(*a), m(*b)], xx.scale(-i * *strength), None)
            }
            GateParams::Blue { mode, area, phase } | GateParams::Red { mode, area, phase } => {
                let s = if matches!(params, GateParams::Blue { .. }) {
                    local::creation(d)
                } else {
                    local::annihilation(d)
                };
                let t = local::pauli(PauliAxis::Plus).kron(&s).scale(C::from_polar(0.5 * area, -phase));
                let h = t.add(&t.adjoint());
                (vec![Factor::Qubit, m(*mode)], h.scale(-i), None)
            }
        };
        for f in &factors {
            layout.check_factor(*f)?;
        }
        let leak = params.vacuum_leak_estimate(layout.nominal_cutoff());
        if leak > leak_tol {
            return Err(Error::Budget {
                what: format!("{} gate", params.kind()),
                leak,
                tol: leak_tol,
            });
        }
        let generator = LinearOperator::embed(layout, &factors, &gen)?;
        let generator_norm = generator.norm1();
        Ok(IdealGate {
            params,
            layout: layout.clone(),
            factors,
            local_generator: gen,
            local_exact: exact,
            generator,
            generator_norm,
        })
    }

    pub fn displacement(alpha: C, mode: Mode, layout: &Arc<HilbertLayout>) -> Result<Self> {
        Self::new(GateParams::Displacement { mode, alpha }, layout)
    }

    pub fn squeezer(xi: C, mode: Mode, layout: &Arc<HilbertLayout>) -> Result<Self> {
        Self::new(GateParams::Squeezer { mode, xi }, layout)
    }

    pub fn fourier(theta: f64, mode: Mode, layout: &Arc<HilbertLayout>) -> Result<Self> {
        Self::new(
            GateParams::Fourier {
                modes: vec![mode],
                thetas: vec![theta],
            },
            layout,
        )
    }

    pub fn beamsplitter(mix_angle: f64, mix_phase: f64, a: Mode, b: Mode, layout: &Arc<HilbertLayout>) -> Result<Self> {
        Self::new(GateParams::BeamSplitter { a, b, mix_angle, mix_phase }, layout)
    }

    pub fn two_mode_squeezer(zeta: C, a: Mode, b: Mode, layout: &Arc<HilbertLayout>) -> Result<Self> {
        Self::new(GateParams::Tms { a, b, zeta }, layout)
    }

    pub fn controlled_displacement(strength: f64, control: Mode, target: Mode, layout: &Arc<HilbertLayout>) -> Result<Self> {
        Self::new(GateParams::controlled_displacement(strength, control, target), layout)
    }

    pub fn params(&self) -> &GateParams {
        &self.params
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    /// Anti-Hermitian generator G with U = e^G on the full layout.
    pub fn generator(&self) -> &LinearOperator {
        &self.generator
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        state.same_layout(&self.layout)?;
        let amps = match &self.local_exact {
            Some(u) => LinearOperator::embed(&self.layout, &self.factors, u)?
                .matrix()
                .matvec(state.amplitudes()),
            None => expm_multiply_with_norm(
                self.generator.matrix(),
                self.generator_norm,
                C::new(1.0, 0.0),
                state.amplitudes(),
            ),
        };
        StateVector::from_amplitudes(self.layout.clone(), amps)
    }

    /// Unitary on the factors the gate acts on.
    pub fn local_matrix(&self) -> CsrMatrix {
        match &self.local_exact {
            Some(u) => u.clone(),
            None => expm_sparse(&self.local_generator, C::new(1.0, 0.0), 0.0),
        }
    }

    /// Full-layout unitary.
    pub fn matrix(&self) -> LinearOperator {
        LinearOperator::embed(&self.layout, &self.factors, &self.local_matrix()).expect("factors validated")
    }
}

/// Eigenvalue of σ_axis on the prepared qubit state.
fn prep_eigenvalue(prep: Option<QubitPrep>, axis: f64, default: f64) -> Result<f64> {
    let Some(p) = prep else { return Ok(default) };
    let d = (p.axis - axis).rem_euclid(2.0 * PI);
    let sign = p.sign.value();
    if d.min(2.0 * PI - d) < 1e-9 {
        Ok(sign)
    } else if (d - PI).abs() < 1e-9 {
        Ok(-sign)
    } else {
        Err(Error::UnrecognizedPattern(format!(
            "qubit prepared along axis {} but the drive needs a σ eigenstate along {}",
            p.axis, axis
        )))
    }
}

/// Ideal gate parameters realized by a tagged drive on its prepared qubit
/// eigenstate. Without an explicit preparation, the + eigenstate of the
/// conventional axis is assumed: μ for single-mode pairs and the δ = 0
/// phase, μ + π for two-mode pairs.
pub fn laser_to_gate(config: &DriveConfig, sys: &System) -> Result<GateParams> {
    let trap = sys.trap();
    let eta = config.lamb_dicke(trap)?;
    let e = |m: &Mode| eta[m.index()];
    let t = config.duration;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("drive duration {t} must be non-negative")));
    }
    let i = C::new(0.0, 1.0);
    let analysis = analyze(config, trap)?;
    let prep = config.qubit_prep;
    Ok(match (&config.kind, analysis) {
        (GateKind::Carrier, DriveAnalysis::Mono { phase, rabi }) => GateParams::Carrier {
            angle: reduced_rabi(rabi, &eta) * t,
            axis: phase,
        },
        (GateKind::Fourier(ms), DriveAnalysis::Mono { phase, rabi }) => {
            let lam = prep_eigenvalue(prep, phase, 1.0)?;
            GateParams::Fourier {
                modes: ms.clone(),
                thetas: ms.iter().map(|m| lam * e(m) * e(m) * rabi * t / 2.0).collect(),
            }
        }
        (GateKind::Blue(m), DriveAnalysis::Sideband { phase, rabi }) => GateParams::Blue {
            mode: *m,
            area: e(m) * rabi * t,
            phase,
        },
        (GateKind::Red(m), DriveAnalysis::Sideband { phase, rabi }) => GateParams::Red {
            mode: *m,
            area: e(m) * rabi * t,
            phase,
        },
        (GateKind::Displacement(m), DriveAnalysis::Pair { mu, nu, omega }) => {
            let lam = prep_eigenvalue(prep, mu, 1.0)?;
            let c = if sys.conventions().displacement_eta_squared {
                e(m) * e(m)
            } else {
                e(m)
            };
            GateParams::Displacement {
                mode: *m,
                alpha: -i * lam * c * omega * t * C::from_polar(1.0, nu),
            }
        }
        (GateKind::Squeezer(m), DriveAnalysis::Pair { mu, nu, omega }) => {
            let lam = prep_eigenvalue(prep, mu, 1.0)?;
            GateParams::Squeezer {
                mode: *m,
                xi: -i * lam * e(m) * e(m) * omega * t * C::from_polar(1.0, nu),
            }
        }
        (GateKind::BeamSplitter(a, b), DriveAnalysis::Pair { mu, nu, omega }) => {
            let lam = prep_eigenvalue(prep, mu, -1.0)?;
            GateParams::BeamSplitter {
                a: *a,
                b: *b,
                mix_angle: 2.0 * e(a) * e(b) * omega * t,
                mix_phase: nu + lam * FRAC_PI_2,
            }
        }
        (GateKind::Tms(a, b), DriveAnalysis::Pair { mu, nu, omega }) => {
            let lam = prep_eigenvalue(prep, mu, -1.0)?;
            GateParams::Tms {
                a: *a,
                b: *b,
                zeta: -i * lam * 2.0 * e(a) * e(b) * omega * t * C::from_polar(1.0, nu),
            }
        }
        (GateKind::Conditional(a, b), DriveAnalysis::Quad { mu, nu1, nu2, omega }) => {
            let lam = prep_eigenvalue(prep, mu, -1.0)?;
            GateParams::Conditional {
                a: *a,
                b: *b,
                strength: -lam * 2.0 * e(a) * e(b) * omega * t,
                chi: 0.5 * (nu1 + nu2),
                phi: 0.5 * (nu2 - nu1),
            }
        }
        (kind, a) => return Err(Error::UnrecognizedPattern(format!("{kind} with tone structure {a:?}"))),
    })
}
