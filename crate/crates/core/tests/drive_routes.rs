// Two routes from laser tones to a gate: averaging the full time-dependent
// Hamiltonian over a common period, and the closed-form RWA builders; then
// RWA evolution against the ideal gate that laser_to_gate predicts.

use std::f64::consts::PI;

use num_complex::Complex64 as C;
use trapcv_core::drive::{self, DriveConfig, GateKind, LaserTone, QubitPrep};
use trapcv_core::evolution::{evolve_static, ideal_output, prepare_qubit, state_fidelity, PrepModel};
use trapcv_core::state::coherent_amplitudes;
use trapcv_core::{Mode, QubitState, Sign, StateVector, System, TimeDependentHamiltonian, TrapSpec};

fn tone(d: f64, phi: f64, rabi: f64) -> LaserTone {
    LaserTone::new(d, phi, rabi).unwrap()
}

fn pair(kind: GateKind, delta: f64, phi1: f64, phi2: f64, rabi: f64, t: f64) -> DriveConfig {
    DriveConfig::new(kind, vec![tone(delta, phi1, rabi), tone(-delta, phi2, rabi)], t)
}

// ω = (3, 2): no resonance other than the intended one, common period 2π
fn trap(n: usize) -> TrapSpec {
    TrapSpec::new(vec![3.0, 2.0], vec![0.05, 0.07], n).unwrap()
}

fn configs() -> Vec<DriveConfig> {
    let (a, b) = (Mode::A, Mode::B);
    vec![
        pair(GateKind::Displacement(a), 3.0, 0.4, -1.1, 1.0, 10.0),
        pair(GateKind::Displacement(b), 2.0, 2.0, 0.3, 0.8, 6.0),
        pair(GateKind::Squeezer(a), 6.0, -0.2, 0.9, 1.0, 100.0),
        pair(GateKind::Squeezer(b), 4.0, 1.3, 1.3, 1.2, 40.0),
        pair(GateKind::BeamSplitter(a, b), 1.0, 0.5, -0.8, 1.0, 300.0),
        pair(GateKind::Tms(a, b), 5.0, -1.4, 0.6, 1.0, 60.0),
        DriveConfig::new(GateKind::Fourier(vec![a, b]), vec![tone(0.0, 0.7, 1.0)], 200.0),
        DriveConfig::new(
            GateKind::Conditional(a, b),
            vec![tone(1.0, 0.2, 1.0), tone(-1.0, 1.0, 1.0), tone(5.0, -0.5, 1.0), tone(-5.0, 1.7, 1.0)],
            100.0,
        ),
    ]
}

#[test]
fn period_average_equals_rwa_builder() {
    let sys = System::with_guard(trap(4), 2).unwrap();
    for cfg in configs() {
        let full = TimeDependentHamiltonian::from_config(&cfg, &sys).unwrap();
        let avg = full.time_average(2.0 * PI, 400);
        let rwa = drive::rwa_from_config(&cfg, &sys).unwrap().scaled();
        let mut diff = avg.sub(&rwa).unwrap();
        if let GateKind::Fourier(_) = cfg.kind {
            // the resonant tone also drives the reduced carrier
            let t = cfg.tones[0];
            diff = diff.sub(&drive::carrier(t.rabi, t.phase, &sys).operator).unwrap();
        }
        assert!(diff.max_abs() < 1e-12, "{}: {}", cfg.kind, diff.max_abs());
    }
}

fn motional_input(sys: &System) -> StateVector {
    let d = sys.layout().mode_dim();
    StateVector::product(
        sys.layout(),
        QubitState::ground(),
        &[coherent_amplitudes(C::new(0.3, -0.2), d), coherent_amplitudes(C::new(-0.1, 0.25), d)],
    )
    .unwrap()
}

#[test]
fn rwa_evolution_matches_ideal_gate() {
    let sys = System::with_guard(trap(10), 8).unwrap();
    let input = motional_input(&sys);
    for cfg in configs() {
        let rwa = drive::rwa_from_config(&cfg, &sys).unwrap();
        let axis = rwa.qubit_axis.unwrap();
        for sign in [Sign::Plus, Sign::Minus] {
            let cfg = cfg.clone().with_prep(QubitPrep::new(axis, sign));
            let prepared = prepare_qubit(&input, cfg.qubit_prep.unwrap(), PrepModel::Instant, &sys).unwrap();
            let out = evolve_static(&rwa.operator, rwa.effective_coupling, cfg.duration, &prepared).unwrap();
            let ideal = ideal_output(&cfg, &sys, &prepared).unwrap();
            let f = state_fidelity(&out.final_state, &ideal).unwrap();
            assert!(f > 1.0 - 1e-10, "{} {sign:?}: infidelity {:e}", cfg.kind, 1.0 - f);
            assert!(out.final_state.qubit_purity() > 1.0 - 1e-10);
        }
    }
}

#[test]
fn axis_flip_prep_is_equivalent_to_opposite_sign() {
    // |+⟩ on μ + π is |−⟩ on μ
    let sys = System::with_guard(trap(8), 6).unwrap();
    let input = motional_input(&sys);
    let cfg = pair(GateKind::Displacement(Mode::A), 3.0, 0.4, -1.1, 1.0, 10.0);
    let mu = drive::rwa_from_config(&cfg, &sys).unwrap().qubit_axis.unwrap();
    let a = cfg.clone().with_prep(QubitPrep::new(mu + PI, Sign::Plus));
    let b = cfg.with_prep(QubitPrep::new(mu, Sign::Minus));
    let pa = prepare_qubit(&input, a.qubit_prep.unwrap(), PrepModel::Instant, &sys).unwrap();
    let ga = ideal_output(&a, &sys, &pa).unwrap();
    let gb = ideal_output(&b, &sys, &pa).unwrap();
    assert!(state_fidelity(&ga, &gb).unwrap() > 1.0 - 1e-12);
}

#[test]
fn unequal_or_misplaced_tones_are_rejected() {
    let sys = System::with_guard(trap(3), 1).unwrap();
    let bad = DriveConfig::new(
        GateKind::Displacement(Mode::A),
        vec![tone(3.0, 0.0, 1.0), tone(-3.0, 0.0, 1.1)],
        1.0,
    );
    assert!(drive::rwa_from_config(&bad, &sys).is_err());
    let off = pair(GateKind::Squeezer(Mode::A), 3.0, 0.0, 0.0, 1.0, 1.0);
    assert!(drive::rwa_from_config(&off, &sys).is_err());
}
