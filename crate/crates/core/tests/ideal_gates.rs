use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::sync::Arc;

use num_complex::Complex64 as C;
use trapcv_core::drive::{DriveConfig, GateKind, LaserTone, QubitPrep};
use trapcv_core::evolution::{evolve_static, prepare_qubit, state_fidelity, PrepModel};
use trapcv_core::gates::{laser_to_gate, GateParams, IdealGate};
use trapcv_core::layout::DEFAULT_DIM_CAP;
use trapcv_core::operator::{number, parity, quadratures};
use trapcv_core::state::coherent_amplitudes;
use trapcv_core::{drive, Error, HilbertLayout, Mode, QubitLevel, QubitState, Sign, StateVector, System, TrapSpec};

fn layout(modes: usize, n: usize) -> Arc<HilbertLayout> {
    Arc::new(HilbertLayout::with_cap(modes, n, 8, DEFAULT_DIM_CAP).unwrap())
}

fn vac(l: &Arc<HilbertLayout>) -> StateVector {
    StateVector::vacuum(l, QubitState::ground())
}

fn mean(state: &StateVector, op: &trapcv_core::LinearOperator) -> f64 {
    state.expectation(op).unwrap().re
}

#[test]
fn displacement_mean_and_inverse() {
    let l = layout(1, 20);
    let d = IdealGate::displacement(C::new(0.5, 0.0), Mode::A, &l).unwrap();
    let coh = d.apply(&vac(&l)).unwrap();
    assert!((mean(&coh, &number(Mode::A, &l).unwrap()) - 0.25).abs() < 1e-8);
    let back = IdealGate::displacement(C::new(-0.5, 0.0), Mode::A, &l).unwrap().apply(&coh).unwrap();
    assert!(state_fidelity(&back, &vac(&l)).unwrap() > 1.0 - 1e-10);
    let id = IdealGate::displacement(C::new(0.0, 0.0), Mode::A, &l).unwrap().apply(&coh).unwrap();
    assert_eq!(id.amplitudes(), coh.amplitudes());
}

#[test]
fn displacements_compose_with_phase() {
    let l = layout(1, 20);
    let (a, b) = (C::new(0.2, -0.1), C::new(-0.15, 0.3));
    let psi = StateVector::product(&l, QubitState::ground(), &[coherent_amplitudes(C::new(0.1, 0.1), l.mode_dim())]).unwrap();
    let ab = IdealGate::displacement(a, Mode::A, &l)
        .unwrap()
        .apply(&IdealGate::displacement(b, Mode::A, &l).unwrap().apply(&psi).unwrap())
        .unwrap();
    let sum = IdealGate::displacement(a + b, Mode::A, &l).unwrap().apply(&psi).unwrap();
    let phase = C::from_polar(1.0, (a * b.conj()).im);
    for (x, y) in ab.amplitudes().iter().zip(sum.amplitudes()) {
        assert!((x - phase * y).norm() < 1e-9);
    }
}

// squeezed vacuum of S(ξ) = exp(ξ* s² − ξ s†²), ξ = r real: the standard
// S(ζ) = exp(½(ζ* s² − ζ s†²)) with ζ = 2r, whose amplitudes are
// c_2k = (−tanh ζ)^k √((2k)!) / (2^k k! √cosh ζ)
fn squeezed_series(r: f64, dim: usize) -> Vec<C> {
    let z = 2.0 * r;
    let mut c = vec![C::new(0.0, 0.0); dim];
    let mut amp = 1.0 / z.cosh().sqrt();
    let mut k = 0;
    while 2 * k < dim {
        c[2 * k] = C::new(amp, 0.0);
        // ratio c_{2k+2}/c_{2k} = −tanh ζ √((2k+1)(2k+2)) / (2(k+1))
        amp *= -z.tanh() * (((2 * k + 1) * (2 * k + 2)) as f64).sqrt() / (2.0 * (k + 1) as f64);
        k += 1;
    }
    c
}

#[test]
fn squeezed_vacuum_matches_series_oracle() {
    let l = layout(1, 30);
    let r = 0.2;
    let s = IdealGate::squeezer(C::new(r, 0.0), Mode::A, &l).unwrap().apply(&vac(&l)).unwrap();
    let oracle = StateVector::product(&l, QubitState::ground(), &[squeezed_series(r, l.mode_dim())]).unwrap();
    assert!(state_fidelity(&s, &oracle).unwrap() > 1.0 - 1e-12);
    let (x, p) = quadratures(Mode::A, &l).unwrap();
    let var_x = mean(&s, &x.mul(&x).unwrap()) - mean(&s, &x).powi(2);
    let var_p = mean(&s, &p.mul(&p).unwrap()) - mean(&s, &p).powi(2);
    // vacuum variance of x = a + a† is 1
    assert!((var_x - (-4.0 * r).exp()).abs() < 1e-4, "{var_x}");
    assert!((var_p - (4.0 * r).exp()).abs() < 1e-4, "{var_p}");
    let dist = s.mode_distribution(Mode::A).unwrap();
    assert!(dist.iter().skip(1).step_by(2).all(|&q| q < 1e-28));
    assert!((dist[2] / dist[0] - (2.0 * r).tanh().powi(2) / 2.0).abs() < 1e-12);
}

#[test]
fn fourier_rotation_and_parity() {
    let l = layout(1, 12);
    let (x, p) = quadratures(Mode::A, &l).unwrap();
    let theta = 0.63;
    let f = IdealGate::fourier(theta, Mode::A, &l).unwrap().matrix();
    let rotated = f.adjoint().mul(&x).unwrap().mul(&f).unwrap();
    // e^{iθn}: F† a F = a e^{iθ}, so F† x F = cos θ x − sin θ p
    let expected = x.scale_re(theta.cos()).sub(&p.scale_re(theta.sin())).unwrap();
    let diff = rotated.sub(&expected).unwrap();
    let block = diff.block_below(l.nominal_cutoff() - 1);
    assert!(block.camax() < 1e-10);
    let fpi = IdealGate::fourier(PI, Mode::A, &l).unwrap().matrix();
    assert!(fpi.sub(&parity(&[Mode::A], &l).unwrap()).unwrap().max_abs() < 1e-14);
}

#[test]
fn beam_splitter_splits_and_swaps() {
    let l = layout(2, 6);
    let one = StateVector::basis(&l, QubitLevel::G, &[1, 0]).unwrap();
    let half = IdealGate::beamsplitter(FRAC_PI_4, 0.7, Mode::A, Mode::B, &l).unwrap().apply(&one).unwrap();
    assert!((half.amplitude(QubitLevel::G, &[1, 0]).norm_sqr() - 0.5).abs() < 1e-12);
    assert!((half.amplitude(QubitLevel::G, &[0, 1]).norm_sqr() - 0.5).abs() < 1e-12);
    let swap = IdealGate::beamsplitter(FRAC_PI_2, 0.7, Mode::A, Mode::B, &l).unwrap().apply(&one).unwrap();
    assert!((swap.amplitude(QubitLevel::G, &[0, 1]).norm_sqr() - 1.0).abs() < 1e-10);
    assert!(matches!(
        IdealGate::beamsplitter(1.0, 0.0, Mode::A, Mode::A, &l),
        Err(Error::IdenticalModes)
    ));
}

#[test]
fn two_mode_squeezed_vacuum_statistics() {
    let l = layout(2, 25);
    let r: f64 = 0.3;
    let s = IdealGate::two_mode_squeezer(C::new(r, 0.0), Mode::A, Mode::B, &l).unwrap().apply(&vac(&l)).unwrap();
    for n in 0..=3 {
        let p = s.amplitude(QubitLevel::G, &[n, n]).norm_sqr();
        let oracle = r.tanh().powi(2 * n as i32) / r.cosh().powi(2);
        assert!((p - oracle).abs() < 1e-6);
    }
    let off: f64 = (0..l.total_dim())
        .filter(|&i| {
            let (_, n) = l.decompose(i);
            n[0] != n[1]
        })
        .map(|i| s.amplitudes()[i].norm_sqr())
        .sum();
    assert!(off < 1e-10);
}

#[test]
fn epr_variance_below_vacuum() {
    let l = layout(2, 12);
    let (xa, pa) = quadratures(Mode::A, &l).unwrap();
    let (xb, pb) = quadratures(Mode::B, &l).unwrap();
    let minus = xa.add(&xb).unwrap();
    let plus = pa.sub(&pb).unwrap();
    let epr = |st: &StateVector| {
        mean(st, &minus.mul(&minus).unwrap()) - mean(st, &minus).powi(2) + mean(st, &plus.mul(&plus).unwrap())
            - mean(st, &plus).powi(2)
    };
    let v0 = epr(&vac(&l));
    assert!((v0 - 4.0).abs() < 1e-12);
    // S₂(ζ) = exp(ζ* ab − ζ a†b†) with ζ = r > 0 gives ⟨ab⟩ = −sinh r cosh r:
    // Var(x_a + x_b) + Var(p_a − p_b) = 4 e^{−2r}
    let r = 0.05;
    let s = IdealGate::two_mode_squeezer(C::new(r, 0.0), Mode::A, Mode::B, &l).unwrap().apply(&vac(&l)).unwrap();
    let v = epr(&s);
    assert!(v < v0);
    assert!((v - 4.0 * (-2.0 * r).exp()).abs() < 1e-9, "{v}");
}

#[test]
fn controlled_displacement_shifts_target_position() {
    let l = layout(2, 20);
    let (xa, _) = quadratures(Mode::A, &l).unwrap();
    let (xb, pb) = quadratures(Mode::B, &l).unwrap();
    let g = IdealGate::controlled_displacement(0.1, Mode::A, Mode::B, &l).unwrap();
    let u = g.matrix();
    assert!(u.commutator(&xa).unwrap().block_below(l.nominal_cutoff() - 2).camax() < 1e-10);
    let d = l.mode_dim();
    let input = StateVector::product(&l, QubitState::ground(), &[coherent_amplitudes(C::new(1.0, 0.0), d), coherent_amplitudes(C::new(0.0, 0.0), d)])
        .unwrap();
    let xa0 = mean(&input, &xa);
    let shift = |s: f64| {
        let out = IdealGate::controlled_displacement(s, Mode::A, Mode::B, &l).unwrap().apply(&input).unwrap();
        (mean(&out, &xb), mean(&out, &pb))
    };
    let h = 1e-4;
    let slope = (shift(0.1 + h).0 - shift(0.1 - h).0) / (2.0 * h);
    // exp(−i s x_a p_b) translates x_b by 2 s x_a since [x_b, p_b] = 2i
    assert!((slope - 2.0 * xa0).abs() < 1e-6);
    assert!((shift(0.1).0 - 0.2 * xa0).abs() < 1e-9);
    assert!(shift(0.1).1.abs() < 1e-9);
}

#[test]
fn unitarity_on_interior_block() {
    let l = layout(2, 8);
    let gates = [
        GateParams::Displacement { mode: Mode::B, alpha: C::new(0.3, 0.2) },
        GateParams::Squeezer { mode: Mode::A, xi: C::new(0.02, -0.04) },
        GateParams::BeamSplitter { a: Mode::A, b: Mode::B, mix_angle: 1.1, mix_phase: 0.4 },
        GateParams::Tms { a: Mode::A, b: Mode::B, zeta: C::new(0.1, 0.05) },
        GateParams::controlled_displacement(0.1, Mode::A, Mode::B),
    ];
    for g in gates {
        let u = IdealGate::new(g, &l).unwrap().matrix();
        let uu = u.adjoint().mul(&u).unwrap();
        let id = trapcv_core::LinearOperator::identity(&l);
        let block = uu.sub(&id).unwrap().block_below(l.nominal_cutoff());
        assert!(block.camax() < 1e-9);
    }
}

#[test]
fn laser_parameters_map_to_gate_parameters() {
    let sys = System::with_guard(TrapSpec::uniform(vec![1.0], 0.05, 10).unwrap(), 8).unwrap();
    // tone Rabi 2Ω with φ_blue = −π/2, φ_red = π/2 gives μ = 0, ν = π/2: α = η Ω t
    let cfg = DriveConfig::new(
        GateKind::Displacement(Mode::A),
        vec![LaserTone::new(1.0, -FRAC_PI_2, 2.0).unwrap(), LaserTone::new(-1.0, FRAC_PI_2, 2.0).unwrap()],
        2.0,
    )
    .with_prep(QubitPrep::new(0.0, Sign::Plus));
    match laser_to_gate(&cfg, &sys).unwrap() {
        GateParams::Displacement { alpha, .. } => assert!((alpha - C::new(0.1, 0.0)).norm() < 1e-15),
        other => panic!("{other:?}"),
    }
    let h = drive::rwa_from_config(&cfg, &sys).unwrap();
    let prepared = prepare_qubit(&vac(sys.layout()), cfg.qubit_prep.unwrap(), PrepModel::Instant, &sys).unwrap();
    let out = evolve_static(&h.operator, h.effective_coupling, cfg.duration, &prepared).unwrap().final_state;
    let ideal = IdealGate::displacement(C::new(0.1, 0.0), Mode::A, sys.layout()).unwrap().apply(&prepared).unwrap();
    assert!(state_fidelity(&out, &ideal).unwrap() >= 1.0 - 1e-10);

    let sys = System::with_guard(TrapSpec::uniform(vec![1.0], 0.1, 10).unwrap(), 8).unwrap();
    let sq = DriveConfig::new(
        GateKind::Squeezer(Mode::A),
        vec![LaserTone::new(2.0, 0.0, 2.0).unwrap(), LaserTone::new(-2.0, 0.0, 2.0).unwrap()],
        3.0,
    );
    match laser_to_gate(&sq, &sys).unwrap() {
        GateParams::Squeezer { xi, .. } => assert!((xi.norm() - 0.03).abs() < 1e-15),
        other => panic!("{other:?}"),
    }
    let zero = DriveConfig { duration: 0.0, ..sq };
    assert!(laser_to_gate(&zero, &sys).unwrap().is_identity());
}
