use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64 as C;
use proptest::prelude::*;
use trapcv_compiler::dsl::{parse_program, GateOp, MeasureOp, ParseErrorKind, StatementKind};
use trapcv_core::{Mode, Sign};

const HEADER: &str = "trap wa=7 wb=5 wc=4 eta=0.05 N=15\n";

fn kind_at(text: &str) -> (ParseErrorKind, usize, usize) {
    let e = parse_program(text).unwrap_err();
    (e.kind, e.line, e.col)
}

#[test]
fn two_statement_program() {
    let p = parse_program("trap wa=7 wb=5 wc=4 eta=0.05 N=15\ngate D a alpha=0.5").unwrap();
    assert_eq!(p.statements.len(), 1);
    assert_eq!(p.trap_decl.trap.mode_freqs(), &[7.0, 5.0, 4.0]);
    assert_eq!(p.trap_decl.trap.truncation(), 15);
    assert_eq!(
        p.statements[0].kind,
        StatementKind::Gate(GateOp::D { mode: Mode::A, alpha: C::new(0.5, 0.0) })
    );
}

#[test]
fn missing_trap_and_identical_modes() {
    let e = parse_program("").unwrap_err();
    assert_eq!(e.kind, ParseErrorKind::MissingTrap);
    assert!(e.to_string().contains("missing trap declaration"));
    let e = parse_program("# only a comment\n\n").unwrap_err();
    assert_eq!(e.kind, ParseErrorKind::MissingTrap);
    let e = parse_program("gate BS a a theta=1").unwrap_err();
    assert_eq!(e.kind, ParseErrorKind::IdenticalModes);
    assert!(e.to_string().contains("identical modes"));
    assert_eq!(kind_at("gate D a alpha=1\ntrap wa=1 eta=0.1 N=3"), (ParseErrorKind::MissingTrap, 1, 1));
}

#[test]
fn errors_carry_line_and_column() {
    assert_eq!(kind_at(&format!("{HEADER}gate D a alpha=0.1\ngate Q a x=1")), (ParseErrorKind::UnknownGate, 3, 6));
    assert_eq!(kind_at(&format!("{HEADER}\n  gate BS a theta=1")), (ParseErrorKind::Arity, 3, 13));
    assert_eq!(kind_at(&format!("{HEADER}gate D a")), (ParseErrorKind::Arity, 2, 6));
    assert_eq!(kind_at(&format!("{HEADER}gate D a alpha=0.1 beta=2")), (ParseErrorKind::Arity, 2, 20));
    assert_eq!(kind_at(&format!("{HEADER}gate D a alpha=x")), (ParseErrorKind::InvalidValue, 2, 16));
    assert_eq!(kind_at(&format!("{HEADER}gate D a alpha")), (ParseErrorKind::Arity, 2, 10));
    assert_eq!(kind_at(&format!("{HEADER}frobnicate")), (ParseErrorKind::Syntax, 2, 1));
    assert_eq!(kind_at(&format!("{HEADER}{HEADER}")), (ParseErrorKind::DuplicateTrap, 2, 1));
    assert_eq!(kind_at("trap wa=7 wb=5 eta=0.05 N=15\ngate TMS a c zeta=0.1"), (ParseErrorKind::UndeclaredMode, 2, 12));
    assert_eq!(kind_at(&format!("{HEADER}prep qubit x")), (ParseErrorKind::Syntax, 2, 12));
    let e = parse_program(&format!("{HEADER}\n\ngate D a alpha=0.1\ngate BS a")).unwrap_err();
    assert!(e.to_string().starts_with("line 5"));
}

#[test]
fn trap_validation() {
    assert_eq!(kind_at("trap wa=7 wc=4 eta=0.05 N=15").0, ParseErrorKind::Syntax);
    assert_eq!(kind_at("trap wa=7 wb=5 eta_a=0.05 N=15").0, ParseErrorKind::Arity);
    assert_eq!(kind_at("trap wa=7 eta=0.05").0, ParseErrorKind::Arity);
    assert_eq!(kind_at("trap wa=7 eta=0.5 N=15").0, ParseErrorKind::InvalidValue);
    assert_eq!(kind_at("trap wa=7 eta=0.05 N=15 Omega=-1").0, ParseErrorKind::InvalidValue);
    let p = parse_program("trap wa=3 wb=2 eta_a=0.05 eta_b=0.07 N=10 Omega=0.5 guard=6").unwrap();
    assert_eq!(p.trap_decl.trap.lamb_dicke(), &[0.05, 0.07]);
    assert_eq!((p.trap_decl.omega, p.trap_decl.guard), (Some(0.5), Some(6)));
}

#[test]
fn every_statement_form() {
    let text = format!(
        "{HEADER}# comment line
prep qubit y-   # trailing comment
prep qubit pi/4+
gate S b xi=0.1i
gate F c theta=pi/2
gate BS a b theta=pi/4 phase=-pi/2
gate TMS b c zeta=0.05-0.02i
gate CX a c s=0.1
gate BLUE a area=pi
gate RED b area=pi phase=0.3
measure wigner a xmin=-3 xmax=3 n=61
measure rabi T=60000 dt=2 cap=4 noise=0.01
measure parity m=100
"
    );
    let p = parse_program(&text).unwrap();
    let kinds: Vec<&StatementKind> = p.statements.iter().map(|s| &s.kind).collect();
    assert_eq!(kinds.len(), 12);
    match kinds[0] {
        StatementKind::Prep(q) => assert_eq!((q.axis, q.sign), (FRAC_PI_2, Sign::Minus)),
        k => panic!("{k:?}"),
    }
    assert_eq!(p.statements[0].line, 3);
    assert_eq!(*kinds[4], StatementKind::Gate(GateOp::Bs { a: Mode::A, b: Mode::B, theta: PI / 4.0, phase: -FRAC_PI_2 }));
    assert_eq!(*kinds[7], StatementKind::Gate(GateOp::Blue { mode: Mode::A, area: PI, phase: 0.0 }));
    assert_eq!(
        *kinds[9],
        StatementKind::Measure(MeasureOp::Wigner { mode: Mode::A, xmin: Some(-3.0), xmax: Some(3.0), n: Some(61) })
    );
    assert_eq!(p.gates().count(), 7);
    assert_eq!(p.measures().count(), 3);
}

#[test]
fn canonical_text_is_a_fixed_point() {
    let text = format!("{HEADER}prep qubit y-\ngate D a alpha=0.1-0.3i\ngate CX b c s=-0.2\nmeasure parity m=100\n");
    let p = parse_program(&text).unwrap();
    let canon = p.to_string();
    let q = parse_program(&canon).unwrap();
    assert_eq!(q.statements.iter().map(|s| &s.kind).collect::<Vec<_>>(), p.statements.iter().map(|s| &s.kind).collect::<Vec<_>>());
    assert_eq!(q.trap_decl, p.trap_decl);
    assert_eq!(q.to_string(), canon);
}

fn gate_line() -> impl Strategy<Value = String> {
    let num = -2.0f64..2.0;
    prop_oneof![
        (num.clone(), num.clone()).prop_map(|(r, i)| format!("gate D a alpha={r}{i:+}i")),
        num.clone().prop_map(|x| format!("gate F b theta={x}")),
        (num.clone(), num.clone()).prop_map(|(t, p)| format!("gate BS a c theta={t} phase={p}")),
        num.clone().prop_map(|s| format!("gate CX c a s={s}")),
        (num.clone(), any::<bool>()).prop_map(|(x, s)| format!("prep qubit {x}{}", if s { '+' } else { '-' })),
        (1usize..200).prop_map(|m| format!("measure parity m={m}")),
    ]
}

proptest! {
    #[test]
    fn parsing_is_deterministic(lines in prop::collection::vec(gate_line(), 0..8)) {
        let text = format!("{HEADER}{}\n", lines.join("\n"));
        let p1 = parse_program(&text).unwrap();
        let p2 = parse_program(&text).unwrap();
        prop_assert_eq!(p1.to_string(), p2.to_string());
        let back = parse_program(&p1.to_string()).unwrap();
        prop_assert_eq!(back.to_string(), p1.to_string());
        prop_assert_eq!(back.statements.len(), lines.len());
    }
}
