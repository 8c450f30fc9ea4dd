use std::f64::consts::FRAC_2_PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;
use trapcv_compiler::{compile, execute, parse_program};
use trapcv_core::evolution::{RunMode, RunOptions};

fn trapcv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trapcv"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn program(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json_file(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn compile_writes_a_stable_schedule() {
    let dir = TempDir::new().unwrap();
    let p = program(&dir, "d.tc", "trap wa=7 wb=5 wc=4 eta=0.05 N=10\ngate D a alpha=0.1\n");
    let out = dir.path().join("s1.json");
    let o = trapcv(&["compile", s(&p), "-o", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let first = fs::read(&out).unwrap();
    let o = trapcv(&["compile", s(&p), "--out", s(dir.path())]);
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read(dir.path().join("schedule.json")).unwrap(), first);
    let v: Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(v["steps"][0]["gate_kind"], "displacement");
    assert_eq!(v["steps"][0]["duration_us"].as_f64(), Some(2.0));
    let o = trapcv(&["compile", s(&p), "-o", s(&out), "--format", "json"]);
    assert_eq!(o.stdout, first);
}

#[test]
fn parse_errors_exit_2_with_position() {
    let dir = TempDir::new().unwrap();
    let p = program(&dir, "bad.tc", "trap wa=7 eta=0.05 N=10\ngate D a alpha=0.1\ngate Q a\n");
    let o = trapcv(&["compile", s(&p), "--out", s(dir.path())]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
    assert!(!dir.path().join("schedule.json").exists());
    let o = trapcv(&["capacity"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn io_failures_exit_3() {
    let dir = TempDir::new().unwrap();
    let p = program(&dir, "d.tc", "trap wa=7 eta=0.05 N=10\ngate D a alpha=0.1\n");
    let o = trapcv(&["compile", s(&p), "-o", s(&dir.path().join("missing/dir/s.json"))]);
    assert_eq!(code(&o), 3);
    let o = trapcv(&["run", s(&dir.path().join("nope.tc")), "--out", s(dir.path())]);
    assert_eq!(code(&o), 3);
    // a file where the output directory should be
    let blocker = program(&dir, "blocker", "");
    let o = trapcv(&["run", s(&p), "--out", s(&blocker.join("sub"))]);
    assert_eq!(code(&o), 3);
}

#[test]
fn budget_violations_exit_4_and_name_the_gate() {
    let dir = TempDir::new().unwrap();
    let p = program(&dir, "big.tc", "trap wa=7 eta=0.05 N=4\ngate D a alpha=0.1\ngate D a alpha=1.5\n");
    let o = trapcv(&["run", s(&p), "--out", s(dir.path())]);
    assert_eq!(code(&o), 4);
    let e = stderr(&o);
    assert!(e.contains("line 3") && e.contains("gate D"), "{e}");
    // a dimension beyond the cap
    let p = program(&dir, "wide.tc", "trap wa=7 wb=5 wc=4 eta=0.05 N=40\n");
    assert_eq!(code(&trapcv(&["run", s(&p), "--out", s(dir.path())])), 4);
}

#[test]
fn run_writes_reports_and_identical_artifacts() {
    let dir = TempDir::new().unwrap();
    let p = program(
        &dir,
        "d.tc",
        "trap wa=7 wb=5 wc=4 eta=0.05 N=10\ngate D a alpha=0.2-0.1i\nprep qubit y-\ngate D b alpha=0.15i\n",
    );
    let (o1, o2) = (dir.path().join("o1"), dir.path().join("o2"));
    for o in [&o1, &o2] {
        let r = trapcv(&["run", s(&p), "--out", s(o)]);
        assert_eq!(code(&r), 0, "{}", stderr(&r));
        assert!(stdout(&r).contains("displacement"));
    }
    for f in ["state.csv", "report.json", "report.csv", "schedule.json"] {
        assert_eq!(fs::read(o1.join(f)).unwrap(), fs::read(o2.join(f)).unwrap(), "{f}");
    }
    let report = json_file(&o1.join("report.json"));
    let steps = report["steps"].as_array().unwrap();
    assert_eq!(steps.len(), 3);
    for st in steps {
        if let Some(f) = st["fidelity"].as_f64() {
            assert!(f >= 1.0 - 1e-8, "{f}");
        }
        assert!(st["purity"].as_f64().unwrap() >= 1.0 - 1e-9);
    }
    let state = fs::read_to_string(o1.join("state.csv")).unwrap();
    assert!(state.starts_with("index,re,im\n"));
    assert_eq!(state.lines().count(), 1 + 2 * 19 * 19 * 19);

    // the compiled schedule runs to the same state
    let o3 = dir.path().join("o3");
    let r = trapcv(&["run", s(&o1.join("schedule.json")), "--out", s(&o3)]);
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    assert_eq!(fs::read(o1.join("state.csv")).unwrap(), fs::read(o3.join("state.csv")).unwrap());
}

#[test]
fn full_mode_displacement_meets_fidelity() {
    let dir = TempDir::new().unwrap();
    let p = program(&dir, "d.tc", "trap wa=1 eta=0.05 N=8 Omega=0.01\ngate D a alpha=0.1\n");
    let r = trapcv(&["run", s(&p), "--mode", "full", "--format", "json", "--out", s(dir.path())]);
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    let v: Value = serde_json::from_str(&stdout(&r)).unwrap();
    assert_eq!(v["mode"], "full");
    assert!(v["min_fidelity"].as_f64().unwrap() >= 0.999);
}

#[test]
fn empty_program_dumps_vacuum() {
    let dir = TempDir::new().unwrap();
    let p = program(&dir, "e.tc", "trap wa=7 eta=0.05 N=3\n");
    let r = trapcv(&["run", s(&p), "--out", s(dir.path())]);
    assert_eq!(code(&r), 0);
    let report = json_file(&dir.path().join("report.json"));
    assert_eq!(report["final_purity"].as_f64(), Some(1.0));
    assert!(report["steps"].as_array().unwrap().is_empty());
    let dump = fs::read_to_string(dir.path().join("state.csv")).unwrap();
    let mut rows = dump.lines().skip(1);
    assert_eq!(rows.next(), Some("0,1.0000000000000000e0,0.0000000000000000e0"));
    assert!(rows.all(|r| r.ends_with(",0.0000000000000000e0,0.0000000000000000e0")));
}

fn grid(path: &Path) -> Vec<(f64, f64, f64)> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            (v[0], v[1], v[2])
        })
        .collect()
}

#[test]
fn wigner_of_vacuum_and_one_phonon() {
    let dir = TempDir::new().unwrap();
    let p = program(&dir, "v.tc", "trap wa=7 eta=0.05 N=50\n");
    let r = trapcv(&["wigner", s(&p), "--grid", "-3", "3", "61", "--out", s(dir.path())]);
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    let rows = grid(&dir.path().join("wigner_a.csv"));
    assert_eq!(rows.len(), 61 * 61);
    // x runs fastest
    assert_eq!((rows[0].0, rows[0].1, rows[1].1), (-3.0, -3.0, -3.0));
    let max = rows.iter().cloned().fold((0.0, 0.0, f64::MIN), |a, b| if b.2 > a.2 { b } else { a });
    assert_eq!((max.0.abs(), max.1.abs()), (0.0, 0.0));
    assert!((max.2 - FRAC_2_PI).abs() < 1e-6);

    // |g,1⟩ from a hand-written dump
    let dim = 2 * 59;
    let mut dump = String::from("index,re,im\n");
    for i in 0..dim {
        dump.push_str(&format!("{i},{},0\n", if i == 1 { 1.0 } else { 0.0 }));
    }
    let d = program(&dir, "one.csv", &dump);
    let r = trapcv(&["wigner", s(&p), "--state", s(&d), "--grid", "0", "0", "1", "--format", "json", "--out", s(dir.path())]);
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    let v: Value = serde_json::from_str(&stdout(&r)).unwrap();
    assert!((v["w_origin"].as_f64().unwrap() + FRAC_2_PI).abs() < 1e-12);

    // a grid reaching beyond the truncation
    let small = program(&dir, "s.tc", "trap wa=7 eta=0.05 N=10\n");
    let r = trapcv(&["wigner", s(&small), "--grid", "-3", "3", "5", "--out", s(dir.path())]);
    assert_eq!(code(&r), 4);
}

#[test]
fn wigner_moments_of_squeezed_vacuum() {
    let dir = TempDir::new().unwrap();
    // r = 2|ξ| = 0.2
    let p = program(&dir, "sq.tc", "trap wa=7 eta=0.05 N=50\ngate S a xi=0.1\nmeasure wigner a xmin=-3 xmax=3 n=61\n");
    let r = trapcv(&["wigner", s(&p), "--out", s(dir.path())]);
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    let rows = grid(&dir.path().join("wigner_a.csv"));
    assert_eq!(rows.len(), 61 * 61);
    let total: f64 = rows.iter().map(|r| r.2).sum();
    let var = |f: fn(&(f64, f64, f64)) -> f64| rows.iter().map(|r| f(r).powi(2) * r.2).sum::<f64>() / total;
    // vacuum variance of Re α and Im α is 1/4
    let (vx, vp) = (var(|r| r.0) / 0.25, var(|r| r.1) / 0.25);
    let (lo, hi) = ((-0.4f64).exp(), 0.4f64.exp());
    let (small, large) = (vx.min(vp), vx.max(vp));
    assert!((small / lo - 1.0).abs() < 0.02, "{small} vs {lo}");
    assert!((large / hi - 1.0).abs() < 0.02, "{large} vs {hi}");
}

const READOUT_TRAP: &str = "trap wa=7 wb=5 wc=4 eta_a=0.1 eta_b=0.11 eta_c=0.12 N=4 guard=4\n";

fn populations(v: &Value) -> Vec<([usize; 3], f64)> {
    v["populations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| {
            let n: Vec<usize> = r["n"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap() as usize).collect();
            ([n[0], n[1], n[2]], r["p"].as_f64().unwrap())
        })
        .collect()
}

#[test]
fn rabi_readout_of_vacuum_and_program_state() {
    let dir = TempDir::new().unwrap();
    let vac = program(&dir, "v.tc", READOUT_TRAP);
    let r = trapcv(&["readout", s(&vac), "--protocol", "rabi", "--out", s(dir.path())]);
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    let est = populations(&json_file(&dir.path().join("populations.json")));
    for (n, p) in &est {
        let want = if *n == [0, 0, 0] { 1.0 } else { 0.0 };
        assert!((p - want).abs() < 1e-6, "{n:?}: {p}");
    }
    let trace = fs::read_to_string(dir.path().join("rabi_trace.csv")).unwrap();
    assert!(trace.starts_with("t,p_excited\n"));

    let text = format!("{READOUT_TRAP}gate D a alpha=0.2\ngate BS a b theta=0.7\n");
    let p = program(&dir, "mix.tc", &text);
    let r = trapcv(&["readout", s(&p), "--format", "json", "--out", s(dir.path())]);
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    let est = populations(&serde_json::from_str(&stdout(&r)).unwrap());
    // exact populations from the library route
    let run = execute(&compile(&parse_program(&text).unwrap(), 1.0).unwrap(), RunMode::Rwa, RunOptions::default()).unwrap();
    let layout = run.final_state.layout().clone();
    let dist = run.final_state.phonon_distribution();
    let mut worst = 0.0f64;
    for (n, p) in est {
        let exact = dist[layout.index(0, &n[..layout.n_modes()])];
        worst = worst.max((p - exact).abs());
    }
    assert!(worst <= 1e-3, "{worst}");
}

#[test]
fn noisy_readout_is_seeded() {
    let dir = TempDir::new().unwrap();
    let p = program(&dir, "v.tc", &format!("{READOUT_TRAP}measure rabi T=20000 dt=2 cap=3 noise=0.01\n"));
    let run = |seed: &str, sub: &str| {
        let out = dir.path().join(sub);
        let r = trapcv(&["readout", s(&p), "--seed", seed, "--out", s(&out)]);
        assert_eq!(code(&r), 0, "{}", stderr(&r));
        (fs::read(out.join("rabi_trace.csv")).unwrap(), fs::read(out.join("populations.json")).unwrap())
    };
    let a = run("7", "a");
    assert_eq!(a, run("7", "b"));
    assert_ne!(a.0, run("8", "c").0);
    let v: Value = serde_json::from_slice(&a.1).unwrap();
    assert_eq!(v["seed"].as_u64(), Some(7));
    assert_eq!(v["cap"].as_u64(), Some(3));
}

#[test]
fn ill_conditioned_readout_exits_5() {
    let dir = TempDir::new().unwrap();
    // equal Lamb-Dicke parameters make n_a = 1 and n_b = 1 indistinguishable
    let p = program(&dir, "deg.tc", "trap wa=7 wb=5 eta=0.1 N=3 guard=1\n");
    let r = trapcv(&["readout", s(&p), "--t-max", "1000", "--cap", "3", "--out", s(dir.path())]);
    assert_eq!(code(&r), 5);
    assert!(stderr(&r).contains("condition"), "{}", stderr(&r));
}

#[test]
fn parity_readout_of_vacuum() {
    let dir = TempDir::new().unwrap();
    let p = program(&dir, "v.tc", "trap wa=7 wb=5 eta=0.05 N=4 guard=2\n");
    let r = trapcv(&["readout", s(&p), "--protocol", "parity", "--format", "json", "--out", s(dir.path())]);
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    let v: Value = serde_json::from_str(&stdout(&r)).unwrap();
    assert_eq!(v["m"].as_u64(), Some(100));
    assert!((v["w"].as_f64().unwrap() - FRAC_2_PI).abs() < 2e-3);
    assert!(dir.path().join("parity.csv").exists());
    // 1/η² ≠ 4m
    let r = trapcv(&["readout", s(&p), "--protocol", "parity", "--m", "25", "--out", s(dir.path())]);
    assert_eq!(code(&r), 2);
}

#[test]
fn spectrum_of_the_seven_five_four_trap() {
    let r = trapcv(&["spectrum", "--ratio", "7:5:4", "--base", "1.0", "--format", "json"]);
    assert_eq!(code(&r), 0);
    let v: Value = serde_json::from_str(&stdout(&r)).unwrap();
    assert_eq!(v["detunings"].as_array().unwrap().len(), 12);
    assert_eq!(v["min_gap"].as_f64(), Some(1.0));
    assert!(v["collisions"].as_array().unwrap().is_empty());
    let table = stdout(&trapcv(&["spectrum", "--ratio", "7:5:4"]));
    assert!(table.contains("distinct detunings 12"));

    let dir = TempDir::new().unwrap();
    let p = program(&dir, "t.tc", "trap wa=2 wb=1 eta=0.05 N=3\n");
    let r = trapcv(&["spectrum", s(&p), "--format", "csv"]);
    assert_eq!(code(&r), 0);
    assert!(stdout(&r).starts_with("line,detuning\n"));
    assert_eq!(code(&trapcv(&["spectrum", "--ratio", "7:x"])), 2);
}

#[test]
fn capacity_arithmetic() {
    let q = |args: &[&str]| {
        let mut a = vec!["capacity", "--format", "json"];
        a.extend_from_slice(args);
        let v: Value = serde_json::from_str(&stdout(&trapcv(&a))).unwrap();
        (v["phonon_cap"].as_f64().unwrap(), v["dim_nominal"].as_f64().unwrap(), v["equivalent_qubits"].as_f64().unwrap())
    };
    let (n, d, qb) = q(&["--eta", "1e-3"]);
    assert_eq!((n, d), (1e4, 1e12));
    assert!((qb - 39.86).abs() < 0.01);
    assert!((q(&["--phonons", "100"]).2 - 19.93).abs() < 0.01);
    assert!((q(&["--length-ratio", "1e4"]).2 - 79.73).abs() < 0.01);
    let csv = stdout(&trapcv(&["capacity", "--phonons", "10", "--modes", "2", "--format", "csv"]));
    assert_eq!(csv.lines().count(), 2);
    assert_eq!(code(&trapcv(&["capacity", "--eta", "-1"])), 2);
}
