//! Verb implementations. Each returns the text for standard output; artifact
//! files go under the `--out` directory.

use std::path::{Path, PathBuf};

use num_complex::Complex64 as C;
use serde::Serialize;
use trapcv_compiler::capacity::{capacity, Sizing};
use trapcv_compiler::dsl::{CircuitProgram, MeasureOp};
use trapcv_compiler::schedule::{compile_with, CompileOptions, PulseSchedule};
use trapcv_compiler::spectrum::{parse_ratio, spectrum_check, SpectrumReport};
use trapcv_compiler::{execute, json, parse_program, StepReport};
use trapcv_core::evolution::{RunMode, RunOptions};
use trapcv_core::readout::{
    infer_populations, linspace, parity_protocol, simulate_rabi, wigner_grid_with, wigner_point_with, ParityModel,
    WignerNorm,
};
use trapcv_core::{Conventions, Mode, StateVector, System};

use crate::fail::{Failure, Outcome};
use crate::output::{self, exact, opt_short, short, Format, Table};
use crate::{Cli, Command, CompileArgs, ExecArgs, ModeArg, NormArg, ParityModelArg, Protocol, ReadoutArgs};

const DEFAULT_GRID: (f64, f64, usize) = (-3.0, 3.0, 61);
const DEFAULT_RABI_T: f64 = 60000.0;
const DEFAULT_RABI_DT: f64 = 2.0;
const DEFAULT_RABI_CAP: usize = 4;

pub fn dispatch(cli: &Cli) -> Outcome<String> {
    match &cli.command {
        Command::Compile { program, output, compile } => cmd_compile(cli, program, output.as_deref(), compile),
        Command::Run { input, exec } => cmd_run(cli, input, exec),
        Command::Wigner {
            input,
            state,
            mode_id,
            grid,
            norm,
            exec,
        } => cmd_wigner(cli, input, state.as_deref(), *mode_id, grid.as_deref(), *norm, exec),
        Command::Readout {
            input,
            protocol,
            params,
            exec,
        } => cmd_readout(cli, input, *protocol, params, exec),
        Command::Spectrum { program, ratio, base } => cmd_spectrum(cli, program.as_deref(), ratio.as_deref(), *base),
        Command::Capacity {
            phonons,
            eta,
            length_ratio,
            modes,
        } => cmd_capacity(cli, *phonons, *eta, *length_ratio, *modes),
    }
}

/// A program together with its schedule, or a schedule read from JSON.
struct Loaded {
    program: Option<CircuitProgram>,
    schedule: PulseSchedule,
}

impl Loaded {
    fn measures(&self) -> impl Iterator<Item = &MeasureOp> {
        self.program.iter().flat_map(|p| p.measures())
    }
}

fn compile_options(args: &CompileArgs) -> CompileOptions {
    CompileOptions {
        omega: args.omega,
        prep_pulses: args.prep_pulses,
        conventions: Conventions {
            displacement_eta_squared: args.eta_squared,
        },
        leak_tol: args.leak_tol,
    }
}

fn parse_file(path: &Path) -> Outcome<CircuitProgram> {
    let text = output::read(path)?;
    parse_program(&text).map_err(|e| Failure::from(e).context(&path.display().to_string()))
}

/// Schedules are recognized by a leading `{`; anything else is parsed as a program.
fn load(path: &Path, args: &CompileArgs) -> Outcome<Loaded> {
    let text = output::read(path)?;
    let ctx = path.display().to_string();
    if text.trim_start().starts_with('{') {
        let schedule = PulseSchedule::from_json(&text).map_err(|e| Failure::from(e).context(&ctx))?;
        return Ok(Loaded {
            program: None,
            schedule,
        });
    }
    let program = parse_program(&text).map_err(|e| Failure::from(e).context(&ctx))?;
    let schedule = compile_with(&program, &compile_options(args)).map_err(|e| Failure::from(e).context(&ctx))?;
    for step in &schedule.steps {
        for w in &step.warnings {
            log::warn!("step {} (line {}): {w}", step.step_index, step.source_line);
        }
    }
    Ok(Loaded {
        program: Some(program),
        schedule,
    })
}

fn run_mode(m: ModeArg) -> RunMode {
    match m {
        ModeArg::Rwa => RunMode::Rwa,
        ModeArg::Full => RunMode::Full,
    }
}

fn run_options(args: &CompileArgs) -> RunOptions {
    RunOptions {
        leak_tol: args.leak_tol,
        ..RunOptions::default()
    }
}

fn out_dir(cli: &Cli) -> Outcome<&Path> {
    output::ensure_dir(&cli.out)?;
    Ok(&cli.out)
}

fn schedule_table(s: &PulseSchedule) -> Table {
    let mut t = Table::new(&["step", "line", "kind", "modes", "tones", "duration_us"]);
    for st in &s.steps {
        t.row(vec![
            st.step_index.to_string(),
            st.source_line.to_string(),
            st.gate_kind.clone(),
            st.modes.iter().collect(),
            st.tones.len().to_string(),
            exact(st.duration_us),
        ]);
    }
    t
}

fn cmd_compile(cli: &Cli, program: &Path, output: Option<&Path>, args: &CompileArgs) -> Outcome<String> {
    let loaded = load(program, args)?;
    let json = loaded.schedule.to_json();
    let path: PathBuf = match output {
        Some(p) => p.to_path_buf(),
        None => out_dir(cli)?.join("schedule.json"),
    };
    output::write(&path, &json)?;
    Ok(match cli.format {
        Format::Table => schedule_table(&loaded.schedule).render(),
        Format::Csv => schedule_table(&loaded.schedule).csv(),
        Format::Json => json,
    })
}

fn state_csv(state: &StateVector) -> String {
    let mut t = Table::new(&["index", "re", "im"]);
    for (i, a) in state.amplitudes().iter().enumerate() {
        t.row(vec![i.to_string(), exact(a.re), exact(a.im)]);
    }
    t.csv()
}

fn read_state_csv(path: &Path, system: &System) -> Outcome<StateVector> {
    let text = output::read(path)?;
    let dim = system.layout().total_dim();
    let mut amps = vec![C::new(0.0, 0.0); dim];
    let mut seen = vec![false; dim];
    let bad = |line: usize, what: &str| Failure::usage(format!("{}: line {line}: {what}", path.display()));
    for (k, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != 3 {
            return Err(bad(k + 1, "expected index,re,im"));
        }
        let i: usize = cells[0].parse().map_err(|_| bad(k + 1, "bad index"))?;
        let re: f64 = cells[1].parse().map_err(|_| bad(k + 1, "bad real part"))?;
        let im: f64 = cells[2].parse().map_err(|_| bad(k + 1, "bad imaginary part"))?;
        if i >= dim || seen[i] {
            return Err(bad(k + 1, &format!("index {i} out of range or repeated (dimension {dim})")));
        }
        seen[i] = true;
        amps[i] = C::new(re, im);
    }
    if seen.iter().any(|s| !s) {
        return Err(Failure::usage(format!("{}: dump does not cover all {dim} amplitudes", path.display())));
    }
    Ok(StateVector::from_amplitudes(system.layout().clone(), amps)?)
}

#[derive(Serialize)]
struct RunSummary<'a> {
    mode: &'static str,
    omega: f64,
    total_duration_us: f64,
    min_fidelity: Option<f64>,
    final_purity: f64,
    final_leak: f64,
    steps: &'a [StepReport],
}

fn steps_table(steps: &[StepReport], cells: fn(f64) -> String) -> Table {
    let mut t = Table::new(&["step", "line", "kind", "fidelity", "purity", "leak", "entangled"]);
    for s in steps {
        t.row(vec![
            s.step_index.to_string(),
            s.source_line.to_string(),
            s.gate_kind.clone(),
            s.fidelity.map_or_else(|| "-".into(), cells),
            cells(s.purity),
            cells(s.leak),
            s.separability_flag.to_string(),
        ]);
    }
    t
}

fn cmd_run(cli: &Cli, input: &Path, exec: &ExecArgs) -> Outcome<String> {
    let loaded = load(input, &exec.compile)?;
    let run = execute(&loaded.schedule, run_mode(exec.mode), run_options(&exec.compile))?;
    let dir = out_dir(cli)?;
    let summary = RunSummary {
        mode: match exec.mode {
            ModeArg::Rwa => "rwa",
            ModeArg::Full => "full",
        },
        omega: loaded.schedule.omega,
        total_duration_us: loaded.schedule.total_duration(),
        min_fidelity: run.min_fidelity(),
        final_purity: run.final_state.qubit_purity(),
        final_leak: run.final_state.guard_population(),
        steps: &run.steps,
    };
    let report = json::to_string(&summary);
    output::write(&dir.join("schedule.json"), &loaded.schedule.to_json())?;
    output::write(&dir.join("state.csv"), &state_csv(&run.final_state))?;
    output::write(&dir.join("report.json"), &report)?;
    output::write(&dir.join("report.csv"), &steps_table(&run.steps, exact).csv())?;
    Ok(match cli.format {
        Format::Json => report,
        Format::Csv => steps_table(&run.steps, exact).csv(),
        Format::Table => {
            let mut s = steps_table(&run.steps, short).render();
            s.push_str(&format!(
                "\nmin fidelity {}  final purity {}  final leak {}\n",
                opt_short(summary.min_fidelity),
                short(summary.final_purity),
                short(summary.final_leak)
            ));
            s
        }
    })
}

/// Final state of the input, or the state dump when one is given.
fn final_state(loaded: &Loaded, dump: Option<&Path>, exec: &ExecArgs) -> Outcome<(System, StateVector)> {
    match dump {
        Some(p) => {
            let sys = loaded.schedule.system()?;
            let st = read_state_csv(p, &sys)?;
            Ok((sys, st))
        }
        None => {
            let run = execute(&loaded.schedule, run_mode(exec.mode), run_options(&exec.compile))?;
            Ok((run.system, run.final_state))
        }
    }
}

#[derive(Serialize)]
struct WignerSummary {
    mode: char,
    points: usize,
    w_min: f64,
    w_max: f64,
    w_origin: f64,
    file: String,
}

fn cmd_wigner(
    cli: &Cli,
    input: &Path,
    dump: Option<&Path>,
    mode_id: Option<char>,
    grid: Option<&[f64]>,
    norm: NormArg,
    exec: &ExecArgs,
) -> Outcome<String> {
    let loaded = load(input, &exec.compile)?;
    let declared = loaded.measures().find_map(|m| match m {
        MeasureOp::Wigner { mode, xmin, xmax, n } => Some((*mode, *xmin, *xmax, *n)),
        _ => None,
    });
    let mode = match mode_id {
        Some(c) => Mode::parse(&c.to_string()).ok_or_else(|| Failure::usage(format!("unknown mode '{c}'")))?,
        None => declared.map_or(Mode::A, |d| d.0),
    };
    let (xmin, xmax, n) = match grid {
        Some(g) => {
            let n = g[2];
            if !(n >= 1.0 && n.fract() == 0.0) {
                return Err(Failure::usage(format!("grid size {n} must be a positive integer")));
            }
            (g[0], g[1], n as usize)
        }
        None => {
            let (_, lo, hi, n) = declared.unwrap_or((mode, None, None, None));
            (
                lo.unwrap_or(DEFAULT_GRID.0),
                hi.unwrap_or(DEFAULT_GRID.1),
                n.unwrap_or(DEFAULT_GRID.2),
            )
        }
    };
    if !(xmin.is_finite() && xmax.is_finite() && xmin <= xmax) {
        return Err(Failure::usage(format!("bad grid range [{xmin}, {xmax}]")));
    }
    let (sys, state) = final_state(&loaded, dump, exec)?;
    sys.layout().check_mode(mode)?;
    let norm = match norm {
        NormArg::PerMode => WignerNorm::PerMode,
        NormArg::Literal => WignerNorm::Literal,
    };
    let axis = linspace(xmin, xmax, n);
    let tol = exec.compile.leak_tol;
    let rows = wigner_grid_with(&state, mode, &axis, &axis, norm, tol)?;
    let w_origin = wigner_point_with(&state, &[(0.0, 0.0)], &[mode], norm, tol)?;
    let csv = trapcv_core::readout::wigner_csv(&rows);
    let path = out_dir(cli)?.join(format!("wigner_{}.csv", mode.label()));
    output::write(&path, &csv)?;
    let w = rows.iter().map(|r| r.2);
    let summary = WignerSummary {
        mode: mode.label(),
        points: rows.len(),
        w_min: w.clone().fold(f64::INFINITY, f64::min),
        w_max: w.fold(f64::NEG_INFINITY, f64::max),
        w_origin,
        file: path.display().to_string(),
    };
    Ok(match cli.format {
        Format::Csv => csv,
        Format::Json => json::to_string(&summary),
        Format::Table => {
            let mut t = Table::new(&["quantity", "value"]);
            t.row(vec!["mode".into(), summary.mode.to_string()]);
            t.row(vec!["points".into(), summary.points.to_string()]);
            t.row(vec!["w_min".into(), exact(summary.w_min)]);
            t.row(vec!["w_max".into(), exact(summary.w_max)]);
            t.row(vec!["w(0,0)".into(), exact(summary.w_origin)]);
            t.row(vec!["file".into(), summary.file]);
            t.render()
        }
    })
}

#[derive(Serialize)]
struct PopulationRow {
    n: [usize; 3],
    p: f64,
}

#[derive(Serialize)]
struct PopulationReport {
    rabi: f64,
    t_max: f64,
    dt: f64,
    cap: usize,
    noise: f64,
    seed: u64,
    residual: f64,
    condition: f64,
    warnings: Vec<String>,
    populations: Vec<PopulationRow>,
}

#[derive(Serialize)]
struct ParityReport {
    m: u32,
    omega0: f64,
    t0: f64,
    delta_omega: f64,
    p_excited: f64,
    p_ground: f64,
    w: f64,
    parity: f64,
}

fn cmd_readout(cli: &Cli, input: &Path, protocol: Protocol, params: &ReadoutArgs, exec: &ExecArgs) -> Outcome<String> {
    let loaded = load(input, &exec.compile)?;
    let (sys, state) = final_state(&loaded, None, exec)?;
    let dir = out_dir(cli)?;
    match protocol {
        Protocol::Rabi => {
            let declared = loaded.measures().find_map(|m| match m {
                MeasureOp::Rabi { t_max, dt, cap, noise } => Some((*t_max, *dt, *cap, *noise)),
                _ => None,
            });
            let (d_t, d_dt, d_cap, d_noise) = declared.unwrap_or_default();
            let t_max = params.t_max.or(d_t).unwrap_or(DEFAULT_RABI_T);
            let dt = params.dt.or(d_dt).unwrap_or(DEFAULT_RABI_DT);
            let cap = params
                .cap
                .or(d_cap)
                .unwrap_or(DEFAULT_RABI_CAP.min(sys.trap().truncation()));
            let noise = params.noise.or(d_noise).unwrap_or(0.0);
            let mut trace = simulate_rabi(&state, &sys, params.rabi, t_max, dt)?;
            if noise > 0.0 {
                trace = trace.with_noise(noise, cli.seed)?;
            }
            let est = infer_populations(&trace, sys.trap(), cap)?;
            let report = PopulationReport {
                rabi: params.rabi,
                t_max,
                dt,
                cap,
                noise,
                seed: cli.seed,
                residual: est.residual,
                condition: est.condition,
                warnings: trace.warnings.clone(),
                populations: est.populations.iter().map(|&(n, p)| PopulationRow { n, p }).collect(),
            };
            let json = json::to_string(&report);
            output::write(&dir.join("rabi_trace.csv"), &trace.to_csv())?;
            output::write(&dir.join("populations.json"), &json)?;
            let n_modes = sys.trap().n_modes();
            let table = |cell: fn(f64) -> String, all: bool| {
                let mut header: Vec<String> = ["n_a", "n_b", "n_c"][..n_modes].iter().map(|h| h.to_string()).collect();
                header.push("p".into());
                let mut t = Table::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
                for r in &report.populations {
                    if all || r.p.abs() >= 1e-6 {
                        let mut row: Vec<String> = r.n[..n_modes].iter().map(|k| k.to_string()).collect();
                        row.push(cell(r.p));
                        t.row(row);
                    }
                }
                t
            };
            Ok(match cli.format {
                Format::Json => json,
                Format::Csv => table(exact, true).csv(),
                Format::Table => {
                    let mut s = table(short, false).render();
                    s.push_str(&format!(
                        "\nresidual {}  condition {}\n",
                        short(report.residual),
                        short(report.condition)
                    ));
                    s
                }
            })
        }
        Protocol::Parity => {
            let declared = loaded.measures().find_map(|m| match m {
                MeasureOp::Parity { m, omega0 } => Some((*m, *omega0)),
                _ => None,
            });
            let (d_m, d_omega0) = declared.unwrap_or_default();
            let eta = sys.trap().lamb_dicke()[0];
            let m = match params.m.or(d_m) {
                Some(m) => m,
                None => (1.0 / (4.0 * eta * eta)).round() as u32,
            };
            let omega0 = params.omega0.or(d_omega0).unwrap_or(1.0);
            let model = match params.parity_model {
                ParityModelArg::Linear => ParityModel::Linear,
                ParityModelArg::Laguerre => ParityModel::Laguerre,
            };
            let r = parity_protocol(&state, &sys, omega0, m, model)?;
            let report = ParityReport {
                m,
                omega0,
                t0: r.t0,
                delta_omega: r.delta_omega,
                p_excited: r.p_excited,
                p_ground: r.p_ground,
                w: r.w,
                parity: r.parity,
            };
            let json = json::to_string(&report);
            let table = |cell: fn(f64) -> String| {
                let mut t = Table::new(&["m", "t0", "p_excited", "p_ground", "w", "parity"]);
                t.row(vec![
                    m.to_string(),
                    cell(report.t0),
                    cell(report.p_excited),
                    cell(report.p_ground),
                    cell(report.w),
                    cell(report.parity),
                ]);
                t
            };
            output::write(&dir.join("parity.csv"), &table(exact).csv())?;
            output::write(&dir.join("parity.json"), &json)?;
            Ok(match cli.format {
                Format::Json => json,
                Format::Csv => table(exact).csv(),
                Format::Table => table(short).render(),
            })
        }
    }
}

fn spectrum_output(format: Format, report: &SpectrumReport) -> String {
    let mut lines = Table::new(&["line", "detuning"]);
    for l in &report.lines {
        lines.row(vec![l.label.clone(), exact(l.detuning)]);
    }
    match format {
        Format::Json => json::to_string(report),
        Format::Csv => lines.csv(),
        Format::Table => {
            let mut s = lines.render();
            s.push_str(&format!(
                "\ndistinct detunings {}  min gap {}  collisions {}\n",
                report.count(),
                exact(report.min_gap),
                report.collisions.len()
            ));
            for c in &report.collisions {
                s.push_str(&format!("collision: {} = {} at {}\n", c.first, c.second, exact(c.detuning)));
            }
            s
        }
    }
}

fn cmd_spectrum(cli: &Cli, program: Option<&Path>, ratio: Option<&str>, base: f64) -> Outcome<String> {
    let freqs = match (ratio, program) {
        (Some(r), _) => parse_ratio(r, base).ok_or_else(|| Failure::usage(format!("bad frequency ratio '{r}'")))?,
        (None, Some(p)) => parse_file(p)?.trap_decl.trap.mode_freqs().to_vec(),
        (None, None) => return Err(Failure::usage("spectrum needs a program or --ratio")),
    };
    Ok(spectrum_output(cli.format, &spectrum_check(&freqs)))
}

fn cmd_capacity(cli: &Cli, phonons: Option<f64>, eta: Option<f64>, length_ratio: Option<f64>, modes: usize) -> Outcome<String> {
    let positive = |name: &str, x: f64| {
        if x > 0.0 && x.is_finite() {
            Ok(x)
        } else {
            Err(Failure::usage(format!("--{name} must be positive, got {x}")))
        }
    };
    let sizing = match (phonons, eta, length_ratio) {
        (Some(n), _, _) => Sizing::Phonons(positive("phonons", n)?),
        (_, Some(e), _) => Sizing::Eta(positive("eta", e)?),
        (_, _, Some(r)) => Sizing::LengthRatio(positive("length-ratio", r)?),
        _ => return Err(Failure::usage("capacity needs --phonons, --eta or --length-ratio")),
    };
    if modes == 0 {
        return Err(Failure::usage("--modes must be at least 1"));
    }
    let c = capacity(sizing, modes);
    Ok(match cli.format {
        Format::Json => json::to_string(&c),
        Format::Csv => {
            let mut t = Table::new(&["phonon_cap", "modes", "dim_nominal", "dim_exact", "equivalent_qubits"]);
            t.row(vec![
                exact(c.phonon_cap),
                c.modes.to_string(),
                exact(c.dim_nominal),
                exact(c.dim_exact),
                exact(c.equivalent_qubits),
            ]);
            t.csv()
        }
        Format::Table => {
            let mut t = Table::new(&["quantity", "value"]);
            t.row(vec!["phonon cap N".into(), format!("{}", c.phonon_cap)]);
            t.row(vec!["modes".into(), c.modes.to_string()]);
            t.row(vec!["dimension N^M".into(), format!("{:e}", c.dim_nominal)]);
            t.row(vec!["dimension (N+1)^M".into(), format!("{:e}", c.dim_exact)]);
            t.row(vec!["equivalent qubits".into(), format!("{:.2}", c.equivalent_qubits)]);
            t.render()
        }
    })
}
