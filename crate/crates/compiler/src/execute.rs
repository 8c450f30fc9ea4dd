//! Runs a pulse schedule through the evolution engine.

use serde::Serialize;
use trapcv_core::evolution::{prepare_qubit, run_gate, state_fidelity, RunMode, RunOptions};
use trapcv_core::{IdealGate, QubitState, StateVector, System};

use crate::schedule::{PulseSchedule, ScheduleError};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepReport {
    pub step_index: usize,
    pub source_line: usize,
    pub gate_kind: String,
    /// Overlap with the requested ideal gate applied to the prepared state.
    pub fidelity: Option<f64>,
    pub purity: f64,
    pub leak: f64,
    pub separability_flag: bool,
}

#[derive(Clone, Debug)]
pub struct Execution {
    pub system: System,
    pub final_state: StateVector,
    pub steps: Vec<StepReport>,
}

impl Execution {
    pub fn min_fidelity(&self) -> Option<f64> {
        self.steps.iter().filter_map(|s| s.fidelity).reduce(f64::min)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ExecError {
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error("step {step_index} ({gate_kind}, line {source_line}): {source}")]
    Step {
        step_index: usize,
        source_line: usize,
        gate_kind: String,
        #[source]
        source: trapcv_core::Error,
    },
}

impl ExecError {
    /// Underlying simulator error, if any.
    pub fn core(&self) -> Option<&trapcv_core::Error> {
        match self {
            ExecError::Step { source, .. } => Some(source),
            ExecError::Schedule(ScheduleError::Core(e)) => Some(e),
            ExecError::Schedule(_) => None,
        }
    }
}

/// Starts from the motional vacuum with the qubit in |g⟩. The preparation
/// model comes from the schedule; the other options are taken from `opts`.
pub fn execute(schedule: &PulseSchedule, mode: RunMode, opts: RunOptions) -> Result<Execution, ExecError> {
    let system = schedule.system()?;
    let opts = RunOptions {
        prep: schedule.prep_model(),
        ..opts
    };
    let mut state = StateVector::vacuum(system.layout(), QubitState::ground());
    let mut reports = Vec::with_capacity(schedule.steps.len());
    for step in &schedule.steps {
        let fail = |source: trapcv_core::Error| ExecError::Step {
            step_index: step.step_index,
            source_line: step.source_line,
            gate_kind: step.gate_kind.clone(),
            source,
        };
        if step.is_prep_only() {
            if let Some(p) = step.qubit_prep()? {
                state = prepare_qubit(&state, p, opts.prep, &system).map_err(fail)?;
            }
            reports.push(StepReport {
                step_index: step.step_index,
                source_line: step.source_line,
                gate_kind: step.gate_kind.clone(),
                fidelity: None,
                purity: state.qubit_purity(),
                leak: state.guard_population(),
                separability_flag: false,
            });
            continue;
        }
        let cfg = step.drive_config()?;
        let run = run_gate(&cfg, &system, &state, mode, opts).map_err(fail)?;
        let fidelity = match step.target_params()? {
            Some(target) => {
                let ideal = IdealGate::with_leak_tol(target, system.layout(), f64::INFINITY)
                    .and_then(|g| g.apply(&run.prepared))
                    .map_err(fail)?;
                Some(state_fidelity(&run.report.final_state, &ideal).map_err(fail)?)
            }
            None => None,
        };
        reports.push(StepReport {
            step_index: step.step_index,
            source_line: step.source_line,
            gate_kind: step.gate_kind.clone(),
            fidelity,
            purity: run.purity,
            leak: run.report.leak,
            separability_flag: run.separability_flag,
        });
        state = run.report.final_state;
    }
    Ok(Execution {
        system,
        final_state: state,
        steps: reports,
    })
}
