//! Circuit language, pulse-schedule compiler, spectral and capacity checks.

pub mod capacity;
pub mod dsl;
pub mod execute;
pub mod json;
pub mod schedule;
pub mod spectrum;

pub use capacity::{capacity, Capacity, Sizing};
pub use dsl::{parse_program, CircuitProgram, GateOp, MeasureOp, ParseError, ParseErrorKind, Statement, StatementKind};
pub use execute::{execute, ExecError, Execution, StepReport};
pub use schedule::{compile, compile_with, CompileError, CompileOptions, PulseSchedule, ScheduleStep};
pub use spectrum::{spectrum_check, SpectrumReport};
