//! Error type carrying the process exit code.

use std::fmt;
use std::io;
use std::path::Path;

use trapcv_compiler::schedule::ScheduleError;
use trapcv_compiler::{CompileError, ExecError, ParseError};
use trapcv_core::Error as CoreError;

pub const EXIT_OTHER: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;
pub const EXIT_CONDITIONING: i32 = 5;

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }

    pub fn io(path: &Path, err: io::Error) -> Self {
        Failure::new(EXIT_IO, format!("{}: {err}", path.display()))
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Failure::new(EXIT_PARSE, message)
    }

    pub fn context(mut self, what: &str) -> Self {
        self.message = format!("{what}: {}", self.message);
        self
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

pub fn core_code(e: &CoreError) -> i32 {
    match e {
        CoreError::Budget { .. }
        | CoreError::Leak { .. }
        | CoreError::DimensionCap { .. }
        | CoreError::CountExceedsTruncation { .. }
        | CoreError::Separability { .. } => EXIT_BUDGET,
        CoreError::IllConditioned { .. } => EXIT_CONDITIONING,
        CoreError::InvalidArgument(_) | CoreError::Commensurability(_) | CoreError::InvalidTolerance(_) => EXIT_PARSE,
        _ => EXIT_OTHER,
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        Failure::new(core_code(&e), e.to_string())
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::new(EXIT_PARSE, e.to_string())
    }
}

impl From<CompileError> for Failure {
    fn from(e: CompileError) -> Self {
        let code = match e {
            CompileError::Budget { .. } => EXIT_BUDGET,
            CompileError::NonInvertible { .. } => EXIT_PARSE,
        };
        Failure::new(code, e.to_string())
    }
}

fn schedule_code(e: &ScheduleError) -> i32 {
    match e {
        ScheduleError::Core(c) => core_code(c),
        ScheduleError::Malformed(_) | ScheduleError::Json(_) => EXIT_PARSE,
    }
}

impl From<ScheduleError> for Failure {
    fn from(e: ScheduleError) -> Self {
        Failure::new(schedule_code(&e), e.to_string())
    }
}

impl From<ExecError> for Failure {
    fn from(e: ExecError) -> Self {
        let code = match &e {
            ExecError::Schedule(s) => schedule_code(s),
            ExecError::Step { source, .. } => core_code(source),
        };
        Failure::new(code, e.to_string())
    }
}

pub type Outcome<T> = Result<T, Failure>;
