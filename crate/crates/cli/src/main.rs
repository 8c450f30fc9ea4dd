//! trapcv: compile, simulate and read out motional-mode circuits on a trapped ion.

mod commands;
mod fail;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "trapcv", version, about = "Continuous-variable gates on the motional modes of a trapped ion")]
pub struct Cli {
    /// Seed for every stochastic component (readout noise).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Standard-output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Directory for artifact files.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compile a circuit program into a pulse schedule.
    Compile {
        program: PathBuf,
        /// Schedule file (default: <out>/schedule.json).
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
        #[command(flatten)]
        compile: CompileArgs,
    },
    /// Execute a program or compiled schedule and write the final state and step reports.
    Run {
        input: PathBuf,
        #[command(flatten)]
        exec: ExecArgs,
    },
    /// Sample the single-mode Wigner function of the final state on a grid.
    Wigner {
        input: PathBuf,
        /// State dump from `run` to use instead of executing the input.
        #[arg(long)]
        state: Option<PathBuf>,
        /// Mode to sample (a, b or c).
        #[arg(long = "mode-id")]
        mode_id: Option<char>,
        /// xmin xmax n; the same axis is used for p.
        #[arg(long, num_args = 3, value_names = ["XMIN", "XMAX", "N"], allow_negative_numbers = true)]
        grid: Option<Vec<f64>>,
        #[arg(long, value_enum, default_value_t = NormArg::PerMode)]
        norm: NormArg,
        #[command(flatten)]
        exec: ExecArgs,
    },
    /// Simulate a readout protocol on the final state and infer populations or W(0).
    Readout {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Protocol::Rabi)]
        protocol: Protocol,
        #[command(flatten)]
        params: ReadoutArgs,
        #[command(flatten)]
        exec: ExecArgs,
    },
    /// Sideband spectrum of a trap: every |ω_s|, 2ω_s, |ω_s ± ω_t|.
    #[command(group(ArgGroup::new("source").required(true).args(["program", "ratio"])))]
    Spectrum {
        /// Program whose trap frequencies are used.
        program: Option<PathBuf>,
        /// Frequency proportion such as 7:5:4.
        #[arg(long)]
        ratio: Option<String>,
        /// Scale applied to the proportion.
        #[arg(long, default_value_t = 1.0)]
        base: f64,
    },
    /// Phonon cap, Hilbert-space dimension and equivalent qubit count.
    #[command(group(ArgGroup::new("sizing").required(true).args(["phonons", "eta", "length_ratio"])))]
    Capacity {
        #[arg(long)]
        phonons: Option<f64>,
        /// Lamb-Dicke parameter; N = round(0.01/η²).
        #[arg(long)]
        eta: Option<f64>,
        /// Motional extent over ground-state width; N = round(r² − 1).
        #[arg(long = "length-ratio")]
        length_ratio: Option<f64>,
        #[arg(long, default_value_t = 3)]
        modes: usize,
    },
}

#[derive(Debug, Clone, Args)]
pub struct CompileArgs {
    /// Gate rate Ω in rad/µs when the program does not set Omega.
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// Realize qubit preparations as carrier π/2 pulses instead of instantaneous resets.
    #[arg(long)]
    pub prep_pulses: bool,
    /// Scale the displacement drive by η² instead of η.
    #[arg(long)]
    pub eta_squared: bool,
    /// Guard-band population allowed per gate.
    #[arg(long, default_value_t = 1e-8)]
    pub leak_tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct ExecArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Rwa)]
    pub mode: ModeArg,
    #[command(flatten)]
    pub compile: CompileArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ReadoutArgs {
    /// Rabi trace length in µs.
    #[arg(long = "t-max")]
    pub t_max: Option<f64>,
    /// Rabi sample spacing in µs.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Largest phonon number per mode in the inference basis.
    #[arg(long)]
    pub cap: Option<usize>,
    /// Standard deviation of additive Gaussian noise on P_e.
    #[arg(long)]
    pub noise: Option<f64>,
    /// Carrier Rabi rate used for the Rabi trace.
    #[arg(long, default_value_t = 1.0)]
    pub rabi: f64,
    /// Parity commensurability integer, 1/η² = 4m.
    #[arg(long)]
    pub m: Option<u32>,
    /// Parity-protocol carrier rate Ω₀.
    #[arg(long)]
    pub omega0: Option<f64>,
    #[arg(long = "parity-model", value_enum, default_value_t = ParityModelArg::Laguerre)]
    pub parity_model: ParityModelArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Rwa,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    PerMode,
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Protocol {
    Rabi,
    Parity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ParityModelArg {
    Linear,
    Laguerre,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match commands::dispatch(&cli) {
        Ok(stdout) => {
            print!("{stdout}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code as u8)
        }
    }
}
