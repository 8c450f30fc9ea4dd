//! Simulation of continuous-variable gates on the motional modes of a single
//! trapped ion.
//!
//! The state space is one qubit (two internal levels) times up to three
//! harmonic modes, each truncated at a nominal phonon cutoff plus a guard
//! band. Units: ħ = 1, frequencies in rad/µs, times in µs.

pub mod drive;
pub mod error;
pub mod evolution;
pub mod expm;
pub mod gates;
pub mod layout;
pub mod numfmt;
pub mod operator;
pub mod readout;
pub mod schwinger;
pub mod sparse;
pub mod state;
pub mod system;
pub mod timedep;

pub use drive::{DriveConfig, GateKind, LaserTone, QubitPrep, RwaHamiltonian};
pub use error::{Error, Result};
pub use evolution::{evolve_static, evolve_timedep, run_gate, state_fidelity, EvolutionReport, RunMode, RunOptions};
pub use gates::{laser_to_gate, GateParams, IdealGate};
pub use layout::{Factor, HilbertLayout, Mode, TrapSpec};
pub use operator::{LinearOperator, PauliAxis};
pub use state::{DensityMatrix, Ensemble, QubitLevel, QubitState, Sign, StateVector};
pub use system::{Conventions, System};
pub use timedep::TimeDependentHamiltonian;
