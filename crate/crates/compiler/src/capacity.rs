//! Phonon cap and Hilbert-space size of a trap.

use serde::Serialize;

/// N ≈ PHONON_CAP_FACTOR / η²
pub const PHONON_CAP_FACTOR: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Sizing {
    Phonons(f64),
    /// Lamb-Dicke parameter.
    Eta(f64),
    /// Motional extent over ground-state width, ℓ/x_s ≈ √(N+1).
    LengthRatio(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Capacity {
    pub phonon_cap: f64,
    pub modes: usize,
    /// N^modes
    pub dim_nominal: f64,
    /// (N + 1)^modes
    pub dim_exact: f64,
    /// log₂ of `dim_nominal`
    pub equivalent_qubits: f64,
}

pub fn phonon_cap(sizing: Sizing) -> f64 {
    match sizing {
        Sizing::Phonons(n) => n,
        Sizing::Eta(eta) => (PHONON_CAP_FACTOR / (eta * eta)).round(),
        Sizing::LengthRatio(r) => (r * r - 1.0).round().max(0.0),
    }
}

pub fn capacity(sizing: Sizing, modes: usize) -> Capacity {
    let n = phonon_cap(sizing);
    let m = modes as i32;
    let dim_nominal = n.powi(m);
    Capacity {
        phonon_cap: n,
        modes,
        dim_nominal,
        dim_exact: (n + 1.0).powi(m),
        equivalent_qubits: dim_nominal.log2(),
    }
}
