//! Trap description and the tensor layout of the truncated qubit ⊗ phonon space.
//!
//! Factors are always ordered qubit ⊗ mode a ⊗ mode b ⊗ mode c, with the
//! qubit as the most significant digit of the flat index. Qubit digit 0 is
//! |g⟩ and digit 1 is |e⟩.

use std::fmt;

use crate::error::{Error, Result};

/// Extra Fock levels kept above the nominal cutoff to make leakage visible.
pub const DEFAULT_GUARD: usize = 8;
/// Largest total dimension accepted for dense-style simulation.
pub const DEFAULT_DIM_CAP: usize = 20_000;
/// Above this value of η²N the Lamb-Dicke expansion is flagged as doubtful.
pub const ETA_SQ_N_WARN: f64 = 0.1;

/// Motional mode label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    A,
    B,
    C,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::A, Mode::B, Mode::C];

    pub fn index(self) -> usize {
        match self {
            Mode::A => 0,
            Mode::B => 1,
            Mode::C => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Mode> {
        Mode::ALL.get(i).copied()
    }

    pub fn label(self) -> char {
        match self {
            Mode::A => 'a',
            Mode::B => 'b',
            Mode::C => 'c',
        }
    }

    pub fn parse(s: &str) -> Option<Mode> {
        match s {
            "a" | "A" => Some(Mode::A),
            "b" | "B" => Some(Mode::B),
            "c" | "C" => Some(Mode::C),
            _ => None,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// One tensor factor of the composite space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Factor {
    Qubit,
    Mode(Mode),
}

impl Factor {
    fn position(self) -> usize {
        match self {
            Factor::Qubit => 0,
            Factor::Mode(m) => m.index() + 1,
        }
    }
}

/// Physical parameters of the trap: mode frequencies (rad/µs), Lamb-Dicke
/// parameters and the nominal phonon cutoff N shared by every mode.
#[derive(Clone, Debug, PartialEq)]
pub struct TrapSpec {
    mode_freqs: Vec<f64>,
    lamb_dicke: Vec<f64>,
    truncation: usize,
    qubit_freq: f64,
}

impl TrapSpec {
    pub fn new(mode_freqs: Vec<f64>, lamb_dicke: Vec<f64>, truncation: usize) -> Result<Self> {
        let n_modes = mode_freqs.len();
        if !(1..=3).contains(&n_modes) {
            return Err(Error::InvalidTrap(format!(
                "expected 1 to 3 modes, got {n_modes}"
            )));
        }
        if lamb_dicke.len() != n_modes {
            return Err(Error::InvalidTrap(format!(
                "{} Lamb-Dicke parameters for {} modes",
                lamb_dicke.len(),
                n_modes
            )));
        }
        if truncation < 1 {
            return Err(Error::InvalidTrap("truncation must be at least 1".into()));
        }
        for (i, &w) in mode_freqs.iter().enumerate() {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidTrap(format!(
                    "mode {} frequency {w} is not strictly positive",
                    Mode::ALL[i]
                )));
            }
            for &w2 in &mode_freqs[..i] {
                if (w - w2).abs() <= 1e-12 * w.max(w2) {
                    return Err(Error::InvalidTrap(format!(
                        "mode frequencies must be pairwise distinct (repeated {w})"
                    )));
                }
            }
        }
        for (i, &eta) in lamb_dicke.iter().enumerate() {
            if !(eta > 0.0 && eta < 1.0) {
                return Err(Error::InvalidTrap(format!(
                    "Lamb-Dicke parameter of mode {} must lie in (0, 1), got {eta}",
                    Mode::ALL[i]
                )));
            }
            let load = eta * eta * truncation as f64;
            if load >= 1.0 {
                return Err(Error::InvalidTrap(format!(
                    "η²N = {load:.3} ≥ 1 on mode {}: the Lamb-Dicke expansion breaks down",
                    Mode::ALL[i]
                )));
            }
        }
        let trap = TrapSpec {
            mode_freqs,
            lamb_dicke,
            truncation,
            qubit_freq: 0.0,
        };
        for w in trap.warnings() {
            log::warn!("{w}");
        }
        Ok(trap)
    }

    /// Same Lamb-Dicke parameter on every mode.
    pub fn uniform(mode_freqs: Vec<f64>, eta: f64, truncation: usize) -> Result<Self> {
        let n = mode_freqs.len();
        TrapSpec::new(mode_freqs, vec![eta; n], truncation)
    }

    pub fn with_qubit_freq(mut self, w0: f64) -> Self {
        self.qubit_freq = w0;
        self
    }

    pub fn n_modes(&self) -> usize {
        self.mode_freqs.len()
    }

    pub fn modes(&self) -> impl Iterator<Item = Mode> + '_ {
        (0..self.n_modes()).map(|i| Mode::ALL[i])
    }

    pub fn has_mode(&self, mode: Mode) -> bool {
        mode.index() < self.n_modes()
    }

    pub fn check_mode(&self, mode: Mode) -> Result<()> {
        if self.has_mode(mode) {
            Ok(())
        } else {
            Err(Error::UnknownMode(mode))
        }
    }

    pub fn freq(&self, mode: Mode) -> f64 {
        self.mode_freqs[mode.index()]
    }

    pub fn eta(&self, mode: Mode) -> f64 {
        self.lamb_dicke[mode.index()]
    }

    pub fn mode_freqs(&self) -> &[f64] {
        &self.mode_freqs
    }

    pub fn lamb_dicke(&self) -> &[f64] {
        &self.lamb_dicke
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn qubit_freq(&self) -> f64 {
        self.qubit_freq
    }

    /// Copy of this trap with other Lamb-Dicke parameters.
    pub fn with_lamb_dicke(&self, lamb_dicke: Vec<f64>) -> Result<Self> {
        TrapSpec::new(self.mode_freqs.clone(), lamb_dicke, self.truncation)
            .map(|t| t.with_qubit_freq(self.qubit_freq))
    }

    /// Soft violations of the Lamb-Dicke regime.
    pub fn warnings(&self) -> Vec<String> {
        self.modes()
            .filter_map(|m| {
                let load = self.eta(m).powi(2) * self.truncation as f64;
                (load > ETA_SQ_N_WARN).then(|| {
                    format!("η²N = {load:.3} on mode {m}: higher-order Lamb-Dicke terms are not negligible")
                })
            })
            .collect()
    }
}

/// Tensor layout qubit ⊗ modes with a guard band above the nominal cutoff.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertLayout {
    dims: Vec<usize>,
    strides: Vec<usize>,
    nominal: usize,
    guard: usize,
}

impl HilbertLayout {
    pub fn new(trap: &TrapSpec, guard: usize) -> Result<Self> {
        Self::with_cap(trap.n_modes(), trap.truncation(), guard, DEFAULT_DIM_CAP)
    }

    pub fn for_trap(trap: &TrapSpec) -> Result<Self> {
        Self::new(trap, DEFAULT_GUARD)
    }

    /// Layout for `n_modes` modes, each kept up to `nominal + guard` phonons.
    pub fn with_cap(n_modes: usize, nominal: usize, guard: usize, cap: usize) -> Result<Self> {
        if !(1..=3).contains(&n_modes) {
            return Err(Error::InvalidArgument(format!(
                "layout needs 1 to 3 modes, got {n_modes}"
            )));
        }
        let mut dims = vec![2];
        dims.extend(std::iter::repeat_n(nominal + guard + 1, n_modes));
        let total = dims.iter().product::<usize>();
        if total > cap {
            return Err(Error::DimensionCap { dim: total, cap });
        }
        let mut strides = vec![1; dims.len()];
        for k in (0..dims.len() - 1).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        Ok(HilbertLayout {
            dims,
            strides,
            nominal,
            guard,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.strides[0] * self.dims[0]
    }

    pub fn n_modes(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn modes(&self) -> impl Iterator<Item = Mode> + '_ {
        (0..self.n_modes()).map(|i| Mode::ALL[i])
    }

    pub fn has_mode(&self, mode: Mode) -> bool {
        mode.index() < self.n_modes()
    }

    pub fn check_mode(&self, mode: Mode) -> Result<()> {
        if self.has_mode(mode) {
            Ok(())
        } else {
            Err(Error::UnknownMode(mode))
        }
    }

    pub fn check_factor(&self, factor: Factor) -> Result<()> {
        match factor {
            Factor::Qubit => Ok(()),
            Factor::Mode(m) => self.check_mode(m),
        }
    }

    /// Nominal cutoff N; levels above it belong to the guard band.
    pub fn nominal_cutoff(&self) -> usize {
        self.nominal
    }

    pub fn guard(&self) -> usize {
        self.guard
    }

    /// Highest representable phonon number N + guard.
    pub fn max_level(&self) -> usize {
        self.nominal + self.guard
    }

    pub fn mode_dim(&self) -> usize {
        self.nominal + self.guard + 1
    }

    pub fn factor_dim(&self, factor: Factor) -> usize {
        self.dims[factor.position()]
    }

    pub fn stride(&self, factor: Factor) -> usize {
        self.strides[factor.position()]
    }

    /// Flat index of |q, n_a, n_b, …⟩; `q` is 0 for |g⟩ and 1 for |e⟩.
    pub fn index(&self, q: usize, phonons: &[usize]) -> usize {
        debug_assert_eq!(phonons.len(), self.n_modes());
        let mut idx = q * self.strides[0];
        for (k, &n) in phonons.iter().enumerate() {
            idx += n * self.strides[k + 1];
        }
        idx
    }

    /// Inverse of [`index`](Self::index): (q, [n_a, n_b, n_c]) with unused modes zero.
    pub fn decompose(&self, flat: usize) -> (usize, [usize; 3]) {
        let mut n = [0usize; 3];
        let q = flat / self.strides[0];
        let mut rest = flat % self.strides[0];
        for (nk, stride) in n.iter_mut().zip(&self.strides[1..]) {
            *nk = rest / stride;
            rest %= stride;
        }
        (q, n)
    }

    /// Digit of `factor` in a flat index.
    pub fn digit(&self, flat: usize, factor: Factor) -> usize {
        let p = factor.position();
        (flat / self.strides[p]) % self.dims[p]
    }

    pub fn in_guard_band(&self, flat: usize) -> bool {
        let (_, n) = self.decompose(flat);
        n.iter().take(self.n_modes()).any(|&k| k > self.nominal)
    }
}
