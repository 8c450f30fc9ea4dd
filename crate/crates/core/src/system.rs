//! A trap together with the layout used to simulate it.

use std::sync::Arc;

use crate::error::Result;
use crate::layout::{HilbertLayout, TrapSpec, DEFAULT_DIM_CAP, DEFAULT_GUARD};

/// Modeling switches that change coupling conventions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Conventions {
    /// Scale the bichromatic displacement drive by η² instead of η.
    pub displacement_eta_squared: bool,
}

#[derive(Clone, Debug)]
pub struct System {
    trap: TrapSpec,
    layout: Arc<HilbertLayout>,
    conventions: Conventions,
}

impl System {
    pub fn new(trap: TrapSpec) -> Result<Self> {
        Self::with_guard(trap, DEFAULT_GUARD)
    }

    pub fn with_guard(trap: TrapSpec, guard: usize) -> Result<Self> {
        Self::with_options(trap, guard, DEFAULT_DIM_CAP, Conventions::default())
    }

    pub fn with_options(trap: TrapSpec, guard: usize, cap: usize, conventions: Conventions) -> Result<Self> {
        let layout = HilbertLayout::with_cap(trap.n_modes(), trap.truncation(), guard, cap)?;
        Ok(System {
            trap,
            layout: Arc::new(layout),
            conventions,
        })
    }

    pub fn trap(&self) -> &TrapSpec {
        &self.trap
    }

    pub fn layout(&self) -> &Arc<HilbertLayout> {
        &self.layout
    }

    pub fn conventions(&self) -> Conventions {
        self.conventions
    }
}
