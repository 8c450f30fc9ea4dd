//! Resonance lines of the toolbox drives and their spectral separation.

use serde::Serialize;

/// Relative tolerance below which two lines are the same frequency.
pub const COLLISION_REL_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Line {
    pub label: String,
    pub detuning: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Collision {
    pub first: String,
    pub second: String,
    pub detuning: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumReport {
    /// Every gate line ω_s, 2ω_s, |ω_s − ω_s'|, ω_s + ω_s' with its label.
    pub lines: Vec<Line>,
    /// Distinct detunings, ascending.
    pub detunings: Vec<f64>,
    /// Smallest gap between distinct detunings; infinite with fewer than two.
    pub min_gap: f64,
    pub collisions: Vec<Collision>,
}

impl SpectrumReport {
    pub fn count(&self) -> usize {
        self.detunings.len()
    }

    /// Lines other than `label` sitting on the same frequency.
    pub fn colliding_with(&self, label: &str) -> Vec<&str> {
        self.collisions
            .iter()
            .filter_map(|c| {
                if c.first == label {
                    Some(c.second.as_str())
                } else if c.second == label {
                    Some(c.first.as_str())
                } else {
                    None
                }
            })
            .collect()
    }
}

fn same(x: f64, y: f64) -> bool {
    (x - y).abs() <= COLLISION_REL_TOL * x.abs().max(y.abs()).max(1e-300)
}

const NAMES: [char; 3] = ['a', 'b', 'c'];

pub fn lines(freqs: &[f64]) -> Vec<Line> {
    let mut out = Vec::new();
    for (s, w) in freqs.iter().enumerate() {
        out.push(Line { label: format!("w_{}", NAMES[s]), detuning: *w });
    }
    for (s, w) in freqs.iter().enumerate() {
        out.push(Line { label: format!("2w_{}", NAMES[s]), detuning: 2.0 * w });
    }
    for s in 0..freqs.len() {
        for t in s + 1..freqs.len() {
            out.push(Line {
                label: format!("|w_{}-w_{}|", NAMES[s], NAMES[t]),
                detuning: (freqs[s] - freqs[t]).abs(),
            });
        }
    }
    for s in 0..freqs.len() {
        for t in s + 1..freqs.len() {
            out.push(Line {
                label: format!("w_{}+w_{}", NAMES[s], NAMES[t]),
                detuning: freqs[s] + freqs[t],
            });
        }
    }
    out
}

pub fn spectrum_check(freqs: &[f64]) -> SpectrumReport {
    let lines = lines(freqs);
    let mut collisions = Vec::new();
    for (i, l1) in lines.iter().enumerate() {
        for l2 in &lines[i + 1..] {
            if same(l1.detuning, l2.detuning) {
                collisions.push(Collision {
                    first: l1.label.clone(),
                    second: l2.label.clone(),
                    detuning: l1.detuning,
                });
            }
        }
    }
    let mut sorted: Vec<f64> = lines.iter().map(|l| l.detuning).collect();
    sorted.sort_by(f64::total_cmp);
    let mut detunings: Vec<f64> = Vec::new();
    for d in sorted {
        if detunings.last().is_none_or(|&last| !same(last, d)) {
            detunings.push(d);
        }
    }
    let min_gap = detunings.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    SpectrumReport {
        lines,
        detunings,
        min_gap,
        collisions,
    }
}

/// Mode frequencies from a ratio such as `7:5:4` times a base unit.
pub fn parse_ratio(ratio: &str, base: f64) -> Option<Vec<f64>> {
    let parts: Option<Vec<f64>> = ratio.split(':').map(|p| p.trim().parse::<f64>().ok()).collect();
    let parts = parts?;
    if parts.is_empty() || parts.len() > 3 || parts.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
        return None;
    }
    Some(parts.into_iter().map(|p| p * base).collect())
}
