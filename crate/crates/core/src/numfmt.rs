//! Locale-free float formatting used by every text artifact.

/// 17 significant digits in scientific notation, enough to round-trip an f64.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}
