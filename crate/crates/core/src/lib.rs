//! Holistic quantum computational semantics for an epistemic logic.

pub mod cli;
pub mod error;
pub mod gatelib;
pub mod holistic;
pub mod judgments;
pub mod lang;
pub mod qlin;
pub mod random;

pub use error::{HoloqError, Result};

/// Formats a probability with 12 significant digits, trailing zeros trimmed.
pub fn fmt_probability(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let magnitude = x.abs().log10().floor() as i32;
    let s = if (-5..12).contains(&magnitude) {
        let decimals = (11 - magnitude).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        return format!("{x:.11e}");
    };
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}
