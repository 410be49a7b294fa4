//! Number formatting shared by every text format the crate emits.

use crate::scalar::Real;

/// 17 significant digits in scientific notation: enough to reconstruct the
/// exact `f64` on re-parse, and stable byte-for-byte across re-serialization.
pub fn fmt_f64(v: f64) -> String {
    format!("{:.16e}", v)
}

pub fn fmt_real<F: Real>(v: F) -> String {
    fmt_f64(v.as_f64())
}

/// Fixed six fractional digits, used for figure coordinates.
pub fn fmt_coord(v: f64) -> String {
    format!("{:.6}", v)
}

/// Tick label rounded to four significant digits.
pub fn fmt_sig4(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let mag = v.abs().log10().floor() as i32;
    let scale = 10f64.powi(mag - 3);
    let rounded = (v / scale).round() * scale;
    if (-3..6).contains(&mag) {
        let decimals = (3 - mag).max(0) as usize;
        format!("{:.*}", decimals, rounded)
    } else {
        format!("{:.3e}", rounded)
    }
}
