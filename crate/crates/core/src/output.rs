//! Stable text formatting for reports.

/// Significant digits kept in every emitted number.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds to `digits` significant decimal digits.
pub fn round_significant(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    let s = format!("{:.*e}", digits.saturating_sub(1), x);
    let y: f64 = s.parse().expect("formatted float parses");
    if y == 0.0 {
        0.0
    } else {
        y
    }
}

/// Shortest decimal text of `x` rounded to [`SIGNIFICANT_DIGITS`].
pub fn format_number(x: f64) -> String {
    let y = round_significant(x, SIGNIFICANT_DIGITS);
    // normalize -0 so outputs are byte-stable
    if y == 0.0 {
        "0".to_string()
    } else {
        format!("{y}")
    }
}
