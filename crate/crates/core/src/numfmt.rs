//! Stable number formatting for reports.

/// Significant digits kept in every emitted float.
pub const SIG_DIGITS: usize = 12;

/// Rounds to [`SIG_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIG_DIGITS - 1, x).parse().unwrap_or(x)
}

/// CSV rendering: shortest exponent form of the rounded value.
pub fn csv_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    format!("{:e}", round_sig(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(
            csv_float(8.0 / std::f64::consts::PI.powi(2)),
            "8.10569469139e-1"
        );
        assert_eq!(csv_float(0.0), "0e0");
        assert_eq!(csv_float(212.0), "2.12e2");
        assert_eq!(round_sig(1.0 / 3.0), 0.333333333333);
    }
}
