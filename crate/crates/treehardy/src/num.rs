//! Shared floating-point helpers.
//!
//! Level cardinalities grow geometrically on homogeneous trees, so powers
//! like `c_n^{1/p}` are always evaluated in the log domain.

/// `base^e` for an exact integer base, computed as `exp(e * ln(base))`.
///
/// `e == 0.0` returns exactly 1 (covers the `1/inf` convention).
pub(crate) fn pow_u64(base: u64, e: f64) -> f64 {
    debug_assert!(base >= 1, "level sizes are positive");
    if e == 0.0 || base == 1 {
        1.0
    } else {
        (e * (base as f64).ln()).exp()
    }
}

/// True when `a` and `b` agree within relative tolerance `tol`.
/// Both zero compares equal at any tolerance.
pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// True when `a <= b` up to relative slack `tol`.
pub fn rel_le(a: f64, b: f64, tol: f64) -> bool {
    a <= b + tol * a.abs().max(b.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pow_handles_unit_base_and_zero_exponent() {
        assert_eq!(pow_u64(1, 3.5), 1.0);
        assert_eq!(pow_u64(12, 0.0), 1.0);
        assert!(rel_close(pow_u64(6, 0.5), 6f64.sqrt(), 1e-15));
        assert!(rel_close(pow_u64(12, -0.5), 1.0 / 12f64.sqrt(), 1e-15));
    }

    #[test]
    fn rel_comparisons() {
        assert!(rel_close(0.0, 0.0, 0.0));
        assert!(rel_close(1.0, 1.0 + 1e-13, 1e-12));
        assert!(!rel_close(1.0, 1.0 + 1e-9, 1e-12));
        assert!(rel_le(1.0 + 1e-13, 1.0, 1e-12));
        assert!(!rel_le(1.0 + 1e-9, 1.0, 1e-12));
        assert!(rel_le(0.0, 0.0, 1e-12));
    }
}
