use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// The larger of two numbers, computed directly and as "sum them and take
/// away the smaller".
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinMax<T> {
    pub direct: T,
    pub via_sum_rule: T,
}

pub fn polya_min_max<T: Scalar>(a: T, b: T) -> Result<MinMax<T>> {
    if !a.is_finite_value() || !b.is_finite_value() {
        return Err(Error::Range("inputs must be finite".into()));
    }
    let sum = a.clone() + b.clone();
    if !sum.is_finite_value() {
        return Err(Error::Range(format!("{a} + {b} overflows")));
    }
    let direct = T::max_of(a.clone(), b.clone());
    let via_sum_rule = sum - T::min_of(a, b);
    Ok(MinMax {
        direct,
        via_sum_rule,
    })
}

/// True when `a + b` is representable exactly, so the sum-rule route has no
/// rounding at all (the TwoSum error term vanishes).
pub fn sum_is_exact(a: f64, b: f64) -> bool {
    let s = a + b;
    if !s.is_finite() {
        return false;
    }
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    err == 0.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_integers() {
        let r = polya_min_max(1.0, 2.0).unwrap();
        assert_eq!((r.direct, r.via_sum_rule), (2.0, 2.0));
        let r = polya_min_max(3.0, 4.0).unwrap();
        assert_eq!(r.via_sum_rule, 4.0);
        assert_eq!(3.0 + 4.0 - 3.0f64.min(4.0), 4.0);
    }

    #[test]
    fn idempotent_pair() {
        let r = polya_min_max(-7.25, -7.25).unwrap();
        assert_eq!(r.direct, -7.25);
        assert_eq!(r.via_sum_rule, -7.25);
    }

    #[test]
    fn overflow_is_a_range_error() {
        assert!(matches!(
            polya_min_max(f64::MAX, f64::MAX),
            Err(Error::Range(_))
        ));
        assert!(polya_min_max(f64::INFINITY, 0.0).is_err());
    }

    #[test]
    fn inexact_sums_are_flagged() {
        assert!(sum_is_exact(1.5, 2.25));
        assert!(!sum_is_exact(0.1, 0.2));
        // 0.2 + 0.1 − 0.1 is not 0.2 in binary floating point
        let r = polya_min_max(0.2f64, 0.1).unwrap();
        assert_ne!(r.direct.to_bits(), r.via_sum_rule.to_bits());
    }
}
