use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `P(A or B) = P(A) + P(B) − P(A and B)`, after checking the three inputs
/// can come from one probability assignment.
pub fn probability_sum_rule<T: Scalar>(p_a: T, p_b: T, p_a_and_b: T) -> Result<T> {
    for (name, p) in [("P(A)", &p_a), ("P(B)", &p_b), ("P(A and B)", &p_a_and_b)] {
        if !p.is_finite_value() || *p < T::zero() || *p > T::one() {
            return Err(Error::Coherence(format!("{name} = {p} is not in [0, 1]")));
        }
    }
    let smaller = T::min_of(p_a.clone(), p_b.clone());
    if p_a_and_b > smaller {
        return Err(Error::Coherence(format!(
            "P(A and B) = {p_a_and_b} exceeds min(P(A), P(B)) = {smaller}"
        )));
    }
    let union = p_a + p_b - p_a_and_b;
    if union > T::one() {
        return Err(Error::Coherence(format!("P(A or B) = {union} exceeds 1")));
    }
    Ok(union)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    #[test]
    fn independent_fair_events() {
        assert_eq!(probability_sum_rule(0.5, 0.5, 0.25).unwrap(), 0.75);
    }

    #[test]
    fn impossible_event_adds_nothing() {
        assert_eq!(probability_sum_rule(0.3, 0.0, 0.0).unwrap(), 0.3);
    }

    #[test]
    fn incoherent_inputs() {
        let err = probability_sum_rule(0.6, 0.6, 0.1).unwrap_err();
        assert!(matches!(err, Error::Coherence(ref m) if m.contains("exceeds 1")));
        assert!(
            matches!(probability_sum_rule(0.2, 0.5, 0.3), Err(Error::Coherence(m)) if m.contains("min"))
        );
        assert!(probability_sum_rule(1.2, 0.0, 0.0).is_err());
        assert!(probability_sum_rule(f64::NAN, 0.0, 0.0).is_err());
    }

    #[test]
    fn exact_rationals() {
        let p = |n, d| Rational::new(n, d);
        assert_eq!(
            probability_sum_rule(p(1, 3), p(1, 4), p(1, 12)).unwrap(),
            p(1, 2)
        );
    }
}
