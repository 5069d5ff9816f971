//! Valuations: real numbers attached to lattice elements, and the audits
//! that say whether they respect the order and the join structure.
//!
//! Every audit enumerates all relevant pairs; there is no sampling.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::builders::{LabeledLattice, Payload};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::scalar::{compensated_sum, Scalar};

pub const ORDER_PRESERVATION: &str = "order preservation";
pub const DISJOINT_ADDITIVITY: &str = "disjoint additivity";
pub const BOTTOM_ANCHOR: &str = "bottom anchored at zero";
pub const SUM_RULE: &str = "sum rule";
pub const DOMINANCE: &str = "dominance";
pub const CANCELLATIVITY: &str = "cancellativity";
pub const STRICT_CANCELLATIVITY: &str = "strict cancellativity";

/// Element id → value, with the absolute tolerance audits compare against.
#[derive(Debug, Clone, PartialEq)]
pub struct Valuation<T> {
    values: BTreeMap<String, T>,
    tolerance: T,
}

impl<T: Scalar> Valuation<T> {
    pub fn new<I, S>(values: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
    {
        let mut map = BTreeMap::new();
        for (id, v) in values {
            let id = id.into();
            if !v.is_finite_value() {
                return Err(Error::NonFiniteValue(id));
            }
            if map.insert(id.clone(), v).is_some() {
                return Err(Error::DuplicateElement(id));
            }
        }
        Ok(Valuation {
            values: map,
            tolerance: T::default_tolerance(),
        })
    }

    /// Valuation over every element of `lattice`, computed from positions.
    pub fn from_fn(lattice: &Lattice, mut f: impl FnMut(usize) -> T) -> Result<Self> {
        Valuation::new((0..lattice.len()).map(|i| (lattice.id(i).to_string(), f(i))))
    }

    pub fn with_tolerance(mut self, tolerance: T) -> Result<Self> {
        if tolerance < T::zero() {
            return Err(Error::InvalidArgument(
                "tolerance must be non-negative".into(),
            ));
        }
        self.tolerance = tolerance;
        Ok(self)
    }

    pub fn tolerance(&self) -> &T {
        &self.tolerance
    }

    pub fn get(&self, id: &str) -> Option<&T> {
        self.values.get(id)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Entries in id order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &T)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Values aligned with the lattice's element positions.
    pub fn resolve(&self, lattice: &Lattice) -> Result<Vec<T>> {
        (0..lattice.len())
            .map(|i| {
                let id = lattice.id(i);
                self.values
                    .get(id)
                    .cloned()
                    .ok_or_else(|| Error::MissingValue(id.to_string()))
            })
            .collect()
    }

    /// Ids present in the valuation but not in the lattice.
    pub fn extraneous(&self, lattice: &Lattice) -> Vec<String> {
        self.values
            .keys()
            .filter(|k| lattice.index_of(k).is_err())
            .cloned()
            .collect()
    }

    pub fn map_values(&self, mut f: impl FnMut(&str, &T) -> Result<T>) -> Result<Self> {
        let values = self
            .values
            .iter()
            .map(|(k, v)| Ok((k.clone(), f(k, v)?)))
            .collect::<Result<Vec<_>>>()?;
        Valuation::new(values)?.with_tolerance(self.tolerance.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport<T> {
    pub check: String,
    pub max_residual: T,
    /// Ids (or rendered values) where the worst residual occurred.
    pub witness: Vec<String>,
    pub passed: bool,
}

impl<T: Scalar> AuditReport<T> {
    fn new(check: &str, worst: Option<(T, Vec<String>)>, tolerance: &T) -> Self {
        let (max_residual, witness) = worst.unwrap_or((T::zero(), Vec::new()));
        let passed = max_residual <= *tolerance;
        AuditReport {
            check: check.to_string(),
            max_residual,
            witness,
            passed,
        }
    }
}

/// Track the largest residual seen and where it occurred. Ties keep the
/// first occurrence so reports are independent of anything but pair order.
struct Worst<T> {
    best: Option<(T, (usize, usize))>,
}

impl<T: Scalar> Worst<T> {
    fn new() -> Self {
        Worst { best: None }
    }

    fn offer(&mut self, residual: T, at: (usize, usize)) {
        match &self.best {
            Some((r, _)) if residual <= *r => {}
            _ => self.best = Some((residual, at)),
        }
    }

    fn into_witness(self, lattice: &Lattice) -> Option<(T, Vec<String>)> {
        self.best.map(|(r, (a, b))| {
            let witness = if r.is_zero() {
                Vec::new()
            } else {
                vec![lattice.id(a).to_string(), lattice.id(b).to_string()]
            };
            (r, witness)
        })
    }
}

/// Largest `max(0, v(x) − v(y))` over comparable pairs `x ≤ y`.
pub fn check_order_preserving<T: Scalar>(
    lattice: &Lattice,
    valuation: &Valuation<T>,
) -> Result<AuditReport<T>> {
    let v = valuation.resolve(lattice)?;
    let relation = lattice.poset().relation();
    let mut worst = Worst::new();
    for x in 0..lattice.len() {
        for y in relation.successors(x).filter(|&y| y != x) {
            let excess = v[x].clone() - v[y].clone();
            let residual = if excess > T::zero() {
                excess
            } else {
                T::zero()
            };
            worst.offer(residual, (x, y));
        }
    }
    Ok(AuditReport::new(
        ORDER_PRESERVATION,
        worst.into_witness(lattice),
        valuation.tolerance(),
    ))
}

/// Pair audit plus the separate `u(⊥) = 0` anchor check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisjointAudit<T> {
    pub additivity: AuditReport<T>,
    pub bottom: AuditReport<T>,
}

impl<T> DisjointAudit<T> {
    pub fn passed(&self) -> bool {
        self.additivity.passed && self.bottom.passed
    }
}

/// `|u(x ∨ y) − u(x) − u(y)|` over pairs with `x ∧ y = ⊥`.
pub fn check_disjoint_additivity<T: Scalar>(
    lattice: &Lattice,
    valuation: &Valuation<T>,
) -> Result<DisjointAudit<T>> {
    let bottom = lattice.bottom().ok_or(Error::NoBottom)?;
    let u = valuation.resolve(lattice)?;
    let n = lattice.len();
    let mut worst = Worst::new();
    for x in 0..n {
        for y in x..n {
            if lattice.meet(x, y) != bottom {
                continue;
            }
            let residual = (u[lattice.join(x, y)].clone() - (u[x].clone() + u[y].clone())).abs();
            worst.offer(residual, (x, y));
        }
    }
    let anchor = u[bottom].abs();
    let anchor_witness = if anchor.is_zero() {
        Vec::new()
    } else {
        vec![lattice.id(bottom).to_string()]
    };
    Ok(DisjointAudit {
        additivity: AuditReport::new(
            DISJOINT_ADDITIVITY,
            worst.into_witness(lattice),
            valuation.tolerance(),
        ),
        bottom: AuditReport::new(
            BOTTOM_ANCHOR,
            Some((anchor, anchor_witness)),
            valuation.tolerance(),
        ),
    })
}

/// `|u(x ∨ y) + u(x ∧ y) − u(x) − u(y)|` for one pair of positions.
///
/// Written so that swapping `x` and `y` gives a bit-identical result.
pub fn sum_rule_residual<T: Scalar>(lattice: &Lattice, u: &[T], x: usize, y: usize) -> T {
    let lhs = u[lattice.join(x, y)].clone() + u[lattice.meet(x, y)].clone();
    let rhs = u[x].clone() + u[y].clone();
    (lhs - rhs).abs()
}

/// Largest inclusion-exclusion defect over all unordered pairs.
pub fn audit_sum_rule<T: Scalar>(
    lattice: &Lattice,
    valuation: &Valuation<T>,
) -> Result<AuditReport<T>> {
    let u = valuation.resolve(lattice)?;
    let n = lattice.len();
    let mut worst = Worst::new();
    for x in 0..n {
        for y in x..n {
            worst.offer(sum_rule_residual(lattice, &u, x, y), (x, y));
        }
    }
    Ok(AuditReport::new(
        SUM_RULE,
        worst.into_witness(lattice),
        valuation.tolerance(),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CancellativityReport<T> {
    /// `a ⊕ b ≥ max(a, b)`: combining never lowers a value.
    pub dominance: AuditReport<T>,
    /// `x ≤ y ⇒ x ⊕ z ≤ y ⊕ z`.
    pub weak: AuditReport<T>,
    /// `x < y ⇒ x ⊕ z < y ⊕ z`; ties count as violations.
    pub strict: AuditReport<T>,
}

impl<T> CancellativityReport<T> {
    pub fn passed(&self) -> bool {
        self.dominance.passed && self.weak.passed && self.strict.passed
    }
}

/// Check sampled value triples against the cancellativity property of a
/// combination operator. Each triple is sorted before use.
pub fn check_cancellativity<T, F>(
    op: F,
    triples: &[(T, T, T)],
    tolerance: T,
) -> CancellativityReport<T>
where
    T: Scalar,
    F: Fn(T, T) -> T,
{
    let render = |vals: &[&T]| vals.iter().map(|v| v.to_string()).collect::<Vec<_>>();
    let mut dominance: Option<(T, Vec<String>)> = None;
    let mut weak: Option<(T, Vec<String>)> = None;
    let mut strict_violation: Option<(T, Vec<String>)> = None;
    let keep = |slot: &mut Option<(T, Vec<String>)>, r: T, w: Vec<String>| match slot {
        Some((best, _)) if r <= *best => {}
        _ => *slot = Some((r, w)),
    };
    for t in triples {
        let mut v = [t.0.clone(), t.1.clone(), t.2.clone()];
        v.sort_by(|a, b| a.partial_cmp(b).expect("comparable values"));
        let [x, y, z] = v;
        let xz = op(x.clone(), z.clone());
        let yz = op(y.clone(), z.clone());
        for (a, b, ab) in [(&x, &z, &xz), (&y, &z, &yz)] {
            let top = T::max_of(a.clone(), b.clone());
            let short = top - ab.clone();
            keep(&mut dominance, T::max_of(short, T::zero()), render(&[a, b]));
        }
        let gap = xz.clone() - yz.clone();
        keep(
            &mut weak,
            T::max_of(gap.clone(), T::zero()),
            render(&[&x, &y, &z]),
        );
        if x < y && xz >= yz && strict_violation.is_none() {
            strict_violation = Some((gap, render(&[&x, &y, &z])));
        }
    }
    let clean = |slot: Option<(T, Vec<String>)>| {
        slot.map(|(r, w)| if r.is_zero() { (r, Vec::new()) } else { (r, w) })
    };
    let strict = match strict_violation {
        None => AuditReport::new(STRICT_CANCELLATIVITY, None, &tolerance),
        Some((gap, witness)) => AuditReport {
            check: STRICT_CANCELLATIVITY.to_string(),
            max_residual: T::max_of(gap, T::zero()),
            witness,
            passed: false,
        },
    };
    CancellativityReport {
        dominance: AuditReport::new(DOMINANCE, clean(dominance), &tolerance),
        weak: AuditReport::new(CANCELLATIVITY, clean(weak), &tolerance),
        strict,
    }
}

/// `8 · ε · Σ|aᵢ|`, the rounding budget for auditing an additive extension.
pub fn additive_extension_bound<T: Scalar>(atom_values: &[T]) -> T {
    let total = compensated_sum(atom_values.iter().map(|v| v.abs()));
    let eight =
        T::one() + T::one() + T::one() + T::one() + T::one() + T::one() + T::one() + T::one();
    eight * T::epsilon() * total
}

/// Extend non-negative atom values additively over a subset or statement
/// lattice: `u(S) = Σ_{a ∈ S} u(a)`, with `u(⊥) = 0`.
///
/// The returned valuation's tolerance is [`additive_extension_bound`] (or
/// the scalar's default tolerance, whichever is larger).
pub fn extend_from_atoms<T: Scalar>(
    lattice: &LabeledLattice,
    atom_values: &BTreeMap<String, T>,
) -> Result<Valuation<T>> {
    if lattice.atoms.is_empty() {
        return Err(Error::InvalidArgument(
            "additive extension needs a subset or statement lattice".into(),
        ));
    }
    if let Some(unknown) = atom_values.keys().find(|k| !lattice.atoms.contains(k)) {
        return Err(Error::UnknownElement(unknown.clone()));
    }
    let per_atom = lattice
        .atoms
        .iter()
        .map(|a| {
            let v = atom_values
                .get(a)
                .cloned()
                .ok_or_else(|| Error::MissingValue(a.clone()))?;
            if !v.is_finite_value() {
                return Err(Error::NonFiniteValue(a.clone()));
            }
            if v < T::zero() {
                return Err(Error::InvalidArgument(format!(
                    "atom `{a}` has negative value {v}"
                )));
            }
            Ok(v)
        })
        .collect::<Result<Vec<T>>>()?;

    let values = (0..lattice.len())
        .map(|i| {
            let mask = match &lattice.payload[i] {
                Payload::Subset(m) | Payload::Statement(m) => *m,
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "payload {other:?} is not a subset"
                    )))
                }
            };
            let total = compensated_sum(
                per_atom
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask >> k & 1 == 1)
                    .map(|(_, v)| v.clone()),
            );
            Ok((lattice.lattice.id(i).to_string(), total))
        })
        .collect::<Result<Vec<_>>>()?;
    let bound = additive_extension_bound(&per_atom);
    let tolerance = T::max_of(bound, T::default_tolerance());
    Valuation::new(values)?.with_tolerance(tolerance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{boolean_lattice, chain, divisor_lattice};
    use crate::Rational;

    fn cardinality(lat: &LabeledLattice) -> Valuation<f64> {
        Valuation::from_fn(&lat.lattice, |i| (i as u32).count_ones() as f64).unwrap()
    }

    #[test]
    fn cardinality_is_monotone() {
        let b = boolean_lattice(&["A", "B", "C"]).unwrap();
        let r = check_order_preserving(&b.lattice, &cardinality(&b)).unwrap();
        assert!(r.passed);
        assert_eq!(r.max_residual, 0.0);
        assert!(r.witness.is_empty());
    }

    #[test]
    fn non_monotone_chain_is_caught() {
        let c = chain(3).unwrap();
        let v = Valuation::new([("1", 1.0), ("2", 0.0), ("3", 2.0)]).unwrap();
        let r = check_order_preserving(&c.lattice, &v).unwrap();
        assert!(!r.passed);
        assert_eq!(r.max_residual, 1.0);
        assert_eq!(r.witness, vec!["1", "2"]);
    }

    #[test]
    fn log_divisor_is_monotone() {
        let d = divisor_lattice(12).unwrap();
        let v = Valuation::from_fn(&d.lattice, |i| d.lattice.id(i).parse::<f64>().unwrap().ln())
            .unwrap();
        assert!(check_order_preserving(&d.lattice, &v).unwrap().passed);
        let sum = audit_sum_rule(&d.lattice, &v).unwrap();
        assert!(sum.passed, "{sum:?}");
        assert!(sum.max_residual <= 1e-12);
    }

    #[test]
    fn disjoint_singletons_add() {
        let b = boolean_lattice(&["A", "B", "C"]).unwrap();
        let u = cardinality(&b);
        let r = check_disjoint_additivity(&b.lattice, &u).unwrap();
        assert!(r.passed());
        assert_eq!(r.bottom.max_residual, 0.0);
        let ab = b.lattice.join_ids("{A}", "{B}").unwrap();
        assert_eq!(u.get(ab), Some(&2.0));
    }

    #[test]
    fn bottom_anchor_reported_separately() {
        let b = boolean_lattice(&["A", "B"]).unwrap();
        let shifted =
            Valuation::from_fn(&b.lattice, |i| (i as u32).count_ones() as f64 + 1.0).unwrap();
        let r = check_disjoint_additivity(&b.lattice, &shifted).unwrap();
        assert!(!r.bottom.passed);
        assert_eq!(r.bottom.witness, vec!["∅"]);
        assert!(!r.additivity.passed);
        // shift by a constant still satisfies inclusion-exclusion
        assert!(audit_sum_rule(&b.lattice, &shifted).unwrap().passed);
    }

    #[test]
    fn sum_rule_on_overlapping_sets() {
        let b = boolean_lattice(&["A", "B", "C"]).unwrap();
        let u = cardinality(&b);
        let l = &b.lattice;
        let (x, y) = (l.index_of("{A,B}").unwrap(), l.index_of("{B,C}").unwrap());
        assert_eq!(u.get(l.id(l.join(x, y))), Some(&3.0));
        assert_eq!(2.0 + 2.0 - u.get(l.id(l.meet(x, y))).unwrap(), 3.0);
        let r = audit_sum_rule(l, &u).unwrap();
        assert_eq!(r.max_residual, 0.0);
    }

    #[test]
    fn chain_valuation_is_polya_exact() {
        let c = chain(6).unwrap();
        let v = Valuation::from_fn(&c.lattice, |i| (i as f64).powi(3) - 0.5).unwrap();
        assert_eq!(audit_sum_rule(&c.lattice, &v).unwrap().max_residual, 0.0);
    }

    #[test]
    fn missing_value_is_an_error() {
        let c = chain(2).unwrap();
        let v = Valuation::new([("1", 0.0)]).unwrap();
        assert!(matches!(audit_sum_rule(&c.lattice, &v), Err(Error::MissingValue(s)) if s == "2"));
        assert!(Valuation::new([("1", f64::NAN)]).is_err());
    }

    #[test]
    fn cancellativity_of_standard_operators() {
        let triples: Vec<(f64, f64, f64)> = (0..5)
            .flat_map(|i| {
                (i..5).flat_map(move |j| (j..5).map(move |k| (i as f64, j as f64, k as f64)))
            })
            .collect();
        let add = check_cancellativity(|a, b| a + b, &triples, 0.0);
        assert!(add.passed());

        let max = check_cancellativity(f64::max, &triples, 0.0);
        assert!(max.dominance.passed);
        assert!(max.weak.passed);
        assert!(!max.strict.passed);
        assert_eq!(max.strict.max_residual, 0.0);

        let min = check_cancellativity(f64::min, &triples, 0.0);
        assert!(!min.dominance.passed);
    }

    #[test]
    fn atom_extension() {
        let b = boolean_lattice(&["A", "B", "C"]).unwrap();
        let atoms: BTreeMap<String, f64> = [("A", 0.5), ("B", 0.3), ("C", 0.2)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        let u = extend_from_atoms(&b, &atoms).unwrap();
        assert!((u.get("{A,B,C}").unwrap() - 1.0).abs() <= 1e-15);
        assert_eq!(u.get("∅"), Some(&0.0));
        assert!(audit_sum_rule(&b.lattice, &u).unwrap().passed);

        let pencils = boolean_lattice(&["pair", "single"]).unwrap();
        let atoms: BTreeMap<String, f64> =
            [("pair".to_string(), 2.0), ("single".to_string(), 1.0)].into();
        let u = extend_from_atoms(&pencils, &atoms).unwrap();
        assert_eq!(u.get("{pair,single}"), Some(&3.0));
    }

    #[test]
    fn atom_extension_errors() {
        let b = boolean_lattice(&["A", "B"]).unwrap();
        let missing: BTreeMap<String, f64> = [("A".to_string(), 1.0)].into();
        assert!(matches!(extend_from_atoms(&b, &missing), Err(Error::MissingValue(s)) if s == "B"));
        let negative: BTreeMap<String, f64> =
            [("A".to_string(), 1.0), ("B".to_string(), -1.0)].into();
        assert!(extend_from_atoms(&b, &negative).is_err());
        let extra: BTreeMap<String, f64> = [
            ("A".to_string(), 1.0),
            ("B".to_string(), 1.0),
            ("Q".to_string(), 1.0),
        ]
        .into();
        assert!(matches!(
            extend_from_atoms(&b, &extra),
            Err(Error::UnknownElement(_))
        ));
    }

    #[test]
    fn rational_audit_is_exact() {
        let b = boolean_lattice(&["A", "B", "C"]).unwrap();
        let atoms: BTreeMap<String, Rational> = [
            ("A".to_string(), Rational::new(1, 3)),
            ("B".to_string(), Rational::new(1, 7)),
            ("C".to_string(), Rational::new(11, 21)),
        ]
        .into();
        let u = extend_from_atoms(&b, &atoms).unwrap();
        assert_eq!(*u.tolerance(), Rational::from_integer(0));
        assert_eq!(u.get("{A,B,C}"), Some(&Rational::from_integer(1)));
        let r = audit_sum_rule(&b.lattice, &u).unwrap();
        assert!(r.passed);
        assert_eq!(r.max_residual, Rational::from_integer(0));
    }
}
