//! Finite partially ordered sets.
//!
//! Elements are opaque string ids; the order is a dense [`Relation`] indexed
//! by element position. Posets are immutable once built.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::law::LawReport;
use crate::relation::{get_bit, iter_bits, words_for, Relation};

/// Largest poset the dense representation is meant for.
pub const MAX_ELEMENTS: usize = 4096;

pub const REFLEXIVITY: &str = "reflexivity";
pub const ANTISYMMETRY: &str = "antisymmetry";
pub const TRANSITIVITY: &str = "transitivity";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparability {
    /// `x ≤ y` and `x ≠ y`
    Less,
    /// `y ≤ x` and `x ≠ y`
    Greater,
    Equal,
    Incomparable,
}

/// Result of a supremum or infimum query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound<T> {
    Unique(T),
    /// The pair has no common upper (or lower) bound at all.
    Missing,
    /// Two or more minimal upper (or maximal lower) bounds, in element order.
    Ambiguous(Vec<T>),
}

impl<T> Bound<T> {
    pub fn unique(self) -> Option<T> {
        match self {
            Bound::Unique(t) => Some(t),
            _ => None,
        }
    }

    pub fn map<U>(self, mut f: impl FnMut(T) -> U) -> Bound<U> {
        match self {
            Bound::Unique(t) => Bound::Unique(f(t)),
            Bound::Missing => Bound::Missing,
            Bound::Ambiguous(v) => Bound::Ambiguous(v.into_iter().map(f).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset {
    elements: Vec<String>,
    index: HashMap<String, usize>,
    /// `leq.get(i, j)` iff element i ≤ element j; row i is the up-set of i.
    leq: Relation,
    /// Transpose of `leq`; row i is the down-set of i.
    geq: Relation,
}

fn index_elements(elements: &[String]) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::with_capacity(elements.len());
    for (i, e) in elements.iter().enumerate() {
        if e.is_empty() {
            return Err(Error::EmptyElementId);
        }
        if index.insert(e.clone(), i).is_some() {
            return Err(Error::DuplicateElement(e.clone()));
        }
    }
    Ok(index)
}

/// Check reflexivity, antisymmetry and transitivity of `leq` over `elements`.
///
/// Always returns three reports in that order. Failing reports carry the
/// first counterexample in element order: `(x)`, `(x, y)` or `(x, y, z)`.
pub fn check_poset_axioms(elements: &[String], leq: &Relation) -> Result<Vec<LawReport>> {
    index_elements(elements)?;
    if leq.len() != elements.len() {
        return Err(Error::TableShape {
            elements: elements.len(),
        });
    }
    let n = elements.len();
    let id = |i: usize| elements[i].clone();

    let reflexive = (0..n).find(|&i| !leq.get(i, i)).map(|i| vec![id(i)]);

    let antisymmetric = (0..n)
        .flat_map(|i| {
            leq.successors(i)
                .filter(move |&j| j > i)
                .map(move |j| (i, j))
        })
        .find(|&(i, j)| leq.get(j, i))
        .map(|(i, j)| vec![id(i), id(j)]);

    let mut transitive = None;
    'outer: for x in 0..n {
        let up_x = leq.row(x);
        for y in leq.successors(x) {
            if y == x {
                continue;
            }
            let missing = leq.row(y).iter().zip(up_x).position(|(a, b)| a & !b != 0);
            if let Some(w) = missing {
                let bits = leq.row(y)[w] & !up_x[w];
                let z = w * 64 + bits.trailing_zeros() as usize;
                transitive = Some(vec![id(x), id(y), id(z)]);
                break 'outer;
            }
        }
    }

    Ok(vec![
        LawReport::from_witness(REFLEXIVITY, reflexive),
        LawReport::from_witness(ANTISYMMETRY, antisymmetric),
        LawReport::from_witness(TRANSITIVITY, transitive),
    ])
}

/// Smallest reflexive-transitive relation containing the cover pairs `(a, b)`,
/// read as `a < b`.
pub fn transitive_closure(elements: &[String], covers: &[(String, String)]) -> Result<Relation> {
    let index = index_elements(elements)?;
    let n = elements.len();
    let lookup = |s: &String| {
        index
            .get(s)
            .copied()
            .ok_or_else(|| Error::UnknownElement(s.clone()))
    };
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (a, b) in covers {
        let (a, b) = (lookup(a)?, lookup(b)?);
        succ[a].push(b);
    }
    for s in &mut succ {
        s.sort_unstable();
        s.dedup();
    }

    let order = topological_order(&succ)
        .map_err(|cycle| Error::Cycle(cycle.into_iter().map(|i| elements[i].clone()).collect()))?;

    let mut rel = Relation::identity(n);
    for &v in order.iter().rev() {
        for &w in &succ[v] {
            rel.or_row_into(v, w);
        }
    }
    Ok(rel)
}

/// Kahn's algorithm; on failure returns one cycle as a closed walk
/// `v0, v1, ..., v0`.
fn topological_order(succ: &[Vec<usize>]) -> std::result::Result<Vec<usize>, Vec<usize>> {
    let n = succ.len();
    let mut indeg = vec![0usize; n];
    for s in succ {
        for &w in s {
            indeg[w] += 1;
        }
    }
    let mut stack: Vec<usize> = (0..n).rev().filter(|&v| indeg[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = stack.pop() {
        order.push(v);
        for &w in succ[v].iter().rev() {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                stack.push(w);
            }
        }
    }
    if order.len() == n {
        return Ok(order);
    }
    // Every vertex left with positive in-degree lies on or downstream of a
    // cycle; walk predecessors with positive in-degree until one repeats.
    let mut pred: Vec<Option<usize>> = vec![None; n];
    for (v, s) in succ.iter().enumerate() {
        if indeg[v] == 0 {
            continue;
        }
        for &w in s {
            if indeg[w] > 0 && pred[w].is_none() {
                pred[w] = Some(v);
            }
        }
    }
    let start = (0..n).find(|&v| indeg[v] > 0).expect("cycle exists");
    let mut seen = vec![false; n];
    let mut v = start;
    while !seen[v] {
        seen[v] = true;
        v = pred[v].expect("vertex on a cycle has a predecessor");
    }
    let mut cycle = vec![v];
    let mut u = pred[v].unwrap();
    while u != v {
        cycle.push(u);
        u = pred[u].unwrap();
    }
    cycle.push(v);
    cycle.reverse();
    Err(cycle)
}

impl Poset {
    /// Validate the order axioms and build the poset.
    pub fn new(elements: Vec<String>, leq: Relation) -> Result<Self> {
        if elements.len() > MAX_ELEMENTS {
            return Err(Error::Capacity {
                what: "poset elements",
                limit: MAX_ELEMENTS,
                requested: elements.len(),
            });
        }
        let reports = check_poset_axioms(&elements, &leq)?;
        if reports.iter().any(|r| !r.passed) {
            return Err(Error::AxiomViolation(reports));
        }
        let index = index_elements(&elements)?;
        let geq = leq.transpose();
        Ok(Poset {
            elements,
            index,
            leq,
            geq,
        })
    }

    /// Build from Hasse-style cover pairs `(a, b)` meaning `a < b`.
    pub fn from_covers(elements: Vec<String>, covers: &[(String, String)]) -> Result<Self> {
        let leq = transitive_closure(&elements, covers)?;
        Poset::new(elements, leq)
    }

    /// Build from an order predicate over element positions.
    pub fn from_order_fn(
        elements: Vec<String>,
        leq: impl FnMut(usize, usize) -> bool,
    ) -> Result<Self> {
        let n = elements.len();
        Poset::new(elements, Relation::from_fn(n, leq))
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn id(&self, i: usize) -> &str {
        &self.elements[i]
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownElement(id.to_string()))
    }

    pub fn relation(&self) -> &Relation {
        &self.leq
    }

    #[inline]
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq.get(i, j)
    }

    pub(crate) fn up_set(&self, i: usize) -> &[u64] {
        self.leq.row(i)
    }

    pub(crate) fn down_set(&self, i: usize) -> &[u64] {
        self.geq.row(i)
    }

    /// Number of elements `≤ i`, including `i`.
    pub(crate) fn down_count(&self, i: usize) -> usize {
        self.geq.row_count(i)
    }

    pub fn compare(&self, i: usize, j: usize) -> Comparability {
        match (self.leq(i, j), self.leq(j, i)) {
            (true, true) => Comparability::Equal,
            (true, false) => Comparability::Less,
            (false, true) => Comparability::Greater,
            (false, false) => Comparability::Incomparable,
        }
    }

    pub fn comparability(&self, x: &str, y: &str) -> Result<Comparability> {
        Ok(self.compare(self.index_of(x)?, self.index_of(y)?))
    }

    /// Cover pairs `(i, j)`: `i < j` with nothing strictly between, ordered
    /// by `i` then `j`.
    pub fn hasse_reduction(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let words = words_for(n);
        let mut covers = Vec::new();
        let mut dominated = vec![0u64; words];
        for i in 0..n {
            // Union of the strict up-sets of everything strictly above i.
            dominated.iter_mut().for_each(|w| *w = 0);
            for k in self.leq.successors(i).filter(|&k| k != i) {
                for (wi, (acc, &w)) in dominated.iter_mut().zip(self.up_set(k)).enumerate() {
                    let own = if k / 64 == wi { 1u64 << (k % 64) } else { 0 };
                    *acc |= w & !own;
                }
            }
            covers.extend(
                self.leq
                    .successors(i)
                    .filter(|&k| k != i && !get_bit(&dominated, k))
                    .map(|k| (i, k)),
            );
        }
        covers
    }

    /// [`hasse_reduction`](Self::hasse_reduction) with element ids.
    pub fn cover_ids(&self) -> Vec<(String, String)> {
        self.hasse_reduction()
            .into_iter()
            .map(|(a, b)| (self.elements[a].clone(), self.elements[b].clone()))
            .collect()
    }

    /// Minimal elements of the set given as a bitset.
    fn minimal_of(&self, set: &[u64]) -> Vec<usize> {
        iter_bits(set)
            .filter(|&u| iter_bits(set).all(|v| v == u || !self.leq(v, u)))
            .collect()
    }

    fn maximal_of(&self, set: &[u64]) -> Vec<usize> {
        iter_bits(set)
            .filter(|&u| iter_bits(set).all(|v| v == u || !self.leq(u, v)))
            .collect()
    }

    pub fn lub_index(&self, i: usize, j: usize) -> Bound<usize> {
        let upper: Vec<u64> = self
            .up_set(i)
            .iter()
            .zip(self.up_set(j))
            .map(|(a, b)| a & b)
            .collect();
        bound_from_extremes(self.minimal_of(&upper))
    }

    pub fn glb_index(&self, i: usize, j: usize) -> Bound<usize> {
        let lower: Vec<u64> = self
            .down_set(i)
            .iter()
            .zip(self.down_set(j))
            .map(|(a, b)| a & b)
            .collect();
        bound_from_extremes(self.maximal_of(&lower))
    }

    pub fn least_upper_bound(&self, x: &str, y: &str) -> Result<Bound<String>> {
        let b = self.lub_index(self.index_of(x)?, self.index_of(y)?);
        Ok(b.map(|k| self.elements[k].clone()))
    }

    pub fn greatest_lower_bound(&self, x: &str, y: &str) -> Result<Bound<String>> {
        let b = self.glb_index(self.index_of(x)?, self.index_of(y)?);
        Ok(b.map(|k| self.elements[k].clone()))
    }

    /// Element below every other element, if any.
    pub fn bottom(&self) -> Option<usize> {
        (0..self.len()).find(|&i| self.leq.row_count(i) == self.len())
    }

    pub fn top(&self) -> Option<usize> {
        (0..self.len()).find(|&i| self.geq.row_count(i) == self.len())
    }
}

fn bound_from_extremes(mut extremes: Vec<usize>) -> Bound<usize> {
    match extremes.len() {
        0 => Bound::Missing,
        1 => Bound::Unique(extremes.pop().unwrap()),
        _ => Bound::Ambiguous(extremes),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn pairs(p: &[(&str, &str)]) -> Vec<(String, String)> {
        p.iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    }

    fn chain3() -> Poset {
        Poset::from_covers(ids(&["1", "2", "3"]), &pairs(&[("1", "2"), ("2", "3")])).unwrap()
    }

    /// x, y both below p and q, p ∥ q: a pair with two minimal upper bounds.
    fn bowtie() -> Poset {
        Poset::from_covers(
            ids(&["x", "y", "p", "q"]),
            &pairs(&[("x", "p"), ("x", "q"), ("y", "p"), ("y", "q")]),
        )
        .unwrap()
    }

    #[test]
    fn singleton_satisfies_axioms() {
        let reports = check_poset_axioms(&ids(&["x"]), &Relation::identity(1)).unwrap();
        assert_eq!(reports.len(), 3);
        assert!(reports.iter().all(|r| r.passed));
    }

    #[test]
    fn antisymmetry_violation_has_pair_witness() {
        let rel = Relation::from_fn(2, |_, _| true);
        let reports = check_poset_axioms(&ids(&["x", "y"]), &rel).unwrap();
        assert!(reports[0].passed);
        assert!(!reports[1].passed);
        assert_eq!(reports[1].witness, ids(&["x", "y"]));
    }

    #[test]
    fn reflexivity_and_transitivity_witnesses() {
        // a ≤ b, b ≤ c but not a ≤ c, and c not reflexive
        let rel = Relation::from_fn(3, |i, j| {
            (i == j && i != 2) || (i, j) == (0, 1) || (i, j) == (1, 2)
        });
        let reports = check_poset_axioms(&ids(&["a", "b", "c"]), &rel).unwrap();
        assert_eq!(reports[0].witness, ids(&["c"]));
        assert!(reports[1].passed);
        assert_eq!(reports[2].witness, ids(&["a", "b", "c"]));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let err = check_poset_axioms(&ids(&["a", "a"]), &Relation::identity(2)).unwrap_err();
        assert!(matches!(err, Error::DuplicateElement(ref s) if s == "a"));
        assert!(matches!(
            check_poset_axioms(&ids(&["a", ""]), &Relation::identity(2)),
            Err(Error::EmptyElementId)
        ));
    }

    #[test]
    fn subset_inclusion_on_two_atoms_is_a_poset() {
        // masks 0..4, brute force over all pairs and triples
        let rel = Relation::from_fn(4, |i, j| i & !j == 0);
        let reports = check_poset_axioms(&ids(&["{}", "{A}", "{B}", "{A,B}"]), &rel).unwrap();
        assert!(reports.iter().all(|r| r.passed));
    }

    #[test]
    fn closure_of_a_path() {
        let rel =
            transitive_closure(&ids(&["a", "b", "c"]), &pairs(&[("a", "b"), ("b", "c")])).unwrap();
        assert!(rel.get(0, 2));
        assert!(!rel.get(2, 0));
        assert_eq!(rel.count(), 6);
    }

    #[test]
    fn closure_of_no_edges_is_identity() {
        let rel = transitive_closure(&ids(&["a", "b"]), &[]).unwrap();
        assert_eq!(rel, Relation::identity(2));
    }

    #[test]
    fn closure_reports_cycle() {
        let err = transitive_closure(
            &ids(&["a", "b", "c"]),
            &pairs(&[("a", "b"), ("b", "c"), ("c", "b")]),
        )
        .unwrap_err();
        match err {
            Error::Cycle(c) => {
                assert_eq!(c.first(), c.last());
                assert!(c.contains(&"b".to_string()) && c.contains(&"c".to_string()));
                assert!(!c.contains(&"a".to_string()));
            }
            other => panic!("expected cycle, got {other:?}"),
        }
        let err = transitive_closure(&ids(&["a"]), &pairs(&[("a", "a")])).unwrap_err();
        assert!(matches!(err, Error::Cycle(c) if c == ids(&["a", "a"])));
    }

    #[test]
    fn closure_unknown_endpoint() {
        let err = transitive_closure(&ids(&["a"]), &pairs(&[("a", "z")])).unwrap_err();
        assert!(matches!(err, Error::UnknownElement(s) if s == "z"));
    }

    #[test]
    fn hasse_of_chain_drops_implied_edge() {
        let p = chain3();
        assert_eq!(p.cover_ids(), pairs(&[("1", "2"), ("2", "3")]));
    }

    #[test]
    fn hasse_of_antichain_is_empty() {
        let p = Poset::from_covers(ids(&["x", "y"]), &[]).unwrap();
        assert!(p.hasse_reduction().is_empty());
    }

    #[test]
    fn comparability_verdicts() {
        let p = chain3();
        assert_eq!(p.comparability("1", "2").unwrap(), Comparability::Less);
        assert_eq!(p.comparability("3", "2").unwrap(), Comparability::Greater);
        assert_eq!(p.comparability("2", "2").unwrap(), Comparability::Equal);
        let b = bowtie();
        assert_eq!(
            b.comparability("p", "q").unwrap(),
            Comparability::Incomparable
        );
        assert!(matches!(
            p.comparability("1", "9"),
            Err(Error::UnknownElement(_))
        ));
    }

    #[test]
    fn bounds_on_chain() {
        let p = chain3();
        assert_eq!(
            p.least_upper_bound("1", "2").unwrap(),
            Bound::Unique("2".into())
        );
        assert_eq!(
            p.greatest_lower_bound("2", "3").unwrap(),
            Bound::Unique("2".into())
        );
    }

    #[test]
    fn bowtie_has_ambiguous_bounds() {
        let b = bowtie();
        assert_eq!(
            b.least_upper_bound("x", "y").unwrap(),
            Bound::Ambiguous(ids(&["p", "q"]))
        );
        assert_eq!(
            b.greatest_lower_bound("p", "q").unwrap(),
            Bound::Ambiguous(ids(&["x", "y"]))
        );
    }

    #[test]
    fn antichain_has_missing_bounds() {
        let p = Poset::from_covers(ids(&["x", "y"]), &[]).unwrap();
        assert_eq!(p.least_upper_bound("x", "y").unwrap(), Bound::Missing);
        assert_eq!(p.greatest_lower_bound("x", "y").unwrap(), Bound::Missing);
        assert!(p.bottom().is_none());
    }

    #[test]
    fn divisor_order_glb_is_gcd() {
        let divs = [1u32, 2, 3, 4, 6, 12];
        let p = Poset::from_order_fn(divs.iter().map(|d| d.to_string()).collect(), |i, j| {
            divs[j].is_multiple_of(divs[i])
        })
        .unwrap();
        assert_eq!(
            p.greatest_lower_bound("4", "6").unwrap(),
            Bound::Unique("2".into())
        );
        assert_eq!(
            p.least_upper_bound("4", "6").unwrap(),
            Bound::Unique("12".into())
        );
    }

    #[test]
    fn new_rejects_non_order() {
        let err = Poset::new(ids(&["x", "y"]), Relation::from_fn(2, |_, _| true)).unwrap_err();
        assert!(matches!(err, Error::AxiomViolation(_)));
    }
}
