use std::collections::BTreeMap;

use num_complex::Complex;
use proptest::prelude::*;
use sumrule::exemplars::divisors::{divisor_log_identity, MAX_ARGUMENT};
use sumrule::exemplars::mutual_info::{mutual_information, JointDistribution};
use sumrule::exemplars::polya::{polya_min_max, sum_is_exact};
use sumrule::exemplars::sorkin::{sorkin_terms, SlitConfiguration};
use sumrule::exemplars::spherical::{spherical_excess, SphericalTriangle, DEGENERATE_THRESHOLD};
use sumrule::valuation::{
    additive_extension_bound, audit_sum_rule, extend_from_atoms, sum_rule_residual,
};
use sumrule::{
    boolean_lattice, chain, divisor_lattice, io, product_lattice, to_lattice,
    verify_consistency_relation, verify_lattice_laws, Bound, Comparability, LabeledLattice, Poset,
};

fn ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("e{i}")).collect()
}

/// Random DAG on `0..n` with edges only from lower to higher index.
fn dag() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (1usize..24).prop_flat_map(|n| {
        let edges = proptest::collection::vec((0..n, 0..n), 0..3 * n)
            .prop_map(|e| e.into_iter().filter(|(a, b)| a < b).collect::<Vec<_>>());
        (Just(n), edges)
    })
}

fn build(n: usize, edges: &[(usize, usize)]) -> Poset {
    let names = ids(n);
    let covers: Vec<(String, String)> = edges
        .iter()
        .map(|&(a, b)| (names[a].clone(), names[b].clone()))
        .collect();
    Poset::from_covers(names, &covers).unwrap()
}

fn small_lattice() -> impl Strategy<Value = LabeledLattice> {
    prop_oneof![
        (1usize..8).prop_map(|n| chain(n).unwrap()),
        (1usize..4).prop_map(|k| boolean_lattice(&ids(k)).unwrap()),
        (2u64..200).prop_map(|n| divisor_lattice(n).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn hasse_and_closure_round_trip((n, edges) in dag()) {
        let p = build(n, &edges);
        let covers = p.cover_ids();
        let again = Poset::from_covers(p.elements().to_vec(), &covers).unwrap();
        prop_assert_eq!(p.relation(), again.relation());
        // every cover is needed
        for skip in 0..covers.len() {
            let fewer: Vec<_> = covers.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, c)| c.clone()).collect();
            let q = Poset::from_covers(p.elements().to_vec(), &fewer).unwrap();
            prop_assert_ne!(p.relation(), q.relation());
        }
    }

    #[test]
    fn text_format_round_trip((n, edges) in dag()) {
        let p = build(n, &edges);
        let q = io::parse_poset(&io::write_poset_text(&p)).unwrap().build().unwrap();
        prop_assert_eq!(p.len(), q.len());
        for i in 0..p.len() {
            for j in 0..p.len() {
                let (qi, qj) = (q.index_of(p.id(i)).unwrap(), q.index_of(p.id(j)).unwrap());
                prop_assert_eq!(p.leq(i, j), q.leq(qi, qj));
            }
        }
    }

    #[test]
    fn comparability_is_symmetric((n, edges) in dag()) {
        let p = build(n, &edges);
        for i in 0..n {
            for j in 0..n {
                let flipped = match p.compare(i, j) {
                    Comparability::Less => Comparability::Greater,
                    Comparability::Greater => Comparability::Less,
                    other => other,
                };
                prop_assert_eq!(p.compare(j, i), flipped);
            }
        }
    }

    #[test]
    fn bounds_are_bounds((n, edges) in dag()) {
        let p = build(n, &edges);
        for i in 0..n {
            for j in 0..n {
                match p.lub_index(i, j) {
                    Bound::Unique(u) => {
                        prop_assert!(p.leq(i, u) && p.leq(j, u));
                        for w in 0..n {
                            if p.leq(i, w) && p.leq(j, w) {
                                prop_assert!(p.leq(u, w));
                            }
                        }
                    }
                    Bound::Ambiguous(c) => prop_assert!(c.len() >= 2),
                    Bound::Missing => prop_assert!((0..n).all(|w| !(p.leq(i, w) && p.leq(j, w)))),
                }
            }
        }
    }

    #[test]
    fn lub_agrees_with_join_table(a in small_lattice(), b in small_lattice()) {
        let prod = product_lattice(&a, &b).unwrap();
        let l = &prod.lattice;
        let recomputed = to_lattice(l.poset()).unwrap();
        for x in 0..l.len() {
            for y in 0..l.len() {
                prop_assert_eq!(l.poset().lub_index(x, y), Bound::Unique(l.join(x, y)));
                prop_assert_eq!(l.poset().glb_index(x, y), Bound::Unique(l.meet(x, y)));
                prop_assert_eq!(recomputed.join(x, y), l.join(x, y));
            }
        }
        prop_assert!(verify_lattice_laws(l).iter().all(|r| r.passed));
        prop_assert!(verify_consistency_relation(l).passed);
    }

    #[test]
    fn sum_rule_residual_is_symmetric(
        lattice in small_lattice(),
        values in proptest::collection::vec(-1e6f64..1e6, 256),
    ) {
        let l = &lattice.lattice;
        let u = &values[..l.len()];
        for x in 0..l.len() {
            for y in 0..l.len() {
                prop_assert_eq!(sum_rule_residual(l, u, x, y).to_bits(), sum_rule_residual(l, u, y, x).to_bits());
            }
        }
    }

    #[test]
    fn additive_extension_within_rounding_budget(
        atoms in 1usize..9,
        values in proptest::collection::vec(0f64..1e3, 8),
    ) {
        let lattice = boolean_lattice(&ids(atoms)).unwrap();
        let map: BTreeMap<String, f64> = ids(atoms).into_iter().zip(values.iter().copied()).collect();
        let v = extend_from_atoms(&lattice, &map).unwrap();
        let audit = audit_sum_rule(&lattice.lattice, &v).unwrap();
        prop_assert!(audit.max_residual <= additive_extension_bound(&values[..atoms]));
    }

    #[test]
    fn born_rule_kills_third_order(
        amps in proptest::collection::vec((-1f64..=1.0, -1f64..=1.0), 3..6),
    ) {
        let slits = SlitConfiguration::new(
            amps.iter().enumerate().map(|(k, &(re, im))| (format!("s{k}"), Complex::new(re, im))),
        ).unwrap();
        let terms = sorkin_terms(&slits).unwrap();
        let n = amps.len();
        prop_assert_eq!(terms.i3.len(), n * (n - 1) * (n - 2) / 6);
        prop_assert!(terms.max_abs_i3() <= 1e-12);
        // I2 is the cross term 2 Re(a b̄)
        for (k, (_, _, v)) in terms.i2.iter().enumerate() {
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
            let (a, b) = pairs[k];
            let cross = 2.0 * (slits.amplitudes()[a] * slits.amplitudes()[b].conj()).re;
            prop_assert!((v - cross).abs() <= 1e-12);
        }
    }

    #[test]
    fn mutual_information_formulas_agree(
        rows in 1usize..6,
        cols in 1usize..6,
        raw in proptest::collection::vec(0f64..1.0, 36),
    ) {
        let total: f64 = raw[..rows * cols].iter().sum();
        prop_assume!(total > 1e-3);
        let joint = JointDistribution::new(
            (0..rows).map(|a| (0..cols).map(|b| raw[a * cols + b] / total).collect()).collect(),
        );
        // normalization by division can miss by a few ulps, never by 1e-12
        let joint = joint.unwrap();
        let mi = mutual_information(&joint);
        prop_assert!(mi.disagreement() <= 1e-12);
        prop_assert!(mi.via_identity >= -1e-12 && mi.direct >= -1e-12);
        if joint.factorization_defect() > 1e-5 {
            prop_assert!(mi.direct > 1e-12);
        }
    }

    #[test]
    fn product_joints_carry_no_information(
        pa in proptest::collection::vec(0.01f64..1.0, 1..6),
        pb in proptest::collection::vec(0.01f64..1.0, 1..6),
    ) {
        let norm = |v: &[f64]| { let s: f64 = v.iter().sum(); v.iter().map(|x| x / s).collect::<Vec<_>>() };
        let joint = JointDistribution::product(&norm(&pa), &norm(&pb)).unwrap();
        prop_assert!(joint.factorization_defect() <= 1e-12);
        let mi = mutual_information(&joint);
        prop_assert!(mi.via_identity.abs() <= 1e-12 && mi.direct.abs() <= 1e-12);
    }

    #[test]
    fn polya_is_bit_exact_when_the_sum_is(
        ma in -(1i64 << 52)..(1i64 << 52),
        mb in -(1i64 << 52)..(1i64 << 52),
        e in -1000i32..960,
    ) {
        let (a, b) = (ma as f64 * 2f64.powi(e), mb as f64 * 2f64.powi(e));
        prop_assume!(a.is_finite() && b.is_finite() && sum_is_exact(a, b));
        let r = polya_min_max(a, b).unwrap();
        prop_assert_eq!(r.direct.to_bits(), r.via_sum_rule.to_bits());
    }

    #[test]
    fn divisor_identity_is_exact(p in 1u64..=MAX_ARGUMENT, q in 1u64..=MAX_ARGUMENT) {
        let r = divisor_log_identity(p, q).unwrap();
        prop_assert!(r.product_matches);
        prop_assert_eq!(p % r.gcd, 0);
        prop_assert_eq!(r.lcm % q, 0);
        prop_assert!(r.log_residual <= 1e-12);
    }

    #[test]
    fn excess_matches_area(
        a in -1f64..1.0, b in -1f64..1.0, c in -1f64..1.0,
        d in -1f64..1.0, e in -1f64..1.0, f in -1f64..1.0,
    ) {
        // vertices near the north pole pushed out in random directions
        let t = SphericalTriangle::from_vertices([a, b, 1.5], [c, d, -0.2], [e, f, 0.3]);
        let Ok(t) = t else { return Ok(()) };
        let margin = 0.01;
        prop_assume!([t.a, t.b, t.c].iter().all(|&x| x > margin && x < std::f64::consts::PI - margin));
        prop_assume!(t.angle_excess() >= 1e-6);
        let ex = spherical_excess(&t, DEGENERATE_THRESHOLD).unwrap();
        prop_assert!(ex.discrepancy() <= 1e-9, "{:?}", ex);
    }
}
