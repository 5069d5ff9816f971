//! Seeded fixture batteries, one per exemplar. Each exemplar draws from its
//! own ChaCha stream, so a battery gives the same report whether it runs
//! alone or as part of [`run_all`].

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::divisors::divisor_log_identity;
use super::euler::{euler_characteristic, PLATONIC_SOLIDS};
use super::mutual_info::{mutual_information, JointDistribution};
use super::polya::{polya_min_max, sum_is_exact};
use super::probability::probability_sum_rule;
use super::sorkin::{sorkin_terms, SlitConfiguration};
use super::spherical::{spherical_excess, SphericalTriangle, DEGENERATE_THRESHOLD};
use crate::builders::{
    boolean_lattice, chain, divisor_lattice, statement_lattice, LabeledLattice, Payload,
};
use crate::error::{Error, Result};
use crate::valuation::{
    additive_extension_bound, audit_sum_rule, check_disjoint_additivity, check_order_preserving,
    extend_from_atoms, Valuation,
};

pub const EXEMPLARS: [&str; 8] = [
    "measures",
    "probability",
    "polya",
    "divisors",
    "mutual-information",
    "euler",
    "spherical-excess",
    "three-slit",
];

pub const DEFAULT_SEED: u64 = 2024;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Limit {
    AtMost(f64),
    AtLeast(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Worst observed value, when the check is numeric.
    pub observed: Option<f64>,
    pub limit: Option<Limit>,
    /// Number of cases examined.
    pub cases: usize,
}

impl Check {
    fn exact(name: &str, passed: bool, cases: usize) -> Self {
        Check {
            name: name.to_string(),
            passed,
            observed: None,
            limit: None,
            cases,
        }
    }

    fn at_most(name: &str, observed: f64, limit: f64, cases: usize) -> Self {
        Check {
            name: name.to_string(),
            passed: observed <= limit,
            observed: Some(observed),
            limit: Some(Limit::AtMost(limit)),
            cases,
        }
    }

    fn at_least(name: &str, observed: f64, limit: f64, cases: usize) -> Self {
        Check {
            name: name.to_string(),
            passed: observed >= limit,
            observed: Some(observed),
            limit: Some(Limit::AtLeast(limit)),
            cases,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExemplarReport {
    pub exemplar: String,
    pub identity: String,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl ExemplarReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Identity each exemplar instantiates.
pub fn identity_of(name: &str) -> Option<&'static str> {
    Some(match name {
        "measures" => "m(A ∪ B) = m(A) + m(B) − m(A ∩ B)",
        "probability" => "P(A or B) = P(A) + P(B) − P(A and B)",
        "polya" => "max(a, b) = a + b − min(a, b)",
        "divisors" => "log lcm(p, q) = log p + log q − log gcd(p, q)",
        "mutual-information" => "I(A; B) = H(A) + H(B) − H(A, B)",
        "euler" => "χ = V − E + F",
        "spherical-excess" => "E = A + B + C − π",
        "three-slit" => "I3 = μ(ABC) − μ(AB) − μ(AC) − μ(BC) + μ(A) + μ(B) + μ(C)",
        _ => return None,
    })
}

/// Generator for exemplar number `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn run_exemplar(name: &str, seed: u64) -> Result<ExemplarReport> {
    let stream = EXEMPLARS.iter().position(|e| *e == name).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "unknown exemplar `{name}`; expected one of: {}, all",
            EXEMPLARS.join(", ")
        ))
    })?;
    let mut rng = stream_rng(seed, stream as u64);
    let checks = match name {
        "measures" => measures(&mut rng)?,
        "probability" => probability(&mut rng)?,
        "polya" => polya(&mut rng)?,
        "divisors" => divisors(&mut rng)?,
        "mutual-information" => mutual_info(&mut rng)?,
        "euler" => euler(),
        "spherical-excess" => spherical(&mut rng)?,
        "three-slit" => three_slit(&mut rng)?,
        _ => unreachable!("registry and dispatch agree"),
    };
    Ok(ExemplarReport {
        exemplar: name.to_string(),
        identity: identity_of(name).unwrap_or_default().to_string(),
        seed,
        checks,
    })
}

pub fn run_all(seed: u64) -> Result<Vec<ExemplarReport>> {
    EXEMPLARS
        .iter()
        .map(|name| run_exemplar(name, seed))
        .collect()
}

/// Three pencils as atoms of a Boolean lattice, valued by cardinality.
pub fn pencil_fixture() -> Result<(LabeledLattice, Valuation<f64>)> {
    let lattice = boolean_lattice(&["pencil 1", "pencil 2", "pencil 3"])?;
    let ones = lattice
        .atoms
        .iter()
        .map(|a| (a.clone(), 1.0))
        .collect::<BTreeMap<_, _>>();
    let valuation = extend_from_atoms(&lattice, &ones)?;
    Ok((lattice, valuation))
}

/// Two disjoint flocks of six and seven sheep. Elements are the unions of
/// flocks; each is valued by counting the sheep it contains.
pub fn sheep_fixture() -> Result<(LabeledLattice, Valuation<f64>)> {
    const SIX: u32 = 0b11_1111;
    const SEVEN: u32 = 0b111_1111 << 6;
    let lattice = boolean_lattice(&["six", "seven"])?;
    let flocks = [SIX, SEVEN];
    let valuation = Valuation::from_fn(&lattice.lattice, |i| match lattice.payload[i] {
        Payload::Subset(mask) => {
            let sheep = (0..2)
                .filter(|k| mask >> k & 1 == 1)
                .fold(0u32, |acc, k| acc | flocks[k]);
            f64::from(sheep.count_ones())
        }
        _ => f64::NAN,
    })?;
    Ok((lattice, valuation))
}

fn value_of(lattice: &LabeledLattice, v: &Valuation<f64>, atoms: &[&str]) -> Result<f64> {
    let id = lattice.id_of_atoms(atoms)?;
    v.get(id)
        .copied()
        .ok_or_else(|| Error::MissingValue(id.to_string()))
}

fn measures(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let (pencils, pv) = pencil_fixture()?;
    let two = value_of(&pencils, &pv, &["pencil 1", "pencil 2"])?;
    let one = value_of(&pencils, &pv, &["pencil 3"])?;
    let three = value_of(&pencils, &pv, &["pencil 1", "pencil 2", "pencil 3"])?;
    let pencil_audit = check_disjoint_additivity(&pencils.lattice, &pv)?;

    let (sheep, sv) = sheep_fixture()?;
    let six = value_of(&sheep, &sv, &["six"])?;
    let seven = value_of(&sheep, &sv, &["seven"])?;
    let thirteen = value_of(&sheep, &sv, &["six", "seven"])?;
    let sheep_audit = check_disjoint_additivity(&sheep.lattice, &sv)?;

    let mut worst_ratio = 0.0f64;
    let mut cases = 0;
    for atoms in 1..=8usize {
        let names: Vec<String> = (0..atoms).map(|k| format!("a{k}")).collect();
        let lattice = boolean_lattice(&names)?;
        for _ in 0..12 {
            let values: BTreeMap<String, f64> = names
                .iter()
                .map(|n| (n.clone(), rng.gen_range(0.0..100.0)))
                .collect();
            let v = extend_from_atoms(&lattice, &values)?;
            let audit = audit_sum_rule(&lattice.lattice, &v)?;
            let bound = additive_extension_bound(&values.values().copied().collect::<Vec<_>>());
            let ratio = if bound > 0.0 {
                audit.max_residual / bound
            } else {
                audit.max_residual
            };
            worst_ratio = worst_ratio.max(ratio);
            cases += 1;
        }
    }
    Ok(vec![
        Check::exact(
            "2 pencils + 1 pencil = 3 pencils",
            two == 2.0 && one == 1.0 && three == 3.0,
            1,
        ),
        Check::exact(
            "pencil disjoint additivity",
            pencil_audit.passed(),
            pencils.len(),
        ),
        Check::exact(
            "6 sheep + 7 sheep = 13 sheep",
            six == 6.0 && seven == 7.0 && thirteen == 13.0,
            1,
        ),
        Check::exact(
            "sheep disjoint additivity",
            sheep_audit.passed(),
            sheep.len(),
        ),
        Check::at_most(
            "additive extension residual / (8 ε Σ)",
            worst_ratio,
            1.0,
            cases,
        ),
    ])
}

fn probability(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let fair = probability_sum_rule(0.5, 0.5, 0.25)?;
    let rejected = matches!(
        probability_sum_rule(0.6, 0.6, 0.1),
        Err(Error::Coherence(_))
    );

    let names = ["rain", "wind", "fog"];
    let lattice = statement_lattice(&names)?;
    let l = &lattice.lattice;
    let mut worst = 0.0f64;
    let mut cases = 0;
    for _ in 0..100 {
        let raw: Vec<f64> = names.iter().map(|_| rng.gen_range(0.0..1.0)).collect();
        let total: f64 = raw.iter().sum::<f64>() + rng.gen_range(0.0..1.0);
        let atoms: BTreeMap<String, f64> = names
            .iter()
            .zip(&raw)
            .map(|(n, r)| (n.to_string(), r / total))
            .collect();
        let p = extend_from_atoms(&lattice, &atoms)?.resolve(l)?;
        for x in 0..l.len() {
            for y in x..l.len() {
                let union = probability_sum_rule(p[x], p[y], p[l.meet(x, y)])?;
                worst = worst.max((union - p[l.join(x, y)]).abs());
                cases += 1;
            }
        }
    }
    Ok(vec![
        Check::exact("independent fair events give 0.75", fair == 0.75, 1),
        Check::exact("incoherent inputs rejected", rejected, 1),
        Check::at_most(
            "sum rule on random statement probabilities",
            worst,
            1e-15,
            cases,
        ),
    ])
}

/// Two doubles with a common binary exponent and 51-bit mantissas, so their
/// sum is exact.
pub fn random_exact_pair(rng: &mut impl Rng) -> (f64, f64) {
    let exponent = rng.gen_range(-60..=60);
    let scale = 2f64.powi(exponent);
    let mut draw = || {
        let mantissa = rng.gen_range(0..1u64 << 51) as f64;
        let sign = if rng.gen() { 1.0 } else { -1.0 };
        sign * mantissa * scale
    };
    (draw(), draw())
}

fn polya(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let small = polya_min_max(1.0, 2.0)?.via_sum_rule == 2.0
        && polya_min_max(3.0, 4.0)?.via_sum_rule == 4.0;
    let mut mismatches = 0;
    let mut cases = 0;
    for _ in 0..10_000 {
        let (a, b) = random_exact_pair(rng);
        if !sum_is_exact(a, b) {
            mismatches += 1;
            continue;
        }
        let r = polya_min_max(a, b)?;
        if r.direct.to_bits() != r.via_sum_rule.to_bits() {
            mismatches += 1;
        }
        cases += 1;
    }
    // Any strictly increasing valuation on a chain satisfies the sum rule.
    let c = chain(64)?;
    let mut values: Vec<i64> = (0..64)
        .map(|_| rng.gen_range(-1_000_000..1_000_000))
        .collect();
    values.sort_unstable();
    values.dedup();
    let ranks = values.len();
    let c = if ranks == 64 { c } else { chain(ranks)? };
    let v = Valuation::from_fn(&c.lattice, |i| values[i] as f64)?;
    let order = check_order_preserving(&c.lattice, &v)?;
    let sum_rule = audit_sum_rule(&c.lattice, &v)?;
    Ok(vec![
        Check::exact("max(1,2) = 2 and 3 + 4 − 3 = 4", small, 2),
        Check::exact("bit-exact max via sum rule", mismatches == 0, cases),
        Check::exact("chain valuation is monotone", order.passed, ranks),
        Check::at_most(
            "chain sum rule residual",
            sum_rule.max_residual,
            0.0,
            ranks * ranks,
        ),
    ])
}

fn divisors(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let r46 = divisor_log_identity(4, 6)?;
    let r77 = divisor_log_identity(7, 7)?;
    let r928 = divisor_log_identity(9, 28)?;
    let fixtures = (r46.gcd, r46.lcm, r77.gcd, r77.lcm, r928.lcm) == (2, 12, 7, 7, 252);
    let mut exact = true;
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let p = rng.gen_range(1..=super::divisors::MAX_ARGUMENT);
        let q = rng.gen_range(1..=super::divisors::MAX_ARGUMENT);
        let r = divisor_log_identity(p, q)?;
        exact &= r.product_matches;
        worst = worst.max(r.log_residual);
    }
    let d = divisor_lattice(360)?;
    let logs = Valuation::from_fn(&d.lattice, |i| match d.payload[i] {
        Payload::Integer(k) => (k as f64).ln(),
        _ => f64::NAN,
    })?;
    let lattice_audit = audit_sum_rule(&d.lattice, &logs)?;
    Ok(vec![
        Check::exact("gcd/lcm fixtures", fixtures, 3),
        Check::exact("lcm · gcd = p · q", exact, 10_000),
        Check::at_most("log residual", worst, 1e-12, 10_000),
        Check::at_most(
            "log valuation on divisors of 360",
            lattice_audit.max_residual,
            1e-12,
            d.len() * d.len(),
        ),
    ])
}

/// Joint distribution with independent uniform weights, normalized.
pub fn random_joint(
    rng: &mut impl Rng,
    rows: usize,
    cols: usize,
) -> Result<JointDistribution<f64>> {
    let raw: Vec<Vec<f64>> = (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(0.0..1.0)).collect())
        .collect();
    let total = crate::scalar::compensated_sum(raw.iter().flatten().copied());
    JointDistribution::new(
        raw.into_iter()
            .map(|r| r.into_iter().map(|x| x / total).collect())
            .collect(),
    )
}

fn mutual_info(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let independent = mutual_information(&JointDistribution::<f64>::new(vec![
        vec![0.25, 0.25],
        vec![0.25, 0.25],
    ])?);
    let correlated = mutual_information(&JointDistribution::<f64>::new(vec![
        vec![0.5, 0.0],
        vec![0.0, 0.5],
    ])?);
    let mut worst = 0.0f64;
    let mut lowest = f64::INFINITY;
    for _ in 0..1000 {
        let mi = mutual_information(&random_joint(rng, 4, 4)?);
        worst = worst.max(mi.disagreement());
        lowest = lowest.min(mi.via_identity.min(mi.direct));
    }
    let mut product_worst = 0.0f64;
    for _ in 0..100 {
        let pa = random_marginal(rng, 4);
        let pb = random_marginal(rng, 3);
        let mi = mutual_information(&JointDistribution::product(&pa, &pb)?);
        product_worst = product_worst.max(mi.via_identity.abs().max(mi.direct.abs()));
    }
    Ok(vec![
        Check::at_most(
            "independent bits: |I|",
            independent.via_identity.abs().max(independent.direct.abs()),
            1e-12,
            1,
        ),
        Check::at_most(
            "correlated bits: |I − 1|",
            (correlated.via_identity - 1.0)
                .abs()
                .max((correlated.direct - 1.0).abs()),
            1e-12,
            1,
        ),
        Check::at_most(
            "identity vs direct on random 4x4 joints",
            worst,
            1e-12,
            1000,
        ),
        Check::at_least("smallest I on random joints", lowest, -1e-12, 1000),
        Check::at_most("|I| on product joints", product_worst, 1e-12, 100),
    ])
}

fn random_marginal(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

fn euler() -> Vec<Check> {
    PLATONIC_SOLIDS
        .iter()
        .map(|(name, counts)| {
            Check::exact(
                &format!("{name} χ = 2"),
                euler_characteristic(*counts) == 2,
                1,
            )
        })
        .collect()
}

fn random_unit_vector(rng: &mut impl Rng) -> [f64; 3] {
    loop {
        let v = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let norm2: f64 = v.iter().map(|x| x * x).sum();
        if norm2 > 1e-4 && norm2 <= 1.0 {
            let norm = norm2.sqrt();
            return [v[0] / norm, v[1] / norm, v[2] / norm];
        }
    }
}

/// Angles closer than this to 0 or π mark a needle-shaped triangle whose
/// sides are ill-conditioned functions of its angles.
pub const MIN_ANGLE_MARGIN: f64 = 0.01;

/// Triangle with uniformly random vertices, redrawn until it is
/// non-degenerate: excess at least `1e-6` and every angle at least
/// [`MIN_ANGLE_MARGIN`] away from 0 and π.
pub fn random_triangle(rng: &mut impl Rng) -> SphericalTriangle<f64> {
    loop {
        let t = SphericalTriangle::from_vertices(
            random_unit_vector(rng),
            random_unit_vector(rng),
            random_unit_vector(rng),
        );
        if let Ok(t) = t {
            let fat = [t.a, t.b, t.c]
                .iter()
                .all(|x| (MIN_ANGLE_MARGIN..=PI - MIN_ANGLE_MARGIN).contains(x));
            if fat && t.angle_excess() >= 1e-6 {
                return t;
            }
        }
    }
}

fn spherical(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let octant = spherical_excess(
        &SphericalTriangle::new(FRAC_PI_2, FRAC_PI_2, FRAC_PI_2)?,
        DEGENERATE_THRESHOLD,
    )?;
    let third = 2.0 * PI / 3.0;
    let big = spherical_excess(
        &SphericalTriangle::new(third, third, third)?,
        DEGENERATE_THRESHOLD,
    )?;
    let flat = SphericalTriangle::new(PI / 3.0, PI / 3.0, PI / 3.0 + 1e-15)?;
    let rejected = matches!(
        spherical_excess(&flat, DEGENERATE_THRESHOLD),
        Err(Error::Degenerate(_))
    );
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let e = spherical_excess(&random_triangle(rng), DEGENERATE_THRESHOLD)?;
        worst = worst.max(e.discrepancy());
    }
    Ok(vec![
        Check::at_most(
            "octant: |E − π/2|",
            (octant.excess - FRAC_PI_2).abs(),
            1e-12,
            1,
        ),
        Check::at_most(
            "octant: |E − L'Huilier area|",
            octant.discrepancy(),
            1e-12,
            1,
        ),
        Check::at_most(
            "equilateral 2π/3: |E − π|",
            (big.excess - PI).abs().max(big.discrepancy()),
            1e-9,
            1,
        ),
        Check::exact("angle sum π + 1e-15 rejected as degenerate", rejected, 1),
        Check::at_most("random triangles: |E − L'Huilier area|", worst, 1e-9, 1000),
    ])
}

/// Three slits with amplitude components uniform in `[−1, 1]`.
pub fn random_slits(rng: &mut impl Rng) -> Result<SlitConfiguration<f64>> {
    SlitConfiguration::new(["A", "B", "C"].map(|label| {
        (
            label,
            Complex::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)),
        )
    }))
}

fn three_slit(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let fixture = SlitConfiguration::new([
        ("A", Complex::new(1.0, 0.0)),
        ("B", Complex::new(0.0, 1.0)),
        ("C", Complex::new(-1.0, 0.0)),
    ])?;
    let fixture_i3 = sorkin_terms(&fixture)?.max_abs_i3();
    let mut worst = 0.0f64;
    let mut interfering = 0usize;
    const TRIPLES: usize = 10_000;
    for _ in 0..TRIPLES {
        let terms = sorkin_terms(&random_slits(rng)?)?;
        worst = worst.max(terms.max_abs_i3());
        if terms.max_abs_i2() > 1e-6 {
            interfering += 1;
        }
    }
    Ok(vec![
        Check::at_most("amplitudes (1, i, −1): |I3|", fixture_i3, 0.0, 1),
        Check::at_most("max |I3| over random triples", worst, 1e-12, TRIPLES),
        Check::at_least(
            "fraction of triples with some |I2| > 1e-6",
            interfering as f64 / TRIPLES as f64,
            0.99,
            TRIPLES,
        ),
    ])
}
