//! Numerical solution of the associativity equation.
//!
//! Given a commutative, associative, strictly increasing operator `⊕` on an
//! interval, [`solve_associativity`] builds a monotone piecewise-linear `f`
//! with `f(a ⊕ b) = f(a) + f(b)` and `f(unit) = 1`.
//!
//! The construction halves the unit repeatedly: `h₁ ⊕ h₁ = unit`,
//! `h₂ ⊕ h₂ = h₁`, and so on to the requested depth, each step solved by
//! bisection, and doubles it upward (`unit ⊕ unit`, ...) until the target
//! range is covered. Level `e` of this ladder has `f = 2^e`. Any dyadic
//! value `r` then corresponds to the `⊕`-combination of the levels in its
//! binary expansion, and `f(x)` is recovered by the greedy search for the
//! largest such `r` not exceeding `x`, refined linearly inside the final
//! cell. Knots are placed adaptively until linear interpolation between
//! them matches the ladder to within a fixed tolerance.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::valuation::Valuation;

pub const MIN_DEPTH: usize = 4;
pub const MAX_DEPTH: usize = 40;
pub const DEFAULT_DEPTH: usize = 20;
pub const DEFAULT_GRID: usize = 64;
pub const MIN_GRID: usize = 8;
pub const BISECTION_TOLERANCE: f64 = 1e-12;
pub const MAX_BISECTION_STEPS: usize = 200;

pub const COMMUTATIVITY: &str = "commutativity";
pub const ASSOCIATIVITY: &str = "associativity";
pub const MONOTONICITY: &str = "strict monotonicity";
pub const CANCELLATIVITY: &str = "cancellativity";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Real> Interval<T> {
    pub fn new(lo: T, hi: T) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::InvalidArgument(format!(
                "empty interval [{lo}, {hi}]"
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn contains(&self, x: T) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// `n` evenly spaced points including both ends; a single point is `lo`.
    pub fn grid(&self, n: usize) -> Vec<T> {
        match n {
            0 => Vec::new(),
            1 => vec![self.lo],
            _ => {
                let step = (self.hi - self.lo) / T::lit((n - 1) as f64);
                (0..n)
                    .map(|i| {
                        if i == n - 1 {
                            self.hi
                        } else {
                            self.lo + step * T::lit(i as f64)
                        }
                    })
                    .collect()
            }
        }
    }
}

/// Properties the caller asserts about the operator. They are spot-checked
/// by [`precheck_operator`], not proven.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Claims {
    pub commutative: bool,
    pub associative: bool,
    pub strictly_monotone: bool,
}

impl Default for Claims {
    fn default() -> Self {
        Claims {
            commutative: true,
            associative: true,
            strictly_monotone: true,
        }
    }
}

type CombineFn<T> = dyn Fn(T, T) -> Option<T> + Send + Sync;

/// A binary operator on a real interval. `evaluate` may return `None` where
/// the operator is undefined (for example outside a sampled table).
#[derive(Clone)]
pub struct OperatorSample<T> {
    pub name: String,
    pub domain: Interval<T>,
    /// Interval results are allowed to land in; contains `domain`.
    pub extension: Interval<T>,
    pub claims: Claims,
    evaluate: Arc<CombineFn<T>>,
}

impl<T: Real> fmt::Debug for OperatorSample<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OperatorSample")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("extension", &self.extension)
            .field("claims", &self.claims)
            .finish()
    }
}

impl<T: Real> OperatorSample<T> {
    pub fn new(
        name: impl Into<String>,
        domain: Interval<T>,
        extension: Interval<T>,
        evaluate: impl Fn(T, T) -> Option<T> + Send + Sync + 'static,
    ) -> Result<Self> {
        if extension.lo > domain.lo || extension.hi < domain.hi {
            return Err(Error::InvalidArgument(
                "extension interval must contain the domain".into(),
            ));
        }
        Ok(OperatorSample {
            name: name.into(),
            domain,
            extension,
            claims: Claims::default(),
            evaluate: Arc::new(evaluate),
        })
    }

    pub fn with_claims(mut self, claims: Claims) -> Self {
        self.claims = claims;
        self
    }

    /// Raw evaluation; `None` if undefined or the result is not finite.
    pub fn try_eval(&self, a: T, b: T) -> Option<T> {
        (self.evaluate)(a, b).filter(|v| v.is_finite())
    }

    /// Evaluation that must stay inside the extension interval.
    pub fn eval(&self, a: T, b: T) -> Result<T> {
        self.try_eval(a, b)
            .filter(|&v| self.extension.contains(v))
            .ok_or(Error::Domain {
                a: a.to_f64_lossy(),
                b: b.to_f64_lossy(),
            })
    }

    /// `a + b`
    pub fn add(domain: Interval<T>) -> Self {
        let ext = Interval {
            lo: domain.lo,
            hi: T::max_value(),
        };
        OperatorSample::new("add", domain, ext, |a, b| Some(a + b))
            .expect("extension contains domain")
    }

    /// `a + b + ab`, the combination rule for odds-like quantities.
    pub fn odds(domain: Interval<T>) -> Self {
        let ext = Interval {
            lo: domain.lo,
            hi: T::max_value(),
        };
        OperatorSample::new("odds", domain, ext, |a, b| Some(a + b + a * b))
            .expect("extension contains domain")
    }

    /// `√(a² + b²)`
    pub fn pythagorean(domain: Interval<T>) -> Self {
        let ext = Interval {
            lo: domain.lo,
            hi: T::max_value(),
        };
        OperatorSample::new("pythagorean", domain, ext, |a, b| Some(a.hypot(b)))
            .expect("extension contains domain")
    }

    /// Named built-in on its default domain: `add` on [0, 1], `odds` on
    /// [0, 3], `pythagorean` on [0, 4].
    pub fn builtin(name: &str) -> Option<Self> {
        let iv = |lo: f64, hi: f64| Interval {
            lo: T::lit(lo),
            hi: T::lit(hi),
        };
        match name {
            "add" => Some(Self::add(iv(0.0, 1.0))),
            "odds" => Some(Self::odds(iv(0.0, 3.0))),
            "pythagorean" => Some(Self::pythagorean(iv(0.0, 4.0))),
            _ => None,
        }
    }

    /// Operator interpolated bilinearly from a dense table.
    pub fn from_table(name: impl Into<String>, table: TableOperator<T>) -> Result<Self> {
        let domain = table.domain()?;
        let extension = table.extension()?;
        let table = Arc::new(table);
        OperatorSample::new(name, domain, extension, move |a, b| table.interpolate(a, b))
    }
}

pub const BUILTIN_OPERATORS: [&str; 3] = ["add", "odds", "pythagorean"];

/// Operator sampled on a rectangular grid `a_i × b_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TableOperator<T> {
    a_axis: Vec<T>,
    b_axis: Vec<T>,
    /// Row-major over `a_axis × b_axis`.
    values: Vec<T>,
}

impl<T: Real> TableOperator<T> {
    /// Build from `(a, b, a ⊕ b)` rows covering a full grid in any order.
    pub fn from_rows(rows: &[(T, T, T)]) -> Result<Self> {
        let axis = |pick: fn(&(T, T, T)) -> T| {
            let mut v: Vec<T> = rows.iter().map(pick).collect();
            v.sort_by(|x, y| x.partial_cmp(y).expect("finite table"));
            v.dedup();
            v
        };
        if rows
            .iter()
            .any(|(a, b, c)| !(a.is_finite() && b.is_finite() && c.is_finite()))
        {
            return Err(Error::InvalidArgument(
                "table entries must be finite".into(),
            ));
        }
        let a_axis = axis(|r| r.0);
        let b_axis = axis(|r| r.1);
        if a_axis.len() < 2 || b_axis.len() < 2 {
            return Err(Error::InvalidArgument(
                "table needs at least a 2x2 grid".into(),
            ));
        }
        let (na, nb) = (a_axis.len(), b_axis.len());
        let mut values: Vec<Option<T>> = vec![None; na * nb];
        let find = |axis: &[T], x: T| {
            axis.binary_search_by(|p| p.partial_cmp(&x).unwrap())
                .unwrap()
        };
        for &(a, b, c) in rows {
            let slot = &mut values[find(&a_axis, a) * nb + find(&b_axis, b)];
            if slot.is_some() {
                return Err(Error::InvalidArgument(format!(
                    "duplicate table entry at ({a}, {b})"
                )));
            }
            *slot = Some(c);
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(k, v)| {
                v.ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "table missing entry at ({}, {})",
                        a_axis[k / nb],
                        b_axis[k % nb]
                    ))
                })
            })
            .collect::<Result<Vec<T>>>()?;
        Ok(TableOperator {
            a_axis,
            b_axis,
            values,
        })
    }

    fn domain(&self) -> Result<Interval<T>> {
        let lo = self.a_axis[0].max(self.b_axis[0]);
        let hi = self
            .a_axis
            .last()
            .unwrap()
            .min(*self.b_axis.last().unwrap());
        Interval::new(lo, hi)
    }

    fn extension(&self) -> Result<Interval<T>> {
        let d = self.domain()?;
        let lo = self.values.iter().fold(d.lo, |m, &v| m.min(v));
        let hi = self.values.iter().fold(d.hi, |m, &v| m.max(v));
        Interval::new(lo, hi)
    }

    fn cell(axis: &[T], x: T) -> Option<(usize, T)> {
        if x < axis[0] || x > *axis.last().unwrap() {
            return None;
        }
        let i = axis.partition_point(|&p| p <= x).clamp(1, axis.len() - 1) - 1;
        let t = (x - axis[i]) / (axis[i + 1] - axis[i]);
        Some((i, t))
    }

    pub fn interpolate(&self, a: T, b: T) -> Option<T> {
        let (i, s) = Self::cell(&self.a_axis, a)?;
        let (j, t) = Self::cell(&self.b_axis, b)?;
        let nb = self.b_axis.len();
        let v = |i: usize, j: usize| self.values[i * nb + j];
        let one = T::one();
        Some(
            (one - s) * (one - t) * v(i, j)
                + s * (one - t) * v(i + 1, j)
                + (one - s) * t * v(i, j + 1)
                + s * t * v(i + 1, j + 1),
        )
    }
}

/// Outcome of one operator law spot-check over a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorLawReport<T> {
    pub law: String,
    /// Worst defect, relative to `max(1, |value|)`.
    pub max_defect: T,
    /// Arguments at which the worst defect occurred.
    pub witness: Vec<T>,
    pub passed: bool,
}

fn relative_defect<T: Real>(l: T, r: T) -> T {
    (l - r).abs() / T::one().max(l.abs()).max(r.abs())
}

struct Tracker<T> {
    worst: T,
    witness: Vec<T>,
    violated: bool,
}

impl<T: Real> Tracker<T> {
    fn new() -> Self {
        Tracker {
            worst: T::zero(),
            witness: Vec::new(),
            violated: false,
        }
    }

    fn offer(&mut self, defect: T, at: &[T]) {
        if defect > self.worst {
            self.worst = defect;
            self.witness = at.to_vec();
        }
    }

    fn report(self, law: &str, tolerance: T) -> OperatorLawReport<T> {
        OperatorLawReport {
            law: law.to_string(),
            passed: !self.violated && self.worst <= tolerance,
            max_defect: self.worst,
            witness: self.witness,
        }
    }
}

/// Spot-check commutativity, associativity, strict monotonicity and
/// cancellativity of `op` on a uniform `grid_size` grid over its domain.
///
/// Associativity is only checked at triples where both bracketings can be
/// evaluated inside the extension interval.
pub fn precheck_operator<T: Real>(
    op: &OperatorSample<T>,
    grid_size: usize,
    tolerance: T,
) -> Result<Vec<OperatorLawReport<T>>> {
    if grid_size < MIN_GRID {
        return Err(Error::InvalidArgument(format!(
            "grid size must be at least {MIN_GRID}"
        )));
    }
    let grid = op.domain.grid(grid_size);
    let n = grid.len();
    let mut table = vec![T::zero(); n * n];
    for (i, &a) in grid.iter().enumerate() {
        for (j, &b) in grid.iter().enumerate() {
            table[i * n + j] = op.eval(a, b)?;
        }
    }
    let at = |i: usize, j: usize| table[i * n + j];

    let mut comm = Tracker::new();
    for i in 0..n {
        for j in i + 1..n {
            comm.offer(relative_defect(at(i, j), at(j, i)), &[grid[i], grid[j]]);
        }
    }

    let mut assoc = Tracker::new();
    let defined = |x: Option<T>| x.filter(|&v| op.extension.contains(v));
    for i in 0..n {
        for j in 0..n {
            let ab = at(i, j);
            for k in 0..n {
                let bc = at(j, k);
                let (Some(left), Some(right)) = (
                    defined(op.try_eval(ab, grid[k])),
                    defined(op.try_eval(grid[i], bc)),
                ) else {
                    continue;
                };
                assoc.offer(relative_defect(left, right), &[grid[i], grid[j], grid[k]]);
            }
        }
    }

    let mut mono = Tracker::new();
    for i in 0..n {
        for j in 1..n {
            for (prev, next, w) in [
                (at(i, j - 1), at(i, j), [grid[i], grid[j - 1], grid[j]]),
                (at(j - 1, i), at(j, i), [grid[j - 1], grid[j], grid[i]]),
            ] {
                if !(next > prev) {
                    mono.violated = true;
                    let drop = prev - next;
                    if mono.witness.is_empty() || drop > mono.worst {
                        mono.worst = drop.max(T::zero());
                        mono.witness = w.to_vec();
                    }
                }
            }
        }
    }

    // x ≤ y ≤ z on the grid: x ⊕ z ≤ y ⊕ z
    let mut cancel = Tracker::new();
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                let gap = at(i, k) - at(j, k);
                if gap > T::zero() {
                    cancel.offer(
                        gap / T::one().max(at(j, k).abs()),
                        &[grid[i], grid[j], grid[k]],
                    );
                }
            }
        }
    }

    Ok(vec![
        comm.report(COMMUTATIVITY, tolerance),
        assoc.report(ASSOCIATIVITY, tolerance),
        mono.report(MONOTONICITY, tolerance),
        cancel.report(CANCELLATIVITY, tolerance),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig<T> {
    /// Anchor `u₀` with `f(u₀) = 1`.
    pub unit: T,
    pub depth: usize,
    pub grid: usize,
    pub precheck_tolerance: T,
    /// Largest certified `|f(a ⊕ b) − f(a) − f(b)|` on the grid.
    pub certify_tolerance: T,
    /// Largest gap allowed between the knot interpolant and the ladder at
    /// interval midpoints.
    pub knot_tolerance: T,
    /// Gap allowed relative to `|f|`, so small values keep their leading
    /// digits. The gap bound never drops below `knot_floor`.
    pub knot_relative_tolerance: T,
    pub knot_floor: T,
    /// Upper end of the knot range; defaults to `hi ⊕ hi`, clipped to the
    /// extension interval.
    pub range_cap: Option<T>,
    pub max_knots: usize,
}

impl<T: Real> SolverConfig<T> {
    pub fn new(unit: T) -> Self {
        SolverConfig {
            unit,
            depth: DEFAULT_DEPTH,
            grid: DEFAULT_GRID,
            precheck_tolerance: T::lit(1e-9),
            certify_tolerance: T::lit(1e-6),
            knot_tolerance: T::lit(1e-8),
            knot_relative_tolerance: T::lit(1e-7),
            knot_floor: T::lit(1e-14),
            range_cap: None,
            max_knots: 1 << 20,
        }
    }

    pub fn depth(mut self, depth: usize) -> Self {
        self.depth = depth;
        self
    }

    pub fn grid(mut self, grid: usize) -> Self {
        self.grid = grid;
        self
    }
}

/// Monotone piecewise-linear solution of the associativity equation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Regraduation<T> {
    knots: Vec<(T, T)>,
    unit: T,
    residual: T,
    depth: usize,
}

impl<T: Real> Regraduation<T> {
    /// Wrap a knot table. Both coordinates must be strictly increasing and
    /// `unit` must be a knot abscissa whose value is exactly one.
    pub fn from_knots(knots: Vec<(T, T)>, unit: T) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidArgument("need at least two knots".into()));
        }
        if knots.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::InvalidArgument("knots must be finite".into()));
        }
        if let Some(w) = knots
            .windows(2)
            .find(|w| !(w[0].0 < w[1].0 && w[0].1 < w[1].1))
        {
            return Err(Error::Solver(format!(
                "knots not strictly increasing at x = {}",
                w[1].0
            )));
        }
        if !knots.iter().any(|&(x, y)| x == unit && y == T::one()) {
            return Err(Error::InvalidArgument(
                "unit must be a knot with value 1".into(),
            ));
        }
        Ok(Regraduation {
            knots,
            unit,
            residual: T::zero(),
            depth: 0,
        })
    }

    pub fn knots(&self) -> &[(T, T)] {
        &self.knots
    }

    pub fn unit(&self) -> T {
        self.unit
    }

    /// Certified residual on the verification grid.
    pub fn residual(&self) -> T {
        self.residual
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn range(&self) -> (T, T) {
        (self.knots[0].0, self.knots[self.knots.len() - 1].0)
    }

    pub fn in_range(&self, x: T) -> bool {
        let (lo, hi) = self.range();
        lo <= x && x <= hi
    }

    fn interpolate(
        points: &[(T, T)],
        x: T,
        key: fn(&(T, T)) -> T,
        val: fn(&(T, T)) -> T,
    ) -> Option<T> {
        let first = key(&points[0]);
        let last = key(&points[points.len() - 1]);
        if !(first <= x && x <= last) {
            return None;
        }
        let i = points.partition_point(|p| key(p) <= x);
        if i == 0 {
            return Some(val(&points[0]));
        }
        if i == points.len() {
            return Some(val(&points[points.len() - 1]));
        }
        let (p, q) = (&points[i - 1], &points[i]);
        let t = (x - key(p)) / (key(q) - key(p));
        Some(val(p) + t * (val(q) - val(p)))
    }

    /// `f(x)`, or `None` outside the knot range.
    pub fn eval(&self, x: T) -> Option<T> {
        Self::interpolate(&self.knots, x, |p| p.0, |p| p.1)
    }

    /// `f⁻¹(y)`, or `None` outside the value range.
    pub fn inverse(&self, y: T) -> Option<T> {
        Self::interpolate(&self.knots, y, |p| p.1, |p| p.0)
    }

    /// Copy with one knot value shifted, without revalidating monotonicity.
    /// Meant for fault-injection tests of [`verify_regraduation`].
    pub fn perturbed(&self, knot: usize, delta: T) -> Self {
        let mut out = self.clone();
        out.knots[knot].1 = out.knots[knot].1 + delta;
        out
    }

    /// CSV with header `x,f`, 17 significant digits per value.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,f\n");
        for (x, y) in &self.knots {
            out.push_str(&format!(
                "{:.16e},{:.16e}\n",
                x.to_f64_lossy(),
                y.to_f64_lossy()
            ));
        }
        out
    }
}

/// The dyadic ladder: `levels[k]` has `f = 2^(k − depth)`.
struct Ladder<'a, T> {
    op: &'a OperatorSample<T>,
    levels: Vec<T>,
    depth: usize,
    /// Point with `f = 0` if one exists in the domain.
    zero: Option<T>,
}

impl<'a, T: Real> Ladder<'a, T> {
    fn combine(&self, a: T, b: T) -> T {
        // Ladder sums stay below the top level, which was evaluated already.
        self.op.try_eval(a, b).unwrap_or(T::infinity())
    }

    fn weight(&self, k: usize) -> T {
        T::lit(2f64.powi(k as i32 - self.depth as i32))
    }

    fn start(&self) -> T {
        self.zero.unwrap_or(self.levels[0])
    }

    /// Ladder value of `f(x)` for `x` in `[start, top]`.
    fn value(&self, x: T) -> T {
        let mut acc: Option<T> = None;
        let mut r = T::zero();
        for k in (0..self.levels.len()).rev() {
            let cand = match acc {
                None => self.levels[k],
                Some(a) => self.combine(a, self.levels[k]),
            };
            if cand <= x {
                acc = Some(cand);
                r = r + self.weight(k);
            }
        }
        let step = self.weight(0);
        let (lower, upper) = match acc {
            None => (self.start(), self.levels[0]),
            Some(a) => (a, self.combine(a, self.levels[0])),
        };
        if !(upper > lower) {
            return r;
        }
        // Quadratic through the next ladder point when it exists, so the
        // sub-step estimate is second order.
        let d1 = T::one() / (upper - lower);
        let beyond = self.combine(upper, self.levels[0]);
        let frac = if beyond.is_finite() && beyond > upper {
            let d2 = (T::one() / (beyond - upper) - d1) / (beyond - lower);
            d1 * (x - lower) + d2 * (x - lower) * (x - upper)
        } else {
            d1 * (x - lower)
        };
        r + frac.max(T::zero()).min(T::one()) * step
    }
}

/// Solve `h ⊕ h = target` for `h` in `[lo, target]` by bisection.
fn halve<T: Real>(op: &OperatorSample<T>, target: T, lo: T) -> Result<T> {
    let g = |h: T| -> Result<T> { Ok(op.eval(h, h)? - target) };
    let (mut a, mut b) = (lo, target);
    if g(a)? > T::zero() {
        return Err(Error::Solver(format!(
            "cannot bracket h ⊕ h = {target}: domain lower end {lo} already too large"
        )));
    }
    if g(b)? <= T::zero() {
        return Err(Error::Solver(format!(
            "cannot bracket h ⊕ h = {target}: operator is not increasing past {target}"
        )));
    }
    let tolerance = T::lit(BISECTION_TOLERANCE)
        .max(T::lit(8.0) * <T as crate::scalar::Scalar>::epsilon() * target.abs());
    for _ in 0..MAX_BISECTION_STEPS {
        let mid = a + (b - a) / T::lit(2.0);
        if mid <= a || mid >= b {
            break;
        }
        if g(mid)? <= T::zero() {
            a = mid;
        } else {
            b = mid;
        }
    }
    let (ga, gb) = (g(a)?.abs(), g(b)?.abs());
    let (best, residual) = if ga <= gb { (a, ga) } else { (b, gb) };
    if residual > tolerance {
        return Err(Error::Solver(format!(
            "bisection for h ⊕ h = {target} stalled at residual {residual}"
        )));
    }
    Ok(best)
}

/// Largest `z` in `[lo, below]` with `z ⊕ z ≤ z`, i.e. the identity of `⊕`
/// when the domain contains it.
fn find_zero<T: Real>(op: &OperatorSample<T>, below: T) -> Result<Option<T>> {
    let g = |z: T| -> Result<T> { Ok(op.eval(z, z)? - z) };
    let lo = op.domain.lo;
    if g(lo)? > T::zero() {
        return Ok(None);
    }
    let (mut a, mut b) = (lo, below);
    for _ in 0..MAX_BISECTION_STEPS {
        let mid = a + (b - a) / T::lit(2.0);
        if mid <= a || mid >= b {
            break;
        }
        if g(mid)? <= T::zero() {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(Some(a))
}

/// Construct and certify the regraduation of `op` anchored at
/// `config.unit`.
pub fn solve_associativity<T: Real>(
    op: &OperatorSample<T>,
    config: &SolverConfig<T>,
) -> Result<Regraduation<T>> {
    if !(MIN_DEPTH..=MAX_DEPTH).contains(&config.depth) {
        return Err(Error::InvalidArgument(format!(
            "depth must be in {MIN_DEPTH}..={MAX_DEPTH}, got {}",
            config.depth
        )));
    }
    let unit = config.unit;
    if !(op.domain.lo < unit && unit <= op.domain.hi) {
        return Err(Error::InvalidArgument(format!(
            "unit {unit} must lie in ({}, {}]",
            op.domain.lo, op.domain.hi
        )));
    }

    let reports = precheck_operator(op, config.grid, config.precheck_tolerance)?;
    let failed: Vec<String> = reports
        .iter()
        .filter(|r| !r.passed)
        .map(|r| format!("{} (defect {:.3e})", r.law, r.max_defect.to_f64_lossy()))
        .collect();
    if !failed.is_empty() {
        return Err(Error::Precheck(failed));
    }

    // Downward: halves of the unit.
    let mut down = vec![unit];
    for _ in 0..config.depth {
        let next = halve(op, *down.last().unwrap(), op.domain.lo)?;
        down.push(next);
    }
    down.reverse();

    let default_top = op
        .try_eval(op.domain.hi, op.domain.hi)
        .unwrap_or(op.domain.hi)
        .min(op.extension.hi);
    let top = config.range_cap.unwrap_or(default_top).min(op.extension.hi);
    if top < unit {
        return Err(Error::InvalidArgument(format!(
            "range cap {top} is below the unit"
        )));
    }

    // Upward: doublings until the range is covered.
    let mut levels = down;
    while *levels.last().unwrap() < top {
        let last = *levels.last().unwrap();
        match op
            .try_eval(last, last)
            .filter(|&v| op.extension.contains(v) && v > last)
        {
            Some(v) => levels.push(v),
            None => break,
        }
    }
    let reach = *levels.last().unwrap();
    let mut top = top.min(reach);
    // Operators defined only on the domain itself (tables) cannot combine
    // values above its upper end.
    if op.try_eval(top, levels[0]).is_none() {
        top = top.min(op.domain.hi);
    }

    let zero = find_zero(op, levels[0])?;
    let ladder = Ladder {
        op,
        levels,
        depth: config.depth,
        zero,
    };
    let start = ladder.start();

    let mut seeds: Vec<T> = Interval { lo: start, hi: top }.grid(257);
    seeds.extend(
        op.domain
            .grid(config.grid)
            .into_iter()
            .filter(|&x| start <= x && x <= top),
    );
    seeds.push(unit);
    seeds.sort_by(|a, b| a.partial_cmp(b).unwrap());
    seeds.dedup();

    let knot_value = |x: T| if x == unit { T::one() } else { ladder.value(x) };
    let mut knots: Vec<(T, T)> = Vec::new();
    let mut pending: Vec<((T, T), (T, T))> = Vec::new();
    let seed_knots: Vec<(T, T)> = seeds.iter().map(|&x| (x, knot_value(x))).collect();
    for w in seed_knots.windows(2).rev() {
        pending.push((w[0], w[1]));
    }
    knots.push(seed_knots[0]);
    while let Some((p, q)) = pending.pop() {
        let mid = p.0 + (q.0 - p.0) / T::lit(2.0);
        let refine = mid > p.0 && mid < q.0 && knots.len() + pending.len() < config.max_knots;
        if refine {
            let fm = knot_value(mid);
            let linear = (p.1 + q.1) / T::lit(2.0);
            let allowed = config
                .knot_tolerance
                .min(config.knot_relative_tolerance * fm.abs())
                .max(config.knot_floor);
            if (fm - linear).abs() > allowed {
                pending.push(((mid, fm), q));
                pending.push((p, (mid, fm)));
                continue;
            }
        }
        knots.push(q);
    }

    if let Some(w) = knots.windows(2).find(|w| !(w[0].1 < w[1].1)) {
        return Err(Error::Solver(format!(
            "regraduation not strictly increasing between x = {} and x = {}",
            w[0].0, w[1].0
        )));
    }

    let mut reg = Regraduation {
        knots,
        unit,
        residual: T::zero(),
        depth: config.depth,
    };
    let audit = verify_regraduation(op, &reg, config.grid, config.certify_tolerance);
    reg.residual = audit.max_residual;
    if audit.max_residual > config.certify_tolerance {
        return Err(Error::Certification {
            residual: audit.max_residual.to_f64_lossy(),
            tolerance: config.certify_tolerance.to_f64_lossy(),
        });
    }
    Ok(reg)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegraduationAudit<T> {
    pub max_residual: T,
    /// `(a, b)` at the worst residual.
    pub witness: Option<(T, T)>,
    pub pairs_checked: usize,
    /// False when the grid is too small to mean anything.
    pub sufficient_coverage: bool,
    pub passed: bool,
}

/// `max |f(a ⊕ b) − f(a) − f(b)|` over grid pairs whose arguments and
/// result all lie in the knot range.
pub fn verify_regraduation<T: Real>(
    op: &OperatorSample<T>,
    reg: &Regraduation<T>,
    grid_size: usize,
    tolerance: T,
) -> RegraduationAudit<T> {
    let grid = op.domain.grid(grid_size);
    let mut worst = T::zero();
    let mut witness = None;
    let mut pairs = 0;
    for (i, &a) in grid.iter().enumerate() {
        for &b in &grid[i..] {
            let (Some(fa), Some(fb)) = (reg.eval(a), reg.eval(b)) else {
                continue;
            };
            let Some(fab) = op.try_eval(a, b).and_then(|ab| reg.eval(ab)) else {
                continue;
            };
            pairs += 1;
            let r = (fab - fa - fb).abs();
            if r > worst {
                worst = r;
                witness = Some((a, b));
            }
        }
    }
    let sufficient_coverage = grid_size >= MIN_GRID && pairs >= grid_size;
    RegraduationAudit {
        max_residual: worst,
        witness,
        pairs_checked: pairs,
        sufficient_coverage,
        passed: sufficient_coverage && worst <= tolerance,
    }
}

/// `u(x) = f(v(x))` for every element.
pub fn apply_regraduation<T: Real>(v: &Valuation<T>, f: &Regraduation<T>) -> Result<Valuation<T>> {
    v.map_values(|id, &x| {
        f.eval(x).ok_or_else(|| {
            let (lo, hi) = f.range();
            Error::Range(format!(
                "value {x} of element `{id}` outside knot range [{lo}, {hi}]"
            ))
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval<f64> {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn precheck_addition_is_clean() {
        let reports = precheck_operator(&OperatorSample::add(iv(0.0, 1.0)), 16, 1e-12).unwrap();
        assert_eq!(reports.len(), 4);
        for r in &reports {
            assert!(r.passed, "{r:?}");
            assert!(r.max_defect <= 4.0 * f64::EPSILON, "{r:?}");
        }
    }

    #[test]
    fn precheck_odds_within_roundoff() {
        let reports = precheck_operator(&OperatorSample::odds(iv(0.0, 1.0)), 16, 1e-12).unwrap();
        assert!(reports.iter().all(|r| r.passed && r.max_defect <= 1e-12));
    }

    #[test]
    fn squared_difference_is_commutative_not_associative() {
        let op = OperatorSample::new("sqdiff", iv(0.0, 2.0), iv(0.0, 16.0), |a: f64, b| {
            Some((a - b).powi(2))
        })
        .unwrap();
        // (1⊕1)⊕2 = 4, 1⊕(1⊕2) = 0
        assert_eq!(op.eval(op.eval(1.0, 1.0).unwrap(), 2.0).unwrap(), 4.0);
        assert_eq!(op.eval(1.0, op.eval(1.0, 2.0).unwrap()).unwrap(), 0.0);
        let reports = precheck_operator(&op, 9, 1e-9).unwrap();
        assert!(reports[0].passed);
        assert!(!reports[1].passed);
        assert_eq!(reports[1].witness.len(), 3);
        assert!(!reports[2].passed);
    }

    #[test]
    fn precheck_domain_error() {
        let op = OperatorSample::new("wide", iv(0.0, 1.0), iv(0.0, 1.5), |a: f64, b| Some(a + b))
            .unwrap();
        assert!(matches!(
            precheck_operator(&op, 8, 1e-9),
            Err(Error::Domain { .. })
        ));
        assert!(precheck_operator(&OperatorSample::add(iv(0.0, 1.0)), 4, 1e-9).is_err());
    }

    #[test]
    fn additive_operator_gives_identity() {
        let op = OperatorSample::add(iv(0.0, 1.0));
        let f = solve_associativity(&op, &SolverConfig::new(1.0)).unwrap();
        for x in op.domain.grid(101) {
            assert!((f.eval(x).unwrap() - x).abs() <= 1e-9, "{x}");
        }
        assert_eq!(f.eval(1.0), Some(1.0));
        assert!(f.residual() <= 1e-9);
    }

    #[test]
    fn odds_operator_gives_log() {
        let unit = std::f64::consts::E - 1.0;
        let f = solve_associativity(
            &OperatorSample::odds(iv(0.0, 3.0)),
            &SolverConfig::new(unit),
        )
        .unwrap();
        for x in iv(0.0, 15.0).grid(301) {
            let y = f.eval(x).unwrap();
            assert!((y - x.ln_1p()).abs() <= 1e-6, "x={x} f={y}");
        }
    }

    #[test]
    fn pythagorean_operator_gives_square() {
        let f = solve_associativity(
            &OperatorSample::pythagorean(iv(0.0, 4.0)),
            &SolverConfig::new(1.0),
        )
        .unwrap();
        for x in iv(0.0, 4.0 * 2f64.sqrt()).grid(301) {
            assert!((f.eval(x).unwrap() - x * x).abs() <= 1e-6, "{x}");
        }
    }

    #[test]
    fn solver_rejects_bad_inputs() {
        let op = OperatorSample::add(iv(0.0, 1.0));
        assert!(solve_associativity(&op, &SolverConfig::new(1.0).depth(3)).is_err());
        assert!(solve_associativity(&op, &SolverConfig::new(1.0).depth(41)).is_err());
        assert!(solve_associativity(&op, &SolverConfig::new(0.0)).is_err());
        assert!(solve_associativity(&op, &SolverConfig::new(2.0)).is_err());
        let mean = OperatorSample::new("mean", iv(0.0, 1.0), iv(0.0, 1.0), |a: f64, b| {
            Some((a + b) / 2.0)
        })
        .unwrap();
        assert!(matches!(
            solve_associativity(&mean, &SolverConfig::new(0.5)),
            Err(Error::Precheck(_))
        ));
    }

    #[test]
    fn bracketing_failure_when_domain_too_small() {
        // a + b on [0.4, 1]: halving 1 needs 0.5, halving 0.5 needs 0.25 < 0.4
        let op = OperatorSample::new("add", iv(0.4, 1.0), iv(0.4, 10.0), |a: f64, b| Some(a + b))
            .unwrap();
        let err = solve_associativity(&op, &SolverConfig::new(1.0)).unwrap_err();
        assert!(matches!(err, Error::Solver(_)), "{err:?}");
    }

    #[test]
    fn perturbed_knot_is_detected() {
        let op = OperatorSample::add(iv(0.0, 1.0));
        let f = solve_associativity(&op, &SolverConfig::new(1.0)).unwrap();
        // grid points are knots, so the perturbation is seen by the audit
        let target = op.domain.grid(DEFAULT_GRID)[21];
        let k = f.knots().iter().position(|&(x, _)| x == target).unwrap();
        let audit = verify_regraduation(&op, &f.perturbed(k, 0.1), DEFAULT_GRID, 1e-6);
        assert!(audit.max_residual >= 0.05);
        assert!(!audit.passed);
    }

    #[test]
    fn one_point_grid_is_vacuous() {
        let op = OperatorSample::add(iv(0.0, 1.0));
        let f = solve_associativity(&op, &SolverConfig::new(1.0)).unwrap();
        let audit = verify_regraduation(&op, &f, 1, 1e-6);
        assert_eq!(audit.max_residual, 0.0);
        assert!(!audit.sufficient_coverage);
        assert!(!audit.passed);
    }

    #[test]
    fn knots_validation() {
        assert!(Regraduation::from_knots(vec![(0.0, 0.0), (1.0, 1.0)], 1.0).is_ok());
        assert!(Regraduation::from_knots(vec![(0.0, 0.0), (1.0, 1.0), (2.0, 0.5)], 1.0).is_err());
        assert!(Regraduation::from_knots(vec![(0.0, 0.0), (1.0, 0.9)], 1.0).is_err());
    }

    #[test]
    fn apply_identity_and_range_error() {
        let f = Regraduation::from_knots(vec![(0.0, 0.0), (1.0, 1.0), (4.0, 4.0)], 1.0).unwrap();
        let v = Valuation::new([("a", 0.25), ("b", 3.0)]).unwrap();
        assert_eq!(apply_regraduation(&v, &f).unwrap(), v);
        let bad = Valuation::new([("a", 0.25), ("far", 5.0)]).unwrap();
        let err = apply_regraduation(&bad, &f).unwrap_err();
        assert!(matches!(err, Error::Range(ref m) if m.contains("`far`")));
    }

    #[test]
    fn table_operator_bilinear() {
        let axis = [0.0, 0.5, 1.0];
        let rows: Vec<(f64, f64, f64)> = axis
            .iter()
            .flat_map(|&a| axis.iter().map(move |&b| (a, b, a + b)))
            .collect();
        let t = TableOperator::from_rows(&rows).unwrap();
        assert_eq!(t.interpolate(0.25, 0.75), Some(1.0));
        assert_eq!(t.interpolate(1.5, 0.0), None);
        let op = OperatorSample::from_table("table", t).unwrap();
        assert_eq!(op.domain, iv(0.0, 1.0));
        assert_eq!(op.extension, iv(0.0, 2.0));
        assert!(TableOperator::from_rows(&rows[..8]).is_err());
    }

    #[test]
    fn csv_has_seventeen_digits() {
        let f = Regraduation::from_knots(vec![(0.0, 0.0), (1.0, 1.0)], 1.0).unwrap();
        let csv = f.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("x,f"));
        assert_eq!(
            lines.next(),
            Some("0.0000000000000000e0,0.0000000000000000e0")
        );
    }
}
