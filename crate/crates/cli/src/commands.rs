use std::fmt::Write as _;
use std::path::Path;

use serde_json::json;
use sumrule::exemplars::battery::{self, ExemplarReport, Limit};
use sumrule::exemplars::mutual_info::mutual_information;
use sumrule::exemplars::sorkin::sorkin_terms;
use sumrule::regrad::{
    precheck_operator, solve_associativity, verify_regraduation, OperatorSample, SolverConfig,
};
use sumrule::valuation::{
    audit_sum_rule, check_disjoint_additivity, check_order_preserving, AuditReport,
};
use sumrule::{
    check_poset_axioms, io, to_lattice, verify_consistency_relation, verify_lattice_laws, Bound,
    Error, LawReport, Poset, Result, Valuation,
};

use crate::output::{sci, verdict, Outcome};

pub struct Settings {
    pub tolerance: Option<f64>,
    pub seed: u64,
    pub depth: usize,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))
}

fn load_poset(path: &Path) -> Result<Poset> {
    io::parse_poset(&read(path)?)?.build()
}

fn law_lines(out: &mut String, reports: &[LawReport]) {
    for r in reports {
        let _ = writeln!(out, "{r}");
    }
}

pub fn check(path: &Path) -> Result<Outcome> {
    let poset = load_poset(path)?;
    let covers = poset.hasse_reduction().len();
    let axioms = check_poset_axioms(poset.elements(), poset.relation())?;
    let mut text = format!("poset: {} elements, {covers} covers\n", poset.len());
    law_lines(&mut text, &axioms);

    let lattice = match to_lattice(&poset) {
        Ok(l) => l,
        Err(not) => {
            let _ = writeln!(text, "FAIL lattice: {not}");
            let candidates = match &not.bound {
                Bound::Ambiguous(c) => c.clone(),
                _ => Vec::new(),
            };
            let report = json!({
                "elements": poset.len(),
                "covers": covers,
                "axioms": axioms,
                "lattice": {
                    "is_lattice": false,
                    "witness": {
                        "x": not.x,
                        "y": not.y,
                        "operation": not.operation,
                        "candidates": candidates,
                    },
                },
            });
            return Ok(Outcome::new(false, text, report));
        }
    };
    text.push_str("PASS lattice: every pair has a unique join and meet\n");
    let laws = verify_lattice_laws(&lattice);
    law_lines(&mut text, &laws);
    let consistency = verify_consistency_relation(&lattice);
    law_lines(&mut text, std::slice::from_ref(&consistency));
    let passed =
        sumrule::law::all_passed(&axioms) && sumrule::law::all_passed(&laws) && consistency.passed;
    let report = json!({
        "elements": poset.len(),
        "covers": covers,
        "axioms": axioms,
        "lattice": { "is_lattice": true },
        "laws": laws,
        "consistency": consistency,
    });
    Ok(Outcome::new(passed, text, report))
}

fn audit_line(out: &mut String, r: &AuditReport<f64>, tolerance: f64) {
    let at = if r.witness.is_empty() {
        String::new()
    } else {
        format!(" at ({})", r.witness.join(", "))
    };
    let _ = writeln!(
        out,
        "{} {}: max residual {}{at} (tolerance {})",
        verdict(r.passed),
        r.check,
        sci(r.max_residual),
        sci(tolerance)
    );
}

pub fn audit(poset: &Path, valuation: &Path, settings: &Settings) -> Result<Outcome> {
    let poset = load_poset(poset)?;
    let lattice = to_lattice(&poset)
        .map_err(|e| Error::InvalidArgument(format!("poset is not a lattice: {e}")))?;
    let mut v: Valuation<f64> = io::parse_valuation(&read(valuation)?)?;
    if let Some(t) = settings.tolerance {
        v = v.with_tolerance(t)?;
    }
    let missing: Vec<&str> = poset
        .elements()
        .iter()
        .map(String::as_str)
        .filter(|id| v.get(id).is_none())
        .collect();
    let extraneous = v.extraneous(&lattice);
    if !missing.is_empty() || !extraneous.is_empty() {
        let mut message = String::from("valuation does not match the poset");
        if !missing.is_empty() {
            let _ = write!(message, "; missing: {}", missing.join(", "));
        }
        if !extraneous.is_empty() {
            let _ = write!(message, "; not in poset: {}", extraneous.join(", "));
        }
        return Err(Error::InvalidArgument(message));
    }
    let tolerance = *v.tolerance();
    let order = check_order_preserving(&lattice, &v)?;
    let disjoint = check_disjoint_additivity(&lattice, &v)?;
    let sum_rule = audit_sum_rule(&lattice, &v)?;
    let reports = [order, disjoint.additivity, disjoint.bottom, sum_rule];
    let mut text = String::new();
    for r in &reports {
        audit_line(&mut text, r, tolerance);
    }
    let passed = reports.iter().all(|r| r.passed);
    let report = json!({ "tolerance": tolerance, "audits": reports });
    Ok(Outcome::new(passed, text, report))
}

pub fn hasse(path: &Path) -> Result<Outcome> {
    let poset = load_poset(path)?;
    let report = json!({ "elements": poset.elements(), "covers": poset.cover_ids() });
    Ok(Outcome::new(true, io::write_poset_text(&poset), report))
}

#[derive(Debug, Clone, Copy)]
pub enum BoundKind {
    Meet,
    Join,
}

pub fn bound(path: &Path, x: &str, y: &str, kind: BoundKind) -> Result<Outcome> {
    let poset = load_poset(path)?;
    let (bound, what, candidates_are) = match kind {
        BoundKind::Join => (
            poset.least_upper_bound(x, y)?,
            "upper",
            "minimal upper bounds",
        ),
        BoundKind::Meet => (
            poset.greatest_lower_bound(x, y)?,
            "lower",
            "maximal lower bounds",
        ),
    };
    Ok(match bound {
        Bound::Unique(id) => {
            let report = json!({ "x": x, "y": y, "result": id });
            Outcome::new(true, format!("{id}\n"), report)
        }
        Bound::Missing => {
            let report = json!({ "x": x, "y": y, "result": null, "candidates": [] });
            Outcome::new(
                false,
                format!("`{x}` and `{y}` have no common {what} bound\n"),
                report,
            )
        }
        Bound::Ambiguous(c) => {
            let text = format!(
                "`{x}` and `{y}` have no unique {what} bound; {candidates_are}: {}\n",
                c.join(", ")
            );
            let report = json!({ "x": x, "y": y, "result": null, "candidates": c });
            Outcome::new(false, text, report)
        }
    })
}

fn resolve_operator(spec: &str) -> Result<OperatorSample<f64>> {
    if let Some(op) = OperatorSample::builtin(spec) {
        return Ok(op);
    }
    let path = Path::new(spec);
    if !path.is_file() {
        return Err(Error::InvalidArgument(format!(
            "unknown operator `{spec}`; expected one of {} or a table file",
            sumrule::regrad::BUILTIN_OPERATORS.join(", ")
        )));
    }
    let table = io::parse_operator_table(&read(path)?)?;
    OperatorSample::from_table(path.display().to_string(), table)
}

/// Regraduation of a built-in operator in closed form, normalized to
/// `f(unit) = 1`.
type ClosedForm = (&'static str, Box<dyn Fn(f64) -> f64>);

fn closed_form(name: &str, unit: f64) -> Option<ClosedForm> {
    match name {
        "add" => Some(("x / u", Box::new(move |x| x / unit))),
        "odds" => Some((
            "ln(1 + x) / ln(1 + u)",
            Box::new(move |x| x.ln_1p() / unit.ln_1p()),
        )),
        "pythagorean" => Some(("x² / u²", Box::new(move |x| (x * x) / (unit * unit)))),
        _ => None,
    }
}

pub fn regraduate(
    spec: &str,
    unit: Option<f64>,
    grid: usize,
    settings: &Settings,
) -> Result<Outcome> {
    let op = resolve_operator(spec)?;
    let unit = unit.unwrap_or(op.domain.hi);
    let mut config = SolverConfig::new(unit).depth(settings.depth).grid(grid);
    if let Some(t) = settings.tolerance {
        config.certify_tolerance = t;
    }
    let mut notes = format!(
        "operator {} on [{}, {}], unit {unit}, depth {}\n",
        op.name, op.domain.lo, op.domain.hi, config.depth
    );
    let prechecks = precheck_operator(&op, grid, config.precheck_tolerance)?;
    for r in &prechecks {
        let _ = writeln!(
            notes,
            "{} {}: max defect {}",
            verdict(r.passed),
            r.law,
            sci(r.max_defect)
        );
    }
    if prechecks.iter().any(|r| !r.passed) {
        let report = json!({
            "operator": op.name,
            "unit": unit,
            "depth": config.depth,
            "precheck": prechecks,
            "certificate": null,
        });
        return Ok(Outcome {
            passed: false,
            text: String::new(),
            notes,
            report,
        });
    }
    let reg = solve_associativity(&op, &config)?;
    let audit = verify_regraduation(&op, &reg, grid, config.certify_tolerance);
    let _ = writeln!(
        notes,
        "{} certification: residual {} over {} grid pairs of {grid}x{grid} (tolerance {}), {} knots",
        verdict(audit.passed),
        sci(audit.max_residual),
        audit.pairs_checked,
        sci(config.certify_tolerance),
        reg.knots().len()
    );
    let deviation = closed_form(&op.name, unit).map(|(label, g)| {
        let worst = op
            .domain
            .grid(grid)
            .into_iter()
            .filter_map(|x| reg.eval(x).map(|f| (f - g(x)).abs()))
            .fold(0.0f64, f64::max);
        let _ = writeln!(notes, "closed form {label}: max deviation {}", sci(worst));
        json!({ "form": label, "max_deviation": worst })
    });
    let report = json!({
        "operator": op.name,
        "unit": unit,
        "depth": config.depth,
        "precheck": prechecks,
        "certificate": audit,
        "closed_form": deviation,
        "knots": reg.knots(),
    });
    Ok(Outcome {
        passed: audit.passed,
        text: reg.to_csv(),
        notes,
        report,
    })
}

fn render_report(out: &mut String, r: &ExemplarReport) {
    let _ = writeln!(out, "== {}: {} (seed {})", r.exemplar, r.identity, r.seed);
    for c in &r.checks {
        let cases = if c.cases == 1 {
            "1 case".to_string()
        } else {
            format!("{} cases", c.cases)
        };
        let value = match (c.observed, c.limit) {
            (Some(o), Some(Limit::AtMost(l))) => format!(": {} <= {}", sci(o), sci(l)),
            (Some(o), Some(Limit::AtLeast(l))) => format!(": {} >= {}", sci(o), sci(l)),
            _ => String::new(),
        };
        let _ = writeln!(out, "{} {}{value} [{cases}]", verdict(c.passed), c.name);
    }
}

pub fn demo(name: &str, input: Option<&Path>, settings: &Settings) -> Result<Outcome> {
    if let Some(path) = input {
        return demo_input(name, path, settings);
    }
    let reports = if name == "all" {
        battery::run_all(settings.seed)?
    } else {
        vec![battery::run_exemplar(name, settings.seed)?]
    };
    let mut text = String::new();
    for r in &reports {
        render_report(&mut text, r);
    }
    let passed_count = reports.iter().filter(|r| r.passed()).count();
    if reports.len() > 1 {
        let _ = writeln!(text, "{passed_count} of {} exemplars passed", reports.len());
    }
    let passed = passed_count == reports.len();
    Ok(Outcome::new(
        passed,
        text,
        json!({ "seed": settings.seed, "exemplars": reports }),
    ))
}

fn demo_input(name: &str, path: &Path, settings: &Settings) -> Result<Outcome> {
    let content = read(path)?;
    match name {
        "mutual-information" => {
            let joint = io::parse_joint_distribution::<f64>(&content)?;
            let mi = mutual_information(&joint);
            let tolerance = settings.tolerance.unwrap_or(1e-12);
            let agree = mi.disagreement() <= tolerance;
            let nonnegative = mi.via_identity >= -tolerance;
            let text = format!(
                "H(A) = {}\nH(B) = {}\nH(A,B) = {}\nI via identity = {}\nI direct = {}\n\
                 {} identity vs direct: {} <= {}\n{} I >= -{}\n",
                mi.h_a,
                mi.h_b,
                mi.h_ab,
                mi.via_identity,
                mi.direct,
                verdict(agree),
                sci(mi.disagreement()),
                sci(tolerance),
                verdict(nonnegative),
                sci(tolerance),
            );
            Ok(Outcome::new(agree && nonnegative, text, json!({ "mutual_information": mi, "tolerance": tolerance })))
        }
        "three-slit" => {
            let slits = io::parse_slits::<f64>(&content)?;
            let terms = sorkin_terms(&slits)?;
            let scale = slits.amplitudes().iter().map(|a| a.norm_sqr()).sum::<f64>().max(1.0);
            let tolerance = settings.tolerance.unwrap_or(1e-12 * scale);
            let mut text = String::new();
            for (a, b, v) in &terms.i2 {
                let _ = writeln!(text, "I2({a},{b}) = {}", sci(*v));
            }
            for (a, b, c, v) in &terms.i3 {
                let _ = writeln!(text, "I3({a},{b},{c}) = {}", sci(*v));
            }
            let passed = terms.max_abs_i3() <= tolerance;
            let _ = writeln!(text, "{} max |I3|: {} <= {}", verdict(passed), sci(terms.max_abs_i3()), sci(tolerance));
            Ok(Outcome::new(passed, text, json!({ "terms": terms, "tolerance": tolerance })))
        }
        _ => Err(Error::InvalidArgument(format!(
            "--input is only accepted by the mutual-information and three-slit exemplars, not `{name}`"
        ))),
    }
}
