//! File formats.
//!
//! * Posets as text, one relation per line: `a < b` (chains `a < b < c` are
//!   accepted), a lone `a` for an isolated element, `#` for comments. Or
//!   JSON: `{"elements": [...], "covers": [["a", "b"], ...]}`.
//! * Valuations as CSV with header `element,value`.
//! * Operator tables as CSV rows `a,b,result`.
//! * Joint distributions as a CSV matrix of probabilities.
//! * Slit amplitudes as CSV rows `label,re,im`.
//!
//! CSV readers skip `#` comment lines and an optional header row.

use std::collections::HashSet;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exemplars::mutual_info::JointDistribution;
use crate::exemplars::sorkin::SlitConfiguration;
use crate::poset::Poset;
use crate::regrad::TableOperator;
use crate::scalar::{Real, Scalar};
use crate::valuation::Valuation;

/// Elements in order of first appearance, and the declared pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetSpec {
    pub elements: Vec<String>,
    pub covers: Vec<(String, String)>,
}

impl PosetSpec {
    pub fn build(&self) -> Result<Poset> {
        Poset::from_covers(self.elements.clone(), &self.covers)
    }

    fn declare(&mut self, seen: &mut HashSet<String>, id: &str) {
        if seen.insert(id.to_string()) {
            self.elements.push(id.to_string());
        }
    }
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Parse either format, choosing JSON when the first non-blank character
/// is `{`.
pub fn parse_poset(input: &str) -> Result<PosetSpec> {
    if input.trim_start().starts_with('{') {
        parse_poset_json(input)
    } else {
        parse_poset_text(input)
    }
}

pub fn parse_poset_text(input: &str) -> Result<PosetSpec> {
    let mut spec = PosetSpec::default();
    let mut seen = HashSet::new();
    for (k, raw) in input.lines().enumerate() {
        let line = k + 1;
        let text = raw.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let ids: Vec<&str> = text.split('<').map(str::trim).collect();
        if let Some(pos) = ids.iter().position(|id| id.is_empty()) {
            let what = if ids.len() == 1 {
                "element"
            } else if pos == 0 {
                "left side"
            } else {
                "right side"
            };
            return Err(parse_error(line, format!("missing {what} in `{text}`")));
        }
        if let Some(bad) = ids
            .iter()
            .find(|id| id.chars().any(|c| c.is_whitespace() || c == '>'))
        {
            return Err(parse_error(line, format!("invalid element id `{bad}`")));
        }
        for id in &ids {
            spec.declare(&mut seen, id);
        }
        for pair in ids.windows(2) {
            spec.covers.push((pair[0].to_string(), pair[1].to_string()));
        }
    }
    Ok(spec)
}

pub fn parse_poset_json(input: &str) -> Result<PosetSpec> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Raw {
        #[serde(default)]
        elements: Vec<String>,
        #[serde(default)]
        covers: Vec<(String, String)>,
    }
    let raw: Raw = serde_json::from_str(input).map_err(|e| parse_error(e.line(), e.to_string()))?;
    let mut spec = PosetSpec::default();
    let mut seen = HashSet::new();
    for id in &raw.elements {
        if !seen.insert(id.clone()) {
            return Err(Error::DuplicateElement(id.clone()));
        }
        spec.elements.push(id.clone());
    }
    for (a, b) in &raw.covers {
        spec.declare(&mut seen, a);
        spec.declare(&mut seen, b);
    }
    spec.covers = raw.covers;
    Ok(spec)
}

/// Text rendering of the cover relation, isolated elements on their own
/// line. [`parse_poset_text`] reads it back to the same order.
pub fn write_poset_text(poset: &Poset) -> String {
    let covers = poset.cover_ids();
    let mut touched = HashSet::new();
    for (a, b) in &covers {
        touched.insert(a.as_str());
        touched.insert(b.as_str());
    }
    let mut out = String::new();
    for id in poset.elements() {
        if !touched.contains(id.as_str()) {
            out.push_str(id);
            out.push('\n');
        }
    }
    for (a, b) in &covers {
        out.push_str(&format!("{a} < {b}\n"));
    }
    out
}

pub fn write_poset_json(poset: &Poset) -> String {
    let spec = PosetSpec {
        elements: poset.elements().to_vec(),
        covers: poset.cover_ids(),
    };
    serde_json::to_string_pretty(&spec).expect("plain strings serialize")
}

/// Non-comment CSV records with their line numbers, header row dropped when
/// its first field is not parseable (or matches `header`).
fn csv_records(input: &str, header: &[&str]) -> Result<Vec<(usize, Vec<String>)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(input.as_bytes());
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_error(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let fields: Vec<String> = record.iter().map(str::to_string).collect();
        if fields.iter().all(String::is_empty) {
            continue;
        }
        let is_header = out.is_empty()
            && fields.len() == header.len()
            && fields
                .iter()
                .zip(header)
                .all(|(f, h)| f.eq_ignore_ascii_case(h));
        if !is_header {
            out.push((line, fields));
        }
    }
    Ok(out)
}

fn expect_fields(line: usize, fields: &[String], n: usize, shape: &str) -> Result<()> {
    if fields.len() != n {
        return Err(parse_error(
            line,
            format!("expected `{shape}`, found {} fields", fields.len()),
        ));
    }
    Ok(())
}

fn number<T: FromStr>(line: usize, field: &str) -> Result<T> {
    field
        .parse()
        .map_err(|_| parse_error(line, format!("`{field}` is not a number")))
}

pub fn parse_valuation<T: Scalar>(input: &str) -> Result<Valuation<T>> {
    let mut values = Vec::new();
    for (line, fields) in csv_records(input, &["element", "value"])? {
        expect_fields(line, &fields, 2, "element,value")?;
        if fields[0].is_empty() {
            return Err(parse_error(line, "empty element id"));
        }
        values.push((fields[0].clone(), number::<T>(line, &fields[1])?));
    }
    Valuation::new(values)
}

pub fn write_valuation<T: Scalar>(valuation: &Valuation<T>) -> String {
    let mut out = String::from("element,value\n");
    for (id, v) in valuation.iter() {
        out.push_str(&format!("{id},{v}\n"));
    }
    out
}

pub fn parse_operator_table<T: Real>(input: &str) -> Result<TableOperator<T>> {
    let mut rows = Vec::new();
    for (line, fields) in csv_records(input, &["a", "b", "result"])? {
        expect_fields(line, &fields, 3, "a,b,result")?;
        rows.push((
            number::<T>(line, &fields[0])?,
            number::<T>(line, &fields[1])?,
            number::<T>(line, &fields[2])?,
        ));
    }
    TableOperator::from_rows(&rows)
}

pub fn parse_joint_distribution<T: Real>(input: &str) -> Result<JointDistribution<T>> {
    let mut rows = Vec::new();
    for (line, fields) in csv_records(input, &[])? {
        rows.push(
            fields
                .iter()
                .map(|f| number::<T>(line, f))
                .collect::<Result<Vec<T>>>()?,
        );
    }
    JointDistribution::new(rows)
}

pub fn parse_slits<T: Real>(input: &str) -> Result<SlitConfiguration<T>> {
    let mut slits = Vec::new();
    for (line, fields) in csv_records(input, &["label", "re", "im"])? {
        expect_fields(line, &fields, 3, "label,re,im")?;
        let amp = Complex::new(
            number::<T>(line, &fields[1])?,
            number::<T>(line, &fields[2])?,
        );
        slits.push((fields[0].clone(), amp));
    }
    SlitConfiguration::new(slits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_with_comments_chains_and_isolated() {
        let spec =
            parse_poset_text("# diamond\nbot < a < top\nbot < b\nb < top\n\nloner\n").unwrap();
        assert_eq!(spec.elements, ["bot", "a", "top", "b", "loner"]);
        assert_eq!(spec.covers.len(), 4);
        let p = spec.build().unwrap();
        assert!(p.leq(p.index_of("bot").unwrap(), p.index_of("top").unwrap()));
    }

    #[test]
    fn text_errors_carry_line_numbers() {
        let err = parse_poset_text("a < b\n< c\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = parse_poset_text("a < b\nb <\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, ref message } if message.contains("right")));
        assert!(matches!(
            parse_poset_text("x y < z"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let spec =
            parse_poset(r#"{"elements":["a","b","c"],"covers":[["a","b"],["b","c"]]}"#).unwrap();
        let p = spec.build().unwrap();
        let again = parse_poset(&write_poset_json(&p)).unwrap().build().unwrap();
        assert_eq!(p.elements(), again.elements());
        assert_eq!(p.relation(), again.relation());
        let text = parse_poset_text(&write_poset_text(&p))
            .unwrap()
            .build()
            .unwrap();
        assert_eq!(p.relation(), text.relation());
    }

    #[test]
    fn json_errors() {
        assert!(matches!(
            parse_poset("{\"elements\": [1]}"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_poset(r#"{"elements":["a","a"]}"#),
            Err(Error::DuplicateElement(_))
        ));
    }

    #[test]
    fn valuation_csv() {
        let v: Valuation<f64> = parse_valuation("element,value\n# note\na, 1.5\nb,2\n").unwrap();
        assert_eq!(v.get("a"), Some(&1.5));
        assert_eq!(v.len(), 2);
        assert!(matches!(
            parse_valuation::<f64>("element,value\na,1\nb,x\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(parse_valuation::<f64>("a,1,2\n").is_err());
        let back: Valuation<f64> = parse_valuation(&write_valuation(&v)).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn matrices_and_slits() {
        let j: JointDistribution<f64> = parse_joint_distribution("0.4,0.1\n0.1,0.4\n").unwrap();
        assert_eq!(j.shape(), (2, 2));
        let s: SlitConfiguration<f64> = parse_slits("label,re,im\nA,1,0\nB,0,1\n").unwrap();
        assert_eq!(s.labels(), ["A", "B"]);
        assert!(parse_slits::<f64>("A,1\n").is_err());
    }

    #[test]
    fn operator_table() {
        let mut rows = String::from("a,b,result\n");
        for a in 0..3 {
            for b in 0..3 {
                rows.push_str(&format!("{a},{b},{}\n", a + b));
            }
        }
        let t: TableOperator<f64> = parse_operator_table(&rows).unwrap();
        assert_eq!(t.interpolate(0.5, 1.5), Some(2.0));
    }
}
