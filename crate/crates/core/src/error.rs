use thiserror::Error;

use crate::law::LawReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate element id `{0}`")]
    DuplicateElement(String),

    #[error("unknown element id `{0}`")]
    UnknownElement(String),

    #[error("element ids must be non-empty")]
    EmptyElementId,

    #[error("relation table must be {elements}x{elements}")]
    TableShape { elements: usize },

    #[error("cover relation contains a cycle: {}", .0.join(" < "))]
    Cycle(Vec<String>),

    #[error("order axioms violated: {}", summarize_failures(.0))]
    AxiomViolation(Vec<LawReport>),

    #[error("lattice has no bottom element")]
    NoBottom,

    #[error("no value for element `{0}`")]
    MissingValue(String),

    #[error("value for element `{0}` is not finite")]
    NonFiniteValue(String),

    #[error("{what}: limit is {limit}, requested {requested}")]
    Capacity {
        what: &'static str,
        limit: usize,
        requested: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("incoherent probabilities: {0}")]
    Coherence(String),

    #[error("out of range: {0}")]
    Range(String),

    #[error("operator left its extension interval at ({a}, {b})")]
    Domain { a: f64, b: f64 },

    #[error("solver failed: {0}")]
    Solver(String),

    #[error("operator precheck failed: {}", summarize_failures_op(.0))]
    Precheck(Vec<String>),

    #[error("certification failed: residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    Certification { residual: f64, tolerance: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("distribution not normalized: total mass {0}")]
    Normalization(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of a law, a precheck or a certificate, as opposed to
    /// malformed input.
    pub fn is_law_failure(&self) -> bool {
        matches!(
            self,
            Error::Precheck(_) | Error::Certification { .. } | Error::Solver(_)
        )
    }

    /// Stable snake_case tag for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DuplicateElement(_) => "duplicate_element",
            Error::UnknownElement(_) => "unknown_element",
            Error::EmptyElementId => "empty_element_id",
            Error::TableShape { .. } => "table_shape",
            Error::Cycle(_) => "cycle",
            Error::AxiomViolation(_) => "axiom_violation",
            Error::NoBottom => "no_bottom",
            Error::MissingValue(_) => "missing_value",
            Error::NonFiniteValue(_) => "non_finite_value",
            Error::Capacity { .. } => "capacity",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Parse { .. } => "parse",
            Error::Coherence(_) => "coherence",
            Error::Range(_) => "range",
            Error::Domain { .. } => "domain",
            Error::Solver(_) => "solver",
            Error::Precheck(_) => "precheck",
            Error::Certification { .. } => "certification",
            Error::Degenerate(_) => "degenerate",
            Error::Normalization(_) => "normalization",
            Error::Io(_) => "io",
        }
    }
}

fn summarize_failures(reports: &[LawReport]) -> String {
    reports
        .iter()
        .filter(|r| !r.passed)
        .map(|r| format!("{} {:?}", r.law, r.witness))
        .collect::<Vec<_>>()
        .join("; ")
}

fn summarize_failures_op(laws: &[String]) -> String {
    laws.join(", ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
