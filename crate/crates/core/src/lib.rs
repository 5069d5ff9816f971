//! Finite order theory and the arithmetic it forces.
//!
//! * [`poset`] and [`lattice`]: finite posets, bounds, Hasse diagrams and
//!   exhaustive checks of the order axioms and lattice laws.
//! * [`builders`]: subset, statement, chain, divisor and product lattices.
//! * [`valuation`]: real-valued quantifications of lattice elements and audits
//!   for monotonicity, disjoint additivity and inclusion-exclusion.
//! * [`regrad`]: numerical solution of the associativity equation, turning a
//!   combination operator into ordinary addition by a monotone regraduation.
//! * [`exemplars`]: eight concrete instances of inclusion-exclusion, from
//!   probabilities to interference terms.
//! * [`io`]: text, JSON and CSV formats used by the command-line tool.
//!
//! Numeric code is generic over [`Scalar`] (and [`Real`] where transcendental
//! functions are needed); the aliases below fix the common choices.

// `!(a < b)` is the NaN-rejecting form used throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod builders;
pub mod error;
pub mod exemplars;
pub mod io;
pub mod lattice;
pub mod law;
pub mod numtheory;
pub mod poset;
pub mod regrad;
pub mod relation;
pub mod scalar;
pub mod valuation;

pub use builders::{
    boolean_lattice, chain, divisor_lattice, product_lattice, statement_lattice, LabeledLattice,
    Payload,
};
pub use error::{Error, Result};
pub use lattice::{
    to_lattice, verify_consistency_relation, verify_lattice_laws, Lattice, NotALattice,
};
pub use law::LawReport;
pub use poset::{check_poset_axioms, transitive_closure, Bound, Comparability, Poset};
pub use relation::Relation;
pub use scalar::{Real, Scalar};
pub use valuation::{AuditReport, Valuation};

/// Exact rational scalar for audits that must come out exactly zero.
pub type Rational = num_rational::Rational64;

pub type Valuation64 = Valuation<f64>;
pub type Valuation32 = Valuation<f32>;
pub type ExactValuation = Valuation<Rational>;
pub type AuditReport64 = AuditReport<f64>;
pub type ExactAuditReport = AuditReport<Rational>;

pub type OperatorSample64 = regrad::OperatorSample<f64>;
pub type Regraduation64 = regrad::Regraduation<f64>;
pub type Regraduation32 = regrad::Regraduation<f32>;

pub type JointDistribution64 = exemplars::mutual_info::JointDistribution<f64>;
pub type SphericalTriangle64 = exemplars::spherical::SphericalTriangle<f64>;
pub type SlitConfiguration64 = exemplars::sorkin::SlitConfiguration<f64>;
