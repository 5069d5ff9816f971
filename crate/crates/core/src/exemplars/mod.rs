//! Concrete instances of inclusion-exclusion, one module per row of the
//! classic table: measures on sets (see [`crate::valuation`]), probability,
//! the min-max rule, divisors, mutual information, the Euler
//! characteristic, spherical excess and three-slit interference.
//!
//! [`battery`] runs seeded fixture batteries over all of them.

pub mod battery;
pub mod divisors;
pub mod euler;
pub mod mutual_info;
pub mod polya;
pub mod probability;
pub mod sorkin;
pub mod spherical;

pub use divisors::{divisor_log_identity, DivisorIdentity};
pub use euler::{euler_characteristic, PolytopeCounts, PLATONIC_SOLIDS};
pub use mutual_info::{mutual_information, JointDistribution, MutualInformation};
pub use polya::{polya_min_max, MinMax};
pub use probability::probability_sum_rule;
pub use sorkin::{sorkin_terms, InterferenceTerms, SlitConfiguration};
pub use spherical::{spherical_excess, SphericalExcess, SphericalTriangle};
