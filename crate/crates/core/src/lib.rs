//! Finite topological spaces, their one-point quotients, and reconstruction
//! of a space from its family of quotients.
//!
//! Points are labelled `1..=n` (`n <= 64`) and sets are bitmasks. Identifying
//! point `i` with the top point `n` gives a space on `1..n-1`; the family of
//! all `n - 1` such quotients is the input to [`reconstruct()`].

pub mod canon;
pub mod clans;
pub mod error;
pub mod format;
pub mod oracle;
pub mod pointset;
pub mod properties;
pub mod quotient;
pub mod reconstruct;
pub mod space;
pub mod trace;

pub use canon::{
    canonical_form, canonical_labeling, canonical_space, family_equal, is_homeomorphic,
    CanonicalCertificate,
};
pub use error::{Error, Result};
pub use pointset::PointSet;
pub use quotient::{characterize_set, identify, quotient_family, QuotientFamily, QuotientResult};
pub use reconstruct::{
    reconstruct, reconstruct_with, verify_candidate, ReconstructOptions, SearchStatus, SolutionSet,
};
pub use space::{FiniteSpace, SystemClassification};
