//! Klein coverings of genus-2 curves at the level of their defining data.
//!
//! A genus-2 curve is the double cover of P¹ branched at six points. Its
//! 2-torsion is modelled combinatorially on subsets of those points
//! ([`torsion`]), Klein four-subgroups are either non-isotropic (a marked
//! triple of points) or isotropic (a partition into three pairs), and the
//! Prym variety of the associated Klein covering is an abelian threefold
//! isogenous to a product of three elliptic curves. [`prym`] computes its
//! period matrix from the six points and inverts that map again.

pub mod cli;
pub mod elliptic;
pub mod error;
pub mod lattice;
pub mod projective;
pub mod prym;
pub mod serde_complex;
pub mod snf;
pub mod torsion;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Default tolerance for membership and equivalence tests.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
