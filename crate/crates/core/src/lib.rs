//! Exact symbolic engine for lattice-type generalized vertex algebras.
//!
//! The engine builds the Fock space of a rational Gram matrix, realizes
//! vertex operators attached to elements of a finitely generated subgroup
//! of the weight space, and evaluates every structural identity of the
//! resulting algebra (locality, skew-symmetry, operator product expansions,
//! the Borcherds identity, translation covariance, associativity) as exact
//! statements about finitely many coefficients.  All arithmetic is carried
//! out in cyclotomic extensions of the rationals; nothing is approximated.
//!
//! Layering, bottom to top:
//!
//! * [`rat`] — arbitrary-precision rationals.
//! * [`scalar`] — exact cyclotomic numbers (`Σ cᵢ·e^{iπqᵢ}`).
//! * [`linalg`] — exact matrix utilities (Gaussian elimination, Hermite form).
//! * [`series`] — sparse formal series with rational exponents and explicit
//!   truncation windows.
//! * [`lattice`] — Gram data, subgroups, braiding phases, two-cocycles.
//! * [`fock`] — the Fock space and its Heisenberg action.
//! * [`engine`] — vertex operators, modes, and the identity checkers.
//! * [`modules`] — coset modules and twisted-module views.

pub mod engine;
pub mod error;
pub mod fock;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod modules;
pub mod rat;
pub mod report;
pub mod scalar;
pub mod series;

pub use error::{Error, Result};
pub use rat::Rat;
pub use scalar::Scalar;
