//! Exact-arithmetic invariants of commutative differential graded algebras
//! over the rationals.
//!
//! The crate provides four layers, each building on the previous one:
//!
//! * [`scalar`], [`linalg`], [`basis`]: exact rational scalars, sparse
//!   vectors, reduced row echelon forms, and graded bases.
//! * [`algebra`], [`morphism`], [`ideal`], [`quotient`]: finite-dimensional
//!   graded-commutative differential algebras (explicit tables, truncated
//!   free algebras, tensor products, semifree extensions), validated
//!   morphisms, graded differential ideals and their powers, quotients.
//! * [`homology`]: cohomology of a validated algebra with canonical cocycle
//!   representatives, induced maps, quasi-isomorphism certification.
//! * [`sullivan`], [`invariants`], [`certcheck`]: relative semifree models of
//!   surjective quotient maps, join-style models of multiplication maps,
//!   nilpotency invariants (cup-length, zero-divisor cup-length, kernel
//!   nilpotency), the degreewise linear-feasibility solver for module
//!   retractions, and an independent checker for every certificate the
//!   solver emits.
//!
//! All arithmetic is exact; no floating point is used anywhere. Every
//! computation that depends on a degree cutoff reports whether its answer is
//! certified or merely a truncated lower bound.

pub mod algebra;
pub mod basis;
pub mod certcheck;
pub mod error;
pub mod homology;
pub mod ideal;
pub mod invariants;
pub mod linalg;
pub mod morphism;
pub mod quotient;
pub mod random;
pub mod scalar;
pub mod sullivan;

pub use algebra::Algebra;
pub use basis::{BasisElement, GradedBasis};
pub use error::Error;
pub use homology::CohomologyAlgebra;
pub use ideal::GradedIdeal;
pub use invariants::{BoundReport, RetractionCertificate};
pub use linalg::{Echelon, SparseVec};
pub use morphism::{LinearMap, Morphism};
pub use scalar::Scalar;
pub use sullivan::{JoinModel, RelativeModel};
