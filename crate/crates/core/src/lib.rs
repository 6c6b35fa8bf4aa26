//! Elliptic discrete Painleve equations with affine Weyl group symmetry of type E8.
//!
//! * [`picard`]: exact integer arithmetic on the rank-10 Picard lattice, reflections,
//!   Kac translations and E8 short-vector enumeration.
//! * [`elliptic`]: theta and Jacobian elliptic functions for complex arguments.
//! * [`weyl`]: the birational action of the extended affine Weyl group on surface data.
//! * [`painleve`]: closed-form elliptic Painleve maps and their reductions.
//! * [`weierstrass`]: the Landen/Weierstrass correspondence.
//! * [`suites`]: verification suites used by the command line and the acceptance tests.

#![allow(clippy::needless_range_loop)]

pub mod elliptic;
pub mod painleve;
pub mod picard;
pub mod projective;
pub mod scalar;
pub mod suites;
pub mod weierstrass;
pub mod weyl;
pub mod word;

pub use elliptic::{make_context, EllipticContext, EllipticError, JacobiValues, ThetaValues};
pub use projective::ProjectiveValue;
pub use scalar::{Cx, DoubleDouble, Precision, Real};
pub use word::{Generator, Word};
