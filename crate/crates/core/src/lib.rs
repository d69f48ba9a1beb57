//! Exact super linear algebra and super Plücker machinery.
//!
//! Scalars are elements of a finitely generated Grassmann algebra over the
//! rationals ([`galgebra`]). On top of that sit supermatrices and
//! Berezinians ([`smatrix`]), charts on super Grassmannians
//! ([`grassmannian`]), multivectors and their Plücker relations
//! ([`multivector`]), essential super Plücker coordinates ([`essential`]),
//! super cluster mutations ([`clusters`]) and text/JSON I/O ([`exprio`]).

pub mod error;
pub mod clusters;
pub mod essential;
pub mod exprio;
pub mod galgebra;
pub mod grassmannian;
pub mod multivector;
pub mod random;
pub mod selftest;
pub mod smatrix;

pub use error::{Error, Result};
pub use galgebra::{rat, GrassmannElement, Monomial, Parity, Rational};
pub use smatrix::{GhostColumnSpec, SuperMatrix, SuperShape};
