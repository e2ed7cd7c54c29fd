//! Exact Donaldson-Futaki invariants of product test configurations for
//! normal bidegree (1,1) hypersurfaces `X` in `P^m x P^n`, i.e. hyperplane
//! sections of the Segre variety.
//!
//! For a diagonal one-parameter subgroup `λ` of `SL(m+1) x SL(n+1)` under
//! which the defining form `f` has weight `alpha`, the invariant of the
//! induced test configuration for `(X, O(d,e))` is
//!
//! ```text
//! DF = -2 m n d e alpha / (m e + n d)^2
//! ```
//!
//! When `m != n` or `X` is singular there is a `λ` with `alpha = 1`, which
//! makes `DF < 0` and certifies K-instability. For `m + n >= 4` every
//! polarization of `X` is some `O(d,e)`, since restriction from the ambient
//! Picard group is then an isomorphism; for `m + n = 3` only the `O(d,e)`
//! polarizations are covered here.
//!
//! Everything is computed in exact rational arithmetic and every formula
//! value is re-derived from monomial counts.

pub mod bigraded;
pub mod certificate;
pub mod cli;
pub mod dfcalc;
pub mod error;
pub mod exactmath;
pub mod geometry;

pub use bigraded::{AmbientShape, BiDegree, EnumerationCap, Monomial, OneParameterSubgroup};
pub use certificate::{emit, parse, verify, Certificate, Verdict};
pub use dfcalc::{
    decide_instability, df_closed, df_general, Decision, ExpansionCoefficients, Polarization,
};
pub use error::{Error, Result};
pub use exactmath::{Rational, RationalPolynomial};
pub use geometry::{BilinearForm, NormalForm};
