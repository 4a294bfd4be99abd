//! Invariant theory of binary quartic forms over finite fields, and the
//! section counts behind the average size of 2-Selmer groups of elliptic
//! curves over `F_q(t)`.
//!
//! Modules, bottom up:
//!
//! * [`ff`]: finite fields `F_{p^k}`, polynomials, factorization.
//! * [`quartic`]: binary quartics, the `PGL_2` action, invariants, types,
//!   Weierstrass reduction, stabilizers.
//! * [`census`]: exhaustive counts over `V(F_q)` and `V(F_q[eps]/(eps^2))`.
//! * [`pfield`]: closed points of `P^1`, orders of sections, zeta function,
//!   Euler products.
//! * [`family`]: Weierstrass families `(a, b)` over `P^1`.
//! * [`estimator`]: sections of twisted quartic bundles, regularity, strata
//!   masses and the Monte Carlo average.

pub mod census;
pub mod error;
pub mod estimator;
pub mod family;
pub mod ff;
pub mod pfield;
pub mod quartic;
pub mod report;

pub use error::{Error, Result};
pub use ff::{Field, FieldElem, UniPoly};
