//! Exceptional spectrum of the asymmetric quantum Rabi model (AQRM).
//!
//! The Hamiltonian (with ω = 1) is
//!
//! ```text
//! H = a†a + Δσ_z + gσ_x(a† + a) + εσ_x
//! ```
//!
//! The crate is split by subsystem:
//!
//! - [`exactpoly`]: exact rationals, bivariate integer polynomials in
//!   `x = 4g²` and `d = Δ²`, division over `Q(d)[x]`, Sturm root isolation.
//! - [`constraint`]: constraint polynomials `P`, `P̃`, their tridiagonal
//!   matrices and continuants, crossing records, kernel vectors, and the
//!   half-integer identity/conjecture verifiers.
//! - [`sl2rep`]: windowed matrices of the principal series representations
//!   of sl₂, the second order element 𝕂 and the algebraic checks built on it.
//! - [`heun`]: the confluent Heun operators and their equivalence with
//!   conjugated representation operators.
//! - [`gfunction`]: the exceptional G-functions and their zeros.
//! - [`spectrum`]: brute-force truncated Fock diagonalization, used as the
//!   oracle that every exact prediction is checked against.

pub mod constraint;
pub mod error;
pub mod exactpoly;
pub mod gfunction;
pub mod heun;
pub mod sl2rep;
pub mod spectrum;

pub use error::{Error, Result};
pub use exactpoly::{BivarPoly, Rational, UniPoly};
