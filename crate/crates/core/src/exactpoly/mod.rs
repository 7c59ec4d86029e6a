//! Exact arithmetic: rationals, bivariate integer polynomials in `x` and
//! `d`, univariate rational polynomials, division with `x` as the main
//! variable, and Sturm-sequence root isolation.
//!
//! Variable convention: `x = (2g)² = 4g²`, `d = Δ²`.

mod bivar;
mod rational;
mod roots;
mod unipoly;
mod xdiv;

pub use bivar::BivarPoly;
pub use rational::{int, parse_rational, rat, rational_to_string, to_f64, Rational};
pub use roots::{count_positive_roots, isolate_positive_roots, sign_at};
pub use unipoly::UniPoly;
pub use xdiv::{poly_div_x, RatFn, XDivision, XPoly};
