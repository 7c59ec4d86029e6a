use num_traits::Signed;
use serde::{Serialize, Serializer};

use super::{sequence, Fault, Variant};
use crate::exactpoly::{isolate_positive_roots, rational_to_string, to_f64, Rational};
use crate::{Error, Result};

/// One positive root of `P^(N,ε)_N(x, d)` at fixed `d`, i.e. a coupling at
/// which `λ = N − g² + ε` is a doubly degenerate eigenvalue.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossingRecord {
    pub n: u32,
    pub two_eps: i32,
    pub d_value: Rational,
    pub root_interval: (Rational, Rational),
    /// The two finite-dimensional modules whose eigenvalue curves meet, or
    /// `None` for `ε < 0`.
    pub rep_pair: Option<[String; 2]>,
}

impl CrossingRecord {
    pub fn x_mid(&self) -> f64 {
        to_f64(&((&self.root_interval.0 + &self.root_interval.1) / Rational::from_integer(2.into())))
    }

    pub fn g(&self) -> f64 {
        self.x_mid().sqrt() / 2.0
    }

    /// `λ = N − g² + ε`.
    pub fn lambda(&self) -> f64 {
        self.n as f64 - self.x_mid() / 4.0 + self.two_eps as f64 / 2.0
    }

    pub fn lambda_description(&self) -> String {
        format!("lambda = {} - g^2 + {}/2", self.n, self.two_eps)
    }
}

#[derive(Serialize)]
struct RecordJson<'a> {
    #[serde(rename = "N")]
    n: u32,
    two_eps: i32,
    d: String,
    x_lo: String,
    x_hi: String,
    g: f64,
    lambda: f64,
    modules: &'a [String],
}

impl Serialize for CrossingRecord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RecordJson {
            n: self.n,
            two_eps: self.two_eps,
            d: rational_to_string(&self.d_value),
            x_lo: rational_to_string(&self.root_interval.0),
            x_hi: rational_to_string(&self.root_interval.1),
            g: self.g(),
            lambda: self.lambda(),
            modules: self.rep_pair.as_ref().map_or(&[], |p| &p[..]),
        }
        .serialize(s)
    }
}

/// Modules whose curves cross at a root of `P^(N,ε)_N`: the `(N+1)`-dimensional
/// block carrying the polynomial solution and its `2ε`-shifted partner.
pub fn module_pair(n: u32, two_eps: i32) -> Option<[String; 2]> {
    if two_eps < 0 {
        return None;
    }
    Some([format!("F_{}", n + 1), format!("F_{}", n as i64 + two_eps as i64)])
}

pub fn find_crossings(n: u32, two_eps: i32, d_value: &Rational, precision: &Rational) -> Result<Vec<CrossingRecord>> {
    find_crossings_with_fault(n, two_eps, d_value, precision, None)
}

pub fn find_crossings_with_fault(
    n: u32,
    two_eps: i32,
    d_value: &Rational,
    precision: &Rational,
    fault: Option<Fault>,
) -> Result<Vec<CrossingRecord>> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    if !d_value.is_positive() {
        return Err(Error::InvalidParameter("d must be positive".into()));
    }
    let p = sequence(n, two_eps, Variant::Plain, fault).pop().expect("nonempty");
    let uni = p.specialize(d_value);
    let roots = isolate_positive_roots(&uni, precision)?;
    Ok(roots
        .into_iter()
        .map(|iv| CrossingRecord {
            n,
            two_eps,
            d_value: d_value.clone(),
            root_interval: iv,
            rep_pair: module_pair(n, two_eps),
        })
        .collect())
}
