use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Rational, UniPoly};
use crate::Error;

/// Polynomial in `x` and `d` with big-integer coefficients.
///
/// Terms are keyed by `(deg_x, deg_d)`; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BivarPoly {
    terms: BTreeMap<(u32, u32), BigInt>,
}

impl BivarPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn x() -> Self {
        Self::monomial(1, 1, 0)
    }

    pub fn d() -> Self {
        Self::monomial(1, 0, 1)
    }

    pub fn monomial(c: impl Into<BigInt>, i: u32, j: u32) -> Self {
        let mut p = Self::zero();
        p.add_term(i, j, c.into());
        p
    }

    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (u32, u32, C)>,
        C: Into<BigInt>,
    {
        let mut p = Self::zero();
        for (i, j, c) in terms {
            p.add_term(i, j, c.into());
        }
        p
    }

    fn add_term(&mut self, i: u32, j: u32, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry((i, j)).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, i: u32, j: u32) -> BigInt {
        self.terms.get(&(i, j)).cloned().unwrap_or_default()
    }

    /// Terms in ascending `(i, j)` order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (u32, u32, &BigInt)> {
        self.terms.iter().map(|(&(i, j), c)| (i, j, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Degree in `x`; `None` for the zero polynomial.
    pub fn deg_x(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, _)| i).max()
    }

    pub fn deg_d(&self) -> Option<u32> {
        self.terms.keys().map(|&(_, j)| j).max()
    }

    /// Coefficient of `x^i` as a polynomial in `d` (returned with `d` in the
    /// `d` slot).
    pub fn x_coeff(&self, i: u32) -> BivarPoly {
        BivarPoly::from_terms(
            self.terms()
                .filter(|&(ti, _, _)| ti == i)
                .map(|(_, j, c)| (0, j, c.clone())),
        )
    }

    /// Coefficient of `x^i` as a univariate polynomial in `d`.
    pub fn x_coeff_in_d(&self, i: u32) -> UniPoly {
        let deg = self.deg_d().unwrap_or(0) as usize;
        let mut coeffs = vec![Rational::zero(); deg + 1];
        for (ti, j, c) in self.terms() {
            if ti == i {
                coeffs[j as usize] = Rational::from_integer(c.clone());
            }
        }
        UniPoly::new(coeffs)
    }

    pub fn scale(&self, c: &BigInt) -> BivarPoly {
        if c.is_zero() {
            return Self::zero();
        }
        BivarPoly {
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    /// Multiplies by `x^i d^j`.
    pub fn shift(&self, i: u32, j: u32) -> BivarPoly {
        BivarPoly {
            terms: self
                .terms
                .iter()
                .map(|(&(a, b), v)| ((a + i, b + j), v.clone()))
                .collect(),
        }
    }

    pub fn eval(&self, x: &Rational, d: &Rational) -> Rational {
        self.terms().fold(Rational::zero(), |acc, (i, j, c)| {
            acc + Rational::from_integer(c.clone()) * pow(x, i) * pow(d, j)
        })
    }

    pub fn eval_f64(&self, x: f64, d: f64) -> f64 {
        self.terms().fold(0.0, |acc, (i, j, c)| {
            acc + to_f64(c) * x.powi(i as i32) * d.powi(j as i32)
        })
    }

    /// `Σ |c_ij| |x|^i |d|^j`, the natural scale for judging `|p(x, d)|`.
    pub fn abs_eval_f64(&self, x: f64, d: f64) -> f64 {
        self.terms().fold(0.0, |acc, (i, j, c)| {
            acc + to_f64(c).abs() * x.abs().powi(i as i32) * d.abs().powi(j as i32)
        })
    }

    /// Substitutes `d → d_value`, leaving a polynomial in `x`.
    pub fn specialize(&self, d_value: &Rational) -> UniPoly {
        let deg = self.deg_x().unwrap_or(0) as usize;
        let mut coeffs = vec![Rational::zero(); deg + 1];
        for (i, j, c) in self.terms() {
            coeffs[i as usize] += Rational::from_integer(c.clone()) * pow(d_value, j);
        }
        UniPoly::new(coeffs)
    }

    /// Substitutes `x → x_value`, leaving a polynomial in `d`.
    pub fn specialize_x(&self, x_value: &Rational) -> UniPoly {
        let deg = self.deg_d().unwrap_or(0) as usize;
        let mut coeffs = vec![Rational::zero(); deg + 1];
        for (i, j, c) in self.terms() {
            coeffs[j as usize] += Rational::from_integer(c.clone()) * pow(x_value, i);
        }
        UniPoly::new(coeffs)
    }

    pub fn pow(&self, e: u32) -> BivarPoly {
        (0..e).fold(Self::one(), |acc, _| &acc * self)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("polynomial serializes")
    }
}

fn pow(r: &Rational, e: u32) -> Rational {
    num_traits::pow(r.clone(), e as usize)
}

fn to_f64(c: &BigInt) -> f64 {
    num_traits::ToPrimitive::to_f64(c).unwrap_or(f64::NAN)
}

impl Add for &BivarPoly {
    type Output = BivarPoly;
    fn add(self, rhs: &BivarPoly) -> BivarPoly {
        let mut out = self.clone();
        for (i, j, c) in rhs.terms() {
            out.add_term(i, j, c.clone());
        }
        out
    }
}

impl Sub for &BivarPoly {
    type Output = BivarPoly;
    fn sub(self, rhs: &BivarPoly) -> BivarPoly {
        let mut out = self.clone();
        for (i, j, c) in rhs.terms() {
            out.add_term(i, j, -c.clone());
        }
        out
    }
}

impl Mul for &BivarPoly {
    type Output = BivarPoly;
    fn mul(self, rhs: &BivarPoly) -> BivarPoly {
        let mut out = BivarPoly::zero();
        for (i1, j1, c1) in self.terms() {
            for (i2, j2, c2) in rhs.terms() {
                out.add_term(i1 + i2, j1 + j2, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &BivarPoly {
    type Output = BivarPoly;
    fn neg(self) -> BivarPoly {
        BivarPoly {
            terms: self.terms.iter().map(|(k, v)| (*k, -v)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for BivarPoly {
            type Output = BivarPoly;
            fn $m(self, rhs: BivarPoly) -> BivarPoly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&BivarPoly> for BivarPoly {
            type Output = BivarPoly;
            fn $m(self, rhs: &BivarPoly) -> BivarPoly {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for BivarPoly {
    type Output = BivarPoly;
    fn neg(self) -> BivarPoly {
        -&self
    }
}

/// Canonical text: `c*x^i*d^j` terms joined by ` + `, sorted by `(i, j)`
/// descending; the zero polynomial prints as `0`.
impl fmt::Display for BivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, j, c) in self.terms().rev() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "{c}*x^{i}*d^{j}")?;
        }
        Ok(())
    }
}

impl FromStr for BivarPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if s == "0" {
            return Ok(Self::zero());
        }
        let bad = || Error::Parse(format!("not a canonical polynomial: {s:?}"));
        let mut p = Self::zero();
        for term in s.split(" + ") {
            let mut parts = term.trim().split('*');
            let c: BigInt = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let i = parts
                .next()
                .and_then(|t| t.strip_prefix("x^"))
                .and_then(|t| t.parse::<u32>().ok())
                .ok_or_else(bad)?;
            let j = parts
                .next()
                .and_then(|t| t.strip_prefix("d^"))
                .and_then(|t| t.parse::<u32>().ok())
                .ok_or_else(bad)?;
            if parts.next().is_some() {
                return Err(bad());
            }
            p.add_term(i, j, c);
        }
        Ok(p)
    }
}

#[derive(Serialize, Deserialize)]
struct TermsJson {
    terms: Vec<(u32, u32, String)>,
}

impl Serialize for BivarPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        TermsJson {
            terms: self
                .terms()
                .rev()
                .map(|(i, j, c)| (i, j, c.to_string()))
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BivarPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = TermsJson::deserialize(deserializer)?;
        let mut p = BivarPoly::zero();
        for (i, j, c) in raw.terms {
            let c: BigInt = c.parse().map_err(D::Error::custom)?;
            p.add_term(i, j, c);
        }
        Ok(p)
    }
}

impl One for BivarPoly {
    fn one() -> Self {
        BivarPoly::one()
    }
}

impl Zero for BivarPoly {
    fn zero() -> Self {
        BivarPoly::zero()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl BivarPoly {
    /// True when every coefficient is positive (used for the positivity
    /// claims on the conjectured quotient).
    pub fn all_coefficients_positive(&self) -> bool {
        self.terms().all(|(_, _, c)| c.is_positive())
    }
}
