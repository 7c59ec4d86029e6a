use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{BivarPoly, Rational, UniPoly};
use crate::{Error, Result};

/// Rational function in `d`, kept with a monic denominator coprime to the
/// numerator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFn {
    num: UniPoly,
    den: UniPoly,
}

impl RatFn {
    pub fn new(num: UniPoly, den: UniPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let g = num.gcd(&den);
        let num = num.div_rem(&g)?.0;
        let den = den.div_rem(&g)?.0;
        let lead = den.leading().expect("nonzero").recip();
        Ok(RatFn {
            num: num.scale(&lead),
            den: den.scale(&lead),
        })
    }

    pub fn from_poly(p: UniPoly) -> Self {
        RatFn {
            num: p,
            den: UniPoly::one(),
        }
    }

    pub fn zero() -> Self {
        Self::from_poly(UniPoly::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn numer(&self) -> &UniPoly {
        &self.num
    }

    pub fn denom(&self) -> &UniPoly {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn add(&self, o: &RatFn) -> RatFn {
        let num = &(&self.num * &o.den) + &(&o.num * &self.den);
        RatFn::new(num, &self.den * &o.den).expect("denominators nonzero")
    }

    pub fn neg(&self) -> RatFn {
        RatFn {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, o: &RatFn) -> RatFn {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RatFn) -> RatFn {
        RatFn::new(&self.num * &o.num, &self.den * &o.den).expect("denominators nonzero")
    }

    pub fn div(&self, o: &RatFn) -> Result<RatFn> {
        if o.is_zero() {
            return Err(Error::DivisionByZero);
        }
        RatFn::new(&self.num * &o.den, &self.den * &o.num)
    }

    /// `None` when the denominator vanishes at `d`.
    pub fn eval(&self, d: &Rational) -> Option<Rational> {
        let den = self.den.eval(d);
        (!den.is_zero()).then(|| self.num.eval(d) / den)
    }
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "[{}]/[{}]", self.num, self.den)
        }
    }
}

/// Polynomial in `x` whose coefficients are rational functions of `d`,
/// ascending in `x`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct XPoly {
    coeffs: Vec<RatFn>,
}

impl XPoly {
    pub fn new(mut coeffs: Vec<RatFn>) -> Self {
        while coeffs.last().is_some_and(RatFn::is_zero) {
            coeffs.pop();
        }
        XPoly { coeffs }
    }

    pub fn zero() -> Self {
        XPoly { coeffs: vec![] }
    }

    pub fn from_bivar(p: &BivarPoly) -> Self {
        let deg = p.deg_x().map_or(0, |d| d as usize + 1);
        XPoly::new(
            (0..deg)
                .map(|i| RatFn::from_poly(p.x_coeff_in_d(i as u32)))
                .collect(),
        )
    }

    pub fn coeffs(&self) -> &[RatFn] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn coeff(&self, i: usize) -> RatFn {
        self.coeffs.get(i).cloned().unwrap_or_else(RatFn::zero)
    }

    pub fn add(&self, o: &XPoly) -> XPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        XPoly::new((0..n).map(|i| self.coeff(i).add(&o.coeff(i))).collect())
    }

    pub fn sub(&self, o: &XPoly) -> XPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        XPoly::new((0..n).map(|i| self.coeff(i).sub(&o.coeff(i))).collect())
    }

    pub fn mul(&self, o: &XPoly) -> XPoly {
        if self.is_zero() || o.is_zero() {
            return XPoly::zero();
        }
        let mut out = vec![RatFn::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        XPoly::new(out)
    }

    /// True when every coefficient is a polynomial in `d`.
    pub fn is_polynomial(&self) -> bool {
        self.coeffs.iter().all(RatFn::is_polynomial)
    }

    /// Converts back to an integer bivariate polynomial, if every
    /// coefficient is a polynomial in `d` with integer coefficients.
    pub fn to_bivar(&self) -> Option<BivarPoly> {
        let mut terms: Vec<(u32, u32, BigInt)> = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_polynomial() {
                return None;
            }
            // monic denominator of degree 0 is exactly 1
            for (j, r) in c.numer().coeffs().iter().enumerate() {
                if !r.is_integer() {
                    return None;
                }
                terms.push((i as u32, j as u32, r.to_integer()));
            }
        }
        Some(BivarPoly::from_terms(terms))
    }

    pub fn eval(&self, x: &Rational, d: &Rational) -> Option<Rational> {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c.eval(d)?;
        }
        Some(acc)
    }
}

impl fmt::Display for XPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "{{{c}}}*x^{i}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XDivision {
    pub quotient: XPoly,
    pub remainder: XPoly,
}

/// Divides `num` by `den` with `x` as the main variable and coefficients in
/// the field `ℚ(d)`, so that `num = quotient·den + remainder` with
/// `deg_x remainder < deg_x den`.
pub fn poly_div_x(num: &BivarPoly, den: &BivarPoly) -> Result<XDivision> {
    if den.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let den = XPoly::from_bivar(den);
    let dd = den.degree().expect("nonzero");
    let lead = den.coeffs[dd].clone();
    let mut rem = XPoly::from_bivar(num).coeffs;
    let mut quot = vec![RatFn::zero(); rem.len().saturating_sub(dd)];
    while rem.len() > dd {
        let shift = rem.len() - 1 - dd;
        let q = rem.last().expect("nonempty").div(&lead)?;
        for (i, c) in den.coeffs.iter().enumerate() {
            rem[shift + i] = rem[shift + i].sub(&q.mul(c));
        }
        quot[shift] = q;
        rem.pop();
        while rem.last().is_some_and(RatFn::is_zero) {
            rem.pop();
        }
    }
    Ok(XDivision {
        quotient: XPoly::new(quot),
        remainder: XPoly::new(rem),
    })
}

impl XDivision {
    /// Checks `quotient·den + remainder = num` exactly.
    pub fn reconstructs(&self, num: &BivarPoly, den: &BivarPoly) -> bool {
        self.quotient
            .mul(&XPoly::from_bivar(den))
            .add(&self.remainder)
            == XPoly::from_bivar(num)
    }
}

impl RatFn {
    pub fn constant(c: Rational) -> Self {
        Self::from_poly(UniPoly::constant(c))
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn x() -> BivarPoly {
        BivarPoly::x()
    }
    fn d() -> BivarPoly {
        BivarPoly::d()
    }
    fn c(n: i64) -> BivarPoly {
        BivarPoly::constant(n)
    }

    #[test]
    fn constructed_product_divides() {
        let a = x().scale(&2.into()) + d();
        let b = x() + d() - c(2);
        let r = poly_div_x(&(&a * &b), &b).unwrap();
        assert!(r.remainder.is_zero());
        assert_eq!(r.quotient.to_bivar(), Some(a));
    }

    #[test]
    fn x_squared_over_x_plus_one() {
        let r = poly_div_x(&(&x() * &x()), &(x() + c(1))).unwrap();
        assert_eq!(r.quotient.to_bivar(), Some(x() - c(1)));
        assert_eq!(r.remainder.to_bivar(), Some(c(1)));
    }

    #[test]
    fn leading_coefficient_in_d() {
        // (x d + 1) divided by (d x + d^2): quotient 1, remainder 1 - d^2
        let num = &x() * &d() + c(1);
        let den = &x() * &d() + &d() * &d();
        let r = poly_div_x(&num, &den).unwrap();
        assert!(r.reconstructs(&num, &den));
        assert_eq!(r.quotient.to_bivar(), Some(c(1)));
        // x^2 / (d x + 1) has a non-polynomial quotient
        let r = poly_div_x(&(&x() * &x()), &(&x() * &d() + c(1))).unwrap();
        assert!(!r.quotient.is_polynomial());
        assert!(r.reconstructs(&(&x() * &x()), &(&x() * &d() + c(1))));
    }

    #[test]
    fn zero_divisor() {
        assert_eq!(poly_div_x(&x(), &BivarPoly::zero()), Err(Error::DivisionByZero));
    }

    fn arb_poly() -> impl Strategy<Value = BivarPoly> {
        prop::collection::vec((0u32..3, 0u32..3, -6i64..6), 0..5).prop_map(BivarPoly::from_terms)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn division_reconstructs(a in arb_poly(), b in arb_poly(), r in arb_poly()) {
            prop_assume!(!b.is_zero());
            // dividing case
            let prod = &a * &b;
            let q = poly_div_x(&prod, &b).unwrap();
            prop_assert!(q.reconstructs(&prod, &b));
            prop_assert!(q.remainder.is_zero());
            // generic case
            let num = &prod + &r;
            let q = poly_div_x(&num, &b).unwrap();
            prop_assert!(q.reconstructs(&num, &b));
            let db = b.deg_x().unwrap() as usize;
            prop_assert!(q.remainder.degree().map_or(true, |dr| dr < db));
        }
    }
}
