use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};

use super::{Rational, UniPoly};
use crate::{Error, Result};

/// Sign of `p(x)` as -1, 0 or 1.
pub fn sign_at(p: &UniPoly, x: &Rational) -> i8 {
    match p.eval(x).cmp(&Rational::zero()) {
        Ordering::Less => -1,
        Ordering::Equal => 0,
        Ordering::Greater => 1,
    }
}

struct Sturm {
    chain: Vec<UniPoly>,
}

impl Sturm {
    fn new(p: &UniPoly) -> Self {
        let mut chain = vec![p.clone(), p.derivative()];
        while !chain.last().expect("nonempty").is_zero() {
            let n = chain.len();
            let (_, r) = chain[n - 2]
                .div_rem(&chain[n - 1])
                .expect("divisor nonzero");
            chain.push(-&r);
        }
        chain.pop();
        Sturm { chain }
    }

    fn variations(signs: impl Iterator<Item = i8>) -> usize {
        let mut last = 0i8;
        let mut count = 0;
        for s in signs.filter(|&s| s != 0) {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    fn at(&self, x: &Rational) -> usize {
        Self::variations(self.chain.iter().map(|q| sign_at(q, x)))
    }

    fn at_infinity(&self) -> usize {
        Self::variations(self.chain.iter().map(|q| match q.leading() {
            Some(l) if l.is_positive() => 1,
            Some(_) => -1,
            None => 0,
        }))
    }

    /// Distinct roots in `(a, b]`.
    fn count(&self, a: &Rational, b: &Rational) -> usize {
        self.at(a) - self.at(b)
    }
}

/// Strict upper bound on the absolute value of every root (Cauchy).
fn cauchy_bound(p: &UniPoly) -> Rational {
    let lead = p.leading().expect("nonzero").abs();
    let n = p.degree().expect("nonzero");
    let max = (0..n)
        .map(|i| p.coeff(i).abs() / &lead)
        .max()
        .unwrap_or_else(Rational::zero);
    max + Rational::one()
}

/// Number of distinct real roots in `(0, ∞)`.
pub fn count_positive_roots(p: &UniPoly) -> Result<usize> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let (q, _) = p.strip_zero_roots();
    if q.degree() == Some(0) {
        return Ok(0);
    }
    let s = Sturm::new(&q);
    Ok(s.at(&Rational::zero()) - s.at_infinity())
}

/// Isolates every positive real root of `p` in a closed interval of width at
/// most `precision`, using Sturm counts and exact bisection.
///
/// Intervals are disjoint, sorted, and each contains exactly one root. An
/// interval collapses to a point when bisection lands on a root exactly.
pub fn isolate_positive_roots(p: &UniPoly, precision: &Rational) -> Result<Vec<(Rational, Rational)>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !precision.is_positive() {
        return Err(Error::InvalidParameter("precision must be positive".into()));
    }
    let (q, _) = p.strip_zero_roots();
    if q.degree() == Some(0) {
        return Ok(vec![]);
    }
    let q = q.square_free();
    let sturm = Sturm::new(&q);
    let upper = cauchy_bound(&q);

    let mut out = Vec::new();
    // Stack of (lo, hi, count) with lo, hi never roots of q.
    let mut stack = vec![(Rational::zero(), upper.clone(), sturm.count(&Rational::zero(), &upper))];
    while let Some((lo, hi, n)) = stack.pop() {
        match n {
            0 => {}
            1 => out.push(refine(&q, lo, hi, precision)),
            _ => {
                let mid = split_point(&q, &lo, &hi);
                let left = sturm.count(&lo, &mid);
                stack.push((mid.clone(), hi, n - left));
                stack.push((lo, mid, left));
            }
        }
    }
    out.sort();
    Ok(out)
}

/// A point strictly inside `(lo, hi)` that is not a root of `q`.
fn split_point(q: &UniPoly, lo: &Rational, hi: &Rational) -> Rational {
    let two = Rational::from_integer(2.into());
    let width = hi - lo;
    let mut frac = Rational::new(1.into(), 2.into());
    let mut step = Rational::new(1.into(), 4.into());
    loop {
        let m = lo + &width * &frac;
        if !q.eval(&m).is_zero() {
            return m;
        }
        frac += &step;
        step /= &two;
    }
}

fn refine(q: &UniPoly, mut lo: Rational, mut hi: Rational, precision: &Rational) -> (Rational, Rational) {
    let two = Rational::from_integer(2.into());
    let slo = sign_at(q, &lo);
    while &hi - &lo > *precision {
        let mid = (&lo + &hi) / &two;
        let sm = sign_at(q, &mid);
        if sm == 0 {
            return (mid.clone(), mid);
        }
        if sm == slo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}
