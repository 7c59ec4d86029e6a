//! Confluent Heun operators of the AQRM and their representation-theoretic
//! form.
//!
//! Each operator is
//!
//! ```text
//! d²/dx² + {−4g² + A/x + B/(x−1)} d/dx + (Cx + D)/(x(x−1))
//! ```
//!
//! and is stored as `(A, B, C, D)` together with the drift `−4g²`.

use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::exactpoly::{int, rat, rational_to_string, Rational, UniPoly};
use crate::sl2rep::{mu_of, KParams};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Which {
    One,
    Two,
}

impl Which {
    pub fn number(self) -> u8 {
        match self {
            Which::One => 1,
            Which::Two => 2,
        }
    }
}

impl TryFrom<u8> for Which {
    type Error = Error;
    fn try_from(v: u8) -> Result<Self> {
        match v {
            1 => Ok(Which::One),
            2 => Ok(Which::Two),
            _ => Err(Error::InvalidParameter(format!("which must be 1 or 2, got {v}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeunOp {
    pub which: Which,
    pub lambda: Rational,
    pub g2: Rational,
    pub d: Rational,
    pub eps: Rational,
    /// Coefficient of `d/dx` without poles; `−4g²` for the AQRM operators.
    pub drift: Rational,
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub dd: Rational,
}

impl HeunOp {
    /// The four coefficients and the drift, for tuple comparison.
    pub fn coefficients(&self) -> [&Rational; 5] {
        [&self.drift, &self.a, &self.b, &self.c, &self.dd]
    }

    pub fn same_operator(&self, o: &HeunOp) -> bool {
        self.coefficients() == o.coefficients()
    }

    /// Roots of `ρ(ρ−1) + Aρ` at `x = 0` and `ρ(ρ−1) + Bρ` at `x = 1`.
    pub fn indicial_roots(&self) -> ((Rational, Rational), (Rational, Rational)) {
        let one = Rational::one();
        (
            (Rational::zero(), &one - &self.a),
            (Rational::zero(), &one - &self.b),
        )
    }

    /// `x(x−1)·(this operator)` applied to `x^t`: the coefficients of
    /// `x^{t+1}`, `x^t`, `x^{t−1}`.
    pub fn on_monomial(&self, t: &Rational) -> [Rational; 3] {
        let tt = t * (t - int(1));
        [
            &self.drift * t + &self.c,
            &tt - &self.drift * t + &self.a * t + &self.b * t + &self.dd,
            -&tt - &self.a * t,
        ]
    }
}

#[derive(Serialize)]
struct HeunJson {
    which: u8,
    lambda: String,
    g2: String,
    d: String,
    eps: String,
    #[serde(rename = "A")]
    a: String,
    #[serde(rename = "B")]
    b: String,
    #[serde(rename = "C")]
    c: String,
    #[serde(rename = "D")]
    dd: String,
}

impl Serialize for HeunOp {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let r = rational_to_string;
        HeunJson {
            which: self.which.number(),
            lambda: r(&self.lambda),
            g2: r(&self.g2),
            d: r(&self.d),
            eps: r(&self.eps),
            a: r(&self.a),
            b: r(&self.b),
            c: r(&self.c),
            dd: r(&self.dd),
        }
        .serialize(s)
    }
}

/// `μ = (λ + g²)² − 4g²(λ + g²) − d`.
pub fn mu(lambda: &Rational, g2: &Rational, d: &Rational) -> Rational {
    mu_of(&(lambda + g2), g2, d)
}

/// `H₁ᵉ(λ)` or `H₂ᵉ(λ)` read off directly.
pub fn heun_direct(which: Which, lambda: &Rational, g2: &Rational, d: &Rational, eps: &Rational) -> HeunOp {
    let s = lambda + g2;
    let four_g2 = int(4) * g2;
    let m = mu(lambda, g2, d);
    let one = Rational::one();
    let (a, b, c, dd) = match which {
        Which::One => (
            &one - &s + eps,
            &one - (&s + &one) - eps,
            &four_g2 * (&s - eps),
            &m + &four_g2 * eps - eps * eps,
        ),
        Which::Two => (
            &one - (&s + &one) - eps,
            &one - &s + eps,
            &four_g2 * (&s - &one + eps),
            &m - &four_g2 * eps - eps * eps,
        ),
    };
    HeunOp {
        which,
        lambda: lambda.clone(),
        g2: g2.clone(),
        d: d.clone(),
        eps: eps.clone(),
        drift: -four_g2,
        a,
        b,
        c,
        dd,
    }
}

fn k_params(which: Which, lambda: &Rational, g2: &Rational, d: &Rational, eps: &Rational) -> (KParams, Rational) {
    let s = lambda + g2;
    match which {
        Which::One => KParams::case1(&s, g2, d, eps),
        Which::Two => KParams::case2(&s, g2, d, eps),
    }
}

/// The same operator obtained from `x^{−½(a−½)}(ϖ_a(K) − Λ_a)x^{½(a−½)}`
/// divided by `x(x−1)`, using the closed form of a conjugated `𝕂`:
/// drift `−β`, `A = a/2 + α`, `B = a/2 + 2γ − α`, `C = −aβ`,
/// `D = λ_a + C_K − Λ_a`.
#[allow(non_snake_case)]
pub fn heun_from_K(which: Which, lambda: &Rational, g2: &Rational, d: &Rational, eps: &Rational) -> HeunOp {
    let (kp, a) = k_params(which, lambda, g2, d, eps);
    let half_a = &a * rat(1, 2);
    HeunOp {
        which,
        lambda: lambda.clone(),
        g2: g2.clone(),
        d: d.clone(),
        eps: eps.clone(),
        drift: -kp.beta.clone(),
        a: &half_a + &kp.alpha,
        b: &half_a + int(2) * &kp.gamma - &kp.alpha,
        c: -(&a * &kp.beta),
        // λ_a + C − Λ_a with Λ_a = λ_a
        dd: kp.c.clone(),
    }
}

/// Applies `x^{−k}(ϖ_a(K) − Λ_a)x^{k}`, `k = ½(a−½)`, to `x^t` using the
/// differential action of `H, E, F` on monomials. Returns the coefficients
/// of `x^{t+1}`, `x^t`, `x^{t−1}`.
pub fn conjugated_k_on_monomial(
    which: Which,
    lambda: &Rational,
    g2: &Rational,
    d: &Rational,
    eps: &Rational,
    t: &Rational,
) -> [Rational; 3] {
    let (kp, a) = k_params(which, lambda, g2, d, eps);
    let half = rat(1, 2);
    let u = t + (&a - &half) * &half;
    let h = |v: &Rational| int(2) * v + &half;
    let e = |v: &Rational| v + (&a + &half) * &half;
    let f = |v: &Rational| -v + (&a - &half) * &half;
    let left = |v: &Rational| &half * h(v) + &kp.alpha;
    // (F + β) x^u = f(u) x^{u−1} + β x^u
    let fu = f(&u);
    let u_minus = &u - int(1);
    // [½H − E + α] then maps x^v to left(v) x^v − e(v) x^{v+1}
    let up = -(e(&u) * &kp.beta);
    let mut mid = left(&u) * &kp.beta - &fu * e(&u_minus);
    let down = &fu * left(&u_minus);
    // γ(H − ½) + C − Λ_a
    mid += &kp.gamma * (h(&u) - &half) + &kp.c - kp.lambda_a(&a);
    [up, mid, down]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Exponents {
    pub at0: (String, String),
    pub at1: (String, String),
    /// All four exponents are integers.
    pub integral: bool,
}

/// Local exponents at the regular singular points `x = 0, 1`.
pub fn exponents(which: Which, lambda: &Rational, g2: &Rational, eps: &Rational) -> Exponents {
    let s = lambda + g2;
    let lo = &s - eps;
    let hi = &s + int(1) + eps;
    let (r0, r1) = match which {
        Which::One => (lo, hi),
        Which::Two => (hi, lo),
    };
    Exponents {
        integral: r0.is_integer() && r1.is_integer(),
        at0: ("0".into(), rational_to_string(&r0)),
        at1: ("0".into(), rational_to_string(&r1)),
    }
}

/// Residuals of the first-order Bargmann system
///
/// ```text
/// (z+g) f₊' + (gz + ε − λ) f₊ + Δ f₋
/// (z−g) f₋' − (gz + ε + λ) f₋ + Δ f₊
/// ```
///
/// for polynomial `f±`. Takes `g` and `Δ` themselves, not their squares.
pub fn bargmann_system_residual(
    lambda: &Rational,
    g: &Rational,
    delta: &Rational,
    eps: &Rational,
    f_plus: &UniPoly,
    f_minus: &UniPoly,
) -> (UniPoly, UniPoly) {
    let lin = |c0: Rational, c1: Rational| UniPoly::new(vec![c0, c1]);
    let res_plus = &(&(&lin(g.clone(), int(1)) * &f_plus.derivative())
        + &(&lin(eps - lambda, g.clone()) * f_plus))
        + &f_minus.scale(delta);
    let res_minus = &(&(&lin(-g.clone(), int(1)) * &f_minus.derivative())
        - &(&lin(eps + lambda, g.clone()) * f_minus))
        + &f_plus.scale(delta);
    (res_plus, res_minus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn mu_examples() {
        // λ + g² = 2
        assert_eq!(mu(&(int(2) - rat(1, 4)), &rat(1, 4), &rat(1, 2)), rat(3, 2));
        assert_eq!(mu(&rat(-1, 3), &rat(1, 3), &rat(5, 7)), rat(-5, 7));
        // λ + g² = 4g²
        let g2 = rat(3, 5);
        assert_eq!(mu(&(int(3) * &g2), &g2, &int(2)), int(-2));
    }

    #[test]
    fn exponent_examples() {
        let l = int(2) - rat(1, 4);
        let e1 = exponents(Which::One, &l, &rat(1, 4), &int(0));
        assert_eq!(e1.at0, ("0".into(), "2".into()));
        assert_eq!(e1.at1, ("0".into(), "3".into()));
        let e2 = exponents(Which::Two, &l, &rat(1, 4), &int(0));
        assert_eq!(e2.at0, ("0".into(), "3".into()));
        assert_eq!(e2.at1, ("0".into(), "2".into()));
        let e3 = exponents(Which::One, &(rat(3, 2) - rat(1, 4)), &rat(1, 4), &rat(1, 2));
        assert_eq!(e3.at0.1, "1");
        assert_eq!(e3.at1.1, "3");
        assert!(e3.integral);
        assert!(!exponents(Which::One, &rat(1, 3), &int(0), &int(0)).integral);
    }

    #[test]
    fn from_k_matches_direct() {
        let l = int(2) - rat(1, 4);
        for which in [Which::One, Which::Two] {
            let a = heun_direct(which, &l, &rat(1, 4), &rat(1, 2), &int(0));
            let b = heun_from_K(which, &l, &rat(1, 4), &rat(1, 2), &int(0));
            assert!(a.same_operator(&b));
        }
    }

    #[test]
    fn indicial_roots_match_exponents() {
        let (l, g2, eps) = (rat(5, 3), rat(2, 7), rat(-1, 2));
        for which in [Which::One, Which::Two] {
            let op = heun_direct(which, &l, &g2, &int(1), &eps);
            let ex = exponents(which, &l, &g2, &eps);
            let ((_, r0), (_, r1)) = op.indicial_roots();
            assert_eq!(rational_to_string(&r0), ex.at0.1);
            assert_eq!(rational_to_string(&r1), ex.at1.1);
        }
    }

    #[test]
    fn mu_enters_only_through_d() {
        let (l, g2, eps) = (rat(1, 2), rat(1, 3), rat(1, 2));
        let a = heun_direct(Which::One, &l, &g2, &int(2), &eps);
        // μ + 1 is the same as d − 1
        let b = heun_direct(Which::One, &l, &g2, &int(1), &eps);
        assert_eq!(&b.dd - &a.dd, int(1));
        assert_eq!((&a.a, &a.b, &a.c), (&b.a, &b.b, &b.c));
    }

    #[test]
    fn json_keys() {
        let op = heun_direct(Which::Two, &rat(1, 2), &rat(1, 4), &int(1), &int(0));
        let v = serde_json::to_value(&op).unwrap();
        for k in ["which", "lambda", "g2", "d", "eps", "A", "B", "C", "D"] {
            assert!(v.get(k).is_some(), "{k}");
        }
        assert_eq!(v["which"], 2);
    }

    #[test]
    fn bargmann_trivial() {
        let (rp, rm) = bargmann_system_residual(&int(1), &int(1), &int(1), &int(0), &UniPoly::zero(), &UniPoly::zero());
        assert!(rp.is_zero() && rm.is_zero());
    }

    #[test]
    fn bargmann_oscillator_limit() {
        for n in 0..6 {
            let mut c = vec![int(0); n + 1];
            c[n] = int(1);
            let zn = UniPoly::new(c);
            let (rp, rm) = bargmann_system_residual(&int(n as i64), &int(0), &int(0), &int(0), &zn, &UniPoly::zero());
            assert!(rp.is_zero() && rm.is_zero());
        }
    }

    #[test]
    fn bargmann_truncated_exponential() {
        // f₊ = Σ_{k≤8} (−gz)^k/k! at Δ = ε = 0, λ = −g²; the exact residual is
        // (z + g) g⁹ z⁸ / 8!
        let g = rat(2, 3);
        let mut coeffs = Vec::new();
        let mut term = int(1);
        for k in 0..=8i64 {
            coeffs.push(term.clone());
            term = term * (-&g) / int(k + 1);
        }
        let f = UniPoly::new(coeffs);
        let (rp, rm) = bargmann_system_residual(&-(&g * &g), &g, &int(0), &int(0), &f, &UniPoly::zero());
        let mut g9 = int(1);
        for _ in 0..9 {
            g9 *= &g;
        }
        let c8 = g9 / int(40320);
        let mut expected = vec![int(0); 10];
        expected[8] = &c8 * &g;
        expected[9] = c8;
        assert_eq!(rp, UniPoly::new(expected));
        assert!(rm.is_zero());
    }

    fn arb_rat() -> impl Strategy<Value = Rational> {
        (-30i64..30, 1i64..9).prop_map(|(n, d)| rat(n, d))
    }

    proptest! {
        #[test]
        fn monomial_action_agrees(
            l in arb_rat(), g2 in arb_rat(), d in arb_rat(), te in -4i64..5, t in arb_rat()
        ) {
            let eps = rat(te, 2);
            for which in [Which::One, Which::Two] {
                let op = heun_direct(which, &l, &g2, &d, &eps);
                prop_assert!(op.same_operator(&heun_from_K(which, &l, &g2, &d, &eps)));
                prop_assert_eq!(op.on_monomial(&t), conjugated_k_on_monomial(which, &l, &g2, &d, &eps, &t));
            }
        }
    }
}
