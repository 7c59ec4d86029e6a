use num_bigint::BigInt;
use num_traits::Signed;
use serde::Serialize;

use super::{sequence, Fault, Variant};
use crate::exactpoly::{int, poly_div_x, rat, rational_to_string, BivarPoly, Rational};
use crate::Result;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    #[serde(rename = "N")]
    pub n: u32,
    pub checked: u32,
    /// Steps `k` at which the two sides differ.
    pub failures: Vec<u32>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks, for every `0 ≤ k ≤ N`,
///
/// ```text
/// P̃^(N+1,½)_{k+1} = [(k+1)x + d] P^(N,½)_k − k(k+1)(N−k) x P^(N,½)_{k−1}
/// ```
///
/// exactly, with `P_{−1} = 0`.
pub fn verify_identity_half(n: u32) -> IdentityReport {
    verify_identity_half_with_fault(n, None)
}

/// As [`verify_identity_half`], with an optional perturbation of the
/// right-hand side's `P` recurrence.
pub fn verify_identity_half_with_fault(n: u32, fault: Option<Fault>) -> IdentityReport {
    let lhs = sequence(n + 1, 1, Variant::Tilde, None);
    let p = sequence(n, 1, Variant::Plain, fault);
    let failures = (0..=n)
        .filter(|&k| {
            let ki = k as i64;
            let head = BivarPoly::from_terms([(1, 0, ki + 1), (0, 1, 1)]);
            let mut rhs = &head * &p[k as usize];
            if k >= 1 {
                let c = BigInt::from(ki * (ki + 1) * (n as i64 - ki));
                rhs = rhs - p[k as usize - 1].shift(1, 0).scale(&c);
            }
            lhs[k as usize + 1] != rhs
        })
        .collect();
    IdentityReport {
        n,
        checked: n + 1,
        failures,
    }
}

/// `{1/10, 1, 10, 100} × {1/4, 1, 4}` as `(x, d)` pairs.
pub fn default_conjecture_grid() -> Vec<(Rational, Rational)> {
    let xs = [rat(1, 10), int(1), int(10), int(100)];
    let ds = [rat(1, 4), int(1), int(4)];
    xs.iter()
        .flat_map(|x| ds.iter().map(move |d| (x.clone(), d.clone())))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConjectureReport {
    #[serde(rename = "N")]
    pub n: u32,
    pub ell: u32,
    pub remainder_zero: bool,
    pub integer_quotient: bool,
    pub positive_on_grid: bool,
    /// Canonical text of the quotient when it lies in `ℤ[x, d]`.
    pub quotient: Option<String>,
    pub samples_checked: usize,
    /// `(x, d)` samples where the quotient is not positive.
    pub failing_samples: Vec<(String, String)>,
}

impl ConjectureReport {
    pub fn passed(&self) -> bool {
        self.remainder_zero && self.integer_quotient && self.positive_on_grid
    }
}

/// Divides `P̃^(N+ℓ, ℓ/2)_{N+ℓ}` by `P^(N, ℓ/2)_N` over `ℚ(d)[x]` and checks
/// the quotient for integrality and positivity on `grid` plus the default
/// grid. Samples with `x ≤ 0` are skipped.
pub fn verify_conjecture(n: u32, ell: u32, grid: &[(Rational, Rational)]) -> Result<ConjectureReport> {
    verify_conjecture_with_fault(n, ell, grid, None)
}

/// As [`verify_conjecture`], with an optional perturbation of the divisor.
pub fn verify_conjecture_with_fault(
    n: u32,
    ell: u32,
    grid: &[(Rational, Rational)],
    fault: Option<Fault>,
) -> Result<ConjectureReport> {
    if n == 0 {
        return Err(crate::Error::InvalidParameter("N must be at least 1".into()));
    }
    let two_eps = ell as i32;
    let num = sequence(n + ell, two_eps, Variant::Tilde, None).pop().expect("nonempty");
    let den = sequence(n, two_eps, Variant::Plain, fault).pop().expect("nonempty");
    let div = poly_div_x(&num, &den)?;
    let exact = div.quotient.to_bivar();

    let mut samples: Vec<(Rational, Rational)> = grid.to_vec();
    samples.extend(default_conjecture_grid());
    samples.retain(|(x, _)| x.is_positive());
    let failing_samples: Vec<(String, String)> = samples
        .iter()
        .filter(|(x, d)| !div.quotient.eval(x, d).is_some_and(|v| v.is_positive()))
        .map(|(x, d)| (rational_to_string(x), rational_to_string(d)))
        .collect();

    Ok(ConjectureReport {
        n,
        ell,
        remainder_zero: div.remainder.is_zero(),
        integer_quotient: exact.is_some(),
        positive_on_grid: failing_samples.is_empty(),
        quotient: exact.map(|q| q.to_string()),
        samples_checked: samples.len(),
        failing_samples,
    })
}
