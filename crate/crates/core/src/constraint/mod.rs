//! Constraint polynomials `P^(N,ε)_k` and `P̃^(N,ε)_k`, their tridiagonal
//! matrices and continuants.
//!
//! Matrices are indexed by the recurrence step `k = 0..=N` rather than by
//! sl₂ weights; the weight labelling is rebuilt in [`crate::sl2rep`]. With
//! `x = 4g²`, `d = Δ²` and `2ε` an integer every entry has integer
//! coefficients:
//!
//! ```text
//! plain:  diag_k = k² − kx − d + 2εk,  upper_k = (k+1)x,  lower_k = (N−k+1)(k−1)
//! tilde:  diag_k = k² − kx − d − 2εk,  upper_k = kx,      lower_k = (N−k+1)k
//! ```
//!
//! where `upper_k` sits at `(k, k+1)` and `lower_k` at `(k, k−1)`. The
//! normalisation `P_k = (−1)^k det M_k / (−d)` turns the continuant
//! recurrence into
//!
//! ```text
//! P_k = [kx + d − k² ∓ 2kε] P_{k−1} − k(k−1)(N−k+1) x P_{k−2}
//! ```

mod crossings;
mod kernel;
mod verify;

use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::exactpoly::{BivarPoly, Rational};
use crate::{Error, Result};

pub use crossings::{find_crossings, find_crossings_with_fault, module_pair, CrossingRecord};
pub use kernel::{kernel_vector, kernel_vector_from_bottom, KernelVector};
pub use verify::{
    default_conjecture_grid, verify_conjecture, verify_conjecture_with_fault, verify_identity_half, verify_identity_half_with_fault,
    ConjectureReport, IdentityReport,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// `P`, the `𝒦` eigenproblems with `λ + g² = N + ε`.
    Plain,
    /// `P̃`, the `𝒦̃` eigenproblems with `λ + g² = N − ε`.
    Tilde,
}

impl Variant {
    fn eps_sign(self) -> i64 {
        match self {
            Variant::Plain => 1,
            Variant::Tilde => -1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConstraintFamily {
    pub n: u32,
    /// `2ε`; exact paths require `ε ∈ ½ℤ`.
    pub two_eps: i32,
    pub variant: Variant,
}

impl ConstraintFamily {
    pub fn new(n: u32, two_eps: i32, variant: Variant) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("N must be at least 1".into()));
        }
        Ok(ConstraintFamily { n, two_eps, variant })
    }

    pub fn plain(n: u32, two_eps: i32) -> Self {
        Self::new(n, two_eps, Variant::Plain).expect("N >= 1")
    }

    pub fn tilde(n: u32, two_eps: i32) -> Self {
        Self::new(n, two_eps, Variant::Tilde).expect("N >= 1")
    }

    pub fn eps(&self) -> Rational {
        Rational::new(self.two_eps.into(), 2.into())
    }

    /// `λ + g²` at which this family's polynomial solutions live.
    pub fn lambda_plus_g2(&self) -> Rational {
        let n = Rational::from_integer(self.n.into());
        match self.variant {
            Variant::Plain => n + self.eps(),
            Variant::Tilde => n - self.eps(),
        }
    }

    pub fn check_step(&self, k: u32) -> Result<()> {
        if k > self.n {
            return Err(Error::StepOutOfRange { k: k as i64, n: self.n });
        }
        Ok(())
    }

    fn diag(&self, k: u32) -> BivarPoly {
        let k = k as i64;
        let c = k * k + self.variant.eps_sign() * k * self.two_eps as i64;
        BivarPoly::from_terms([(0, 0, c), (1, 0, -k), (0, 1, -1)])
    }

    fn upper(&self, k: u32) -> BivarPoly {
        let coef = match self.variant {
            Variant::Plain => k as i64 + 1,
            Variant::Tilde => k as i64,
        };
        BivarPoly::monomial(coef, 1, 0)
    }

    fn lower(&self, k: u32) -> BivarPoly {
        let (n, k) = (self.n as i64, k as i64);
        let coef = match self.variant {
            Variant::Plain => (n - k + 1) * (k - 1),
            Variant::Tilde => (n - k + 1) * k,
        };
        BivarPoly::constant(coef)
    }
}

impl fmt::Display for ConstraintFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.variant {
            Variant::Plain => "P",
            Variant::Tilde => "P~",
        };
        write!(f, "{name}^({},{}/2)", self.n, self.two_eps)
    }
}

/// Adds one to the constant term of the diagonal recurrence coefficient at a
/// single step. Used only to exercise failure paths end to end.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fault {
    pub step: u32,
}

/// `P_0, …, P_N` of the family.
pub fn constraint_sequence(fam: ConstraintFamily) -> Vec<BivarPoly> {
    sequence(fam.n, fam.two_eps, fam.variant, None)
}

pub fn constraint_sequence_with_fault(fam: ConstraintFamily, fault: Option<Fault>) -> Vec<BivarPoly> {
    sequence(fam.n, fam.two_eps, fam.variant, fault)
}

/// Runs the three-term recurrence; `n = 0` is allowed here (it only yields
/// `P_0 = 1`).
pub(crate) fn sequence(n: u32, two_eps: i32, variant: Variant, fault: Option<Fault>) -> Vec<BivarPoly> {
    let sign = variant.eps_sign();
    let mut out: Vec<BivarPoly> = Vec::with_capacity(n as usize + 1);
    out.push(BivarPoly::one());
    for k in 1..=n as i64 {
        let mut c0 = -k * k - sign * k * two_eps as i64;
        if fault.is_some_and(|f| f.step as i64 == k) {
            c0 += 1;
        }
        let head = BivarPoly::from_terms([(1, 0, k), (0, 1, 1), (0, 0, c0)]);
        let mut next = &head * &out[k as usize - 1];
        if k >= 2 {
            let coef = BigInt::from(k * (k - 1) * (n as i64 - k + 1));
            next = next - out[k as usize - 2].shift(1, 0).scale(&coef);
        }
        out.push(next);
    }
    out
}

/// `P^(N,ε)_k` (or `P̃^(N,ε)_k`) for `0 ≤ k ≤ N`.
pub fn constraint_poly(fam: ConstraintFamily, k: u32) -> Result<BivarPoly> {
    fam.check_step(k)?;
    let mut seq = sequence(fam.n, fam.two_eps, fam.variant, None);
    seq.truncate(k as usize + 1);
    Ok(seq.swap_remove(k as usize))
}

/// `(k+1)×(k+1)` leading block of the family's tridiagonal matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TridiagSpec {
    pub family: ConstraintFamily,
    pub size: usize,
    pub diag: Vec<BivarPoly>,
    /// `upper[i]` is the `(i, i+1)` entry.
    pub upper: Vec<BivarPoly>,
    /// `lower[i]` is the `(i+1, i)` entry.
    pub lower: Vec<BivarPoly>,
}

impl TridiagSpec {
    pub fn entry(&self, r: usize, c: usize) -> BivarPoly {
        if r == c {
            self.diag[r].clone()
        } else if c == r + 1 {
            self.upper[r].clone()
        } else if r == c + 1 {
            self.lower[c].clone()
        } else {
            BivarPoly::zero()
        }
    }

    pub fn eval(&self, x: &Rational, d: &Rational) -> Vec<Vec<Rational>> {
        (0..self.size)
            .map(|r| (0..self.size).map(|c| self.entry(r, c).eval(x, d)).collect())
            .collect()
    }

    pub fn eval_f64(&self, x: f64, d: f64) -> Vec<Vec<f64>> {
        (0..self.size)
            .map(|r| (0..self.size).map(|c| self.entry(r, c).eval_f64(x, d)).collect())
            .collect()
    }

    /// Determinant by the continuant recurrence.
    pub fn continuant(&self) -> BivarPoly {
        let mut prev = BivarPoly::one();
        let mut cur = self.diag[0].clone();
        for j in 1..self.size {
            let next = &(&self.diag[j] * &cur) - &(&(&self.upper[j - 1] * &self.lower[j - 1]) * &prev);
            prev = cur;
            cur = next;
        }
        cur
    }
}

pub fn tridiag_matrix(fam: ConstraintFamily, k: u32) -> Result<TridiagSpec> {
    fam.check_step(k)?;
    let size = k as usize + 1;
    Ok(TridiagSpec {
        family: fam,
        size,
        diag: (0..=k).map(|j| fam.diag(j)).collect(),
        upper: (0..k).map(|j| fam.upper(j)).collect(),
        lower: (1..=k).map(|j| fam.lower(j)).collect(),
    })
}

/// `det M_k` of the family.
pub fn continuant(fam: ConstraintFamily, k: u32) -> Result<BivarPoly> {
    Ok(tridiag_matrix(fam, k)?.continuant())
}
