//! Principal series representations `ϖ_{j,a}` of sl₂ on finite weight
//! windows.
//!
//! Basis vectors are `e_{1,n} = x^{n−¼}` (`j = 1`) or `e_{2,n} = x^{n+¼}`
//! (`j = 2`), carried only by their index `n`. With `b = a/2`:
//!
//! ```text
//! j = 1:  H e_n = 2n e_n,        E e_n = (n + b) e_{n+1},      F e_n = (−n + b) e_{n−1}
//! j = 2:  H e_n = (2n + 1) e_n,  E e_n = (n + b + ½) e_{n+1},  F e_n = (−n + b − ½) e_{n−1}
//! ```
//!
//! A window is a truncation of an infinite-dimensional module, so products
//! lose information near its edges. Each [`RepOperator`] tracks how many
//! rows at each edge may be wrong (`margin`) and how far it moves weights
//! (`bandwidth`); identities are compared on the remaining interior rows.

mod checks;
mod families;

use std::fmt;
use std::ops::Range;

use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::exactpoly::{rat, rational_to_string, Rational};
use crate::{Error, Result};

pub use checks::{
    commutation_check, commutator_check, degeneracy_rank_check, family_block_check, intertwiner_check, invariant_subspace_check,
    CheckItem, CheckReport, DegeneracyReport,
};
pub use families::{family_block, family_layout, FamilyLayout};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    H,
    E,
    F,
}

impl std::str::FromStr for Generator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "H" | "h" => Ok(Generator::H),
            "E" | "e" => Ok(Generator::E),
            "F" | "f" => Ok(Generator::F),
            _ => Err(Error::Parse(format!("unknown generator {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepParams {
    /// 1 for the spherical series, 2 for the non-spherical one.
    pub j: u8,
    pub a: Rational,
    pub n_min: i64,
    pub n_max: i64,
}

impl RepParams {
    pub fn new(j: u8, a: Rational, n_min: i64, n_max: i64) -> Result<Self> {
        if j != 1 && j != 2 {
            return Err(Error::InvalidParameter(format!("j must be 1 or 2, got {j}")));
        }
        if n_min > n_max {
            return Err(Error::InvalidParameter(format!("empty window {n_min}..{n_max}")));
        }
        Ok(RepParams { j, a, n_min, n_max })
    }

    pub fn dim(&self) -> usize {
        (self.n_max - self.n_min + 1) as usize
    }

    pub fn index(&self, n: i64) -> Option<usize> {
        (self.n_min..=self.n_max).contains(&n).then(|| (n - self.n_min) as usize)
    }

    pub fn weight(&self, idx: usize) -> i64 {
        self.n_min + idx as i64
    }

    fn shift(&self) -> Rational {
        if self.j == 1 {
            Rational::zero()
        } else {
            rat(1, 2)
        }
    }

    /// Eigenvalue of `H` on `e_n`.
    pub fn h_coeff(&self, n: i64) -> Rational {
        Rational::from_integer((2 * n).into()) + self.shift() * Rational::from_integer(2.into())
    }

    /// `E e_n = e_coeff(n) e_{n+1}`.
    pub fn e_coeff(&self, n: i64) -> Rational {
        Rational::from_integer(n.into()) + &self.a / Rational::from_integer(2.into()) + self.shift()
    }

    /// `F e_n = f_coeff(n) e_{n−1}`.
    pub fn f_coeff(&self, n: i64) -> Rational {
        Rational::from_integer((-n).into()) + &self.a / Rational::from_integer(2.into()) - self.shift()
    }

    /// True when the window spans a submodule, so truncation is exact.
    pub fn is_closed(&self) -> bool {
        self.e_coeff(self.n_max).is_zero() && self.f_coeff(self.n_min).is_zero()
    }
}

/// Dense exact matrix of an element of `U(sl₂)` on a weight window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepOperator {
    pub params: RepParams,
    /// `matrix[r][c]` is the coefficient of `e_{n_min+r}` in the image of
    /// `e_{n_min+c}`.
    pub matrix: Vec<Vec<Rational>>,
    /// Rows within this distance of either edge may be truncated.
    pub margin: usize,
    /// Maximum weight displacement.
    pub bandwidth: usize,
}

impl RepOperator {
    fn zeros(params: &RepParams) -> Vec<Vec<Rational>> {
        vec![vec![Rational::zero(); params.dim()]; params.dim()]
    }

    pub fn identity(params: &RepParams) -> Self {
        Self::scalar(params, Rational::one())
    }

    pub fn scalar(params: &RepParams, c: Rational) -> Self {
        let mut m = Self::zeros(params);
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = c.clone();
        }
        RepOperator {
            params: params.clone(),
            matrix: m,
            margin: 0,
            bandwidth: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.params.dim()
    }

    fn check_same(&self, o: &RepOperator) {
        assert_eq!(self.params, o.params, "operators on different windows");
    }

    fn clamp_margin(&self, m: usize) -> usize {
        if self.params.is_closed() {
            0
        } else {
            m
        }
    }

    pub fn mul(&self, o: &RepOperator) -> RepOperator {
        self.check_same(o);
        let n = self.dim();
        let mut m = Self::zeros(&self.params);
        for (r, row) in m.iter_mut().enumerate() {
            for k in 0..n {
                let a = &self.matrix[r][k];
                if a.is_zero() {
                    continue;
                }
                for (c, out) in row.iter_mut().enumerate() {
                    let b = &o.matrix[k][c];
                    if !b.is_zero() {
                        *out += a * b;
                    }
                }
            }
        }
        RepOperator {
            params: self.params.clone(),
            matrix: m,
            margin: self.clamp_margin(self.margin.max(o.margin + self.bandwidth)),
            bandwidth: self.bandwidth + o.bandwidth,
        }
    }

    fn zip(&self, o: &RepOperator, f: impl Fn(&Rational, &Rational) -> Rational) -> RepOperator {
        self.check_same(o);
        let m = self
            .matrix
            .iter()
            .zip(&o.matrix)
            .map(|(ra, rb)| ra.iter().zip(rb).map(|(a, b)| f(a, b)).collect())
            .collect();
        RepOperator {
            params: self.params.clone(),
            matrix: m,
            margin: self.margin.max(o.margin),
            bandwidth: self.bandwidth.max(o.bandwidth),
        }
    }

    pub fn add(&self, o: &RepOperator) -> RepOperator {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &RepOperator) -> RepOperator {
        self.zip(o, |a, b| a - b)
    }

    pub fn scale(&self, c: &Rational) -> RepOperator {
        RepOperator {
            matrix: self.matrix.iter().map(|r| r.iter().map(|a| a * c).collect()).collect(),
            ..self.clone()
        }
    }

    /// `self + c·I`.
    pub fn add_scalar(&self, c: &Rational) -> RepOperator {
        self.add(&Self::scalar(&self.params, c.clone()))
    }

    pub fn commutator(&self, o: &RepOperator) -> RepOperator {
        self.mul(o).sub(&o.mul(self))
    }

    /// Row indices not affected by truncation.
    pub fn interior_rows(&self) -> Range<usize> {
        let n = self.dim();
        if 2 * self.margin >= n {
            return 0..0;
        }
        self.margin..n - self.margin
    }

    /// Largest entrywise `|self − o|` over the rows interior to both.
    pub fn interior_max_diff(&self, o: &RepOperator) -> Rational {
        self.check_same(o);
        let rows = {
            let a = self.interior_rows();
            let b = o.interior_rows();
            a.start.max(b.start)..a.end.min(b.end)
        };
        rows.flat_map(|r| self.matrix[r].iter().zip(&o.matrix[r]).map(|(a, b)| (a - b).abs()))
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// Coefficient of `e_{row}` in the image of `e_{col}`, by weight.
    pub fn at_weight(&self, row: i64, col: i64) -> Option<&Rational> {
        let r = self.params.index(row)?;
        let c = self.params.index(col)?;
        Some(&self.matrix[r][c])
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "j": self.params.j,
            "a": rational_to_string(&self.params.a),
            "n_min": self.params.n_min,
            "n_max": self.params.n_max,
            "margin": self.margin,
            "matrix": self.matrix.iter()
                .map(|r| r.iter().map(rational_to_string).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }
}

impl Serialize for RepOperator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl fmt::Display for RepOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.matrix {
            let cells: Vec<String> = row.iter().map(rational_to_string).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Matrix of `H`, `E` or `F`. Images leaving the window are dropped; every
/// row that is kept is exact.
pub fn rep_generator(params: &RepParams, gen: Generator) -> RepOperator {
    let mut m = RepOperator::zeros(params);
    let mut bandwidth = 1;
    for c in 0..params.dim() {
        let n = params.weight(c);
        match gen {
            Generator::H => {
                m[c][c] = params.h_coeff(n);
                bandwidth = 0;
            }
            Generator::E => {
                if let Some(r) = params.index(n + 1) {
                    m[r][c] = params.e_coeff(n);
                }
            }
            Generator::F => {
                if let Some(r) = params.index(n - 1) {
                    m[r][c] = params.f_coeff(n);
                }
            }
        }
    }
    RepOperator {
        params: params.clone(),
        matrix: m,
        margin: 0,
        bandwidth,
    }
}

/// Parameters of `𝕂(α,β,γ;C) = [½H − E + α](F + β) + γ[H − ½] + C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KParams {
    pub alpha: Rational,
    pub beta: Rational,
    pub gamma: Rational,
    pub c: Rational,
}

/// `μ = s² − 4g²s − d` with `s = λ + g²`.
pub fn mu_of(s: &Rational, g2: &Rational, d: &Rational) -> Rational {
    s * s - Rational::from_integer(4.into()) * g2 * s - d
}

impl KParams {
    /// `Λ_a = β(a/2 + α) + γ(a − ½)`.
    pub fn lambda_a(&self, a: &Rational) -> Rational {
        &self.beta * (a * rat(1, 2) + &self.alpha) + &self.gamma * (a - rat(1, 2))
    }

    /// Element `K` of the first reduced eigenproblem at `s = λ + g²`, and its
    /// representation parameter `a = −(s − ε)`.
    pub fn case1(s: &Rational, g2: &Rational, d: &Rational, eps: &Rational) -> (KParams, Rational) {
        let four_g2 = Rational::from_integer(4.into()) * g2;
        let kp = KParams {
            alpha: Rational::one() - (s - eps) * rat(1, 2),
            beta: four_g2.clone(),
            gamma: rat(1, 2) - (s + eps) * rat(1, 2),
            c: mu_of(s, g2, d) + eps * &four_g2 - eps * eps,
        };
        (kp, -(s - eps))
    }

    /// Element `K̃` of the second reduced eigenproblem, with
    /// `a = −(s − 1 + ε)`.
    pub fn case2(s: &Rational, g2: &Rational, d: &Rational, eps: &Rational) -> (KParams, Rational) {
        let four_g2 = Rational::from_integer(4.into()) * g2;
        let kp = KParams {
            alpha: rat(-1, 2) - (s + eps) * rat(1, 2),
            beta: four_g2.clone(),
            gamma: -(s - eps) * rat(1, 2),
            c: mu_of(s, g2, d) - eps * &four_g2 - eps * eps,
        };
        (kp, -(s - Rational::one() + eps))
    }
}

const MIN_INTERIOR: usize = 3;

/// `ϖ(𝕂(α,β,γ;C))` on the window, built from generator products.
#[allow(non_snake_case)]
pub fn assemble_K(params: &RepParams, kp: &KParams) -> Result<RepOperator> {
    let h = rep_generator(params, Generator::H);
    let e = rep_generator(params, Generator::E);
    let f = rep_generator(params, Generator::F);
    let left = h.scale(&rat(1, 2)).sub(&e).add_scalar(&kp.alpha);
    let right = f.add_scalar(&kp.beta);
    let k = left
        .mul(&right)
        .add(&h.add_scalar(&rat(-1, 2)).scale(&kp.gamma))
        .add_scalar(&kp.c);
    let interior = k.interior_rows().len();
    if interior < MIN_INTERIOR && !params.is_closed() {
        return Err(Error::WindowTooSmall {
            interior,
            required: MIN_INTERIOR,
        });
    }
    Ok(k)
}

/// `Ω = H² + 2EF + 2FE`.
pub fn casimir(params: &RepParams) -> RepOperator {
    let h = rep_generator(params, Generator::H);
    let e = rep_generator(params, Generator::E);
    let f = rep_generator(params, Generator::F);
    let two = Rational::from_integer(2.into());
    h.mul(&h).add(&e.mul(&f).add(&f.mul(&e)).scale(&two))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::int;
    use proptest::prelude::*;

    #[test]
    fn h_diagonal_spherical() {
        let p = RepParams::new(1, int(0), -2, 2).unwrap();
        let h = rep_generator(&p, Generator::H);
        let diag: Vec<Rational> = (0..5).map(|i| h.matrix[i][i].clone()).collect();
        assert_eq!(diag, [-4, -2, 0, 2, 4].map(int).to_vec());
        assert_eq!(h.bandwidth, 0);
    }

    #[test]
    fn e_non_spherical() {
        let p = RepParams::new(2, int(1), 0, 1).unwrap();
        let e = rep_generator(&p, Generator::E);
        assert_eq!(e.at_weight(1, 0), Some(&int(1)));
    }

    #[test]
    fn top_of_finite_block_is_e_closed() {
        for m in 1..5 {
            let p = RepParams::new(1, int(-2 * m), -m, m).unwrap();
            assert!(p.e_coeff(m).is_zero());
            assert!(p.is_closed());
        }
    }

    #[test]
    fn invalid_params() {
        assert!(RepParams::new(3, int(0), 0, 1).is_err());
        assert!(RepParams::new(1, int(0), 2, 1).is_err());
        assert!("X".parse::<Generator>().is_err());
    }

    #[test]
    fn k_collapses_to_half_hf_minus_ef() {
        let p = RepParams::new(1, rat(1, 3), -5, 5).unwrap();
        let zero = KParams {
            alpha: int(0),
            beta: int(0),
            gamma: int(0),
            c: int(0),
        };
        let k = assemble_K(&p, &zero).unwrap();
        let h = rep_generator(&p, Generator::H);
        let e = rep_generator(&p, Generator::E);
        let f = rep_generator(&p, Generator::F);
        let expected = h.mul(&f).scale(&rat(1, 2)).sub(&e.mul(&f));
        assert!(k.interior_max_diff(&expected).is_zero());
        assert_eq!(k.margin, 1);
    }

    #[test]
    fn casimir_on_f3() {
        let p = RepParams::new(1, int(-2), -1, 1).unwrap();
        let om = casimir(&p);
        assert_eq!(om.margin, 0);
        assert_eq!(om.matrix, RepOperator::scalar(&p, int(8)).matrix);
    }

    #[test]
    fn window_too_small() {
        let p = RepParams::new(1, rat(1, 3), 0, 2).unwrap();
        let kp = KParams::case1(&int(2), &rat(1, 4), &rat(1, 2), &int(0)).0;
        assert!(matches!(assemble_K(&p, &kp), Err(Error::WindowTooSmall { .. })));
        // a closed block has no truncation, so any size is allowed
        let p = RepParams::new(1, int(-2), -1, 1).unwrap();
        assert!(assemble_K(&p, &kp).is_ok());
    }

    #[test]
    fn json_has_window_metadata() {
        let p = RepParams::new(2, rat(1, 2), -1, 1).unwrap();
        let v = rep_generator(&p, Generator::F).to_json();
        assert_eq!(v["j"], 2);
        assert_eq!(v["a"], "1/2");
        assert_eq!(v["matrix"].as_array().unwrap().len(), 3);
    }

    fn arb_params() -> impl Strategy<Value = RepParams> {
        (1u8..=2, -12i64..12, 1i64..6, -4i64..4, 2i64..8).prop_map(|(j, an, ad, lo, w)| {
            RepParams::new(j, rat(an, ad), lo, lo + w).unwrap()
        })
    }

    proptest! {
        #[test]
        fn casimir_is_scalar_on_interior(p in arb_params()) {
            let om = casimir(&p);
            let a = p.a.clone();
            let expected = RepOperator::scalar(&p, &a * (&a - int(2)));
            prop_assert!(om.interior_max_diff(&expected).is_zero());
        }

        #[test]
        fn margins_never_hide_interior_errors(p in arb_params()) {
            // the same product on a wider window must agree on the narrow one's interior rows
            let wide = RepParams::new(p.j, p.a.clone(), p.n_min - 3, p.n_max + 3).unwrap();
            let narrow = casimir(&p);
            let full = casimir(&wide);
            for r in narrow.interior_rows() {
                let n = p.weight(r);
                for c in 0..p.dim() {
                    let m = p.weight(c);
                    prop_assert_eq!(&narrow.matrix[r][c], full.at_weight(n, m).unwrap());
                }
            }
        }
    }
}
