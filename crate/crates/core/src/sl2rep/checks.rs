use nalgebra::DMatrix;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{casimir, rep_generator, Generator, KParams, RepOperator, RepParams};
use super::family_block;
use crate::constraint::{constraint_sequence_with_fault, find_crossings, kernel_vector, ConstraintFamily, Fault};
use crate::exactpoly::{int, rat, rational_to_string, Rational};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckItem {
    pub label: String,
    pub passed: bool,
    /// Largest interior discrepancy, as an exact rational string.
    pub discrepancy: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub items: Vec<CheckItem>,
}

impl CheckReport {
    fn new(check: &str) -> Self {
        CheckReport {
            check: check.into(),
            items: vec![],
        }
    }

    fn push_diff(&mut self, label: impl Into<String>, diff: Rational) {
        self.items.push(CheckItem {
            label: label.into(),
            passed: diff.is_zero(),
            discrepancy: rational_to_string(&diff),
        });
    }

    fn push_bool(&mut self, label: impl Into<String>, ok: bool) {
        self.items.push(CheckItem {
            label: label.into(),
            passed: ok,
            discrepancy: if ok { "0" } else { "1" }.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }
}

fn gens(p: &RepParams) -> (RepOperator, RepOperator, RepOperator) {
    (
        rep_generator(p, Generator::H),
        rep_generator(p, Generator::E),
        rep_generator(p, Generator::F),
    )
}

/// `[H,E] = 2E`, `[H,F] = −2F`, `[E,F] = H` and `Ω = a(a−2)` on interior rows.
pub fn commutation_check(params: &RepParams) -> CheckReport {
    let (h, e, f) = gens(params);
    let two = int(2);
    let mut rep = CheckReport::new("commutation");
    rep.push_diff("[H,E] = 2E", h.commutator(&e).interior_max_diff(&e.scale(&two)));
    rep.push_diff("[H,F] = -2F", h.commutator(&f).interior_max_diff(&f.scale(&-two.clone())));
    rep.push_diff("[E,F] = H", e.commutator(&f).interior_max_diff(&h));
    let a = &params.a;
    let omega = RepOperator::scalar(params, a * (a - int(2)));
    rep.push_diff("Casimir = a(a-2)", casimir(params).interior_max_diff(&omega));
    rep
}

const COMMUTATOR_MIN_INTERIOR: usize = 5;

/// Compares `[K, K̃]` with
///
/// ```text
/// (ε + 3/2)(H + F)(F + 4g²) + (ε − ½)(8g²E + HF) − 2(ε + ½)(s − ½)F
/// ```
///
/// where `s = λ + g²` and `K`, `K̃` carry the reduced-eigenproblem
/// parameters at the same `(λ, g², d, ε)`. Both are evaluated on the same
/// module `params`.
pub fn commutator_check(
    params: &RepParams,
    lambda: &Rational,
    g2: &Rational,
    d: &Rational,
    eps: &Rational,
) -> Result<CheckReport> {
    let s = lambda + g2;
    let (kp1, _) = KParams::case1(&s, g2, d, eps);
    let (kp2, _) = KParams::case2(&s, g2, d, eps);
    let k = super::assemble_K(params, &kp1)?;
    let kt = super::assemble_K(params, &kp2)?;
    let lhs = k.commutator(&kt);
    let interior = lhs.interior_rows().len();
    if interior < COMMUTATOR_MIN_INTERIOR && !params.is_closed() {
        return Err(Error::WindowTooSmall {
            interior,
            required: COMMUTATOR_MIN_INTERIOR,
        });
    }
    let (h, e, f) = gens(params);
    let four_g2 = int(4) * g2;
    let half = rat(1, 2);
    let t1 = h.add(&f).mul(&f.add_scalar(&four_g2)).scale(&(eps + rat(3, 2)));
    let t2 = e.scale(&(int(8) * g2)).add(&h.mul(&f)).scale(&(eps - &half));
    let t3 = f.scale(&(int(-2) * (eps + &half) * (&s - &half)));
    let rhs = t1.add(&t2).add(&t3);
    let mut rep = CheckReport::new("commutator");
    rep.push_diff(
        format!(
            "[K,K~] at lambda={}, g2={}, d={}, eps={}",
            rational_to_string(lambda),
            rational_to_string(g2),
            rational_to_string(d),
            rational_to_string(eps)
        ),
        lhs.interior_max_diff(&rhs),
    );
    Ok(rep)
}

/// No generator maps a vector of weight in `lo..=hi` outside that range.
fn span_closed(j: u8, a: &Rational, lo: i64, hi: i64) -> bool {
    let p = RepParams::new(j, a.clone(), lo - 2, hi + 2).expect("valid window");
    let (h, e, f) = gens(&p);
    [h, e, f].iter().all(|g| {
        (lo..=hi).all(|col| {
            (p.n_min..=p.n_max)
                .filter(|row| !(lo..=hi).contains(row))
                .all(|row| g.at_weight(row, col).expect("in window").is_zero())
        })
    })
}

fn block_casimir(rep: &mut CheckReport, j: u8, a: &Rational, lo: i64, hi: i64) {
    let p = RepParams::new(j, a.clone(), lo, hi).expect("valid window");
    let k = p.dim() as i64;
    let expected = RepOperator::scalar(&p, int(k * k - 1));
    let om = casimir(&p);
    let diff = om.interior_max_diff(&expected);
    rep.push_diff(format!("Casimir on F_{k} = {}", k * k - 1), diff);
}

/// Finite-dimensional submodules `F_k` and the highest/lowest weight
/// boundaries of the discrete series pieces, for `j ∈ {1, 2}` and `m ≥ 1`.
pub fn invariant_subspace_check(j: u8, m: i64) -> Result<CheckReport> {
    if m < 1 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    let mut rep = CheckReport::new("invariant-subspace");
    // (a, lo, hi) of the finite blocks, then (a, lowest of D+, highest of D−)
    let (blocks, boundary) = match j {
        1 => (
            [(int(2 - 2 * m), -m + 1, m - 1), (int(-2 * m), -m, m)],
            (int(2 * m), m, -m),
        ),
        2 => (
            [(int(1 - 2 * m), -m, m - 1), (int(-1 - 2 * m), -m - 1, m)],
            (int(2 * m - 1), m - 1, -m),
        ),
        _ => return Err(Error::InvalidParameter(format!("j must be 1 or 2, got {j}"))),
    };
    for (a, lo, hi) in &blocks {
        let dim = hi - lo + 1;
        rep.push_bool(
            format!("F_{dim} = span e_{lo}..e_{hi} closed at a={a}"),
            span_closed(j, a, *lo, *hi),
        );
        block_casimir(&mut rep, j, a, *lo, *hi);
    }
    let (a, lowest, highest) = boundary;
    let p = RepParams::new(j, a.clone(), highest - 1, lowest + 1)?;
    rep.push_bool(format!("F e_{lowest} = 0 (D+ lowest weight, a={a})"), p.f_coeff(lowest).is_zero());
    rep.push_bool(format!("E e_{highest} = 0 (D- highest weight, a={a})"), p.e_coeff(highest).is_zero());
    Ok(rep)
}

fn is_even_integer(a: &Rational) -> bool {
    a.is_integer() && (a.to_integer() % 2u8).is_zero()
}

/// `c_n = ∏_{k=1}^{|n|} (k − a/2)/(k − 1 + a/2)` with `c_0 = 1`.
fn intertwiner_coeff(a: &Rational, n: i64) -> Rational {
    let half_a = a * rat(1, 2);
    (1..=n.abs()).fold(Rational::one(), |acc, k| {
        acc * (int(k) - &half_a) / (int(k - 1) + &half_a)
    })
}

/// Checks `A ϖ_{1,a}(X) = ϖ_{1,2−a}(X) A` for `X ∈ {H, E, F}` with `A`
/// diagonal.
pub fn intertwiner_check(a: &Rational, n_min: i64, n_max: i64) -> Result<CheckReport> {
    if is_even_integer(a) {
        return Err(Error::InvalidParameter(format!(
            "intertwiner undefined for even integer a = {a}"
        )));
    }
    let src = RepParams::new(1, a.clone(), n_min, n_max)?;
    let dst = RepParams::new(1, int(2) - a, n_min, n_max)?;
    let mut diag = RepOperator::identity(&src);
    for (i, row) in diag.matrix.iter_mut().enumerate() {
        row[i] = intertwiner_coeff(a, src.weight(i));
    }
    let mut rep = CheckReport::new("intertwiner");
    for g in [Generator::H, Generator::E, Generator::F] {
        let left = diag.mul(&rep_generator(&src, g));
        // same matrix on the target window, so the products can be compared
        let mut a_dst = diag.clone();
        a_dst.params = dst.clone();
        let mut right = rep_generator(&dst, g).mul(&a_dst);
        right.params = src.clone();
        rep.push_diff(format!("A {g:?} = {g:?}' A"), left.interior_max_diff(&right));
    }
    Ok(rep)
}

fn det(mut m: Vec<Vec<Rational>>) -> Rational {
    let n = m.len();
    let mut acc = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            m.swap(p, c);
            acc = -acc;
        }
        let pivot = m[c][c].clone();
        acc *= &pivot;
        for r in c + 1..n {
            let f = &m[r][c] / &pivot;
            if f.is_zero() {
                continue;
            }
            for k in c..n {
                let t = &f * &m[c][k];
                m[r][k] -= t;
            }
        }
    }
    acc
}

/// For each sample `(x, d)`: the family's block of `ϖ(K) − Λ_a` equals its
/// tridiagonal matrix, and the block determinant equals `(−1)^{N+1} d P_N`
/// with `P_N` from the (optionally faulted) recurrence.
pub fn family_block_check(
    fam: ConstraintFamily,
    samples: &[(Rational, Rational)],
    fault: Option<Fault>,
) -> Result<CheckReport> {
    let t = crate::constraint::tridiag_matrix(fam, fam.n)?;
    let p = constraint_sequence_with_fault(fam, fault).pop().expect("nonempty");
    let sign = if fam.n % 2 == 0 { int(-1) } else { int(1) };
    let mut rep = CheckReport::new("family-block");
    for (x, d) in samples {
        let block = family_block(fam, x, d)?;
        let at = format!("{} at x={}, d={}", fam, rational_to_string(x), rational_to_string(d));
        rep.push_bool(format!("block = tridiagonal, {at}"), block == t.eval(x, d));
        let expected = &sign * d * p.eval(x, d);
        rep.push_diff(format!("det = (-1)^(N+1) d P_N, {at}"), (det(block) - expected).abs());
    }
    Ok(rep)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegeneracyReport {
    #[serde(rename = "N")]
    pub n: u32,
    /// `(x, smallest singular value)` at each root.
    pub roots: Vec<(f64, f64)>,
    pub threshold: f64,
}

impl DegeneracyReport {
    pub fn passed(&self) -> bool {
        !self.roots.is_empty() && self.roots.iter().all(|&(_, s)| s > self.threshold)
    }
}

/// At `ε = ½`, every root of `P^(N,½)_N` also annihilates
/// `P̃^(N+1,½)_{N+1}`, and the two kernel vectors live on the same weights of
/// one module. Checks they are linearly independent.
pub fn degeneracy_rank_check(n: u32, d: &Rational, precision: &Rational) -> Result<DegeneracyReport> {
    let plain = ConstraintFamily::new(n, 1, crate::constraint::Variant::Plain)?;
    let tilde = ConstraintFamily::new(n + 1, 1, crate::constraint::Variant::Tilde)?;
    let mut roots = Vec::new();
    for rec in find_crossings(n, 1, d, precision)? {
        let x = rec.x_mid();
        let u = kernel_vector(plain, d, x)?.entries;
        let v = kernel_vector(tilde, d, x)?.entries;
        let m = DMatrix::from_fn(2, u.len(), |r, c| if r == 0 { u[c] } else { v[c + 1] });
        let mut m = m;
        for mut row in m.row_iter_mut() {
            let norm = row.norm();
            row /= norm;
        }
        let smin = m.singular_values().min();
        roots.push((x, smin));
    }
    Ok(DegeneracyReport {
        n,
        roots,
        threshold: 1e-6,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn family_block_determinant() {
        let samples = [(rat(3, 2), rat(1, 3)), (int(2), int(5))];
        for fam in [ConstraintFamily::plain(3, 1), ConstraintFamily::tilde(4, -1)] {
            assert!(family_block_check(fam, &samples, None).unwrap().passed());
        }
        let bad = family_block_check(ConstraintFamily::plain(3, 1), &samples, Some(Fault { step: 2 })).unwrap();
        assert!(!bad.passed());
        assert!(bad.items.iter().filter(|i| i.label.starts_with("block")).all(|i| i.passed));
    }

    #[test]
    fn commutator_at_half() {
        let p = RepParams::new(1, rat(1, 3), -6, 6).unwrap();
        let r = commutator_check(&p, &rat(5, 2), &rat(1, 4), &rat(1, 2), &rat(1, 2)).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn commutator_vanishing_first_coefficient() {
        let p = RepParams::new(2, rat(-3, 5), -6, 6).unwrap();
        let r = commutator_check(&p, &rat(11, 3), &rat(2, 7), &rat(3, 2), &rat(-3, 2)).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn commutator_random_sample() {
        let p = RepParams::new(1, rat(1, 2), -6, 6).unwrap();
        let r = commutator_check(&p, &rat(3, 7), &rat(2, 5), &rat(1, 3), &int(0)).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn commutator_window_too_small() {
        let p = RepParams::new(1, rat(1, 2), 0, 6).unwrap();
        assert!(matches!(
            commutator_check(&p, &int(1), &int(1), &int(1), &int(0)),
            Err(Error::WindowTooSmall { .. })
        ));
    }

    #[test]
    fn invariant_subspaces() {
        for j in 1..=2 {
            for m in 1..=5 {
                let r = invariant_subspace_check(j, m).unwrap();
                assert!(r.passed(), "{r:?}");
            }
        }
        assert!(invariant_subspace_check(1, 0).is_err());
        assert!(invariant_subspace_check(3, 1).is_err());
    }

    #[test]
    fn trivial_block_at_a_zero() {
        let p = RepParams::new(1, int(0), 0, 0).unwrap();
        assert!(p.e_coeff(0).is_zero() && p.f_coeff(0).is_zero());
    }

    #[test]
    fn top_of_f5() {
        let p = RepParams::new(1, int(-4), -2, 2).unwrap();
        assert!(p.e_coeff(2).is_zero());
    }

    #[test]
    fn v21_splits() {
        let p = RepParams::new(2, int(1), -2, 2).unwrap();
        assert!(p.f_coeff(0).is_zero());
        assert!(p.e_coeff(-1).is_zero());
        assert!(!p.is_closed());
    }

    #[test]
    fn intertwiner_examples() {
        for a in [int(1), rat(1, 2), int(3), rat(-5, 3)] {
            let r = intertwiner_check(&a, -4, 4).unwrap();
            assert!(r.passed(), "a={a}: {r:?}");
        }
        assert!(intertwiner_check(&int(2), -4, 4).is_err());
        assert!(intertwiner_check(&int(-4), -4, 4).is_err());
    }

    #[test]
    fn intertwiner_coefficient_hand_values() {
        // a = 1: c_1 = (1 − ½)/(0 + ½) = 1, c_2 = c_1·(2 − ½)/(1 + ½) = 1
        assert_eq!(intertwiner_coeff(&int(1), 2), int(1));
        // a = ½: c_1 = (3/4)/(1/4) = 3
        assert_eq!(intertwiner_coeff(&rat(1, 2), 1), int(3));
        assert_eq!(intertwiner_coeff(&rat(1, 2), -1), int(3));
    }

    #[test]
    fn degenerate_pairs_independent() {
        for n in 1..=5 {
            let r = degeneracy_rank_check(n, &rat(1, 4), &rat(1, 1_000_000_000_000)).unwrap();
            assert!(r.passed(), "{r:?}");
        }
    }

    proptest! {
        #[test]
        fn sl2_relations_hold(j in 1u8..=2, an in -20i64..20, ad in 1i64..7, lo in -5i64..0, w in 3i64..9) {
            let p = RepParams::new(j, rat(an, ad), lo, lo + w).unwrap();
            let r = commutation_check(&p);
            prop_assert!(r.passed(), "{:?}", r);
        }

        #[test]
        fn commutator_identity_random(
            j in 1u8..=2, an in -9i64..9, ad in 1i64..5,
            ln in -9i64..9, gn in 0i64..9, dn in 0i64..9, te in -3i64..4,
        ) {
            let p = RepParams::new(j, rat(an, ad), -6, 6).unwrap();
            let r = commutator_check(&p, &rat(ln, 3), &rat(gn, 4), &rat(dn, 5), &rat(te, 2)).unwrap();
            prop_assert!(r.passed());
        }
    }
}
