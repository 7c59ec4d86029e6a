use super::{assemble_K, KParams, RepParams};
use crate::constraint::{ConstraintFamily, Variant};
use crate::exactpoly::{rat, Rational};
use crate::Result;

/// Where a constraint family lives inside a principal series module.
///
/// Step `k` of the family's tridiagonal matrix is the weight
/// `n_top − k` of `ϖ_{j,a}`. For the plain family steps `0..=N` span the
/// `(N+1)`-dimensional submodule. For the tilde family steps `1..=N` span an
/// `N`-dimensional submodule and step 0 is the weight just above it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyLayout {
    pub j: u8,
    pub a: Rational,
    pub n_top: i64,
    pub kp: KParams,
}

impl FamilyLayout {
    pub fn lambda_a(&self) -> Rational {
        self.kp.lambda_a(&self.a)
    }

    pub fn weight_of_step(&self, k: u32) -> i64 {
        self.n_top - k as i64
    }
}

/// Layout of `fam` at `x = 4g²` and `d = Δ²`, using `K` for the plain family
/// and `K̃` for the tilde family.
pub fn family_layout(fam: ConstraintFamily, x: &Rational, d: &Rational) -> FamilyLayout {
    let g2 = x * rat(1, 4);
    let eps = fam.eps();
    let s = fam.lambda_plus_g2();
    let n = fam.n as i64;
    let even = n % 2 == 0;
    let (kp, a, j, n_top) = match fam.variant {
        Variant::Plain => {
            let (kp, a) = KParams::case1(&s, &g2, d, &eps);
            (kp, a, if even { 1 } else { 2 }, n / 2)
        }
        Variant::Tilde => {
            let (kp, a) = KParams::case2(&s, &g2, d, &eps);
            (kp, a, if even { 2 } else { 1 }, (n + 1) / 2)
        }
    };
    FamilyLayout { j, a, n_top, kp }
}

/// Block of `ϖ(K) − Λ_a` on the weights of steps `0..=N`, in step order.
pub fn family_block(fam: ConstraintFamily, x: &Rational, d: &Rational) -> Result<Vec<Vec<Rational>>> {
    let lay = family_layout(fam, x, d);
    let n = fam.n as i64;
    let params = RepParams::new(lay.j, lay.a.clone(), lay.n_top - n - 2, lay.n_top + 2)?;
    let k = assemble_K(&params, &lay.kp)?.add_scalar(&-lay.lambda_a());
    let steps = 0..=fam.n;
    Ok(steps
        .clone()
        .map(|r| {
            steps
                .clone()
                .map(|c| {
                    k.at_weight(lay.weight_of_step(r), lay.weight_of_step(c))
                        .expect("inside window")
                        .clone()
                })
                .collect()
        })
        .collect())
}
