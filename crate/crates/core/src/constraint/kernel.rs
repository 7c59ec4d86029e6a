use serde::Serialize;

use super::{tridiag_matrix, ConstraintFamily, Variant};
use crate::exactpoly::{to_f64, Rational};
use crate::{Error, Result};

/// Unit kernel vector of the specialised `M_N(x, d)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelVector {
    pub entries: Vec<f64>,
    /// `‖M v‖₂`.
    pub residual: f64,
    /// Frobenius norm of `M`.
    pub matrix_norm: f64,
}

const REL_TOL: f64 = 1e-6;

struct Band {
    diag: Vec<f64>,
    upper: Vec<f64>,
    lower: Vec<f64>,
}

fn band(fam: ConstraintFamily, d: &Rational, x: f64) -> Band {
    let t = tridiag_matrix(fam, fam.n).expect("k = N in range");
    let d = to_f64(d);
    let ev = |v: &[crate::BivarPoly]| v.iter().map(|p| p.eval_f64(x, d)).collect();
    Band {
        diag: ev(&t.diag),
        upper: ev(&t.upper),
        lower: ev(&t.lower),
    }
}

impl Band {
    fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        (0..n)
            .map(|r| {
                let mut s = self.diag[r] * v[r];
                if r + 1 < n {
                    s += self.upper[r] * v[r + 1];
                }
                if r > 0 {
                    s += self.lower[r - 1] * v[r - 1];
                }
                s
            })
            .collect()
    }

    fn frobenius(&self) -> f64 {
        self.diag
            .iter()
            .chain(&self.upper)
            .chain(&self.lower)
            .map(|a| a * a)
            .sum::<f64>()
            .sqrt()
    }
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    v.iter_mut().for_each(|a| *a /= norm);
}

fn finish(b: &Band, mut v: Vec<f64>) -> Result<KernelVector> {
    normalize(&mut v);
    let residual = b.apply(&v).iter().map(|a| a * a).sum::<f64>().sqrt();
    let matrix_norm = b.frobenius();
    let tolerance = REL_TOL * matrix_norm;
    if !(residual <= tolerance) {
        return Err(Error::NotARoot { residual, tolerance });
    }
    Ok(KernelVector {
        entries: v,
        residual,
        matrix_norm,
    })
}

fn check_x(x: f64) -> Result<()> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::InvalidParameter(format!("x must be positive and finite, got {x}")));
    }
    Ok(())
}

/// Kernel vector of `M_N^(N,ε)` at `(x, d)` by forward substitution from the
/// top row. For the plain family `v₀` is the seed; for the tilde family the
/// first row forces `v₀ = 0` and `v₁` is the seed. The last row is left
/// unused and its defect is the residual.
pub fn kernel_vector(fam: ConstraintFamily, d_value: &Rational, x_value: f64) -> Result<KernelVector> {
    check_x(x_value)?;
    let b = band(fam, d_value, x_value);
    let n = fam.n as usize;
    let mut v = vec![0.0; n + 1];
    let start = match fam.variant {
        Variant::Plain => {
            v[0] = 1.0;
            v[1] = -b.diag[0] / b.upper[0];
            1
        }
        Variant::Tilde => {
            v[1] = 1.0;
            1
        }
    };
    for r in start..n {
        v[r + 1] = -(b.lower[r - 1] * v[r - 1] + b.diag[r] * v[r]) / b.upper[r];
    }
    finish(&b, v)
}

/// Same kernel, reconstructed upward from `v_N = 1`. The plain family's
/// `(1, 0)` entry vanishes, so `v₀` comes from the first row instead.
pub fn kernel_vector_from_bottom(fam: ConstraintFamily, d_value: &Rational, x_value: f64) -> Result<KernelVector> {
    check_x(x_value)?;
    let b = band(fam, d_value, x_value);
    let n = fam.n as usize;
    let mut v = vec![0.0; n + 1];
    v[n] = 1.0;
    for r in (1..=n).rev() {
        let sub = b.lower[r - 1];
        let above = if r < n { b.upper[r] * v[r + 1] } else { 0.0 };
        if sub != 0.0 {
            v[r - 1] = -(b.diag[r] * v[r] + above) / sub;
        } else {
            v[r - 1] = -b.upper[r - 1] * v[r] / b.diag[r - 1];
            break;
        }
    }
    finish(&b, v)
}
