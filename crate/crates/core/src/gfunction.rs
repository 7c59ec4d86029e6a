//! Exceptional G-functions of the symmetric model (`ε = 0`).
//!
//! With `K_N = 0`, `K_{N+1} = 1` and, for `n > N`,
//!
//! ```text
//! (n+1) K_{n+1} = (4g² + n − N + Δ²/(N−n)) K_n − 4g² K_{n−1}
//! ```
//!
//! the function
//!
//! ```text
//! G₊(g, Δ) = −2(N+1)/Δ + Σ_{n>N} K_n (1 + Δ/(n−N)) 2^{−(n−N−1)}
//! ```
//!
//! vanishes exactly when `λ = N − g²` is a non-degenerate eigenvalue. The
//! weights are the series evaluated at the symmetric point `z = 0`, i.e.
//! `x = ½` in the Heun variable. `G₋(g, Δ) = G₊(g, −Δ)`.

use serde::Serialize;

use crate::constraint::{ConstraintFamily, Fault};
use crate::{Error, Result};

pub const MAX_TERMS: usize = 5000;
const MIN_EXTRA_TERMS: usize = 25;
const TAIL_SAFETY: f64 = 10.0;
const GRID_POINTS: usize = 200;
const DEGENERATE_TOL: f64 = 1e-8;

/// `K_N, K_{N+1}, …, K_{n_stop}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KSeries {
    #[serde(rename = "N")]
    pub n: u32,
    pub g: f64,
    pub delta: f64,
    /// `coeffs[i] = K_{N+i}`.
    pub coeffs: Vec<f64>,
    pub n_stop: usize,
}

impl KSeries {
    pub fn k(&self, n: usize) -> Option<f64> {
        n.checked_sub(self.n as usize).and_then(|i| self.coeffs.get(i)).copied()
    }

    /// `|(n+1)K_{n+1} − (4g² + n − N + Δ²/(N−n))K_n + 4g²K_{n−1}| / max(1, |K_n|)`
    /// for every `n` with both neighbours stored.
    pub fn recurrence_residuals(&self) -> Vec<f64> {
        let nn = self.n as usize;
        (nn + 1..self.n_stop)
            .map(|n| {
                let (km, k, kp) = (self.k(n - 1).unwrap(), self.k(n).unwrap(), self.k(n + 1).unwrap());
                let r = (n as f64 + 1.0) * kp - coefficient(self.n, n, self.g, self.delta) * k
                    + 4.0 * self.g * self.g * km;
                r.abs() / k.abs().max(1.0)
            })
            .collect()
    }
}

fn coefficient(big_n: u32, n: usize, g: f64, delta: f64) -> f64 {
    let off = n as f64 - big_n as f64;
    4.0 * g * g + off - delta * delta / off
}

/// Generates `K_n` lazily, starting at `n = N+1`.
struct KIter {
    big_n: u32,
    g: f64,
    delta: f64,
    n: usize,
    prev: f64,
    cur: f64,
    /// Absolute `n` whose coefficient is perturbed by one.
    fault_at: Option<usize>,
}

impl KIter {
    fn new(big_n: u32, g: f64, delta: f64, fault: Option<Fault>) -> Self {
        KIter {
            big_n,
            g,
            delta,
            n: big_n as usize + 1,
            prev: 0.0,
            cur: 1.0,
            fault_at: fault.map(|f| big_n as usize + 1 + f.step as usize),
        }
    }
}

impl Iterator for KIter {
    /// `(n, K_n)`
    type Item = (usize, f64);
    fn next(&mut self) -> Option<(usize, f64)> {
        let out = (self.n, self.cur);
        let mut c = coefficient(self.big_n, self.n, self.g, self.delta);
        if self.fault_at == Some(self.n) {
            c += 1.0;
        }
        let next = (c * self.cur
            - 4.0 * self.g * self.g * self.prev)
            / (self.n as f64 + 1.0);
        self.prev = self.cur;
        self.cur = next;
        self.n += 1;
        Some(out)
    }
}

pub fn k_series(n: u32, g: f64, delta: f64, n_stop: usize) -> Result<KSeries> {
    k_series_with_fault(n, g, delta, n_stop, None)
}

/// As [`k_series`] with the recurrence coefficient at `n = N+1+step` raised
/// by one. Residuals are still measured against the true recurrence.
pub fn k_series_with_fault(n: u32, g: f64, delta: f64, n_stop: usize, fault: Option<Fault>) -> Result<KSeries> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    if n_stop <= n as usize + 1 {
        return Err(Error::InvalidParameter("n_stop must exceed N + 1".into()));
    }
    let mut coeffs = vec![0.0];
    coeffs.extend(KIter::new(n, g, delta, fault).take(n_stop - n as usize).map(|(_, k)| k));
    Ok(KSeries {
        n,
        g,
        delta,
        coeffs,
        n_stop,
    })
}

/// Neumaier compensated sum.
#[derive(Default)]
struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GValue {
    pub value: f64,
    pub n_stop: usize,
    /// `10 ×` the magnitude of the last term summed.
    pub tail_bound: f64,
}

fn check_args(n: u32, g: f64, delta: f64, tol: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    if !(delta != 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter("delta must be finite and nonzero".into()));
    }
    if !(g >= 0.0 && g.is_finite()) {
        return Err(Error::InvalidParameter("g must be finite and nonnegative".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tol must be positive".into()));
    }
    Ok(())
}

/// Sums `constant + Σ term(n, K_n)`. The stopping scale is the running sum
/// of absolute values, which stays meaningful near a zero of the function.
fn sum_series(
    n: u32,
    g: f64,
    delta: f64,
    tol: f64,
    constant: f64,
    fault: Option<Fault>,
    term: impl Fn(usize, f64) -> f64,
) -> Result<GValue> {
    let mut s = Compensated::default();
    s.add(constant);
    let mut scale = constant.abs();
    let mut small_run = 0;
    for (k, kn) in KIter::new(n, g, delta, fault) {
        let t = term(k, kn);
        if !t.is_finite() {
            return Err(Error::Unconverged { n_stop: k });
        }
        s.add(t);
        scale += t.abs();
        small_run = if t.abs() < tol * scale { small_run + 1 } else { 0 };
        if small_run >= 3 && k >= n as usize + MIN_EXTRA_TERMS {
            return Ok(GValue {
                value: s.value(),
                n_stop: k,
                tail_bound: TAIL_SAFETY * t.abs(),
            });
        }
        if k >= MAX_TERMS {
            break;
        }
    }
    Err(Error::Unconverged { n_stop: MAX_TERMS })
}

fn weight(n: usize, big_n: u32) -> f64 {
    0.5f64.powi((n - big_n as usize - 1) as i32)
}

pub fn g_plus(n: u32, g: f64, delta: f64, tol: f64) -> Result<GValue> {
    g_plus_with_fault(n, g, delta, tol, None)
}

pub fn g_plus_with_fault(n: u32, g: f64, delta: f64, tol: f64, fault: Option<Fault>) -> Result<GValue> {
    check_args(n, g, delta, tol)?;
    let off = |k: usize| (k - n as usize) as f64;
    sum_series(n, g, delta, tol, -2.0 * (n as f64 + 1.0) / delta, fault, |k, kn| {
        kn * (1.0 + delta / off(k)) * weight(k, n)
    })
}

/// `G₋(g, Δ) = 2(N+1)/Δ + Σ K_n (1 − Δ/(n−N)) 2^{−(n−N−1)}`.
pub fn g_minus(n: u32, g: f64, delta: f64, tol: f64) -> Result<GValue> {
    g_minus_with_fault(n, g, delta, tol, None)
}

pub fn g_minus_with_fault(n: u32, g: f64, delta: f64, tol: f64, fault: Option<Fault>) -> Result<GValue> {
    check_args(n, g, delta, tol)?;
    let off = |k: usize| (k - n as usize) as f64;
    sum_series(n, g, delta, tol, 2.0 * (n as f64 + 1.0) / delta, fault, |k, kn| {
        kn * (1.0 - delta / off(k)) * weight(k, n)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, PartialOrd, Ord)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Plus,
    Minus,
}

impl std::fmt::Display for Parity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Parity::Plus => "plus",
            Parity::Minus => "minus",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExceptionalRoot {
    pub g: f64,
    /// `N − g²`.
    pub lambda: f64,
    pub parity: Parity,
    /// `|G|` at the reported root.
    pub residual: f64,
}

const SERIES_TOL: f64 = 1e-16;

fn eval(parity: Parity, n: u32, g: f64, delta: f64, fault: Option<Fault>) -> Result<f64> {
    let v = match parity {
        Parity::Plus => g_plus_with_fault(n, g, delta, SERIES_TOL, fault)?,
        Parity::Minus => g_minus_with_fault(n, g, delta, SERIES_TOL, fault)?,
    };
    Ok(v.value)
}

/// `|P^(N,0)_N(4g², Δ²)|` scaled by the same polynomial with absolute
/// coefficients.
pub fn scaled_constraint_value(n: u32, g: f64, delta: f64) -> f64 {
    let p = crate::constraint::constraint_poly(ConstraintFamily::plain(n, 0), n).expect("k = N");
    let (x, d) = (4.0 * g * g, delta * delta);
    p.eval_f64(x, d).abs() / p.abs_eval_f64(x, d)
}

/// Zeros of `G₊` and `G₋` in `g_range`, by sign changes on a uniform grid of
/// 200 points and bisection until `|G| < tol` (or the bracket cannot shrink).
/// Roots where the constraint polynomial also vanishes are dropped.
pub fn find_exceptional(n: u32, delta: f64, g_range: (f64, f64), tol: f64) -> Result<Vec<ExceptionalRoot>> {
    find_exceptional_with_fault(n, delta, g_range, tol, None)
}

pub fn find_exceptional_with_fault(
    n: u32,
    delta: f64,
    g_range: (f64, f64),
    tol: f64,
    fault: Option<Fault>,
) -> Result<Vec<ExceptionalRoot>> {
    let (lo, hi) = g_range;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::InvalidParameter(format!("bad g range ({lo}, {hi})")));
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter("delta must be positive".into()));
    }
    let grid: Vec<f64> = (0..GRID_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / (GRID_POINTS - 1) as f64)
        .collect();
    let mut out = Vec::new();
    for parity in [Parity::Plus, Parity::Minus] {
        let vals: Vec<f64> = grid
            .iter()
            .map(|&g| eval(parity, n, g, delta, fault))
            .collect::<Result<_>>()?;
        for i in 0..GRID_POINTS - 1 {
            let (mut a, mut b) = (grid[i], grid[i + 1]);
            let (mut fa, fb) = (vals[i], vals[i + 1]);
            if fa == 0.0 {
                // counted once, as the right end of the previous bracket
                if i > 0 {
                    continue;
                }
            } else if fa.signum() == fb.signum() && fb != 0.0 {
                continue;
            }
            let (mut g, mut fg) = if fa.abs() < fb.abs() { (a, fa) } else { (b, fb) };
            while fg.abs() >= tol {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                let fm = eval(parity, n, m, delta, fault)?;
                (g, fg) = (m, fm);
                if fm.signum() == fa.signum() {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            if scaled_constraint_value(n, g, delta) < DEGENERATE_TOL {
                continue;
            }
            out.push(ExceptionalRoot {
                g,
                lambda: n as f64 - g * g,
                parity,
                residual: fg.abs(),
            });
        }
    }
    out.sort_by(|x, y| x.g.total_cmp(&y.g).then(x.parity.cmp(&y.parity)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_conditions() {
        let s = k_series(2, 0.7, 1.3, 40).unwrap();
        assert_eq!(s.k(2), Some(0.0));
        assert_eq!(s.k(3), Some(1.0));
        assert_eq!(s.k(1), None);
    }

    #[test]
    fn second_coefficient() {
        for (n, g, d) in [(1u32, 0.3, 0.4), (3, 1.1, 2.0), (2, 0.0, 0.5)] {
            let s = k_series(n, g, d, 10).unwrap();
            let expected = (4.0 * g * g + 1.0 - d * d) / (n as f64 + 2.0);
            assert!((s.k(n as usize + 2).unwrap() - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_coupling_by_hand() {
        // N = 1, Δ = 1/2, g = 0: (n+1)K_{n+1} = (n − 1 − 1/(4(n−1)))K_n
        let s = k_series(1, 0.0, 0.5, 8).unwrap();
        let k3 = (1.0 - 0.25) / 3.0;
        let k4 = (2.0 - 0.25 / 2.0) * k3 / 4.0;
        let k5 = (3.0 - 0.25 / 3.0) * k4 / 5.0;
        assert!((s.k(3).unwrap() - k3).abs() < 1e-15);
        assert!((s.k(4).unwrap() - k4).abs() < 1e-15);
        assert!((s.k(5).unwrap() - k5).abs() < 1e-15);
    }

    #[test]
    fn recurrence_residual_small() {
        for (n, g, d) in [(1u32, 0.3, 0.4), (4, 1.4, 3.0), (2, 0.9, 0.1)] {
            let s = k_series(n, g, d, 200).unwrap();
            assert!(s.recurrence_residuals().iter().all(|&r| r <= 1e-12));
        }
    }

    #[test]
    fn fault_breaks_recurrence() {
        let s = k_series_with_fault(2, 0.5, 1.0, 60, Some(Fault { step: 3 })).unwrap();
        let r = s.recurrence_residuals();
        assert!(r[3] > 1e-6);
        assert!(r[..3].iter().all(|&v| v <= 1e-12));
    }

    #[test]
    fn bad_arguments() {
        assert!(k_series(0, 0.1, 0.1, 10).is_err());
        assert!(k_series(3, 0.1, 0.1, 4).is_err());
        assert!(g_plus(1, 0.3, 0.0, 1e-12).is_err());
        assert!(g_plus(1, -0.3, 1.0, 1e-12).is_err());
        assert!(find_exceptional(1, 1.0, (0.0, 1.0), 1e-10).is_err());
    }

    /// Independent oracle: direct summation over a long precomputed series.
    fn brute_g_plus(n: u32, g: f64, d: f64) -> f64 {
        let s = k_series(n, g, d, 400).unwrap();
        let mut acc = -2.0 * (n as f64 + 1.0) / d;
        for k in n as usize + 1..400 {
            let off = (k - n as usize) as f64;
            acc += s.k(k).unwrap() * (1.0 + d / off) * 0.5f64.powi(off as i32 - 1);
        }
        acc
    }

    #[test]
    fn zero_coupling_value() {
        for (n, d) in [(1u32, 0.5), (2, 1.5), (3, 2.5)] {
            let v = g_plus(n, 0.0, d, 1e-15).unwrap();
            assert!((v.value - brute_g_plus(n, 0.0, d)).abs() < 1e-12);
        }
    }

    #[test]
    fn converges_with_small_tail() {
        let v = g_plus(1, 0.3, 0.4, 1e-12).unwrap();
        assert!(v.tail_bound < 1e-6);
        assert!((v.value - brute_g_plus(1, 0.3, 0.4)).abs() < 1e-8);
        assert!(v.n_stop >= 26);
    }

    #[test]
    fn reflection() {
        for g in [0.1, 0.5, 1.2] {
            for d in [0.3, 1.0, 2.7] {
                let m = g_minus(2, g, d, 1e-15).unwrap().value;
                let p = g_plus(2, g, -d, 1e-15).unwrap().value;
                assert!((m - p).abs() <= 1e-13 * m.abs().max(1.0));
            }
        }
    }

    #[test]
    fn no_common_zero() {
        for (n, d) in [(1u32, 1.5), (2, 2.5), (1, 3.5), (3, 3.0)] {
            for r in find_exceptional(n, d, (0.01, 1.5), 1e-10).unwrap() {
                let other = match r.parity {
                    Parity::Plus => g_minus(n, r.g, d, 1e-16),
                    Parity::Minus => g_plus(n, r.g, d, 1e-16),
                };
                assert!(other.unwrap().value.abs() > 1e-6);
            }
        }
    }

    #[test]
    fn roots_vanish() {
        let roots = find_exceptional(1, 1.5, (0.01, 1.5), 1e-10).unwrap();
        assert!(!roots.is_empty());
        for r in &roots {
            assert!(r.residual < 1e-10, "{r:?}");
            assert!((r.lambda - (1.0 - r.g * r.g)).abs() < 1e-15);
        }
        let mut sorted = roots.clone();
        sorted.sort_by(|a, b| a.g.total_cmp(&b.g));
        assert_eq!(sorted, roots);
    }
}
