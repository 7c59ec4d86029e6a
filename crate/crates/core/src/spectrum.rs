//! Truncated-Fock diagonalization of `H = a†a + Δσ_z + gσ_x(a†+a) + εσ_x`.
//!
//! The basis is `|n⟩ ⊗ |±⟩` with `|±⟩` the σ_x eigenvectors, `n ≤ n_max`.
//! Index `i < n_max+1` is `|i,+⟩`, the rest `|i−n_max−1,−⟩`.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::constraint::CrossingRecord;
use crate::{Error, Result};

pub const DEFAULT_N_MAX: usize = 60;
pub const ESCALATED_N_MAX: usize = 120;
pub const CONVERGENCE_STEP: usize = 20;
pub const CONVERGENCE_TOL: f64 = 1e-9;
pub const CROSSING_TOL: f64 = 1e-7;
pub const AVOIDED_GAP: f64 = 1e-4;
pub const NMAX_ENV: &str = "AQRM_NMAX";

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModelParams {
    pub g: f64,
    pub delta: f64,
    pub eps: f64,
}

impl ModelParams {
    pub fn new(g: f64, delta: f64, eps: f64) -> Result<Self> {
        if !(g.is_finite() && delta.is_finite() && eps.is_finite()) {
            return Err(Error::InvalidParameter("model parameters must be finite".into()));
        }
        Ok(ModelParams { g, delta, eps })
    }
}

/// Fock cutoff from `AQRM_NMAX`, falling back to 60.
pub fn default_n_max() -> Result<usize> {
    match std::env::var(NMAX_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(Error::InvalidParameter(format!("{NMAX_ENV}={v} is not a positive integer"))),
        },
        Err(_) => Ok(DEFAULT_N_MAX),
    }
}

pub fn build_hamiltonian(p: &ModelParams, n_max: usize) -> DMatrix<f64> {
    let m = n_max + 1;
    let mut h = DMatrix::zeros(2 * m, 2 * m);
    for i in 0..m {
        h[(i, i)] = i as f64 + p.eps;
        h[(m + i, m + i)] = i as f64 - p.eps;
        h[(i, m + i)] = p.delta;
        h[(m + i, i)] = p.delta;
        if i + 1 < m {
            let off = p.g * ((i + 1) as f64).sqrt();
            h[(i, i + 1)] = off;
            h[(i + 1, i)] = off;
            h[(m + i, m + i + 1)] = -off;
            h[(m + i + 1, m + i)] = -off;
        }
    }
    h
}

/// All eigenvalues, ascending.
pub fn eigenvalues(p: &ModelParams, n_max: usize) -> Vec<f64> {
    let mut ev: Vec<f64> = build_hamiltonian(p, n_max).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TruncatedSpectrum {
    pub params: ModelParams,
    pub n_max: usize,
    pub eigenvalues: Vec<f64>,
    /// Stable within 1e−9 when the cutoff grows by 20.
    pub converged: Vec<bool>,
}

impl TruncatedSpectrum {
    /// Number of levels in the bottom third of the spectrum.
    pub fn reliable_len(&self) -> usize {
        self.eigenvalues.len() / 3
    }

    pub fn reliable_converged(&self) -> bool {
        self.converged[..self.reliable_len()].iter().all(|&c| c)
    }

    pub fn nearest(&self, lambda: f64) -> usize {
        (0..self.eigenvalues.len())
            .min_by(|&a, &b| (self.eigenvalues[a] - lambda).abs().total_cmp(&(self.eigenvalues[b] - lambda).abs()))
            .expect("nonempty")
    }

    /// Distance to the closest other level.
    pub fn neighbour_gap(&self, i: usize) -> f64 {
        let ev = &self.eigenvalues;
        let below = if i > 0 { ev[i] - ev[i - 1] } else { f64::INFINITY };
        let above = if i + 1 < ev.len() { ev[i + 1] - ev[i] } else { f64::INFINITY };
        below.min(above)
    }
}

pub fn truncated_spectrum(p: &ModelParams, n_max: usize) -> Result<TruncatedSpectrum> {
    if n_max < 1 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    let ev = eigenvalues(p, n_max);
    let bigger = eigenvalues(p, n_max + CONVERGENCE_STEP);
    let converged = ev.iter().zip(&bigger).map(|(a, b)| (a - b).abs() < CONVERGENCE_TOL).collect();
    Ok(TruncatedSpectrum {
        params: *p,
        n_max,
        eigenvalues: ev,
        converged,
    })
}

/// Spectrum at the default cutoff, redone at 120 when the bottom third has
/// not converged. An explicit `AQRM_NMAX` is used as is.
pub fn auto_spectrum(p: &ModelParams) -> Result<TruncatedSpectrum> {
    let explicit = std::env::var_os(NMAX_ENV).is_some();
    let n = default_n_max()?;
    let s = truncated_spectrum(p, n)?;
    if explicit || s.reliable_converged() || n >= ESCALATED_N_MAX {
        return Ok(s);
    }
    truncated_spectrum(p, ESCALATED_N_MAX)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub g: f64,
    pub eigenvalues: Vec<f64>,
    pub converged: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralSweep {
    pub delta: f64,
    pub eps: f64,
    pub n_max: usize,
    pub points: Vec<SweepPoint>,
}

pub fn sweep(delta: f64, eps: f64, g_grid: &[f64], n_max: usize) -> Result<SpectralSweep> {
    if g_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("g grid must be strictly ascending".into()));
    }
    let points = g_grid
        .par_iter()
        .map(|&g| {
            let s = truncated_spectrum(&ModelParams::new(g, delta, eps)?, n_max)?;
            Ok(SweepPoint {
                g,
                eigenvalues: s.eigenvalues,
                converged: s.converged,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectralSweep {
        delta,
        eps,
        n_max,
        points,
    })
}

impl SpectralSweep {
    /// `g,index,eigenvalue,converged`, limited to the lowest `levels` curves.
    pub fn to_csv(&self, levels: Option<usize>) -> String {
        let mut out = String::from("g,index,eigenvalue,converged\n");
        for p in &self.points {
            let k = levels.unwrap_or(p.eigenvalues.len()).min(p.eigenvalues.len());
            for i in 0..k {
                out.push_str(&format!("{},{},{:.15e},{}\n", p.g, i, p.eigenvalues[i], p.converged[i]));
            }
        }
        out
    }

    /// Smallest gap between curves `i` and `i+1` for each `i < levels − 1`,
    /// refined by ternary search around the best grid point.
    pub fn gap_minima(&self, levels: usize) -> Result<Vec<GapMinimum>> {
        if self.points.is_empty() || levels < 2 {
            return Ok(Vec::new());
        }
        let gs: Vec<f64> = self.points.iter().map(|p| p.g).collect();
        (0..levels - 1)
            .into_par_iter()
            .map(|i| {
                let gaps: Vec<f64> = self.points.iter().map(|p| p.eigenvalues[i + 1] - p.eigenvalues[i]).collect();
                let k = (0..gaps.len()).min_by(|&a, &b| gaps[a].total_cmp(&gaps[b])).unwrap();
                let lo = gs[k.saturating_sub(1)];
                let hi = gs[(k + 1).min(gs.len() - 1)];
                let f = |g: f64| -> Result<f64> {
                    let ev = eigenvalues(&ModelParams::new(g, self.delta, self.eps)?, self.n_max);
                    Ok(ev[i + 1] - ev[i])
                };
                let (g, gap) = ternary_min(f, lo, hi, gs[k], gaps[k])?;
                Ok(GapMinimum {
                    index: i,
                    g,
                    gap,
                    lambda: {
                        let ev = eigenvalues(&ModelParams::new(g, self.delta, self.eps)?, self.n_max);
                        0.5 * (ev[i] + ev[i + 1])
                    },
                })
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapMinimum {
    pub index: usize,
    pub g: f64,
    pub gap: f64,
    pub lambda: f64,
}

fn ternary_min(f: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64, g0: f64, f0: f64) -> Result<(f64, f64)> {
    let (mut best_g, mut best) = (g0, f0);
    for _ in 0..100 {
        if hi - lo < 1e-14 {
            break;
        }
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        let (f1, f2) = (f(m1)?, f(m2)?);
        for (g, v) in [(m1, f1), (m2, f2)] {
            if v < best {
                (best_g, best) = (g, v);
            }
        }
        if f1 < f2 {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    Ok((best_g, best))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossingObservation {
    pub g_star: f64,
    pub lambda_star: f64,
    pub gap: f64,
    pub indices: (usize, usize),
    pub n_max: usize,
}

/// Adjacent pair whose midpoint is closest to `lambda`.
pub fn observe_pair(p: &ModelParams, n_max: usize, lambda: f64) -> CrossingObservation {
    let ev = eigenvalues(p, n_max);
    let i = (0..ev.len() - 1)
        .min_by(|&a, &b| {
            let da = (ev[a] - lambda).abs().max((ev[a + 1] - lambda).abs());
            let db = (ev[b] - lambda).abs().max((ev[b + 1] - lambda).abs());
            da.total_cmp(&db)
        })
        .expect("at least two levels");
    CrossingObservation {
        g_star: p.g,
        lambda_star: lambda,
        gap: ev[i + 1] - ev[i],
        indices: (i, i + 1),
        n_max,
    }
}

/// Diagonalizes at the record's coupling and requires two levels within
/// `tol` of `λ = N − g² + ε` and of each other.
pub fn confirm_crossing(rec: &CrossingRecord, n_max: usize, tol: f64) -> Result<CrossingObservation> {
    let g = rec.g();
    let lambda = rec.lambda();
    let p = ModelParams::new(g, crate::exactpoly::to_f64(&rec.d_value).sqrt(), rec.two_eps as f64 / 2.0)?;
    confirm_at(&p, lambda, n_max, tol)
}

pub fn confirm_at(p: &ModelParams, lambda: f64, n_max: usize, tol: f64) -> Result<CrossingObservation> {
    let obs = observe_pair(p, n_max, lambda);
    let ev = eigenvalues(p, n_max);
    let (i, j) = obs.indices;
    let off = (ev[i] - lambda).abs().max((ev[j] - lambda).abs());
    if obs.gap >= tol || off >= tol {
        return Err(Error::CrossingUnconfirmed {
            g: p.g,
            reason: format!("nearest pair ({i}, {j}) has gap {:.3e} and offset {:.3e} from {lambda}", obs.gap, off),
        });
    }
    Ok(obs)
}

/// Runs `f` at the default cutoff and, unless `AQRM_NMAX` is set, once more
/// at 120 if the first attempt fails.
pub fn with_escalation<T>(f: impl Fn(usize) -> Result<T>) -> Result<T> {
    let n = default_n_max()?;
    match f(n) {
        Err(_) if std::env::var_os(NMAX_ENV).is_none() && n < ESCALATED_N_MAX => f(ESCALATED_N_MAX),
        r => r,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExceptionalObservation {
    pub g: f64,
    pub lambda: f64,
    pub index: usize,
    pub offset: f64,
    pub neighbour_gap: f64,
}

/// Checks that `lambda` is a simple level: some eigenvalue within `tol` and
/// both neighbours further than 1e−4.
pub fn confirm_nondegenerate(p: &ModelParams, lambda: f64, n_max: usize, tol: f64) -> Result<ExceptionalObservation> {
    let s = truncated_spectrum(p, n_max)?;
    let i = s.nearest(lambda);
    let obs = ExceptionalObservation {
        g: p.g,
        lambda,
        index: i,
        offset: (s.eigenvalues[i] - lambda).abs(),
        neighbour_gap: s.neighbour_gap(i),
    };
    if obs.offset >= tol || obs.neighbour_gap <= AVOIDED_GAP {
        return Err(Error::CrossingUnconfirmed {
            g: p.g,
            reason: format!(
                "level {i} is {:.3e} from {lambda} with neighbour gap {:.3e}",
                obs.offset, obs.neighbour_gap
            ),
        });
    }
    Ok(obs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric() {
        let h = build_hamiltonian(&ModelParams::new(0.7, 0.3, 0.25).unwrap(), 10);
        assert_eq!(h, h.transpose());
    }

    #[test]
    fn decoupled_limit() {
        let d = 0.37;
        let ev = eigenvalues(&ModelParams::new(0.0, d, 0.0).unwrap(), 8);
        let mut expected: Vec<f64> = (0..=8).flat_map(|n| [n as f64 - d, n as f64 + d]).collect();
        expected.sort_by(f64::total_cmp);
        for (a, b) in ev.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn displaced_oscillator() {
        let g = 0.6;
        let ev = eigenvalues(&ModelParams::new(g, 0.0, 0.0).unwrap(), 60);
        for n in 0..10 {
            for k in 0..2 {
                assert!((ev[2 * n + k] - (n as f64 - g * g)).abs() < 1e-10, "{n}");
            }
        }
    }

    #[test]
    fn self_convergence() {
        let p = ModelParams::new(0.25, 0.5, 0.5).unwrap();
        let a = eigenvalues(&p, 60);
        let b = eigenvalues(&p, 120);
        assert!((a[0] - b[0]).abs() < 1e-10);
        let s = truncated_spectrum(&p, 60).unwrap();
        assert!(s.reliable_converged());
        assert_eq!(s.eigenvalues.len(), 122);
    }

    #[test]
    fn judd_point() {
        // N = 1, ε = 0, Δ² = 1/2: root x = 1/2
        let g = (0.5f64).sqrt() / 2.0;
        let p = ModelParams::new(g, 0.5f64.sqrt(), 0.0).unwrap();
        let obs = confirm_at(&p, 0.875, 60, 1e-7).unwrap();
        assert!(obs.gap < 1e-7);
        let q = ModelParams { g: 1.05 * g, ..p };
        assert!(observe_pair(&q, 60, 1.0 - q.g * q.g).gap > 1e-3);
        assert!(confirm_at(&q, 1.0 - q.g * q.g, 60, 1e-7).is_err());
    }

    #[test]
    fn sign_symmetries() {
        let a = eigenvalues(&ModelParams::new(0.8, 0.4, 0.0).unwrap(), 40);
        let b = eigenvalues(&ModelParams::new(-0.8, 0.4, 0.0).unwrap(), 40);
        let c = eigenvalues(&ModelParams::new(0.8, 0.4, 0.3).unwrap(), 40);
        let e = eigenvalues(&ModelParams::new(0.8, 0.4, -0.3).unwrap(), 40);
        for i in 0..80 {
            assert!((a[i] - b[i]).abs() < 1e-10);
            assert!((c[i] - e[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn single_point_sweep() {
        let s = sweep(0.5, 0.1, &[0.3], 20).unwrap();
        assert_eq!(s.points[0].eigenvalues, eigenvalues(&ModelParams::new(0.3, 0.5, 0.1).unwrap(), 20));
        assert!(sweep(0.5, 0.1, &[0.3, 0.2], 20).is_err());
    }

    #[test]
    fn csv_shape() {
        let s = sweep(0.5, 0.0, &[0.0, 0.1], 5).unwrap();
        let csv = s.to_csv(Some(3));
        assert_eq!(csv.lines().count(), 7);
        assert!(csv.starts_with("g,index,eigenvalue,converged\n0,0,"));
    }
}
