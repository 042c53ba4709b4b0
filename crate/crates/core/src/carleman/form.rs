use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::lemma::CarlemanParams;
use crate::error::{Error, Result};
use crate::lattice::LatticeWindow;

/// The one-dimensional form
/// Σ D_j|f_j|² + Σ κ_j Im(f_{j+1} f̄_j) on consecutive sites.
#[derive(Debug, Clone, PartialEq)]
pub struct EqcMatrix {
    pub sites: Vec<i64>,
    pub diag: Vec<f64>,
    /// κ_j for the pair (sites[j], sites[j+1]).
    pub coupling: Vec<f64>,
}

impl EqcMatrix {
    pub fn form(&self, f: &[Complex64]) -> f64 {
        let d: f64 = self.diag.iter().zip(f).map(|(d, v)| d * v.norm_sqr()).sum();
        let c: f64 = self.coupling.iter().enumerate().map(|(j, k)| k * (f[j + 1] * f[j].conj()).im).sum();
        d + c
    }

    fn restrict(&self, lo: usize, hi: usize) -> EqcMatrix {
        EqcMatrix {
            sites: self.sites[lo..hi].to_vec(),
            diag: self.diag[lo..hi].to_vec(),
            coupling: self.coupling[lo..hi - 1].to_vec(),
        }
    }

    /// Smallest eigenvalue by Sturm-count bisection. The Hermitian form has
    /// off-diagonal ∓iκ/2, unitarily equivalent to the real tridiagonal
    /// matrix with off-diagonal |κ|/2.
    pub fn min_eigenvalue(&self) -> f64 {
        let off: Vec<f64> = self.coupling.iter().map(|k| 0.5 * k.abs()).collect();
        let n = self.diag.len();
        let radius = |i: usize| (if i > 0 { off[i - 1] } else { 0.0 }) + off.get(i).copied().unwrap_or(0.0);
        let mut lo = (0..n).map(|i| self.diag[i] - radius(i)).fold(f64::INFINITY, f64::min);
        // The smallest diagonal entry is a Rayleigh quotient, so it bounds the
        // minimum from above.
        let mut hi = self.diag.iter().copied().fold(f64::INFINITY, f64::min);
        let below = |x: f64| {
            let mut count = 0;
            let mut d = 1.0;
            for i in 0..n {
                let b2 = if i > 0 { off[i - 1] * off[i - 1] } else { 0.0 };
                d = self.diag[i] - x - if i > 0 { b2 / d } else { 0.0 };
                if d == 0.0 {
                    d = -f64::EPSILON * (self.diag[i].abs() + radius(i)).max(f64::MIN_POSITIVE);
                }
                if d < 0.0 {
                    count += 1;
                }
            }
            count
        };
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if below(mid) >= 1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Diagonal and coupling of the form at time t on a 1d window re-centred at
/// the drift, sites c − R_w ..= c + R_w with c = round(−Rt(1−t)).
pub fn eqc_matrix(p: &CarlemanParams, t: f64, window: &LatticeWindow) -> Result<EqcMatrix> {
    p.validate()?;
    if window.dim() != 1 {
        return Err(Error::Config("the quadratic form is one-dimensional".into()));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("t = {t} outside [0, 1]")));
    }
    let (mu, r) = (p.mu, p.r);
    let s = r * t * (1.0 - t);
    let center = (-s).round() as i64;
    let rw = window.radius()[0] as i64;
    let sites: Vec<i64> = (center - rw..=center + rw).collect();
    let sh = (2.0 * mu).sinh();
    let diag = sites
        .iter()
        .map(|&j| {
            let a = j as f64 + s;
            // 32μ³(a − R/16μ²)² − 32μ³a² = R²/(8μ) − 4μRa, and cosh(4μa) − 1 = 2sinh²(2μa).
            r * r / (8.0 * mu) - 4.0 * mu * r * a
                + 2.0 * mu * r * r * (1.0 - 2.0 * t).powi(2)
                + 4.0 * sh * (2.0 * mu * a).sinh().powi(2)
        })
        .collect::<Vec<f64>>();
    let coupling = sites[..sites.len() - 1]
        .iter()
        .map(|&j| 8.0 * mu * r * (1.0 - 2.0 * t) * (2.0 * mu * (j as f64 + 0.5 + s)).cosh())
        .collect::<Vec<f64>>();
    if diag.iter().chain(&coupling).any(|v| !v.is_finite()) {
        return Err(Error::WeightOverflow(format!("form entries overflow on a window of radius {rw}")));
    }
    Ok(EqcMatrix { sites, diag, coupling })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EqcReport {
    pub params: CarlemanParams,
    pub t: f64,
    /// Smallest Rayleigh quotient over the inner 80% of the window.
    pub min_rayleigh: f64,
    /// εR²/(8μ).
    pub target: f64,
    /// Smallest Gershgorin lower bound over the outer 20% band.
    pub guard_bound: f64,
    pub verdict: bool,
}

/// Minimises the form over fields supported in the inner 80% of the
/// (re-centred) window. The outer band's Gershgorin bound must not fall below
/// that minimum, so the truncation cannot hide a lower mode.
pub fn eqc_quadratic_form(p: &CarlemanParams, t: f64, window: &LatticeWindow) -> Result<EqcReport> {
    let m = eqc_matrix(p, t, window)?;
    let rw = window.radius()[0];
    let inner = (0.8 * rw as f64).floor() as usize;
    if inner == 0 {
        return Err(Error::InvalidWindow("window too small for an inner trial space".into()));
    }
    let n = m.diag.len();
    let off = |i: usize| m.coupling.get(i).map_or(0.0, |k| 0.5 * k.abs());
    let guard_bound = (0..n)
        .filter(|&i| i.abs_diff(rw) > inner)
        .map(|i| m.diag[i] - off(i) - if i > 0 { off(i - 1) } else { 0.0 })
        .fold(f64::INFINITY, f64::min);
    let target = p.target();
    let min_rayleigh = m.restrict(rw - inner, rw + inner + 1).min_eigenvalue();
    if !(guard_bound >= min_rayleigh) {
        return Err(Error::Guard(format!(
            "outer band Gershgorin bound {guard_bound:e} below the trial minimum {min_rayleigh:e}; enlarge the window"
        )));
    }
    Ok(EqcReport { params: *p, t, min_rayleigh, target, guard_bound, verdict: min_rayleigh >= -1e-8 * target })
}
