//! Envelope fit for the free evolution of u_j(0) = I_j(a)/I_0(a).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolve::{evolve_free_convolution, EvolutionConfig};
use crate::lattice::{Field, LatticeWindow};
use crate::specfun::log_bessel_i_table;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HardyConfig {
    pub a: f64,
    pub window_radius: usize,
    pub kernel_cut: usize,
    /// Sites with |u_j(1)| at or below this are left out of the fit.
    pub floor: f64,
    pub beta_min: f64,
    pub beta_max: f64,
    /// Pass when α + β* ≥ 2 − threshold_tolerance.
    pub threshold_tolerance: f64,
    /// Test hook: start from zero data.
    pub zero_data: bool,
}

impl Default for HardyConfig {
    fn default() -> Self {
        Self {
            a: 0.5,
            window_radius: 420,
            kernel_cut: 200,
            floor: 1e-280,
            beta_min: 0.01,
            beta_max: 10.0,
            threshold_tolerance: 0.05,
            zero_data: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardyReport {
    pub a: f64,
    pub trivial: bool,
    /// |u_j(0)| ≤ c_alpha I_j(alpha).
    pub alpha: f64,
    pub c_alpha: f64,
    /// Smallest β with |u_j(1)| ≤ c_beta I_j(β) over the certified range.
    pub beta_star: Option<f64>,
    pub c_beta: Option<f64>,
    pub alpha_plus_beta: Option<f64>,
    /// Largest |j| with |u_j(1)| above the floor.
    pub certified_j: usize,
    pub verdict: bool,
}

/// Finds β* by bisection: β is admissible when the largest ratio
/// |u_j(1)|/I_j(β) over the certified range is already attained for
/// |j| ≤ j_max/2, and C is that inner maximum.
pub fn hardy_threshold(cfg: &HardyConfig) -> Result<HardyReport> {
    if !(cfg.a > 0.0 && cfg.a.is_finite()) {
        return Err(Error::Config(format!("family parameter a must be > 0, got {}", cfg.a)));
    }
    if !(0.0 < cfg.beta_min && cfg.beta_min < cfg.beta_max && cfg.floor > 0.0) {
        return Err(Error::Config("need 0 < beta_min < beta_max and floor > 0".into()));
    }
    let w = LatticeWindow::cube(1, cfg.window_radius)?;
    let log_i = log_bessel_i_table(cfg.window_radius as u64, cfg.a)?;
    let c_alpha = (-log_i[0]).exp();
    if cfg.zero_data {
        return Ok(HardyReport {
            a: cfg.a,
            trivial: true,
            alpha: cfg.a,
            c_alpha,
            beta_star: None,
            c_beta: None,
            alpha_plus_beta: None,
            certified_j: 0,
            verdict: true,
        });
    }
    let u0 = Field::from_fn(w.clone(), |s| {
        let v = (log_i[s[0].unsigned_abs() as usize] - log_i[0]).exp();
        Complex64::new(if v >= 1e-300 { v } else { 0.0 }, 0.0)
    })?;
    let u1 = evolve_free_convolution(&u0, 1.0, &EvolutionConfig::convolution(1.0).with_kernel_cut(cfg.kernel_cut))?;
    let log_abs: Vec<f64> = (0..=cfg.window_radius as i64)
        .map(|j| {
            let (p, m) = (u1.get(&[j, 0, 0]).norm(), u1.get(&[-j, 0, 0]).norm());
            p.max(m).ln()
        })
        .collect();
    let jmax = log_abs.iter().position(|l| *l <= cfg.floor.ln()).map_or(log_abs.len() - 1, |p| p.saturating_sub(1));
    if jmax < 8 {
        return Err(Error::Quadrature(format!("only {jmax} sites above the floor; nothing to fit")));
    }
    if jmax + cfg.kernel_cut >= cfg.window_radius {
        return Err(Error::SupportOverflow { axis: 0, needed: jmax + cfg.kernel_cut, radius: cfg.window_radius });
    }
    let fit = |beta: f64| -> Result<(bool, f64)> {
        let li = log_bessel_i_table(jmax as u64, beta)?;
        let l: Vec<f64> = (0..=jmax).map(|j| log_abs[j] - li[j]).collect();
        let inner = l[..=jmax / 2].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let all = l.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok((all <= inner + 1e-12, inner))
    };
    if !fit(cfg.beta_max)?.0 {
        return Err(Error::Quadrature(format!("no admissible β up to {}", cfg.beta_max)));
    }
    let (mut lo, mut hi) = (cfg.beta_min, cfg.beta_max);
    if fit(lo)?.0 {
        hi = lo;
    }
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if fit(mid)?.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let c_beta = fit(hi)?.1.exp();
    let sum = cfg.a + hi;
    Ok(HardyReport {
        a: cfg.a,
        trivial: false,
        alpha: cfg.a,
        c_alpha,
        beta_star: Some(hi),
        c_beta: Some(c_beta),
        alpha_plus_beta: Some(sum),
        certified_j: jmax,
        verdict: sum >= 2.0 - cfg.threshold_tolerance,
    })
}
