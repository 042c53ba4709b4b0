//! The weight families of the log-convexity and Carleman statements,
//! evaluated as log-weights, and the weighted norms Σ e^{2w_j}|f_j|².
//!
//! Normalization constants are fixed to 1; they only rescale norms.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{pairwise_sum, Field, LatticeWindow, Site};
use crate::specfun::{bessel_i, bessel_k, log_bessel_i_table, log_bessel_k_table};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum WeightSpec {
    /// 1/Π_k I_{j_k}(1/(2λ)).
    InverseBesselI { lambda: f64 },
    /// Π_k K_{j_k}(1/(2λ)).
    BesselK { lambda: f64 },
    /// e^{λ|j|²}.
    Gaussian { lambda: f64 },
    /// e^{β·j}.
    Linear { beta: Vec<f64> },
    /// e^{μ|j + Rt(1−t)e₁|² − (1+ε)R²t(1−t)/(16μ)}.
    Carleman {
        mu: f64,
        eps: f64,
        #[serde(rename = "R")]
        r: f64,
        t: f64,
    },
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be finite and > 0, got {v}")))
    }
}

impl WeightSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            WeightSpec::InverseBesselI { lambda } | WeightSpec::BesselK { lambda } | WeightSpec::Gaussian { lambda } => {
                positive("lambda", *lambda)
            }
            WeightSpec::Linear { beta } => {
                if beta.is_empty() || beta.len() > 3 || beta.iter().any(|b| !b.is_finite()) {
                    Err(Error::Config(format!("beta must hold 1 to 3 finite entries, got {beta:?}")))
                } else {
                    Ok(())
                }
            }
            WeightSpec::Carleman { mu, eps, r, t } => {
                positive("mu", *mu)?;
                positive("eps", *eps)?;
                positive("R", *r)?;
                if (0.0..=1.0).contains(t) {
                    Ok(())
                } else {
                    Err(Error::Config(format!("t must lie in [0, 1], got {t}")))
                }
            }
        }
    }

    /// The same family with its time parameter replaced (Carleman only).
    pub fn at_time(&self, time: f64) -> Self {
        match self {
            WeightSpec::Carleman { mu, eps, r, .. } => WeightSpec::Carleman { mu: *mu, eps: *eps, r: *r, t: time },
            other => other.clone(),
        }
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        match self {
            WeightSpec::Linear { beta } if beta.len() != dim => {
                Err(Error::Config(format!("beta has {} entries for a {dim}-dimensional window", beta.len())))
            }
            _ => Ok(()),
        }
    }
}

/// ln of the single-power weight at `j` (the norm squares it).
pub fn log_weight(spec: &WeightSpec, j: &Site) -> Result<f64> {
    spec.validate()?;
    let w = match spec {
        WeightSpec::InverseBesselI { lambda } => {
            let x = 0.5 / lambda;
            let mut s = 0.0;
            for &c in j {
                s -= bessel_i(c, x)?.log_value;
            }
            s
        }
        WeightSpec::BesselK { lambda } => {
            let x = 0.5 / lambda;
            let mut s = 0.0;
            for &c in j {
                s += bessel_k(c, x)?.log_value;
            }
            s
        }
        WeightSpec::Gaussian { lambda } => lambda * LatticeWindow::norm_sq(j) as f64,
        WeightSpec::Linear { beta } => beta.iter().zip(j).map(|(b, &c)| b * c as f64).sum(),
        WeightSpec::Carleman { mu, eps, r, t } => carleman(*mu, *eps, *r, *t, j),
    };
    if w.is_finite() {
        Ok(w)
    } else {
        Err(Error::WeightOverflow(format!("log-weight {w} at {j:?}")))
    }
}

fn carleman(mu: f64, eps: f64, r: f64, t: f64, j: &Site) -> f64 {
    let s = r * t * (1.0 - t);
    let shifted = j[0] as f64 + s;
    let rest = (j[1] * j[1] + j[2] * j[2]) as f64;
    mu * (shifted * shifted + rest) - (1.0 + eps) * r * s / (16.0 * mu)
}

/// Log-weights on every site of a window, with per-axis Bessel tables.
#[derive(Debug, Clone)]
pub struct WeightTable {
    window: LatticeWindow,
    log_weights: Vec<f64>,
}

impl WeightTable {
    pub fn new(spec: &WeightSpec, window: &LatticeWindow) -> Result<Self> {
        spec.validate()?;
        spec.check_dim(window.dim())?;
        let r_max = *window.radius().iter().max().expect("nonempty radius") as u64;
        let axis_table = match spec {
            WeightSpec::InverseBesselI { lambda } => {
                Some(log_bessel_i_table(r_max, 0.5 / lambda)?.into_iter().map(|v| -v).collect::<Vec<_>>())
            }
            WeightSpec::BesselK { lambda } => Some(log_bessel_k_table(r_max, 0.5 / lambda)?),
            _ => None,
        };
        let log_weights: Vec<f64> = window
            .sites()
            .map(|s| match &axis_table {
                Some(t) => (0..window.dim()).map(|k| t[s[k].unsigned_abs() as usize]).sum(),
                None => log_weight(spec, &s).unwrap_or(f64::NAN),
            })
            .collect();
        if let Some(i) = log_weights.iter().position(|w| !w.is_finite()) {
            return Err(Error::WeightOverflow(format!("log-weight at {:?}", window.site(i))));
        }
        Ok(Self { window: window.clone(), log_weights })
    }

    pub fn window(&self) -> &LatticeWindow {
        &self.window
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    pub fn get(&self, site: &Site) -> Option<f64> {
        self.window.index(site).map(|i| self.log_weights[i])
    }
}

/// A nonnegative quantity carried as its logarithm; `value` is present when
/// it fits in an f64. The zero quantity has `log_value = -inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedNorm {
    pub log_value: f64,
    pub value: Option<f64>,
}

impl WeightedNorm {
    pub const ZERO: WeightedNorm = WeightedNorm { log_value: f64::NEG_INFINITY, value: Some(0.0) };

    pub fn from_log(log_value: f64) -> Self {
        let v = log_value.exp();
        Self { log_value, value: v.is_finite().then_some(v) }
    }

    pub fn is_zero(&self) -> bool {
        self.log_value == f64::NEG_INFINITY
    }
}

/// ln Σ_i e^{terms_i} with a fixed max-shift and pairwise order; −inf if empty.
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    let scaled: Vec<f64> = terms.iter().map(|t| (t - m).exp()).collect();
    m + pairwise_sum(&scaled).ln()
}

fn masked_norm(f: &Field, table: &WeightTable, keep: impl Fn(&Site) -> bool + Sync) -> Result<WeightedNorm> {
    if f.window() != table.window() {
        return Err(Error::WindowMismatch);
    }
    let w = f.window();
    let terms: Vec<f64> = f
        .values()
        .par_iter()
        .zip(table.log_weights().par_iter())
        .enumerate()
        .map(|(i, (v, lw))| {
            let a = v.norm();
            if a == 0.0 || !keep(&w.site(i)) {
                f64::NEG_INFINITY
            } else {
                2.0 * (lw + a.ln())
            }
        })
        .collect();
    Ok(WeightedNorm::from_log(log_sum_exp(&terms)))
}

/// Σ_j e^{2w_j}|f_j|² against a precomputed table.
pub fn weighted_norm_sq_with(f: &Field, table: &WeightTable) -> Result<WeightedNorm> {
    masked_norm(f, table, |_| true)
}

/// Σ_j e^{2w_j}|f_j|², evaluated by log-sum-exp.
pub fn weighted_norm_sq(f: &Field, spec: &WeightSpec) -> Result<WeightedNorm> {
    weighted_norm_sq_with(f, &WeightTable::new(spec, f.window())?)
}

/// Weighted norm over the sites with max_k |j_k| > `inner_radius`.
pub fn tail_mass_with(f: &Field, table: &WeightTable, inner_radius: usize) -> Result<WeightedNorm> {
    if inner_radius >= f.window().min_radius() {
        return Err(Error::Config(format!(
            "inner radius {inner_radius} must be below the window radius {}",
            f.window().min_radius()
        )));
    }
    let r = inner_radius as u64;
    masked_norm(f, table, move |s| s.iter().any(|c| c.unsigned_abs() > r))
}

pub fn tail_mass(f: &Field, spec: &WeightSpec, inner_radius: usize) -> Result<WeightedNorm> {
    tail_mass_with(f, &WeightTable::new(spec, f.window())?, inner_radius)
}

/// tail/total, 0 for the zero field.
pub fn tail_ratio(tail: WeightedNorm, total: WeightedNorm) -> f64 {
    if total.is_zero() {
        0.0
    } else {
        (tail.log_value - total.log_value).exp()
    }
}
