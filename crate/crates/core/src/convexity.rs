//! Weighted-norm series along evolutions, their log-convexity verdicts, and
//! the a-priori bounds that accompany the Gaussian weight.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolve::{evolve_free, evolve_potential_sampled, EvolutionConfig, Method, Potential};
use crate::io::{fmt_f64, write_csv};
use crate::lattice::{Field, LatticeWindow};
use crate::weights::{
    log_sum_exp, tail_mass_with, tail_ratio, weighted_norm_sq_with, WeightSpec, WeightTable, WeightedNorm,
};

/// Largest admissible tail/total ratio of a sampled weighted norm.
pub const TAIL_TOLERANCE: f64 = 1e-12;
/// Tails are measured outside this fraction of the window radius.
pub const TAIL_INNER_FRACTION: f64 = 0.75;
/// Default tolerance on second differences and interpolation slack.
pub const CONVEXITY_TOLERANCE: f64 = 1e-8;

pub fn tail_inner_radius(w: &LatticeWindow) -> usize {
    (TAIL_INNER_FRACTION * w.min_radius() as f64).floor() as usize
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormSeries {
    pub times: Vec<f64>,
    /// ln of the weighted norm; −inf for the zero field.
    pub log_values: Vec<f64>,
    pub spec: WeightSpec,
    /// tail/total per time.
    pub tail_certificates: Vec<f64>,
}

impl NormSeries {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let rows = self
            .times
            .iter()
            .zip(&self.log_values)
            .zip(&self.tail_certificates)
            .map(|((t, l), c)| vec![fmt_f64(*t), fmt_f64(*l), fmt_f64(*c)]);
        write_csv(path, &["t", "log_value", "tail_certificate"], rows)
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() || times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::Config("time grid must be nonempty, finite and nonnegative".into()));
    }
    if times.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::Config("time grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Evolve `f0` (taken to sit at t = 0) to every grid time: one split-step pass
/// when a potential is given or the engine is split-step, otherwise an
/// independent free evolution per time.
pub fn evolve_on_grid(
    f0: &Field,
    times: &[f64],
    engine: &EvolutionConfig,
    v: Option<&Potential>,
) -> Result<Vec<Field>> {
    check_times(times)?;
    let f0 = f0.clone().with_time(0.0);
    if v.is_some() || engine.method == Method::SplitStep {
        let zero = Potential::zero();
        evolve_potential_sampled(&f0, v.unwrap_or(&zero), 0.0, times, engine)
    } else {
        times.par_iter().map(|&t| evolve_free(&f0, t, engine)).collect()
    }
}

fn certified_norm(u: &Field, table: &WeightTable, inner: usize) -> Result<(WeightedNorm, f64)> {
    let total = weighted_norm_sq_with(u, table)?;
    let ratio = tail_ratio(tail_mass_with(u, table, inner)?, total);
    if !(ratio <= TAIL_TOLERANCE) {
        return Err(Error::TailCertificate { time: u.time(), ratio });
    }
    Ok((total, ratio))
}

/// Weighted norms of the evolution of `f0` on a time grid, each certified
/// by its tail outside 3/4 of the window.
pub fn sample_series(
    f0: &Field,
    spec: &WeightSpec,
    times: &[f64],
    engine: &EvolutionConfig,
    v: Option<&Potential>,
) -> Result<NormSeries> {
    let fields = evolve_on_grid(f0, times, engine, v)?;
    series_from_fields(&fields, spec)
}

/// Weighted norms of already evolved fields (each carrying its time).
pub fn series_from_fields(fields: &[Field], spec: &WeightSpec) -> Result<NormSeries> {
    let Some(first) = fields.first() else {
        return Err(Error::Config("no fields to sample".into()));
    };
    let w = first.window();
    let inner = tail_inner_radius(w);
    let shared = match spec {
        WeightSpec::Carleman { .. } => None,
        _ => Some(WeightTable::new(spec, w)?),
    };
    let mut log_values = Vec::with_capacity(fields.len());
    let mut tail_certificates = Vec::with_capacity(fields.len());
    for u in fields {
        let own;
        let table = match &shared {
            Some(t) => t,
            None => {
                own = WeightTable::new(&spec.at_time(u.time()), u.window())?;
                &own
            }
        };
        let (total, ratio) = certified_norm(u, table, inner)?;
        log_values.push(total.log_value);
        tail_certificates.push(ratio);
    }
    Ok(NormSeries { times: fields.iter().map(Field::time).collect(), log_values, spec: spec.clone(), tail_certificates })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    /// min_i (L_{i−1} − 2L_i + L_{i+1}).
    pub min_second_difference: f64,
    pub argmin_time: Option<f64>,
    /// max_i [L_i − (1−τ_i)L_0 − τ_i L_n], τ the normalized time.
    pub max_interp_slack: f64,
    pub tol: f64,
    /// `tol` times max(1, max |L|): the threshold actually applied.
    pub scaled_tol: f64,
    pub verdict: bool,
}

/// Log-convexity verdict for a series on a uniform grid.
pub fn convexity_report(s: &NormSeries, tol: f64) -> Result<ConvexityReport> {
    let (t, l) = (&s.times, &s.log_values);
    if t.len() < 3 || l.len() != t.len() {
        return Err(Error::Config("convexity needs at least 3 samples".into()));
    }
    let h = t[1] - t[0];
    if t.windows(2).any(|p| ((p[1] - p[0]) - h).abs() > 1e-9 * h) {
        return Err(Error::Config("convexity needs a uniform time grid".into()));
    }
    let zeros = l.iter().filter(|v| **v == f64::NEG_INFINITY).count();
    if zeros == l.len() {
        return Ok(ConvexityReport {
            min_second_difference: 0.0,
            argmin_time: None,
            max_interp_slack: 0.0,
            tol,
            scaled_tol: tol,
            verdict: true,
        });
    }
    if zeros > 0 || l.iter().any(|v| !v.is_finite()) {
        return Err(Error::Divergent("series mixes vanishing and nonvanishing samples".into()));
    }
    let scale = l.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let scaled_tol = tol * scale;
    let mut min_sd = f64::INFINITY;
    let mut argmin = None;
    for i in 1..l.len() - 1 {
        let d = l[i - 1] - 2.0 * l[i] + l[i + 1];
        if d < min_sd {
            min_sd = d;
            argmin = Some(t[i]);
        }
    }
    let (t0, tn) = (t[0], t[t.len() - 1]);
    let (l0, ln) = (l[0], l[l.len() - 1]);
    let slack = (1..l.len() - 1)
        .map(|i| {
            let tau = (t[i] - t0) / (tn - t0);
            l[i] - ((1.0 - tau) * l0 + tau * ln)
        })
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(ConvexityReport {
        min_second_difference: min_sd,
        argmin_time: argmin,
        max_interp_slack: slack,
        tol,
        scaled_tol,
        verdict: min_sd >= -scaled_tol && slack <= scaled_tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AprioriRecord {
    /// ∫ t(1−t) Σ_j Σ_k (cosh(4λj_k) − 1) e^{2λ|j|²}|u_j|² dt.
    pub lhs1: f64,
    /// ∫ t(1−t) Σ_j Σ_k e^{2λ|j|²}|u_{j+e_k} − u_{j−e_k}|² dt.
    pub lhs2: f64,
    /// G(0) + G(1).
    pub rhs: f64,
    /// max(lhs1, lhs2)/rhs; 0 for the zero solution.
    pub fitted_c: f64,
    pub log_lhs1: f64,
    pub log_lhs2: f64,
    pub log_rhs: f64,
}

/// Per-time log of the two integrands, from one field.
fn apriori_integrands(u: &Field, lambda: f64) -> (f64, f64) {
    let w = u.window();
    let dim = w.dim();
    let (a, b): (Vec<f64>, Vec<f64>) = (0..w.len())
        .into_par_iter()
        .map(|i| {
            let j = w.site(i);
            let gauss = 2.0 * lambda * LatticeWindow::norm_sq(&j) as f64;
            let amp = u.values()[i].norm();
            let cosh_terms: Vec<f64> = (0..dim)
                .filter(|&k| j[k] != 0)
                .map(|k| std::f64::consts::LN_2 + 2.0 * (2.0 * lambda * j[k].abs() as f64).sinh().ln())
                .collect();
            let a = if amp == 0.0 { f64::NEG_INFINITY } else { log_sum_exp(&cosh_terms) + gauss + 2.0 * amp.ln() };
            let grad: Vec<f64> = (0..dim)
                .map(|k| {
                    let (mut up, mut dn) = (j, j);
                    up[k] += 1;
                    dn[k] -= 1;
                    2.0 * (u.get(&up) - u.get(&dn)).norm().ln()
                })
                .collect();
            (a, log_sum_exp(&grad) + gauss)
        })
        .unzip();
    (log_sum_exp(&a), log_sum_exp(&b))
}

/// The a-priori bounds for the Gaussian weight e^{λ|j|²} along the free or
/// perturbed evolution of `f0`; the grid must run from 0 to 1.
pub fn apriori_estimates(
    f0: &Field,
    lambda: f64,
    times: &[f64],
    engine: &EvolutionConfig,
    v: Option<&Potential>,
) -> Result<AprioriRecord> {
    if times.len() < 3 || times[0] != 0.0 || times[times.len() - 1] != 1.0 {
        return Err(Error::Config("a-priori estimates need a grid from 0 to 1 with at least 3 points".into()));
    }
    let spec = WeightSpec::Gaussian { lambda };
    let fields = evolve_on_grid(f0, times, engine, v)?;
    let series = series_from_fields(&fields, &spec)?;
    let per_time: Vec<(f64, f64)> = fields.iter().map(|u| apriori_integrands(u, lambda)).collect();
    // Trapezoid weights times t(1−t), in log form; endpoints carry zero weight.
    let n = times.len();
    let log_w: Vec<f64> = (0..n)
        .map(|i| {
            let left = if i > 0 { times[i] - times[i - 1] } else { 0.0 };
            let right = if i + 1 < n { times[i + 1] - times[i] } else { 0.0 };
            (0.5 * (left + right) * times[i] * (1.0 - times[i])).ln()
        })
        .collect();
    let integral = |pick: fn(&(f64, f64)) -> f64| {
        let terms: Vec<f64> = per_time.iter().zip(&log_w).map(|(p, w)| pick(p) + w).collect();
        log_sum_exp(&terms)
    };
    let log_lhs1 = integral(|p| p.0);
    let log_lhs2 = integral(|p| p.1);
    let log_rhs = log_sum_exp(&[series.log_values[0], series.log_values[n - 1]]);
    let fitted_c = if log_rhs == f64::NEG_INFINITY { 0.0 } else { (log_lhs1.max(log_lhs2) - log_rhs).exp() };
    if !fitted_c.is_finite() {
        return Err(Error::Divergent(format!("fitted constant overflowed (log lhs {log_lhs1}, {log_lhs2})")));
    }
    Ok(AprioriRecord {
        lhs1: log_lhs1.exp(),
        lhs2: log_lhs2.exp(),
        rhs: log_rhs.exp(),
        fitted_c,
        log_lhs1,
        log_lhs2,
        log_rhs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearStability {
    pub beta: Vec<f64>,
    /// ln sup_t Σ e^{2β·j}|u_j(t)|².
    pub log_sup: f64,
    /// ln Σ e^{2β·j}(|u_j(0)|² + |u_j(1)|²).
    pub log_endpoints: f64,
    /// (log_sup − log_endpoints)/‖V‖_∞, the smallest C₀ this run needs;
    /// absent when V = 0.
    pub c0: Option<f64>,
}

/// Compares the interior linear-exponential norm with its endpoint values
/// along a (possibly perturbed) evolution on a grid from 0 to 1.
pub fn linear_stability(
    f0: &Field,
    beta: &[f64],
    times: &[f64],
    engine: &EvolutionConfig,
    v: Option<&Potential>,
) -> Result<LinearStability> {
    if times.first() != Some(&0.0) || times.last() != Some(&1.0) {
        return Err(Error::Config("linear stability needs a grid from 0 to 1".into()));
    }
    let spec = WeightSpec::Linear { beta: beta.to_vec() };
    let s = sample_series(f0, &spec, times, engine, v)?;
    let log_sup = s.log_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_endpoints = log_sum_exp(&[s.log_values[0], s.log_values[s.log_values.len() - 1]]);
    let sup_v = v.map_or(0.0, Potential::sup_norm);
    let c0 = (sup_v > 0.0).then(|| (log_sup - log_endpoints) / sup_v);
    Ok(LinearStability { beta: beta.to_vec(), log_sup, log_endpoints, c0 })
}

/// Uniform grid of `n` points on [0, 1].
pub fn unit_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}
