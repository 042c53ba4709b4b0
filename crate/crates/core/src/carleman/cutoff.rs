use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lemma::{simpson_log, CarlemanParams};
use super::{smooth_step, smooth_step_prime};
use crate::error::{Error, Result};
use crate::evolve::Potential;
use crate::lattice::{Field, LatticeWindow, Site};
use crate::weights::{log_sum_exp, log_weight};

type C = Complex64;

/// θ^M(x): 1 for |x| ≤ M, 0 for |x| ≥ 2M.
pub fn theta(x: f64, m: usize) -> f64 {
    smooth_step(2.0 - x.abs() / m as f64)
}

/// η_R(t): 1 on [1/R, 1 − 1/R], 0 on [0, 1/2R] ∪ [1 − 1/2R, 1].
pub fn eta(t: f64, r: f64) -> f64 {
    smooth_step(2.0 * r * t.min(1.0 - t) - 1.0)
}

pub fn eta_prime(t: f64, r: f64) -> f64 {
    if t <= 0.5 {
        2.0 * r * smooth_step_prime(2.0 * r * t - 1.0)
    } else {
        -2.0 * r * smooth_step_prime(2.0 * r * (1.0 - t) - 1.0)
    }
}

fn theta_site(s: &Site, dim: usize, m: usize) -> f64 {
    s[..dim].iter().map(|&c| theta(c as f64, m)).product()
}

#[derive(Debug, Clone)]
pub struct CutoffData {
    pub m: usize,
    pub r_cut: f64,
    pub times: Vec<f64>,
    /// θ^M η u at each node.
    pub g: Vec<Field>,
    /// The two-piece residual formula at each node.
    pub residual: Vec<Field>,
    /// Interior nodes where the finite-difference residual was compared.
    pub checked_nodes: usize,
    /// max |(∂_t − iΔ − iV)g − formula| over checked nodes, relative to the
    /// size of the terms.
    pub max_mismatch: f64,
    /// Estimated error of the time differences, same scale.
    pub fd_error: f64,
    /// Whether the residual vanishes off {M ≤ |j|∞ ≤ 2M} ∪ the η′ strips.
    pub support_ok: bool,
}

/// Cutoff solution g = θ^M η u on the sampled solution `u` of
/// ∂_t u = i(Δu + Vu), and its residual
/// η′θu − iη Σ_k[(θ_{j+e_k} − θ_j)u_{j+e_k} − (θ_j − θ_{j−e_k})u_{j−e_k}].
/// The formula is checked against (∂_t − iΔ − iV)g with Richardson-verified
/// time differences of u (η′ is exact) at 1e−8.
pub fn build_cutoffs(u: &[Field], times: &[f64], v: Option<&Potential>, m: usize, r_cut: f64) -> Result<CutoffData> {
    let n = times.len();
    if u.len() != n || n < 9 {
        return Err(Error::Config("need one field per time node and at least 9 nodes".into()));
    }
    let h = times[1] - times[0];
    if times.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-12) || times[0] != 0.0 || (times[n - 1] - 1.0).abs() > 1e-12
    {
        return Err(Error::Config("cutoff time grid must be uniform on [0, 1]".into()));
    }
    if !(r_cut > 2.0) {
        return Err(Error::Config(format!("R_cut = {r_cut} must exceed 2")));
    }
    let w = u[0].window().clone();
    if m == 0 || 2 * m + 1 > w.min_radius() {
        return Err(Error::Config(format!("need 1 ≤ M and 2M + 1 ≤ window radius {}, got M = {m}", w.min_radius())));
    }
    if u.iter().any(|f| f.window() != &w) {
        return Err(Error::WindowMismatch);
    }
    let dim = w.dim();
    let th: Vec<f64> = w.sites().map(|s| theta_site(&s, dim, m)).collect();
    let g: Vec<Field> = u
        .iter()
        .zip(times)
        .map(|(f, &t)| {
            let e = eta(t, r_cut);
            Field::from_values(w.clone(), f.values().iter().zip(&th).map(|(v, th)| v * th * e).collect(), t)
        })
        .collect::<Result<_>>()?;
    let residual: Vec<Field> = u
        .par_iter()
        .zip(times)
        .map(|(f, &t)| {
            let (e, de) = (eta(t, r_cut), eta_prime(t, r_cut));
            Field::from_fn(w.clone(), |s| {
                let i = w.index(s).expect("site in window");
                let mut sum = C::new(0.0, 0.0);
                for k in 0..dim {
                    let (mut up, mut dn) = (*s, *s);
                    up[k] += 1;
                    dn[k] -= 1;
                    let th_at = |p: &Site| if w.contains(p) { theta_site(p, dim, m) } else { 0.0 };
                    sum += (th_at(&up) - th[i]) * f.get(&up) - (th[i] - th_at(&dn)) * f.get(&dn);
                }
                de * th[i] * f.values()[i] - C::i() * e * sum
            })
            .map(|r| r.with_time(t))
        })
        .collect::<Result<_>>()?;

    // ∂_t g = η′θu + ηθ∂_t u with η′ exact; ∂_t u from fourth-order central
    // differences at steps h, 2h, 4h combined by Richardson, the second
    // combination giving the error estimate.
    let checked: Vec<usize> = (8..n - 8).collect();
    let stats: Vec<(f64, f64, f64)> = checked
        .par_iter()
        .map(|&k| {
            let t = times[k];
            let lap = g[k].laplacian();
            let (e, de) = (eta(t, r_cut), eta_prime(t, r_cut));
            let mut scale: f64 = 0.0;
            let (mut fd_err, mut mismatch): (f64, f64) = (0.0, 0.0);
            for (i, s) in w.sites().enumerate() {
                let at = |q: usize| u[q].values()[i];
                let d4 = |m: usize| (at(k - 2 * m) - at(k + 2 * m) + (at(k + m) - at(k - m)) * 8.0) / (12.0 * m as f64 * h);
                let (d1, d2, d3) = (d4(1), d4(2), d4(4));
                let (e1, e2) = (d1 + (d1 - d2) / 15.0, d2 + (d2 - d3) / 15.0);
                let dt = (de * at(k) + e * e1) * th[i];
                let vg = v.map_or(C::new(0.0, 0.0), |v| v.eval(&s, t) * g[k].values()[i]);
                let numeric = dt - C::i() * (lap.values()[i] + vg);
                let formula = residual[k].values()[i];
                scale = scale.max(lap.values()[i].norm() + vg.norm() + formula.norm());
                fd_err = fd_err.max(e * th[i] * (e1 - e2).norm() / 63.0);
                mismatch = mismatch.max((numeric - formula).norm());
            }
            (scale, fd_err, mismatch)
        })
        .collect();
    let scale = stats.iter().map(|s| s.0).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let fd_error = stats.iter().map(|s| s.1).fold(0.0, f64::max) / scale;
    let max_mismatch = stats.iter().map(|s| s.2).fold(0.0, f64::max) / scale;
    if fd_error > 1e-8 {
        return Err(Error::GridTooCoarse(format!("time-difference error estimate {fd_error:e} exceeds 1e-8")));
    }
    if max_mismatch > 1e-8 {
        return Err(Error::GridTooCoarse(format!("residual formula mismatch {max_mismatch:e} exceeds 1e-8")));
    }

    let strip = |t: f64| {
        let d = t.min(1.0 - t);
        (0.5 / r_cut..=1.0 / r_cut).contains(&d)
    };
    let support_ok = residual.iter().zip(times).all(|(r, &t)| {
        strip(t)
            || w.sites().zip(r.values()).all(|(s, v)| {
                let linf = s[..dim].iter().map(|c| c.unsigned_abs() as usize).max().unwrap_or(0);
                *v == C::new(0.0, 0.0) || (m..=2 * m).contains(&linf)
            })
    });
    Ok(CutoffData {
        m,
        r_cut,
        times: times.to_vec(),
        g,
        residual,
        checked_nodes: checked.len(),
        max_mismatch,
        fd_error,
        support_ok,
    })
}

/// The right-hand terms of the weighted estimate for g = θ^M η_R u, as logs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremTerms {
    pub m: usize,
    /// ‖V‖²∫Σ e^{2φ}|g|².
    pub potential_term_log: f64,
    /// ∫Σ e^{2φ}|η′θu|².
    pub eta_term_log: f64,
    /// ∫ΣΣ_k (e^{2φ(j−e_k)}|θ_j − θ_{j−e_k}|² + e^{2φ(j+e_k)}|θ_{j+e_k} − θ_j|²)η²|u_j|².
    pub theta_term_log: f64,
    /// max |θ_j − θ_{j−e_k}|², the factor the estimate bounds by C/M².
    pub theta_coefficient: f64,
    /// ln sup_t Σ e^{2λ|j|²}|u_j(t)|².
    pub weighted_sup_log: f64,
}

/// Evaluates the terms on a uniform odd time grid, with η_R for R = p.R.
pub fn theorem_terms(
    u: &[Field],
    times: &[f64],
    v_sup: f64,
    lambda: f64,
    p: &CarlemanParams,
    m: usize,
) -> Result<TheoremTerms> {
    p.validate()?;
    let n = times.len();
    if u.len() != n || n < 3 || n.is_multiple_of(2) {
        return Err(Error::Config("theorem terms need an odd uniform time grid with one field per node".into()));
    }
    let w = u[0].window().clone();
    if m == 0 || 2 * m + 1 > w.min_radius() {
        return Err(Error::Config(format!("need 1 ≤ M and 2M + 1 ≤ window radius {}", w.min_radius())));
    }
    let dim = w.dim();
    let th_at = |s: &Site| if w.contains(s) { theta_site(s, dim, m) } else { 0.0 };
    let per_node: Vec<[f64; 4]> = u
        .par_iter()
        .zip(times)
        .map(|(f, &t)| {
            let spec = p.weight(t);
            let (e, de) = (eta(t, p.r), eta_prime(t, p.r));
            let (mut gs, mut etas, mut ths, mut sup) = (vec![], vec![], vec![], vec![]);
            for (s, val) in w.sites().zip(f.values()) {
                let a = val.norm();
                if a == 0.0 {
                    continue;
                }
                let la = 2.0 * a.ln();
                let th = th_at(&s);
                let lw = 2.0 * log_weight(&spec, &s)?;
                sup.push(2.0 * lambda * LatticeWindow::norm_sq(&s) as f64 + la);
                if th * e > 0.0 {
                    gs.push(lw + la + 2.0 * (th * e).ln());
                }
                if th * de != 0.0 {
                    etas.push(lw + la + 2.0 * (th * de).abs().ln());
                }
                if e > 0.0 {
                    for k in 0..dim {
                        for step in [-1i64, 1] {
                            let mut nb = s;
                            nb[k] += step;
                            let diff = (th_at(&nb) - th).abs();
                            if diff > 0.0 {
                                ths.push(2.0 * log_weight(&spec, &nb)? + 2.0 * (diff * e).ln() + la);
                            }
                        }
                    }
                }
            }
            Ok([log_sum_exp(&gs), log_sum_exp(&etas), log_sum_exp(&ths), log_sum_exp(&sup)])
        })
        .collect::<Result<_>>()?;
    let column = |c: usize| per_node.iter().map(|r| r[c]).collect::<Vec<f64>>();
    let theta_coefficient = (-(2 * m as i64 + 1)..=(2 * m as i64 + 1))
        .map(|x| (theta(x as f64, m) - theta(x as f64 - 1.0, m)).powi(2))
        .fold(0.0, f64::max);
    Ok(TheoremTerms {
        m,
        potential_term_log: 2.0 * v_sup.ln() + simpson_log(&column(0)),
        eta_term_log: simpson_log(&column(1)),
        theta_term_log: simpson_log(&column(2)),
        theta_coefficient,
        weighted_sup_log: column(3).into_iter().fold(f64::NEG_INFINITY, f64::max),
    })
}


