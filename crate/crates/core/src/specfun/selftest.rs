//! Identity checks runnable without external oracles.

use serde::{Deserialize, Serialize};

use super::{asymb_defect, bessel_j_table, i0_minus_l0, log_bessel_i_table, log_bessel_k_table};
use crate::error::Result;
use crate::weights::log_sum_exp;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelftestCheck {
    pub name: String,
    pub max_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub checks: Vec<SelftestCheck>,
    pub pass: bool,
}

fn check(name: &str, max_error: f64, tolerance: f64) -> SelftestCheck {
    SelftestCheck { name: name.into(), max_error, tolerance, pass: max_error <= tolerance }
}

/// Generating function, Wronskian, Neumann sum, Struve remainder and
/// uniform-asymptotic defect.
pub fn selftest() -> Result<SelftestReport> {
    let mut checks = Vec::new();

    // Σ_j I_j(α) e^{jy} = e^{α cosh y}.
    let mut err: f64 = 0.0;
    for alpha in [0.5, 1.0, 5.0, 20.0] {
        let li = log_bessel_i_table(600, alpha)?;
        for y in [0.0, 0.5, 1.0, 2.0] {
            let terms: Vec<f64> = (-600i64..=600).map(|j| li[j.unsigned_abs() as usize] + j as f64 * y).collect();
            err = err.max((log_sum_exp(&terms) - alpha * f64::cosh(y)).exp_m1().abs());
        }
    }
    checks.push(check("generating_identity", err, 1e-10));

    // I_j K_{j+1} + I_{j+1} K_j = 1/x.
    let mut err: f64 = 0.0;
    for x in [0.1, 1.0, 10.0, 100.0] {
        let (li, lk) = (log_bessel_i_table(51, x)?, log_bessel_k_table(51, x)?);
        for j in 0..=50 {
            let s = log_sum_exp(&[li[j] + lk[j + 1], li[j + 1] + lk[j]]);
            err = err.max((s + x.ln()).exp_m1().abs());
        }
    }
    checks.push(check("wronskian_i_k", err, 1e-12));

    // J_0² + 2Σ_{n≥1} J_n² = 1.
    let mut err: f64 = 0.0;
    for x in [0.1, 1.0, 10.0, 100.0] {
        let jt = bessel_j_table(400, x)?;
        let s: f64 = jt[0] * jt[0] + 2.0 * jt[1..].iter().map(|v| v * v).sum::<f64>();
        err = err.max((s - 1.0).abs());
    }
    checks.push(check("neumann_sum_j", err, 1e-13));

    // |π(I₀ − L₀)(s) − 2/s| ≤ 16/s³: worst ratio to the bound.
    let mut worst: f64 = 0.0;
    for k in 0..=200 {
        let s = 2.0 * 500f64.powf(k as f64 / 200.0);
        let rem = std::f64::consts::PI * i0_minus_l0(s)? - 2.0 / s;
        worst = worst.max(rem.abs() / (16.0 / s.powi(3)));
    }
    checks.push(check("struve_remainder_bound", worst, 1.0));

    // asymb_defect(j, α) ≤ 3/(5j): worst ratio to the bound.
    let mut worst: f64 = 0.0;
    for alpha in [0.5, 1.0, 2.0] {
        for j in 1..=1000u64 {
            worst = worst.max(asymb_defect(j, alpha)? * 5.0 * j as f64 / 3.0);
        }
    }
    checks.push(check("asymptotic_defect_bound", worst, 1.0));

    let pass = checks.iter().all(|c| c.pass);
    Ok(SelftestReport { checks, pass })
}
