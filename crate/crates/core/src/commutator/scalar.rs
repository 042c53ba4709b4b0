//! The one-dimensional commutator coefficients for the Bessel weights,
//! written in Bessel-function ratios and evaluated in double-double.

use crate::error::{Error, Result};
use crate::specfun::{bessel_i_ratios_dd, bessel_k_ratios_dd, DoubleDouble as DD};

fn check(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("x must be finite and > 0, got {x}")))
    }
}

/// q_m = I_m²/(I_{m−1}I_{m+1}) from r_k = I_{k+1}/I_k, using I_{−m} = I_m.
fn q(r: &[DD], m: i64) -> DD {
    match m.unsigned_abs() as usize {
        0 => r[0].sqr().recip(),
        k => r[k - 1] / r[k],
    }
}

/// The expression and the size of its largest terms, from a ratio table with
/// at least j + 3 entries.
pub(crate) fn eq1_from_ratios(j: u64, x: f64, r: &[DD]) -> (DD, f64) {
    let j = j as i64;
    let half = DD::from(0.5);
    let (qm, q0, qp) = (q(r, j - 1), q(r, j), q(r, j + 1));
    let jj = DD::from(2.0 * (j * j) as f64);
    let x2 = DD::from(x).sqr();
    let bracket = q0 - q0.recip() + (qp.recip() - qp) * half + (qm.recip() - qm) * half;
    let value = jj * (q0.sqr() - DD::ONE) + x2 * bracket;
    let scale = (jj * q0.sqr() + x2 * (q0 + q0.recip())).to_f64();
    (value, scale)
}

/// The coefficient 2j²I_j⁴/(I_{j+1}²I_{j−1}²) − 2j² + x²(…) whose positivity
/// gives log-convexity for the inverse-I weight.
pub fn eq1_expression(j: u64, x: f64) -> Result<f64> {
    check(x)?;
    Ok(eq1_from_ratios(j, x, &bessel_i_ratios_dd(x, j + 2)?).0.to_f64())
}

/// ρ(m) = K_{m+1}/K_m for any integer m, from ρ_m (m ≥ 0) via K_{−m} = K_m.
fn rho(r: &[DD], m: i64) -> DD {
    if m >= 0 {
        r[m as usize]
    } else {
        r[(-m - 1) as usize].recip()
    }
}

/// p_m = K_m²/(K_{m−1}K_{m+1}).
fn p(r: &[DD], m: i64) -> DD {
    rho(r, m - 1) / rho(r, m)
}

/// Λ_j and the size of its largest terms, from ρ_0..=ρ_{j+1}.
pub(crate) fn lambda_from_ratios(j: u64, r: &[DD]) -> (DD, f64) {
    let j = j as i64;
    let half = DD::from(0.5);
    let (rj, rm) = (rho(r, j), rho(r, j - 1));
    let (pp, pm) = (p(r, j + 1), p(r, j - 1));
    let value = (rj.sqr() + rm.sqr().recip()) * half - rm.sqr() * half - rj.sqr().recip() * half
        + (pp - pp.recip()) * half
        + (pm - pm.recip()) * half;
    let scale = (rj.sqr() + rm.sqr() + pp + pm).to_f64();
    (value, scale)
}

pub(crate) fn lambda_recurrence_from_ratios(j: u64, x: f64, r: &[DD]) -> DD {
    let j = j as i64;
    let half = DD::from(0.5);
    let (pj, pp, pm) = (p(r, j), p(r, j + 1), p(r, j - 1));
    let x2 = DD::from(x).sqr();
    let jj = DD::from(2.0 * (j * j) as f64);
    let bracket = pj.recip() - pj + (pm - pm.recip()) * half + (pp - pp.recip()) * half;
    (jj * (DD::ONE - pj.sqr()) + x2 * bracket) / x2
}

/// Λ_j(x), the seven-term K-ratio coefficient whose positivity gives
/// log-convexity for the K weight.
pub fn lambda_j(j: u64, x: f64) -> Result<f64> {
    check(x)?;
    Ok(lambda_from_ratios(j, &bessel_k_ratios_dd(x, j + 1)?).0.to_f64())
}

/// Λ_j(x) from its recurrence-reduced form
/// x²Λ_j = 2j² − 2j²K_j⁴/(K_{j−1}²K_{j+1}²) + x²(…).
pub fn lambda_j_recurrence(j: u64, x: f64) -> Result<f64> {
    check(x)?;
    Ok(lambda_recurrence_from_ratios(j, x, &bessel_k_ratios_dd(x, j + 1)?).to_f64())
}

/// The coefficient K in eq1(j, x) = 2(2j+1) − K x² + O(x⁴), extrapolated
/// from x and 2x.
pub fn eq1_small_x_coefficient(j: u64, x: f64) -> Result<f64> {
    check(x)?;
    let limit = DD::from(2.0 * (2 * j + 1) as f64);
    let drop = |x: f64| -> Result<DD> { Ok(limit - eq1_from_ratios(j, x, &bessel_i_ratios_dd(x, j + 2)?).0) };
    let (a, b) = (drop(x)?, drop(2.0 * x)?);
    Ok(((a * 16.0 - b) / (12.0 * x * x)).to_f64())
}
