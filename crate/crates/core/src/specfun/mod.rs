//! Integer-order Bessel functions, the modified Struve function L0, and the
//! ratio sweeps used by the positivity scans.

mod bessel_i;
mod bessel_j;
mod bessel_k;
pub mod ddouble;
mod quad;
mod selftest;
mod struve;

pub use bessel_i::{bessel_i, bessel_i_ratios_dd, log_bessel_i_table};
pub use bessel_j::{bessel_j, bessel_j_table};
pub use bessel_k::{bessel_k, bessel_k_ratios_dd, log_bessel_k_table};
pub use ddouble::DoubleDouble;
pub use selftest::{selftest, SelftestCheck, SelftestReport};
pub use struve::{i0_minus_l0, struve_l0};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest order accepted by the scalar evaluators.
pub const MAX_ORDER: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Exact,
    /// `value` underflowed to 0; `log_value` is still accurate.
    UnderflowClamped,
    /// `value` overflowed to +inf; `log_value` is still accurate.
    OverflowClamped,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpecFunResult {
    pub value: f64,
    /// ln|value|; `-inf` when the function vanishes identically (e.g. I_n(0), n != 0).
    pub log_value: f64,
    pub status: Status,
}

impl SpecFunResult {
    fn from_log(log_value: f64) -> Self {
        if log_value > f64::MAX.ln() {
            Self { value: f64::INFINITY, log_value, status: Status::OverflowClamped }
        } else if log_value < -745.0 && log_value.is_finite() {
            Self { value: 0.0, log_value, status: Status::UnderflowClamped }
        } else {
            Self { value: log_value.exp(), log_value, status: Status::Exact }
        }
    }

    fn exact(value: f64) -> Self {
        Self { value, log_value: value.abs().ln(), status: Status::Exact }
    }
}

fn check_order(n: i64) -> Result<u64> {
    let m = n.unsigned_abs();
    if m > MAX_ORDER {
        return Err(Error::Domain(format!("order {n} exceeds {MAX_ORDER}")));
    }
    Ok(m)
}

/// ln(n!) exactly summed for small n, Stirling series beyond.
pub(crate) fn ln_factorial(n: u64) -> f64 {
    if n < 30 {
        return (2..=n).map(|k| (k as f64).ln()).sum();
    }
    let x = n as f64 + 1.0;
    let x2 = x * x;
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x)
        - 1.0 / (360.0 * x * x2)
        + 1.0 / (1260.0 * x2 * x2 * x)
}

/// |√(2πj)(1+α²/j²)^{1/4} I_j(α) e^{−j√(1+α²/j²) + j·arcsinh(j/α)} − 1|,
/// the relative defect of the uniform large-order asymptotic of I_j.
pub fn asymb_defect(j: u64, alpha: f64) -> Result<f64> {
    if j == 0 || !(alpha > 0.0) {
        return Err(Error::Domain(format!("asymb_defect needs j >= 1, alpha > 0 (got {j}, {alpha})")));
    }
    let jf = j as f64;
    let ratio = alpha / jf;
    let root = (1.0 + ratio * ratio).sqrt();
    let log_i = bessel_i(j as i64, alpha)?.log_value;
    let log_prefactor = 0.5 * (2.0 * std::f64::consts::PI * jf).ln() + 0.25 * (1.0 + ratio * ratio).ln();
    let log_q = log_prefactor + log_i - jf * root + jf * (jf / alpha).asinh();
    Ok(log_q.exp_m1().abs())
}
