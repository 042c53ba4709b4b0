use std::f64::consts::{FRAC_PI_2, PI};

use super::{bessel_i, quad::gauss_legendre};
use crate::error::{Error, Result};

const SERIES_LIMIT: f64 = 20.0;

/// I_0(x) − L_0(x) = (2/π) ∫_0^{π/2} e^{−x sin φ} dφ.
///
/// The integrand has a boundary layer of width 1/x at φ = 0, so the panels
/// grow geometrically away from it. Finite for all x ≥ 0, unlike I_0 and L_0.
pub fn i0_minus_l0(x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("i0_minus_l0 needs finite x >= 0, got {x}")));
    }
    let (nodes, weights) = gauss_legendre(24);
    let mut edges = vec![0.0];
    let mut h = (0.25 / x.max(1.0)).min(FRAC_PI_2);
    while edges.last().copied().unwrap_or(0.0) + h < FRAC_PI_2 {
        let last = *edges.last().unwrap_or(&0.0);
        edges.push(last + h);
        h *= 2.0;
    }
    edges.push(FRAC_PI_2);
    let mut total = 0.0;
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        total += half
            * nodes
                .iter()
                .zip(&weights)
                .map(|(t, wt)| wt * (-x * (mid + half * t).sin()).exp())
                .sum::<f64>();
    }
    Ok(2.0 / PI * total)
}

/// Modified Struve function L_0(x), x ≥ 0.
pub fn struve_l0(x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("struve_l0 needs finite x >= 0, got {x}")));
    }
    if x <= SERIES_LIMIT {
        // Σ (x/2)^{2k+1} / Γ(k+3/2)^2, first term 2x/π.
        let y = 0.25 * x * x;
        let mut term = 2.0 * x / PI;
        let mut sum = term;
        for k in 0..200 {
            let a = k as f64 + 1.5;
            term *= y / (a * a);
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        return Ok(sum);
    }
    let i0 = bessel_i(0, x)?.value;
    Ok(i0 - i0_minus_l0(x)?)
}
