use super::{check_order, DoubleDouble, SpecFunResult};
use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
/// Below this argument K0/K1 come from their ascending series.
const SERIES_LIMIT: f64 = 1.0;

/// (K0(x), K1(x)) from the ascending series, 0 < x ≤ 1.
fn k01_series(x: f64) -> (f64, f64) {
    let y = 0.25 * x * x;
    let l = (0.5 * x).ln();

    let (mut i0, mut i1) = (0.0, 0.0);
    let (mut s0, mut s1) = (0.0, 0.0);
    // term_k = y^k / (k!)^2, term1_k = y^k / (k! (k+1)!)
    let mut term = 1.0;
    let mut term1 = 1.0;
    let mut harmonic = 0.0; // H_k
    for k in 0..60u32 {
        let kf = k as f64;
        if k > 0 {
            term *= y / (kf * kf);
            term1 *= y / (kf * (kf + 1.0));
            harmonic += 1.0 / kf;
        }
        i0 += term;
        i1 += term1;
        s0 += harmonic * term;
        // ψ(k+1) + ψ(k+2) = 2H_k + 1/(k+1) − 2γ
        s1 += (2.0 * harmonic + 1.0 / (kf + 1.0) - 2.0 * EULER_GAMMA) * term1;
        if term1 < 1e-18 * i0 {
            break;
        }
    }
    let i1 = 0.5 * x * i1;
    let k0 = -(l + EULER_GAMMA) * i0 + s0;
    let k1 = 1.0 / x + l * i1 - 0.25 * x * s1;
    (k0, k1)
}

/// Steed's continued fraction (Temme's CF2) at order 0, x > 1.
/// Returns (ln K0(x), K1(x)/K0(x)) with the ratio in double-double.
fn k01_cf2(x: f64) -> (f64, DoubleDouble) {
    let xd = DoubleDouble::from(x);
    let mut b = DoubleDouble::from(2.0) * (xd + 1.0);
    let mut d = DoubleDouble::ONE / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = DoubleDouble::ZERO;
    let mut q2 = DoubleDouble::ONE;
    let a1 = DoubleDouble::from(0.25);
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = DoubleDouble::ONE + q * delh;
    for i in 1..10_000u32 {
        let fi = i as f64;
        a = a - 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q = q + c * qnew;
        // c grows factorially while q2 decays; rescale the pair to stay finite.
        if c.abs().to_f64() > 1e100 {
            c = c * 1e-100;
            q1 = q1 * 1e100;
            q2 = q2 * 1e100;
        }
        b = b + 2.0;
        d = DoubleDouble::ONE / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h = h + delh;
        let dels = q * delh;
        s = s + dels;
        if dels.abs().to_f64() < 1e-33 * s.abs().to_f64() && delh.abs().to_f64() < 1e-33 * h.abs().to_f64() {
            break;
        }
    }
    let h = a1 * h;
    let log_k0 = 0.5 * (std::f64::consts::PI / (2.0 * x)).ln() - x - s.to_f64().ln();
    let ratio = (xd + 0.5 - h) / xd;
    (log_k0, ratio)
}

/// (ln K0, K1/K0) for x > 0.
fn k01(x: f64) -> (f64, DoubleDouble) {
    if x <= SERIES_LIMIT {
        let (k0, k1) = k01_series(x);
        (k0.ln(), DoubleDouble::from(k1) / k0)
    } else {
        k01_cf2(x)
    }
}

fn check_x(x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("bessel_k needs finite x > 0, got {x}")));
    }
    Ok(())
}

/// ρ_m = K_{m+1}(x)/K_m(x), m = 0..=n_max, by the forward recurrence
/// ρ_m = 1/ρ_{m−1} + 2m/x (stable: K is dominant upward).
pub fn bessel_k_ratios_dd(x: f64, n_max: u64) -> Result<Vec<DoubleDouble>> {
    check_x(x)?;
    let (_, rho0) = k01(x);
    let mut out = Vec::with_capacity(n_max as usize + 1);
    out.push(rho0);
    let xd = DoubleDouble::from(x);
    for m in 1..=n_max {
        let prev = out[m as usize - 1];
        out.push(prev.recip() + DoubleDouble::from(2.0 * m as f64) / xd);
    }
    Ok(out)
}

/// ln K_k(x) for k = 0..=n_max.
pub fn log_bessel_k_table(n_max: u64, x: f64) -> Result<Vec<f64>> {
    check_order(n_max as i64)?;
    check_x(x)?;
    let (log_k0, rho0) = k01(x);
    let mut out = Vec::with_capacity(n_max as usize + 1);
    out.push(log_k0);
    let mut rho = rho0.to_f64();
    for m in 1..=n_max as usize {
        out.push(out[m - 1] + rho.ln());
        rho = 1.0 / rho + 2.0 * m as f64 / x;
    }
    Ok(out)
}

/// Modified Bessel function of the second kind K_n(x), integer n, x > 0.
pub fn bessel_k(n: i64, x: f64) -> Result<SpecFunResult> {
    let n = check_order(n)?;
    check_x(x)?;
    let (log_k0, rho0) = k01(x);
    let k0 = log_k0.exp();
    let mut rho = rho0.to_f64();
    let mut log_value = log_k0;
    let mut value = k0;
    let mut direct = k0.is_finite() && k0 > 1e-290;
    for m in 1..=n {
        log_value += rho.ln();
        if direct {
            value *= rho;
            direct = value.is_finite() && value < 1e290;
        }
        rho = 1.0 / rho + 2.0 * m as f64 / x;
    }
    if direct {
        Ok(SpecFunResult { value, log_value, status: super::Status::Exact })
    } else {
        Ok(SpecFunResult::from_log(log_value))
    }
}
