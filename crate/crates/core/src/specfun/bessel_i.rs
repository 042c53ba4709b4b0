use super::{check_order, ln_factorial, DoubleDouble, SpecFunResult, Status};
use crate::error::{Error, Result};

/// Highest order the backward sweep must start from so that the start-value
/// error is damped below double-double precision at order `n_max`.
fn start_order(n_max: u64, x: f64) -> u64 {
    n_max + 50 + (10.0 * x.sqrt()).ceil() as u64
}

/// Debye-type estimate of I_{k+1}(x)/I_k(x) used to seed the sweep.
fn ratio_seed(k: u64, x: f64) -> f64 {
    let a = k as f64 + 1.0;
    x / (a + (a * a + x * x).sqrt())
}

/// Ratios r_k = I_{k+1}(x)/I_k(x) for k in 0..=n_top, by the backward
/// recurrence r_k = x / (2(k+1) + x r_{k+1}).
fn ratios(x: f64, n_top: u64) -> Vec<f64> {
    let mut r = vec![0.0; n_top as usize + 1];
    let mut next = ratio_seed(n_top + 1, x);
    for k in (0..=n_top).rev() {
        next = x / (2.0 * (k as f64 + 1.0) + x * next);
        r[k as usize] = next;
    }
    r
}

/// ln I_0(x) from the normalization I_0 (1 + 2 Σ_{k≥1} Π_{i<k} r_i) = e^x.
fn log_i0(x: f64, r: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut prod = 1.0;
    for &rk in r {
        prod *= rk;
        if prod < 1e-300 {
            break;
        }
        sum += prod;
    }
    x - (1.0 + 2.0 * sum).ln()
}

/// For arguments so small that the sweep would lose the log in subnormals.
const TINY_X: f64 = 1e-250;

fn log_i_tiny(n: u64, x: f64) -> f64 {
    n as f64 * (0.5 * x).ln() - ln_factorial(n)
}

/// Modified Bessel function of the first kind I_n(x), integer n, x ≥ 0.
pub fn bessel_i(n: i64, x: f64) -> Result<SpecFunResult> {
    let n = check_order(n)?;
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("bessel_i needs finite x >= 0, got {x}")));
    }
    if x == 0.0 {
        let value = if n == 0 { 1.0 } else { 0.0 };
        return Ok(SpecFunResult::exact(value));
    }
    if x < TINY_X {
        return Ok(SpecFunResult::from_log(log_i_tiny(n, x)));
    }
    let r = ratios(x, start_order(n, x));
    let l0 = log_i0(x, &r);
    let log_value = l0 + r[..n as usize].iter().map(|v| v.ln()).sum::<f64>();

    // The direct product keeps full relative accuracy; fall back to exp(log)
    // only near the representable range.
    if x < 700.0 {
        let mut v = l0.exp();
        let mut ok = true;
        for &rk in &r[..n as usize] {
            v *= rk;
            if v < 1e-290 {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(SpecFunResult { value: v, log_value, status: Status::Exact });
        }
    }
    Ok(SpecFunResult::from_log(log_value))
}

/// ln I_k(x) for k = 0..=n_max from one backward sweep.
pub fn log_bessel_i_table(n_max: u64, x: f64) -> Result<Vec<f64>> {
    check_order(n_max as i64)?;
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("log_bessel_i_table needs finite x > 0, got {x}")));
    }
    if x < TINY_X {
        return Ok((0..=n_max).map(|k| log_i_tiny(k, x)).collect());
    }
    let r = ratios(x, start_order(n_max, x));
    let mut out = Vec::with_capacity(n_max as usize + 1);
    let mut acc = log_i0(x, &r);
    for rk in &r[..=n_max as usize] {
        out.push(acc);
        acc += rk.ln();
    }
    Ok(out)
}

/// r_k = I_{k+1}(x)/I_k(x), k = 0..=n_max, in double-double.
pub fn bessel_i_ratios_dd(x: f64, n_max: u64) -> Result<Vec<DoubleDouble>> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("bessel_i_ratios_dd needs finite x > 0, got {x}")));
    }
    let top = start_order(n_max, x);
    let xd = DoubleDouble::from(x);
    let mut next = DoubleDouble::from(ratio_seed(top + 1, x));
    let mut out = vec![DoubleDouble::ZERO; n_max as usize + 1];
    for k in (0..=top).rev() {
        next = xd / (DoubleDouble::from(2.0 * (k as f64 + 1.0)) + xd * next);
        if k <= n_max {
            out[k as usize] = next;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(bessel_i(0, 0.0).unwrap().value, 1.0);
        assert_eq!(bessel_i(1, 0.0).unwrap().value, 0.0);
        // I_0(1), I_1(1) to 16 digits.
        let i0 = bessel_i(0, 1.0).unwrap().value;
        let i1 = bessel_i(1, 1.0).unwrap().value;
        assert!((i0 - 1.266_065_877_752_008_4).abs() < 2e-16 * i0);
        assert!((i1 - 0.565_159_103_992_485).abs() < 2e-16 * 1.0);
        assert_eq!(bessel_i(-3, 2.5).unwrap(), bessel_i(3, 2.5).unwrap());
    }

    #[test]
    fn log_stays_valid_under_underflow() {
        let r = bessel_i(5000, 1.0).unwrap();
        assert_eq!(r.status, Status::UnderflowClamped);
        let expect = 5000.0 * 0.5f64.ln() - ln_factorial(5000) + (0.25f64 / 5001.0).ln_1p();
        assert!((r.log_value - expect).abs() < 1e-9 * expect.abs());
        let big = bessel_i(0, 1000.0).unwrap();
        assert_eq!(big.status, Status::OverflowClamped);
        let asym = 1000.0 - 0.5 * (2.0 * std::f64::consts::PI * 1000.0).ln() + (1.0f64 + 1.0 / 8000.0).ln();
        assert!((big.log_value - asym).abs() < 1e-7);
    }

    #[test]
    fn table_matches_scalar() {
        let t = log_bessel_i_table(40, 3.7).unwrap();
        for (k, &v) in t.iter().enumerate() {
            let s = bessel_i(k as i64, 3.7).unwrap().log_value;
            assert!((v - s).abs() < 1e-13 * s.abs().max(1.0));
        }
    }

    #[test]
    fn dd_ratios_agree_with_double() {
        let rd = bessel_i_ratios_dd(12.0, 30).unwrap();
        let t = log_bessel_i_table(31, 12.0).unwrap();
        for k in 0..=30 {
            let r = (t[k + 1] - t[k]).exp();
            assert!((rd[k].to_f64() - r).abs() < 1e-13 * r);
        }
    }
}
