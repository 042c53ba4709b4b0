use super::{check_order, ln_factorial};
use crate::error::{Error, Result};

const SERIES_LIMIT: f64 = 1e-5;

/// J_k(x) for k = 0..=n_max by Miller's backward recurrence, normalized
/// with J_0 + 2 Σ_{k≥1} J_{2k} = 1.
pub fn bessel_j_table(n_max: u64, x: f64) -> Result<Vec<f64>> {
    check_order(n_max as i64)?;
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("bessel_j needs finite x >= 0, got {x}")));
    }
    let n_max = n_max as usize;
    if x == 0.0 {
        let mut out = vec![0.0; n_max + 1];
        out[0] = 1.0;
        return Ok(out);
    }
    if x < SERIES_LIMIT {
        let y = 0.25 * x * x;
        return Ok((0..=n_max)
            .map(|k| {
                let lead = (k as f64 * (0.5 * x).ln() - ln_factorial(k as u64)).exp();
                lead * (1.0 - y / (k as f64 + 1.0))
            })
            .collect());
    }
    let base = (n_max as f64).max(x);
    let mut top = base.ceil() as usize + 30 + (10.0 * base.sqrt()).ceil() as usize;
    top += top % 2;
    let mut v = vec![0.0; top + 2];
    v[top] = 1e-30;
    for k in (1..=top).rev() {
        v[k - 1] = 2.0 * k as f64 / x * v[k] - v[k + 1];
        if v[k - 1].abs() > 1e250 {
            for w in &mut v[k - 1..] {
                *w *= 1e-250;
            }
        }
    }
    let norm = v[0] + 2.0 * v.iter().skip(2).step_by(2).sum::<f64>();
    v.truncate(n_max + 1);
    for w in &mut v {
        *w /= norm;
    }
    Ok(v)
}

/// Bessel function of the first kind J_n(x), integer n, x ≥ 0.
/// Negative orders use J_{−n} = (−1)^n J_n.
pub fn bessel_j(n: i64, x: f64) -> Result<f64> {
    let m = check_order(n)?;
    let v = bessel_j_table(m, x)?[m as usize];
    Ok(if n < 0 && m % 2 == 1 { -v } else { v })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        let cases = [
            (0, 1.0, 0.765_197_686_557_966_6),
            (1, 1.0, 0.440_050_585_744_933_5),
            (3, 1.5, 0.060_963_951_141_139_64),
            (2, 10.0, 0.254_630_313_685_120_6),
        ];
        for (n, x, want) in cases {
            let got = bessel_j(n, x).unwrap();
            assert!((got - want).abs() < 1e-14 * want.abs(), "J_{n}({x}) = {got}");
        }
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(-3, 1.5).unwrap(), -bessel_j(3, 1.5).unwrap());
    }

    #[test]
    fn tiny_argument_series_matches_recurrence() {
        let a = bessel_j_table(6, 0.99e-5).unwrap();
        let b = bessel_j_table(6, 1.01e-5).unwrap();
        for k in 0..=6 {
            let scale = (1.01f64 / 0.99).powi(k as i32);
            assert!((b[k] / a[k] / scale - 1.0).abs() < 1e-9, "k = {k}");
        }
    }
}
