//! Test-only oracles: adaptive Gauss–Kronrod quadrature of integral
//! representations, and seeded random data.
#![allow(dead_code)]

use std::f64::consts::PI;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// (Kronrod estimate, |Kronrod − Gauss|, Kronrod estimate of ∫|f|).
fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    let mut abs = WGK[7] * fc.abs();
    for i in 0..7 {
        let (f1, f2) = (f(c - h * XGK[i]), f(c + h * XGK[i]));
        k += WGK[i] * (f1 + f2);
        abs += WGK[i] * (f1.abs() + f2.abs());
        if i % 2 == 1 {
            g += WG[i / 2] * (f1 + f2);
        }
    }
    (k * h, ((k - g) * h).abs(), abs * h.abs())
}

/// Adaptive Gauss–Kronrod (7/15) on [a, b], globally refining the panel with
/// the largest error estimate. The target is `rel_tol` times the running
/// estimate of ∫|f|, so it is relative whenever the integrand does not cancel.
/// Stops once the round-off floor is reached or after 4000 refinements.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    let f = &f as &dyn Fn(f64) -> f64;
    let pieces = 16;
    let h = (b - a) / pieces as f64;
    let mut panels: Vec<(f64, f64, f64, f64, f64)> = (0..pieces)
        .map(|i| {
            let (lo, hi) = (a + i as f64 * h, a + (i + 1) as f64 * h);
            let (k, e, s) = gk15(f, lo, hi);
            (lo, hi, k, e, s)
        })
        .collect();
    for _ in 0..4000 {
        let scale: f64 = panels.iter().map(|p| p.4).sum();
        let err: f64 = panels.iter().map(|p| p.3).sum();
        if err <= rel_tol * scale || scale == 0.0 {
            break;
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .fold((0, -1.0), |best, (i, p)| if p.3 > best.1 { (i, p.3) } else { best });
        let (lo, hi, _, e, _) = panels[idx];
        // The worst panel is already at the round-off floor.
        if e <= 1e-17 * scale || hi - lo < 1e-14 * (b - a) {
            break;
        }
        let m = 0.5 * (lo + hi);
        let (k1, e1, s1) = gk15(f, lo, m);
        let (k2, e2, s2) = gk15(f, m, hi);
        panels[idx] = (lo, m, k1, e1, s1);
        panels.push((m, hi, k2, e2, s2));
    }
    let mut vals: Vec<f64> = panels.iter().map(|p| p.2).collect();
    vals.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
    vals.iter().sum()
}

const TOL: f64 = 1e-15;

/// (x/2)^n / (√π Γ(n + 1/2)) with Γ(n+1/2) = √π (2n−1)!!/2^n.
fn poisson_prefactor(n: u32, x: f64) -> f64 {
    let mut p = 1.0 / PI;
    for k in 1..=n {
        p *= x / (2.0 * k as f64 - 1.0);
    }
    p
}

/// The defining integral (1/π)∫_0^π e^{x cos θ} cos(nθ) dθ. Only
/// well-conditioned when I_n(x) is not far below e^x.
pub fn oracle_bessel_i_cosine(n: u32, x: f64) -> f64 {
    integrate(|t| (x * t.cos()).exp() * (n as f64 * t).cos(), 0.0, PI, TOL) / PI
}

/// Poisson's form I_n(x) = (x/2)^n/(√πΓ(n+½)) ∫_0^π sin^{2n}φ e^{x cos φ} dφ,
/// with a positive integrand, so no cancellation at any order.
pub fn oracle_bessel_i(n: u32, x: f64) -> f64 {
    poisson_prefactor(n, x) * integrate(|p| p.sin().powi(2 * n as i32) * (x * p.cos()).exp(), 0.0, PI, TOL)
}

/// K_n(x) = ∫_0^∞ e^{−x cosh t} cosh(nt) dt, integrated in scaled form up to
/// where the integrand has dropped by e^{−60} from its peak.
pub fn oracle_bessel_k(n: u32, x: f64) -> f64 {
    let expo = |t: f64| -x * t.cosh() + n as f64 * t;
    let peak_t = if n == 0 { 0.0 } else { (n as f64 / x).asinh() };
    let peak = expo(peak_t);
    let mut end = peak_t + 1.0;
    while expo(end) > peak - 60.0 {
        end += 0.5;
    }
    let f = |t: f64| (expo(t) - peak).exp() * 0.5 * (1.0 + (-2.0 * n as f64 * t).exp());
    integrate(f, 0.0, end, TOL) * peak.exp()
}

/// J_n(x): Bessel's integral (1/π)∫_0^π cos(nθ − x sin θ) dθ when n < x,
/// Poisson's form (x/2)^n/(√πΓ(n+½)) ∫_0^π sin^{2n}φ cos(x cos φ) dφ otherwise.
pub fn oracle_bessel_j(n: u32, x: f64) -> f64 {
    if (n as f64) < x {
        integrate(|t| (n as f64 * t - x * t.sin()).cos(), 0.0, PI, TOL) / PI
    } else {
        poisson_prefactor(n, x) * integrate(|p| p.sin().powi(2 * n as i32) * (x * p.cos()).cos(), 0.0, PI, TOL)
    }
}

/// L_0(x) = (2/π) ∫_0^{π/2} sinh(x cos θ) dθ.
pub fn oracle_struve_l0(x: f64) -> f64 {
    2.0 / PI * integrate(|t| (x * t.cos()).sinh(), 0.0, PI / 2.0, TOL)
}

/// ∫_ℝ e^{λj − α cosh λ} dλ.
pub fn oracle_k_full_line(j: u32, alpha: f64) -> f64 {
    let expo = |t: f64| j as f64 * t - alpha * t.cosh();
    let peak_t = (j as f64 / alpha).asinh();
    let peak = expo(peak_t);
    let mut hi = peak_t + 1.0;
    while expo(hi) > peak - 60.0 {
        hi += 0.5;
    }
    let mut lo = peak_t - 1.0;
    while expo(lo) > peak - 60.0 {
        lo -= 0.5;
    }
    integrate(|t| (expo(t) - peak).exp(), lo, hi, TOL) * peak.exp()
}

/// ln ∫_ℝ e^{2√α λ j − λ²/2} dλ, integrated around the peak λ = 2√α j.
pub fn oracle_log_gaussian_line(j: u32, alpha: f64) -> f64 {
    let c = 2.0 * alpha.sqrt() * j as f64;
    let peak = 0.5 * c * c;
    (integrate(|t| (c * t - 0.5 * t * t - peak).exp(), c - 12.0, c + 12.0, TOL)).ln() + peak
}
