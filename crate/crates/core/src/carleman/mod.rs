//! The Carleman inequality for the shifted Gaussian weight
//! e^{μ|j+Rt(1−t)e₁|² − (1+ε)R²t(1−t)/16μ}, its pointwise quadratic form, and
//! the cutoff construction that feeds it a solution.

mod cutoff;
mod form;
mod lemma;

pub use cutoff::{build_cutoffs, eta, eta_prime, theorem_terms, theta, CutoffData, TheoremTerms};
pub use form::{eqc_matrix, eqc_quadratic_form, EqcMatrix, EqcReport};
pub use lemma::{
    carleman_log_weight, mu0, simpson_log, CARLEMAN_TOLERANCE, verify_carleman, verify_carleman_refined, CarlemanParams, CarlemanReport,
    SpaceTimeTestFunction, TestProfile, TimeBump,
};

/// exp(−1/(1−s²)) on |s| < 1, zero elsewhere.
pub fn bump(s: f64) -> f64 {
    if s.abs() < 1.0 {
        (-1.0 / (1.0 - s * s)).exp()
    } else {
        0.0
    }
}

/// e^{−1/x} for x > 0, zero elsewhere.
fn psi(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

fn psi_prime(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp() / (x * x)
    } else {
        0.0
    }
}

/// Smooth step: 0 for x ≤ 0, 1 for x ≥ 1.
pub fn smooth_step(x: f64) -> f64 {
    let (a, b) = (psi(x), psi(1.0 - x));
    a / (a + b)
}

fn smooth_step_prime(x: f64) -> f64 {
    let (a, b) = (psi(x), psi(1.0 - x));
    let (da, db) = (psi_prime(x), -psi_prime(1.0 - x));
    (da * b - a * db) / ((a + b) * (a + b))
}
