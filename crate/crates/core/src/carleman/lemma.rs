use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bump;
use crate::error::{Error, Result};
use crate::lattice::{Field, LatticeWindow, Site};
use crate::weights::{log_sum_exp, log_weight, WeightSpec};

type C = Complex64;

/// The root of cosh²(μ) = 2 sinh(2μ) in (0.2, 0.3).
pub fn mu0() -> f64 {
    let h = |m: f64| m.cosh().powi(2) - 2.0 * (2.0 * m).sinh();
    let (mut lo, mut hi) = (0.2, 0.3);
    while hi - lo > 1e-16 {
        let mid = 0.5 * (lo + hi);
        if h(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if mid == lo && mid == hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarlemanParams {
    pub mu: f64,
    pub eps: f64,
    #[serde(rename = "R")]
    pub r: f64,
}

impl CarlemanParams {
    pub fn new(mu: f64, eps: f64, r: f64) -> Result<Self> {
        let p = Self { mu, eps, r };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if [self.mu, self.eps, self.r].iter().all(|v| v.is_finite() && *v > 0.0) {
            Ok(())
        } else {
            Err(Error::Config(format!("Carleman parameters must be finite and positive: {self:?}")))
        }
    }

    pub fn weight(&self, t: f64) -> WeightSpec {
        WeightSpec::Carleman { mu: self.mu, eps: self.eps, r: self.r, t }
    }

    /// εR²/(8μ), the lower bound the form must clear.
    pub fn target(&self) -> f64 {
        self.eps * self.r * self.r / (8.0 * self.mu)
    }
}

/// μ|j + Rt(1−t)e₁|² − (1+ε)R²t(1−t)/(16μ).
pub fn carleman_log_weight(j: &Site, t: f64, p: &CarlemanParams) -> Result<f64> {
    p.validate()?;
    log_weight(&p.weight(t), j)
}

/// bump((2t − t_a − t_b)/(t_b − t_a)), supported in [t_a, t_b] ⊂ (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeBump {
    pub t_a: f64,
    pub t_b: f64,
}

impl Default for TimeBump {
    fn default() -> Self {
        Self { t_a: 0.1, t_b: 0.9 }
    }
}

impl TimeBump {
    fn validate(&self) -> Result<()> {
        if 0.0 < self.t_a && self.t_a < self.t_b && self.t_b < 1.0 {
            Ok(())
        } else {
            Err(Error::Config(format!("time bump support [{}, {}] must lie inside (0, 1)", self.t_a, self.t_b)))
        }
    }

    fn coord(&self, t: f64) -> (f64, f64) {
        let h = 0.5 * (self.t_b - self.t_a);
        ((t - 0.5 * (self.t_a + self.t_b)) / h, 1.0 / h)
    }

    pub fn value(&self, t: f64) -> f64 {
        bump(self.coord(t).0)
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let (s, ds) = self.coord(t);
        if s.abs() >= 1.0 {
            return 0.0;
        }
        let q = 1.0 - s * s;
        bump(s) * (-2.0 * s / (q * q)) * ds
    }
}

/// Spatial profiles of the suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestProfile {
    /// bump(|j|/4)
    NarrowBump,
    /// bump(|j|/12)
    WideBump,
    /// e^{i j₁/2} bump(|j|/8)
    OscillatoryBump,
}

impl TestProfile {
    pub const ALL: [TestProfile; 3] = [TestProfile::NarrowBump, TestProfile::WideBump, TestProfile::OscillatoryBump];

    /// Radius of the profile's support.
    pub fn support(self) -> usize {
        match self {
            TestProfile::NarrowBump => 3,
            TestProfile::WideBump => 11,
            TestProfile::OscillatoryBump => 7,
        }
    }

    pub fn field(self, window: &LatticeWindow) -> Result<Field> {
        let r = |s: &Site| (LatticeWindow::norm_sq(s) as f64).sqrt();
        Field::from_fn(window.clone(), |s| match self {
            TestProfile::NarrowBump => C::new(bump(r(s) / 4.0), 0.0),
            TestProfile::WideBump => C::new(bump(r(s) / 12.0), 0.0),
            TestProfile::OscillatoryBump => C::from_polar(bump(r(s) / 8.0), 0.5 * s[0] as f64),
        })
    }
}

/// g(t_k) and ∂_t g(t_k) on a uniform grid of [0, 1] with an odd number of
/// nodes.
#[derive(Debug, Clone)]
pub struct SpaceTimeTestFunction {
    pub times: Vec<f64>,
    pub values: Vec<Field>,
    pub derivatives: Vec<Field>,
}

impl SpaceTimeTestFunction {
    /// g_j(t) = b(t)·h_j with the derivative taken from b′.
    pub fn separable(profile: &Field, time: TimeBump, nodes: usize) -> Result<Self> {
        time.validate()?;
        check_nodes(nodes)?;
        let times: Vec<f64> = (0..nodes).map(|k| k as f64 / (nodes - 1) as f64).collect();
        let scaled = |c: f64| profile.map(|_, v| v * c);
        let values = times.iter().map(|&t| scaled(time.value(t))).collect::<Result<Vec<_>>>()?;
        let derivatives = times.iter().map(|&t| scaled(time.derivative(t))).collect::<Result<Vec<_>>>()?;
        let g = Self { times, values, derivatives };
        g.validate()?;
        Ok(g)
    }

    pub fn zero(window: &LatticeWindow, nodes: usize) -> Result<Self> {
        Self::separable(&Field::zeros(window.clone()), TimeBump::default(), nodes)
    }

    pub fn window(&self) -> &LatticeWindow {
        self.values[0].window()
    }

    /// Uniform odd grid, matching windows, zero at both ends and on the
    /// boundary ring of width 2.
    pub fn validate(&self) -> Result<()> {
        let n = self.times.len();
        check_nodes(n)?;
        if self.values.len() != n || self.derivatives.len() != n {
            return Err(Error::Config("values and derivatives must have one field per node".into()));
        }
        let h = 1.0 / (n - 1) as f64;
        if self.times.iter().enumerate().any(|(k, t)| (t - k as f64 * h).abs() > 1e-12) {
            return Err(Error::Config("test-function grid must be uniform on [0, 1]".into()));
        }
        let w = self.window().clone();
        let ring = |s: &Site| w.radius().iter().enumerate().any(|(k, &r)| s[k].unsigned_abs() as usize + 2 > r);
        for f in self.values.iter().chain(&self.derivatives) {
            if f.window() != &w {
                return Err(Error::WindowMismatch);
            }
            if w.sites().zip(f.values()).any(|(s, v)| ring(&s) && *v != C::new(0.0, 0.0)) {
                return Err(Error::SupportTooWide);
            }
        }
        if !(self.values[0].is_zero() && self.values[n - 1].is_zero()) {
            return Err(Error::Config("test function must vanish at t = 0 and t = 1".into()));
        }
        Ok(())
    }
}

fn check_nodes(nodes: usize) -> Result<()> {
    if nodes >= 5 && nodes % 4 == 1 {
        Ok(())
    } else {
        Err(Error::Config(format!("node count {nodes} must be ≡ 1 (mod 4) and ≥ 5")))
    }
}

/// ln ∫₀¹ e^{L(t)} dt by composite Simpson on a uniform odd grid.
pub fn simpson_log(log_values: &[f64]) -> f64 {
    let n = log_values.len();
    let h = 1.0 / (n - 1) as f64;
    let terms: Vec<f64> = log_values
        .iter()
        .enumerate()
        .map(|(k, l)| {
            let w = if k == 0 || k == n - 1 { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
            l + (w * h / 3.0).ln()
        })
        .collect();
    log_sum_exp(&terms)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CarlemanReport {
    pub params: CarlemanParams,
    /// ln of R√(ε/8μ)‖e^φ g‖.
    pub lhs_log: f64,
    /// ln of ‖e^φ(∂_t − iΔ)g‖.
    pub rhs_log: f64,
    /// RHS/LHS; absent for g = 0.
    pub ratio: Option<f64>,
    pub nodes: usize,
    /// Relative change of the two integrals between the half and full grids.
    pub quadrature_change: f64,
    pub verdict: bool,
}

/// Relative tolerance on the quadrature and on the inequality itself.
pub const CARLEMAN_TOLERANCE: f64 = 1e-6;

/// Both sides of the Carleman inequality, with Simpson in time. Refuses when
/// Simpson on every other node disagrees with the full grid by more than
/// 1e−6.
pub fn verify_carleman(g: &SpaceTimeTestFunction, p: &CarlemanParams) -> Result<CarlemanReport> {
    p.validate()?;
    g.validate()?;
    let per_node: Vec<(f64, f64)> = (0..g.times.len())
        .into_par_iter()
        .map(|k| node_logs(g, k, p))
        .collect::<Result<_>>()?;
    let (lhs, rhs): (Vec<f64>, Vec<f64>) = per_node.into_iter().unzip();
    let half = |v: &[f64]| v.iter().step_by(2).copied().collect::<Vec<_>>();
    let (il, ir) = (simpson_log(&lhs), simpson_log(&rhs));
    let (il2, ir2) = (simpson_log(&half(&lhs)), simpson_log(&half(&rhs)));
    let change = |a: f64, b: f64| if a == f64::NEG_INFINITY && b == a { 0.0 } else { (a - b).exp_m1().abs() };
    let quadrature_change = change(il, il2).max(change(ir, ir2));
    if !(quadrature_change <= CARLEMAN_TOLERANCE) {
        return Err(Error::Quadrature(format!(
            "Simpson on {} and {} nodes differ by {quadrature_change:e}",
            g.times.len(),
            g.times.len() / 2 + 1
        )));
    }
    let lhs_log = p.r.ln() + 0.5 * (p.eps / (8.0 * p.mu)).ln() + 0.5 * il;
    let rhs_log = 0.5 * ir;
    let trivial = lhs_log == f64::NEG_INFINITY;
    Ok(CarlemanReport {
        params: *p,
        lhs_log,
        rhs_log,
        ratio: (!trivial).then(|| (rhs_log - lhs_log).exp()),
        nodes: g.times.len(),
        quadrature_change,
        verdict: trivial || lhs_log <= rhs_log + CARLEMAN_TOLERANCE.ln_1p(),
    })
}

/// ln Σ e^{2φ}|g|² and ln Σ e^{2φ}|∂_t g − iΔg|² at node k.
fn node_logs(g: &SpaceTimeTestFunction, k: usize, p: &CarlemanParams) -> Result<(f64, f64)> {
    let t = g.times[k];
    let u = &g.values[k];
    let lap = u.laplacian();
    let w = u.window();
    let spec = p.weight(t);
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (i, s) in w.sites().enumerate() {
        let r = g.derivatives[k].values()[i] - C::i() * lap.values()[i];
        let (gu, gr) = (u.values()[i].norm(), r.norm());
        if gu == 0.0 && gr == 0.0 {
            continue;
        }
        let lw = 2.0 * log_weight(&spec, &s)?;
        if gu > 0.0 {
            a.push(lw + 2.0 * gu.ln());
        }
        if gr > 0.0 {
            b.push(lw + 2.0 * gr.ln());
        }
    }
    Ok((log_sum_exp(&a), log_sum_exp(&b)))
}

/// Samples a separable test function on 201, 401, … nodes (up to 51201)
/// until the quadrature settles.
pub fn verify_carleman_refined(profile: &Field, time: TimeBump, p: &CarlemanParams) -> Result<CarlemanReport> {
    let mut nodes = 201;
    loop {
        let g = SpaceTimeTestFunction::separable(profile, time, nodes)?;
        match verify_carleman(&g, p) {
            Err(Error::Quadrature(_)) if nodes < 51_201 => nodes = 2 * nodes - 1,
            other => return other,
        }
    }
}
