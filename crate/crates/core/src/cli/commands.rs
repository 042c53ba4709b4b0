use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::hardy::{hardy_threshold, HardyConfig};
use super::{Outcome, EXIT_CERTIFICATION, EXIT_PASS, EXIT_VERDICT};
use crate::carleman::{
    eqc_quadratic_form, verify_carleman, verify_carleman_refined, CarlemanParams, CarlemanReport, EqcReport,
    SpaceTimeTestFunction, TestProfile, TimeBump, CARLEMAN_TOLERANCE,
};
use crate::commutator::{positivity_scan, ExpressionId, ScanGrid};
use crate::convexity::{convexity_report, sample_series, unit_grid, CONVEXITY_TOLERANCE, TAIL_TOLERANCE};
use crate::error::{Error, Result};
use crate::evolve::{
    evolve_free, evolve_potential, tight_kernel_cut, EvolutionConfig, FreeStep, Method, Potential,
};
use crate::io::{fmt_f64, read_field_csv, write_csv, write_field_csv};
use crate::lattice::{Field, LatticeWindow, Site};
use crate::specfun::{bessel_k, selftest};
use crate::weights::WeightSpec;

type C = Complex64;

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

/// Initial data on a window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSpec {
    Delta,
    Zero,
    /// Seeded complex normal values on |j_k| ≤ support.
    Random { support: usize },
    /// e^{−λ|j|²} on |j_k| ≤ support.
    Gaussian { lambda: f64, support: usize },
    /// Π_k 1/K_{j_k}(1/2λ), normalised at the origin, on |j_k| ≤ support.
    KEnveloped { lambda: f64, support: usize },
    /// A field CSV as written by `evolve`.
    File { path: PathBuf },
}

impl DataSpec {
    pub fn build(&self, window: &LatticeWindow, seed: u64) -> Result<Field> {
        let boxed = |s: &Site, support: usize| s.iter().all(|c| c.unsigned_abs() as usize <= support);
        match self {
            DataSpec::Delta => Field::delta(window.clone(), [0; 3]),
            DataSpec::Zero => Ok(Field::zeros(window.clone())),
            DataSpec::Random { support } => Field::random_compact(window.clone(), *support, seed),
            DataSpec::Gaussian { lambda, support } => Field::from_fn(window.clone(), |s| {
                let v = if boxed(s, *support) { (-lambda * LatticeWindow::norm_sq(s) as f64).exp() } else { 0.0 };
                C::new(v, 0.0)
            }),
            DataSpec::KEnveloped { lambda, support } => {
                let x = 0.5 / lambda;
                let l0 = bessel_k(0, x)?.log_value;
                let lk: Vec<f64> =
                    (0..=*support as i64).map(|j| bessel_k(j, x).map(|r| r.log_value - l0)).collect::<Result<_>>()?;
                let dim = window.dim();
                Field::from_fn(window.clone(), |s| {
                    if !boxed(s, *support) {
                        return C::new(0.0, 0.0);
                    }
                    let l: f64 = s[..dim].iter().map(|c| lk[c.unsigned_abs() as usize]).sum();
                    C::new((-l).exp(), 0.0)
                })
            }
            DataSpec::File { path } => read_field_csv(path)?.embed(window),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    Zero,
    Constant { re: f64, im: f64 },
    /// Real travelling cosines with sup |V| ≤ sup_norm.
    RandomSmooth { sup_norm: f64 },
}

impl PotentialSpec {
    fn build(&self, seed: u64) -> Result<Option<Potential>> {
        Ok(match self {
            PotentialSpec::Zero => None,
            PotentialSpec::Constant { re, im } => Some(Potential::constant(C::new(*re, *im))),
            PotentialSpec::RandomSmooth { sup_norm } => {
                if !(*sup_norm >= 0.0 && sup_norm.is_finite()) {
                    return Err(Error::Config(format!("sup_norm must be finite and >= 0, got {sup_norm}")));
                }
                Some(Potential::random_smooth(*sup_norm, seed))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum EngineChoice {
    /// Spectral and convolution, cross-checked.
    Both,
    Spectral,
    Convolution,
    SplitStep,
}

fn window(dim: usize, radius: usize) -> Result<LatticeWindow> {
    LatticeWindow::cube(dim, radius)
}

// ---- evolve ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveCmdConfig {
    pub dim: usize,
    pub radius: usize,
    pub t: f64,
    pub data: DataSpec,
    pub engine: EngineChoice,
    pub dt: f64,
    pub kernel_cut: Option<usize>,
    pub potential: PotentialSpec,
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[arg(long, default_value_t = 60)]
    radius: usize,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Field CSV to start from (default: delta at the origin).
    #[arg(long)]
    data_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "both")]
    engine: EngineChoice,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long)]
    kernel_cut: Option<usize>,
}

impl EvolveArgs {
    pub fn config(&self, seed: u64) -> EvolveCmdConfig {
        EvolveCmdConfig {
            dim: self.dim,
            radius: self.radius,
            t: self.t,
            data: self.data_file.clone().map_or(DataSpec::Delta, |path| DataSpec::File { path }),
            engine: self.engine,
            dt: self.dt,
            kernel_cut: self.kernel_cut,
            potential: PotentialSpec::Zero,
            seed,
        }
    }
}

/// Engines agree to this ℓ² distance or the run is uncertified.
pub const CROSS_CHECK_TOLERANCE: f64 = 1e-10;

pub fn evolve(cfg: EvolveCmdConfig, out: &Path) -> Result<Outcome> {
    let w = window(cfg.dim, cfg.radius)?;
    let f0 = cfg.data.build(&w, cfg.seed)?;
    let v = cfg.potential.build(cfg.seed)?;
    let t = cfg.t;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Config(format!("t must be finite and >= 0, got {t}")));
    }
    let cut = |c: Option<usize>, default: usize| c.unwrap_or(default);
    let spectral = || {
        let mut e = EvolutionConfig::spectral(t);
        if let Some(k) = cfg.kernel_cut {
            e = e.with_kernel_cut(k);
        }
        evolve_free(&f0, t, &e)
    };
    let convolution = || -> Result<Field> {
        let e = EvolutionConfig::convolution(t).with_kernel_cut(cut(cfg.kernel_cut, tight_kernel_cut(t.max(1e-3))?));
        evolve_free(&f0, t, &e)
    };
    let mut result = serde_json::Map::new();
    let mut exit = EXIT_PASS;
    let final_field = match (cfg.engine, &v) {
        (EngineChoice::SplitStep, _) | (_, Some(_)) => {
            let e = EvolutionConfig::split_step(cfg.dt).with_free_step(FreeStep::Convolution);
            let e = if let Some(k) = cfg.kernel_cut { e.with_kernel_cut(k) } else { e };
            result.insert("engine".into(), json!("split_step"));
            evolve_potential(&f0, v.as_ref().unwrap_or(&Potential::zero()), 0.0, t, &e)?
        }
        (EngineChoice::Both, None) => {
            let (a, b) = (spectral()?, convolution()?);
            let delta = a.distance(&b)?;
            result.insert("engine".into(), json!("both"));
            result.insert("cross_check_delta".into(), json!(delta));
            if !(delta <= CROSS_CHECK_TOLERANCE) {
                exit = EXIT_CERTIFICATION;
            }
            b
        }
        (EngineChoice::Spectral, None) => {
            result.insert("engine".into(), json!("spectral"));
            spectral()?
        }
        (EngineChoice::Convolution, None) => {
            result.insert("engine".into(), json!("convolution"));
            convolution()?
        }
    };
    result.insert("norm_initial".into(), json!(f0.norm()));
    result.insert("norm_final".into(), json!(final_field.norm()));
    std::fs::create_dir_all(out)?;
    write_field_csv(&out.join("initial.csv"), &f0)?;
    write_field_csv(&out.join("final.csv"), &final_field)?;
    Ok(Outcome {
        exit_code: exit,
        config: to_value(&cfg),
        tolerances: json!({ "cross_check": CROSS_CHECK_TOLERANCE }),
        result: Value::Object(result),
    })
}

// ---- convexity ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvexityCmdConfig {
    pub dim: usize,
    pub radius: usize,
    pub weight: WeightSpec,
    pub data: DataSpec,
    pub nodes: usize,
    pub dt: f64,
    pub kernel_cut: Option<usize>,
    pub potential: PotentialSpec,
    pub tol: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WeightFamily {
    InverseBesselI,
    BesselK,
    Gaussian,
}

#[derive(Debug, Args)]
pub struct ConvexityArgs {
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[arg(long, default_value_t = 40)]
    radius: usize,
    #[arg(long, value_enum, default_value = "inverse-bessel-i")]
    weight: WeightFamily,
    #[arg(long, default_value_t = 0.1)]
    lambda: f64,
    /// Random data on |j| ≤ support instead of a delta.
    #[arg(long)]
    random_support: Option<usize>,
    #[arg(long, default_value_t = 21)]
    nodes: usize,
    /// Random smooth potential with this sup norm (split-step evolution).
    #[arg(long)]
    v_sup: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long, default_value_t = CONVEXITY_TOLERANCE)]
    tol: f64,
}

impl ConvexityArgs {
    pub fn config(&self, seed: u64) -> ConvexityCmdConfig {
        let lambda = self.lambda;
        ConvexityCmdConfig {
            dim: self.dim,
            radius: self.radius,
            weight: match self.weight {
                WeightFamily::InverseBesselI => WeightSpec::InverseBesselI { lambda },
                WeightFamily::BesselK => WeightSpec::BesselK { lambda },
                WeightFamily::Gaussian => WeightSpec::Gaussian { lambda },
            },
            data: self.random_support.map_or(DataSpec::Delta, |support| DataSpec::Random { support }),
            nodes: self.nodes,
            dt: self.dt,
            kernel_cut: None,
            potential: self.v_sup.map_or(PotentialSpec::Zero, |sup_norm| PotentialSpec::RandomSmooth { sup_norm }),
            tol: self.tol,
            seed,
        }
    }
}

/// The free engine (exact convolution) or, with a potential, split-step
/// with a convolution sub-step; both with the tight kernel for t ≤ 1.
pub fn convexity_engine(with_potential: bool, dt: f64, kernel_cut: Option<usize>) -> Result<EvolutionConfig> {
    let cut = kernel_cut.map_or_else(|| tight_kernel_cut(1.0), Ok)?;
    Ok(if with_potential {
        EvolutionConfig::split_step(dt).with_free_step(FreeStep::Convolution).with_padding(vec![cut])
    } else {
        EvolutionConfig::convolution(1.0).with_kernel_cut(cut)
    })
}

pub fn convexity(cfg: ConvexityCmdConfig, out: &Path) -> Result<Outcome> {
    let w = window(cfg.dim, cfg.radius)?;
    let f0 = cfg.data.build(&w, cfg.seed)?;
    let v = cfg.potential.build(cfg.seed)?;
    if cfg.nodes < 3 {
        return Err(Error::Config("need at least 3 time nodes".into()));
    }
    let engine = convexity_engine(v.is_some(), cfg.dt, cfg.kernel_cut)?;
    debug_assert!(v.is_none() || engine.method == Method::SplitStep);
    let series = sample_series(&f0, &cfg.weight, &unit_grid(cfg.nodes), &engine, v.as_ref())?;
    let report = convexity_report(&series, cfg.tol)?;
    std::fs::create_dir_all(out)?;
    series.write_csv(&out.join("series.csv"))?;
    Ok(Outcome {
        exit_code: if report.verdict { EXIT_PASS } else { EXIT_VERDICT },
        config: to_value(&cfg),
        tolerances: json!({ "convexity": cfg.tol, "tail": TAIL_TOLERANCE }),
        result: json!({ "report": report, "series": series }),
    })
}

// ---- scan ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanCmdConfig {
    pub expression: ExpressionId,
    /// Defaults to the expression's standard grid.
    pub grid: Option<ScanGrid>,
    pub negate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExpressionArg {
    Eq1,
    LambdaJ,
    AmosI,
    TuranK,
    BariczIBounds,
    SeguraKBounds,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long, value_enum, default_value = "eq1")]
    expression: ExpressionArg,
    #[arg(long)]
    j_min: Option<i64>,
    #[arg(long)]
    j_max: Option<i64>,
    #[arg(long)]
    x_min: Option<f64>,
    #[arg(long)]
    x_max: Option<f64>,
    #[arg(long)]
    points_per_decade: Option<usize>,
    /// Negate the values before deciding (harness self-test).
    #[arg(long)]
    negate: bool,
}

impl ScanArgs {
    pub fn config(&self) -> ScanCmdConfig {
        let expression = match self.expression {
            ExpressionArg::Eq1 => ExpressionId::Eq1,
            ExpressionArg::LambdaJ => ExpressionId::LambdaJ,
            ExpressionArg::AmosI => ExpressionId::AmosI,
            ExpressionArg::TuranK => ExpressionId::TuranK,
            ExpressionArg::BariczIBounds => ExpressionId::BariczIBounds,
            ExpressionArg::SeguraKBounds => ExpressionId::SeguraKBounds,
        };
        let any = self.j_min.is_some()
            || self.j_max.is_some()
            || self.x_min.is_some()
            || self.x_max.is_some()
            || self.points_per_decade.is_some();
        let grid = any.then(|| {
            let d = ScanGrid::default_for(expression);
            ScanGrid {
                j_min: self.j_min.unwrap_or(d.j_min),
                j_max: self.j_max.unwrap_or(d.j_max),
                x_min: self.x_min.unwrap_or(d.x_min),
                x_max: self.x_max.unwrap_or(d.x_max),
                points_per_decade: self.points_per_decade.unwrap_or(d.points_per_decade),
            }
        });
        ScanCmdConfig { expression, grid, negate: self.negate }
    }
}

pub fn scan(cfg: ScanCmdConfig, out: &Path) -> Result<Outcome> {
    let grid = cfg.grid.clone().unwrap_or_else(|| ScanGrid::default_for(cfg.expression));
    let report = positivity_scan(cfg.expression, &grid, cfg.negate)?;
    std::fs::create_dir_all(out)?;
    let rows = report.samples.iter().map(|s| vec![s.j.to_string(), fmt_f64(s.x), fmt_f64(s.value)]);
    write_csv(&out.join("scan.csv"), &["j", "x", "value"], rows)?;
    Ok(Outcome {
        exit_code: if report.verdict { EXIT_PASS } else { EXIT_VERDICT },
        config: to_value(&cfg),
        tolerances: json!({ "refine_below_relative": 1e-6 }),
        result: to_value(&report),
    })
}

// ---- carleman ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CarlemanCmdConfig {
    pub mu: Vec<f64>,
    pub eps: Vec<f64>,
    #[serde(rename = "R")]
    pub r: Vec<f64>,
    pub profiles: Vec<TestProfile>,
    pub window_radius: usize,
    /// Window of the quadratic-form check.
    pub form_window_radius: usize,
    pub form_times: Vec<f64>,
    /// R values tried, smallest first, to record the smallest passing R.
    pub r_candidates: Vec<f64>,
    pub time_bump: TimeBump,
    /// Test hook: g ≡ 0.
    pub zero_data: bool,
}

impl Default for CarlemanCmdConfig {
    fn default() -> Self {
        Self {
            mu: vec![0.6, 1.0],
            eps: vec![0.05, 0.1],
            r: vec![50.0, 100.0, 200.0],
            profiles: TestProfile::ALL.to_vec(),
            window_radius: 16,
            form_window_radius: 40,
            form_times: (1..20).map(|k| 0.05 * k as f64).collect(),
            r_candidates: vec![1.0, 2.0, 5.0, 10.0, 20.0, 50.0],
            time_bump: TimeBump::default(),
            zero_data: false,
        }
    }
}

#[derive(Debug, Args)]
pub struct CarlemanArgs {
    #[arg(long, value_delimiter = ',')]
    mu: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    #[arg(long = "R", value_delimiter = ',')]
    r: Option<Vec<f64>>,
    #[arg(long)]
    zero_data: bool,
}

impl CarlemanArgs {
    pub fn config(&self) -> CarlemanCmdConfig {
        let d = CarlemanCmdConfig::default();
        CarlemanCmdConfig {
            mu: self.mu.clone().unwrap_or(d.mu.clone()),
            eps: self.eps.clone().unwrap_or(d.eps.clone()),
            r: self.r.clone().unwrap_or(d.r.clone()),
            zero_data: self.zero_data,
            ..d
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct ProfileReport {
    profile: TestProfile,
    #[serde(flatten)]
    report: CarlemanReport,
}

#[derive(Debug, Clone, Serialize)]
struct SmallestR {
    profile: TestProfile,
    mu: f64,
    eps: f64,
    smallest_passing_r: Option<f64>,
}

pub fn carleman(cfg: CarlemanCmdConfig, out: &Path) -> Result<Outcome> {
    let w = window(1, cfg.window_radius)?;
    let mut grid = Vec::new();
    for &mu in &cfg.mu {
        for &eps in &cfg.eps {
            for &r in &cfg.r {
                grid.push(CarlemanParams::new(mu, eps, r)?);
            }
        }
    }
    let points: Vec<(TestProfile, CarlemanParams)> =
        cfg.profiles.iter().flat_map(|&pr| grid.iter().map(move |p| (pr, *p))).collect();
    let run = |profile: TestProfile, p: &CarlemanParams| -> Result<CarlemanReport> {
        if cfg.zero_data {
            verify_carleman(&SpaceTimeTestFunction::zero(&w, 201)?, p)
        } else {
            verify_carleman_refined(&profile.field(&w)?, cfg.time_bump, p)
        }
    };
    let reports: Vec<ProfileReport> = points
        .par_iter()
        .map(|(profile, p)| run(*profile, p).map(|report| ProfileReport { profile: *profile, report }))
        .collect::<Result<_>>()?;
    let form_window = window(1, cfg.form_window_radius)?;
    let form_points: Vec<(CarlemanParams, f64)> =
        grid.iter().flat_map(|p| cfg.form_times.iter().map(move |&t| (*p, t))).collect();
    let form: Vec<EqcReport> =
        form_points.par_iter().map(|(p, t)| eqc_quadratic_form(p, *t, &form_window)).collect::<Result<_>>()?;
    let mut smallest = Vec::new();
    for &profile in &cfg.profiles {
        for &mu in &cfg.mu {
            for &eps in &cfg.eps {
                let mut found = None;
                for &r in &cfg.r_candidates {
                    if run(profile, &CarlemanParams::new(mu, eps, r)?)?.verdict {
                        found = Some(r);
                        break;
                    }
                }
                smallest.push(SmallestR { profile, mu, eps, smallest_passing_r: found });
            }
        }
    }
    std::fs::create_dir_all(out)?;
    let rows = reports.iter().map(|r| {
        let p = r.report.params;
        vec![
            to_value(&r.profile).as_str().unwrap_or_default().to_string(),
            fmt_f64(p.mu),
            fmt_f64(p.eps),
            fmt_f64(p.r),
            fmt_f64(r.report.lhs_log),
            fmt_f64(r.report.rhs_log),
            r.report.ratio.map(fmt_f64).unwrap_or_default(),
            r.report.verdict.to_string(),
        ]
    });
    write_csv(&out.join("carleman_sweep.csv"), &["profile", "mu", "eps", "R", "lhs_log", "rhs_log", "ratio", "verdict"], rows)?;
    let rows = form.iter().map(|f| {
        vec![fmt_f64(f.params.mu), fmt_f64(f.params.eps), fmt_f64(f.params.r), fmt_f64(f.t), fmt_f64(f.min_rayleigh), fmt_f64(f.target)]
    });
    write_csv(&out.join("carleman_form.csv"), &["mu", "eps", "R", "t", "min_rayleigh", "target"], rows)?;
    let pass = reports.iter().all(|r| r.report.verdict) && form.iter().all(|f| f.verdict);
    Ok(Outcome {
        exit_code: if pass { EXIT_PASS } else { EXIT_VERDICT },
        config: to_value(&cfg),
        tolerances: json!({ "inequality_and_quadrature": CARLEMAN_TOLERANCE, "form_relative": 1e-8 }),
        result: json!({ "reports": reports, "form": form, "smallest_passing_r": smallest, "verdict": pass }),
    })
}

// ---- hardy ----

#[derive(Debug, Args)]
pub struct HardyArgs {
    #[arg(long, default_value_t = 0.5)]
    a: f64,
    #[arg(long)]
    zero_data: bool,
}

impl HardyArgs {
    pub fn config(&self) -> HardyConfig {
        HardyConfig { a: self.a, zero_data: self.zero_data, ..HardyConfig::default() }
    }
}

pub fn hardy(cfg: HardyConfig) -> Result<Outcome> {
    let report = hardy_threshold(&cfg)?;
    Ok(Outcome {
        exit_code: if report.verdict { EXIT_PASS } else { EXIT_VERDICT },
        config: to_value(&cfg),
        tolerances: json!({ "threshold": cfg.threshold_tolerance, "floor": cfg.floor }),
        result: to_value(&report),
    })
}

// ---- specfun-selftest ----

pub fn specfun_selftest() -> Result<Outcome> {
    let report = selftest()?;
    Ok(Outcome {
        exit_code: if report.pass { EXIT_PASS } else { EXIT_VERDICT },
        config: json!({}),
        tolerances: json!(report.checks.iter().map(|c| (c.name.clone(), json!(c.tolerance))).collect::<serde_json::Map<_, _>>()),
        result: to_value(&report),
    })
}
