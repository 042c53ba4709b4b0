//! Grid scans of the scalar positivity expressions and the Bessel
//! inequalities used to bound them.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scalar::{eq1_from_ratios, lambda_from_ratios};
use crate::error::{Error, Result};
use crate::specfun::{bessel_i_ratios_dd, bessel_k_ratios_dd, DoubleDouble as DD};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpressionId {
    Eq1,
    LambdaJ,
    AmosI,
    TuranK,
    BariczIBounds,
    SeguraKBounds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TuranFamily {
    AmosI,
    TuranK,
    BariczIBounds,
    SeguraKBounds,
}

impl From<TuranFamily> for ExpressionId {
    fn from(f: TuranFamily) -> Self {
        match f {
            TuranFamily::AmosI => ExpressionId::AmosI,
            TuranFamily::TuranK => ExpressionId::TuranK,
            TuranFamily::BariczIBounds => ExpressionId::BariczIBounds,
            TuranFamily::SeguraKBounds => ExpressionId::SeguraKBounds,
        }
    }
}

/// Orders j_min..=j_max against a log-spaced x grid on [x_min, x_max].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub j_min: i64,
    pub j_max: i64,
    pub x_min: f64,
    pub x_max: f64,
    pub points_per_decade: usize,
}

impl ScanGrid {
    pub fn default_for(id: ExpressionId) -> Self {
        let (j_min, j_max, x_max) = match id {
            ExpressionId::Eq1 | ExpressionId::LambdaJ => (0, 300, 1e4),
            ExpressionId::AmosI => (-1, 200, 100.0),
            ExpressionId::TuranK => (0, 200, 100.0),
            ExpressionId::BariczIBounds => (17, 200, 100.0),
            ExpressionId::SeguraKBounds => (1, 200, 100.0),
        };
        Self { j_min, j_max, x_min: 1e-4, x_max, points_per_decade: 200 }
    }

    fn validate(&self, id: ExpressionId) -> Result<()> {
        let lowest = match id {
            ExpressionId::AmosI => -1,
            ExpressionId::SeguraKBounds => 1,
            _ => 0,
        };
        if self.j_min < lowest || self.j_max < self.j_min || self.j_max > 100_000 {
            return Err(Error::Config(format!("order range [{}, {}] invalid for {id:?}", self.j_min, self.j_max)));
        }
        if !(self.x_min > 0.0 && self.x_max >= self.x_min && self.x_max.is_finite()) || self.points_per_decade == 0 {
            return Err(Error::Config("x grid needs 0 < x_min <= x_max < inf and points_per_decade > 0".into()));
        }
        Ok(())
    }
}

/// x_min·10^{k/n} for k ≥ 0 up to x_max, with x_max itself appended.
pub fn log_grid(x_min: f64, x_max: f64, per_decade: usize) -> Vec<f64> {
    let decades = (x_max / x_min).log10();
    let n = (decades * per_decade as f64).floor() as usize;
    let mut xs: Vec<f64> = (0..=n).map(|k| x_min * 10f64.powf(k as f64 / per_decade as f64)).collect();
    if xs.last().is_some_and(|l| (x_max - l) > 1e-12 * x_max) {
        xs.push(x_max);
    }
    xs
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanSample {
    pub j: i64,
    pub x: f64,
    pub value: f64,
    /// Magnitude of the terms that cancel in `value`.
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositivityScanReport {
    pub expression: ExpressionId,
    pub grid: ScanGrid,
    pub points: usize,
    pub min_value: f64,
    pub argmin_j: i64,
    pub argmin_x: f64,
    /// min_value relative to the local term scale at the argmin.
    pub min_relative: f64,
    /// Whether the near-zero rule triggered a 10× refinement at the argmin.
    pub refined: bool,
    /// Test hook: values were negated before deciding.
    pub negated: bool,
    pub verdict: bool,
    #[serde(skip)]
    pub samples: Vec<ScanSample>,
}

/// The largest x scanned at order j (the Baricz bound is scanned on its
/// stated region x ≤ j^{3/2}).
fn x_cap(id: ExpressionId, grid: &ScanGrid, j: i64) -> f64 {
    match id {
        ExpressionId::BariczIBounds => grid.x_max.min((j as f64).powf(1.5)),
        _ => grid.x_max,
    }
}

/// Case-split abscissae added to the grid at order j.
fn boundary_points(id: ExpressionId, j: i64) -> Vec<f64> {
    match id {
        ExpressionId::Eq1 => vec![(j as f64).powf(1.5)],
        ExpressionId::LambdaJ => vec![1.5 * j as f64, 1.1],
        ExpressionId::SeguraKBounds => vec![1.5 * j as f64],
        _ => vec![],
    }
}

fn q(r: &[DD], m: i64) -> DD {
    match m.unsigned_abs() as usize {
        0 => r[0].sqr().recip(),
        k => r[k - 1] / r[k],
    }
}

fn k_rho(r: &[DD], m: i64) -> DD {
    if m >= 0 {
        r[m as usize]
    } else {
        r[(-m - 1) as usize].recip()
    }
}

/// (value, scale) of expression `id` at every order in `js` for one x.
fn evaluate(id: ExpressionId, js: &[i64], x: f64) -> Result<Vec<(f64, f64)>> {
    let Some(&top) = js.iter().max() else { return Ok(vec![]) };
    let top = top.unsigned_abs() + 3;
    let uses_i = matches!(id, ExpressionId::Eq1 | ExpressionId::AmosI | ExpressionId::BariczIBounds);
    let r = if uses_i { bessel_i_ratios_dd(x, top)? } else { bessel_k_ratios_dd(x, top)? };
    Ok(js
        .iter()
        .map(|&j| match id {
            ExpressionId::Eq1 => {
                let (v, s) = eq1_from_ratios(j as u64, x, &r);
                (v.to_f64(), s)
            }
            ExpressionId::LambdaJ => {
                let (v, s) = lambda_from_ratios(j as u64, &r);
                (v.to_f64(), s)
            }
            // 1 − I_{j+1}I_{j−1}/I_j².
            ExpressionId::AmosI => ((DD::ONE - q(&r, j).recip()).to_f64(), 1.0),
            // K_{j−1}K_{j+1}/K_j² − 1.
            ExpressionId::TuranK => {
                let p = k_rho(&r, j - 1) / k_rho(&r, j);
                ((p.recip() - DD::ONE).to_f64(), 1.0)
            }
            ExpressionId::BariczIBounds => {
                let mid = DD::ONE - q(&r, j).recip();
                let jf = j as f64;
                let lower = (jf + 0.5) / ((jf + 1.0) * (x * x + (jf + 0.5).powi(2)).sqrt());
                let upper = 1.0 / (x + 2.0);
                let v = (mid - lower).to_f64().min((DD::from(upper) - mid).to_f64());
                (v, mid.to_f64())
            }
            ExpressionId::SeguraKBounds => {
                let mid = k_rho(&r, j - 1) / k_rho(&r, j);
                let v = j as f64;
                let lower = DD::ONE / (DD::ONE + DD::ONE / x);
                let upper = if x >= 1.5 * v {
                    DD::ONE / (DD::ONE + DD::ONE / x - DD::from(v * v - 0.25) / (DD::from(x) * x * x))
                } else {
                    DD::ONE / (DD::ONE + DD::ONE / (DD::from(v - 0.5) + (x * x + (v - 0.5).powi(2)).sqrt()))
                };
                ((mid - lower).to_f64().min((upper - mid).to_f64()), mid.to_f64())
            }
        })
        .collect())
}

/// Values below this fraction of the local scale trigger refinement.
const REFINE_THRESHOLD: f64 = 1e-6;

/// Scan of any expression; `negate` flips the sign before deciding (test hook).
pub fn positivity_scan(id: ExpressionId, grid: &ScanGrid, negate: bool) -> Result<PositivityScanReport> {
    grid.validate(id)?;
    let xs = log_grid(grid.x_min, grid.x_max, grid.points_per_decade);
    let js: Vec<i64> = (grid.j_min..=grid.j_max).collect();
    let sign = if negate { -1.0 } else { 1.0 };

    let mut samples: Vec<ScanSample> = xs
        .par_iter()
        .map(|&x| {
            let active: Vec<i64> = js.iter().copied().filter(|&j| x <= x_cap(id, grid, j) * (1.0 + 1e-12)).collect();
            let vals = evaluate(id, &active, x)?;
            Ok(active.into_iter().zip(vals).map(|(j, (v, s))| ScanSample { j, x, value: sign * v, scale: s }).collect())
        })
        .collect::<Result<Vec<Vec<ScanSample>>>>()?
        .into_iter()
        .flatten()
        .collect();
    let extra: Vec<ScanSample> = js
        .par_iter()
        .map(|&j| {
            let pts: Vec<f64> = boundary_points(id, j)
                .into_iter()
                .filter(|&x| x >= grid.x_min && x <= x_cap(id, grid, j))
                .collect();
            pts.into_iter()
                .map(|x| {
                    let (v, s) = evaluate(id, &[j], x)?[0];
                    Ok(ScanSample { j, x, value: sign * v, scale: s })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    samples.extend(extra);
    if samples.is_empty() {
        return Err(Error::Config("scan grid is empty".into()));
    }

    let argmin = |s: &[ScanSample]| {
        *s.iter().min_by(|a, b| a.value.total_cmp(&b.value)).expect("nonempty samples")
    };
    let mut best = argmin(&samples);
    let mut refined = false;
    if best.value < REFINE_THRESHOLD * best.scale.abs() {
        refined = true;
        let step = 10f64.powf(1.0 / grid.points_per_decade as f64);
        let (lo, hi) = ((best.x / step).max(grid.x_min), (best.x * step).min(x_cap(id, grid, best.j)));
        let fine = log_grid(lo, hi, grid.points_per_decade * 10);
        let extra: Vec<ScanSample> = fine
            .par_iter()
            .map(|&x| {
                let (v, s) = evaluate(id, &[best.j], x)?[0];
                Ok(ScanSample { j: best.j, x, value: sign * v, scale: s })
            })
            .collect::<Result<_>>()?;
        samples.extend(extra);
        best = argmin(&samples);
    }
    let strict = !matches!(id, ExpressionId::SeguraKBounds);
    let verdict = if strict { best.value > 0.0 } else { best.value >= 0.0 } && best.value.is_finite();
    Ok(PositivityScanReport {
        expression: id,
        grid: grid.clone(),
        points: samples.len(),
        min_value: best.value,
        argmin_j: best.j,
        argmin_x: best.x,
        min_relative: best.value / best.scale.abs(),
        refined,
        negated: negate,
        verdict,
        samples,
    })
}

/// Positivity of the inverse-I commutator coefficient on a grid.
pub fn eq1_scan(grid: &ScanGrid, negate: bool) -> Result<PositivityScanReport> {
    positivity_scan(ExpressionId::Eq1, grid, negate)
}

/// Positivity of Λ_j on a grid.
pub fn lambda_scan(grid: &ScanGrid, negate: bool) -> Result<PositivityScanReport> {
    positivity_scan(ExpressionId::LambdaJ, grid, negate)
}

/// One of the Turán-type inequalities on a grid; the value is the smallest
/// margin by which the inequality holds (relative form for Amos and K-Turán).
pub fn turan_scan(family: TuranFamily, grid: &ScanGrid) -> Result<PositivityScanReport> {
    positivity_scan(family.into(), grid, false)
}
