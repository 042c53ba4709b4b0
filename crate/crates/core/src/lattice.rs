//! Finite windows of Z^d and complex lattice fields on them.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 3;
pub const MAX_SITES: usize = 100_000_000;
/// Largest amplitude a field may carry; keeps ℓ² norms finite.
pub const MAX_AMPLITUDE: f64 = 1e150;

/// A lattice site; coordinates beyond the window dimension are zero.
pub type Site = [i64; MAX_DIM];

/// The box {j : |j_k| ≤ R_k} in Z^d, stored row-major with the last axis fastest.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "WindowRepr", into = "WindowRepr")]
pub struct LatticeWindow {
    radius: Vec<usize>,
    strides: Vec<usize>,
    len: usize,
}

#[derive(Serialize, Deserialize)]
struct WindowRepr {
    radius: Vec<usize>,
}

impl TryFrom<WindowRepr> for LatticeWindow {
    type Error = Error;
    fn try_from(r: WindowRepr) -> Result<Self> {
        LatticeWindow::new(r.radius)
    }
}

impl From<LatticeWindow> for WindowRepr {
    fn from(w: LatticeWindow) -> Self {
        WindowRepr { radius: w.radius }
    }
}

impl LatticeWindow {
    pub fn new(radius: Vec<usize>) -> Result<Self> {
        if radius.is_empty() || radius.len() > MAX_DIM {
            return Err(Error::InvalidWindow(format!("dimension must be 1..={MAX_DIM}, got {}", radius.len())));
        }
        if radius.contains(&0) {
            return Err(Error::InvalidWindow("every radius must be positive".into()));
        }
        let mut len: usize = 1;
        for &r in &radius {
            len = len
                .checked_mul(2 * r + 1)
                .filter(|&n| n <= MAX_SITES)
                .ok_or_else(|| Error::InvalidWindow(format!("more than {MAX_SITES} sites")))?;
        }
        let mut strides = vec![1; radius.len()];
        for k in (0..radius.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * (2 * radius[k + 1] + 1);
        }
        Ok(Self { radius, strides, len })
    }

    pub fn cube(dim: usize, radius: usize) -> Result<Self> {
        Self::new(vec![radius; dim])
    }

    pub fn dim(&self) -> usize {
        self.radius.len()
    }

    pub fn radius(&self) -> &[usize] {
        &self.radius
    }

    pub fn min_radius(&self) -> usize {
        self.radius.iter().copied().min().unwrap_or(0)
    }

    pub fn extent(&self, axis: usize) -> usize {
        2 * self.radius[axis] + 1
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.strides[axis]
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, site: &Site) -> bool {
        self.radius.iter().enumerate().all(|(k, &r)| site[k].unsigned_abs() as usize <= r)
    }

    /// Whether |j_k| ≤ R_k / 2 on every axis.
    pub fn in_inner_half(&self, site: &Site) -> bool {
        self.radius.iter().enumerate().all(|(k, &r)| 2 * site[k].unsigned_abs() as usize <= r)
    }

    pub fn index(&self, site: &Site) -> Option<usize> {
        if !self.contains(site) {
            return None;
        }
        Some(
            self.radius
                .iter()
                .enumerate()
                .map(|(k, &r)| (site[k] + r as i64) as usize * self.strides[k])
                .sum(),
        )
    }

    pub fn site(&self, index: usize) -> Site {
        let mut s = [0i64; MAX_DIM];
        let mut rest = index;
        for k in 0..self.dim() {
            s[k] = (rest / self.strides[k]) as i64 - self.radius[k] as i64;
            rest %= self.strides[k];
        }
        s
    }

    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        (0..self.len).map(move |i| self.site(i))
    }

    /// Squared Euclidean length |j|².
    pub fn norm_sq(site: &Site) -> i64 {
        site.iter().map(|c| c * c).sum()
    }
}

/// Deterministic pairwise (tree) summation.
pub fn pairwise_sum<T>(xs: &[T]) -> T
where
    T: Copy + Default + std::ops::Add<Output = T>,
{
    const LEAF: usize = 8;
    if xs.len() <= LEAF {
        return xs.iter().fold(T::default(), |a, &b| a + b);
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// A complex lattice function on a window, labelled with a time.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    window: LatticeWindow,
    values: Vec<Complex64>,
    time: f64,
}

impl Field {
    pub fn zeros(window: LatticeWindow) -> Self {
        let values = vec![Complex64::new(0.0, 0.0); window.len()];
        Self { window, values, time: 0.0 }
    }

    pub fn from_values(window: LatticeWindow, values: Vec<Complex64>, time: f64) -> Result<Self> {
        if values.len() != window.len() {
            return Err(Error::InvalidWindow(format!(
                "{} values for a window of {} sites",
                values.len(),
                window.len()
            )));
        }
        if let Some(i) = values
            .iter()
            .position(|v| !(v.re.is_finite() && v.im.is_finite()) || v.norm() > MAX_AMPLITUDE)
        {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { window, values, time })
    }

    pub fn from_fn(window: LatticeWindow, f: impl Fn(&Site) -> Complex64) -> Result<Self> {
        let values = window.sites().map(|s| f(&s)).collect();
        Self::from_values(window, values, 0.0)
    }

    pub fn delta(window: LatticeWindow, site: Site) -> Result<Self> {
        let i = window
            .index(&site)
            .ok_or_else(|| Error::InvalidWindow(format!("site {site:?} outside window")))?;
        let mut f = Self::zeros(window);
        f.values[i] = Complex64::new(1.0, 0.0);
        Ok(f)
    }

    /// Independent standard complex Gaussian amplitudes on the box
    /// {|j_k| ≤ support}, zero elsewhere; deterministic in `seed`.
    pub fn random_compact(window: LatticeWindow, support: usize, seed: u64) -> Result<Self> {
        if support > window.min_radius() {
            return Err(Error::InvalidWindow(format!(
                "support {support} exceeds window radius {}",
                window.min_radius()
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = support as i64;
        let values = window
            .sites()
            .map(|j| {
                if j.iter().all(|c| c.abs() <= s) {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex64::new(re, im)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        Self::from_values(window, values, 0.0)
    }

    pub fn window(&self) -> &LatticeWindow {
        &self.window
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    /// Amplitude at `site`, zero outside the window.
    pub fn get(&self, site: &Site) -> Complex64 {
        self.window.index(site).map_or(Complex64::new(0.0, 0.0), |i| self.values[i])
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.re == 0.0 && v.im == 0.0)
    }

    /// Per-axis max |j_k| over nonzero sites, or `None` for the zero field.
    pub fn support_radius(&self) -> Option<Vec<usize>> {
        let mut out: Option<Vec<usize>> = None;
        for (i, v) in self.values.iter().enumerate() {
            if v.re == 0.0 && v.im == 0.0 {
                continue;
            }
            let s = self.window.site(i);
            let o = out.get_or_insert_with(|| vec![0; self.window.dim()]);
            for (k, r) in o.iter_mut().enumerate() {
                *r = (*r).max(s[k].unsigned_abs() as usize);
            }
        }
        out
    }

    pub fn supported_in_inner_half(&self) -> bool {
        self.support_radius()
            .is_none_or(|sr| sr.iter().zip(self.window.radius()).all(|(&s, &r)| 2 * s <= r))
    }

    /// Copy into another window of the same dimension; fails if nonzero
    /// amplitude would be dropped.
    pub fn embed(&self, window: &LatticeWindow) -> Result<Field> {
        if window.dim() != self.window.dim() {
            return Err(Error::WindowMismatch);
        }
        let mut out = Field::zeros(window.clone()).with_time(self.time);
        for (i, v) in self.values.iter().enumerate() {
            let s = self.window.site(i);
            match window.index(&s) {
                Some(j) => out.values[j] = *v,
                None if v.re != 0.0 || v.im != 0.0 => {
                    let axis = (0..window.dim())
                        .find(|&k| s[k].unsigned_abs() as usize > window.radius()[k])
                        .unwrap_or(0);
                    return Err(Error::SupportOverflow {
                        axis,
                        needed: s[axis].unsigned_abs() as usize,
                        radius: window.radius()[axis],
                    });
                }
                None => {}
            }
        }
        Ok(out)
    }

    pub fn map(&self, f: impl Fn(&Site, Complex64) -> Complex64) -> Result<Field> {
        let values = self.values.iter().enumerate().map(|(i, &v)| f(&self.window.site(i), v)).collect();
        Field::from_values(self.window.clone(), values, self.time)
    }

    pub fn laplacian(&self) -> Field {
        laplacian(self)
    }

    pub fn norm_sq(&self) -> f64 {
        let sq: Vec<f64> = self.values.iter().map(|v| v.norm_sqr()).collect();
        pairwise_sum(&sq)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// ℓ² distance to another field on the same window.
    pub fn distance(&self, other: &Field) -> Result<f64> {
        if self.window != other.window {
            return Err(Error::WindowMismatch);
        }
        let sq: Vec<f64> = self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm_sqr()).collect();
        Ok(pairwise_sum(&sq).sqrt())
    }

    pub(crate) fn from_raw(window: LatticeWindow, values: Vec<Complex64>, time: f64) -> Self {
        debug_assert_eq!(values.len(), window.len());
        Self { window, values, time }
    }
}

/// Σ_k (f_{j+e_k} − 2f_j + f_{j−e_k}), with zero outside the window.
pub fn laplacian(f: &Field) -> Field {
    let w = &f.window;
    let mut out = vec![Complex64::new(0.0, 0.0); w.len()];
    for (i, o) in out.iter_mut().enumerate() {
        let s = w.site(i);
        let mut acc = f.values[i] * (-2.0 * w.dim() as f64);
        for k in 0..w.dim() {
            let r = w.radius()[k] as i64;
            if s[k] < r {
                acc += f.values[i + w.stride(k)];
            }
            if s[k] > -r {
                acc += f.values[i - w.stride(k)];
            }
        }
        *o = acc;
    }
    Field::from_raw(w.clone(), out, f.time)
}

/// ⟨f, g⟩ = Σ f_j conj(g_j), summed pairwise.
pub fn inner_product(f: &Field, g: &Field) -> Result<Complex64> {
    if f.window != g.window {
        return Err(Error::WindowMismatch);
    }
    let terms: Vec<Complex64> = f.values.iter().zip(&g.values).map(|(a, b)| a * b.conj()).collect();
    Ok(pairwise_sum(&terms))
}
