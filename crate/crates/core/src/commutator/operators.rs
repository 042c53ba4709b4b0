use num_complex::Complex64;
use crate::error::{Error, Result};
use crate::lattice::{inner_product, pairwise_sum, Field, LatticeWindow};
use crate::sparse::SparseMatrix;
use crate::weights::{WeightSpec, WeightTable};

type C = Complex64;

/// S = (B + Bᴴ)/2 and A = (B − Bᴴ)/2 for B = w(iΔ_d)w⁻¹ on a window.
#[derive(Debug, Clone)]
pub struct ConjugatedOperators {
    pub weight: WeightSpec,
    pub window: LatticeWindow,
    pub s: SparseMatrix,
    pub a: SparseMatrix,
}

/// Entries for the pair (j, m) of neighbors with d = w_j − w_m: B_jm = i e^d,
/// so S_jm = i sinh d and A_jm = i cosh d; the diagonal −2d·i goes to A.
pub fn assemble(spec: &WeightSpec, window: &LatticeWindow) -> Result<ConjugatedOperators> {
    let table = WeightTable::new(spec, window)?;
    let lw = table.log_weights();
    let n = window.len();
    let dim = window.dim();
    let mut s_rows = vec![Vec::with_capacity(2 * dim); n];
    let mut a_rows = vec![Vec::with_capacity(2 * dim + 1); n];
    for i in 0..n {
        a_rows[i].push((i, C::new(0.0, -2.0 * dim as f64)));
        let site = window.site(i);
        for k in 0..dim {
            let mut up = site;
            up[k] += 1;
            let Some(m) = window.index(&up) else { continue };
            let d = lw[i] - lw[m];
            let (s, a) = (C::new(0.0, d.sinh()), C::new(0.0, d.cosh()));
            if !a.im.is_finite() {
                return Err(Error::WeightOverflow(format!("weight ratio e^{d} between {site:?} and {up:?}")));
            }
            // S Hermitian, A skew-Hermitian by construction.
            s_rows[i].push((m, s));
            s_rows[m].push((i, s.conj()));
            a_rows[i].push((m, a));
            a_rows[m].push((i, -a.conj()));
        }
    }
    Ok(ConjugatedOperators {
        weight: spec.clone(),
        window: window.clone(),
        s: SparseMatrix::from_rows(s_rows),
        a: SparseMatrix::from_rows(a_rows),
    })
}

fn check_inner(f: &Field, w: &LatticeWindow) -> Result<()> {
    if f.window() != w {
        return Err(Error::WindowMismatch);
    }
    if !f.supported_in_inner_half() {
        return Err(Error::SupportTooWide);
    }
    Ok(())
}

/// ⟨(SA − AS)f, f⟩ for f supported in the inner half of the window. The
/// imaginary part must vanish to 1e−12 of the term scale.
pub fn commutator_form(ops: &ConjugatedOperators, f: &Field) -> Result<f64> {
    check_inner(f, &ops.window)?;
    let x = f.values();
    let sa = ops.s.matvec(&ops.a.matvec(x));
    let as_ = ops.a.matvec(&ops.s.matvec(x));
    let diff: Vec<C> = sa.iter().zip(&as_).map(|(p, q)| p - q).collect();
    let g = Field::from_values(ops.window.clone(), diff, 0.0)?;
    let z = inner_product(&g, f)?;
    let scale = {
        let n = |v: &[C]| v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        (n(&sa) + n(&as_)) * f.norm()
    };
    if z.im.abs() > 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::ComplexResidue { residue: z.im / scale });
    }
    Ok(z.re)
}

/// sinh(2λ)ΣΣ|f_{j+e_k} − f_{j−e_k}|² + 2sinh(2λ)ΣΣ(cosh(4λj_k) − 1)|f_j|².
pub fn gaussian_closed_form(lambda: f64, f: &Field) -> Result<f64> {
    if !f.supported_in_inner_half() {
        return Err(Error::SupportTooWide);
    }
    let w = f.window();
    let sh = (2.0 * lambda).sinh();
    let mut grad = Vec::with_capacity(w.len());
    let mut diag = Vec::with_capacity(w.len());
    for (i, site) in w.sites().enumerate() {
        let v = f.values()[i].norm_sqr();
        for k in 0..w.dim() {
            let (mut up, mut dn) = (site, site);
            up[k] += 1;
            dn[k] -= 1;
            grad.push((f.get(&up) - f.get(&dn)).norm_sqr());
            // cosh(4λj) − 1 = 2 sinh²(2λj), exact near j = 0.
            diag.push(2.0 * (2.0 * lambda * site[k] as f64).sinh().powi(2) * v);
        }
    }
    Ok(sh * pairwise_sum(&grad) + 2.0 * sh * pairwise_sum(&diag))
}
