//! Scaled derivatives `κ_kj = K^{(k,j)}(0,0) / (k! j!)` of the kernel at the
//! origin, `0 <= k, j <= s-2`.
//!
//! For every `k` they satisfy
//! `Σ_j κ_kj ⟨T_n, T_j⟩ = δ_nk - ⟨T_n, P_k⟩`, `0 <= n <= s-2`,
//! where `⟨f, g⟩ = ∫ f conj(g) |q*|^{-2} h dσ`. The Gram matrix is
//! Hermitian positive definite, so one Cholesky factorization serves every
//! right-hand side.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::json::matrix_to_json;
use crate::linalg::{CMatrix, Cholesky};
use crate::poly::{ComplexPoly, PolySet};
use crate::quad::{integrate_singular, QuadConfig};
use crate::weight::WeightSpec;

/// Gram systems with a larger condition estimate are rejected.
pub const MAX_GRAM_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct OriginDerivatives {
    /// `(s-1) × (s-1)`, exactly Hermitian.
    pub kappa: CMatrix,
    /// `max |κ - κᴴ|` of the raw solution, before symmetrization.
    pub hermitian_residual: f64,
    /// Condition estimate of the Gram matrix (1 when there is no system).
    pub gram_condition: f64,
}

impl OriginDerivatives {
    pub fn empty() -> Self {
        OriginDerivatives {
            kappa: CMatrix::zeros(0, 0),
            hermitian_residual: 0.0,
            gram_condition: 1.0,
        }
    }

    /// Matrix size `s - 1` (0 when `s = 1`).
    pub fn dim(&self) -> usize {
        self.kappa.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.dim() == 0
    }

    pub fn kappa(&self, k: usize, j: usize) -> Complex64 {
        self.kappa[(k, j)]
    }

    /// `K^{(k,j)}(0,0)`, i.e. `κ_kj · k! · j!`.
    pub fn raw(&self, k: usize, j: usize) -> Complex64 {
        self.kappa[(k, j)] * (factorial(k) * factorial(j))
    }

    pub fn raw_matrix(&self) -> CMatrix {
        CMatrix::from_fn(self.dim(), self.dim(), |k, j| self.raw(k, j))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "kappa": matrix_to_json(&self.kappa.to_rows()),
            "raw": matrix_to_json(&self.raw_matrix().to_rows()),
            "hermitian_residual": self.hermitian_residual,
            "gram_condition": self.gram_condition,
        })
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// `⟨T_n, T_j⟩` for the weight's `T` polynomials.
pub fn gram_matrix(spec: &WeightSpec, cfg: &QuadConfig) -> Result<CMatrix> {
    let polys = PolySet::new(spec.roots()?);
    if polys.s() < 2 {
        return Err(Error::IndexViolation { index: 0, max: -1 });
    }
    gram_of(&polys.t, &polys.q_star, Some(spec), cfg)
}

/// Hermitized Gram matrix of `basis` under `|q*|^{-2} h dσ`; `spec = None`
/// means `h ≡ 1`. Only the lower triangle is integrated.
pub fn gram_of(
    basis: &[ComplexPoly],
    q_star: &ComplexPoly,
    spec: Option<&WeightSpec>,
    cfg: &QuadConfig,
) -> Result<CMatrix> {
    let m = basis.len();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|n| (0..=n).map(move |j| (n, j))).collect();
    let singular = spec.map(WeightSpec::singularities).unwrap_or_default();
    let values = integrate_singular(
        pairs.len(),
        |z, out: &mut [Complex64]| {
            let w = spec.map_or(1.0, |s| s.eval_unchecked(z)) / q_star.eval(z).norm_sqr();
            let t: Vec<Complex64> = basis.iter().map(|p| p.eval(z)).collect();
            for (o, &(n, j)) in out.iter_mut().zip(&pairs) {
                *o = t[n] * t[j].conj() * w;
            }
        },
        &singular,
        cfg,
    )?;
    let mut g = CMatrix::zeros(m, m);
    for (v, &(n, j)) in values.into_iter().zip(&pairs) {
        g[(n, j)] = v;
        g[(j, n)] = v.conj();
    }
    Ok(g.hermitize())
}

/// `δ_nk - ⟨T_n, P_k⟩` for `n = 0..=s-2`.
pub fn rhs_vector(spec: &WeightSpec, k: usize, cfg: &QuadConfig) -> Result<Vec<Complex64>> {
    let polys = PolySet::new(spec.roots()?);
    let p_k = polys.p_poly(&spec.amplitudes(), k)?;
    let products = tp_products(&polys, &[p_k], spec, cfg)?;
    Ok((0..polys.t.len())
        .map(|n| delta(n, k) - products[n][0])
        .collect())
}

fn delta(n: usize, k: usize) -> Complex64 {
    Complex64::new(if n == k { 1.0 } else { 0.0 }, 0.0)
}

/// `⟨T_n, P_k⟩` for every `n` and every `P_k` in `p`.
fn tp_products(
    polys: &PolySet,
    p: &[ComplexPoly],
    spec: &WeightSpec,
    cfg: &QuadConfig,
) -> Result<Vec<Vec<Complex64>>> {
    let m = polys.t.len();
    let cols = p.len();
    let values = integrate_singular(
        m * cols,
        |z, out: &mut [Complex64]| {
            let w = spec.eval_unchecked(z) / polys.q_star.eval(z).norm_sqr();
            let pv: Vec<Complex64> = p.iter().map(|pk| pk.eval(z).conj() * w).collect();
            for n in 0..m {
                let t = polys.t[n].eval(z);
                for k in 0..cols {
                    out[n * cols + k] = t * pv[k];
                }
            }
        },
        &spec.singularities(),
        cfg,
    )?;
    Ok(values.chunks(cols).map(<[_]>::to_vec).collect())
}

/// Assembles and solves every origin system. Returns an empty result for
/// `s = 1`.
pub fn solve_origin_derivatives(spec: &WeightSpec, cfg: &QuadConfig) -> Result<OriginDerivatives> {
    let polys = PolySet::new(spec.roots()?);
    solve_with_polys(spec, &polys, cfg)
}

pub(crate) fn solve_with_polys(
    spec: &WeightSpec,
    polys: &PolySet,
    cfg: &QuadConfig,
) -> Result<OriginDerivatives> {
    let s = polys.s();
    if s < 2 {
        return Ok(OriginDerivatives::empty());
    }
    let m = s - 1;
    let amps = spec.amplitudes();
    let p: Vec<ComplexPoly> = (0..m)
        .map(|k| polys.p_poly(&amps, k))
        .collect::<Result<_>>()?;

    // One pass over the disk for the Gram matrix and every ⟨T_n, P_k⟩.
    let gram_pairs: Vec<(usize, usize)> =
        (0..m).flat_map(|n| (0..=n).map(move |j| (n, j))).collect();
    let ng = gram_pairs.len();
    let values = integrate_singular(
        ng + m * m,
        |z, out: &mut [Complex64]| {
            let w = spec.eval_unchecked(z) / polys.q_star.eval(z).norm_sqr();
            let t: Vec<Complex64> = polys.t.iter().map(|p| p.eval(z)).collect();
            let pv: Vec<Complex64> = p.iter().map(|pk| pk.eval(z).conj()).collect();
            for (o, &(n, j)) in out[..ng].iter_mut().zip(&gram_pairs) {
                *o = t[n] * t[j].conj() * w;
            }
            for n in 0..m {
                for k in 0..m {
                    out[ng + n * m + k] = t[n] * pv[k] * w;
                }
            }
        },
        &spec.singularities(),
        cfg,
    )?;
    let mut gram = CMatrix::zeros(m, m);
    for (v, &(n, j)) in values[..ng].iter().zip(&gram_pairs) {
        gram[(n, j)] = *v;
        gram[(j, n)] = v.conj();
    }
    let gram = gram.hermitize();
    let chol = Cholesky::new(&gram, MAX_GRAM_CONDITION)?;

    // Row k of κ solves G_{n,j} κ_{k,j} = rhs_n, i.e. G x = rhs with x_j = κ_kj.
    let rows: Vec<Vec<Complex64>> = (0..m)
        .into_par_iter()
        .map(|k| {
            let rhs: Vec<Complex64> = (0..m)
                .map(|n| delta(n, k) - values[ng + n * m + k])
                .collect();
            chol.solve(&rhs)
        })
        .collect();
    let raw = CMatrix::from_rows(&rows);
    let hermitian_residual = raw.hermitian_residual();
    let kappa = raw.hermitize();
    if !(kappa[(0, 0)].re > 0.0) {
        return Err(Error::IllConditioned {
            condition: chol.condition(),
            reason: format!("K(0,0) = {} is not positive", kappa[(0, 0)].re),
        });
    }
    Ok(OriginDerivatives {
        kappa,
        hermitian_residual,
        gram_condition: chol.condition(),
    })
}
