//! Independent reference computations: the kernel of the degree-`N`
//! polynomial subspace, the two-point series for `K(0,0)`, and the
//! single-factor closed form.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, Cholesky};
use crate::quad::{integrate_disk_vec, QuadConfig};
use crate::weight::WeightSpec;

pub const DEFAULT_TRUNCATION: usize = 50;
const MAX_SERIES_TERMS: usize = 1_000_000;
/// The monomial Gram matrix is far worse conditioned than the origin
/// systems; only outright breakdown is rejected.
const MAX_MONOMIAL_CONDITION: f64 = 1e14;

/// Reproducing kernel of the polynomials of degree `<= N` in `A²_h`,
/// `K_N(z,ζ) = Σ_i φ_i(z) conj(φ_i(ζ))` with `φ = L⁻¹ (1, z, ..., z^N)` and
/// `G = L Lᴴ` the monomial Gram matrix `G_mn = ⟨z^m, z^n⟩`.
#[derive(Debug, Clone)]
pub struct TruncatedKernel {
    spec: WeightSpec,
    degree: usize,
    chol: Cholesky,
}

impl TruncatedKernel {
    /// Integrates the Gram matrix at `cfg.abs_tol / 100`.
    pub fn new(spec: &WeightSpec, degree: usize, cfg: &QuadConfig) -> Result<Self> {
        let tight = QuadConfig {
            abs_tol: cfg.abs_tol / 100.0,
            ..*cfg
        };
        let n = degree + 1;
        let pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|m| (0..=m).map(move |k| (m, k))).collect();
        let values = integrate_disk_vec(
            pairs.len(),
            |z, out: &mut [Complex64]| {
                let mut pw = Vec::with_capacity(n);
                let mut acc = Complex64::new(1.0, 0.0);
                for _ in 0..n {
                    pw.push(acc);
                    acc *= z;
                }
                for (o, &(m, k)) in out.iter_mut().zip(&pairs) {
                    *o = pw[m] * pw[k].conj();
                }
            },
            Some(spec),
            &tight,
        )?;
        let mut g = CMatrix::zeros(n, n);
        for (v, &(m, k)) in values.into_iter().zip(&pairs) {
            g[(m, k)] = v;
            g[(k, m)] = v.conj();
        }
        let chol = Cholesky::new(&g.hermitize(), MAX_MONOMIAL_CONDITION)?;
        Ok(TruncatedKernel {
            spec: spec.clone(),
            degree,
            chol,
        })
    }

    pub fn spec(&self) -> &WeightSpec {
        &self.spec
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn gram_condition(&self) -> f64 {
        self.chol.condition()
    }

    fn basis(&self, z: Complex64) -> Vec<Complex64> {
        let mut u = Vec::with_capacity(self.degree + 1);
        let mut acc = Complex64::new(1.0, 0.0);
        for _ in 0..=self.degree {
            u.push(acc);
            acc *= z;
        }
        self.chol.forward(&u)
    }

    pub fn eval(&self, z: Complex64, zeta: Complex64) -> Complex64 {
        let y = self.basis(z);
        let w = self.basis(zeta);
        y.iter().zip(&w).map(|(a, b)| a * b.conj()).sum()
    }

    /// `K_N^{(k,j)}(0,0) / (k! j!)`, the coefficient of `z^k ζ̄^j`.
    pub fn scaled_origin_derivatives(&self, size: usize) -> CMatrix {
        let n = self.degree + 1;
        assert!(size <= n);
        let cols: Vec<Vec<Complex64>> = (0..size)
            .map(|k| {
                let mut e = vec![Complex64::new(0.0, 0.0); n];
                e[k] = Complex64::new(1.0, 0.0);
                self.chol.forward(&e)
            })
            .collect();
        CMatrix::from_fn(size, size, |k, j| {
            cols[k].iter().zip(&cols[j]).map(|(a, b)| a * b.conj()).sum()
        })
    }
}

/// `K(0,0)` for two factors from the hypergeometric-type series
///
/// `1 + A_1 + A_2 + |a_1 - a_2|^2 Σ j t_j / Σ t_j`,
/// `t_j = C(p_1/2, j) C(p_2/2, j) λ^j`,
/// `λ = (1-|a_1|^2)(1-|a_2|^2) / |1 - a_1 ā_2|^2`.
///
/// Both sums stop once a rigorous tail bound falls below `series_tol`.
pub fn hansbo_k00(a1: Complex64, a2: Complex64, p1: f64, p2: f64, series_tol: f64) -> Result<f64> {
    for (a, p) in [(a1, p1), (a2, p2)] {
        if !(a.norm() < 1.0) || !(p > -2.0) || !p.is_finite() {
            return Err(Error::DomainViolation(format!(
                "need |a| < 1 and p > -2, got a = {a}, p = {p}"
            )));
        }
    }
    if !(series_tol > 0.0) {
        return Err(Error::InvalidInput("series_tol must be positive".into()));
    }
    let w1 = 1.0 - a1.norm_sqr();
    let w2 = 1.0 - a2.norm_sqr();
    let amps = 0.5 * p1 * w1 + 0.5 * p2 * w2;
    let gap = (a1 - a2).norm_sqr();
    if gap == 0.0 {
        return Ok(1.0 + amps);
    }
    let lambda = w1 * w2 / (Complex64::new(1.0, 0.0) - a1 * a2.conj()).norm_sqr();
    let (alpha, beta) = (0.5 * p1, 0.5 * p2);
    let start = alpha.max(beta).max(0.0).ceil() as usize;

    let mut t = 1.0;
    let mut den = 0.0;
    let mut num = 0.0;
    for j in 0..MAX_SERIES_TERMS {
        den += t;
        num += j as f64 * t;
        let jf = j as f64;
        let next = t * (alpha - jf) * (beta - jf) / ((jf + 1.0) * (jf + 1.0)) * lambda;
        if next == 0.0 {
            return Ok(1.0 + amps + gap * num / den);
        }
        if j >= start {
            // Past max(α, β) successive ratios are at most λ, and the
            // weighted terms (j+1) t_{j+1} shrink by at most λ (J+2)/(J+1).
            let tail_den = next.abs() / (1.0 - lambda);
            let rho = lambda * (jf + 2.0) / (jf + 1.0);
            let tail_num = if rho < 1.0 {
                (jf + 1.0) * next.abs() / (1.0 - rho)
            } else {
                f64::INFINITY
            };
            // Error of num/den from both tails, first order.
            let err = gap * (tail_num + (num / den).abs() * tail_den) / den.abs();
            if err < series_tol {
                return Ok(1.0 + amps + gap * (num + (jf + 1.0) * next) / (den + next));
            }
        }
        t = next;
    }
    Err(Error::ToleranceNotMet {
        estimate: vec![Complex64::new(1.0 + amps + gap * num / den, 0.0)],
        error_bound: f64::INFINITY,
        tolerance: series_tol,
    })
}

/// Single-factor kernel
/// `1/(1-zζ̄)^2 + (p/2)(1-|a|^2) / ((1-zζ̄)(1-zā)(1-aζ̄))`.
pub fn closed_form_s1(a: Complex64, p: f64, z: Complex64, zeta: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let u = one - z * zeta.conj();
    one / (u * u)
        + 0.5 * p * (1.0 - a.norm_sqr()) / (u * (one - z * a.conj()) * (one - a * zeta.conj()))
}
