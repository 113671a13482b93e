//! The compiled kernel `K(z, ζ)` and its three closed-form representations.
//!
//! With `A_k = (p_k/2)(1 - |a_k|^2)`,
//!
//! ```text
//! K(z,ζ) = 1/(1 - zζ̄)^2 + Σ_k A_k / ((1 - zζ̄)(1 - z ā_k)(1 - a_k ζ̄))
//!        + J(z,ζ) / (conj(q*(ζ)) q*(z))
//! J(z,ζ) = Σ_{k,j} κ_kj T_k(z) conj(T_j(ζ)) - Σ_k (k+1) T_k(z) conj(T_k(ζ))
//!        - Σ_k A_k L_k(z,ζ)
//! ```

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::Result;
use crate::json::matrix_to_json;
use crate::linalg::{CMatrix, Lu};
use crate::origin::{solve_with_polys, OriginDerivatives};
use crate::poly::{blaschke_eval, build_l, sub_blaschke_eval, LEvaluator, PolySet};
use crate::quad::QuadConfig;
use crate::weight::WeightSpec;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Immutable kernel model for one weight. The two lazily built matrices
/// are initialized at most once and are safe to share across threads.
#[derive(Debug)]
pub struct KernelModel {
    spec: WeightSpec,
    amplitudes: Vec<f64>,
    polys: PolySet,
    l_evals: Vec<LEvaluator>,
    origin: OriginDerivatives,
    d: OnceLock<CMatrix>,
    k_at_roots: OnceLock<CMatrix>,
}

/// Solves the origin systems and assembles the model.
pub fn build_model(spec: &WeightSpec, cfg: &QuadConfig) -> Result<KernelModel> {
    let polys = PolySet::new(spec.roots()?);
    let origin = solve_with_polys(spec, &polys, cfg)?;
    Ok(KernelModel::from_parts(spec.clone(), polys, origin))
}

impl KernelModel {
    /// Assembles a model from precomputed origin derivatives.
    pub fn from_parts(spec: WeightSpec, polys: PolySet, origin: OriginDerivatives) -> Self {
        let s = polys.s();
        assert_eq!(origin.dim(), s.saturating_sub(1), "origin matrix has the wrong size");
        let l_evals = polys.sub.iter().map(|(q_k, _)| build_l(q_k, s)).collect();
        KernelModel {
            amplitudes: spec.amplitudes(),
            spec,
            polys,
            l_evals,
            origin,
            d: OnceLock::new(),
            k_at_roots: OnceLock::new(),
        }
    }

    pub fn spec(&self) -> &WeightSpec {
        &self.spec
    }

    pub fn s(&self) -> usize {
        self.polys.s()
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn polys(&self) -> &PolySet {
        &self.polys
    }

    pub fn origin(&self) -> &OriginDerivatives {
        &self.origin
    }

    /// `K(0,0)`.
    pub fn k00(&self) -> f64 {
        self.eval_at_zero(ZERO).re
    }

    pub fn eval_j(&self, z: Complex64, zeta: Complex64) -> Complex64 {
        let t = &self.polys.t;
        if t.is_empty() {
            return ZERO;
        }
        let tz: Vec<Complex64> = t.iter().map(|p| p.eval(z)).collect();
        let tw: Vec<Complex64> = t.iter().map(|p| p.eval(zeta).conj()).collect();
        let mut j = ZERO;
        for (k, &a) in tz.iter().enumerate() {
            let mut row = ZERO;
            for (i, &b) in tw.iter().enumerate() {
                row += self.origin.kappa(k, i) * b;
            }
            j += a * (row - tw[k] * (k + 1) as f64);
        }
        for (l, &amp) in self.l_evals.iter().zip(&self.amplitudes) {
            if amp != 0.0 {
                j -= l.eval(z, zeta) * amp;
            }
        }
        j
    }

    /// The first two terms of the main formula, shared by the main and
    /// canonical representations.
    fn base_terms(&self, z: Complex64, zeta: Complex64) -> Complex64 {
        let u = ONE - z * zeta.conj();
        let mut k = ONE / (u * u);
        for (f, &amp) in self.spec.factors().iter().zip(&self.amplitudes) {
            if amp != 0.0 {
                k += amp / (u * (ONE - z * f.a.conj()) * (ONE - f.a * zeta.conj()));
            }
        }
        k
    }

    pub fn eval_main(&self, z: Complex64, zeta: Complex64) -> Complex64 {
        let mut k = self.base_terms(z, zeta);
        if !self.polys.t.is_empty() {
            let den = self.polys.q_star.eval(zeta).conj() * self.polys.q_star.eval(z);
            k += self.eval_j(z, zeta) / den;
        }
        k
    }

    /// `d` with `J(z,ζ) = Σ d_kj q*_k(z) conj(q*_j(ζ))`, by matching
    /// monomial coefficients: `J_coeffs = Q d Qᴴ`, `Q_{α,k}` the coefficient
    /// of `z^α` in `q*_k`.
    pub fn d_matrix(&self) -> &CMatrix {
        self.d.get_or_init(|| self.compute_d())
    }

    fn compute_d(&self) -> CMatrix {
        let s = self.s();
        let jc = self.j_coefficients();
        let q = CMatrix::from_fn(s, s, |alpha, k| self.polys.sub[k].1.coeff(alpha));
        let lu = Lu::new(&q).expect("the q*_k are linearly independent for distinct roots");
        // d = Q⁻¹ Jc Q⁻ᴴ = Q⁻¹ (Q⁻¹ Jcᴴ)ᴴ
        let x = lu.solve_matrix(&jc.conj_transpose());
        lu.solve_matrix(&x.conj_transpose()).hermitize()
    }

    /// `J` as `Σ C[α][β] z^α ζ̄^β`, `0 <= α, β <= s-1`.
    pub fn j_coefficients(&self) -> CMatrix {
        let s = self.s();
        let mut c = CMatrix::zeros(s, s);
        let t = &self.polys.t;
        for k in 0..t.len() {
            for j in 0..t.len() {
                let w = self.origin.kappa(k, j) - if k == j { (k + 1) as f64 } else { 0.0 };
                if w == ZERO {
                    continue;
                }
                for (alpha, &a) in t[k].coeffs().iter().enumerate() {
                    for (beta, &b) in t[j].coeffs().iter().enumerate() {
                        c[(alpha, beta)] += w * a * b.conj();
                    }
                }
            }
        }
        for (l, &amp) in self.l_evals.iter().zip(&self.amplitudes) {
            if amp == 0.0 {
                continue;
            }
            for (alpha, row) in l.coefficients(s).iter().enumerate() {
                for (beta, &v) in row.iter().enumerate() {
                    c[(alpha, beta)] -= v * amp;
                }
            }
        }
        c
    }

    pub fn eval_canonical(&self, z: Complex64, zeta: Complex64) -> Complex64 {
        let d = self.d_matrix();
        let roots = self.polys.roots.roots();
        let left: Vec<Complex64> = roots.iter().map(|a| ONE / (ONE - z * a.conj())).collect();
        let right: Vec<Complex64> = roots.iter().map(|a| ONE / (ONE - a * zeta.conj())).collect();
        let mut k = self.base_terms(z, zeta);
        for (i, &l) in left.iter().enumerate() {
            for (j, &r) in right.iter().enumerate() {
                k += d[(i, j)] * l * r;
            }
        }
        k
    }

    /// `K(a_k, a_j)` from the main formula, Hermitized.
    pub fn k_at_roots(&self) -> &CMatrix {
        self.k_at_roots.get_or_init(|| {
            let a = self.polys.roots.roots();
            CMatrix::from_fn(a.len(), a.len(), |k, j| self.eval_main(a[k], a[j])).hermitize()
        })
    }

    /// Blaschke-product representation, built from the kernel values at the
    /// roots.
    pub fn eval_mgs(&self, z: Complex64, zeta: Complex64) -> Complex64 {
        let roots = &self.polys.roots;
        let a = roots.roots();
        let kr = self.k_at_roots();
        let x = zeta.conj() * z;
        let u = ONE - x;
        let mut k = blaschke_eval(roots, z) * blaschke_eval(roots, zeta).conj() / (u * u);

        let bz: Vec<Complex64> = (0..a.len()).map(|i| sub_blaschke_eval(roots, i, z)).collect();
        let bw: Vec<Complex64> =
            (0..a.len()).map(|i| sub_blaschke_eval(roots, i, zeta).conj()).collect();
        let mut left = Vec::with_capacity(a.len());
        let mut right = Vec::with_capacity(a.len());
        for (i, (f, &ai)) in self.spec.factors().iter().zip(a).enumerate() {
            let lz = ONE - ai.conj() * z;
            let rw = ONE - ai * zeta.conj();
            k += bz[i] * bw[i] * (x - ai.norm_sqr()) * (0.5 * f.p + 1.0) / (u * lz * rw);
            let w = 1.0 - ai.norm_sqr();
            let b_self = sub_blaschke_eval(roots, i, ai);
            left.push(bz[i] * w / (lz * b_self));
            right.push(bw[i] * w / (rw * b_self.conj()));
        }
        for i in 0..a.len() {
            for j in 0..a.len() {
                k += left[i] * right[j] * kr[(i, j)];
            }
        }
        k
    }

    /// `K(z, 0)` in closed form.
    pub fn eval_at_zero(&self, z: Complex64) -> Complex64 {
        let s = self.s();
        let polys = &self.polys;
        let q_star = polys.q_star.eval(z);
        let mut num = polys.q.coeff(0).conj() * z.powu(s as u32);
        let mut sum = ZERO;
        for ((q_k, _), &amp) in polys.sub.iter().zip(&self.amplitudes) {
            sum += q_k.coeff(0).conj() * (1.0 + amp);
        }
        num += z.powu(s as u32 - 1) * sum;
        for (k, t) in polys.t.iter().enumerate() {
            num += self.origin.kappa(k, 0) * t.eval(z);
        }
        num / q_star
    }

    /// `{"spec": ..., "kappa": ..., "d": ...}`; `d` only when requested.
    pub fn to_json(&self, include_d: bool) -> serde_json::Value {
        let mut v = serde_json::json!({
            "spec": self.spec,
            "kappa": matrix_to_json(&self.origin.kappa.to_rows()),
            "hermitian_residual": self.origin.hermitian_residual,
            "gram_condition": self.origin.gram_condition,
        });
        if include_d {
            v["d"] = matrix_to_json(&self.d_matrix().to_rows());
        }
        v
    }
}
