//! Dense complex polynomials and the polynomial families the kernel formula
//! is assembled from.
//!
//! For roots `a_1, ..., a_s` in the unit disk we write
//!
//! * `q(z)  = ∏ (z - a_k)`, with coefficients `c_0, ..., c_s` (`c_s = 1`),
//! * `q*(z) = z^s conj(q(1/conj z)) = ∏ (1 - conj(a_k) z)`,
//! * `q_k`, `q*_k` for the same products with the `k`-th factor left out.
//!
//! Everything else (`T_k`, `L_k`, `P_n`) is built from these coefficients.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Separation below which two roots are reported as near-coincident.
pub const DEFAULT_MIN_SEPARATION: f64 = 1e-8;

/// Polynomial with complex coefficients, stored by ascending power.
///
/// Trailing exact zeros are dropped on construction; the zero polynomial is
/// stored as the single coefficient `0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPoly {
    coeffs: Vec<Complex64>,
}

impl ComplexPoly {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && coeffs[coeffs.len() - 1] == ZERO {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(ZERO);
        }
        ComplexPoly { coeffs }
    }

    pub fn zero() -> Self {
        ComplexPoly { coeffs: vec![ZERO] }
    }

    pub fn one() -> Self {
        ComplexPoly { coeffs: vec![ONE] }
    }

    /// `z^k`.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![ZERO; k + 1];
        coeffs[k] = ONE;
        ComplexPoly { coeffs }
    }

    /// `z - a`.
    pub fn linear(a: Complex64) -> Self {
        ComplexPoly::new(vec![-a, ONE])
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `z^i`, zero beyond the degree.
    pub fn coeff(&self, i: usize) -> Complex64 {
        self.coeffs.get(i).copied().unwrap_or(ZERO)
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == ZERO
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> ComplexPoly {
        if self.coeffs.len() == 1 {
            return ComplexPoly::zero();
        }
        ComplexPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        )
    }

    pub fn scale(&self, factor: Complex64) -> ComplexPoly {
        ComplexPoly::new(self.coeffs.iter().map(|&c| c * factor).collect())
    }

    /// Multiply by `z^k`.
    pub fn shift(&self, k: usize) -> ComplexPoly {
        if self.is_zero() {
            return ComplexPoly::zero();
        }
        let mut coeffs = vec![ZERO; k];
        coeffs.extend_from_slice(&self.coeffs);
        ComplexPoly { coeffs }
    }

    /// Maclaurin truncation: keep powers `0..=max_degree`.
    pub fn truncate(&self, max_degree: usize) -> ComplexPoly {
        let end = (max_degree + 1).min(self.coeffs.len());
        ComplexPoly::new(self.coeffs[..end].to_vec())
    }

    /// `z^s conj(p(1/conj z))`: coefficient `l` of the result is
    /// `conj(c_{s-l})`. Requires `degree <= s`.
    pub fn reverse(&self, s: usize) -> ComplexPoly {
        assert!(
            self.degree() <= s,
            "reverse: degree {} exceeds {}",
            self.degree(),
            s
        );
        ComplexPoly::new((0..=s).map(|l| self.coeff(s - l).conj()).collect())
    }

    /// Synthetic division by `z - a`; returns `(quotient, remainder)`.
    pub fn divide_linear(&self, a: Complex64) -> (ComplexPoly, Complex64) {
        let n = self.coeffs.len();
        if n == 1 {
            return (ComplexPoly::zero(), self.coeffs[0]);
        }
        let mut quotient = vec![ZERO; n - 1];
        let mut carry = ZERO;
        for i in (0..n).rev() {
            let value = self.coeffs[i] + carry * a;
            if i == 0 {
                return (ComplexPoly::new(quotient), value);
            }
            quotient[i - 1] = value;
            carry = value;
        }
        unreachable!()
    }

    /// Maclaurin coefficients `0..len` of `self / den`; requires `den(0) != 0`.
    pub fn series_div(&self, den: &ComplexPoly, len: usize) -> Vec<Complex64> {
        let d0 = den.coeff(0);
        assert!(d0 != ZERO, "series_div: denominator vanishes at 0");
        let mut out = vec![ZERO; len];
        for n in 0..len {
            let mut acc = self.coeff(n);
            for (i, &d) in den.coeffs.iter().enumerate().skip(1).take(n) {
                acc -= d * out[n - i];
            }
            out[n] = acc / d0;
        }
        out
    }
}

impl Add for &ComplexPoly {
    type Output = ComplexPoly;
    fn add(self, rhs: &ComplexPoly) -> ComplexPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ComplexPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &ComplexPoly {
    type Output = ComplexPoly;
    fn sub(self, rhs: &ComplexPoly) -> ComplexPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ComplexPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &ComplexPoly {
    type Output = ComplexPoly;
    fn mul(self, rhs: &ComplexPoly) -> ComplexPoly {
        let mut out = vec![ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ComplexPoly::new(out)
    }
}

impl Neg for &ComplexPoly {
    type Output = ComplexPoly;
    fn neg(self) -> ComplexPoly {
        self.scale(-ONE)
    }
}

/// Pairwise distinct points of the open unit disk.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    roots: Vec<Complex64>,
}

impl RootSet {
    pub fn new(roots: Vec<Complex64>) -> Result<Self> {
        for (i, a) in roots.iter().enumerate() {
            if !(a.re.is_finite() && a.im.is_finite()) || a.norm() >= 1.0 {
                return Err(Error::DomainViolation(format!(
                    "root {i} = {a} must lie in the open unit disk"
                )));
            }
        }
        for i in 0..roots.len() {
            for j in (i + 1)..roots.len() {
                if roots[i] == roots[j] {
                    return Err(Error::DistinctnessViolation {
                        first: i,
                        second: j,
                        point: roots[i],
                    });
                }
            }
        }
        Ok(RootSet { roots })
    }

    pub fn roots(&self) -> &[Complex64] {
        &self.roots
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Smallest pairwise distance, `+inf` for fewer than two roots.
    pub fn min_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.roots.len() {
            for j in (i + 1)..self.roots.len() {
                best = best.min((self.roots[i] - self.roots[j]).norm());
            }
        }
        best
    }

    /// Roots closer than `threshold` make the Gram systems ill-conditioned.
    pub fn is_near_coincident(&self, threshold: f64) -> bool {
        self.min_separation() < threshold
    }
}

/// Monic `q(z) = ∏ (z - a_k)`.
pub fn from_roots(roots: &RootSet) -> ComplexPoly {
    roots
        .roots()
        .iter()
        .fold(ComplexPoly::one(), |acc, &a| &acc * &ComplexPoly::linear(a))
}

/// `q*(z) = z^s conj(q(1/conj z))`.
pub fn reverse(q: &ComplexPoly, s: usize) -> ComplexPoly {
    q.reverse(s)
}

/// `(q_k, q*_k)` for every `k`, where `q_k = q / (z - a_k)` exactly.
pub fn subproducts(roots: &RootSet) -> Vec<(ComplexPoly, ComplexPoly)> {
    let q = from_roots(roots);
    let s = roots.len();
    roots
        .roots()
        .iter()
        .map(|&a| {
            let (qk, _) = q.divide_linear(a);
            let qk_star = qk.reverse(s - 1);
            (qk, qk_star)
        })
        .collect()
}

/// `T_k(z) = z^k Σ_{l=0}^{s-2-k} conj(c_{s-l}) z^l`, i.e. `z^k` times the
/// Maclaurin truncation of `q*` to degree `s-2-k`.
pub fn build_t(q_star: &ComplexPoly, s: usize, k: usize) -> Result<ComplexPoly> {
    if s < 2 || k > s - 2 {
        return Err(Error::IndexViolation {
            index: k,
            max: s as isize - 2,
        });
    }
    Ok(q_star.truncate(s - 2 - k).shift(k))
}

/// Evaluator for `L_k(z, ζ) = Σ_r F_r(z) conj(F_r(ζ))` with
/// `F_r(z) = z^r Σ_{l=0}^{s-2-r} conj(c_{k,s-1-l}) z^l`.
///
/// Empty for `s = 1`, in which case `L_k ≡ 0`.
#[derive(Debug, Clone)]
pub struct LEvaluator {
    factors: Vec<ComplexPoly>,
}

impl LEvaluator {
    pub fn eval(&self, z: Complex64, zeta: Complex64) -> Complex64 {
        self.factors
            .iter()
            .map(|f| f.eval(z) * f.eval(zeta).conj())
            .sum()
    }

    pub fn factors(&self) -> &[ComplexPoly] {
        &self.factors
    }

    /// Coefficient matrix `M` (size `dim × dim`) with
    /// `L(z, ζ) = Σ M[α][β] z^α conj(ζ)^β`.
    pub fn coefficients(&self, dim: usize) -> Vec<Vec<Complex64>> {
        let mut m = vec![vec![ZERO; dim]; dim];
        for f in &self.factors {
            for (alpha, row) in m.iter_mut().enumerate() {
                let fa = f.coeff(alpha);
                if fa == ZERO {
                    continue;
                }
                for (beta, entry) in row.iter_mut().enumerate() {
                    *entry += fa * f.coeff(beta).conj();
                }
            }
        }
        m
    }
}

/// `L_k` from the subproduct `q_k` (degree `s-1`).
pub fn build_l(q_k: &ComplexPoly, s: usize) -> LEvaluator {
    if s < 2 {
        return LEvaluator {
            factors: Vec::new(),
        };
    }
    let qk_star = q_k.reverse(s - 1);
    let factors = (0..=s - 2)
        .map(|r| qk_star.truncate(s - 2 - r).shift(r))
        .collect();
    LEvaluator { factors }
}

/// Every polynomial the kernel formula needs, derived once from the roots.
#[derive(Debug, Clone)]
pub struct PolySet {
    pub roots: RootSet,
    pub q: ComplexPoly,
    pub q_star: ComplexPoly,
    /// `(q_k, q*_k)` per root.
    pub sub: Vec<(ComplexPoly, ComplexPoly)>,
    /// `T_0, ..., T_{s-2}`; empty for `s = 1`.
    pub t: Vec<ComplexPoly>,
}

impl PolySet {
    pub fn new(roots: RootSet) -> Self {
        let s = roots.len();
        let q = from_roots(&roots);
        let q_star = q.reverse(s);
        let sub = subproducts(&roots);
        let t = if s >= 2 {
            (0..=s - 2)
                .map(|k| build_t(&q_star, s, k).expect("k in range"))
                .collect()
        } else {
            Vec::new()
        };
        PolySet {
            roots,
            q,
            q_star,
            sub,
            t,
        }
    }

    pub fn s(&self) -> usize {
        self.roots.len()
    }

    /// `P_n` for amplitudes `A_k = (p_k/2)(1 - |a_k|^2)`.
    ///
    /// The conjugate form is
    /// `conj(P_n(ζ)) = (n+1) c_0 ζ̄^{s+n} + ζ̄^{s-1} Σ_{j=0}^{n} b_{n,j} ζ̄^j` with
    /// `b_{n,j} = (n+1) c_{n+1-j} + Σ_k A_k Σ_{r=0}^{n-j} conj(a_k)^r c_{k,n-j-r}`.
    pub fn p_poly(&self, amplitudes: &[f64], n: usize) -> Result<ComplexPoly> {
        let s = self.s();
        if s < 2 || n > s - 2 {
            return Err(Error::IndexViolation {
                index: n,
                max: s as isize - 2,
            });
        }
        assert_eq!(amplitudes.len(), s, "one amplitude per root");
        let c = self.q.coeffs();
        let mut coeffs = vec![ZERO; s + n + 1];
        coeffs[s + n] = (c[0] * (n + 1) as f64).conj();
        for j in 0..=n {
            let mut b = c[n + 1 - j] * (n + 1) as f64;
            for ((a, (qk, _)), &amp) in self.roots.roots().iter().zip(&self.sub).zip(amplitudes) {
                if amp == 0.0 {
                    continue;
                }
                let a_bar = a.conj();
                let mut inner = ZERO;
                let mut pow = ONE;
                for r in 0..=(n - j) {
                    inner += pow * qk.coeff(n - j - r);
                    pow *= a_bar;
                }
                b += inner * amp;
            }
            coeffs[s - 1 + j] = b.conj();
        }
        Ok(ComplexPoly::new(coeffs))
    }
}

/// `P_n` for a weight; see [`PolySet::p_poly`].
pub fn build_p(spec: &crate::weight::WeightSpec, n: usize) -> Result<ComplexPoly> {
    let polys = PolySet::new(spec.roots()?);
    polys.p_poly(&spec.amplitudes(), n)
}

/// `B(z) = q(z) / q*(z) = ∏ (z - a_k) / (1 - conj(a_k) z)`.
pub fn blaschke_eval(roots: &RootSet, z: Complex64) -> Complex64 {
    roots
        .roots()
        .iter()
        .map(|&a| (z - a) / (ONE - a.conj() * z))
        .product()
}

/// `B_k(z)`: the Blaschke product with the `k`-th factor removed.
pub fn sub_blaschke_eval(roots: &RootSet, k: usize, z: Complex64) -> Complex64 {
    roots
        .roots()
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != k)
        .map(|(_, &a)| (z - a) / (ONE - a.conj() * z))
        .product()
}
