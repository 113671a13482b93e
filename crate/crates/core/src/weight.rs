//! Blaschke-power weights `h(z) = ∏ |(z - a_k) / (1 - conj(a_k) z)|^{p_k}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::complex_pair;
use crate::poly::RootSet;
use crate::quad::Singularity;

/// One factor `|(z - a) / (1 - conj(a) z)|^p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightFactor {
    #[serde(with = "complex_pair")]
    pub a: Complex64,
    pub p: f64,
}

/// The weight `h`, a finite product of Blaschke-factor powers.
///
/// Invariants: the `a_k` are pairwise distinct points of the open disk and
/// every `p_k > -2` (so `h` is integrable).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWeight", into = "RawWeight")]
pub struct WeightSpec {
    factors: Vec<WeightFactor>,
}

#[derive(Serialize, Deserialize)]
struct RawWeight {
    factors: Vec<WeightFactor>,
}

impl TryFrom<RawWeight> for WeightSpec {
    type Error = Error;
    fn try_from(raw: RawWeight) -> Result<Self> {
        WeightSpec::new(raw.factors)
    }
}

impl From<WeightSpec> for RawWeight {
    fn from(spec: WeightSpec) -> Self {
        RawWeight {
            factors: spec.factors,
        }
    }
}

impl WeightSpec {
    pub fn new(factors: Vec<WeightFactor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidInput(
                "a weight needs at least one factor".into(),
            ));
        }
        for (k, f) in factors.iter().enumerate() {
            if !f.p.is_finite() || f.p <= -2.0 {
                return Err(Error::DomainViolation(format!(
                    "exponent p_{k} = {} must be finite and > -2",
                    f.p
                )));
            }
        }
        // Validates the points themselves.
        RootSet::new(factors.iter().map(|f| f.a).collect())?;
        Ok(WeightSpec { factors })
    }

    /// Convenience constructor from `(a_k, p_k)` pairs.
    pub fn from_pairs(pairs: &[(Complex64, f64)]) -> Result<Self> {
        WeightSpec::new(
            pairs
                .iter()
                .map(|&(a, p)| WeightFactor { a, p })
                .collect(),
        )
    }

    pub fn factors(&self) -> &[WeightFactor] {
        &self.factors
    }

    /// Number of factors `s`.
    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn points(&self) -> Vec<Complex64> {
        self.factors.iter().map(|f| f.a).collect()
    }

    pub fn exponents(&self) -> Vec<f64> {
        self.factors.iter().map(|f| f.p).collect()
    }

    pub fn roots(&self) -> Result<RootSet> {
        RootSet::new(self.points())
    }

    /// `A_k = (p_k / 2)(1 - |a_k|^2)`.
    pub fn amplitudes(&self) -> Vec<f64> {
        self.factors
            .iter()
            .map(|f| 0.5 * f.p * (1.0 - f.a.norm_sqr()))
            .collect()
    }

    /// True when every exponent vanishes, i.e. `h ≡ 1`.
    pub fn is_trivial(&self) -> bool {
        self.factors.iter().all(|f| f.p == 0.0)
    }

    /// Same weight with every point rotated by `e^{iθ}`.
    pub fn rotated(&self, theta: f64) -> WeightSpec {
        let w = Complex64::from_polar(1.0, theta);
        WeightSpec {
            factors: self
                .factors
                .iter()
                .map(|f| WeightFactor { a: f.a * w, p: f.p })
                .collect(),
        }
    }

    /// Points where `h` is not smooth, for the quadrature.
    pub fn singularities(&self) -> Vec<Singularity> {
        self.factors
            .iter()
            .filter(|f| f.p != 0.0)
            .map(|f| Singularity {
                center: f.a,
                exponent: f.p,
            })
            .collect()
    }

    /// `h(z)` without the domain check. At `z = a_k` the factor contributes
    /// `0` (`p_k > 0`), `+inf` (`p_k < 0`) or `1` (`p_k = 0`).
    pub fn eval_unchecked(&self, z: Complex64) -> f64 {
        self.factors
            .iter()
            .filter(|f| f.p != 0.0)
            .map(|f| {
                let b = (z - f.a).norm() / (Complex64::new(1.0, 0.0) - f.a.conj() * z).norm();
                b.powf(f.p)
            })
            .product()
    }

    pub fn eval(&self, z: Complex64) -> Result<f64> {
        weight_eval(self, z)
    }
}

/// `h(z)` for `|z| < 1`.
pub fn weight_eval(spec: &WeightSpec, z: Complex64) -> Result<f64> {
    if !(z.norm() < 1.0) {
        return Err(Error::DomainViolation(format!(
            "weight evaluated at {z}, outside the open unit disk"
        )));
    }
    Ok(spec.eval_unchecked(z))
}
