//! Contractive zero divisors of finite `A^p` zero sets:
//! `G(z) = K(0,0)^{-1/p} K(z,0)^{2/p} ∏ B_k(z)^{m_k}`, with `K` the kernel
//! of the weight `∏ |B_k|^{m_k p}`.

use std::f64::consts::TAU;
use std::sync::atomic::{AtomicBool, Ordering};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::complex_pair;
use crate::kernel::{build_model, KernelModel};
use crate::quad::{integrate_singular, QuadConfig, Singularity};
use crate::weight::{WeightFactor, WeightSpec};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `|K(z,0)|` below this on the continuation path is treated as a zero.
pub const BRANCH_FLOOR: f64 = 1e-12;
const MIN_BRANCH_STEP: f64 = 1e-9;
/// Largest phase increment accepted per continuation step.
const MAX_PHASE_STEP: f64 = 0.5;

/// Acceptance thresholds of [`DivisorModel::verify`].
pub const NORM_TOLERANCE: f64 = 1e-5;
pub const ZERO_TOLERANCE: f64 = 1e-10;
pub const AGREEMENT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Zero {
    #[serde(with = "complex_pair")]
    pub a: Complex64,
    pub m: u32,
}

/// A finite zero set with multiplicities, for the space `A^p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawZeroSet", into = "RawZeroSet")]
pub struct ZeroSet {
    p: f64,
    zeros: Vec<Zero>,
}

#[derive(Serialize, Deserialize)]
struct RawZeroSet {
    p: f64,
    zeros: Vec<Zero>,
}

impl TryFrom<RawZeroSet> for ZeroSet {
    type Error = Error;
    fn try_from(raw: RawZeroSet) -> Result<Self> {
        ZeroSet::new(raw.p, raw.zeros)
    }
}

impl From<ZeroSet> for RawZeroSet {
    fn from(z: ZeroSet) -> Self {
        RawZeroSet {
            p: z.p,
            zeros: z.zeros,
        }
    }
}

impl ZeroSet {
    pub fn new(p: f64, zeros: Vec<Zero>) -> Result<Self> {
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::DomainViolation(format!("exponent p = {p} must be > 0")));
        }
        if zeros.is_empty() {
            return Err(Error::InvalidInput("a zero set needs at least one point".into()));
        }
        if let Some(z) = zeros.iter().find(|z| z.m == 0) {
            return Err(Error::InvalidInput(format!(
                "multiplicity of {} must be at least 1",
                z.a
            )));
        }
        let zs = ZeroSet { p, zeros };
        zs.weight()?;
        Ok(zs)
    }

    pub fn from_pairs(p: f64, zeros: &[(Complex64, u32)]) -> Result<Self> {
        ZeroSet::new(p, zeros.iter().map(|&(a, m)| Zero { a, m }).collect())
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn zeros(&self) -> &[Zero] {
        &self.zeros
    }

    /// The weight `∏ |B_k|^{m_k p}`.
    pub fn weight(&self) -> Result<WeightSpec> {
        WeightSpec::new(
            self.zeros
                .iter()
                .map(|z| WeightFactor {
                    a: z.a,
                    p: z.m as f64 * self.p,
                })
                .collect(),
        )
    }
}

#[derive(Debug)]
pub struct DivisorModel {
    zeroset: ZeroSet,
    kernel: KernelModel,
    k00: f64,
}

pub fn build_divisor(zs: &ZeroSet, cfg: &QuadConfig) -> Result<DivisorModel> {
    let kernel = build_model(&zs.weight()?, cfg)?;
    let k00 = kernel.k00();
    if !(k00 > 0.0) {
        return Err(Error::IllConditioned {
            condition: f64::INFINITY,
            reason: format!("K(0,0) = {k00} is not positive"),
        });
    }
    Ok(DivisorModel {
        zeroset: zs.clone(),
        kernel,
        k00,
    })
}

/// Outcome of [`DivisorModel::verify`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivisorReport {
    /// `‖G‖_p`, target 1.
    pub norm: f64,
    pub norm_error: f64,
    /// Per zero, `max_{j < m_k} |G^{(j)}(a_k)| / j!`.
    pub zero_residuals: Vec<f64>,
    /// Per zero, `|G^{(m_k)}(a_k)| / m_k!`, which must not vanish.
    pub leading_coefficients: Vec<f64>,
    /// `max |K(z,0) closed form - main formula at ζ = 0|` over sample points.
    pub at_zero_agreement: f64,
    pub passed: bool,
    pub failures: Vec<String>,
}

impl DivisorModel {
    pub fn zeroset(&self) -> &ZeroSet {
        &self.zeroset
    }

    pub fn kernel(&self) -> &KernelModel {
        &self.kernel
    }

    pub fn k00(&self) -> f64 {
        self.k00
    }

    /// `log K(z,0)`, continued along the segment `[0, z]` from the real
    /// value at the origin.
    fn log_k(&self, z: Complex64) -> Result<Complex64> {
        let mut log = Complex64::new(self.k00.ln(), 0.0);
        let mut prev = Complex64::new(self.k00, 0.0);
        let mut t = 0.0;
        let mut step: f64 = 0.25;
        while t < 1.0 {
            let h = step.min(1.0 - t);
            let next = self.kernel.eval_at_zero(z * (t + h));
            if !(next.norm() >= BRANCH_FLOOR) {
                return Err(Error::BranchAmbiguity {
                    z,
                    reason: format!("|K(w,0)| < {BRANCH_FLOOR:e} at w = {}", z * (t + h)),
                });
            }
            let ratio = next / prev;
            if ratio.arg().abs() > MAX_PHASE_STEP {
                step = 0.5 * h;
                if step < MIN_BRANCH_STEP {
                    return Err(Error::BranchAmbiguity {
                        z,
                        reason: "phase of K(w,0) cannot be tracked along [0, z]".into(),
                    });
                }
                continue;
            }
            log += ratio.ln();
            prev = next;
            t += h;
            step = (2.0 * h).min(1.0);
        }
        Ok(log)
    }

    /// `G(z)`, normalized so that `K(z,0)^{2/p}` is positive at the origin.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if !(z.norm() < 1.0) {
            return Err(Error::DomainViolation(format!("{z} is outside the open unit disk")));
        }
        let p = self.zeroset.p;
        let log_k = self.log_k(z)?;
        let mut g = ((2.0 * log_k - self.k00.ln()) / p).exp();
        for zero in &self.zeroset.zeros {
            let b = (z - zero.a) / (ONE - zero.a.conj() * z);
            g *= b.powu(zero.m);
        }
        Ok(g)
    }

    /// Unit norm, zeros of the right order, and agreement of the two
    /// `K(z,0)` routes.
    pub fn verify(&self, cfg: &QuadConfig) -> Result<DivisorReport> {
        let p = self.zeroset.p;
        let singular: Vec<Singularity> = self
            .zeroset
            .zeros
            .iter()
            .map(|z| Singularity {
                center: z.a,
                exponent: z.m as f64 * p,
            })
            .collect();
        let failed = AtomicBool::new(false);
        let integral = integrate_singular(
            1,
            |z, out: &mut [Complex64]| {
                out[0] = match self.eval(z) {
                    Ok(g) => Complex64::new(g.norm().powf(p), 0.0),
                    Err(_) => {
                        failed.store(true, Ordering::Relaxed);
                        ZERO
                    }
                };
            },
            &singular,
            cfg,
        )?;
        if failed.load(Ordering::Relaxed) {
            return Err(Error::BranchAmbiguity {
                z: ZERO,
                reason: "K(z,0)^(2/p) could not be continued at some quadrature node".into(),
            });
        }
        let norm = integral[0].re.max(0.0).powf(1.0 / p);

        let mut zero_residuals = Vec::new();
        let mut leading_coefficients = Vec::new();
        for (k, zero) in self.zeroset.zeros.iter().enumerate() {
            let radius = 0.5 * self.clearance(k);
            let coeffs = self.taylor_at(zero.a, radius, zero.m as usize + 1)?;
            let m = zero.m as usize;
            zero_residuals.push(coeffs[..m].iter().map(|c| c.norm()).fold(0.0, f64::max));
            leading_coefficients.push(coeffs[m].norm());
        }

        let mut at_zero_agreement: f64 = 0.0;
        for i in 0..5 {
            for j in 0..5 {
                let z = Complex64::new(-0.6 + 0.3 * i as f64, -0.6 + 0.3 * j as f64);
                let d = self.kernel.eval_at_zero(z) - self.kernel.eval_main(z, ZERO);
                at_zero_agreement = at_zero_agreement.max(d.norm());
            }
        }

        let mut failures = Vec::new();
        let norm_error = (norm - 1.0).abs();
        if !(norm_error <= NORM_TOLERANCE) {
            failures.push(format!("norm {norm} differs from 1 by more than {NORM_TOLERANCE:e}"));
        }
        for (k, (&r, &l)) in zero_residuals.iter().zip(&leading_coefficients).enumerate() {
            if !(r <= ZERO_TOLERANCE * l.max(1.0)) {
                failures.push(format!("zero {k}: lower Taylor coefficients reach {r:e}"));
            }
            if !(l > ZERO_TOLERANCE) {
                failures.push(format!("zero {k}: multiplicity exceeds the requested order"));
            }
        }
        if !(at_zero_agreement <= AGREEMENT_TOLERANCE) {
            failures.push(format!(
                "K(z,0) closed form and main formula differ by {at_zero_agreement:e}"
            ));
        }
        Ok(DivisorReport {
            norm,
            norm_error,
            zero_residuals,
            leading_coefficients,
            at_zero_agreement,
            passed: failures.is_empty(),
            failures,
        })
    }

    fn clearance(&self, k: usize) -> f64 {
        let a = self.zeroset.zeros[k].a;
        let mut c = 1.0 - a.norm();
        for (j, z) in self.zeroset.zeros.iter().enumerate() {
            if j != k {
                c = c.min((z.a - a).norm());
            }
        }
        c
    }

    /// Taylor coefficients `G^{(j)}(a)/j!`, `j < count`, from the trapezoid
    /// rule on the circle `|z - a| = radius`.
    fn taylor_at(&self, a: Complex64, radius: f64, count: usize) -> Result<Vec<Complex64>> {
        const NODES: usize = 64;
        let values: Vec<Complex64> = (0..NODES)
            .map(|i| self.eval(a + Complex64::from_polar(radius, TAU * i as f64 / NODES as f64)))
            .collect::<Result<_>>()?;
        Ok((0..count)
            .map(|j| {
                let sum: Complex64 = values
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v * Complex64::from_polar(1.0, -TAU * (i * j) as f64 / NODES as f64))
                    .sum();
                sum / (NODES as f64 * radius.powi(j as i32))
            })
            .collect())
    }
}

impl DivisorReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}
