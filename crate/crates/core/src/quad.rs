//! Integration over the unit disk against the normalized area measure
//! `dσ = dA / π`, for integrands with isolated algebraic singularities.
//!
//! The disk is split with a smooth partition of unity. Around every singular
//! point `a` with exponent `p` sits a small disc on which the integrand is
//! `|ζ - a|^p` times a smooth function; there we use local polar
//! coordinates, a Gauss–Jacobi rule for the weight `ρ^{1+p}` and the
//! uniform-angle rule, refining all orders together until two levels agree.
//! The rest, `f · (1 - Σ χ_k)`, is smooth and is integrated with tensor
//! Gauss–Legendre cells in polar coordinates about the origin, refined
//! adaptively from a comparison of order `n` and `2n` rules per cell.
//!
//! Results are bitwise reproducible: cells are processed level by level in a
//! fixed order and reduced pairwise in fixed-size chunks, so the worker
//! count never changes the summation tree.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss::{gauss_jacobi_unit, gauss_legendre, Rule};
use crate::weight::WeightSpec;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Fraction of a singular disc on which the cutoff is identically one.
const CUTOFF_INNER: f64 = 0.5;
/// Hard cap on the number of remainder cells evaluated in one integral.
const MAX_CELLS: usize = 2_000_000;
/// Refinement levels tried on each singular disc.
const MAX_DISC_LEVELS: usize = 6;
/// Cells evaluated (and reduced) together.
const CHUNK: usize = 64;

/// Quadrature controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadConfig {
    /// Target absolute error of the whole integral.
    pub abs_tol: f64,
    /// Maximum number of bisection levels of a remainder cell.
    pub max_depth: usize,
    /// Gauss–Legendre points per cell, radially (low rule; the check rule
    /// doubles it).
    pub radial_order: usize,
    /// Gauss–Legendre points per cell, angularly.
    pub angular_order: usize,
    /// Radius of the local disc around a singular point, as a fraction of
    /// its clearance (distance to the unit circle, or half the distance to
    /// the next singular point). Smaller values concentrate the local polar
    /// mesh more tightly around the point.
    pub grading_exponent: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            abs_tol: 1e-10,
            max_depth: 14,
            radial_order: 8,
            angular_order: 8,
            grading_exponent: 0.5,
        }
    }
}

impl QuadConfig {
    pub fn with_tol(abs_tol: f64) -> Self {
        QuadConfig {
            abs_tol,
            ..QuadConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol.is_finite() && self.abs_tol > 0.0) {
            return Err(Error::InvalidInput(format!(
                "abs_tol must be positive, got {}",
                self.abs_tol
            )));
        }
        if self.max_depth < 1 {
            return Err(Error::InvalidInput("max_depth must be at least 1".into()));
        }
        if self.radial_order < 2 || self.angular_order < 2 {
            return Err(Error::InvalidInput(
                "radial_order and angular_order must be at least 2".into(),
            ));
        }
        if !(self.grading_exponent > 0.0 && self.grading_exponent <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "grading_exponent must lie in (0, 1], got {}",
                self.grading_exponent
            )));
        }
        Ok(())
    }
}

/// An integrable singularity `|ζ - center|^exponent` of the integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Singularity {
    pub center: Complex64,
    pub exponent: f64,
}

/// Measure for [`inner_product`].
#[derive(Debug, Clone, Copy)]
pub enum Measure<'a> {
    /// `dσ`
    Plain,
    /// `h dσ`
    Weighted(&'a WeightSpec),
    /// `|q*|^{-2} h dσ`
    WeightedOverQStarSq(&'a WeightSpec),
}

/// `∫_D f h dσ`, or `∫_D f dσ` without a weight.
pub fn integrate_disk<F>(f: F, spec: Option<&WeightSpec>, cfg: &QuadConfig) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    let v = integrate_disk_vec(1, |z, out: &mut [Complex64]| out[0] = f(z), spec, cfg)?;
    Ok(v[0])
}

/// Vector-valued `∫_D f h dσ`; `f` fills a slice of length `dim`.
pub fn integrate_disk_vec<F>(
    dim: usize,
    f: F,
    spec: Option<&WeightSpec>,
    cfg: &QuadConfig,
) -> Result<Vec<Complex64>>
where
    F: Fn(Complex64, &mut [Complex64]) + Sync,
{
    match spec {
        None => integrate_singular(dim, f, &[], cfg),
        Some(spec) => {
            let singular = spec.singularities();
            integrate_singular(
                dim,
                |z, out: &mut [Complex64]| {
                    f(z, out);
                    let h = spec.eval_unchecked(z);
                    for v in out.iter_mut() {
                        *v *= h;
                    }
                },
                &singular,
                cfg,
            )
        }
    }
}

/// `⟨f, g⟩ = ∫ f conj(g) dμ`.
pub fn inner_product<F, G>(f: F, g: G, measure: Measure<'_>, cfg: &QuadConfig) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64 + Sync,
    G: Fn(Complex64) -> Complex64 + Sync,
{
    match measure {
        Measure::Plain => integrate_disk(|z| f(z) * g(z).conj(), None, cfg),
        Measure::Weighted(spec) => integrate_disk(|z| f(z) * g(z).conj(), Some(spec), cfg),
        Measure::WeightedOverQStarSq(spec) => {
            let q_star = crate::poly::from_roots(&spec.roots()?).reverse(spec.len());
            integrate_disk(
                |z| f(z) * g(z).conj() / q_star.eval(z).norm_sqr(),
                Some(spec),
                cfg,
            )
        }
    }
}

/// `(∫ |f|^p dσ)^{1/p}`. Zeros of `f` (where `|f|^p` is not smooth unless
/// `p` times the multiplicity is an even integer) go in `singular`.
pub fn norm_p<F>(f: F, p: f64, singular: &[Singularity], cfg: &QuadConfig) -> Result<f64>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    if !(p.is_finite() && p > 0.0) {
        return Err(Error::InvalidInput(format!("norm exponent must be > 0, got {p}")));
    }
    let v = integrate_singular(
        1,
        |z, out: &mut [Complex64]| out[0] = Complex64::new(f(z).norm().powf(p), 0.0),
        singular,
        cfg,
    )?;
    Ok(v[0].re.max(0.0).powf(1.0 / p))
}

/// Vector-valued `∫_D F dσ` where `F` may behave like `|ζ - c|^e` near each
/// listed singularity and is smooth elsewhere in the closed disk.
pub fn integrate_singular<F>(
    dim: usize,
    f: F,
    singular: &[Singularity],
    cfg: &QuadConfig,
) -> Result<Vec<Complex64>>
where
    F: Fn(Complex64, &mut [Complex64]) + Sync,
{
    cfg.validate()?;
    let discs = build_discs(singular, cfg.grading_exponent)?;
    let (tol_rem, tol_disc) = if discs.is_empty() {
        (cfg.abs_tol, 0.0)
    } else {
        (0.5 * cfg.abs_tol, 0.5 * cfg.abs_tol / discs.len() as f64)
    };

    let mut total = vec![ZERO; dim];
    let mut error_bound = 0.0;
    for disc in &discs {
        let (value, err) = integrate_disc(dim, &f, disc, cfg, tol_disc);
        add_into(&mut total, &value);
        error_bound += err;
    }
    let (value, err, exhausted) = integrate_remainder(dim, &f, &discs, cfg, tol_rem);
    add_into(&mut total, &value);
    error_bound += err;

    if exhausted || error_bound > cfg.abs_tol {
        return Err(Error::ToleranceNotMet {
            estimate: total,
            error_bound,
            tolerance: cfg.abs_tol,
        });
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy)]
struct Disc {
    center: Complex64,
    exponent: f64,
    radius: f64,
}

impl Disc {
    /// Smooth cutoff: one on `ρ <= CUTOFF_INNER·radius`, zero outside the disc.
    fn cutoff(&self, z: Complex64) -> f64 {
        cutoff((z - self.center).norm() / self.radius)
    }
}

fn cutoff(t: f64) -> f64 {
    if t <= CUTOFF_INNER {
        1.0
    } else if t >= 1.0 {
        0.0
    } else {
        let x = (1.0 - t) / (1.0 - CUTOFF_INNER);
        let a = bump_psi(x);
        let b = bump_psi(1.0 - x);
        a / (a + b)
    }
}

fn bump_psi(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

fn build_discs(singular: &[Singularity], grading: f64) -> Result<Vec<Disc>> {
    let active: Vec<&Singularity> = singular.iter().filter(|s| s.exponent != 0.0).collect();
    for (i, s) in active.iter().enumerate() {
        if !(s.center.norm() < 1.0) {
            return Err(Error::DomainViolation(format!(
                "singular point {} outside the open unit disk",
                s.center
            )));
        }
        if !(s.exponent > -2.0) {
            return Err(Error::DomainViolation(format!(
                "singularity exponent {} is not integrable",
                s.exponent
            )));
        }
        for t in &active[i + 1..] {
            if t.center == s.center {
                return Err(Error::InvalidInput(format!(
                    "duplicate singular point {}",
                    s.center
                )));
            }
        }
    }
    Ok(active
        .iter()
        .map(|s| {
            let mut clearance = 1.0 - s.center.norm();
            for t in &active {
                if t.center != s.center {
                    clearance = clearance.min(0.5 * (t.center - s.center).norm());
                }
            }
            Disc {
                center: s.center,
                exponent: s.exponent,
                radius: grading * clearance,
            }
        })
        .collect())
}

/// `∫ F χ dσ` over one singular disc.
fn integrate_disc<F>(
    dim: usize,
    f: &F,
    disc: &Disc,
    cfg: &QuadConfig,
    tol: f64,
) -> (Vec<Complex64>, f64)
where
    F: Fn(Complex64, &mut [Complex64]) + Sync,
{
    let mut previous: Option<Vec<Complex64>> = None;
    let mut last_err = f64::INFINITY;
    for level in 0..MAX_DISC_LEVELS {
        let scale = 1usize << level;
        let value = disc_rule(
            dim,
            f,
            disc,
            4 * cfg.angular_order * scale,
            2 * cfg.radial_order * scale,
            2 * scale,
            2 * cfg.radial_order,
        );
        if let Some(prev) = &previous {
            last_err = max_diff(&value, prev);
            if last_err <= tol {
                return (value, last_err);
            }
        }
        previous = Some(value);
    }
    (previous.expect("at least one level"), last_err)
}

fn disc_rule<F>(
    dim: usize,
    f: &F,
    disc: &Disc,
    angles: usize,
    jacobi_order: usize,
    band_pieces: usize,
    band_order: usize,
) -> Vec<Complex64>
where
    F: Fn(Complex64, &mut [Complex64]) + Sync,
{
    let p = disc.exponent;
    let inner = CUTOFF_INNER * disc.radius;
    // Radial nodes and weights, including the ρ dρ / π Jacobian and the
    // factor ρ^{-p} that turns the Jacobi weight back into F.
    let mut radial: Vec<(f64, f64)> = Vec::new();
    let gj = gauss_jacobi_unit(jacobi_order, 1.0 + p);
    let lead = inner * inner / PI;
    for (&t, &w) in gj.nodes.iter().zip(&gj.weights) {
        radial.push((inner * t, lead * w * t.powf(-p)));
    }
    let gl = gauss_legendre(band_order);
    let width = (disc.radius - inner) / band_pieces as f64;
    for piece in 0..band_pieces {
        let a = inner + width * piece as f64;
        for (rho, w) in gl.mapped(a, a + width) {
            radial.push((rho, w * rho * cutoff(rho / disc.radius) / PI));
        }
    }
    let dphi = TAU / angles as f64;
    let rows: Vec<Vec<Complex64>> = (0..angles)
        .into_par_iter()
        .with_min_len(8)
        .map(|j| {
            let dir = Complex64::from_polar(1.0, (j as f64 + 0.5) * dphi);
            let mut acc = vec![ZERO; dim];
            let mut buf = vec![ZERO; dim];
            for &(rho, w) in &radial {
                f(disc.center + dir * rho, &mut buf);
                axpy(&mut acc, w * dphi, &buf);
            }
            acc
        })
        .collect();
    pairwise_sum(dim, &rows)
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    r0: f64,
    r1: f64,
    t0: f64,
    t1: f64,
    depth: usize,
}

impl Cell {
    fn area_fraction(&self) -> f64 {
        (self.r1 * self.r1 - self.r0 * self.r0) * (self.t1 - self.t0) / TAU
    }

    fn children(&self) -> [Cell; 4] {
        let rm = 0.5 * (self.r0 + self.r1);
        let tm = 0.5 * (self.t0 + self.t1);
        let d = self.depth + 1;
        [
            Cell { r0: self.r0, r1: rm, t0: self.t0, t1: tm, depth: d },
            Cell { r0: self.r0, r1: rm, t0: tm, t1: self.t1, depth: d },
            Cell { r0: rm, r1: self.r1, t0: self.t0, t1: tm, depth: d },
            Cell { r0: rm, r1: self.r1, t0: tm, t1: self.t1, depth: d },
        ]
    }
}

struct CellRules {
    low_r: Rule,
    low_t: Rule,
    high_r: Rule,
    high_t: Rule,
}

/// Level-by-level adaptive integration of `F (1 - Σ χ)` over the disk.
/// Returns `(value, error_bound, budget_exhausted)`.
fn integrate_remainder<F>(
    dim: usize,
    f: &F,
    discs: &[Disc],
    cfg: &QuadConfig,
    tol: f64,
) -> (Vec<Complex64>, f64, bool)
where
    F: Fn(Complex64, &mut [Complex64]) + Sync,
{
    let rules = CellRules {
        low_r: gauss_legendre(cfg.radial_order),
        low_t: gauss_legendre(cfg.angular_order),
        high_r: gauss_legendre(2 * cfg.radial_order),
        high_t: gauss_legendre(2 * cfg.angular_order),
    };
    let mut level: Vec<Cell> = Vec::new();
    for i in 0..2 {
        for j in 0..4 {
            level.push(Cell {
                r0: 0.5 * i as f64,
                r1: 0.5 * (i + 1) as f64,
                t0: 0.25 * TAU * j as f64,
                t1: 0.25 * TAU * (j + 1) as f64,
                depth: 0,
            });
        }
    }

    let mut chunk_sums: Vec<Vec<Complex64>> = Vec::new();
    let mut error_bound = 0.0;
    let mut evaluated = 0usize;
    let mut exhausted = false;
    while !level.is_empty() {
        let mut next = Vec::new();
        for chunk in level.chunks(CHUNK) {
            let results: Vec<(Vec<Complex64>, f64)> = chunk
                .par_iter()
                .map(|cell| eval_cell(dim, f, discs, &rules, cell))
                .collect();
            evaluated += chunk.len();
            let mut accepted = Vec::with_capacity(chunk.len());
            for (cell, (value, err)) in chunk.iter().zip(results) {
                let passes = err <= tol * cell.area_fraction();
                if passes || cell.depth >= cfg.max_depth || exhausted {
                    error_bound += err;
                    accepted.push(value);
                } else {
                    next.extend_from_slice(&cell.children());
                }
            }
            if !accepted.is_empty() {
                chunk_sums.push(pairwise_sum(dim, &accepted));
            }
        }
        if evaluated + next.len() > MAX_CELLS && !next.is_empty() {
            // One last pass accepts whatever the next level produces.
            exhausted = true;
        }
        level = next;
    }
    (pairwise_sum(dim, &chunk_sums), error_bound, exhausted)
}

fn eval_cell<F>(
    dim: usize,
    f: &F,
    discs: &[Disc],
    rules: &CellRules,
    cell: &Cell,
) -> (Vec<Complex64>, f64)
where
    F: Fn(Complex64, &mut [Complex64]) + Sync,
{
    let low = tensor_rule(dim, f, discs, &rules.low_r, &rules.low_t, cell);
    let high = tensor_rule(dim, f, discs, &rules.high_r, &rules.high_t, cell);
    let err = max_diff(&low, &high);
    (high, err)
}

fn tensor_rule<F>(
    dim: usize,
    f: &F,
    discs: &[Disc],
    radial: &Rule,
    angular: &Rule,
    cell: &Cell,
) -> Vec<Complex64>
where
    F: Fn(Complex64, &mut [Complex64]) + Sync,
{
    let mut acc = vec![ZERO; dim];
    let mut buf = vec![ZERO; dim];
    let angles: Vec<(Complex64, f64)> = angular
        .mapped(cell.t0, cell.t1)
        .map(|(t, w)| (Complex64::from_polar(1.0, t), w))
        .collect();
    for (r, wr) in radial.mapped(cell.r0, cell.r1) {
        for &(dir, wt) in &angles {
            let z = dir * r;
            let mut mask = 1.0;
            for d in discs {
                mask -= d.cutoff(z);
            }
            if mask <= 0.0 {
                continue;
            }
            f(z, &mut buf);
            axpy(&mut acc, wr * wt * r * mask / PI, &buf);
        }
    }
    acc
}

fn axpy(acc: &mut [Complex64], w: f64, v: &[Complex64]) {
    for (a, &b) in acc.iter_mut().zip(v) {
        *a += b * w;
    }
}

fn add_into(acc: &mut [Complex64], v: &[Complex64]) {
    for (a, &b) in acc.iter_mut().zip(v) {
        *a += b;
    }
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Componentwise pairwise (tree) summation.
fn pairwise_sum(dim: usize, items: &[Vec<Complex64>]) -> Vec<Complex64> {
    match items.len() {
        0 => vec![ZERO; dim],
        1 => items[0].clone(),
        n => {
            let (left, right) = items.split_at(n / 2);
            let mut l = pairwise_sum(dim, left);
            let r = pairwise_sum(dim, right);
            add_into(&mut l, &r);
            l
        }
    }
}
