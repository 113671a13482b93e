#![allow(dead_code)]

use bergman::poly::{from_roots, ComplexPoly, RootSet};
use bergman::{Complex64, WeightSpec};
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::TestRunner;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Roots shared by the mixed-exponent checks.
pub const MIXED_ROOTS: [(f64, f64); 3] = [(0.42, -0.21), (-0.35, 0.38), (0.12, 0.55)];
pub const MIXED_P: [f64; 3] = [1.0, 2.0, 0.5];

pub fn mixed_spec() -> WeightSpec {
    spec_from(&MIXED_ROOTS, &MIXED_P)
}

/// Same as [`mixed_spec`] with the first root moved to the origin.
pub fn mixed_spec_with_zero_root() -> WeightSpec {
    let mut roots = MIXED_ROOTS;
    roots[0] = (0.0, 0.0);
    spec_from(&roots, &MIXED_P)
}

pub fn spec_from(roots: &[(f64, f64)], p: &[f64]) -> WeightSpec {
    let pairs: Vec<(Complex64, f64)> =
        roots.iter().zip(p).map(|(&(x, y), &p)| (c(x, y), p)).collect();
    WeightSpec::from_pairs(&pairs).unwrap()
}

/// Five points of modulus at most `r`, used as both the `z` and `ζ` axes of
/// a 5×5 grid.
pub fn axis(r: f64) -> Vec<Complex64> {
    [(0.0, 0.0), (0.5, 0.33), (-0.75, 0.17), (0.33, -0.92), (-0.5, -0.67)]
        .iter()
        .map(|&(x, y)| c(x, y) * r)
        .collect()
}

pub fn max_over_grid(r: f64, f: impl Fn(Complex64, Complex64) -> f64) -> f64 {
    let a = axis(r);
    let mut m: f64 = 0.0;
    for &z in &a {
        for &w in &a {
            m = m.max(f(z, w));
        }
    }
    m
}

/// `count` random root sets with `1 <= s <= max_s`, from a fixed seed.
pub fn random_root_sets(count: usize, max_s: usize) -> Vec<RootSet> {
    let point = (0.0..0.95f64, 0.0..std::f64::consts::TAU)
        .prop_map(|(r, t)| Complex64::from_polar(r, t));
    let strategy = prop::collection::vec(point, 1..=max_s);
    let mut runner = TestRunner::deterministic();
    let mut out = Vec::new();
    while out.len() < count {
        let roots = strategy.new_tree(&mut runner).unwrap().current();
        if let Ok(set) = RootSet::new(roots) {
            out.push(set);
        }
    }
    out
}

/// Largest coefficient residual over the four polynomial identities
/// relating `q`, `q*` and their derivatives.
pub fn identity_residual(roots: &RootSet) -> f64 {
    let s = roots.len();
    let q = from_roots(roots);
    let q_star = q.reverse(s);
    let c = |i: usize| q.coeff(i);
    let prod = &q_star * &q;
    let mut worst: f64 = 0.0;

    // [q* q]_ℓ = Σ_{k<=ℓ} c_k conj(c_{s-ℓ+k}), 0 <= ℓ <= s.
    for l in 0..=s {
        let direct: Complex64 = (0..=l).map(|k| c(k) * c(s - l + k).conj()).sum();
        worst = worst.max((prod.coeff(l) - direct).norm());
    }
    // [q* q']_ℓ = Σ_{j=1}^{ℓ+1} j c_j conj(c_{s-1-ℓ+j}), 0 <= ℓ <= s-1.
    let dq = q.derivative();
    let prod_d = &q_star * &dq;
    for l in 0..s {
        let direct: Complex64 = (1..=l + 1)
            .map(|j| c(j) * c(s - 1 - l + j).conj() * j as f64)
            .sum();
        worst = worst.max((prod_d.coeff(l) - direct).norm());
    }
    // Palindrome: [q* q]_ℓ = conj([q* q]_{2s-ℓ}).
    for l in 0..=2 * s {
        worst = worst.max((prod.coeff(l) - prod.coeff(2 * s - l).conj()).norm());
    }
    // t (q*)'(t) = s q*(t) - t^{s-1} conj(q'(1/conj t)).
    let lhs = q_star.derivative().shift(1);
    let rhs = &q_star.scale(c_real(s as f64)) - &dq.reverse(s - 1);
    for l in 0..=s {
        worst = worst.max((lhs.coeff(l) - rhs.coeff(l)).norm());
    }
    worst
}

fn c_real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn poly(coeffs: &[(f64, f64)]) -> ComplexPoly {
    ComplexPoly::new(coeffs.iter().map(|&(x, y)| c(x, y)).collect())
}
