//! Fixtures shared by the benchmarks.

use bergman::{Complex64, WeightSpec, ZeroSet};

/// Mixed-exponent weights with `s` factors on a spiral.
pub fn spiral_spec(s: usize) -> WeightSpec {
    let pairs: Vec<(Complex64, f64)> = (0..s)
        .map(|k| {
            let r = 0.2 + 0.5 * k as f64 / s.max(1) as f64;
            let p = [1.0, 2.5, 0.5, -0.5, 3.0][k % 5];
            (Complex64::from_polar(r, 2.4 * k as f64), p)
        })
        .collect();
    WeightSpec::from_pairs(&pairs).expect("spiral points are distinct")
}

pub fn two_zero_set() -> ZeroSet {
    ZeroSet::from_pairs(2.0, &[(Complex64::new(0.3, 0.0), 1), (Complex64::new(-0.4, 0.0), 2)])
        .expect("valid zero set")
}

pub fn sample_points(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|i| Complex64::from_polar(0.85 * (i + 1) as f64 / n as f64, 1.7 * i as f64))
        .collect()
}
