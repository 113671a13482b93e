mod common;

use std::f64::consts::TAU;

use bergman::poly::PolySet;
use bergman::quad::integrate_disk_vec;
use bergman::{
    build_model, hansbo_k00, integrate_disk, Complex64, KernelModel, QuadConfig,
    TruncatedKernel, WeightSpec,
};
use common::*;
use nalgebra::DMatrix;

fn specs() -> Vec<WeightSpec> {
    vec![
        mixed_spec(),
        mixed_spec_with_zero_root(),
        spec_from(&[(0.3, 0.0), (-0.4, 0.0)], &[1.0, 3.0]),
        spec_from(&[(0.5, 0.2), (-0.3, 0.4), (0.1, -0.6)], &[-1.0, 2.0, 0.5]),
        spec_from(
            &[(0.6, 0.0), (-0.2, 0.5), (0.0, -0.4), (-0.5, -0.3), (0.3, 0.3)],
            &[3.5, -1.5, 1.0, 0.3, 4.0],
        ),
    ]
}

fn models() -> Vec<KernelModel> {
    specs()
        .iter()
        .map(|s| build_model(s, &QuadConfig::default()).unwrap())
        .collect()
}

fn sample_points() -> Vec<Complex64> {
    let mut v = axis(0.8);
    v.extend([c(0.7, 0.3), c(-0.1, 0.75), c(0.42, -0.21)]);
    v
}

/// `[∂_z^k F(z)]_{z=0} / k!` by the trapezoid rule on a small circle.
fn taylor(f: impl Fn(Complex64) -> Complex64, k: usize) -> Complex64 {
    const N: usize = 16;
    let r = 0.2;
    let sum: Complex64 = (0..N)
        .map(|i| {
            let t = TAU * i as f64 / N as f64;
            f(Complex64::from_polar(r, t)) * Complex64::from_polar(1.0, -t * k as f64)
        })
        .sum();
    sum / (N as f64 * r.powi(k as i32))
}

#[test]
fn hermitian_symmetry_and_positive_diagonal() {
    for m in models() {
        for &z in &sample_points() {
            for &w in &sample_points() {
                let k = m.eval_main(z, w);
                assert!((k - m.eval_main(w, z).conj()).norm() < 1e-13 * k.norm().max(1.0));
            }
            let d = m.eval_main(z, z);
            assert!(d.im.abs() < 1e-13 && d.re > 0.0);
        }
        assert!(m.origin().hermitian_residual < 1e-8);
    }
}

#[test]
fn kernel_matrices_are_positive_semidefinite() {
    let pts = [c(0.1, 0.2), c(-0.5, 0.3), c(0.6, -0.1), c(0.0, -0.7), c(-0.3, -0.3), c(0.45, 0.45)];
    for m in models() {
        let re = DMatrix::from_fn(12, 12, |i, j| {
            let k = m.eval_main(pts[i % 6], pts[j % 6]);
            match (i < 6, j < 6) {
                (true, true) | (false, false) => k.re,
                (true, false) => -k.im,
                (false, true) => k.im,
            }
        });
        // The real 12×12 embedding has the same spectrum (doubled).
        let min = re.symmetric_eigenvalues().min();
        assert!(min > -1e-8, "min eigenvalue {min}");
    }
}

#[test]
fn reproducing_property() {
    let cfg = QuadConfig::default();
    for m in models() {
        for z in [c(0.4, 0.2), c(-0.6, 0.1)] {
            for p in 0..=4u32 {
                let v = integrate_disk(|w| w.powu(p) * m.eval_main(z, w), Some(m.spec()), &cfg).unwrap();
                assert!((v - z.powu(p)).norm() < 5.0 * cfg.abs_tol, "{v} vs {}", z.powu(p));
            }
        }
    }
}

#[test]
fn derivative_reproducing_property() {
    let cfg = QuadConfig::default();
    for m in models().iter().take(4) {
        let s = m.s();
        for k in 0..s.saturating_sub(1) {
            let v = integrate_disk_vec(
                4,
                |w, out: &mut [Complex64]| {
                    let t = taylor(|z| m.eval_main(z, w), k);
                    for (p, o) in out.iter_mut().enumerate() {
                        *o = w.powu(p as u32) * t;
                    }
                },
                Some(m.spec()),
                &cfg,
            )
            .unwrap();
            for (p, v) in v.iter().enumerate() {
                let expect = if p == k { 1.0 } else { 0.0 };
                assert!((v - expect).norm() < 1e-8, "k={k} p={p}: {v}");
            }
        }
    }
}

#[test]
fn origin_derivative_identity() {
    // Σ_j κ_kj conj(T_j(ζ)/q*(ζ)) = [∂_z^k K(z,ζ)]_{z=0}/k! - conj(P_k(ζ)/q*(ζ))
    for m in models() {
        let polys: &PolySet = m.polys();
        for k in 0..m.s().saturating_sub(1) {
            let p_k = polys.p_poly(m.amplitudes(), k).unwrap();
            for w in axis(0.7) {
                let qs = polys.q_star.eval(w).conj();
                let lhs: Complex64 = (0..polys.t.len())
                    .map(|j| m.origin().kappa(k, j) * polys.t[j].eval(w).conj() / qs)
                    .sum();
                let rhs = taylor(|z| m.eval_main(z, w), k) - p_k.eval(w).conj() / qs;
                assert!((lhs - rhs).norm() < 1e-11, "k={k}: {lhs} vs {rhs}");
            }
        }
    }
}

#[test]
fn rotation_covariance() {
    let cfg = QuadConfig::default();
    for spec in specs().iter().take(4) {
        let m = build_model(spec, &cfg).unwrap();
        for theta in [0.9, 2.6] {
            let rot = Complex64::from_polar(1.0, theta);
            let mr = build_model(&spec.rotated(theta), &cfg).unwrap();
            for &z in &axis(0.7) {
                for &w in &axis(0.7) {
                    let d = (mr.eval_main(rot * z, rot * w) - m.eval_main(z, w)).norm();
                    assert!(d < 1e-8, "θ={theta}: {d}");
                }
            }
        }
    }
}

#[test]
fn unweighted_specs_give_the_bergman_kernel() {
    let cfg = QuadConfig::default();
    for roots in random_root_sets(30, 5).into_iter().filter(|r| r.len() >= 2).take(6) {
        let pairs: Vec<(Complex64, f64)> = roots.roots().iter().map(|&a| (a, 0.0)).collect();
        let spec = WeightSpec::from_pairs(&pairs).unwrap();
        let m = build_model(&spec, &cfg).unwrap();
        let od = m.origin();
        for k in 0..od.dim() {
            for j in 0..od.dim() {
                let expect = if k == j { (k + 1) as f64 } else { 0.0 };
                assert!((od.kappa(k, j) - expect).norm() < 1e-8);
            }
        }
        for &z in &axis(0.6) {
            for &w in &axis(0.6) {
                let u = c(1.0, 0.0) - z * w.conj();
                assert!((m.eval_main(z, w) - c(1.0, 0.0) / (u * u)).norm() < 1e-8);
                assert!(m.eval_j(z, w).norm() < 1e-8);
            }
        }
        assert!(m.d_matrix().max_abs() < 1e-8);
    }
}

#[test]
fn radial_weight_series() {
    for p in [-1.5, 0.5, 2.0, 5.0] {
        let spec = WeightSpec::from_pairs(&[(c(0.0, 0.0), p)]).unwrap();
        let m = build_model(&spec, &QuadConfig::default()).unwrap();
        let (z, w) = (c(0.3, 0.2), c(-0.25, 0.35));
        let x = z * w.conj();
        let series: Complex64 = (0..200).map(|n| x.powu(n) * (n as f64 + 1.0 + p / 2.0)).sum();
        assert!((m.eval_main(z, w) - series).norm() < 1e-14);
    }
}

#[test]
fn kappa_agrees_with_truncated_oracle() {
    let cfg = QuadConfig::default();
    let spec = spec_from(&[(0.35, -0.2), (-0.3, 0.3), (0.1, 0.5)], &[1.5, 0.5, 3.0]);
    let m = build_model(&spec, &cfg).unwrap();
    let tk = TruncatedKernel::new(&spec, 40, &cfg).unwrap();
    let oracle = tk.scaled_origin_derivatives(2);
    assert!(oracle.max_abs_diff(&m.origin().kappa) < 1e-5);
    for &z in &axis(0.5) {
        assert!((tk.eval(z, z) - m.eval_main(z, z)).norm() < 1e-4);
        // Truncation approaches from below on the diagonal.
        assert!(tk.eval(z, z).re <= m.eval_main(z, z).re + 1e-10);
    }
}

#[test]
fn tightening_tolerance_converges() {
    let spec = spec_from(&[(0.2, 0.5), (-0.6, 0.1)], &[-1.0, 2.5]);
    let exact = hansbo_k00(c(0.2, 0.5), c(-0.6, 0.1), -1.0, 2.5, 1e-15).unwrap();
    let mut prev = f64::INFINITY;
    for tol in [1e-4, 1e-5, 1e-6, 1e-7] {
        let m = build_model(&spec, &QuadConfig::with_tol(tol)).unwrap();
        let err = (m.k00() - exact).abs();
        assert!(err < 10.0 * prev.max(1e-13), "tol {tol}: {err} after {prev}");
        assert!(err < 10.0 * tol);
        prev = err;
    }
}

#[test]
fn mixed_sign_exponents_build() {
    let spec = spec_from(&[(0.3, 0.1), (-0.4, 0.3), (0.0, -0.5)], &[-1.0, 2.0, 0.5]);
    let m = build_model(&spec, &QuadConfig::default()).unwrap();
    assert!(m.k00() > 0.0);
    assert!(m.amplitudes().iter().zip(spec.factors()).all(|(a, f)| *a > -(1.0 - f.a.norm_sqr())));
}

#[test]
fn nearly_coincident_roots_are_flagged() {
    let spec = spec_from(&[(0.3, 0.0), (0.3 + 1e-9, 0.0), (-0.4, 0.2)], &[1.0, 1.0, 2.0]);
    assert!(spec.roots().unwrap().is_near_coincident(bergman::poly::DEFAULT_MIN_SEPARATION));
    // The origin system only sees q*, which stays well conditioned.
    let m = build_model(&spec, &QuadConfig::default()).unwrap();
    assert!(m.origin().gram_condition < 1e3);
    for &z in &axis(0.6) {
        for &w in &axis(0.6) {
            let k = m.eval_main(z, w);
            assert!((k - m.eval_main(w, z).conj()).norm() < 1e-12 * k.norm().max(1.0));
        }
    }
    let merged = spec_from(&[(0.3, 0.0), (-0.4, 0.2)], &[2.0, 2.0]);
    let mm = build_model(&merged, &QuadConfig::default()).unwrap();
    assert!((m.k00() - mm.k00()).abs() < 1e-6);
}

#[test]
fn concurrent_readers_share_caches() {
    let m = build_model(&mixed_spec(), &QuadConfig::default()).unwrap();
    let (d, k) = std::thread::scope(|scope| {
        let hs: Vec<_> = (0..4)
            .map(|_| scope.spawn(|| (m.d_matrix().clone(), m.k_at_roots().clone())))
            .collect();
        let all: Vec<_> = hs.into_iter().map(|h| h.join().unwrap()).collect();
        for w in all.windows(2) {
            assert_eq!(w[0], w[1]);
        }
        all[0].clone()
    });
    assert_eq!(&d, m.d_matrix());
    assert_eq!(k.hermitian_residual(), 0.0);
}
