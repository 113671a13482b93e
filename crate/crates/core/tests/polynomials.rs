mod common;

use bergman::poly::{
    blaschke_eval, build_l, build_t, from_roots, subproducts, ComplexPoly, PolySet, RootSet,
};
use bergman::{Complex64, Error, WeightSpec};
use common::*;
use proptest::prelude::*;

fn point() -> impl Strategy<Value = Complex64> {
    (0.0..0.95f64, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn root_set(max_s: usize) -> impl Strategy<Value = RootSet> {
    prop::collection::vec(point(), 1..=max_s).prop_filter_map("distinct roots", |v| RootSet::new(v).ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn polynomial_identities(roots in root_set(6)) {
        prop_assert!(identity_residual(&roots) < 1e-13);
    }

    #[test]
    fn reversal_is_an_involution(roots in root_set(6)) {
        let q = from_roots(&roots);
        let s = roots.len();
        let back = q.reverse(s).reverse(s);
        for l in 0..=s {
            prop_assert!((back.coeff(l) - q.coeff(l)).norm() < 1e-15);
        }
    }

    #[test]
    fn t_characterization(roots in root_set(6)) {
        let s = roots.len();
        prop_assume!(s >= 2);
        let polys = PolySet::new(roots);
        for (k, t) in polys.t.iter().enumerate() {
            prop_assert!(t.degree() <= s - 2);
            let series = t.series_div(&polys.q_star, s - 1);
            for (l, v) in series.iter().enumerate() {
                let expect = if l == k { 1.0 } else { 0.0 };
                prop_assert!((v - expect).norm() < 1e-12, "k={} l={}: {}", k, l, v);
            }
        }
    }

    #[test]
    fn blaschke_has_unit_modulus_on_the_circle(roots in root_set(4), theta in 0.0..6.3f64) {
        let b = blaschke_eval(&roots, Complex64::from_polar(1.0, theta));
        prop_assert!((b.norm() - 1.0).abs() < 1e-12);
        for &a in roots.roots() {
            prop_assert_eq!(blaschke_eval(&roots, a).norm(), 0.0);
        }
    }
}

#[test]
fn from_roots_matches_repeated_convolution() {
    for roots in random_root_sets(20, 5) {
        let mut conv = ComplexPoly::one();
        for &a in roots.roots() {
            conv = &conv * &ComplexPoly::linear(a);
        }
        let q = from_roots(&roots);
        assert_eq!(q.coeff(roots.len()), c(1.0, 0.0));
        for l in 0..=roots.len() {
            assert!((q.coeff(l) - conv.coeff(l)).norm() < 1e-15);
        }
    }
}

#[test]
fn reversed_coefficients_are_conjugated_mirror() {
    let roots = RootSet::new(vec![c(0.3, 0.0), c(-0.2, 0.4)]).unwrap();
    let q = from_roots(&roots);
    let direct = &poly(&[(1.0, 0.0), (-0.3, 0.0)]) * &poly(&[(1.0, 0.0), (0.2, 0.4)]);
    let q_star = q.reverse(2);
    for l in 0..=2 {
        assert!((q_star.coeff(l) - q.coeff(2 - l).conj()).norm() < 1e-16);
        assert!((q_star.coeff(l) - direct.coeff(l)).norm() < 1e-16);
    }
}

#[test]
fn subproducts_reconstruct_q() {
    for roots in random_root_sets(50, 4).into_iter().filter(|r| r.len() == 4).take(10) {
        let q = from_roots(&roots);
        for (k, (q_k, q_star_k)) in subproducts(&roots).iter().enumerate() {
            let back = q_k * &ComplexPoly::linear(roots.roots()[k]);
            for l in 0..=4 {
                assert!((back.coeff(l) - q.coeff(l)).norm() < 1e-14);
            }
            assert_eq!(*q_star_k, q_k.reverse(3));
        }
    }
}

#[test]
fn l_is_nonnegative_on_the_diagonal() {
    for roots in random_root_sets(40, 3).into_iter().filter(|r| r.len() == 3).take(5) {
        let sub = subproducts(&roots);
        for (q_k, _) in &sub {
            let l = build_l(q_k, 3);
            for z in random_root_sets(100, 1).iter().map(|r| r.roots()[0]) {
                let v = l.eval(z, z);
                assert!(v.re >= 0.0 && v.im.abs() < 1e-14);
            }
        }
    }
}

#[test]
fn t_index_out_of_range() {
    let roots = RootSet::new(vec![c(0.3, 0.0), c(0.0, 0.4), c(-0.2, 0.0)]).unwrap();
    let q_star = from_roots(&roots).reverse(3);
    assert!(matches!(build_t(&q_star, 3, 2), Err(Error::IndexViolation { .. })));
    let t0 = build_t(&q_star, 3, 0).unwrap();
    let c2 = -(c(0.3, 0.0) + c(0.0, 0.4) + c(-0.2, 0.0));
    assert!((t0.coeff(1) - c2.conj()).norm() < 1e-16);
    assert_eq!(build_t(&q_star, 3, 1).unwrap(), ComplexPoly::monomial(1));
}

/// `conj(P_n(ζ))` straight from its defining expression: `ζ̄^{s-1}` times
/// the `n`-th Taylor coefficient at 0 of
/// `d/dz (q(z)/(1 - z ζ̄)) + Σ A_k q_k(z) / ((1 - z ζ̄)(1 - ā_k z))`.
fn p_conj_from_definition(spec: &WeightSpec, n: usize, zeta: Complex64) -> Complex64 {
    let roots = spec.roots().unwrap();
    let s = roots.len();
    let w = zeta.conj();
    let one = ComplexPoly::one();
    let geometric = ComplexPoly::new(vec![c(1.0, 0.0), -w]);
    let q = from_roots(&roots);
    let first = q.series_div(&geometric, n + 2);
    let mut coeff = first[n + 1] * (n + 1) as f64;
    for ((q_k, _), (a, amp)) in subproducts(&roots)
        .iter()
        .zip(roots.roots().iter().zip(spec.amplitudes()))
    {
        let den = &geometric * &(&one - &ComplexPoly::new(vec![c(0.0, 0.0), a.conj()]));
        coeff += q_k.series_div(&den, n + 1)[n] * amp;
    }
    coeff * w.powu(s as u32 - 1)
}

#[test]
fn p_matches_definition() {
    let specs = [
        spec_from(&[(0.3, 0.1), (-0.4, 0.2)], &[1.0, -0.5]),
        spec_from(&[(0.3, 0.0), (0.0, 0.4), (-0.2, -0.3)], &[2.0, 0.7, -1.2]),
        spec_from(&[(0.1, 0.6), (-0.5, 0.1), (0.4, -0.4), (0.0, 0.0)], &[1.5, 3.0, 0.0, -1.0]),
    ];
    for spec in &specs {
        let s = spec.len();
        for n in 0..=s - 2 {
            let p = bergman::poly::build_p(spec, n).unwrap();
            assert!(p.degree() <= s + n);
            for zeta in axis(0.9) {
                let oracle = p_conj_from_definition(spec, n, zeta);
                let closed = p.eval(zeta).conj();
                assert!((oracle - closed).norm() < 1e-14, "s={s} n={n}: {oracle} vs {closed}");
            }
        }
        assert!(matches!(bergman::poly::build_p(spec, s - 1), Err(Error::IndexViolation { .. })));
    }
}
