mod common;

use bergman::quad::Singularity;
use bergman::{build_divisor, norm_p, Complex64, QuadConfig, ZeroSet};
use common::*;

fn zero_sets() -> Vec<ZeroSet> {
    let mut out = Vec::new();
    for p in [1.0, 2.0, 4.0] {
        out.push(ZeroSet::from_pairs(p, &[(c(0.4, -0.3), 2)]).unwrap());
        out.push(ZeroSet::from_pairs(p, &[(c(0.3, 0.0), 1), (c(-0.4, 0.0), 2)]).unwrap());
        out.push(ZeroSet::from_pairs(p, &[(c(0.2, 0.5), 1), (c(-0.5, -0.1), 1), (c(0.0, -0.6), 2)]).unwrap());
    }
    out
}

#[test]
fn divisors_have_unit_norm_and_prescribed_zeros() {
    let cfg = QuadConfig::default();
    for zs in zero_sets() {
        let report = build_divisor(&zs, &cfg).unwrap().verify(&cfg).unwrap();
        assert!(report.passed, "{:?}", report.failures);
        assert!(report.norm_error < 1e-5, "p={}: {}", zs.p(), report.norm);
        assert!(report.zero_residuals.iter().all(|r| *r < 1e-10));
        assert!(report.leading_coefficients.iter().all(|r| *r > 1e-6));
    }
}

#[test]
fn division_by_the_divisor_is_contractive() {
    let cfg = QuadConfig::with_tol(1e-8);
    let polys = [
        poly(&[(1.0, 0.0)]),
        poly(&[(0.0, 0.0), (1.0, 0.0)]),
        poly(&[(0.5, -0.2), (0.0, 0.0), (1.0, 0.3)]),
        poly(&[(1.0, 0.0), (-2.0, 0.0), (0.0, 0.0), (0.7, 0.0)]),
        poly(&[(0.0, 1.0), (0.3, 0.3), (0.0, 0.0), (0.0, 0.0), (-1.0, 0.5)]),
    ];
    for zs in zero_sets().into_iter().step_by(2) {
        let dm = build_divisor(&zs, &QuadConfig::default()).unwrap();
        let p = zs.p();
        let zero_product = |z: Complex64| {
            zs.zeros()
                .iter()
                .map(|zero| (z - zero.a).powu(zero.m))
                .product::<Complex64>()
        };
        let singular: Vec<Singularity> = zs
            .zeros()
            .iter()
            .map(|zero| Singularity {
                center: zero.a,
                exponent: zero.m as f64 * p,
            })
            .collect();
        for u in &polys {
            let f = |z: Complex64| u.eval(z) * zero_product(z);
            let full = norm_p(f, p, &singular, &cfg).unwrap();
            let divided = norm_p(|z| f(z) / dm.eval(z).unwrap(), p, &[], &cfg).unwrap();
            assert!(divided <= full * (1.0 + 1e-7), "p={p}: {divided} > {full}");
        }
    }
}

#[test]
fn single_zero_closed_form_for_p2() {
    let cfg = QuadConfig::default();
    for a in [c(0.5, 0.0), c(-0.2, 0.6), c(0.0, -0.85)] {
        let dm = build_divisor(&ZeroSet::from_pairs(2.0, &[(a, 1)]).unwrap(), &cfg).unwrap();
        let one = c(1.0, 0.0);
        for z in axis(0.9).into_iter().chain([c(0.3, 0.4), c(-0.6, -0.5)]) {
            let b = (z - a) / (one - a.conj() * z);
            let exact = (one + (1.0 - a.norm_sqr()) / (one - a.conj() * z)) * b / (2.0 - a.norm_sqr()).sqrt();
            assert!((dm.eval(z).unwrap() - exact).norm() < 1e-10);
        }
    }
}

#[test]
fn zero_set_json_round_trip_and_validation() {
    let zs: ZeroSet = serde_json::from_str(r#"{"p": 2, "zeros": [{"a": [0.3, 0], "m": 2}]}"#).unwrap();
    assert_eq!(zs.zeros()[0].m, 2);
    let back: ZeroSet = serde_json::from_value(serde_json::to_value(&zs).unwrap()).unwrap();
    assert_eq!(back, zs);
    for bad in [
        r#"{"p": 0, "zeros": [{"a": [0.3, 0], "m": 1}]}"#,
        r#"{"p": 2, "zeros": []}"#,
        r#"{"p": 2, "zeros": [{"a": [0.3, 0], "m": 0}]}"#,
        r#"{"p": 2, "zeros": [{"a": [1.3, 0], "m": 1}]}"#,
    ] {
        assert!(serde_json::from_str::<ZeroSet>(bad).is_err(), "{bad}");
    }
}
