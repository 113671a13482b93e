use bergman::json::{matrix_to_json, pair_value};
use bergman::poly::DEFAULT_MIN_SEPARATION;
use bergman::{
    build_divisor, build_model, closed_form_s1, hansbo_k00, integrate_disk, Complex64, Error,
    KernelModel, QuadConfig, TruncatedKernel, WeightSpec, ZeroSet,
};
use serde_json::{json, Value};

use crate::job::check_in_disk;

pub const SYMMETRY_TOL: f64 = 1e-13;
pub const REPRODUCING_TOL: f64 = 1e-6;
pub const REPRESENTATION_TOL: f64 = 1e-9;
pub const SERIES_TOL: f64 = 1e-7;
pub const CLOSED_FORM_TOL: f64 = 1e-12;
pub const TRUNCATED_TOL: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Rep {
    Main,
    Canonical,
    Mgs,
}

impl Rep {
    fn name(self) -> &'static str {
        match self {
            Rep::Main => "main",
            Rep::Canonical => "canonical",
            Rep::Mgs => "mgs",
        }
    }
}

/// Rendered output plus whether every check passed.
pub struct Output {
    pub json: Value,
    pub csv: Option<String>,
    pub passed: bool,
}

pub fn warnings(spec: &WeightSpec) -> Vec<String> {
    let pts = spec.points();
    let mut out = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let d = (pts[i] - pts[j]).norm();
            if d < DEFAULT_MIN_SEPARATION {
                out.push(format!(
                    "points {i} and {j} are {d:.3e} apart; the Blaschke-product representation loses accuracy"
                ));
            }
        }
    }
    out
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn pair_rows(pairs: &[(Complex64, Complex64, Complex64)]) -> String {
    let mut s = String::from("re_z,im_z,re_zeta,im_zeta,re_K,im_K\n");
    for (z, w, k) in pairs {
        s.push_str(&[z.re, z.im, w.re, w.im, k.re, k.im].map(fmt).join(","));
        s.push('\n');
    }
    s
}

fn pair_json(pairs: &[(Complex64, Complex64, Complex64)]) -> Value {
    Value::Array(
        pairs
            .iter()
            .map(|(z, w, k)| json!({"z": pair_value(*z), "zeta": pair_value(*w), "K": pair_value(*k)}))
            .collect(),
    )
}

pub struct Points {
    pub z: Vec<Complex64>,
    pub zeta: Vec<Complex64>,
}

impl Points {
    pub fn pairs(&self) -> Vec<(Complex64, Complex64)> {
        self.z
            .iter()
            .flat_map(|&z| self.zeta.iter().map(move |&w| (z, w)))
            .collect()
    }
}

pub fn kernel(spec: &WeightSpec, cfg: &QuadConfig, pts: &Points, rep: Rep) -> Result<Output, Error> {
    check_in_disk(&pts.z)?;
    check_in_disk(&pts.zeta)?;
    let model = build_model(spec, cfg)?;
    let eval = |z, w| match rep {
        Rep::Main => model.eval_main(z, w),
        Rep::Canonical => model.eval_canonical(z, w),
        Rep::Mgs => model.eval_mgs(z, w),
    };
    let rows: Vec<_> = pts.pairs().into_iter().map(|(z, w)| (z, w, eval(z, w))).collect();
    Ok(Output {
        json: json!({
            "command": "kernel",
            "representation": rep.name(),
            "spec": spec,
            "k00": model.k00(),
            "samples": pair_json(&rows),
            "warnings": warnings(spec),
        }),
        csv: Some(pair_rows(&rows)),
        passed: true,
    })
}

pub fn derivs(spec: &WeightSpec, cfg: &QuadConfig) -> Result<Output, Error> {
    let model = build_model(spec, cfg)?;
    let od = model.origin();
    let mut v = json!({
        "command": "derivs",
        "spec": spec,
        "k00": model.k00(),
        "kappa": matrix_to_json(&od.kappa.to_rows()),
        "raw": matrix_to_json(&od.raw_matrix().to_rows()),
        "hermitian_residual": od.hermitian_residual,
        "gram_condition": od.gram_condition,
        "warnings": warnings(spec),
    });
    if od.is_empty() {
        v["note"] = json!("J vanishes identically for a single factor; there is no system to solve");
    }
    let mut csv = String::from("k,j,re_kappa,im_kappa,re_raw,im_raw\n");
    for k in 0..od.dim() {
        for j in 0..od.dim() {
            let (a, r) = (od.kappa(k, j), od.raw(k, j));
            csv.push_str(&format!("{k},{j},{}\n", [a.re, a.im, r.re, r.im].map(fmt).join(",")));
        }
    }
    Ok(Output {
        json: v,
        csv: Some(csv),
        passed: true,
    })
}

pub fn divisor(zs: &ZeroSet, cfg: &QuadConfig, points: &[Complex64]) -> Result<Output, Error> {
    check_in_disk(points)?;
    let dm = build_divisor(zs, cfg)?;
    let values = points
        .iter()
        .map(|&z| dm.eval(z).map(|g| (z, g)))
        .collect::<Result<Vec<_>, _>>()?;
    let report = dm.verify(cfg)?;
    let mut csv = String::from("re_z,im_z,re_G,im_G\n");
    for (z, g) in &values {
        csv.push_str(&[z.re, z.im, g.re, g.im].map(fmt).join(","));
        csv.push('\n');
    }
    let samples: Vec<Value> = values
        .iter()
        .map(|(z, g)| json!({"z": pair_value(*z), "G": pair_value(*g)}))
        .collect();
    Ok(Output {
        json: json!({
            "command": "divisor",
            "zeroset": zs,
            "k00": dm.k00(),
            "samples": samples,
            "report": report.to_json(),
            "warnings": zs.weight().map(|w| warnings(&w)).unwrap_or_default(),
        }),
        csv: Some(csv),
        passed: report.passed,
    })
}

struct Check {
    name: &'static str,
    tolerance: f64,
    observed: f64,
    note: Option<String>,
}

impl Check {
    fn passed(&self) -> bool {
        self.observed <= self.tolerance
    }

    fn to_json(&self) -> Value {
        let mut v = json!({
            "name": self.name,
            "tolerance": self.tolerance,
            "observed": self.observed,
            "passed": self.passed(),
        });
        if let Some(n) = &self.note {
            v["note"] = json!(n);
        }
        v
    }
}

fn max_over(pairs: &[(Complex64, Complex64)], f: impl Fn(Complex64, Complex64) -> f64) -> f64 {
    pairs.iter().map(|&(z, w)| f(z, w)).fold(0.0, f64::max)
}

fn symmetry(model: &KernelModel, pairs: &[(Complex64, Complex64)]) -> Check {
    let observed = max_over(pairs, |z, w| {
        let k = model.eval_main(z, w);
        (k - model.eval_main(w, z).conj()).norm() / k.norm().max(1.0)
    });
    Check {
        name: "symmetry",
        tolerance: SYMMETRY_TOL,
        observed,
        note: None,
    }
}

/// `∫ ζ^m K(z,ζ) h dA = z^m`. The integrator is only trusted to
/// `cfg.abs_tol`, which is added to the observed residual.
fn reproducing(model: &KernelModel, cfg: &QuadConfig) -> Result<Check, Error> {
    let z = Complex64::new(0.4, 0.2);
    let mut worst: f64 = 0.0;
    for m in 0..=4u32 {
        let v = integrate_disk(|w| w.powu(m) * model.eval_main(z, w), Some(model.spec()), cfg)?;
        worst = worst.max((v - z.powu(m)).norm());
    }
    Ok(Check {
        name: "reproducing",
        tolerance: REPRODUCING_TOL,
        observed: worst + cfg.abs_tol,
        note: Some(format!("residual {worst:e} plus quadrature tolerance {:e}", cfg.abs_tol)),
    })
}

fn representations(model: &KernelModel, pairs: &[(Complex64, Complex64)]) -> Check {
    let observed = max_over(pairs, |z, w| {
        let (a, b, c) = (model.eval_main(z, w), model.eval_canonical(z, w), model.eval_mgs(z, w));
        (a - b).norm().max((a - c).norm()).max((b - c).norm())
    });
    Check {
        name: "representations",
        tolerance: REPRESENTATION_TOL,
        observed,
        note: None,
    }
}

fn oracle_checks(
    model: &KernelModel,
    cfg: &QuadConfig,
    degree: usize,
    pairs: &[(Complex64, Complex64)],
) -> Result<Vec<Check>, Error> {
    let spec = model.spec();
    let f = spec.factors();
    let mut out = Vec::new();
    if f.len() == 1 {
        let observed = max_over(pairs, |z, w| {
            (model.eval_main(z, w) - closed_form_s1(f[0].a, f[0].p, z, w)).norm()
        });
        out.push(Check {
            name: "closed_form",
            tolerance: CLOSED_FORM_TOL,
            observed,
            note: None,
        });
    }
    if f.len() == 2 {
        let series = hansbo_k00(f[0].a, f[1].a, f[0].p, f[1].p, 1e-14)?;
        out.push(Check {
            name: "two_point_series",
            tolerance: SERIES_TOL,
            observed: (model.k00() - series).abs(),
            note: Some(format!("series K(0,0) = {series}")),
        });
    }
    if f.iter().all(|x| x.p >= 0.0) {
        let tk = TruncatedKernel::new(spec, degree, cfg)?;
        let inner: Vec<_> = pairs
            .iter()
            .copied()
            .filter(|(z, w)| z.norm() <= 0.5 && w.norm() <= 0.5)
            .collect();
        out.push(Check {
            name: "truncated",
            tolerance: TRUNCATED_TOL,
            observed: max_over(&inner, |z, w| (model.eval_main(z, w) - tk.eval(z, w)).norm()),
            note: Some(format!("degree {degree} on {} pairs with |z|, |zeta| <= 0.5", inner.len())),
        });
    }
    Ok(out)
}

pub fn verify(spec: &WeightSpec, cfg: &QuadConfig, pts: &Points, degree: usize) -> Result<Output, Error> {
    check_in_disk(&pts.z)?;
    check_in_disk(&pts.zeta)?;
    let model = build_model(spec, cfg)?;
    let pairs = pts.pairs();
    let mut checks = vec![
        symmetry(&model, &pairs),
        reproducing(&model, cfg)?,
        representations(&model, &pairs),
    ];
    checks.extend(oracle_checks(&model, cfg, degree, &pairs)?);
    let passed = checks.iter().all(Check::passed);
    let mut csv = String::from("name,tolerance,observed,passed\n");
    for c in &checks {
        csv.push_str(&format!("{},{},{},{}\n", c.name, fmt(c.tolerance), fmt(c.observed), c.passed()));
    }
    Ok(Output {
        json: json!({
            "command": "verify",
            "spec": spec,
            "passed": passed,
            "checks": checks.iter().map(Check::to_json).collect::<Vec<_>>(),
            "warnings": warnings(spec),
        }),
        csv: Some(csv),
        passed,
    })
}

pub fn oracle(spec: &WeightSpec, cfg: &QuadConfig, pts: &Points, degree: usize) -> Result<Output, Error> {
    check_in_disk(&pts.z)?;
    check_in_disk(&pts.zeta)?;
    let tk = TruncatedKernel::new(spec, degree, cfg)?;
    let rows: Vec<_> = pts.pairs().into_iter().map(|(z, w)| (z, w, tk.eval(z, w))).collect();
    let f = spec.factors();
    let mut v = json!({
        "command": "oracle",
        "spec": spec,
        "degree": degree,
        "gram_condition": tk.gram_condition(),
        "samples": pair_json(&rows),
    });
    if f.len() == 2 {
        v["two_point_series_k00"] = json!(hansbo_k00(f[0].a, f[1].a, f[0].p, f[1].p, 1e-14)?);
    }
    Ok(Output {
        json: v,
        csv: Some(pair_rows(&rows)),
        passed: true,
    })
}
