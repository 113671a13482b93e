//! Input documents: a bare weight, a bare zero set, or a job object.

use std::io::Read;
use std::path::Path;

use bergman::{Complex64, Error, QuadConfig, WeightFactor, WeightSpec, Zero, ZeroSet};
use serde::Deserialize;
use serde_json::Value;

pub enum Subject {
    Weight(WeightSpec),
    ZeroSet(ZeroSet),
}

pub struct Job {
    pub subject: Subject,
    pub quad: QuadConfig,
    pub z_points: Option<Vec<Complex64>>,
    pub zeta_points: Option<Vec<Complex64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJob {
    weight: Option<Value>,
    zeroset: Option<Value>,
    quad: Option<QuadConfig>,
    z_points: Option<Vec<[f64; 2]>>,
    zeta_points: Option<Vec<[f64; 2]>>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub fn read_source(source: &str) -> Result<String, Error> {
    if source == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| invalid(format!("stdin: {e}")))?;
        Ok(buf)
    } else {
        std::fs::read_to_string(Path::new(source)).map_err(|e| invalid(format!("{source}: {e}")))
    }
}

fn from_serde(e: serde_json::Error) -> Error {
    invalid(e.to_string())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightDoc {
    factors: Vec<WeightFactor>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ZeroSetDoc {
    p: f64,
    zeros: Vec<Zero>,
}

fn weight_from(v: Value) -> Result<WeightSpec, Error> {
    let doc: WeightDoc = serde_json::from_value(v).map_err(from_serde)?;
    WeightSpec::new(doc.factors)
}

fn zeroset_from(v: Value) -> Result<ZeroSet, Error> {
    let doc: ZeroSetDoc = serde_json::from_value(v).map_err(from_serde)?;
    ZeroSet::new(doc.p, doc.zeros)
}

fn inline_or_file(v: Value) -> Result<Value, Error> {
    match v {
        Value::String(path) => {
            let text = read_source(&path)?;
            serde_json::from_str(&text).map_err(from_serde)
        }
        other => Ok(other),
    }
}

fn points(v: Option<Vec<[f64; 2]>>) -> Option<Vec<Complex64>> {
    v.map(|ps| ps.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
}

pub fn parse_job(text: &str) -> Result<Job, Error> {
    let value: Value = serde_json::from_str(text).map_err(from_serde)?;
    let obj = value
        .as_object()
        .ok_or_else(|| invalid("input must be a JSON object"))?;
    if obj.contains_key("factors") {
        return Ok(Job {
            subject: Subject::Weight(weight_from(value)?),
            quad: QuadConfig::default(),
            z_points: None,
            zeta_points: None,
        });
    }
    if obj.contains_key("zeros") {
        return Ok(Job {
            subject: Subject::ZeroSet(zeroset_from(value)?),
            quad: QuadConfig::default(),
            z_points: None,
            zeta_points: None,
        });
    }
    let raw: RawJob = serde_json::from_value(value).map_err(from_serde)?;
    let subject = match (raw.weight, raw.zeroset) {
        (Some(w), None) => Subject::Weight(weight_from(inline_or_file(w)?)?),
        (None, Some(z)) => Subject::ZeroSet(zeroset_from(inline_or_file(z)?)?),
        (Some(_), Some(_)) => return Err(invalid("give exactly one of weight and zeroset, not both")),
        (None, None) => return Err(invalid("job needs a weight or a zeroset")),
    };
    let quad = raw.quad.unwrap_or_default();
    quad.validate()?;
    Ok(Job {
        subject,
        quad,
        z_points: points(raw.z_points),
        zeta_points: points(raw.zeta_points),
    })
}

/// `"r0:r1:n"`, `n` evenly spaced reals from `r0` to `r1`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, Error> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || invalid(format!("grid must look like r0:r1:n, got {s:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let r0: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let r1: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if n == 0 || !r0.is_finite() || !r1.is_finite() {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![r0]);
    }
    Ok((0..n)
        .map(|i| r0 + (r1 - r0) * i as f64 / (n - 1) as f64)
        .collect())
}

pub fn check_in_disk(points: &[Complex64]) -> Result<(), Error> {
    match points.iter().find(|z| z.norm().is_nan() || z.norm() >= 1.0) {
        Some(z) => Err(Error::DomainViolation(format!(
            "sample point {z} is not in the open unit disk"
        ))),
        None => Ok(()),
    }
}
