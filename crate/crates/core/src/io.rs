//! JSON and CSV file formats.
//!
//! * Euclidean curve: `{"closed": bool, "dim": d, "samples": [[..], ..]}`
//! * SRV curve: the same plus `"kind": "srv"` and `"basepoint"`
//! * sphere curve: `{"dim": "S2", "points": [[x,y,z], ..], "aux": [..], "meta": {..}}`
//! * surface: `{"class": "tube" | "ruled" | "strip", ..channels..}`
//! * CSV curve: one sample per row, `#` comments

use std::path::Path;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::curve::DiscreteCurve;
use crate::error::{Error, Result};
use crate::homogeneous::SphereCurve;
use crate::srv::SrvCurve;
use crate::surfaces::{RuledSpec, StripSpec, SurfaceSpec, TubeSpec};

#[derive(Serialize, Deserialize)]
struct CurveJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kind: Option<String>,
    closed: bool,
    dim: usize,
    samples: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    basepoint: Option<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct SphereJson {
    dim: String,
    points: Vec<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    aux: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "lowercase")]
enum SurfaceJson {
    Tube { center: CurveJson, radius: Vec<f64> },
    Ruled { base: CurveJson, ruling: Vec<[f64; 3]> },
    Strip { base: SphereJson, bandwidth: Vec<f64> },
}

/// Anything the command line can read.
#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    Curve(DiscreteCurve),
    Srv(SrvCurve),
    Sphere(SphereCurve),
    Surface(SurfaceSpec),
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn flatten(samples: &[Vec<f64>], dim: usize) -> Result<Vec<f64>> {
    if let Some(i) = samples.iter().position(|s| s.len() != dim) {
        return Err(invalid(format!("sample {i} has {} coordinates, expected {dim}", samples[i].len())));
    }
    Ok(samples.concat())
}

fn curve_from_json(c: CurveJson) -> Result<DiscreteCurve> {
    DiscreteCurve::new(c.dim, c.closed, flatten(&c.samples, c.dim)?)
}

fn curve_to_json(c: &DiscreteCurve) -> CurveJson {
    CurveJson {
        kind: None,
        closed: c.is_closed(),
        dim: c.dim(),
        samples: c.points().map(<[f64]>::to_vec).collect(),
        basepoint: None,
    }
}

fn sphere_from_json(s: SphereJson) -> Result<SphereCurve> {
    if s.dim != "S2" {
        return Err(invalid(format!("unknown sphere dimension {:?}", s.dim)));
    }
    SphereCurve::new(s.points.iter().map(|p| Vector3::from(*p)).collect(), s.aux)
}

fn sphere_to_json(s: &SphereCurve, meta: Option<Value>) -> SphereJson {
    SphereJson {
        dim: "S2".into(),
        points: s.points().iter().map(|p| [p.x, p.y, p.z]).collect(),
        aux: s.aux().map(<[f64]>::to_vec),
        meta,
    }
}

fn surface_from_json(s: SurfaceJson) -> Result<SurfaceSpec> {
    Ok(match s {
        SurfaceJson::Tube { center, radius } => SurfaceSpec::Tube(TubeSpec::new(curve_from_json(center)?, radius)?),
        SurfaceJson::Ruled { base, ruling } => {
            SurfaceSpec::Ruled(RuledSpec::new(curve_from_json(base)?, ruling.iter().map(|v| Vector3::from(*v)).collect())?)
        }
        SurfaceJson::Strip { base, bandwidth } => SurfaceSpec::Strip(StripSpec::new(sphere_from_json(base)?, bandwidth)?),
    })
}

fn surface_to_json(s: &SurfaceSpec) -> SurfaceJson {
    match s {
        SurfaceSpec::Tube(t) => SurfaceJson::Tube { center: curve_to_json(t.center()), radius: t.radius().to_vec() },
        SurfaceSpec::Ruled(r) => SurfaceJson::Ruled {
            base: curve_to_json(r.base()),
            ruling: r.ruling().iter().map(|v| [v.x, v.y, v.z]).collect(),
        },
        SurfaceSpec::Strip(s) => SurfaceJson::Strip { base: sphere_to_json(s.base(), None), bandwidth: s.bandwidth().to_vec() },
    }
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Parse { line: e.line(), message: e.to_string() }
}

/// Reads any JSON shape, dispatching on `"class"`, `"dim": "S2"` and `"kind"`.
pub fn shape_from_json(text: &str) -> Result<Shape> {
    let v: Value = serde_json::from_str(text).map_err(json_err)?;
    if v.get("class").is_some() {
        return surface_from_json(serde_json::from_value(v).map_err(json_err)?).map(Shape::Surface);
    }
    if v.get("dim").is_some_and(Value::is_string) {
        return sphere_from_json(serde_json::from_value(v).map_err(json_err)?).map(Shape::Sphere);
    }
    let c: CurveJson = serde_json::from_value(v).map_err(json_err)?;
    match c.kind.as_deref() {
        Some("srv") => {
            let base = c.basepoint.clone().ok_or_else(|| invalid("SRV file needs a basepoint"))?;
            Ok(Shape::Srv(SrvCurve::new(c.dim, c.closed, flatten(&c.samples, c.dim)?, base)?))
        }
        None | Some("curve") => curve_from_json(c).map(Shape::Curve),
        Some(k) => Err(invalid(format!("unknown kind {k:?}"))),
    }
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn curve_to_string(c: &DiscreteCurve) -> String {
    pretty(&curve_to_json(c))
}

pub fn srv_to_string(s: &SrvCurve) -> String {
    pretty(&CurveJson {
        kind: Some("srv".into()),
        closed: s.is_closed(),
        dim: s.dim(),
        samples: s.q().chunks(s.dim()).map(<[f64]>::to_vec).collect(),
        basepoint: Some(s.basepoint().to_vec()),
    })
}

pub fn sphere_to_string(s: &SphereCurve, meta: Option<Value>) -> String {
    pretty(&sphere_to_json(s, meta))
}

pub fn surface_to_string(s: &SurfaceSpec) -> String {
    pretty(&surface_to_json(s))
}

pub fn shape_to_string(s: &Shape) -> String {
    match s {
        Shape::Curve(c) => curve_to_string(c),
        Shape::Srv(q) => srv_to_string(q),
        Shape::Sphere(g) => sphere_to_string(g, None),
        Shape::Surface(f) => surface_to_string(f),
    }
}

/// Numeric rows, all of the same width; lines starting with `#` are skipped.
pub fn curve_from_csv(text: &str, closed: bool) -> Result<DiscreteCurve> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut data = Vec::new();
    let mut dim = None;
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let row: Vec<f64> = rec
            .iter()
            .filter(|f| !f.is_empty())
            .map(|f| f.parse().map_err(|_| Error::Parse { line, message: format!("not a number: {f:?}") }))
            .collect::<Result<_>>()?;
        match dim {
            None => dim = Some(row.len()),
            Some(d) if d != row.len() => {
                return Err(Error::Parse { line, message: format!("expected {d} columns, found {}", row.len()) })
            }
            _ => {}
        }
        data.extend(row);
    }
    DiscreteCurve::new(dim.unwrap_or(0), closed, data)
}

/// Reads a curve/shape file by extension (`.csv` or JSON).
pub fn read_shape(path: &Path, closed_csv: bool) -> Result<Shape> {
    let text = std::fs::read_to_string(path).map_err(|e| invalid(e.to_string()))?;
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        curve_from_csv(&text, closed_csv).map(Shape::Curve)
    } else {
        shape_from_json(&text)
    }
}
