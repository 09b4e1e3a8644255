//! Tubes, ruled surfaces and spherical strips as augmented curves.

mod mesh;

pub use mesh::Mesh;

use std::f64::consts::{FRAC_PI_2, TAU};

use nalgebra::Vector3;

use crate::curve::{frenet_frame, DiscreteCurve};
use crate::error::{Error, Result};
use crate::homogeneous::{homo_geodesic, sphere_exp, HomoOptions, SphereCurve};
use crate::registration::{shape_distance_srv, ShapeOptions};
use crate::srv::{srv_geodesic_between, srv_transform, SrvCurve};

/// Center curve in `ℝ³` with a positive radius per sample.
#[derive(Clone, Debug, PartialEq)]
pub struct TubeSpec {
    center: DiscreteCurve,
    radius: Vec<f64>,
}

impl TubeSpec {
    pub fn new(center: DiscreteCurve, radius: Vec<f64>) -> Result<Self> {
        if center.dim() != 3 {
            return Err(Error::ShapeMismatch(format!("tube center must live in R^3, got d = {}", center.dim())));
        }
        if radius.len() != center.len() {
            return Err(Error::ShapeMismatch(format!("{} center samples but {} radii", center.len(), radius.len())));
        }
        if let Some(index) = radius.iter().position(|r| !(*r > 0.0) || !r.is_finite()) {
            return Err(Error::InvalidTubeState { index });
        }
        center.validate_immersion()?;
        Ok(Self { center, radius })
    }

    pub fn center(&self) -> &DiscreteCurve {
        &self.center
    }

    pub fn radius(&self) -> &[f64] {
        &self.radius
    }
}

/// `(γ_i, μ r_i)` in `ℝ⁴`.
pub fn tube_encode(spec: &TubeSpec, mu: f64) -> DiscreteCurve {
    let data = spec.center.points().zip(&spec.radius).flat_map(|(p, r)| [p[0], p[1], p[2], mu * r]).collect();
    DiscreteCurve::new(4, spec.center.is_closed(), data).expect("same sample count")
}

pub fn tube_decode(c: &DiscreteCurve, mu: f64) -> Result<TubeSpec> {
    if c.dim() != 4 {
        return Err(Error::ShapeMismatch(format!("encoded tube must live in R^4, got d = {}", c.dim())));
    }
    let center = c.points().flat_map(|p| p[..3].to_vec()).collect();
    let radius: Vec<f64> = c.points().map(|p| p[3] / mu).collect();
    if let Some(index) = radius.iter().position(|r| !(*r > 0.0)) {
        return Err(Error::InvalidTubeState { index });
    }
    TubeSpec::new(DiscreteCurve::new(3, c.is_closed(), center)?, radius)
}

/// Circles `γ + r(N cos s + B sin s)` around the center, `s_j = 2πj/m`.
pub fn tube_mesh(spec: &TubeSpec, circle_samples: usize) -> Result<Mesh> {
    if circle_samples < 3 {
        return Err(Error::InvalidInput("a tube needs at least 3 samples per circle".into()));
    }
    let frame = frenet_frame(&spec.center)?;
    let mut vertices = Vec::with_capacity(spec.center.len() * circle_samples);
    for (i, p) in spec.center.points().enumerate() {
        let g = Vector3::new(p[0], p[1], p[2]);
        let r = spec.radius[i];
        for j in 0..circle_samples {
            let s = TAU * j as f64 / circle_samples as f64;
            vertices.push(g + (frame.normal[i] * s.cos() + frame.binormal[i] * s.sin()) * r);
        }
    }
    Ok(Mesh::grid(vertices, circle_samples, spec.center.is_closed(), true))
}

/// Base curve in `ℝ³` with a unit ruling direction per sample.
#[derive(Clone, Debug, PartialEq)]
pub struct RuledSpec {
    base: DiscreteCurve,
    ruling: Vec<Vector3<f64>>,
}

impl RuledSpec {
    pub fn new(base: DiscreteCurve, ruling: Vec<Vector3<f64>>) -> Result<Self> {
        if base.dim() != 3 {
            return Err(Error::ShapeMismatch(format!("ruled base must live in R^3, got d = {}", base.dim())));
        }
        if ruling.len() != base.len() {
            return Err(Error::ShapeMismatch(format!("{} base samples but {} rulings", base.len(), ruling.len())));
        }
        if let Some(i) = ruling.iter().position(|v| (v.norm() - 1.0).abs() > 1e-10) {
            return Err(Error::InvalidInput(format!("ruling {i} is not a unit vector")));
        }
        Ok(Self { base, ruling })
    }

    pub fn base(&self) -> &DiscreteCurve {
        &self.base
    }

    pub fn ruling(&self) -> &[Vector3<f64>] {
        &self.ruling
    }
}

/// Result of projecting decoded rulings back to unit length.
#[derive(Clone, Debug, PartialEq)]
pub struct RuledDecode {
    pub spec: RuledSpec,
    /// Largest `| |v| − 1 |` removed by the renormalization.
    pub max_correction: f64,
    /// Set when `max_correction > 1e-3`.
    pub flagged: bool,
}

/// `(γ_i, ν v_i)` in `ℝ⁶`.
pub fn ruled_encode(spec: &RuledSpec, nu: f64) -> DiscreteCurve {
    let data = spec
        .base
        .points()
        .zip(&spec.ruling)
        .flat_map(|(p, v)| [p[0], p[1], p[2], nu * v.x, nu * v.y, nu * v.z])
        .collect();
    DiscreteCurve::new(6, spec.base.is_closed(), data).expect("same sample count")
}

pub fn ruled_decode(c: &DiscreteCurve, nu: f64) -> Result<RuledDecode> {
    if c.dim() != 6 {
        return Err(Error::ShapeMismatch(format!("encoded ruled surface must live in R^6, got d = {}", c.dim())));
    }
    let base = DiscreteCurve::new(3, c.is_closed(), c.points().flat_map(|p| p[..3].to_vec()).collect())?;
    let mut ruling = Vec::with_capacity(c.len());
    let mut max_correction: f64 = 0.0;
    for (i, p) in c.points().enumerate() {
        let v = Vector3::new(p[3], p[4], p[5]) / nu;
        let len = v.norm();
        if len < 1e-6 {
            return Err(Error::InvalidInput(format!("ruling {i} vanishes")));
        }
        max_correction = max_correction.max((len - 1.0).abs());
        // already unit up to rounding: keep the stored bits
        ruling.push(if (len - 1.0).abs() <= 1e-12 { v } else { v / len });
    }
    Ok(RuledDecode { spec: RuledSpec::new(base, ruling)?, max_correction, flagged: max_correction > 1e-3 })
}

/// Vertices `γ_i + s_j v_i` with `s_j = j/(m−1)`.
pub fn ruled_mesh(spec: &RuledSpec, s_samples: usize) -> Result<Mesh> {
    if s_samples < 2 {
        return Err(Error::InvalidInput("a ruled mesh needs at least 2 samples per ruling".into()));
    }
    let mut vertices = Vec::with_capacity(spec.base.len() * s_samples);
    for (p, v) in spec.base.points().zip(&spec.ruling) {
        for j in 0..s_samples {
            let s = j as f64 / (s_samples - 1) as f64;
            vertices.push(Vector3::new(p[0] + s * v.x, p[1] + s * v.y, p[2] + s * v.z));
        }
    }
    Ok(Mesh::grid(vertices, s_samples, spec.base.is_closed(), false))
}

/// Sphere curve with a bandwidth in `(0, π/2)` per sample.
#[derive(Clone, Debug, PartialEq)]
pub struct StripSpec {
    base: SphereCurve,
    bandwidth: Vec<f64>,
}

impl StripSpec {
    pub fn new(base: SphereCurve, bandwidth: Vec<f64>) -> Result<Self> {
        if bandwidth.len() != base.len() {
            return Err(Error::ShapeMismatch(format!("{} base samples but {} bandwidths", base.len(), bandwidth.len())));
        }
        if let Some(i) = bandwidth.iter().position(|r| !(*r > 0.0 && *r < FRAC_PI_2)) {
            return Err(Error::InvalidInput(format!("bandwidth {i} is outside (0, pi/2)")));
        }
        Ok(Self { base, bandwidth })
    }

    pub fn base(&self) -> &SphereCurve {
        &self.base
    }

    pub fn bandwidth(&self) -> &[f64] {
        &self.bandwidth
    }

    /// The base with the bandwidth as its aux channel.
    pub fn encode(&self) -> SphereCurve {
        SphereCurve::new(self.base.points().to_vec(), Some(self.bandwidth.clone())).expect("validated")
    }

    pub fn decode(c: &SphereCurve) -> Result<Self> {
        let aux = c.aux().ok_or_else(|| Error::InvalidInput("strip needs a bandwidth channel".into()))?.to_vec();
        Self::new(SphereCurve::new(c.points().to_vec(), None)?, aux)
    }
}

/// Unit binormals `γ × T` along a sphere curve.
pub fn strip_binormals(base: &SphereCurve) -> Result<Vec<Vector3<f64>>> {
    let flat = DiscreteCurve::new(3, false, base.points().iter().flat_map(|p| [p.x, p.y, p.z]).collect())?;
    let eps = flat.speed_tolerance();
    if eps == 0.0 {
        return Err(Error::DegenerateCurve);
    }
    let vel = flat.velocity();
    base.points()
        .iter()
        .zip(vel.chunks(3))
        .enumerate()
        .map(|(i, (p, v))| {
            let v = Vector3::new(v[0], v[1], v[2]);
            let t = v - p * p.dot(&v);
            if t.norm() < eps {
                return Err(Error::NotImmersion { index: i });
            }
            Ok(p.cross(&t.normalize()))
        })
        .collect()
}

/// Vertices `exp_γ(s r B)` with `s_j = j/(m−1)`.
pub fn strip_mesh(spec: &StripSpec, s_samples: usize) -> Result<Mesh> {
    if s_samples < 2 {
        return Err(Error::InvalidInput("a strip mesh needs at least 2 samples across".into()));
    }
    let binormal = strip_binormals(&spec.base)?;
    let mut vertices = Vec::with_capacity(spec.base.len() * s_samples);
    for ((p, b), r) in spec.base.points().iter().zip(&binormal).zip(&spec.bandwidth) {
        for j in 0..s_samples {
            let s = j as f64 / (s_samples - 1) as f64;
            // b is tangent at p up to rounding; remove the residue before exp
            let v = (b - p * p.dot(b)) * (s * r);
            vertices.push(sphere_exp(p, &v)?);
        }
    }
    Ok(Mesh::grid(vertices, s_samples, false, false))
}

#[derive(Clone, Debug, PartialEq)]
pub enum SurfaceSpec {
    Tube(TubeSpec),
    Ruled(RuledSpec),
    Strip(StripSpec),
}

impl SurfaceSpec {
    pub fn class(&self) -> &'static str {
        match self {
            SurfaceSpec::Tube(_) => "tube",
            SurfaceSpec::Ruled(_) => "ruled",
            SurfaceSpec::Strip(_) => "strip",
        }
    }
}

/// Channel weights: `mu` tube radius, `nu` ruling, `lambda` strip bandwidth.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelWeights {
    pub mu: f64,
    pub nu: f64,
    pub lambda: f64,
}

impl Default for ChannelWeights {
    fn default() -> Self {
        Self { mu: 1.0, nu: 1.0, lambda: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceOptions {
    pub weights: ChannelWeights,
    /// Reparametrize the second surface before interpolating.
    pub align: bool,
    pub circle_samples: usize,
    pub s_samples: usize,
}

impl Default for SurfaceOptions {
    fn default() -> Self {
        Self { weights: ChannelWeights::default(), align: false, circle_samples: 24, s_samples: 8 }
    }
}

/// One surface along a geodesic.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceStep {
    pub tau: f64,
    pub spec: SurfaceSpec,
    pub mesh: Mesh,
    /// Ruling renormalization applied at this step (ruled surfaces only).
    pub ruling_correction: f64,
}

pub fn surface_mesh(spec: &SurfaceSpec, opts: &SurfaceOptions) -> Result<Mesh> {
    match spec {
        SurfaceSpec::Tube(t) => tube_mesh(t, opts.circle_samples),
        SurfaceSpec::Ruled(r) => ruled_mesh(r, opts.s_samples),
        SurfaceSpec::Strip(s) => strip_mesh(s, opts.s_samples),
    }
}

/// Flat-chart geodesic between two encoded curves, optionally with the second
/// one reparametrized (no rotation: it would mix channels).
fn flat_geodesic(c0: &DiscreteCurve, c1: &DiscreteCurve, steps: usize, align: bool) -> Result<Vec<(f64, DiscreteCurve)>> {
    let s0 = srv_transform(c0)?;
    let mut s1 = srv_transform(c1)?;
    if align {
        let opts = ShapeOptions { rotations: false, ..Default::default() };
        let al = shape_distance_srv(&s0, &s1, &opts)?;
        let aligned = al.apply(&s1)?;
        s1 = SrvCurve::new(s1.dim(), s1.is_closed(), aligned.q().to_vec(), c1.point(al.shift).to_vec())?;
    }
    Ok(srv_geodesic_between(&s0, &s1, steps)?.into_iter().map(|g| (g.tau, g.curve)).collect())
}

/// Encodes both surfaces, follows the geodesic of the encoded curves, then
/// decodes and meshes every step.
pub fn surface_geodesic(a: &SurfaceSpec, b: &SurfaceSpec, steps: usize, opts: &SurfaceOptions) -> Result<Vec<SurfaceStep>> {
    let w = opts.weights;
    match (a, b) {
        (SurfaceSpec::Tube(x), SurfaceSpec::Tube(y)) => {
            flat_geodesic(&tube_encode(x, w.mu), &tube_encode(y, w.mu), steps, opts.align)?
                .into_iter()
                .map(|(tau, c)| {
                    let spec = tube_decode(&c, w.mu)?;
                    let mesh = tube_mesh(&spec, opts.circle_samples)?;
                    Ok(SurfaceStep { tau, spec: SurfaceSpec::Tube(spec), mesh, ruling_correction: 0.0 })
                })
                .collect()
        }
        (SurfaceSpec::Ruled(x), SurfaceSpec::Ruled(y)) => {
            flat_geodesic(&ruled_encode(x, w.nu), &ruled_encode(y, w.nu), steps, opts.align)?
                .into_iter()
                .map(|(tau, c)| {
                    let dec = ruled_decode(&c, w.nu)?;
                    let mesh = ruled_mesh(&dec.spec, opts.s_samples)?;
                    Ok(SurfaceStep { tau, spec: SurfaceSpec::Ruled(dec.spec), mesh, ruling_correction: dec.max_correction })
                })
                .collect()
        }
        (SurfaceSpec::Strip(x), SurfaceSpec::Strip(y)) => {
            let hopts = HomoOptions { lambda: w.lambda, reparametrize: opts.align, ..Default::default() };
            homo_geodesic(&x.encode(), &y.encode(), steps, &hopts)?
                .into_iter()
                .map(|step| {
                    let spec = StripSpec::decode(&step.curve)?;
                    let mesh = strip_mesh(&spec, opts.s_samples)?;
                    Ok(SurfaceStep { tau: step.tau, spec: SurfaceSpec::Strip(spec), mesh, ruling_correction: 0.0 })
                })
                .collect()
        }
        _ => Err(Error::ShapeMismatch(format!("cannot interpolate a {} into a {}", a.class(), b.class()))),
    }
}
