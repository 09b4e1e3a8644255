//! Discrete curves and their finite-difference differential geometry.

use nalgebra::{DMatrix, Vector3};

use crate::diff;
use crate::error::{Error, Result};

/// Relative speed threshold below which a sample counts as non-immersed.
pub const SPEED_EPS_REL: f64 = 1e-8;
/// Minimum `|Ṫ|` for the Frenet normal to be used.
pub const FRAME_EPS: f64 = 1e-6;

/// A uniformly sampled curve in `ℝ^d` over the parameter domain `[0, 1]`.
///
/// Open curves put sample `i` at `t = i/(N-1)`; closed curves at `t = i/N`
/// and do not store the duplicated endpoint.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteCurve {
    dim: usize,
    closed: bool,
    data: Vec<f64>,
}

impl DiscreteCurve {
    /// Builds a curve from flat row-major coordinates.
    pub fn new(dim: usize, closed: bool, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        if data.len() % dim != 0 {
            return Err(Error::InvalidInput(format!(
                "{} coordinates do not split into points of dimension {dim}",
                data.len()
            )));
        }
        if data.len() / dim < 3 {
            return Err(Error::InvalidInput("a curve needs at least 3 samples".into()));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite coordinate in sample {}", i / dim)));
        }
        Ok(Self { dim, closed, data })
    }

    pub fn from_points<P: AsRef<[f64]>>(points: &[P], closed: bool) -> Result<Self> {
        let dim = points.first().map(|p| p.as_ref().len()).unwrap_or(0);
        if let Some(i) = points.iter().position(|p| p.as_ref().len() != dim) {
            return Err(Error::InvalidInput(format!("sample {i} has the wrong dimension")));
        }
        let data = points.iter().flat_map(|p| p.as_ref().iter().copied()).collect();
        Self::new(dim, closed, data)
    }

    /// Samples `f(t)` at the `n` parameter values of the domain.
    pub fn from_fn<const D: usize>(n: usize, closed: bool, f: impl Fn(f64) -> [f64; D]) -> Result<Self> {
        let data = diff::parameters(n.max(1), closed)
            .into_iter()
            .flat_map(f)
            .collect();
        Self::new(D, closed, data)
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.data.chunks(self.dim)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// Parameter spacing `Δt`.
    pub fn dt(&self) -> f64 {
        diff::spacing(self.len(), self.closed)
    }

    pub fn parameters(&self) -> Vec<f64> {
        diff::parameters(self.len(), self.closed)
    }

    /// Diagonal of the axis-aligned bounding box.
    pub fn bbox_diagonal(&self) -> f64 {
        (0..self.dim)
            .map(|k| {
                let (lo, hi) = self.points().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                    (lo.min(p[k]), hi.max(p[k]))
                });
                (hi - lo).powi(2)
            })
            .sum::<f64>()
            .sqrt()
    }

    /// `ε_speed`: the scale-relative immersion threshold.
    pub fn speed_tolerance(&self) -> f64 {
        SPEED_EPS_REL * self.bbox_diagonal()
    }

    /// `ċ` at every sample, flat row-major.
    pub fn velocity(&self) -> Vec<f64> {
        diff::per_component(&self.data, self.dim, |c| diff::derivative(c, self.closed))
    }

    /// `c̈` at every sample, flat row-major.
    pub fn acceleration(&self) -> Vec<f64> {
        diff::per_component(&self.data, self.dim, |c| diff::second_derivative(c, self.closed))
    }

    /// Length of the sample polygon (including the closing edge when closed).
    pub fn polygon_length(&self) -> f64 {
        segment_lengths(self).iter().sum()
    }

    /// Checks `ω_i ≥ ε_speed` at every sample.
    pub fn validate_immersion(&self) -> Result<()> {
        let eps = self.speed_tolerance();
        if eps == 0.0 {
            return Err(Error::DegenerateCurve);
        }
        match speed(self).iter().position(|&w| w < eps) {
            Some(index) => Err(Error::NotImmersion { index }),
            None => Ok(()),
        }
    }

    /// Applies `p ↦ R p + v` to every sample.
    pub fn rigid_motion(&self, rotation: &DMatrix<f64>, translation: &[f64]) -> Self {
        let d = self.dim;
        let data = self
            .points()
            .flat_map(|p| {
                (0..d).map(move |r| {
                    (0..d).map(|c| rotation[(r, c)] * p[c]).sum::<f64>() + translation[r]
                })
            })
            .collect();
        Self { dim: d, closed: self.closed, data }
    }

    /// Cyclic shift of the seed point: sample `i` of the result is sample
    /// `i + k` of `self`. Meaningful for closed curves.
    pub fn shifted(&self, k: usize) -> Self {
        let n = self.len();
        let data = (0..n).flat_map(|i| self.point((i + k) % n).to_vec()).collect();
        Self { dim: self.dim, closed: self.closed, data }
    }

    /// Piecewise-linear interpolation at parameter `t` (periodic when closed).
    pub fn sample_at(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        interpolate_into(&self.data, self.dim, self.closed, t, &mut out);
        out
    }
}

/// Linear interpolation of a flat sequence at parameter `t ∈ [0,1]`.
pub(crate) fn interpolate_into(data: &[f64], dim: usize, closed: bool, t: f64, out: &mut [f64]) {
    let n = data.len() / dim;
    let (i0, i1, frac) = if closed {
        let x = t.rem_euclid(1.0) * n as f64;
        let i = (x.floor() as usize).min(n - 1);
        (i, (i + 1) % n, x - i as f64)
    } else {
        let x = t.clamp(0.0, 1.0) * (n - 1) as f64;
        let i = (x.floor() as usize).min(n - 2);
        (i, i + 1, x - i as f64)
    };
    for k in 0..dim {
        let a = data[i0 * dim + k];
        let b = data[i1 * dim + k];
        out[k] = a + frac * (b - a);
    }
}

fn segment_lengths(c: &DiscreteCurve) -> Vec<f64> {
    let n = c.len();
    let edges = if c.closed { n } else { n - 1 };
    (0..edges)
        .map(|i| distance(c.point(i), c.point((i + 1) % n)))
        .collect()
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Resamples `c` to `m` points equally spaced in polygon arc length.
pub fn resample_uniform(c: &DiscreteCurve, m: usize) -> Result<DiscreteCurve> {
    if m < 3 {
        return Err(Error::InvalidInput("resampling needs at least 3 samples".into()));
    }
    let seg = segment_lengths(c);
    let total: f64 = seg.iter().sum();
    if total <= c.speed_tolerance() {
        return Err(Error::DegenerateCurve);
    }
    let n = c.len();
    let d = c.dim;
    let step = if c.closed { total / m as f64 } else { total / (m - 1) as f64 };
    let mut out = Vec::with_capacity(m * d);
    let mut edge = 0;
    let mut edge_start = 0.0;
    for k in 0..m {
        let s = if !c.closed && k == m - 1 { total } else { k as f64 * step };
        while edge + 1 < seg.len() && edge_start + seg[edge] < s {
            edge_start += seg[edge];
            edge += 1;
        }
        let a = c.point(edge);
        let b = c.point((edge + 1) % n);
        let frac = if seg[edge] > 0.0 {
            ((s - edge_start) / seg[edge]).clamp(0.0, 1.0)
        } else {
            0.0
        };
        out.extend((0..d).map(|j| a[j] + frac * (b[j] - a[j])));
    }
    DiscreteCurve::new(d, c.closed, out)
}

/// Per-sample speed `ω = |ċ|`.
pub fn speed(c: &DiscreteCurve) -> Vec<f64> {
    c.velocity().chunks(c.dim).map(norm).collect()
}

/// Signed curvature `κ = (ċ × c̈)/ω³` of a plane curve; positive for a
/// counterclockwise circle.
pub fn plane_curvature(c: &DiscreteCurve) -> Result<Vec<f64>> {
    plane_curvature_masked(c)?
        .into_iter()
        .enumerate()
        .map(|(i, k)| k.ok_or(Error::NotImmersion { index: i }))
        .collect()
}

/// Like [`plane_curvature`], with `None` where the speed is below
/// [`DiscreteCurve::speed_tolerance`] instead of an error.
pub fn plane_curvature_masked(c: &DiscreteCurve) -> Result<Vec<Option<f64>>> {
    if c.dim != 2 {
        return Err(Error::ShapeMismatch(format!("plane curvature needs d = 2, got {}", c.dim)));
    }
    let eps = c.speed_tolerance();
    let vel = c.velocity();
    let acc = c.acceleration();
    Ok(vel
        .chunks(2)
        .zip(acc.chunks(2))
        .map(|(v, a)| {
            let w = norm(v);
            (w >= eps && w > 0.0).then(|| (v[0] * a[1] - v[1] * a[0]) / w.powi(3))
        })
        .collect())
}

/// Orthonormal moving frame along a space curve.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameField {
    pub tangent: Vec<Vector3<f64>>,
    pub normal: Vec<Vector3<f64>>,
    pub binormal: Vec<Vector3<f64>>,
    /// Samples whose normal came from the rotation-minimizing fallback.
    pub fallback: Vec<bool>,
}

impl FrameField {
    pub fn len(&self) -> usize {
        self.tangent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tangent.is_empty()
    }
}

/// Frenet frame `(T, N, B)` of a curve in `ℝ³`.
///
/// Where `|Ṫ| < FRAME_EPS` the normal is carried over from a neighbouring
/// sample by the double-reflection rotation-minimizing rule.
pub fn frenet_frame(c: &DiscreteCurve) -> Result<FrameField> {
    if c.dim != 3 {
        return Err(Error::ShapeMismatch(format!("Frenet frame needs d = 3, got {}", c.dim)));
    }
    let eps = c.speed_tolerance();
    let n = c.len();
    let w = speed(c);
    if eps == 0.0 || w.iter().all(|&s| s < eps) {
        return Err(Error::DegenerateCurve);
    }
    if let Some(index) = w.iter().position(|&s| s < eps) {
        return Err(Error::NotImmersion { index });
    }
    let vel = c.velocity();
    let tangent: Vec<Vector3<f64>> = vel
        .chunks(3)
        .zip(&w)
        .map(|(v, s)| Vector3::new(v[0], v[1], v[2]) / *s)
        .collect();
    let flat_t: Vec<f64> = tangent.iter().flat_map(|t| [t.x, t.y, t.z]).collect();
    let t_dot = diff::per_component(&flat_t, 3, |col| diff::derivative(col, c.closed));

    let mut normal: Vec<Option<Vector3<f64>>> = t_dot
        .chunks(3)
        .zip(&tangent)
        .map(|(d, t)| {
            let d = Vector3::new(d[0], d[1], d[2]);
            if d.norm() < FRAME_EPS {
                return None;
            }
            let p = d - t * t.dot(&d);
            (p.norm() > 0.0).then(|| p.normalize())
        })
        .collect();
    let fallback: Vec<bool> = normal.iter().map(Option::is_none).collect();
    let pos = |i: usize| Vector3::new(c.point(i)[0], c.point(i)[1], c.point(i)[2]);

    let first = match normal.iter().position(Option::is_some) {
        Some(i) => i,
        None => {
            normal[0] = Some(any_perpendicular(&tangent[0]));
            0
        }
    };
    for i in (0..first).rev() {
        let r = double_reflection(pos(i + 1), tangent[i + 1], normal[i + 1].unwrap(), pos(i), tangent[i]);
        normal[i] = Some(r);
    }
    for i in first + 1..n {
        if normal[i].is_none() {
            let r = double_reflection(pos(i - 1), tangent[i - 1], normal[i - 1].unwrap(), pos(i), tangent[i]);
            normal[i] = Some(r);
        }
    }
    let normal: Vec<Vector3<f64>> = normal.into_iter().map(Option::unwrap).collect();
    let binormal = tangent.iter().zip(&normal).map(|(t, n)| t.cross(n)).collect();
    Ok(FrameField { tangent, normal, binormal, fallback })
}

fn any_perpendicular(t: &Vector3<f64>) -> Vector3<f64> {
    let axis = if t.x.abs() <= t.y.abs() && t.x.abs() <= t.z.abs() {
        Vector3::x()
    } else if t.y.abs() <= t.z.abs() {
        Vector3::y()
    } else {
        Vector3::z()
    };
    t.cross(&axis).normalize()
}

/// Transports the normal `r_a` from `(x_a, t_a)` to `(x_b, t_b)`.
fn double_reflection(
    x_a: Vector3<f64>,
    t_a: Vector3<f64>,
    r_a: Vector3<f64>,
    x_b: Vector3<f64>,
    t_b: Vector3<f64>,
) -> Vector3<f64> {
    let v1 = x_b - x_a;
    let c1 = v1.norm_squared();
    let (r_l, t_l) = if c1 > 1e-300 {
        (r_a - v1 * (2.0 / c1 * v1.dot(&r_a)), t_a - v1 * (2.0 / c1 * v1.dot(&t_a)))
    } else {
        (r_a, t_a)
    };
    let v2 = t_b - t_l;
    let c2 = v2.norm_squared();
    let r = if c2 > 1e-300 { r_l - v2 * (2.0 / c2 * v2.dot(&r_l)) } else { r_l };
    let r = r - t_b * t_b.dot(&r);
    if r.norm() > 1e-12 {
        r.normalize()
    } else {
        any_perpendicular(&t_b)
    }
}
