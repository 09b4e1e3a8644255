//! Square root velocity representation of curves in `ℝ^d`.
//!
//! `q = ċ/√|ċ|` turns the elastic metric with tangential weight `1/4` and
//! normal weight `1` into the flat `L²` metric, so distances are plain
//! `L²` norms and geodesics are straight lines in `q`.

use nalgebra::DMatrix;

use crate::curve::{norm, DiscreteCurve};
use crate::diff;
use crate::error::{Error, Result};

/// SRV representative of a curve: `q` at every sample plus the basepoint
/// `c(0)` that fixes the translation.
#[derive(Clone, Debug, PartialEq)]
pub struct SrvCurve {
    dim: usize,
    closed: bool,
    q: Vec<f64>,
    basepoint: Vec<f64>,
}

impl SrvCurve {
    pub fn new(dim: usize, closed: bool, q: Vec<f64>, basepoint: Vec<f64>) -> Result<Self> {
        if dim == 0 || q.len() % dim != 0 || q.len() / dim < 3 {
            return Err(Error::InvalidInput("SRV curve needs at least 3 samples of a fixed dimension".into()));
        }
        if basepoint.len() != dim {
            return Err(Error::InvalidInput("basepoint dimension does not match".into()));
        }
        Ok(Self { dim, closed, q, basepoint })
    }

    pub fn len(&self) -> usize {
        self.q.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn basepoint(&self) -> &[f64] {
        &self.basepoint
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn sample(&self, i: usize) -> &[f64] {
        &self.q[i * self.dim..(i + 1) * self.dim]
    }

    /// The samples of `q` read as a curve of their own (the SRV image).
    pub fn image(&self) -> DiscreteCurve {
        DiscreteCurve::new(self.dim, self.closed, self.q.clone()).expect("validated on construction")
    }

    /// `√(∫|q|² dt)`, which equals the square root of the curve length.
    pub fn l2_norm(&self) -> f64 {
        let sq: Vec<f64> = self.q.chunks(self.dim).map(|v| v.iter().map(|x| x * x).sum()).collect();
        diff::integrate(&sq, self.closed).sqrt()
    }

    /// `|∫ q|q| dt|`: how far the reconstructed curve fails to close.
    pub fn closure_gap(&self) -> f64 {
        let v = velocity_from_q(&self.q, self.dim);
        let w = diff::trapezoid_weights(self.len(), self.closed);
        let gap: Vec<f64> = (0..self.dim)
            .map(|k| v.chunks(self.dim).zip(&w).map(|(p, w)| p[k] * w).sum())
            .collect();
        norm(&gap)
    }

    /// `q ↦ R q` sample by sample (the basepoint is rotated too).
    pub fn rotated(&self, rotation: &DMatrix<f64>) -> Self {
        let d = self.dim;
        let rot = |p: &[f64]| -> Vec<f64> {
            (0..d).map(|r| (0..d).map(|c| rotation[(r, c)] * p[c]).sum()).collect()
        };
        Self {
            dim: d,
            closed: self.closed,
            q: self.q.chunks(d).flat_map(rot).collect(),
            basepoint: rot(&self.basepoint),
        }
    }

    /// Cyclic shift by `k` samples (seed-point change of a closed curve).
    pub fn shifted(&self, k: usize) -> Self {
        let n = self.len();
        let q = (0..n).flat_map(|i| self.sample((i + k) % n).to_vec()).collect();
        Self { dim: self.dim, closed: self.closed, q, basepoint: self.basepoint.clone() }
    }

    fn check_compatible(&self, other: &SrvCurve) -> Result<()> {
        if self.dim != other.dim || self.len() != other.len() || self.closed != other.closed {
            return Err(Error::ShapeMismatch(format!(
                "(N={}, d={}, closed={}) vs (N={}, d={}, closed={})",
                self.len(),
                self.dim,
                self.closed,
                other.len(),
                other.dim,
                other.closed
            )));
        }
        Ok(())
    }
}

fn velocity_from_q(q: &[f64], dim: usize) -> Vec<f64> {
    q.chunks(dim)
        .flat_map(|v| {
            let s = norm(v);
            v.iter().map(move |x| x * s).collect::<Vec<_>>()
        })
        .collect()
}

/// `q = ċ/√|ċ|`; fails on the first sample slower than `ε_speed`.
pub fn srv_transform(c: &DiscreteCurve) -> Result<SrvCurve> {
    let eps = c.speed_tolerance();
    if eps == 0.0 {
        return Err(Error::DegenerateCurve);
    }
    let vel = c.velocity();
    let mut q = Vec::with_capacity(vel.len());
    for (i, v) in vel.chunks(c.dim()).enumerate() {
        let w = norm(v);
        if w < eps {
            return Err(Error::NotImmersion { index: i });
        }
        let s = w.sqrt();
        q.extend(v.iter().map(|x| x / s));
    }
    SrvCurve::new(c.dim(), c.is_closed(), q, c.point(0).to_vec())
}

/// Reconstructs `c` from `ċ = q|q|` and the basepoint.
///
/// Integration is the exact inverse of the finite-difference derivative used
/// by [`srv_transform`], so a round trip reproduces the input up to rounding.
pub fn srv_inverse(s: &SrvCurve) -> DiscreteCurve {
    let v = velocity_from_q(&s.q, s.dim);
    let data = diff::antiderivative(&v, s.dim, s.closed, &s.basepoint);
    DiscreteCurve::new(s.dim, s.closed, data).expect("shape preserved")
}

/// Flat `L²` distance `√(∫|q₁ − q₂|² dt)`; basepoints are ignored.
pub fn l2_distance(a: &SrvCurve, b: &SrvCurve) -> Result<f64> {
    a.check_compatible(b)?;
    Ok(l2_distance_unchecked(&a.q, &b.q, a.dim, a.closed))
}

pub(crate) fn l2_distance_unchecked(a: &[f64], b: &[f64], dim: usize, closed: bool) -> f64 {
    let sq: Vec<f64> = a
        .chunks(dim)
        .zip(b.chunks(dim))
        .map(|(x, y)| x.iter().zip(y).map(|(u, v)| (u - v).powi(2)).sum())
        .collect();
    diff::integrate(&sq, closed).max(0.0).sqrt()
}

/// One curve along a geodesic in SRV coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicStep {
    pub tau: f64,
    pub srv: SrvCurve,
    pub curve: DiscreteCurve,
    /// False where `q` vanishes somewhere and the curve stalls.
    pub immersed: bool,
    /// Closure gap of the interpolated `q` (zero for open curves).
    pub closure_gap: f64,
}

/// Straight line between the SRV representatives of `c0` and `c1`,
/// reconstructed at `steps` equally spaced times including both ends.
pub fn srv_geodesic(c0: &DiscreteCurve, c1: &DiscreteCurve, steps: usize) -> Result<Vec<GeodesicStep>> {
    let s0 = srv_transform(c0)?;
    let s1 = srv_transform(c1)?;
    srv_geodesic_between(&s0, &s1, steps)
}

/// [`srv_geodesic`] for representatives that are already transformed (and
/// possibly aligned).
pub fn srv_geodesic_between(s0: &SrvCurve, s1: &SrvCurve, steps: usize) -> Result<Vec<GeodesicStep>> {
    s0.check_compatible(s1)?;
    if steps < 2 {
        return Err(Error::InvalidInput("a geodesic needs at least 2 steps".into()));
    }
    (0..steps)
        .map(|k| {
            let tau = k as f64 / (steps - 1) as f64;
            let lerp = |a: &[f64], b: &[f64]| -> Vec<f64> {
                a.iter().zip(b).map(|(x, y)| (1.0 - tau) * x + tau * y).collect()
            };
            let srv = SrvCurve::new(s0.dim, s0.closed, lerp(&s0.q, &s1.q), lerp(&s0.basepoint, &s1.basepoint))?;
            let curve = srv_inverse(&srv);
            let immersed = curve.validate_immersion().is_ok();
            let closure_gap = if srv.closed { srv.closure_gap() } else { 0.0 };
            Ok(GeodesicStep { tau, srv, curve, immersed, closure_gap })
        })
        .collect()
}

/// Sum of `L²` distances between consecutive steps of a path.
pub fn path_length(path: &[GeodesicStep]) -> Result<f64> {
    path.windows(2).map(|w| l2_distance(&w[0].srv, &w[1].srv)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn segment_has_constant_q() {
        let c = DiscreteCurve::from_fn(9, false, |t| [t, 0.0]).unwrap();
        let s = srv_transform(&c).unwrap();
        assert_eq!(s.basepoint(), &[0.0, 0.0]);
        for v in s.q().chunks(2) {
            assert!((v[0] - 1.0).abs() < 1e-12 && v[1].abs() < 1e-12);
        }
    }

    #[test]
    fn circle_q_matches_closed_form() {
        let c = DiscreteCurve::from_fn(512, true, |t| [(TAU * t).cos(), (TAU * t).sin()]).unwrap();
        let s = srv_transform(&c).unwrap();
        let r = TAU.sqrt();
        for (v, t) in s.q().chunks(2).zip(c.parameters()) {
            assert!((v[0] + r * (TAU * t).sin()).abs() < 1e-3);
            assert!((v[1] - r * (TAU * t).cos()).abs() < 1e-3);
        }
    }

    #[test]
    fn stretched_segment_matches_analytic_q() {
        let c = DiscreteCurve::from_fn(1024, false, |t| [t * t + t, 0.0]).unwrap();
        let s = srv_transform(&c).unwrap();
        for (v, t) in s.q().chunks(2).zip(c.parameters()) {
            assert!((v[0] - (2.0 * t + 1.0).sqrt()).abs() < 1e-3);
        }
    }

    #[test]
    fn transform_reports_first_stalled_sample() {
        let c = DiscreteCurve::from_points(&[[0.0, 0.0], [1.0, 0.0], [1.0, 0.0], [1.0, 0.0], [1.0, 0.0], [1.0, 0.0], [1.0, 0.0]], false)
            .unwrap();
        assert_eq!(srv_transform(&c), Err(Error::NotImmersion { index: 3 }));
    }

    #[test]
    fn inverse_of_constant_q() {
        let s = SrvCurve::new(2, false, [1.0, 0.0].repeat(5), vec![0.0, 0.0]).unwrap();
        let c = srv_inverse(&s);
        for (i, p) in c.points().enumerate() {
            assert!((p[0] - i as f64 / 4.0).abs() < 1e-14 && p[1].abs() < 1e-14);
        }
        let zero = SrvCurve::new(2, false, vec![0.0; 10], vec![3.0, 4.0]).unwrap();
        assert!(srv_inverse(&zero).points().all(|p| p == [3.0, 4.0]));
    }

    #[test]
    fn round_trip_on_constant_speed_circle() {
        let c = DiscreteCurve::from_fn(512, true, |t| [(TAU * t).cos(), (TAU * t).sin()]).unwrap();
        let back = srv_inverse(&srv_transform(&c).unwrap());
        for (a, b) in c.as_slice().iter().zip(back.as_slice()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn distance_examples() {
        let a = SrvCurve::new(2, false, [1.0, 0.0].repeat(7), vec![0.0, 0.0]).unwrap();
        let b = SrvCurve::new(2, false, [0.0, 1.0].repeat(7), vec![5.0, 0.0]).unwrap();
        assert_eq!(l2_distance(&a, &a).unwrap(), 0.0);
        assert!((l2_distance(&a, &b).unwrap() - 2f64.sqrt()).abs() < 1e-14);
        let c = SrvCurve::new(2, true, [0.0, 1.0].repeat(7), vec![5.0, 0.0]).unwrap();
        assert!(matches!(l2_distance(&a, &c), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn circles_of_radius_one_and_four() {
        let circle = |r: f64| DiscreteCurve::from_fn(1024, true, move |t| [r * (TAU * t).cos(), r * (TAU * t).sin()]).unwrap();
        let d = l2_distance(&srv_transform(&circle(1.0)).unwrap(), &srv_transform(&circle(4.0)).unwrap()).unwrap();
        assert!((d - TAU.sqrt()).abs() < 1e-3);
    }

    #[test]
    fn geodesic_midpoint_of_two_segments() {
        let c0 = DiscreteCurve::from_fn(11, false, |t| [t, 0.0]).unwrap();
        let c1 = DiscreteCurve::from_fn(11, false, |t| [0.0, t]).unwrap();
        let path = srv_geodesic(&c0, &c1, 3).unwrap();
        for v in path[1].srv.q().chunks(2) {
            assert!((v[0] - 0.5).abs() < 1e-12 && (v[1] - 0.5).abs() < 1e-12);
        }
        // |q_mid| = 1/√2, so the speed |q|² is 1/2 and the segment has length 1/2
        let end = path[1].curve.point(10);
        let expected = 0.5 / 2f64.sqrt();
        assert!((end[0] - expected).abs() < 1e-12 && (end[1] - expected).abs() < 1e-12);
        assert!((path[1].curve.polygon_length() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn two_step_geodesic_is_the_endpoints() {
        let c0 = DiscreteCurve::from_fn(64, false, |t| [t, t * t]).unwrap();
        let c1 = DiscreteCurve::from_fn(64, false, |t| [t.sin(), 2.0 * t]).unwrap();
        let path = srv_geodesic(&c0, &c1, 2).unwrap();
        assert_eq!(path.len(), 2);
        for (a, b) in path[0].curve.as_slice().iter().zip(c0.as_slice()) {
            assert!((a - b).abs() < 1e-10);
        }
        for (a, b) in path[1].curve.as_slice().iter().zip(c1.as_slice()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn geodesic_path_length_equals_distance() {
        let c0 = DiscreteCurve::from_fn(128, true, |t| [(TAU * t).cos(), (TAU * t).sin()]).unwrap();
        let c1 = DiscreteCurve::from_fn(128, true, |t| [2.0 * (TAU * t).cos(), 0.5 * (TAU * t).sin()]).unwrap();
        let path = srv_geodesic(&c0, &c1, 9).unwrap();
        let d = l2_distance(&path[0].srv, &path[8].srv).unwrap();
        assert!((path_length(&path).unwrap() - d).abs() < 1e-10);
        assert!(path.iter().all(|s| s.closure_gap < 1e-2));
    }

    #[test]
    fn geodesic_flags_stalled_intermediate() {
        let c0 = DiscreteCurve::from_fn(11, false, |t| [t, 0.0]).unwrap();
        let c1 = DiscreteCurve::from_fn(11, false, |t| [-t, 0.0]).unwrap();
        let path = srv_geodesic(&c0, &c1, 3).unwrap();
        assert!(path[0].immersed && path[2].immersed);
        assert!(!path[1].immersed);
    }
}
