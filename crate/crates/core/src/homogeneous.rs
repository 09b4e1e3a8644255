//! SRV framework on `S² = SO(3)/SO(2)` and on `S² × ℝ`.
//!
//! A sphere curve is lifted horizontally to `SO(3)`, its body velocity
//! `ξ = v/√|v|` plays the role of the SRV, and distances take the infimum over
//! the stabilizer `K = SO(2)` of `e₃`. An optional scalar channel rides along
//! as an ordinary one-dimensional SRV.

use nalgebra::{Matrix3, Vector3};

use crate::curve::SPEED_EPS_REL;
use crate::error::{Error, Result};
use crate::registration::{default_grid, extended_slopes, DpGrid, Warp};
use crate::so3;
use crate::srv::SrvCurve;

/// Open curve on the unit sphere, optionally with one synchronized scalar
/// channel. Parameter samples are uniform on `[0,1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereCurve {
    points: Vec<Vector3<f64>>,
    aux: Option<Vec<f64>>,
}

impl SphereCurve {
    pub fn new(points: Vec<Vector3<f64>>, aux: Option<Vec<f64>>) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::InvalidInput(format!("sphere curve needs at least 3 samples, got {}", points.len())));
        }
        if let Some(i) = points.iter().position(|p| (p.norm() - 1.0).abs() > 1e-10 || !p.iter().all(|x| x.is_finite())) {
            return Err(Error::InvalidInput(format!("sample {i} is not a unit vector")));
        }
        if let Some(a) = &aux {
            if a.len() != points.len() {
                return Err(Error::ShapeMismatch(format!("{} points but {} aux values", points.len(), a.len())));
            }
            if !a.iter().all(|x| x.is_finite()) {
                return Err(Error::InvalidInput("aux channel has non-finite values".into()));
            }
        }
        Ok(Self { points, aux })
    }

    /// Samples `f` and projects every value onto the sphere.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> [f64; 3]) -> Result<Self> {
        let points = (0..n)
            .map(|i| Vector3::from(f(i as f64 / (n.max(2) - 1) as f64)).normalize())
            .collect();
        Self::new(points, None)
    }

    pub fn with_aux(self, aux: Vec<f64>) -> Result<Self> {
        Self::new(self.points, Some(aux))
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vector3<f64>] {
        &self.points
    }

    pub fn aux(&self) -> Option<&[f64]> {
        self.aux.as_deref()
    }

    pub fn dt(&self) -> f64 {
        1.0 / (self.len() - 1) as f64
    }

    pub fn rotated(&self, r: &Matrix3<f64>) -> Self {
        Self { points: self.points.iter().map(|p| (r * p).normalize()).collect(), aux: self.aux.clone() }
    }

    /// Great-circle step angles divided by `Δt`, one per interval.
    pub fn spherical_speed(&self) -> Vec<f64> {
        let dt = self.dt();
        self.points.windows(2).map(|w| step_angle(&w[0], &w[1]) / dt).collect()
    }

    fn speed_tolerance(&self) -> f64 {
        let mut lo = Vector3::repeat(f64::INFINITY);
        let mut hi = Vector3::repeat(f64::NEG_INFINITY);
        for p in &self.points {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        SPEED_EPS_REL * (hi - lo).norm()
    }
}

fn step_angle(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

fn slerp(a: &Vector3<f64>, b: &Vector3<f64>, f: f64) -> Vector3<f64> {
    let omega = step_angle(a, b);
    if omega < 1e-12 {
        return (a + (b - a) * f).normalize();
    }
    let s = omega.sin();
    (a * (((1.0 - f) * omega).sin() / s) + b * ((f * omega).sin() / s)).normalize()
}

/// Resamples to `n` points equally spaced in great-circle arc length; the
/// aux channel is interpolated linearly in the same fraction.
pub fn resample_sphere(c: &SphereCurve, n: usize) -> Result<SphereCurve> {
    if n < 3 {
        return Err(Error::InvalidInput("resampling needs at least 3 samples".into()));
    }
    let mut arc = vec![0.0];
    for w in c.points.windows(2) {
        let last = *arc.last().unwrap();
        arc.push(last + step_angle(&w[0], &w[1]));
    }
    let total = *arc.last().unwrap();
    if total <= 0.0 {
        return Err(Error::DegenerateCurve);
    }
    let mut seg = 0;
    let mut points = Vec::with_capacity(n);
    let mut aux = c.aux.as_ref().map(|_| Vec::with_capacity(n));
    for k in 0..n {
        let s = total * k as f64 / (n - 1) as f64;
        while seg + 2 < arc.len() && (arc[seg + 1] < s || arc[seg + 1] == arc[seg]) {
            seg += 1;
        }
        let len = arc[seg + 1] - arc[seg];
        let f = if len > 0.0 { ((s - arc[seg]) / len).clamp(0.0, 1.0) } else { 1.0 };
        let f = if k == n - 1 { 1.0 } else { f };
        points.push(slerp(&c.points[seg], &c.points[seg + 1], f));
        if let (Some(out), Some(a)) = (aux.as_mut(), c.aux.as_ref()) {
            out.push(a[seg] + f * (a[seg + 1] - a[seg]));
        }
    }
    SphereCurve::new(points, aux)
}

/// `exp_x(v) = cos|v| x + sin|v| v/|v|`.
pub fn sphere_exp(x: &Vector3<f64>, v: &Vector3<f64>) -> Result<Vector3<f64>> {
    if x.dot(v).abs() > 1e-8 {
        return Err(Error::InvalidInput("vector is not tangent at the base point".into()));
    }
    let t = v.norm();
    if t == 0.0 {
        return Ok(*x);
    }
    Ok(x * t.cos() + v * (t.sin() / t))
}

/// Curve in `SO(3)` sampled like its sphere curve.
#[derive(Clone, Debug, PartialEq)]
pub struct RotationCurve {
    frames: Vec<Matrix3<f64>>,
}

impl RotationCurve {
    pub fn new(frames: Vec<Matrix3<f64>>) -> Result<Self> {
        if frames.len() < 2 {
            return Err(Error::InvalidInput("rotation curve needs at least 2 frames".into()));
        }
        if let Some(i) = frames.iter().position(|f| !so3::is_rotation(f, 1e-8)) {
            return Err(Error::InvalidInput(format!("frame {i} is not a rotation")));
        }
        Ok(Self { frames })
    }

    pub fn frames(&self) -> &[Matrix3<f64>] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// `α·e₃` for every frame.
    pub fn project(&self) -> Vec<Vector3<f64>> {
        self.frames.iter().map(|f| f.column(2).into_owned()).collect()
    }

    /// Body velocity `log(α_iᵀα_{i+1})/Δt` per interval.
    pub fn body_velocity(&self) -> Vec<Vector3<f64>> {
        let dt = 1.0 / (self.len() - 1) as f64;
        self.frames.windows(2).map(|w| so3::log(&(w[0].transpose() * w[1])) / dt).collect()
    }
}

/// Lifts with the adapted frame at `γ(0)` as the initial frame.
pub fn horizontal_lift(g: &SphereCurve) -> Result<RotationCurve> {
    horizontal_lift_from(g, &so3::adapted_frame(&g.points[0]))
}

/// Horizontal lift starting at `frame`, which must satisfy `frame·e₃ = γ(0)`.
/// Each step left-multiplies by the minimal rotation taking `γ_i` to `γ_{i+1}`.
pub fn horizontal_lift_from(g: &SphereCurve, frame: &Matrix3<f64>) -> Result<RotationCurve> {
    if !so3::is_rotation(frame, 1e-8) || (frame.column(2) - g.points[0]).norm() > 1e-8 {
        return Err(Error::InvalidInput("initial frame must be a rotation with third column γ(0)".into()));
    }
    let tol = g.speed_tolerance();
    if tol == 0.0 {
        return Err(Error::DegenerateCurve);
    }
    let dt = g.dt();
    let mut frames = Vec::with_capacity(g.len());
    frames.push(*frame);
    for (i, w) in g.points.windows(2).enumerate() {
        if step_angle(&w[0], &w[1]) / dt < tol {
            return Err(Error::NotImmersion { index: i });
        }
        let m = so3::minimal_rotation(&w[0], &w[1]).ok_or(Error::LiftUndefined { index: i })?;
        let next = m * frames[i];
        frames.push(next);
    }
    Ok(RotationCurve { frames })
}

/// `(α(0), ξ)` with one `ξ_i = v_i/√|v_i|` per sampling interval.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraSrv {
    pub start: Matrix3<f64>,
    pub xi: Vec<Vector3<f64>>,
}

impl AlgebraSrv {
    /// Number of frames of the curve this represents.
    pub fn samples(&self) -> usize {
        self.xi.len() + 1
    }

    /// `Ad_{k⁻¹}` for `k = rot_z(theta)`: every `ξ` rotated by `kᵀ`.
    pub fn ad_inverse(&self, theta: f64) -> Vec<Vector3<f64>> {
        let kt = so3::rot_z(theta).transpose();
        self.xi.iter().map(|x| kt * x).collect()
    }
}

pub fn group_srv(a: &RotationCurve) -> Result<AlgebraSrv> {
    let mut xi = Vec::with_capacity(a.len() - 1);
    for (i, v) in a.body_velocity().into_iter().enumerate() {
        let s = v.norm();
        if s == 0.0 || !s.is_finite() {
            return Err(Error::NotImmersion { index: i });
        }
        xi.push(v / s.sqrt());
    }
    Ok(AlgebraSrv { start: a.frames[0], xi })
}

/// Exponential stepping `α_{i+1} = α_i exp(ξ_i|ξ_i|Δt)`.
pub fn group_srv_inverse(s: &AlgebraSrv) -> RotationCurve {
    let dt = 1.0 / s.xi.len() as f64;
    let mut frames = Vec::with_capacity(s.samples());
    frames.push(s.start);
    for (i, x) in s.xi.iter().enumerate() {
        let next = frames[i] * so3::exp(&(x * (x.norm() * dt)));
        frames.push(next);
    }
    RotationCurve { frames }
}

/// Scalar SRV `sign(ȧ)√|ȧ|` per interval plus the starting value.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarSrv {
    pub start: f64,
    pub q: Vec<f64>,
}

pub fn scalar_srv(a: &[f64]) -> ScalarSrv {
    let dt = 1.0 / (a.len() - 1) as f64;
    let q = a
        .windows(2)
        .map(|w| {
            let v = (w[1] - w[0]) / dt;
            v.signum() * v.abs().sqrt()
        })
        .collect();
    ScalarSrv { start: a[0], q }
}

pub fn scalar_srv_inverse(s: &ScalarSrv) -> Vec<f64> {
    let dt = 1.0 / s.q.len() as f64;
    let mut out = Vec::with_capacity(s.q.len() + 1);
    out.push(s.start);
    for (i, q) in s.q.iter().enumerate() {
        out.push(out[i] + q * q.abs() * dt);
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct HomoOptions {
    /// Weight applied to the aux channel before it enters the metric.
    pub lambda: f64,
    /// Also quotient by reparametrizations (DP on `ξ`, alternated with `θ`).
    pub reparametrize: bool,
    pub grid: Option<usize>,
    pub slopes: Vec<(usize, usize)>,
    pub max_rounds: usize,
    pub tolerance: f64,
}

impl Default for HomoOptions {
    fn default() -> Self {
        Self { lambda: 1.0, reparametrize: false, grid: None, slopes: extended_slopes(7), max_rounds: 20, tolerance: 1e-8 }
    }
}

/// Minimizing `x = rot_z(theta)` and the resulting distance.
#[derive(Clone, Debug, PartialEq)]
pub struct HomoAlignment {
    pub distance: f64,
    pub theta: f64,
    /// Reparametrization of the second curve (identity unless requested).
    pub warp: Warp,
    pub iterations: usize,
}

/// Everything the distance needs from one curve.
#[derive(Clone, Debug)]
struct Chart {
    srv: AlgebraSrv,
    aux: Option<ScalarSrv>,
}

impl Chart {
    fn new(g: &SphereCurve, lambda: f64) -> Result<Self> {
        let srv = group_srv(&horizontal_lift(g)?)?;
        let aux = g.aux().map(|a| scalar_srv(&a.iter().map(|x| lambda * x).collect::<Vec<_>>()));
        Ok(Self { srv, aux })
    }

    fn warped(&self, w: &Warp) -> Result<Self> {
        let n = self.srv.xi.len();
        let mut data: Vec<f64> = Vec::with_capacity(n * 4);
        let d = if self.aux.is_some() { 4 } else { 3 };
        for i in 0..n {
            data.extend(self.srv.xi[i].iter());
            if let Some(a) = &self.aux {
                data.push(a.q[i]);
            }
        }
        let s = w.apply(&SrvCurve::new(d, false, data, vec![0.0; d])?)?;
        let xi = s.q().chunks(d).map(|c| Vector3::new(c[0], c[1], c[2])).collect();
        let aux = self.aux.as_ref().map(|a| ScalarSrv { start: a.start, q: s.q().chunks(d).map(|c| c[3]).collect() });
        Ok(Self { srv: AlgebraSrv { start: self.srv.start, xi }, aux })
    }

    /// Stacks `ξ` (optionally rotated by `Ad_{k⁻¹}`) and the aux SRV.
    fn stacked(&self, theta: f64) -> Result<SrvCurve> {
        let xi = self.srv.ad_inverse(theta);
        let d = if self.aux.is_some() { 4 } else { 3 };
        let mut data = Vec::with_capacity(xi.len() * d);
        for (i, x) in xi.iter().enumerate() {
            data.extend(x.iter());
            if let Some(a) = &self.aux {
                data.push(a.q[i]);
            }
        }
        SrvCurve::new(d, false, data, vec![0.0; d])
    }
}

fn check_pair(g1: &SphereCurve, g2: &SphereCurve) -> Result<()> {
    if g1.len() != g2.len() {
        return Err(Error::ShapeMismatch(format!("{} vs {} samples", g1.len(), g2.len())));
    }
    if g1.aux.is_some() != g2.aux.is_some() {
        return Err(Error::ShapeMismatch("only one curve carries an aux channel".into()));
    }
    Ok(())
}

/// Squared chart distance with `x = rot_z(theta)` applied to the second curve.
fn objective(c1: &Chart, c2: &Chart, theta: f64) -> f64 {
    let dt = 1.0 / c1.srv.xi.len() as f64;
    let k = so3::rot_z(theta);
    let start = so3::distance(&c1.srv.start, &(c2.srv.start * k)).powi(2);
    let kt = k.transpose();
    let body: f64 = c1.srv.xi.iter().zip(&c2.srv.xi).map(|(a, b)| (a - kt * b).norm_squared()).sum::<f64>() * dt;
    start + body + aux_term(c1, c2)
}

fn aux_term(c1: &Chart, c2: &Chart) -> f64 {
    match (&c1.aux, &c2.aux) {
        (Some(a), Some(b)) => {
            let dt = 1.0 / a.q.len() as f64;
            (a.start - b.start).powi(2) + a.q.iter().zip(&b.q).map(|(x, y)| (x - y).powi(2)).sum::<f64>() * dt
        }
        _ => 0.0,
    }
}

const THETA_GRID: usize = 720;
const GOLDEN_TOL: f64 = 1e-10;

/// Grid search over `θ ∈ [−π, π)` followed by golden-section refinement.
fn minimize_theta(f: impl Fn(f64) -> f64) -> (f64, f64) {
    let step = std::f64::consts::TAU / THETA_GRID as f64;
    let mut best = (0.0, f(0.0));
    for k in 0..THETA_GRID {
        let theta = -std::f64::consts::PI + k as f64 * step;
        let v = f(theta);
        if v < best.1 {
            best = (theta, v);
        }
    }
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (best.0 - step, best.0 + step);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > GOLDEN_TOL {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    let mid = 0.5 * (a + b);
    let fm = f(mid);
    if fm < best.1 {
        (mid, fm)
    } else {
        best
    }
}

fn align(c1: &Chart, c2: &Chart, n: usize, opts: &HomoOptions) -> Result<(HomoAlignment, Chart)> {
    let (mut theta, mut value) = minimize_theta(|t| objective(c1, c2, t));
    let mut warp = Warp::identity(n - 1);
    let mut current = c2.clone();
    let mut iterations = 1;
    if opts.reparametrize {
        let grid = opts.grid.unwrap_or_else(|| default_grid(n - 1));
        let target = c1.stacked(0.0)?;
        while iterations < opts.max_rounds {
            iterations += 1;
            let start = value;
            let rotated = c2.stacked(theta)?;
            let path = DpGrid::new(&target, &rotated, grid, &opts.slopes)?.solve();
            let w = path.to_warp(grid, n - 1, false);
            let candidate = c2.warped(&w)?;
            let (t, v) = minimize_theta(|t| objective(c1, &candidate, t));
            if v < value {
                value = v;
                theta = t;
                warp = w;
                current = candidate;
            }
            if !(start - value >= opts.tolerance) {
                break;
            }
        }
    }
    let distance = value.max(0.0).sqrt();
    Ok((HomoAlignment { distance, theta, warp, iterations }, current))
}

/// `inf_{x∈K} √(d_H(α₁(0), α₂(0)x)² + ‖ξ₁ − Ad_{x⁻¹}ξ₂‖² + aux terms)`.
///
/// With [`HomoOptions::reparametrize`] the second curve's `ξ` (and aux SRV)
/// is also warped by DP, alternating with the search over `x`. The warp acts
/// on the interval samples, so it has `N − 1` knots.
pub fn homo_distance(g1: &SphereCurve, g2: &SphereCurve, opts: &HomoOptions) -> Result<HomoAlignment> {
    check_pair(g1, g2)?;
    let c1 = Chart::new(g1, opts.lambda)?;
    let c2 = Chart::new(g2, opts.lambda)?;
    Ok(align(&c1, &c2, g1.len(), opts)?.0)
}

/// The same infimum for two lifts given directly (no aux channel), so any
/// horizontal lift, whatever its initial frame, can be compared.
pub fn homo_distance_lifted(a1: &RotationCurve, a2: &RotationCurve, opts: &HomoOptions) -> Result<HomoAlignment> {
    if a1.len() != a2.len() {
        return Err(Error::ShapeMismatch(format!("{} vs {} samples", a1.len(), a2.len())));
    }
    let c1 = Chart { srv: group_srv(a1)?, aux: None };
    let c2 = Chart { srv: group_srv(a2)?, aux: None };
    Ok(align(&c1, &c2, a1.len(), opts)?.0)
}

/// One curve on a geodesic together with its chart coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct HomoStep {
    pub tau: f64,
    pub curve: SphereCurve,
    pub srv: AlgebraSrv,
    /// Weighted aux SRV, if the curves carry aux channels.
    pub aux_srv: Option<ScalarSrv>,
}

/// Geodesic in the chart `SO(3) × L²(ξ) (× ℝ × L²)`: start frames along the
/// `SO(3)` geodesic to `α₂(0)x*`, `ξ` and the aux SRV linearly.
pub fn homo_geodesic(g1: &SphereCurve, g2: &SphereCurve, steps: usize, opts: &HomoOptions) -> Result<Vec<HomoStep>> {
    check_pair(g1, g2)?;
    if steps < 2 {
        return Err(Error::InvalidInput("a geodesic needs at least 2 steps".into()));
    }
    let c1 = Chart::new(g1, opts.lambda)?;
    let c2 = Chart::new(g2, opts.lambda)?;
    let (al, c2) = align(&c1, &c2, g1.len(), opts)?;
    let end_start = c2.srv.start * so3::rot_z(al.theta);
    let end_xi = c2.srv.ad_inverse(al.theta);
    (0..steps)
        .map(|k| {
            let tau = k as f64 / (steps - 1) as f64;
            let start = so3::geodesic(&c1.srv.start, &end_start, tau);
            let xi: Vec<_> = c1.srv.xi.iter().zip(&end_xi).map(|(a, b)| a * (1.0 - tau) + b * tau).collect();
            let srv = AlgebraSrv { start, xi };
            let points: Vec<_> = group_srv_inverse(&srv).project().into_iter().map(|p| p.normalize()).collect();
            let aux_srv = match (&c1.aux, &c2.aux) {
                (Some(a), Some(b)) => Some(ScalarSrv {
                    start: (1.0 - tau) * a.start + tau * b.start,
                    q: a.q.iter().zip(&b.q).map(|(x, y)| (1.0 - tau) * x + tau * y).collect(),
                }),
                _ => None,
            };
            let aux = aux_srv.as_ref().map(|s| scalar_srv_inverse(s).into_iter().map(|x| x / opts.lambda).collect());
            Ok(HomoStep { tau, curve: SphereCurve::new(points, aux)?, srv, aux_srv })
        })
        .collect()
}

/// Sum of chart-space chord lengths between consecutive steps.
pub fn chart_length(path: &[HomoStep]) -> f64 {
    path.windows(2)
        .map(|w| {
            let (a, b) = (&w[0], &w[1]);
            let dt = 1.0 / a.srv.xi.len() as f64;
            let mut sq = so3::distance(&a.srv.start, &b.srv.start).powi(2)
                + a.srv.xi.iter().zip(&b.srv.xi).map(|(x, y)| (x - y).norm_squared()).sum::<f64>() * dt;
            if let (Some(p), Some(q)) = (&a.aux_srv, &b.aux_srv) {
                sq += (p.start - q.start).powi(2) + p.q.iter().zip(&q.q).map(|(x, y)| (x - y).powi(2)).sum::<f64>() * dt;
            }
            sq.sqrt()
        })
        .sum()
}
