//! Piecewise-linear reparametrizations and their action on SRV curves.

use nalgebra::DMatrix;

use crate::curve::{interpolate_into, DiscreteCurve};
use crate::error::{Error, Result};
use crate::srv::SrvCurve;

/// Monotone map `γ: [0,1] → [0,1]` sampled at uniform knots `k/(K−1)`.
///
/// For an open curve with `N` samples `K = N`; for a closed curve `K = N + 1`
/// so that the last knot is the wrap-around point `t = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Warp {
    values: Vec<f64>,
}

impl Warp {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidInput("a warp needs at least 2 knots".into()));
        }
        if values[0] != 0.0 || *values.last().unwrap() != 1.0 {
            return Err(Error::InvalidInput("a warp must fix 0 and 1".into()));
        }
        if values.windows(2).any(|w| !(w[1] >= w[0])) {
            return Err(Error::InvalidInput("warp values must be nondecreasing".into()));
        }
        Ok(Self { values })
    }

    pub fn identity(knots: usize) -> Self {
        let k = knots.max(2);
        let mut values: Vec<f64> = (0..k).map(|i| i as f64 / (k - 1) as f64).collect();
        values[k - 1] = 1.0;
        Self { values }
    }

    /// Identity warp with the right number of knots for `s`.
    pub fn identity_for(s: &SrvCurve) -> Self {
        Self::identity(knots_for(s.len(), s.is_closed()))
    }

    /// Samples `f` at the knots; the result is clamped and made monotone.
    pub fn from_fn(knots: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let k = knots.max(2);
        let mut values: Vec<f64> = (0..k).map(|i| f(i as f64 / (k - 1) as f64).clamp(0.0, 1.0)).collect();
        values[0] = 0.0;
        values[k - 1] = 1.0;
        for i in 1..k {
            values[i] = values[i].max(values[i - 1]);
        }
        Self::new(values)
    }

    /// Piecewise-linear interpolation of lattice points `(x_k, y_k)` on `[0,1]²`.
    pub(crate) fn from_polyline(xs: &[f64], ys: &[f64], knots: usize) -> Self {
        let mut seg = 0;
        let values = (0..knots)
            .map(|i| {
                let t = i as f64 / (knots - 1) as f64;
                while seg + 2 < xs.len() && xs[seg + 1] < t {
                    seg += 1;
                }
                let (x0, x1) = (xs[seg], xs[seg + 1]);
                let f = if x1 > x0 { ((t - x0) / (x1 - x0)).clamp(0.0, 1.0) } else { 1.0 };
                ys[seg] + f * (ys[seg + 1] - ys[seg])
            })
            .collect::<Vec<_>>();
        let mut w = Self { values };
        let k = w.values.len();
        w.values[0] = 0.0;
        w.values[k - 1] = 1.0;
        w
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn knots(&self) -> usize {
        self.values.len()
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.knots())
    }

    /// `γ(t)` by linear interpolation between knots.
    pub fn eval(&self, t: f64) -> f64 {
        let mut out = [0.0];
        interpolate_into(&self.values, 1, false, t, &mut out);
        out[0]
    }

    /// Slope of each knot interval.
    pub fn slopes(&self) -> Vec<f64> {
        let h = 1.0 / (self.knots() - 1) as f64;
        self.values.windows(2).map(|w| (w[1] - w[0]) / h).collect()
    }

    fn check(&self, n: usize, closed: bool) -> Result<()> {
        if self.knots() != knots_for(n, closed) {
            return Err(Error::ShapeMismatch(format!(
                "warp has {} knots, curve with {n} samples needs {}",
                self.knots(),
                knots_for(n, closed)
            )));
        }
        Ok(())
    }

    /// `q ↦ (q∘γ)√γ̇` sampled at the curve's own parameters. At a knot the
    /// factor `√γ̇` is the mean over the two adjacent intervals.
    pub fn apply(&self, s: &SrvCurve) -> Result<SrvCurve> {
        let (n, d, closed) = (s.len(), s.dim(), s.is_closed());
        self.check(n, closed)?;
        let root: Vec<f64> = self.slopes().iter().map(|m| m.max(0.0).sqrt()).collect();
        let mut q = vec![0.0; n * d];
        for i in 0..n {
            let factor = match (i, closed) {
                (0, false) => root[0],
                (_, false) if i == n - 1 => root[i - 1],
                (0, true) => 0.5 * (root[0] + root[n - 1]),
                _ => 0.5 * (root[i - 1] + root[i]),
            };
            let out = &mut q[i * d..(i + 1) * d];
            interpolate_into(s.q(), d, closed, self.values[i], out);
            out.iter_mut().for_each(|x| *x *= factor);
        }
        SrvCurve::new(d, closed, q, s.basepoint().to_vec())
    }

    /// `c∘γ` sampled at the curve's own parameters.
    pub fn apply_to_curve(&self, c: &DiscreteCurve) -> Result<DiscreteCurve> {
        let (n, d, closed) = (c.len(), c.dim(), c.is_closed());
        self.check(n, closed)?;
        let mut data = vec![0.0; n * d];
        for i in 0..n {
            interpolate_into(c.as_slice(), d, closed, self.values[i], &mut data[i * d..(i + 1) * d]);
        }
        DiscreteCurve::new(d, closed, data)
    }
}

pub(crate) fn knots_for(n: usize, closed: bool) -> usize {
    if closed {
        n + 1
    } else {
        n
    }
}

/// Quadrature nodes for `∫|q₁ − R (q₂∘γ)√γ̇|²`: each knot interval contributes
/// its two endpoints with weight `h/2` and the interval's own slope.
pub(crate) struct Pairing {
    dim: usize,
    weights: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl Pairing {
    pub(crate) fn new(s1: &SrvCurve, s2: &SrvCurve, warp: &Warp) -> Result<Self> {
        if s1.dim() != s2.dim() || s1.len() != s2.len() || s1.is_closed() != s2.is_closed() {
            return Err(Error::ShapeMismatch("curves differ in size, dimension or closedness".into()));
        }
        let (n, d, closed) = (s1.len(), s1.dim(), s1.is_closed());
        warp.check(n, closed)?;
        let k = warp.knots();
        let h = 1.0 / (k - 1) as f64;
        let identity = warp.is_identity();
        let mut q2 = vec![0.0; k * d];
        for i in 0..k {
            let out = &mut q2[i * d..(i + 1) * d];
            if identity {
                out.copy_from_slice(s2.sample(i % n));
            } else {
                interpolate_into(s2.q(), d, closed, warp.values[i], out);
            }
        }
        let slopes = warp.slopes();
        let mut p = Pairing { dim: d, weights: Vec::new(), a: Vec::new(), b: Vec::new() };
        for (i, m) in slopes.iter().enumerate() {
            let root = m.max(0.0).sqrt();
            for j in [i, i + 1] {
                p.weights.push(0.5 * h);
                p.a.extend_from_slice(s1.sample(j % n));
                p.b.extend(q2[j * d..(j + 1) * d].iter().map(|x| x * root));
            }
        }
        Ok(p)
    }

    /// `∫ q₁ bᵀ`, the matrix whose SVD gives the optimal rotation.
    pub(crate) fn cross(&self) -> DMatrix<f64> {
        let d = self.dim;
        let mut m = DMatrix::zeros(d, d);
        for ((w, a), b) in self.weights.iter().zip(self.a.chunks(d)).zip(self.b.chunks(d)) {
            for r in 0..d {
                for c in 0..d {
                    m[(r, c)] += w * a[r] * b[c];
                }
            }
        }
        m
    }

    pub(crate) fn distance(&self, rotation: &DMatrix<f64>) -> f64 {
        let d = self.dim;
        let mut total = 0.0;
        for ((w, a), b) in self.weights.iter().zip(self.a.chunks(d)).zip(self.b.chunks(d)) {
            let mut sq = 0.0;
            for r in 0..d {
                let rb: f64 = (0..d).map(|c| rotation[(r, c)] * b[c]).sum();
                sq += (a[r] - rb).powi(2);
            }
            total += w * sq;
        }
        total.max(0.0).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::srv::{l2_distance, srv_transform};

    #[test]
    fn construction_guards() {
        assert!(Warp::new(vec![0.0, 0.6, 0.5, 1.0]).is_err());
        assert!(Warp::new(vec![0.1, 1.0]).is_err());
        assert!(Warp::new(vec![0.0, 0.0, 1.0, 1.0]).is_ok());
        assert!(Warp::identity(5).is_identity());
    }

    #[test]
    fn identity_pairing_is_the_plain_distance() {
        let c1 = DiscreteCurve::from_fn(64, false, |t| [t, t * t]).unwrap();
        let c2 = DiscreteCurve::from_fn(64, false, |t| [t.sin(), 0.5 * t]).unwrap();
        let (s1, s2) = (srv_transform(&c1).unwrap(), srv_transform(&c2).unwrap());
        let p = Pairing::new(&s1, &s2, &Warp::identity_for(&s2)).unwrap();
        let d = p.distance(&DMatrix::identity(2, 2));
        assert!((d - l2_distance(&s1, &s2).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn warped_curve_matches_warped_srv() {
        let gamma = |t: f64| 0.7 * t * t + 0.3 * t;
        let c = DiscreteCurve::from_fn(2048, false, |t| [t.cos(), (2.0 * t).sin()]).unwrap();
        let w = Warp::from_fn(2048, gamma).unwrap();
        let direct = srv_transform(&w.apply_to_curve(&c).unwrap()).unwrap();
        let acted = w.apply(&srv_transform(&c).unwrap()).unwrap();
        assert!(l2_distance(&direct, &acted).unwrap() < 1e-3);
    }

    #[test]
    fn closed_warps_carry_the_wrap_knot() {
        let c = DiscreteCurve::from_fn(16, true, |t| [t.cos(), t.sin()]).unwrap();
        assert!(Warp::identity(16).apply_to_curve(&c).is_err());
        let back = Warp::identity(17).apply_to_curve(&c).unwrap();
        assert!(back.as_slice().iter().zip(c.as_slice()).all(|(a, b)| (a - b).abs() < 1e-15));
    }
}
