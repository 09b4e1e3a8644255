//! Speed and curvature of the SRV image of a plane curve.
//!
//! For a plane curve with speed `ω`, signed curvature `κ` and SRV image
//! `c̃ = q(c)` (read as a curve of its own):
//!
//! ```text
//! ω̃   = √(ω̇²/(4ω) + ω³κ²)
//! κ̃ω̃ = κω + φ̇,        φ = arg(ω̇ + i·2ω²κ)
//! ```
//!
//! `c̃` is an immersion exactly where `κ` and `ω̇` have no common zero.

use std::f64::consts::TAU;

use crate::curve::{plane_curvature, speed, DiscreteCurve};
use crate::diff;
use crate::error::{Error, Result};

/// Relative tolerance for zero detection in [`srv_is_immersion`].
pub const ZERO_EPS_REL: f64 = 1e-7;

/// Per-sample plane geometry of a curve and of its SRV image.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneGeometry {
    pub omega: Vec<f64>,
    pub omega_dot: Vec<f64>,
    pub kappa: Vec<f64>,
    pub omega_tilde: Vec<f64>,
    /// `None` where the SRV image stalls (`ω̃` below tolerance).
    pub kappa_tilde: Vec<Option<f64>>,
    pub phi: Vec<f64>,
    pub phi_dot: Vec<f64>,
    pub closed: bool,
}

impl PlaneGeometry {
    /// Finite-difference `ω`, `ω̇`, `κ` of `c` pushed through the analytic
    /// formulas. Fails if `c` is not an immersion; if the SRV image is not
    /// an immersion, `kappa_tilde` is `None` at the offending samples.
    pub fn from_curve(c: &DiscreteCurve) -> Result<Self> {
        let kappa = plane_curvature(c)?;
        let omega = speed(c);
        let omega_dot = diff::derivative(&omega, c.is_closed());
        let omega_tilde = srv_speed_analytic(&omega, &omega_dot, &kappa)?;
        let phi = unwrapped_phi(&omega, &omega_dot, &kappa);
        let phi_dot = diff::angle_derivative(&phi, c.is_closed());
        let scale = omega_tilde.iter().copied().fold(0.0, f64::max);
        let kappa_tilde = (0..omega.len())
            .map(|i| {
                (omega_tilde[i] > ZERO_EPS_REL * scale)
                    .then(|| (kappa[i] * omega[i] + phi_dot[i]) / omega_tilde[i])
            })
            .collect();
        Ok(Self { omega, omega_dot, kappa, omega_tilde, kappa_tilde, phi, phi_dot, closed: c.is_closed() })
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    /// Immersion check of the SRV image with scales taken from the curve:
    /// `ω̇` is compared against the mean speed and `κ` against the inverse
    /// length, so exactly straight or uniformly fast pieces register as zeros.
    pub fn srv_immersion(&self) -> ImmersionCheck {
        // on [0, 1] the length is also the mean speed
        let length = diff::integrate(&self.omega, self.closed);
        let dot_scale = max_abs(&self.omega_dot).max(length);
        let kappa_scale = max_abs(&self.kappa).max(if length > 0.0 { 1.0 / length } else { 0.0 });
        immersion_with_scales(&self.omega_dot, &self.kappa, dot_scale, kappa_scale)
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn unwrapped_phi(omega: &[f64], omega_dot: &[f64], kappa: &[f64]) -> Vec<f64> {
    let raw: Vec<f64> = (0..omega.len())
        .map(|i| (2.0 * omega[i] * omega[i] * kappa[i]).atan2(omega_dot[i]))
        .collect();
    diff::unwrap(&raw)
}

/// `ω̃ = √(ω̇²/(4ω) + ω³κ²)` pointwise.
pub fn srv_speed_analytic(omega: &[f64], omega_dot: &[f64], kappa: &[f64]) -> Result<Vec<f64>> {
    check_lengths(omega, omega_dot, kappa)?;
    omega
        .iter()
        .zip(omega_dot)
        .zip(kappa)
        .enumerate()
        .map(|(i, ((&w, &wd), &k))| {
            if w <= 0.0 {
                return Err(Error::NotImmersion { index: i });
            }
            Ok((wd * wd / (4.0 * w) + w.powi(3) * k * k).sqrt())
        })
        .collect()
}

fn check_lengths(a: &[f64], b: &[f64], c: &[f64]) -> Result<()> {
    if a.len() != b.len() || a.len() != c.len() {
        return Err(Error::ShapeMismatch("ω, ω̇ and κ must have equal length".into()));
    }
    Ok(())
}

/// Outcome of the common-zero test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImmersionCheck {
    pub immersed: bool,
    pub offending: Vec<usize>,
}

/// The SRV image is an immersion iff `κ` and `ω̇` share no zero. Zeros are
/// taken relative to each sequence's own maximum.
pub fn srv_is_immersion(omega_dot: &[f64], kappa: &[f64]) -> ImmersionCheck {
    immersion_with_scales(omega_dot, kappa, max_abs(omega_dot), max_abs(kappa))
}

fn immersion_with_scales(omega_dot: &[f64], kappa: &[f64], dot_scale: f64, kappa_scale: f64) -> ImmersionCheck {
    let (eps_d, eps_k) = (ZERO_EPS_REL * dot_scale, ZERO_EPS_REL * kappa_scale);
    let offending: Vec<usize> = omega_dot
        .iter()
        .zip(kappa)
        .enumerate()
        .filter(|(_, (d, k))| d.abs() <= eps_d && k.abs() <= eps_k)
        .map(|(i, _)| i)
        .collect();
    ImmersionCheck { immersed: offending.is_empty(), offending }
}

/// `φ`, `φ̇` and `κ̃` from the curvature relation.
#[derive(Clone, Debug, PartialEq)]
pub struct SrvCurvature {
    pub phi: Vec<f64>,
    pub phi_dot: Vec<f64>,
    pub kappa_tilde: Vec<Option<f64>>,
}

/// `κ̃ = (κω + φ̇)/ω̃` with `φ` the unwrapped two-argument arctangent of
/// `(2ω²κ, ω̇)` and `φ̇` from the finite-difference scheme. The sequences are
/// samples over `[0, 1]` (cyclic when `closed`).
pub fn srv_curvature_analytic(omega: &[f64], omega_dot: &[f64], kappa: &[f64], closed: bool) -> Result<SrvCurvature> {
    check_lengths(omega, omega_dot, kappa)?;
    if omega.len() < 3 {
        return Err(Error::InvalidInput("need at least 3 samples".into()));
    }
    let check = srv_is_immersion(omega_dot, kappa);
    if let Some(&index) = check.offending.first() {
        return Err(Error::NotImmersion { index });
    }
    let omega_tilde = srv_speed_analytic(omega, omega_dot, kappa)?;
    let phi = unwrapped_phi(omega, omega_dot, kappa);
    let phi_dot = diff::angle_derivative(&phi, closed);
    let scale = omega_tilde.iter().copied().fold(0.0, f64::max);
    let kappa_tilde = (0..omega.len())
        .map(|i| {
            (omega_tilde[i] > ZERO_EPS_REL * scale).then(|| (kappa[i] * omega[i] + phi_dot[i]) / omega_tilde[i])
        })
        .collect();
    Ok(SrvCurvature { phi, phi_dot, kappa_tilde })
}

/// `∫ κω dt`, the total signed curvature.
pub fn total_curvature(c: &DiscreteCurve) -> Result<f64> {
    let kappa = plane_curvature(c)?;
    let omega = speed(c);
    let integrand: Vec<f64> = kappa.iter().zip(&omega).map(|(k, w)| k * w).collect();
    Ok(diff::integrate(&integrand, c.is_closed()))
}

/// Total curvature over `2π`, rounded; closed curves only.
pub fn turning_number(c: &DiscreteCurve) -> Result<i64> {
    if !c.is_closed() {
        return Err(Error::InvalidInput("turning number needs a closed curve".into()));
    }
    Ok((total_curvature(c)? / TAU).round() as i64)
}

/// Integrates `θ̇ = ωκ`, `ċ = ω(cos θ, sin θ)` from the origin with
/// `θ(0) = 0` by classical fourth-order Runge-Kutta on the sample grid.
pub fn integrate_plane_frenet(
    omega: impl Fn(f64) -> f64,
    kappa: impl Fn(f64) -> f64,
    n: usize,
) -> Result<DiscreteCurve> {
    if n < 3 {
        return Err(Error::InvalidInput("need at least 3 samples".into()));
    }
    let h = diff::spacing(n, false);
    let rhs = |t: f64, s: [f64; 3]| {
        let w = omega(t);
        [w * s[2].cos(), w * s[2].sin(), w * kappa(t)]
    };
    let mut state = [0.0f64; 3];
    let mut data = Vec::with_capacity(2 * n);
    data.extend_from_slice(&state[..2]);
    for i in 0..n - 1 {
        let t = i as f64 * h;
        let axpy = |s: [f64; 3], k: [f64; 3], a: f64| [s[0] + a * k[0], s[1] + a * k[1], s[2] + a * k[2]];
        let k1 = rhs(t, state);
        let k2 = rhs(t + 0.5 * h, axpy(state, k1, 0.5 * h));
        let k3 = rhs(t + 0.5 * h, axpy(state, k2, 0.5 * h));
        let k4 = rhs(t + h, axpy(state, k3, h));
        for j in 0..3 {
            state[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        data.extend_from_slice(&state[..2]);
    }
    DiscreteCurve::new(2, false, data)
}

/// The curve with `ω(t) = A/sin²(at+b)` and `κ = a/ω`, whose SRV image is a
/// straight line.
pub fn straightening_curve(a: f64, b: f64, amplitude: f64, n: usize) -> Result<DiscreteCurve> {
    if !(a * b > 0.0) || !(amplitude > 0.0) {
        return Err(Error::InvalidInput("need ab > 0 and A > 0".into()));
    }
    let (lo, hi) = if a > 0.0 { (b, a + b) } else { (a + b, b) };
    let k = (lo / std::f64::consts::PI).ceil();
    if k * std::f64::consts::PI <= hi {
        return Err(Error::SpeedPole);
    }
    let omega = move |t: f64| amplitude / (a * t + b).sin().powi(2);
    integrate_plane_frenet(omega, move |t| a / omega(t), n)
}

/// Largest distance of the points to their least-squares line, divided by
/// the polygon length.
pub fn collinearity_residual(c: &DiscreteCurve) -> Result<f64> {
    if c.dim() != 2 {
        return Err(Error::ShapeMismatch("collinearity needs a plane curve".into()));
    }
    let n = c.len() as f64;
    let (mx, my) = c.points().fold((0.0, 0.0), |(x, y), p| (x + p[0] / n, y + p[1] / n));
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in c.points() {
        let (dx, dy) = (p[0] - mx, p[1] - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let angle = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let normal = (-angle.sin(), angle.cos());
    let worst = c
        .points()
        .map(|p| ((p[0] - mx) * normal.0 + (p[1] - my) * normal.1).abs())
        .fold(0.0, f64::max);
    let length = c.polygon_length();
    if length == 0.0 {
        return Err(Error::DegenerateCurve);
    }
    Ok(worst / length)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::srv::srv_transform;
    use std::f64::consts::PI;

    #[test]
    fn speed_formula_circle_and_line() {
        let w = srv_speed_analytic(&[TAU; 4], &[0.0; 4], &[1.0; 4]).unwrap();
        assert!(w.iter().all(|x| (x - TAU.powf(1.5)).abs() < 1e-12));
        assert!((w[0] - 15.7496).abs() < 1e-4);
        assert!(srv_speed_analytic(&[1.0; 3], &[0.0; 3], &[0.0; 3]).unwrap().iter().all(|x| *x == 0.0));
        assert!(srv_speed_analytic(&[1.0, 0.0, 1.0], &[0.0; 3], &[0.0; 3]).is_err());
    }

    #[test]
    fn immersion_examples() {
        assert!(srv_is_immersion(&[0.0; 5], &[1.0; 5]).immersed);
        let line = srv_is_immersion(&[0.0; 5], &[0.0; 5]);
        assert!(!line.immersed);
        assert_eq!(line.offending, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn cubic_inflection_is_a_common_zero() {
        // c(t) = (t, t³) on [-1, 1]: ω = √(1+9t⁴), ω̇ = 18t³/ω, κ = 6t/ω³, all vanishing at t = 0
        let n = 41;
        let ts: Vec<f64> = (0..n).map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64).collect();
        let omega: Vec<f64> = ts.iter().map(|t| (1.0 + 9.0 * t.powi(4)).sqrt()).collect();
        let omega_dot: Vec<f64> = ts.iter().zip(&omega).map(|(t, w)| 18.0 * t.powi(3) / w).collect();
        let kappa: Vec<f64> = ts.iter().zip(&omega).map(|(t, w)| 6.0 * t / w.powi(3)).collect();
        let check = srv_is_immersion(&omega_dot, &kappa);
        assert_eq!(check.offending, vec![20]);
    }

    #[test]
    fn accelerating_inflection_is_still_an_immersion() {
        // c(t) = (t + t², t³): κ(0) = 0 while ω̇(0) = 2
        let n = 41;
        let ts: Vec<f64> = (0..n).map(|i| -0.4 + 0.8 * i as f64 / (n - 1) as f64).collect();
        let vel = |t: f64| (1.0 + 2.0 * t, 3.0 * t * t);
        let acc = |t: f64| (2.0, 6.0 * t);
        let omega: Vec<f64> = ts.iter().map(|&t| vel(t).0.hypot(vel(t).1)).collect();
        let omega_dot: Vec<f64> = ts
            .iter()
            .zip(&omega)
            .map(|(&t, w)| (vel(t).0 * acc(t).0 + vel(t).1 * acc(t).1) / w)
            .collect();
        let kappa: Vec<f64> = ts
            .iter()
            .zip(&omega)
            .map(|(&t, w)| (vel(t).0 * acc(t).1 - vel(t).1 * acc(t).0) / w.powi(3))
            .collect();
        assert_eq!(kappa[20], 0.0);
        assert!((omega_dot[20] - 2.0).abs() < 1e-12);
        assert!(srv_is_immersion(&omega_dot, &kappa).immersed);
    }

    #[test]
    fn circle_curvature_relation() {
        let r = srv_curvature_analytic(&[TAU; 8], &[0.0; 8], &[1.0; 8], true).unwrap();
        for (p, k) in r.phi.iter().zip(&r.kappa_tilde) {
            assert!((p - PI / 2.0).abs() < 1e-15);
            assert!((k.unwrap() - 1.0 / TAU.sqrt()).abs() < 1e-12);
        }
        assert!((1.0 / TAU.sqrt() - 0.39894).abs() < 1e-5);
    }

    #[test]
    fn straightening_family_has_flat_image() {
        let n = 201;
        let ts = diff::parameters(n, false);
        let omega: Vec<f64> = ts.iter().map(|t| 1.0 / (t + 0.5f64).sin().powi(2)).collect();
        let omega_dot: Vec<f64> = ts.iter().map(|t| -2.0 * (t + 0.5f64).cos() / (t + 0.5f64).sin().powi(3)).collect();
        let kappa: Vec<f64> = ts.iter().map(|t| (t + 0.5f64).sin().powi(2)).collect();
        let r = srv_curvature_analytic(&omega, &omega_dot, &kappa, false).unwrap();
        assert!(r.kappa_tilde.iter().all(|k| k.unwrap().abs() < 1e-8));
    }

    #[test]
    fn curvature_relation_rejects_non_immersed_image() {
        assert_eq!(
            srv_curvature_analytic(&[1.0; 5], &[0.0; 5], &[0.0; 5], false),
            Err(Error::NotImmersion { index: 0 })
        );
    }

    #[test]
    fn turning_numbers_of_circles() {
        let circ = |turns: f64| {
            DiscreteCurve::from_fn(512, true, move |t| [(turns * TAU * t).cos(), (turns * TAU * t).sin()]).unwrap()
        };
        assert!((total_curvature(&circ(1.0)).unwrap() - TAU).abs() < 1e-5);
        assert_eq!(turning_number(&circ(1.0)).unwrap(), 1);
        assert!((total_curvature(&circ(2.0)).unwrap() - 2.0 * TAU).abs() < 1e-5);
        assert_eq!(turning_number(&circ(2.0)).unwrap(), 2);
        assert!((total_curvature(&circ(-1.0)).unwrap() + TAU).abs() < 1e-5);
        assert_eq!(turning_number(&circ(-1.0)).unwrap(), -1);
        let open = DiscreteCurve::from_fn(16, false, |t| [t, t * t]).unwrap();
        assert!(turning_number(&open).is_err());
    }

    #[test]
    fn straightening_curve_rejects_poles() {
        assert_eq!(straightening_curve(4.0, 0.5, 1.0, 64), Err(Error::SpeedPole));
        assert!(straightening_curve(1.0, -0.5, 1.0, 64).is_err());
        assert!(straightening_curve(-1.0, -0.5, 1.0, 64).is_ok());
    }

    #[test]
    fn straightening_curve_speed_matches_definition() {
        let c = straightening_curve(1.0, 0.5, 1.0, 2048).unwrap();
        for (w, t) in speed(&c).iter().zip(c.parameters()) {
            let exact = 1.0 / (t + 0.5f64).sin().powi(2);
            assert!((w - exact).abs() / exact < 1e-4);
        }
    }

    #[test]
    fn straightening_curve_image_is_straight() {
        let c = straightening_curve(1.0, 0.5, 1.0, 4096).unwrap();
        let image = srv_transform(&c).unwrap().image();
        let k = plane_curvature(&image).unwrap();
        assert!(k.iter().all(|k| k.abs() < 1e-3));
        assert!(collinearity_residual(&image).unwrap() < 1e-3);
    }
}
