//! Rotation group helpers with the bi-invariant norm `‖v̂‖ = |v|`.

use nalgebra::{Matrix3, Vector3};

pub fn hat(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Inverse of [`hat`] applied to the skew part of `m`.
pub fn vee(m: &Matrix3<f64>) -> Vector3<f64> {
    Vector3::new(m[(2, 1)] - m[(1, 2)], m[(0, 2)] - m[(2, 0)], m[(1, 0)] - m[(0, 1)]) * 0.5
}

/// Rodrigues formula.
pub fn exp(v: &Vector3<f64>) -> Matrix3<f64> {
    let theta = v.norm();
    let k = hat(v);
    let (a, b) = if theta < 1e-4 {
        let t2 = theta * theta;
        (1.0 - t2 / 6.0 + t2 * t2 / 120.0, 0.5 - t2 / 24.0 + t2 * t2 / 720.0)
    } else {
        (theta.sin() / theta, (1.0 - theta.cos()) / (theta * theta))
    };
    Matrix3::identity() + k * a + k * k * b
}

/// Principal logarithm as a rotation vector with angle in `[0, π]`.
pub fn log(r: &Matrix3<f64>) -> Vector3<f64> {
    let s = vee(r);
    let sin = s.norm();
    let cos = ((r.trace() - 1.0) * 0.5).clamp(-1.0, 1.0);
    let theta = sin.atan2(cos);
    if theta < 1e-4 {
        let t2 = theta * theta;
        return s * (1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0);
    }
    if cos > -0.9 {
        return s * (theta / sin);
    }
    // near π the skew part loses the axis; read it off the symmetric part
    let b = (r + r.transpose()) * 0.5 - Matrix3::identity() * cos;
    let d = Vector3::new(b[(0, 0)], b[(1, 1)], b[(2, 2)]);
    let k = d.imax();
    let mut axis = b.column(k).into_owned();
    if s.dot(&axis) < 0.0 {
        axis = -axis;
    }
    let axis = axis.normalize();
    axis * theta
}

/// Geodesic distance: rotation angle of `aᵀb`.
pub fn distance(a: &Matrix3<f64>, b: &Matrix3<f64>) -> f64 {
    log(&(a.transpose() * b)).norm()
}

/// Point at `tau` on the geodesic from `a` to `b`.
pub fn geodesic(a: &Matrix3<f64>, b: &Matrix3<f64>, tau: f64) -> Matrix3<f64> {
    a * exp(&(log(&(a.transpose() * b)) * tau))
}

/// Rotation about `e₃`.
pub fn rot_z(theta: f64) -> Matrix3<f64> {
    let (s, c) = theta.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Rotation about `a × b` taking unit `a` to unit `b`; `None` if antipodal.
pub fn minimal_rotation(a: &Vector3<f64>, b: &Vector3<f64>) -> Option<Matrix3<f64>> {
    let axis = a.cross(b);
    let angle = axis.norm().atan2(a.dot(b));
    if std::f64::consts::PI - angle < 1e-9 {
        return None;
    }
    let n = axis.norm();
    if n == 0.0 {
        return Some(Matrix3::identity());
    }
    Some(exp(&(axis * (angle / n))))
}

/// Frame whose third column is `p`.
pub fn adapted_frame(p: &Vector3<f64>) -> Matrix3<f64> {
    let k = p.iamin();
    let mut e = Vector3::zeros();
    e[k] = 1.0;
    let e1 = (e - p * p.dot(&e)).normalize();
    let e2 = p.cross(&e1);
    Matrix3::from_columns(&[e1, e2, *p])
}

pub fn is_rotation(r: &Matrix3<f64>, tol: f64) -> bool {
    (r.transpose() * r - Matrix3::identity()).amax() <= tol && (r.determinant() - 1.0).abs() <= tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn exp_log_round_trip() {
        for v in [
            Vector3::new(0.3, -0.2, 0.9),
            Vector3::new(1e-9, 2e-9, 0.0),
            Vector3::new(0.0, 0.0, 0.0),
            Vector3::new(0.0, PI - 1e-7, 0.0),
            Vector3::new(1.0, 1.0, 1.0).normalize() * 3.1,
            Vector3::new(-2.0, 0.5, 0.1).normalize() * 2.9,
        ] {
            let r = exp(&v);
            assert!(is_rotation(&r, 1e-13));
            assert!((log(&r) - v).norm() < 1e-9, "{v:?} -> {:?}", log(&r));
        }
    }

    #[test]
    fn small_angles_keep_precision() {
        let v = Vector3::new(3e-9, -1e-9, 2e-9);
        assert!((log(&exp(&v)) - v).norm() < 1e-22);
        assert!(distance(&Matrix3::identity(), &Matrix3::identity()) == 0.0);
    }

    #[test]
    fn minimal_rotation_maps_and_is_horizontal() {
        let a = Vector3::new(0.0, 0.0, 1.0);
        let b = Vector3::new(1.0, 1.0, 0.5).normalize();
        let m = minimal_rotation(&a, &b).unwrap();
        assert!((m * a - b).norm() < 1e-14);
        assert!(log(&m).dot(&a).abs() < 1e-14);
        assert!(minimal_rotation(&a, &-a).is_none());
    }

    #[test]
    fn adapted_frame_is_a_rotation() {
        for p in [Vector3::z(), Vector3::x(), Vector3::new(0.3, -0.4, 0.866).normalize()] {
            let f = adapted_frame(&p);
            assert!(is_rotation(&f, 1e-14));
            assert!((f.column(2) - p).norm() < 1e-15);
        }
    }

    #[test]
    fn geodesic_midpoint_halves_distance() {
        let a = exp(&Vector3::new(0.1, 0.2, -0.3));
        let b = exp(&Vector3::new(-0.5, 0.4, 1.0));
        let m = geodesic(&a, &b, 0.5);
        let d = distance(&a, &b);
        assert!((distance(&a, &m) - d / 2.0).abs() < 1e-12);
        assert!((distance(&m, &b) - d / 2.0).abs() < 1e-12);
    }
}
