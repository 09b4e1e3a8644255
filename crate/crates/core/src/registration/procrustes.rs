//! Optimal rotation between two SRV curves.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::registration::warp::{Pairing, Warp};
use crate::srv::SrvCurve;

/// Minimizing rotation of `∫|q₁ − R q₂|²`.
#[derive(Clone, Debug, PartialEq)]
pub struct RotationFit {
    pub rotation: DMatrix<f64>,
    /// Set when `A = ∫ q₁ q₂ᵀ` is rank deficient and the minimizer is not unique.
    pub degenerate: bool,
}

/// Procrustes fit over `SO(d)` from the SVD of `A = ∫ q₁ q₂ᵀ dt`.
pub fn optimal_rotation(s1: &SrvCurve, s2: &SrvCurve) -> Result<RotationFit> {
    let pairing = Pairing::new(s1, s2, &Warp::identity_for(s2))?;
    Ok(rotation_from_cross(&pairing.cross()))
}

pub(crate) fn rotation_from_cross(a: &DMatrix<f64>) -> RotationFit {
    let d = a.nrows();
    if d == 1 {
        return RotationFit { rotation: DMatrix::identity(1, 1), degenerate: false };
    }
    let svd = a.clone().svd(true, true);
    let (u, v_t) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    let sigma = &svd.singular_values;
    let smax = sigma.max();
    let (kmin, smin) = sigma.argmin();
    let mut flip = DMatrix::identity(d, d);
    if (&u * &v_t).determinant() < 0.0 {
        flip[(kmin, kmin)] = -1.0;
    }
    let degenerate = smin <= 1e-12 * smax;
    if smax == 0.0 {
        return RotationFit { rotation: DMatrix::identity(d, d), degenerate: true };
    }
    RotationFit { rotation: u * flip * v_t, degenerate }
}

/// Rotation by `angle` in the plane.
pub fn rotation_2d(angle: f64) -> DMatrix<f64> {
    let (s, c) = angle.sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
}
