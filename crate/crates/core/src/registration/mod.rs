//! Distances on the quotient by rotations and reparametrizations.

mod dp;
mod procrustes;
mod warp;

pub use dp::{default_grid, extended_slopes, optimal_reparam, DpGrid, DpPath, SLOPES};
pub use procrustes::{optimal_rotation, rotation_2d, RotationFit};
pub use warp::Warp;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::curve::DiscreteCurve;
use crate::error::{Error, Result};
use crate::srv::{srv_transform, SrvCurve};
use warp::Pairing;

#[derive(Clone, Debug, PartialEq)]
pub struct ShapeOptions {
    pub rotations: bool,
    pub reparametrizations: bool,
    /// DP lattice size; `None` means `min(N, 128)`.
    pub grid: Option<usize>,
    /// Coarse seed-point candidates for closed curves.
    pub shift_samples: usize,
    pub max_rounds: usize,
    pub tolerance: f64,
    /// Lattice steps available to the DP.
    pub slopes: Vec<(usize, usize)>,
}

impl Default for ShapeOptions {
    fn default() -> Self {
        Self { rotations: true, reparametrizations: true, grid: None, shift_samples: 32, max_rounds: 20, tolerance: 1e-8, slopes: extended_slopes(7) }
    }
}

/// Best group element found for the second curve and the resulting distance.
///
/// The aligned representative is `R · ((shift_k q₂)∘γ)√γ̇`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShapeAlignment {
    pub rotation: DMatrix<f64>,
    pub warp: Warp,
    /// Cyclic seed-point shift in samples (always 0 for open curves).
    pub shift: usize,
    pub distance: f64,
    pub iterations: usize,
}

impl ShapeAlignment {
    /// Applies the alignment to the SRV of the second curve.
    pub fn apply(&self, s2: &SrvCurve) -> Result<SrvCurve> {
        Ok(self.warp.apply(&s2.shifted(self.shift))?.rotated(&self.rotation))
    }

    pub fn rotation_rows(&self) -> Vec<Vec<f64>> {
        let d = self.rotation.nrows();
        (0..d).map(|r| (0..d).map(|c| self.rotation[(r, c)]).collect()).collect()
    }
}

/// `d^S(c₀, c₁)`: alternates Procrustes and DP until the distance stalls.
pub fn shape_distance(c0: &DiscreteCurve, c1: &DiscreteCurve, opts: &ShapeOptions) -> Result<ShapeAlignment> {
    if c0.dim() != c1.dim() || c0.is_closed() != c1.is_closed() || c0.len() != c1.len() {
        return Err(Error::ShapeMismatch(format!(
            "(N={}, d={}, closed={}) vs (N={}, d={}, closed={})",
            c0.len(),
            c0.dim(),
            c0.is_closed(),
            c1.len(),
            c1.dim(),
            c1.is_closed()
        )));
    }
    c0.validate_immersion()?;
    c1.validate_immersion()?;
    shape_distance_srv(&srv_transform(c0)?, &srv_transform(c1)?, opts)
}

/// [`shape_distance`] on SRV representatives.
pub fn shape_distance_srv(s1: &SrvCurve, s2: &SrvCurve, opts: &ShapeOptions) -> Result<ShapeAlignment> {
    if !s1.is_closed() || !opts.reparametrizations {
        return align_fixed_shift(s1, s2, 0, opts);
    }
    let n = s1.len();
    let coarse = opts.shift_samples.clamp(1, n);
    let candidates: Vec<usize> = (0..coarse).map(|k| k * n / coarse).collect();
    let best = best_of(s1, s2, &candidates, opts)?;
    let radius = n / (2 * coarse);
    if radius == 0 {
        return Ok(best);
    }
    let refine: Vec<usize> = (1..=radius).flat_map(|r| [(best.shift + r) % n, (best.shift + n - r) % n]).collect();
    let refined = best_of(s1, s2, &refine, opts)?;
    Ok(if refined.distance < best.distance { refined } else { best })
}

fn best_of(s1: &SrvCurve, s2: &SrvCurve, shifts: &[usize], opts: &ShapeOptions) -> Result<ShapeAlignment> {
    let results: Vec<ShapeAlignment> =
        shifts.par_iter().map(|&k| align_fixed_shift(s1, s2, k, opts)).collect::<Result<_>>()?;
    let mut best: Option<ShapeAlignment> = None;
    for r in results {
        if best.as_ref().is_none_or(|b| r.distance < b.distance) {
            best = Some(r);
        }
    }
    Ok(best.expect("at least one shift"))
}

fn align_fixed_shift(s1: &SrvCurve, s2: &SrvCurve, shift: usize, opts: &ShapeOptions) -> Result<ShapeAlignment> {
    let d = s1.dim();
    let s2 = s2.shifted(shift);
    let mut rotation = DMatrix::identity(d, d);
    let mut warp = Warp::identity_for(&s2);
    let mut pairing = Pairing::new(s1, &s2, &warp)?;
    let mut distance = pairing.distance(&rotation);
    let mut iterations = 0;
    let grid = opts.grid.unwrap_or_else(|| default_grid(s1.len()));
    while iterations < opts.max_rounds && (opts.rotations || opts.reparametrizations) {
        iterations += 1;
        let start = distance;
        if opts.rotations && d > 1 {
            let fit = procrustes::rotation_from_cross(&pairing.cross());
            let candidate = pairing.distance(&fit.rotation);
            if candidate < distance {
                distance = candidate;
                rotation = fit.rotation;
            }
        }
        if opts.reparametrizations {
            let rotated = s2.rotated(&rotation);
            let path = DpGrid::new(s1, &rotated, grid, &opts.slopes)?.solve();
            let w = path.to_warp(grid, s1.len(), s1.is_closed());
            let p = Pairing::new(s1, &s2, &w)?;
            let candidate = p.distance(&rotation);
            if candidate < distance {
                distance = candidate;
                warp = w;
                pairing = p;
            }
        }
        if !(start - distance >= opts.tolerance) {
            break;
        }
    }
    Ok(ShapeAlignment { rotation, warp, shift, distance, iterations })
}
