//! Dynamic programming over monotone lattice paths.

use crate::curve::interpolate_into;
use crate::error::{Error, Result};
use crate::registration::warp::{knots_for, Warp};
use crate::srv::SrvCurve;

/// The seven basic steps `(Δi, Δj)`, in tie-breaking order: the diagonal
/// comes first and only a strictly cheaper candidate replaces it.
pub const SLOPES: [(usize, usize); 7] = [(1, 1), (2, 3), (3, 2), (1, 2), (2, 1), (1, 3), (3, 1)];

/// Default lattice size `min(N, 128)`.
pub fn default_grid(n: usize) -> usize {
    n.min(128)
}

/// [`SLOPES`] followed by every other coprime step with `Δi, Δj ≤ max_step`
/// and slope in `[1/3, 3]`, shortest first.
pub fn extended_slopes(max_step: usize) -> Vec<(usize, usize)> {
    let mut out = SLOPES.to_vec();
    let mut extra = Vec::new();
    for a in 1..=max_step {
        for b in 1..=max_step {
            if gcd(a, b) == 1 && b <= 3 * a && a <= 3 * b && !out.contains(&(a, b)) {
                extra.push((a, b));
            }
        }
    }
    extra.sort_by_key(|&(a, b)| (a + b, a));
    out.extend(extra);
    out
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `G×G` lattice on `[0,1]²`; `i` indexes the parameter of `q₁`, `j` the
/// parameter of `q₂`.
pub struct DpGrid {
    g: usize,
    dim: usize,
    q1: Vec<f64>,
    /// `q₂` at `j / (a(G−1))` for every step length `a`, indexed by `a − 1`.
    q2: Vec<Vec<f64>>,
    slopes: Vec<(usize, usize)>,
}

/// Optimal lattice path from `(0,0)` to `(G−1,G−1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DpPath {
    pub cost: f64,
    pub nodes: Vec<(usize, usize)>,
}

impl DpGrid {
    pub fn new(s1: &SrvCurve, s2: &SrvCurve, g: usize, slopes: &[(usize, usize)]) -> Result<Self> {
        if s1.dim() != s2.dim() || s1.len() != s2.len() || s1.is_closed() != s2.is_closed() {
            return Err(Error::ShapeMismatch("curves differ in size, dimension or closedness".into()));
        }
        if g < 2 {
            return Err(Error::InvalidInput("DP grid needs at least 2 points".into()));
        }
        if slopes.is_empty() || slopes.iter().any(|&(a, b)| a == 0 || b == 0) {
            return Err(Error::InvalidInput("steps must be strictly positive".into()));
        }
        let d = s1.dim();
        let sample = |s: &SrvCurve, m: usize| {
            let mut out = vec![0.0; (m + 1) * d];
            for i in 0..=m {
                interpolate_into(s.q(), d, s.is_closed(), i as f64 / m as f64, &mut out[i * d..(i + 1) * d]);
            }
            out
        };
        let amax = slopes.iter().map(|s| s.0).max().unwrap();
        let q2 = (1..=amax).map(|a| sample(s2, a * (g - 1))).collect();
        Ok(Self { g, dim: d, q1: sample(s1, g - 1), q2, slopes: slopes.to_vec() })
    }

    pub fn size(&self) -> usize {
        self.g
    }

    pub fn slopes(&self) -> &[(usize, usize)] {
        &self.slopes
    }

    /// Trapezoid quadrature of `|q₁(t) − q₂(γ(t))√m|²` along the straight
    /// edge `from → from + step` with slope `m = Δj/Δi`.
    pub fn edge_cost(&self, from: (usize, usize), step: (usize, usize)) -> f64 {
        let (i0, j0) = from;
        let (a, b) = step;
        let d = self.dim;
        let h = 1.0 / (self.g - 1) as f64;
        let root = (b as f64 / a as f64).sqrt();
        let q2 = &self.q2[a - 1];
        let mut total = 0.0;
        for k in 0..=a {
            let p = &self.q1[(i0 + k) * d..(i0 + k + 1) * d];
            let s = j0 * a + k * b;
            let r = &q2[s * d..(s + 1) * d];
            let f: f64 = p.iter().zip(r).map(|(x, y)| (x - root * y).powi(2)).sum();
            total += if k == 0 || k == a { 0.5 * f } else { f };
        }
        total * h
    }

    pub fn solve(&self) -> DpPath {
        let g = self.g;
        let mut energy = vec![f64::INFINITY; g * g];
        let mut pred = vec![usize::MAX; g * g];
        energy[0] = 0.0;
        for i in 1..g {
            for j in 1..g {
                let mut best = f64::INFINITY;
                let mut arg = usize::MAX;
                for (k, &(a, b)) in self.slopes.iter().enumerate() {
                    if a > i || b > j {
                        continue;
                    }
                    let e = energy[(i - a) * g + (j - b)];
                    if !e.is_finite() {
                        continue;
                    }
                    let cand = e + self.edge_cost((i - a, j - b), (a, b));
                    if cand < best {
                        best = cand;
                        arg = k;
                    }
                }
                energy[i * g + j] = best;
                pred[i * g + j] = arg;
            }
        }
        let mut nodes = vec![(g - 1, g - 1)];
        let (mut i, mut j) = (g - 1, g - 1);
        while (i, j) != (0, 0) {
            let (a, b) = self.slopes[pred[i * g + j]];
            i -= a;
            j -= b;
            nodes.push((i, j));
        }
        nodes.reverse();
        DpPath { cost: energy[g * g - 1], nodes }
    }
}

impl DpPath {
    /// The path as a warp with the knot count matching curves of `n` samples.
    pub fn to_warp(&self, g: usize, n: usize, closed: bool) -> Warp {
        let scale = 1.0 / (g - 1) as f64;
        let xs: Vec<f64> = self.nodes.iter().map(|p| p.0 as f64 * scale).collect();
        let ys: Vec<f64> = self.nodes.iter().map(|p| p.1 as f64 * scale).collect();
        Warp::from_polyline(&xs, &ys, knots_for(n, closed))
    }
}

/// Warp `γ` minimizing `∫|q₁ − (q₂∘γ)√γ̇|²` over lattice paths of size `grid`
/// (default `min(N, 128)`) built from `slopes`.
pub fn optimal_reparam(s1: &SrvCurve, s2: &SrvCurve, grid: Option<usize>, slopes: &[(usize, usize)]) -> Result<Warp> {
    let g = grid.unwrap_or_else(|| default_grid(s1.len()));
    let path = DpGrid::new(s1, s2, g, slopes)?.solve();
    Ok(path.to_warp(g, s1.len(), s1.is_closed()))
}
