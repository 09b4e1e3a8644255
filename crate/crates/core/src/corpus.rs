//! Named smooth plane curves used by `prop-check` and the test suites.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curve::DiscreteCurve;
use crate::error::Result;

/// Ellipse with semi-axes `a`, `b`, traversed once counterclockwise.
pub fn ellipse(a: f64, b: f64, n: usize) -> Result<DiscreteCurve> {
    DiscreteCurve::from_fn(n, true, |t| [a * (TAU * t).cos(), b * (TAU * t).sin()])
}

/// Circle of radius `r` traversed `turns` times.
pub fn circle(r: f64, turns: u32, n: usize) -> Result<DiscreteCurve> {
    let w = TAU * f64::from(turns);
    DiscreteCurve::from_fn(n, true, |t| [r * (w * t).cos(), r * (w * t).sin()])
}

/// Limaçon `r(θ) = b + a cos θ`.
pub fn limacon(a: f64, b: f64, n: usize) -> Result<DiscreteCurve> {
    DiscreteCurve::from_fn(n, true, |t| {
        let th = TAU * t;
        let r = b + a * th.cos();
        [r * th.cos(), r * th.sin()]
    })
}

/// Archimedean spiral piece `r = r0 + t`, `θ = 2π·turns·t`.
pub fn spiral(r0: f64, turns: f64, n: usize) -> Result<DiscreteCurve> {
    DiscreteCurve::from_fn(n, false, |t| {
        let th = TAU * turns * t;
        [(r0 + t) * th.cos(), (r0 + t) * th.sin()]
    })
}

/// Unit circle plus harmonics 2..=5 with random coefficients of size
/// at most `0.15/k²`.
pub fn fourier_curve(seed: u64, n: usize) -> Result<DiscreteCurve> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coef: Vec<[f64; 4]> = (2..=5)
        .map(|k| {
            let s = 0.15 / (k * k) as f64;
            [(); 4].map(|_| rng.gen_range(-s..s))
        })
        .collect();
    DiscreteCurve::from_fn(n, true, |t| {
        let (mut x, mut y) = ((TAU * t).cos(), (TAU * t).sin());
        for (i, c) in coef.iter().enumerate() {
            let a = TAU * (i + 2) as f64 * t;
            x += c[0] * a.cos() + c[1] * a.sin();
            y += c[2] * a.cos() + c[3] * a.sin();
        }
        [x, y]
    })
}

/// Ten curves: two ellipses, two limaçons, a spiral and five Fourier curves.
pub fn plane_corpus(n: usize, seed: u64) -> Result<Vec<(String, DiscreteCurve)>> {
    let mut out = vec![
        ("ellipse 1x0.5".to_string(), ellipse(1.0, 0.5, n)?),
        ("ellipse 2x0.7".to_string(), ellipse(2.0, 0.7, n)?),
        ("limacon 0.5,1".to_string(), limacon(0.5, 1.0, n)?),
        ("limacon 0.3,1".to_string(), limacon(0.3, 1.0, n)?),
        ("spiral".to_string(), spiral(0.5, 1.5, n)?),
    ];
    for k in 0..5 {
        out.push((format!("fourier #{k}"), fourier_curve(seed.wrapping_add(k), n)?));
    }
    Ok(out)
}
