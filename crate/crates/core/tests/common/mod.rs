//! Plane curves with closed-form derivatives, used as oracles.
#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use elastica::DiscreteCurve;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Position and first three derivatives at `t`.
pub type Jet = [[f64; 2]; 4];

pub enum Analytic {
    /// `Σ_k a_k cos 2πkt + b_k sin 2πkt` per coordinate: `(k, [ax, bx, ay, by])`.
    Trig(Vec<(f64, [f64; 4])>),
    /// `(r0 + t)(cos wt, sin wt)` on `[0, 1]`.
    Spiral { r0: f64, w: f64 },
}

impl Analytic {
    pub fn ellipse(a: f64, b: f64) -> Self {
        Analytic::Trig(vec![(1.0, [a, 0.0, 0.0, b])])
    }

    /// `r = b + a cos θ`, expanded into harmonics 0, 1, 2.
    pub fn limacon(a: f64, b: f64) -> Self {
        Analytic::Trig(vec![(0.0, [a / 2.0, 0.0, 0.0, 0.0]), (1.0, [b, 0.0, 0.0, b]), (2.0, [a / 2.0, 0.0, 0.0, a / 2.0])])
    }

    pub fn fourier(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut terms = vec![(1.0, [1.0, 0.0, 0.0, 1.0])];
        for k in 2..=5 {
            let s = 0.15 / (k * k) as f64;
            terms.push((k as f64, [(); 4].map(|_| rng.gen_range(-s..s))));
        }
        Analytic::Trig(terms)
    }

    pub fn closed(&self) -> bool {
        matches!(self, Analytic::Trig(_))
    }

    pub fn jet(&self, t: f64) -> Jet {
        match self {
            Analytic::Trig(terms) => {
                let mut j = [[0.0; 2]; 4];
                for &(k, [ax, bx, ay, by]) in terms {
                    let w = TAU * k;
                    let (c, s) = ((w * t).cos(), (w * t).sin());
                    // d^m/dt^m of (a cos + b sin)
                    let d = |a: f64, b: f64, m: i32| -> f64 {
                        let f = w.powi(m);
                        match m % 4 {
                            0 => a * c + b * s,
                            1 => f * (-a * s + b * c),
                            2 => f * (-a * c - b * s),
                            _ => f * (a * s - b * c),
                        }
                    };
                    for m in 0..4 {
                        j[m][0] += d(ax, bx, m as i32);
                        j[m][1] += d(ay, by, m as i32);
                    }
                }
                j
            }
            Analytic::Spiral { r0, w } => {
                let r = r0 + t;
                let (c, s) = ((w * t).cos(), (w * t).sin());
                [
                    [r * c, r * s],
                    [c - r * w * s, s + r * w * c],
                    [-2.0 * w * s - r * w * w * c, 2.0 * w * c - r * w * w * s],
                    [-3.0 * w * w * c + r * w.powi(3) * s, -3.0 * w * w * s - r * w.powi(3) * c],
                ]
            }
        }
    }

    pub fn sample(&self, n: usize) -> DiscreteCurve {
        let closed = self.closed();
        let pts: Vec<[f64; 2]> = elastica::diff::parameters(n, closed).into_iter().map(|t| self.jet(t)[0]).collect();
        DiscreteCurve::from_points(&pts, closed).unwrap()
    }

    pub fn sample_warped(&self, n: usize, gamma: impl Fn(f64) -> f64) -> DiscreteCurve {
        let closed = self.closed();
        let pts: Vec<[f64; 2]> =
            elastica::diff::parameters(n, closed).into_iter().map(|t| self.jet(gamma(t))[0]).collect();
        DiscreteCurve::from_points(&pts, closed).unwrap()
    }
}

/// Exact `(ω, ω̇, κ, ω̃, κ̃)` of the curve and its SRV image at `t`.
pub struct PlaneJet {
    pub omega: f64,
    pub omega_dot: f64,
    pub kappa: f64,
    pub omega_tilde: f64,
    pub kappa_tilde: f64,
}

pub fn plane_jet(j: &Jet) -> PlaneJet {
    let [_, v, a, b] = *j;
    let dot = |x: [f64; 2], y: [f64; 2]| x[0] * y[0] + x[1] * y[1];
    let cross = |x: [f64; 2], y: [f64; 2]| x[0] * y[1] - x[1] * y[0];
    let omega = dot(v, v).sqrt();
    let omega_dot = dot(v, a) / omega;
    let omega_ddot = (dot(a, a) + dot(v, b)) / omega - omega_dot * omega_dot / omega;
    let kappa = cross(v, a) / omega.powi(3);
    let kappa_dot = cross(v, b) / omega.powi(3) - 3.0 * kappa * omega_dot / omega;
    let omega_tilde = (omega_dot * omega_dot / (4.0 * omega) + omega.powi(3) * kappa * kappa).sqrt();
    // φ = atan2(Y, X) with Y = 2ω²κ, X = ω̇
    let (x, y) = (omega_dot, 2.0 * omega * omega * kappa);
    let (xd, yd) = (omega_ddot, 4.0 * omega * omega_dot * kappa + 2.0 * omega * omega * kappa_dot);
    let phi_dot = (x * yd - y * xd) / (x * x + y * y);
    PlaneJet { omega, omega_dot, kappa, omega_tilde, kappa_tilde: (kappa * omega + phi_dot) / omega_tilde }
}

/// Ten curves: ellipses, limaçons, a spiral and five seeded Fourier curves.
pub fn corpus() -> Vec<(String, Analytic)> {
    let mut v = vec![
        ("ellipse 1x0.5".to_string(), Analytic::ellipse(1.0, 0.5)),
        ("ellipse 2x0.7".to_string(), Analytic::ellipse(2.0, 0.7)),
        ("limacon 0.5,1".to_string(), Analytic::limacon(0.5, 1.0)),
        ("limacon 0.3,1".to_string(), Analytic::limacon(0.3, 1.0)),
        ("spiral".to_string(), Analytic::Spiral { r0: 0.5, w: 3.0 * PI }),
    ];
    for k in 0..5 {
        v.push((format!("fourier #{k}"), Analytic::fourier(100 + k)));
    }
    v
}
