//! Finite differences on uniformly sampled sequences, trapezoid quadrature,
//! and the exact discrete inverse of the first-derivative operator.
//!
//! Every derivative in the crate goes through this module so that curves,
//! their SRV images and scalar quantities such as `ω` and `φ` are all
//! differentiated by one and the same operator. Interior samples use the
//! five-point centered stencil; the two samples nearest an open end use
//! fourth-order one-sided/biased stencils. Sequences shorter than five
//! (six, for second derivatives) fall back to three-point stencils.
//!
//! Mixing stencil orders is not harmless here: differentiating the output of
//! a second-order scheme a second time leaves an `O(1)` error at open ends,
//! which is visible in the curvature of SRV images.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Parameter spacing for `n` samples on `[0, 1]`.
pub fn spacing(n: usize, closed: bool) -> f64 {
    if closed {
        1.0 / n as f64
    } else {
        1.0 / (n - 1) as f64
    }
}

/// Parameter values of the samples.
pub fn parameters(n: usize, closed: bool) -> Vec<f64> {
    let h = spacing(n, closed);
    (0..n).map(|i| i as f64 * h).collect()
}

/// Trapezoid weights (cyclic trapezoid, i.e. a Riemann sum, when closed).
pub fn trapezoid_weights(n: usize, closed: bool) -> Vec<f64> {
    let h = spacing(n, closed);
    let mut w = vec![h; n];
    if !closed {
        w[0] = 0.5 * h;
        w[n - 1] = 0.5 * h;
    }
    w
}

/// `∫ f dt` by the trapezoid rule.
pub fn integrate(f: &[f64], closed: bool) -> f64 {
    trapezoid_weights(f.len(), closed)
        .iter()
        .zip(f)
        .map(|(w, v)| w * v)
        .sum()
}

/// First derivative of a scalar sequence.
pub fn derivative(f: &[f64], closed: bool) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 3, "derivative needs at least 3 samples");
    let h = spacing(n, closed);
    let mut out = vec![0.0; n];
    if closed {
        let at = |i: isize| f[i.rem_euclid(n as isize) as usize];
        for (i, o) in out.iter_mut().enumerate() {
            let i = i as isize;
            *o = if n >= 5 {
                (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) / (12.0 * h)
            } else {
                (at(i + 1) - at(i - 1)) / (2.0 * h)
            };
        }
        return out;
    }
    if n < 5 {
        out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
        for i in 1..n - 1 {
            out[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
        }
        out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
        return out;
    }
    let d = 12.0 * h;
    out[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / d;
    out[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / d;
    for i in 2..n - 2 {
        out[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / d;
    }
    let m = n - 1;
    out[m - 1] = (3.0 * f[m] + 10.0 * f[m - 1] - 18.0 * f[m - 2] + 6.0 * f[m - 3] - f[m - 4]) / d;
    out[m] = (25.0 * f[m] - 48.0 * f[m - 1] + 36.0 * f[m - 2] - 16.0 * f[m - 3] + 3.0 * f[m - 4]) / d;
    out
}

/// Second derivative of a scalar sequence.
pub fn second_derivative(f: &[f64], closed: bool) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 3, "second derivative needs at least 3 samples");
    let h = spacing(n, closed);
    let h2 = h * h;
    let mut out = vec![0.0; n];
    if closed {
        let at = |i: isize| f[i.rem_euclid(n as isize) as usize];
        for (i, o) in out.iter_mut().enumerate() {
            let i = i as isize;
            *o = if n >= 5 {
                (-at(i - 2) + 16.0 * at(i - 1) - 30.0 * at(i) + 16.0 * at(i + 1) - at(i + 2))
                    / (12.0 * h2)
            } else {
                (at(i + 1) - 2.0 * at(i) + at(i - 1)) / h2
            };
        }
        return out;
    }
    if n < 6 {
        for i in 1..n - 1 {
            out[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
        }
        if n >= 4 {
            out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
            out[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
        } else {
            out[0] = out[1];
            out[n - 1] = out[1];
        }
        return out;
    }
    let d = 12.0 * h2;
    let start = |g: &dyn Fn(usize) -> f64| {
        (
            (45.0 * g(0) - 154.0 * g(1) + 214.0 * g(2) - 156.0 * g(3) + 61.0 * g(4) - 10.0 * g(5)) / d,
            (10.0 * g(0) - 15.0 * g(1) - 4.0 * g(2) + 14.0 * g(3) - 6.0 * g(4) + g(5)) / d,
        )
    };
    let (a, b) = start(&|k| f[k]);
    out[0] = a;
    out[1] = b;
    let (a, b) = start(&|k| f[n - 1 - k]);
    out[n - 1] = a;
    out[n - 2] = b;
    for i in 2..n - 2 {
        out[i] = (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]) / d;
    }
    out
}

/// Derivative of an angle sequence that was unwrapped along the samples.
///
/// For closed sequences the unwrapped angle may gain a multiple of `2π` over
/// one loop; that winding is removed before the cyclic stencil and added back
/// as a constant rate.
pub fn angle_derivative(phi: &[f64], closed: bool) -> Vec<f64> {
    if !closed {
        return derivative(phi, false);
    }
    let n = phi.len();
    let last_step = wrap_angle(phi[0] - phi[n - 1]);
    let winding = phi[n - 1] + last_step - phi[0];
    let detrended: Vec<f64> = phi
        .iter()
        .enumerate()
        .map(|(i, p)| p - winding * i as f64 / n as f64)
        .collect();
    derivative(&detrended, true)
        .into_iter()
        .map(|d| d + winding)
        .collect()
}

/// Maps an angle to `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut r = a.rem_euclid(TAU);
    if r > PI {
        r -= TAU;
    }
    r
}

/// Unwraps an angle sequence so consecutive samples differ by at most `π`.
pub fn unwrap(angles: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(angles.len());
    let mut prev: Option<f64> = None;
    for &a in angles {
        let v = match prev {
            None => a,
            Some(p) => p + wrap_angle(a - p),
        };
        out.push(v);
        prev = Some(v);
    }
    out
}

/// Applies `op` to every coordinate of a flat, row-major point sequence.
pub fn per_component(
    data: &[f64],
    dim: usize,
    op: impl Fn(&[f64]) -> Vec<f64>,
) -> Vec<f64> {
    let n = data.len() / dim;
    let mut out = vec![0.0; data.len()];
    let mut column = vec![0.0; n];
    for k in 0..dim {
        for i in 0..n {
            column[i] = data[i * dim + k];
        }
        for (i, v) in op(&column).into_iter().enumerate() {
            out[i * dim + k] = v;
        }
    }
    out
}

/// Solves `D c = v` for `c` with `c[0] = start`, where `D` is the operator of
/// [`derivative`]. Points are flat row-major with `dim` coordinates.
///
/// Open sequences are solved in the least-squares sense (the system has one
/// more equation than unknowns); when `v` is the derivative of an actual
/// sequence the solution reproduces it up to rounding. Closed sequences are
/// inverted in the Fourier basis; the constant mode of `v` (the closure gap)
/// and, for even lengths, the Nyquist mode lie in the cokernel and are
/// dropped.
pub fn antiderivative(v: &[f64], dim: usize, closed: bool, start: &[f64]) -> Vec<f64> {
    let n = v.len() / dim;
    assert!(n >= 3, "antiderivative needs at least 3 samples");
    assert_eq!(start.len(), dim);
    if closed {
        let mut out = per_component(v, dim, periodic_antiderivative);
        for i in 0..n {
            for k in 0..dim {
                out[i * dim + k] += start[k];
            }
        }
        out
    } else {
        let mut out = open_antiderivative(v, dim);
        for (i, x) in out.iter_mut().enumerate() {
            *x += start[i % dim];
        }
        out
    }
}

fn periodic_antiderivative(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let h = spacing(n, true);
    let mut planner = FftPlanner::<f64>::new();
    let mut buf: Vec<Complex<f64>> = v.iter().map(|&x| Complex::new(x, 0.0)).collect();
    planner.plan_fft_forward(n).process(&mut buf);
    for (k, c) in buf.iter_mut().enumerate() {
        let x = std::f64::consts::TAU * k as f64 / n as f64;
        let gain = if n >= 5 {
            (8.0 * x.sin() - (2.0 * x).sin()) / (6.0 * h)
        } else {
            x.sin() / h
        };
        if k == 0 || gain.abs() < 1e-9 / h {
            *c = Complex::new(0.0, 0.0);
        } else {
            // divide by i·gain
            *c = Complex::new(c.im / gain, -c.re / gain);
        }
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let c0 = buf[0].re / n as f64;
    buf.iter().map(|c| c.re / n as f64 - c0).collect()
}

/// Row `i` of the first-derivative operator scaled by `12h` (or `2h`): the
/// first column index and the integer stencil weights.
fn operator_row(i: usize, n: usize) -> (usize, Vec<f64>, f64) {
    if n < 5 {
        let row = if i == 0 {
            (0, vec![-3.0, 4.0, -1.0])
        } else if i == n - 1 {
            (n - 3, vec![1.0, -4.0, 3.0])
        } else {
            (i - 1, vec![-1.0, 0.0, 1.0])
        };
        return (row.0, row.1, 2.0);
    }
    let row = match i {
        0 => (0, vec![-25.0, 48.0, -36.0, 16.0, -3.0]),
        1 => (0, vec![-3.0, -10.0, 18.0, -6.0, 1.0]),
        _ if i == n - 2 => (n - 5, vec![-1.0, 6.0, -18.0, 10.0, 3.0]),
        _ if i == n - 1 => (n - 5, vec![3.0, -16.0, 36.0, -48.0, 25.0]),
        _ => (i - 2, vec![1.0, -8.0, 0.0, 8.0, -1.0]),
    };
    (row.0, row.1, 12.0)
}

const BAND: usize = 12;

/// Banded least squares by row-wise Givens rotations. Unknowns are
/// `c[1..n]` with `c[0] = 0`.
fn open_antiderivative(v: &[f64], dim: usize) -> Vec<f64> {
    let n = v.len() / dim;
    let h = spacing(n, false);
    let unknowns = n - 1;
    // r_rows[j]: coefficients for columns j..j+BAND of unknown j, plus rhs.
    let mut r_rows: Vec<Option<([f64; BAND], Vec<f64>)>> = vec![None; unknowns];
    for i in 0..n {
        let (first, weights, denom) = operator_row(i, n);
        let mut rhs: Vec<f64> = (0..dim).map(|k| v[i * dim + k] * denom * h).collect();
        let mut cols = Vec::with_capacity(weights.len());
        for (off, w) in weights.iter().enumerate() {
            let col = first + off;
            if col != 0 && *w != 0.0 {
                cols.push((col - 1, *w));
            }
        }
        if cols.is_empty() {
            continue;
        }
        let mut lead = cols[0].0;
        let mut a = [0.0; BAND];
        for (col, w) in cols {
            a[col - lead] = w;
        }
        loop {
            while lead < unknowns && a[0] == 0.0 {
                a.rotate_left(1);
                a[BAND - 1] = 0.0;
                lead += 1;
            }
            if lead >= unknowns {
                break;
            }
            match &mut r_rows[lead] {
                slot @ None => {
                    *slot = Some((a, rhs));
                    break;
                }
                Some((r, rb)) => {
                    let rho = r[0].hypot(a[0]);
                    let (c, s) = (r[0] / rho, a[0] / rho);
                    for k in 0..BAND {
                        let (x, y) = (r[k], a[k]);
                        r[k] = c * x + s * y;
                        a[k] = -s * x + c * y;
                    }
                    for k in 0..dim {
                        let (x, y) = (rb[k], rhs[k]);
                        rb[k] = c * x + s * y;
                        rhs[k] = -s * x + c * y;
                    }
                    a[0] = 0.0;
                }
            }
        }
    }
    let mut x = vec![0.0; unknowns * dim];
    for j in (0..unknowns).rev() {
        let Some((r, rb)) = &r_rows[j] else { continue };
        for k in 0..dim {
            let mut acc = rb[k];
            for off in 1..BAND {
                if j + off < unknowns {
                    acc -= r[off] * x[(j + off) * dim + k];
                }
            }
            x[j * dim + k] = acc / r[0];
        }
    }
    let mut out = vec![0.0; dim];
    out.extend_from_slice(&x);
    out
}
