//! Spectral machinery for the periodic directions (unit period).
//!
//! Derivatives in directions 1 and 2 are exact for band-limited data; the
//! Nyquist mode is zeroed for odd derivative orders (it carries no usable
//! phase) and kept real for even orders.

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use crate::grid::{ScalarField, SlabGrid};

thread_local! {
    static PLANS: RefCell<HashMap<(usize, bool), Arc<dyn Fft<f64>>>> =
        RefCell::new(HashMap::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|cell| {
        cell.borrow_mut()
            .entry((n, inverse))
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                if inverse {
                    planner.plan_fft_inverse(n)
                } else {
                    planner.plan_fft_forward(n)
                }
            })
            .clone()
    })
}

/// Signed integer wavenumber of bin `i` in an `n`-point transform.
#[inline]
pub fn signed_k(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Multiplier implementing `(d/dx)^order` on bin `i` (unit period).
fn deriv_multiplier(i: usize, n: usize, order: u32) -> Complex<f64> {
    let k = signed_k(i, n);
    if n % 2 == 0 && i == n / 2 && order % 2 == 1 {
        return Complex::new(0.0, 0.0);
    }
    let ik = Complex::new(0.0, 2.0 * std::f64::consts::PI * k as f64);
    ik.powu(order)
}

/// Apply a per-bin multiplier along direction `dir` (0-based: 0 or 1).
fn apply_multiplier_along(
    f: &ScalarField,
    dir: usize,
    mult: &dyn Fn(usize, usize) -> Complex<f64>,
) -> ScalarField {
    let g = f.grid;
    let (n, stride, lines) = match dir {
        0 => (g.n1, 1usize, g.n2 * g.n3),
        1 => (g.n2, g.n1, g.n1 * g.n3),
        _ => unreachable!("tangential directions are 0 and 1"),
    };
    if n == 1 {
        // single-node period: only the mean mode exists
        let m = mult(0, 1);
        return f.map(|v| v * m.re);
    }
    let fwd = plan(n, false);
    let inv = plan(n, true);
    let mut out = ScalarField::zeros(g);
    let mut buf = vec![Complex::new(0.0, 0.0); n];
    let scale = 1.0 / n as f64;
    for line in 0..lines {
        // base flat offset for this line
        let base = match dir {
            0 => line * g.n1,
            _ => {
                let i1 = line % g.n1;
                let i3 = line / g.n1;
                i3 * g.n1 * g.n2 + i1
            }
        };
        for j in 0..n {
            buf[j] = Complex::new(f.data()[base + j * stride], 0.0);
        }
        fwd.process(&mut buf);
        for (j, b) in buf.iter_mut().enumerate() {
            *b *= mult(j, n);
        }
        inv.process(&mut buf);
        for j in 0..n {
            out.data_mut()[base + j * stride] = buf[j].re * scale;
        }
    }
    out
}

/// Spectral derivative of `order` along tangential direction `dir` (0 or 1).
pub fn deriv_tangential(f: &ScalarField, dir: usize, order: u32) -> ScalarField {
    if order == 0 {
        return f.clone();
    }
    apply_multiplier_along(f, dir, &|i, n| deriv_multiplier(i, n, order))
}

/// Forward 2D tangential transform of every `x3` level.
///
/// Output layout matches the field layout; bin `(k1, k2)` of level `i3`
/// sits at the same flat index as node `(k1, k2, i3)`. Unnormalized
/// (inverse applies `1/(n1 n2)`).
pub fn tangential_forward(f: &ScalarField) -> Vec<Complex<f64>> {
    let g = f.grid;
    let mut out: Vec<Complex<f64>> =
        f.data().iter().map(|&v| Complex::new(v, 0.0)).collect();
    fft_levels_inplace(&mut out, g, false);
    out
}

/// Inverse of [`tangential_forward`] (applies the `1/(n1 n2)` factor,
/// returns the real part).
pub fn tangential_inverse(mut modes: Vec<Complex<f64>>, g: SlabGrid) -> ScalarField {
    fft_levels_inplace(&mut modes, g, true);
    let scale = 1.0 / (g.n1 * g.n2) as f64;
    let mut out = ScalarField::zeros(g);
    for (o, m) in out.data_mut().iter_mut().zip(&modes) {
        *o = m.re * scale;
    }
    out
}

fn fft_levels_inplace(data: &mut [Complex<f64>], g: SlabGrid, inverse: bool) {
    if g.n1 > 1 {
        let fft = plan(g.n1, inverse);
        for i3 in 0..g.n3 {
            for i2 in 0..g.n2 {
                let base = (i3 * g.n2 + i2) * g.n1;
                fft.process(&mut data[base..base + g.n1]);
            }
        }
    }
    if g.n2 > 1 {
        let fft = plan(g.n2, inverse);
        let mut buf = vec![Complex::new(0.0, 0.0); g.n2];
        for i3 in 0..g.n3 {
            for i1 in 0..g.n1 {
                let base = i3 * g.n1 * g.n2 + i1;
                for i2 in 0..g.n2 {
                    buf[i2] = data[base + i2 * g.n1];
                }
                fft.process(&mut buf);
                for i2 in 0..g.n2 {
                    data[base + i2 * g.n1] = buf[i2];
                }
            }
        }
    }
}

/// Forward 2D transform of one face (an `n1 x n2` real array, `i1` fastest).
/// Unnormalized.
pub fn face_forward(face: &[f64], n1: usize, n2: usize) -> Vec<Complex<f64>> {
    let mut data: Vec<Complex<f64>> =
        face.iter().map(|&v| Complex::new(v, 0.0)).collect();
    if n1 > 1 {
        let fft = plan(n1, false);
        for i2 in 0..n2 {
            fft.process(&mut data[i2 * n1..(i2 + 1) * n1]);
        }
    }
    if n2 > 1 {
        let fft = plan(n2, false);
        let mut buf = vec![Complex::new(0.0, 0.0); n2];
        for i1 in 0..n1 {
            for i2 in 0..n2 {
                buf[i2] = data[i2 * n1 + i1];
            }
            fft.process(&mut buf);
            for i2 in 0..n2 {
                data[i2 * n1 + i1] = buf[i2];
            }
        }
    }
    data
}

/// Squared tangential wave vector magnitude `|2 pi k|^2` for bin `(j1, j2)`.
#[inline]
pub fn ksq(j1: usize, n1: usize, j2: usize, n2: usize) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let k1 = two_pi * signed_k(j1, n1) as f64;
    let k2 = two_pi * signed_k(j2, n2) as f64;
    k1 * k1 + k2 * k2
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn derivative_exact_on_single_mode() {
        let g = SlabGrid::new(16, 8, 5, 1.0).unwrap();
        let f = ScalarField::from_fn(g, |x1, x2, _| (2.0 * std::f64::consts::PI * (3.0 * x1 + x2)).sin());
        let d1 = deriv_tangential(&f, 0, 1);
        let expect = ScalarField::from_fn(g, |x1, x2, _| {
            3.0 * 2.0 * std::f64::consts::PI
                * (2.0 * std::f64::consts::PI * (3.0 * x1 + x2)).cos()
        });
        let mut err = 0.0_f64;
        for (a, b) in d1.data().iter().zip(expect.data()) {
            err = err.max((a - b).abs());
        }
        assert!(err < 1e-10, "spectral derivative error {err}");
    }

    #[test]
    fn second_derivative_matches_squared_multiplier() {
        let g = SlabGrid::new(12, 1, 5, 1.0).unwrap();
        let f = ScalarField::from_fn(g, |x1, _, _| (2.0 * std::f64::consts::PI * 2.0 * x1).cos());
        let d2 = deriv_tangential(&f, 0, 2);
        let w = 2.0 * std::f64::consts::PI * 2.0;
        for (i, v) in d2.data().iter().enumerate() {
            let x1 = g.x1(g.coords(i).0);
            assert_relative_eq!(
                *v,
                -w * w * (w * x1 / 2.0 * 2.0).cos(),
                epsilon = 1e-9 * w * w
            );
        }
    }

    #[test]
    fn round_trip_forward_inverse() {
        let g = SlabGrid::new(8, 4, 5, 1.0).unwrap();
        let f = ScalarField::from_fn(g, |x1, x2, x3| {
            (6.3 * x1).sin() + x2 * x2 + 0.3 * x3
        });
        let back = tangential_inverse(tangential_forward(&f), g);
        for (a, b) in back.data().iter().zip(f.data()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
