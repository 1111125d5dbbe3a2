//! Integrals and (weighted) Sobolev norms.
//!
//! Volume quadrature is the product rule: uniform weights in the periodic
//! directions, trapezoid across the slab. Tangential derivatives inside
//! Sobolev norms are spectral; slab derivatives reuse the FD4 stencils.
//! Face norms are spectral on the periodic faces, including fractional
//! orders via the multiplier `(1 + |2 pi k|^2)^s`.

use crate::grid::{ScalarField, SlabGrid, VectorField};
use crate::ops::deriv3;
use crate::spectral::{deriv_tangential, face_forward, ksq};

/// Trapezoid integral over the slab.
pub fn integral(f: &ScalarField) -> f64 {
    let g = f.grid;
    let mut acc = 0.0;
    for i3 in 0..g.n3 {
        let w = g.w3(i3);
        let base = i3 * g.n1 * g.n2;
        let mut level = 0.0;
        for p in 0..g.n1 * g.n2 {
            level += f.data()[base + p];
        }
        acc += w * level;
    }
    acc * g.h1() * g.h2() * g.h3()
}

/// Mean value (integral divided by the slab volume `L3`).
pub fn mean(f: &ScalarField) -> f64 {
    integral(f) / f.grid.l3
}

/// Weighted L2 norm `sqrt(int w f^2)`; `weight = None` means `w = 1`.
pub fn l2_norm(f: &ScalarField, weight: Option<&ScalarField>) -> f64 {
    let g = f.grid;
    let mut acc = 0.0;
    for i3 in 0..g.n3 {
        let w3 = g.w3(i3);
        let base = i3 * g.n1 * g.n2;
        let mut level = 0.0;
        match weight {
            None => {
                for p in 0..g.n1 * g.n2 {
                    let v = f.data()[base + p];
                    level += v * v;
                }
            }
            Some(w) => {
                for p in 0..g.n1 * g.n2 {
                    let v = f.data()[base + p];
                    level += w.data()[base + p] * v * v;
                }
            }
        }
        acc += w3 * level;
    }
    (acc * g.h1() * g.h2() * g.h3()).max(0.0).sqrt()
}

/// Weighted L2 norm of a vector field (components summed under the root).
pub fn l2_norm_vec(u: &VectorField, weight: Option<&ScalarField>) -> f64 {
    let mut sq = 0.0;
    for i in 0..3 {
        let n = l2_norm(u.comp(i), weight);
        sq += n * n;
    }
    sq.sqrt()
}

fn tangential_deriv_pow(f: &ScalarField, a: u32, b: u32) -> ScalarField {
    let mut out = deriv_tangential(f, 0, a);
    if b > 0 {
        out = deriv_tangential(&out, 1, b);
    }
    out
}

/// H^s norm, integer `s <= 4`: sum of `||d^alpha f||_0^2` over all
/// multi-indices `|alpha| <= s`.
pub fn sobolev_norm(f: &ScalarField, s: usize) -> f64 {
    assert!(s <= 4, "integer Sobolev order up to 4");
    // d3^c applied repeatedly, then tangential orders spectrally
    let mut d3_powers: Vec<ScalarField> = Vec::with_capacity(s + 1);
    d3_powers.push(f.clone());
    for _ in 0..s {
        let next = deriv3(d3_powers.last().unwrap());
        d3_powers.push(next);
    }
    let mut sq = 0.0;
    for c in 0..=s {
        for a in 0..=(s - c) {
            for b in 0..=(s - c - a) {
                let d = tangential_deriv_pow(&d3_powers[c], a as u32, b as u32);
                let n = l2_norm(&d, None);
                sq += n * n;
            }
        }
    }
    sq.sqrt()
}

/// H^s norm of a vector field.
pub fn sobolev_norm_vec(u: &VectorField, s: usize) -> f64 {
    let mut sq = 0.0;
    for i in 0..3 {
        let n = sobolev_norm(u.comp(i), s);
        sq += n * n;
    }
    sq.sqrt()
}

/// Which vacuum face.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Face {
    Bottom,
    Top,
}

impl Face {
    pub fn index(self, g: &SlabGrid) -> usize {
        match self {
            Face::Bottom => 0,
            Face::Top => g.n3 - 1,
        }
    }

    /// Outward normal third component.
    pub fn normal3(self) -> f64 {
        match self {
            Face::Bottom => -1.0,
            Face::Top => 1.0,
        }
    }
}

/// Extract the values of `f` on a face as an `n1 x n2` array (`i1` fastest).
pub fn face_values(f: &ScalarField, face: Face) -> Vec<f64> {
    let g = f.grid;
    let i3 = face.index(&g);
    let base = i3 * g.n1 * g.n2;
    f.data()[base..base + g.n1 * g.n2].to_vec()
}

/// Fractional Sobolev norm on one periodic face:
/// `|f|_s^2 = sum_k (1 + |2 pi k|^2)^s |fhat_k|^2 / (n1 n2)^2`.
pub fn face_sobolev(face_data: &[f64], n1: usize, n2: usize, s: f64) -> f64 {
    let fhat = face_forward(face_data, n1, n2);
    let norm = 1.0 / ((n1 * n2) as f64 * (n1 * n2) as f64);
    let mut acc = 0.0;
    for j2 in 0..n2 {
        for j1 in 0..n1 {
            let m = (1.0 + ksq(j1, n1, j2, n2)).powf(s);
            acc += m * fhat[j2 * n1 + j1].norm_sqr() * norm;
        }
    }
    acc.max(0.0).sqrt()
}

/// Fractional face norm of a scalar field, both faces summed under the root.
pub fn boundary_norm(f: &ScalarField, s: f64) -> f64 {
    let g = f.grid;
    let b = face_sobolev(&face_values(f, Face::Bottom), g.n1, g.n2, s);
    let t = face_sobolev(&face_values(f, Face::Top), g.n1, g.n2, s);
    (b * b + t * t).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::SlabGrid;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn h1_norm_of_slab_sine_matches_closed_form() {
        // ||f||_1^2 = 1/2 + pi^2/2 for f = sin(pi x3) on L3 = 1
        let g = SlabGrid::new(1, 1, 129, 1.0).unwrap();
        let f = ScalarField::from_fn(g, |_, _, x3| (PI * x3).sin());
        let expect = (0.5 + PI * PI / 2.0).sqrt();
        assert_relative_eq!(sobolev_norm(&f, 1), expect, max_relative = 1e-3);
    }

    #[test]
    fn quadrature_error_shrinks_under_refinement() {
        let exact = (0.5_f64 + PI * PI / 2.0).sqrt();
        let err = |n3: usize| {
            let g = SlabGrid::new(1, 1, n3, 1.0).unwrap();
            let f = ScalarField::from_fn(g, |_, _, x3| (PI * x3).sin());
            (sobolev_norm(&f, 1) - exact).abs()
        };
        assert!(err(65) < err(17));
        assert!(err(257) < err(65));
    }

    #[test]
    fn weighted_norm_uses_the_weight() {
        let g = SlabGrid::new(1, 1, 65, 1.0).unwrap();
        let f = ScalarField::constant(g, 2.0);
        let w = ScalarField::from_fn(g, |_, _, x3| x3);
        // int x3 * 4 dx3 = 2
        assert_relative_eq!(l2_norm(&f, Some(&w)), 2.0_f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn face_norm_single_mode() {
        // |f|_s on a face for f = sin(2 pi x1): Fourier mass 1/2 at |k| = 2 pi
        let g = SlabGrid::new(16, 4, 5, 1.0).unwrap();
        let f = ScalarField::from_fn(g, |x1, _, _| (2.0 * PI * x1).sin());
        let s = 0.5;
        let expect = (0.5 * (1.0 + 4.0 * PI * PI).powf(s)).sqrt();
        assert_relative_eq!(
            face_sobolev(&face_values(&f, Face::Bottom), 16, 4, s),
            expect,
            max_relative = 1e-10
        );
    }
}
