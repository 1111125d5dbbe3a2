//! Differential operators on slab fields: spectral in the periodic
//! directions, fourth-order centered differences across the slab with
//! one-sided closures of the same order at the faces.

use crate::grid::{ScalarField, TensorField, VectorField};
use crate::spectral::deriv_tangential;

/// d/dx3 with the 4th-order 5-point stencil; one-sided at the two nodes
/// next to each face.
pub fn deriv3(f: &ScalarField) -> ScalarField {
    let g = f.grid;
    let n3 = g.n3;
    let ih = 1.0 / (12.0 * g.h3());
    let mut out = ScalarField::zeros(g);
    let plane = g.n1 * g.n2;
    let d = f.data();
    let o = out.data_mut();
    for i3 in 0..n3 {
        let row = i3 * plane;
        match i3 {
            0 => {
                for p in 0..plane {
                    o[row + p] = ih
                        * (-25.0 * d[p]
                            + 48.0 * d[plane + p]
                            - 36.0 * d[2 * plane + p]
                            + 16.0 * d[3 * plane + p]
                            - 3.0 * d[4 * plane + p]);
                }
            }
            1 => {
                for p in 0..plane {
                    o[row + p] = ih
                        * (-3.0 * d[p]
                            - 10.0 * d[plane + p]
                            + 18.0 * d[2 * plane + p]
                            - 6.0 * d[3 * plane + p]
                            + d[4 * plane + p]);
                }
            }
            k if k == n3 - 2 => {
                let b = (n3 - 5) * plane;
                for p in 0..plane {
                    o[row + p] = ih
                        * (3.0 * d[b + 4 * plane + p]
                            + 10.0 * d[b + 3 * plane + p]
                            - 18.0 * d[b + 2 * plane + p]
                            + 6.0 * d[b + plane + p]
                            - d[b + p]);
                }
            }
            k if k == n3 - 1 => {
                let b = (n3 - 5) * plane;
                for p in 0..plane {
                    o[row + p] = ih
                        * (25.0 * d[b + 4 * plane + p]
                            - 48.0 * d[b + 3 * plane + p]
                            + 36.0 * d[b + 2 * plane + p]
                            - 16.0 * d[b + plane + p]
                            + 3.0 * d[b + p]);
                }
            }
            _ => {
                let b = (i3 - 2) * plane;
                for p in 0..plane {
                    o[row + p] = ih
                        * (d[b + p] - 8.0 * d[b + plane + p] + 8.0 * d[b + 3 * plane + p]
                            - d[b + 4 * plane + p]);
                }
            }
        }
    }
    out
}

/// Partial derivative along axis `dir` in {0, 1, 2} (0-based; 2 = slab).
pub fn deriv(f: &ScalarField, dir: usize) -> ScalarField {
    match dir {
        0 | 1 => deriv_tangential(f, dir, 1),
        2 => deriv3(f),
        _ => unreachable!("axis out of range"),
    }
}

/// Full gradient `(d1 f, d2 f, d3 f)`.
pub fn gradient(f: &ScalarField) -> VectorField {
    VectorField::from_components(deriv(f, 0), deriv(f, 1), deriv(f, 2))
}

/// Tangential gradient: only the periodic derivatives; third component zero.
pub fn tangential_gradient(f: &ScalarField) -> VectorField {
    VectorField::from_components(deriv(f, 0), deriv(f, 1), ScalarField::zeros(f.grid))
}

/// Flat divergence `sum_i d_i u^i`.
pub fn divergence(u: &VectorField) -> ScalarField {
    let mut out = deriv(u.comp(0), 0);
    let d1 = deriv(u.comp(1), 1);
    let d2 = deriv(u.comp(2), 2);
    out.add_scaled(&d1, 1.0);
    out.add_scaled(&d2, 1.0);
    out
}

/// Flat curl.
pub fn curl(u: &VectorField) -> VectorField {
    let d = |i: usize, k: usize| deriv(u.comp(i), k);
    VectorField::from_components(
        &d(2, 1) - &d(1, 2),
        &d(0, 2) - &d(2, 0),
        &d(1, 0) - &d(0, 1),
    )
}

/// Jacobian of a vector field: `comp(i, k) = d_k u^i`.
pub fn grad_vector(u: &VectorField) -> TensorField {
    let mut t = TensorField::zeros(u.grid);
    for i in 0..3 {
        for k in 0..3 {
            *t.comp_mut(i, k) = deriv(u.comp(i), k);
        }
    }
    t
}

/// Flat Laplacian.
pub fn laplacian(f: &ScalarField) -> ScalarField {
    let mut out = deriv_tangential(f, 0, 2);
    out.add_scaled(&deriv_tangential(f, 1, 2), 1.0);
    out.add_scaled(&deriv3(&deriv3(f)), 1.0);
    out
}
