//! Deformation algebra of the flow map.
//!
//! The flow map `eta` maps the reference slab into the fluid domain and is
//! periodic up to the identity in the tangential directions, so every
//! derivative here acts on the displacement `eta - x` (periodic) and adds
//! the identity back. The pack carries
//!
//! * `f`     - deformation gradient, `f.comp(i, k) = d eta^i / d x_k`;
//! * `finv`  - inverse in dual layout (see [`crate::grid::TensorField`]),
//!             computed by per-node Gaussian elimination;
//! * `fstar` - cofactor matrix from the analytic cross-product formula,
//!             `fstar.comp(i, k) = dJ / d f.comp(i, k)`;
//! * `j`     - Jacobian determinant.
//!
//! `fstar` and `J * finv` agree entry-by-entry; keeping both routes makes
//! that an enforceable invariant rather than a definition.

use crate::grid::{ScalarField, SlabGrid, TensorField, VectorField};
use crate::ops::{deriv, grad_vector};

#[derive(Clone, Debug)]
pub struct DeformationPack {
    pub f: TensorField,
    pub finv: TensorField,
    pub fstar: TensorField,
    pub j: ScalarField,
}

/// Derivatives of the flow map: identity plus derivatives of the periodic
/// displacement.
pub fn flow_map_gradient(eta: &VectorField) -> TensorField {
    let g = eta.grid;
    let mut disp = eta.clone();
    let id = identity_map(g);
    disp.add_scaled(&id, -1.0);
    let mut f = grad_vector(&disp);
    for i in 0..3 {
        let one = ScalarField::constant(g, 1.0);
        f.comp_mut(i, i).add_scaled(&one, 1.0);
    }
    f
}

/// The identity flow map `eta(x) = x`.
pub fn identity_map(g: SlabGrid) -> VectorField {
    VectorField::from_fn(g, |x1, x2, x3| [x1, x2, x3])
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// 3x3 inverse by Gaussian elimination with partial pivoting.
/// Returns the plain matrix inverse `m[r][c] = (F^{-1})_{rc}`.
fn invert3(m: [[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut a = m;
    let mut inv = [[0.0; 3]; 3];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for col in 0..3 {
        let mut piv = col;
        for r in col + 1..3 {
            if a[r][col].abs() > a[piv][col].abs() {
                piv = r;
            }
        }
        if piv != col {
            a.swap(col, piv);
            inv.swap(col, piv);
        }
        let d = a[col][col];
        for c in 0..3 {
            a[col][c] /= d;
            inv[col][c] /= d;
        }
        for r in 0..3 {
            if r != col {
                let factor = a[r][col];
                for c in 0..3 {
                    a[r][c] -= factor * a[col][c];
                    inv[r][c] -= factor * inv[col][c];
                }
            }
        }
    }
    inv
}

/// Build the deformation pack from a flow map.
pub fn build_deformation(eta: &VectorField) -> DeformationPack {
    let g = eta.grid;
    let f = flow_map_gradient(eta);
    let mut finv = TensorField::zeros(g);
    let mut fstar = TensorField::zeros(g);
    let mut j = ScalarField::zeros(g);
    for i3 in 0..g.n3 {
        for i2 in 0..g.n2 {
            for i1 in 0..g.n1 {
                let m = f.matrix_at(i1, i2, i3);
                // columns of F are the tangent vectors eta_{,k}
                let c = |k: usize| [m[0][k], m[1][k], m[2][k]];
                let cof_cols = [cross(c(1), c(2)), cross(c(2), c(0)), cross(c(0), c(1))];
                let det = c(0)[0] * cof_cols[0][0]
                    + c(0)[1] * cof_cols[0][1]
                    + c(0)[2] * cof_cols[0][2];
                *j.at_mut(i1, i2, i3) = det;
                let minv = invert3(m);
                for i in 0..3 {
                    for k in 0..3 {
                        // dual layout: comp(i, k) = (F^{-1})_{ki}
                        *finv.comp_mut(i, k).at_mut(i1, i2, i3) = minv[k][i];
                        // cofactor (i, k) = dJ/dF_{ik} = (cof column k)_i
                        *fstar.comp_mut(i, k).at_mut(i1, i2, i3) = cof_cols[k][i];
                    }
                }
            }
        }
    }
    DeformationPack { f, finv, fstar, j }
}

impl DeformationPack {
    pub fn identity(g: SlabGrid) -> Self {
        Self {
            f: TensorField::identity(g),
            finv: TensorField::identity(g),
            fstar: TensorField::identity(g),
            j: ScalarField::constant(g, 1.0),
        }
    }

    pub fn grid(&self) -> SlabGrid {
        self.j.grid
    }

    pub fn j_min(&self) -> f64 {
        self.j.min()
    }

    pub fn j_max(&self) -> f64 {
        self.j.max()
    }

    /// Max-norm of `Fstar - J * Finv` (dual-route consistency).
    pub fn cofactor_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..3 {
            for k in 0..3 {
                for (idx, (&s, &v)) in self
                    .fstar
                    .comp(i, k)
                    .data()
                    .iter()
                    .zip(self.finv.comp(i, k).data())
                    .enumerate()
                {
                    worst = worst.max((s - self.j.data()[idx] * v).abs());
                }
            }
        }
        worst
    }
}

/// Piola residual `sum_k d_k Fstar(i, k)`, one component per row `i`;
/// analytically zero for any flow map.
pub fn piola_residual(pack: &DeformationPack) -> VectorField {
    let mut out = VectorField::zeros(pack.grid());
    for i in 0..3 {
        let mut acc = deriv(pack.fstar.comp(i, 0), 0);
        acc.add_scaled(&deriv(pack.fstar.comp(i, 1), 1), 1.0);
        acc.add_scaled(&deriv(pack.fstar.comp(i, 2), 2), 1.0);
        *out.comp_mut(i) = acc;
    }
    out
}

/// Eulerian gradient of a scalar: component `i` is `sum_k Finv(i,k) d_k f`.
pub fn eulerian_gradient(f: &ScalarField, pack: &DeformationPack) -> VectorField {
    let d = [deriv(f, 0), deriv(f, 1), deriv(f, 2)];
    let mut out = VectorField::zeros(f.grid);
    for i in 0..3 {
        let mut acc = ScalarField::zeros(f.grid);
        for (k, dk) in d.iter().enumerate() {
            acc.add_scaled(&(pack.finv.comp(i, k) * dk), 1.0);
        }
        *out.comp_mut(i) = acc;
    }
    out
}

/// Eulerian Jacobian of a vector: `comp(i, r)` is the derivative of `u^i`
/// along the `r`-th Eulerian direction.
pub fn eulerian_grad_vector(u: &VectorField, pack: &DeformationPack) -> TensorField {
    let du = grad_vector(u);
    let mut out = TensorField::zeros(u.grid);
    for i in 0..3 {
        for r in 0..3 {
            let mut acc = ScalarField::zeros(u.grid);
            for s in 0..3 {
                acc.add_scaled(&(pack.finv.comp(r, s) * du.comp(i, s)), 1.0);
            }
            *out.comp_mut(i, r) = acc;
        }
    }
    out
}

/// Eulerian divergence `sum_{i,j} Finv(i,j) d_j u^i`.
pub fn div_eta(u: &VectorField, pack: &DeformationPack) -> ScalarField {
    let du = grad_vector(u);
    let mut acc = ScalarField::zeros(u.grid);
    for i in 0..3 {
        for jdir in 0..3 {
            acc.add_scaled(&(pack.finv.comp(i, jdir) * du.comp(i, jdir)), 1.0);
        }
    }
    acc
}

/// Eulerian curl: component `i` is `eps_{ijk} Finv(j,r) d_r u^k`.
pub fn curl_eta(u: &VectorField, pack: &DeformationPack) -> VectorField {
    let eg = eulerian_grad_vector(u, pack);
    // [curl u]_i = eps_{ijk} D_{eta^j} u^k = eg(k, j) antisymmetrized
    VectorField::from_components(
        eg.comp(2, 1) - eg.comp(1, 2),
        eg.comp(0, 2) - eg.comp(2, 0),
        eg.comp(1, 0) - eg.comp(0, 1),
    )
}

/// Eulerian curl matrix `comp(i, j) = D_{eta^j} u^i - D_{eta^i} u^j`.
pub fn curlmat_eta(u: &VectorField, pack: &DeformationPack) -> TensorField {
    let eg = eulerian_grad_vector(u, pack);
    let mut out = TensorField::zeros(u.grid);
    for i in 0..3 {
        for jdir in 0..3 {
            *out.comp_mut(i, jdir) = eg.comp(i, jdir) - eg.comp(jdir, i);
        }
    }
    out
}

/// `d/dt J = sum_{r,s} Fstar(r, s) d_s v^r` (algebraic, no time stencil).
pub fn jdot(pack: &DeformationPack, v: &VectorField) -> ScalarField {
    let dv = grad_vector(v);
    let mut acc = ScalarField::zeros(v.grid);
    for r in 0..3 {
        for s in 0..3 {
            acc.add_scaled(&(pack.fstar.comp(r, s) * dv.comp(r, s)), 1.0);
        }
    }
    acc
}

/// `d/dt Finv` in dual layout:
/// `d_t Finv(i,k) = - sum_{r,s} Finv(r,k) Finv(i,s) d_s v^r`.
pub fn ddt_finv(pack: &DeformationPack, v: &VectorField) -> TensorField {
    let dv = grad_vector(v);
    let mut out = TensorField::zeros(v.grid);
    for i in 0..3 {
        for k in 0..3 {
            let mut acc = ScalarField::zeros(v.grid);
            for r in 0..3 {
                for s in 0..3 {
                    let term = &(pack.finv.comp(r, k) * pack.finv.comp(i, s))
                        * dv.comp(r, s);
                    acc.add_scaled(&term, -1.0);
                }
            }
            *out.comp_mut(i, k) = acc;
        }
    }
    out
}

/// `d/dt Fstar = Jdot * Finv + J * d_t Finv` (dual layout).
pub fn ddt_fstar(pack: &DeformationPack, v: &VectorField) -> TensorField {
    let jd = jdot(pack, v);
    let dfinv = ddt_finv(pack, v);
    let mut out = TensorField::zeros(v.grid);
    for i in 0..3 {
        for k in 0..3 {
            let mut acc = &jd * pack.finv.comp(i, k);
            acc.add_scaled(&(&pack.j * dfinv.comp(i, k)), 1.0);
            *out.comp_mut(i, k) = acc;
        }
    }
    out
}

/// Direct evaluation of `d/dt (Finv(i,k) / J)`.
pub fn ddt_finv_over_j(pack: &DeformationPack, v: &VectorField) -> TensorField {
    let jd = jdot(pack, v);
    let dfinv = ddt_finv(pack, v);
    let inv_j = pack.j.map(|x| 1.0 / x);
    let inv_j2 = pack.j.map(|x| 1.0 / (x * x));
    let mut out = TensorField::zeros(v.grid);
    for i in 0..3 {
        for k in 0..3 {
            let mut acc = dfinv.comp(i, k) * &inv_j;
            acc.add_scaled(&(&(pack.finv.comp(i, k) * &jd) * &inv_j2), -1.0);
            *out.comp_mut(i, k) = acc;
        }
    }
    out
}

/// The same quantity split into its three transport pieces: a strain part,
/// a compression part and a rotation part, returned separately.
pub struct FinvOverJSplit {
    pub strain: TensorField,
    pub compression: TensorField,
    pub rotation: TensorField,
}

impl FinvOverJSplit {
    pub fn total(&self) -> TensorField {
        let g = self.strain.grid;
        let mut out = TensorField::zeros(g);
        for i in 0..3 {
            for k in 0..3 {
                let mut acc = self.strain.comp(i, k).clone();
                acc.add_scaled(self.compression.comp(i, k), 1.0);
                acc.add_scaled(self.rotation.comp(i, k), 1.0);
                *out.comp_mut(i, k) = acc;
            }
        }
        out
    }
}

/// Decomposition of `d/dt (Finv/J)` into Eulerian strain, compression and
/// rotation contractions; the sum reproduces [`ddt_finv_over_j`] to
/// round-off.
pub fn ddt_identity_decompose(pack: &DeformationPack, v: &VectorField) -> FinvOverJSplit {
    let g = v.grid;
    let eg = eulerian_grad_vector(v, pack); // eg(i, r) = D_{eta^r} v^i
    let dive = div_eta(v, pack);
    let cm = curlmat_eta(v, pack); // cm(r, i) = D_{eta^i} v^r - D_{eta^r} v^i
    let inv_j = pack.j.map(|x| 1.0 / x);
    let mut strain = TensorField::zeros(g);
    let mut compression = TensorField::zeros(g);
    let mut rotation = TensorField::zeros(g);
    for i in 0..3 {
        for k in 0..3 {
            let mut s = ScalarField::zeros(g);
            let mut r_acc = ScalarField::zeros(g);
            for r in 0..3 {
                s.add_scaled(&(pack.finv.comp(r, k) * eg.comp(i, r)), 1.0);
                r_acc.add_scaled(&(pack.finv.comp(r, k) * cm.comp(r, i)), 1.0);
            }
            *strain.comp_mut(i, k) = &(&s * &inv_j) * -1.0;
            *rotation.comp_mut(i, k) = &(&r_acc * &inv_j) * -1.0;
            *compression.comp_mut(i, k) =
                &(&(pack.finv.comp(i, k) * &dive) * &inv_j) * -1.0;
        }
    }
    FinvOverJSplit { strain, compression, rotation }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::SlabGrid;
    use std::f64::consts::PI;

    fn smooth_map(g: SlabGrid, amp: f64) -> VectorField {
        VectorField::from_fn(g, |x1, x2, x3| {
            let s = (2.0 * PI * x1).sin();
            let c = (2.0 * PI * x2).cos();
            let blend = x3 * x3 * (g.l3 - x3);
            [
                x1 + amp * s * blend,
                x2 + amp * c * blend,
                x3 + amp * (s * c + 1.0) * x3 * (g.l3 - x3),
            ]
        })
    }

    #[test]
    fn identity_map_gives_identity_pack() {
        let g = SlabGrid::new(4, 4, 9, 1.0).unwrap();
        let pack = build_deformation(&identity_map(g));
        assert!(pack.cofactor_defect() < 1e-14);
        assert!((pack.j_min() - 1.0).abs() < 1e-13);
        assert!((pack.j_max() - 1.0).abs() < 1e-13);
        assert!(piola_residual(&pack).max_abs() < 1e-12);
    }

    #[test]
    fn admissible_linear_map_is_exact() {
        // linear maps compatible with the tangential period: identity
        // columns in directions 1, 2 and an arbitrary third column
        let g = SlabGrid::new(4, 4, 17, 1.0).unwrap();
        let eta = VectorField::from_fn(g, |x1, x2, x3| {
            [x1 + 0.25 * x3, x2 - 0.125 * x3, 1.125 * x3]
        });
        let pack = build_deformation(&eta);
        assert!((pack.j_min() - 1.125).abs() < 1e-13);
        assert!((pack.j_max() - 1.125).abs() < 1e-13);
        assert!(pack.cofactor_defect() < 1e-13);
        assert!(piola_residual(&pack).max_abs() < 1e-13);
    }

    #[test]
    fn f_times_finv_is_identity() {
        let g = SlabGrid::new(8, 8, 17, 1.0).unwrap();
        let pack = build_deformation(&smooth_map(g, 0.02));
        // contraction over the derivative index, dual layout
        let mut worst = 0.0_f64;
        for i in 0..3 {
            for jrow in 0..3 {
                for idx in 0..g.len() {
                    let mut acc = 0.0;
                    for k in 0..3 {
                        acc += pack.f.comp(i, k).data()[idx]
                            * pack.finv.comp(jrow, k).data()[idx];
                    }
                    let expect = if i == jrow { 1.0 } else { 0.0 };
                    worst = worst.max((acc - expect).abs());
                }
            }
        }
        assert!(worst < 1e-12, "F Finv defect {worst}");
    }

    #[test]
    fn cofactor_column_is_cross_product() {
        let g = SlabGrid::new(8, 4, 9, 1.0).unwrap();
        let pack = build_deformation(&smooth_map(g, 0.03));
        for idx in [0usize, 37, g.len() - 1] {
            let (i1, i2, i3) = g.coords(idx);
            let m = pack.f.matrix_at(i1, i2, i3);
            let c1 = [m[0][0], m[1][0], m[2][0]];
            let c2 = [m[0][1], m[1][1], m[2][1]];
            let x = cross(c1, c2);
            for i in 0..3 {
                assert!((pack.fstar.at(i, 2, i1, i2, i3) - x[i]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn dual_route_cofactor_agreement() {
        let g = SlabGrid::new(8, 8, 17, 1.2).unwrap();
        let pack = build_deformation(&smooth_map(g, 0.04));
        assert!(pack.cofactor_defect() < 1e-12);
    }

    #[test]
    fn eulerian_ops_reduce_to_flat_at_identity() {
        let g = SlabGrid::new(8, 8, 17, 1.0).unwrap();
        let pack = DeformationPack::identity(g);
        let u = VectorField::from_fn(g, |x1, x2, x3| {
            [
                (2.0 * PI * x2).sin() * x3,
                (2.0 * PI * x1).cos() + x3 * x3,
                x3 * (1.0 - x3) * (2.0 * PI * x1).sin(),
            ]
        });
        let flat_div = crate::ops::divergence(&u);
        let eta_div = div_eta(&u, &pack);
        let mut err = 0.0_f64;
        for (a, b) in flat_div.data().iter().zip(eta_div.data()) {
            err = err.max((a - b).abs());
        }
        assert!(err < 1e-12);
        let flat_curl = crate::ops::curl(&u);
        let eta_curl = curl_eta(&u, &pack);
        for i in 0..3 {
            for (a, b) in flat_curl.comp(i).data().iter().zip(eta_curl.comp(i).data()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn transport_identity_decomposition_matches_direct_route() {
        let g = SlabGrid::new(8, 8, 17, 1.0).unwrap();
        let eta = smooth_map(g, 0.03);
        let pack = build_deformation(&eta);
        let v = VectorField::from_fn(g, |x1, x2, x3| {
            [
                0.3 * (2.0 * PI * x1).cos() * x3,
                -0.2 * (2.0 * PI * x2).sin(),
                0.1 * x3 * (g.l3 - x3),
            ]
        });
        let direct = ddt_finv_over_j(&pack, &v);
        let split = ddt_identity_decompose(&pack, &v).total();
        let mut err = 0.0_f64;
        let mut scale = 0.0_f64;
        for i in 0..3 {
            for k in 0..3 {
                for (a, b) in direct.comp(i, k).data().iter().zip(split.comp(i, k).data()) {
                    err = err.max((a - b).abs());
                    scale = scale.max(a.abs());
                }
            }
        }
        assert!(err < 1e-12 * scale.max(1.0), "decomposition defect {err}");
    }
}
