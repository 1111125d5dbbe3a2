//! Collocated fields on the reference slab `T^2 x (0, L3)`.
//!
//! Directions 1 and 2 are periodic with unit period; direction 3 runs
//! across the slab and its end nodes sit exactly on the two vacuum faces.
//! All quantities (scalars, vectors, two-point tensors) share one node set:
//!
//! ```text
//! x1 = i1 / n1,  x2 = i2 / n2,  x3 = i3 * L3 / (n3 - 1)
//! ```
//!
//! Storage is component-major (`Vec<f64>` per component) with `i1` fastest,
//! then `i2`, then `i3`, so the slab direction is the slowest index.

use crate::error::{Result, SolverError};

/// Grid descriptor. Cheap to copy; fields carry their own copy so that
/// mismatched operands can be rejected early.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlabGrid {
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
    /// Slab thickness (period in directions 1 and 2 is fixed to 1).
    pub l3: f64,
}

/// Minimum node count across the slab; set by the width of the one-sided
/// fourth-order stencils.
pub const MIN_N3: usize = 5;

impl SlabGrid {
    pub fn new(n1: usize, n2: usize, n3: usize, l3: f64) -> Result<Self> {
        if n3 < MIN_N3 {
            return Err(SolverError::GridTooSmall { got: n3, min: MIN_N3 });
        }
        if n1 == 0 || n2 == 0 || !(l3 > 0.0) || !l3.is_finite() {
            return Err(SolverError::Config(format!(
                "invalid grid extents n1={n1} n2={n2} l3={l3}"
            )));
        }
        Ok(Self { n1, n2, n3, l3 })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n1 * self.n2 * self.n3
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn h1(&self) -> f64 {
        1.0 / self.n1 as f64
    }

    #[inline]
    pub fn h2(&self) -> f64 {
        1.0 / self.n2 as f64
    }

    #[inline]
    pub fn h3(&self) -> f64 {
        self.l3 / (self.n3 - 1) as f64
    }

    /// Smallest node spacing, used by the CFL rule.
    pub fn min_h(&self) -> f64 {
        let mut h = self.h3();
        if self.n1 > 1 {
            h = h.min(self.h1());
        }
        if self.n2 > 1 {
            h = h.min(self.h2());
        }
        h
    }

    #[inline]
    pub fn x1(&self, i1: usize) -> f64 {
        i1 as f64 * self.h1()
    }

    #[inline]
    pub fn x2(&self, i2: usize) -> f64 {
        i2 as f64 * self.h2()
    }

    #[inline]
    pub fn x3(&self, i3: usize) -> f64 {
        i3 as f64 * self.h3()
    }

    #[inline]
    pub fn idx(&self, i1: usize, i2: usize, i3: usize) -> usize {
        (i3 * self.n2 + i2) * self.n1 + i1
    }

    /// Inverse of [`idx`]: flat index to `(i1, i2, i3)`.
    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize, usize) {
        let i1 = idx % self.n1;
        let r = idx / self.n1;
        (i1, r % self.n2, r / self.n2)
    }

    /// True when there is a single node (the whole period) in both
    /// tangential directions; such states depend on `x3` only.
    #[inline]
    pub fn is_plane_symmetric(&self) -> bool {
        self.n1 == 1 && self.n2 == 1
    }

    /// Trapezoid quadrature weight of node `i3` in the slab direction
    /// (without the `h3` factor).
    #[inline]
    pub fn w3(&self, i3: usize) -> f64 {
        if i3 == 0 || i3 == self.n3 - 1 {
            0.5
        } else {
            1.0
        }
    }

    /// Full quadrature weight of a node (volume element included).
    #[inline]
    pub fn quad_weight(&self, i3: usize) -> f64 {
        self.w3(i3) * self.h1() * self.h2() * self.h3()
    }

    /// Distance from `x3` to the nearest vacuum face.
    #[inline]
    pub fn face_distance(&self, x3: f64) -> f64 {
        x3.min(self.l3 - x3)
    }
}

/// Scalar field on a [`SlabGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    pub grid: SlabGrid,
    data: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: SlabGrid) -> Self {
        Self { grid, data: vec![0.0; grid.len()] }
    }

    pub fn constant(grid: SlabGrid, c: f64) -> Self {
        Self { grid, data: vec![c; grid.len()] }
    }

    /// Sample `f(x1, x2, x3)` at every node.
    pub fn from_fn(grid: SlabGrid, f: impl Fn(f64, f64, f64) -> f64) -> Self {
        let mut data = Vec::with_capacity(grid.len());
        for i3 in 0..grid.n3 {
            let x3 = grid.x3(i3);
            for i2 in 0..grid.n2 {
                let x2 = grid.x2(i2);
                for i1 in 0..grid.n1 {
                    data.push(f(grid.x1(i1), x2, x3));
                }
            }
        }
        Self { grid, data }
    }

    pub fn from_vec(grid: SlabGrid, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(SolverError::Snapshot(format!(
                "field length {} does not match grid {:?}",
                data.len(),
                grid
            )));
        }
        Ok(Self { grid, data })
    }

    #[inline]
    pub fn at(&self, i1: usize, i2: usize, i3: usize) -> f64 {
        self.data[self.grid.idx(i1, i2, i3)]
    }

    #[inline]
    pub fn at_mut(&mut self, i1: usize, i2: usize, i3: usize) -> &mut f64 {
        let i = self.grid.idx(i1, i2, i3);
        &mut self.data[i]
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { grid: self.grid, data: self.data.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert_eq!(self.grid, other.grid);
        Self {
            grid: self.grid,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn scale_inplace(&mut self, c: f64) {
        for v in &mut self.data {
            *v *= c;
        }
    }

    /// `self += c * other`
    pub fn add_scaled(&mut self, other: &Self, c: f64) {
        debug_assert_eq!(self.grid, other.grid);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, &v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.data.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }

    pub fn max(&self) -> f64 {
        self.data.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }
}

macro_rules! field_binop {
    ($trait:ident, $fn:ident, $op:tt) => {
        impl std::ops::$trait<&ScalarField> for &ScalarField {
            type Output = ScalarField;
            fn $fn(self, rhs: &ScalarField) -> ScalarField {
                self.zip_with(rhs, |a, b| a $op b)
            }
        }
    };
}
field_binop!(Add, add, +);
field_binop!(Sub, sub, -);
field_binop!(Mul, mul, *);

impl std::ops::Mul<f64> for &ScalarField {
    type Output = ScalarField;
    fn mul(self, c: f64) -> ScalarField {
        self.map(|v| v * c)
    }
}

/// Vector field: three scalar components.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub grid: SlabGrid,
    comps: [ScalarField; 3],
}

impl VectorField {
    pub fn zeros(grid: SlabGrid) -> Self {
        Self {
            grid,
            comps: [ScalarField::zeros(grid), ScalarField::zeros(grid), ScalarField::zeros(grid)],
        }
    }

    pub fn from_components(c0: ScalarField, c1: ScalarField, c2: ScalarField) -> Self {
        debug_assert_eq!(c0.grid, c1.grid);
        debug_assert_eq!(c0.grid, c2.grid);
        Self { grid: c0.grid, comps: [c0, c1, c2] }
    }

    /// Sample `f(x1,x2,x3) -> [f64;3]` at every node.
    pub fn from_fn(grid: SlabGrid, f: impl Fn(f64, f64, f64) -> [f64; 3]) -> Self {
        let mut out = Self::zeros(grid);
        for i3 in 0..grid.n3 {
            for i2 in 0..grid.n2 {
                for i1 in 0..grid.n1 {
                    let v = f(grid.x1(i1), grid.x2(i2), grid.x3(i3));
                    for c in 0..3 {
                        *out.comps[c].at_mut(i1, i2, i3) = v[c];
                    }
                }
            }
        }
        out
    }

    #[inline]
    pub fn comp(&self, i: usize) -> &ScalarField {
        &self.comps[i]
    }

    #[inline]
    pub fn comp_mut(&mut self, i: usize) -> &mut ScalarField {
        &mut self.comps[i]
    }

    #[inline]
    pub fn at(&self, i: usize, i1: usize, i2: usize, i3: usize) -> f64 {
        self.comps[i].at(i1, i2, i3)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            comps: [self.comps[0].map(&f), self.comps[1].map(&f), self.comps[2].map(&f)],
        }
    }

    /// `self += c * other`
    pub fn add_scaled(&mut self, other: &Self, c: f64) {
        for i in 0..3 {
            self.comps[i].add_scaled(&other.comps[i], c);
        }
    }

    pub fn scale_inplace(&mut self, c: f64) {
        for comp in &mut self.comps {
            comp.scale_inplace(c);
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().map(|c| c.max_abs()).fold(0.0, f64::max)
    }
}

impl std::ops::Sub<&VectorField> for &VectorField {
    type Output = VectorField;
    fn sub(self, rhs: &VectorField) -> VectorField {
        VectorField::from_components(
            self.comp(0) - rhs.comp(0),
            self.comp(1) - rhs.comp(1),
            self.comp(2) - rhs.comp(2),
        )
    }
}

impl std::ops::Add<&VectorField> for &VectorField {
    type Output = VectorField;
    fn add(self, rhs: &VectorField) -> VectorField {
        VectorField::from_components(
            self.comp(0) + rhs.comp(0),
            self.comp(1) + rhs.comp(1),
            self.comp(2) + rhs.comp(2),
        )
    }
}

/// Two-point tensor field (3x3 per node).
///
/// Index convention: `comp(i, k)` pairs the Eulerian component `i` with the
/// Lagrangian derivative direction `k`. Concretely,
///
/// * deformation gradient: `F.comp(i, k) = d eta^i / d x_k`;
/// * inverse and cofactor are stored in the dual layout, so that
///   `Finv.comp(i, k)` is the entry contracting `d/dx_k` when forming the
///   Eulerian derivative of component `i` (the matrix-inverse entry `(k, i)`),
///   and `Fstar.comp(i, k) = dJ/dF.comp(i, k)` is the `(i, k)` cofactor.
///
/// With this layout `Fstar = J * Finv` holds entry-by-entry and the Piola
/// identity reads `sum_k d_k Fstar(i, k) = 0` row by row.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorField {
    pub grid: SlabGrid,
    comps: Vec<ScalarField>,
}

impl TensorField {
    pub fn zeros(grid: SlabGrid) -> Self {
        Self { grid, comps: (0..9).map(|_| ScalarField::zeros(grid)).collect() }
    }

    pub fn identity(grid: SlabGrid) -> Self {
        let mut t = Self::zeros(grid);
        for i in 0..3 {
            *t.comp_mut(i, i) = ScalarField::constant(grid, 1.0);
        }
        t
    }

    #[inline]
    pub fn comp(&self, i: usize, k: usize) -> &ScalarField {
        &self.comps[3 * i + k]
    }

    #[inline]
    pub fn comp_mut(&mut self, i: usize, k: usize) -> &mut ScalarField {
        &mut self.comps[3 * i + k]
    }

    #[inline]
    pub fn at(&self, i: usize, k: usize, i1: usize, i2: usize, i3: usize) -> f64 {
        self.comps[3 * i + k].at(i1, i2, i3)
    }

    /// 3x3 matrix at one node, `m[i][k] = comp(i, k)`.
    #[inline]
    pub fn matrix_at(&self, i1: usize, i2: usize, i3: usize) -> [[f64; 3]; 3] {
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for k in 0..3 {
                m[i][k] = self.at(i, k, i1, i2, i3);
            }
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().map(|c| c.max_abs()).fold(0.0, f64::max)
    }
}
