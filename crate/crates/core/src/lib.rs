//! Lagrangian-coordinate solver and diagnostic suite for compressible
//! Euler-Poisson flow with a physical-vacuum free boundary.
//!
//! The fluid occupies the image of the reference slab `T^2 x (0, L3)` under
//! the flow map `eta`; the two slab faces are vacuum boundaries where the
//! squared sound speed vanishes linearly. Everything is discretized on
//! collocated nodes: spectral in the periodic directions, fourth-order
//! finite differences across the slab.
//!
//! Module map:
//! * [`grid`] - grids, scalar/vector/tensor fields, snapshot I/O glue
//! * [`ops`] / [`norms`] - derivatives and (weighted) Sobolev norms
//! * [`kinematics`] - deformation gradient, cofactor, Eulerian operators
//! * [`gravity`] - self-gravity force via truncated-image kernel quadrature
//! * [`initial_data`] - density profiles, vacuum checks, smoothing, `u1`
//! * [`dynamics`] - the damped momentum stepper and step diagnostics
//! * [`elliptic`] - Galerkin heat solver, slab Poisson, Hodge reconstruction
//! * [`diagnostics`] - energy functional, transport residuals, verifiers
//! * [`scenario`] / [`runner`] / [`verify`] - configuration and orchestration

pub mod diagnostics;
pub mod dynamics;
pub mod elliptic;
pub mod error;
pub mod gravity;
pub mod grid;
pub mod initial_data;
pub mod kinematics;
pub mod norms;
pub mod ops;
pub mod runner;
pub mod scenario;
pub mod snapshot;
pub(crate) mod spectral;
pub mod verify;

pub use error::{Result, SolverError};
pub use grid::{ScalarField, SlabGrid, TensorField, VectorField};
