//! Steepest-descent circuit augmentation for linear programs over general-form polyhedra
//! `P = {x : Ax = b, Bx <= d}`.
//!
//! The pieces, bottom-up:
//! - [`lp`]: problem data, points, active sets, steepness.
//! - [`mps`]: MPS reader and lowering to general form.
//! - [`simplex`]: bounded revised simplex (primal and dual) with warm starts.
//! - [`steepest`]: the steepest-direction subproblem and its bound updates.
//! - [`augment`]: the augmentation loop and trace verification.
//! - [`oracle`]: exact circuit enumeration for small instances.
//! - [`harness`]: solve / compare / verify drivers writing CSV.

// dense kernels index several parallel arrays per loop
#![allow(clippy::needless_range_loop)]

pub mod augment;
pub mod error;
pub mod harness;
pub mod instances;
pub mod lp;
pub mod mps;
pub mod oracle;
pub mod par;
pub mod simplex;
pub mod sparse;
pub mod steepest;

pub use error::{Error, Result};
pub use lp::{active_rows, check_feasible, steepness, ActiveSet, Direction, GeneralFormLP, Point, Tolerances};
pub use par::Execution;
pub use sparse::SparseMatrix;
