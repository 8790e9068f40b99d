//! Descent solver for nonsmooth multiobjective optimization on the unit sphere.
//!
//! The solver minimizes a vector of locally Lipschitz objective functions over
//! `S^{p-1}` by repeatedly computing an acceptable common descent direction from
//! the minimum-norm point of a bundle of transported subgradients, then taking
//! an Armijo-type step along the corresponding geodesic. Runs terminate at
//! (ε,δ)-critical points: iterates where the minimum norm over the negated
//! bundle hull drops below δ.
//!
//! The crate is `no_std` (with `alloc`); all IO, experiment drivers and file
//! formats live in the companion CLI crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod descent;
pub mod error;
pub mod linalg;
pub mod manifold;
pub mod minnorm;
pub mod oracle;
pub mod problems;

pub use descent::{run, RunRecord, RunStatus, SolverParams};
pub use error::{Error, Result};
pub use manifold::{Manifold, Point, Sphere, TangentVector};
pub use minnorm::{min_norm_neg_hull, MinNormResult, SubgradientBundle};
pub use oracle::{Objective, ObjectiveVector};
pub use problems::{Family, ProblemInstance};
