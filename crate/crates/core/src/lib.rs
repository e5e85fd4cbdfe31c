//! Verification laboratory for Westervelt's nonlinear acoustic wave equation.
//!
//! The symbolic half (`jetspace`, `calculus`, `catalog`, `verify`) checks
//! symmetries, conservation laws and structural identities exactly. The
//! numerical half (`pde`, `observables`, `exact`) integrates the equation,
//! monitors conserved integrals and samples closed-form solutions.

pub mod error;
pub mod calculus;
pub mod catalog;
pub mod verify;
pub mod jetspace;
pub mod exact;
pub mod pde;
pub mod observables;
pub mod manifest;

pub use error::{Error, Result};
pub use jetspace::{Dep, Indet, JetExpr, JetVar};
pub use manifest::RunManifest;
pub use pde::{Solver, SolverConfig, SolverState};
pub use exact::ExactSolution;
pub use verify::{run_suite, Outcome, Suite};
