//! Conjugate gradients with geometric-multigrid preconditioning, and the
//! mean-zero solves of pure-Neumann Poisson problems.

pub mod cg;
pub mod dense;
pub mod gmg;

pub use cg::{
    cg_solve, neumann_solve, remove_weighted_mean, CgSettings, IdentityPreconditioner,
    JacobiPreconditioner, Preconditioner, SolverReport,
};
pub use gmg::{gmg_apply, prolongation, GmgPreconditioner, GmgSettings, MultilevelSpaces};
