//! Continuous Lagrange `Q_k` spaces: reference tables, DoF maps, assembly,
//! interpolation and error norms.

pub mod assemble;
pub mod reference;
pub mod space;
pub mod sparse;

pub use assemble::{assemble_gradient, assemble_mass, assemble_stiffness};
pub use reference::{shape_eval, ReferenceElement};
pub use space::{
    error_norm, error_norms, integrate, vector_error_norms, ErrorNorms, FeSpace, FieldRole,
    FieldVector, NormKind,
};
pub use sparse::{CsrMatrix, SparsityPattern};
