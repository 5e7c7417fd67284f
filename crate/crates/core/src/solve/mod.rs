//! Galerkin discretisation of `-div(A grad u) = f` with Dirichlet data.

mod assembly;
mod coefficient;
pub mod sparse;

pub use assembly::{
    apply_dirichlet, assemble, element_stiffness, energy_inner, energy_norm, solve_problem, solve_system,
    solve_system_from, source_order, DiscreteSolution, SparseSystem, DENSE_FALLBACK_LIMIT, SOLVER_TOLERANCE,
};
pub use coefficient::{CoefficientField, Sym2};
pub use sparse::CsrMatrix;
