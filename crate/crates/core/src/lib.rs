//! Adaptive finite elements for `-div(A grad u) = f` on conforming triangulations.
//!
//! The crate is organised bottom-up:
//!
//! * [`mesh`]: conforming 2D triangulations refined by newest-vertex bisection,
//!   with marked elements split by three (`Bisec3`) or five (`Bisec5`) bisections.
//! * [`space`]: P1/P2 Lagrange spaces, quadrature, nodal interpolation and
//!   elementwise L2 projections.
//! * [`solve`]: assembly, Dirichlet elimination, a Jacobi-preconditioned CG solver
//!   and the energy norm.
//! * [`estimators`]: two-level (h-h/2) indicators, data terms, and the classical
//!   residual estimator used as a cross-check.
//! * [`adaptive`]: Dörfler marking and the solve/estimate/mark/refine loop.
//! * [`harness`]: the L-shaped benchmark problems, exact errors, rate fitting and
//!   CSV output.

pub mod adaptive;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod mesh;
pub mod solve;
pub mod space;

pub use adaptive::{doerfler_mark, LoopConfig, StopRule};
pub use error::{Error, Result};
pub use estimators::{EstimatorVariant, IndicatorVector};
pub use harness::{LevelRecord, ProblemId, ProblemSpec, RateEstimate};
pub use mesh::{Mesh, Point, RefineMode};
pub use solve::{CoefficientField, DiscreteSolution, SparseSystem};
pub use space::FeSpace;
