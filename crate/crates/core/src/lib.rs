//! Mollified Faedo-Galerkin solver for the heat equation with nonmonotone,
//! multivalued dynamic boundary conditions, and the checks that go with it.
//!
//! Modules build on each other bottom-up: [`graph`] handles the scalar
//! nonlinearities, [`fem`] the P1 discretization, [`solver`] the time
//! stepping and refinement studies, [`verify`] the estimates, and [`config`]
//! the declarative problem files.

// Index loops mirror the formulas; negated comparisons route NaN to the error
// branch on purpose.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod expr;
pub mod fem;
pub mod graph;
pub mod linalg;
pub mod mesh;
pub mod poly;
pub mod quadrature;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use expr::Expr;
pub use fem::{assemble, AssembledOperators, ProductVector};
pub use graph::{
    check_growth, check_sign_condition, product_clarke_dd, BreakpointConvention, Envelope,
    GrowthParams, MollifierKernel, PiecewiseGraph,
};
pub use mesh::{build_mesh, refine, DomainSpec, Mesh, Prolongation};
pub use solver::{
    refine_study, solve, EnergyLedger, EpsSchedule, SolveConfig, SolveOutput, StudyReport,
    Trajectory,
};
pub use verify::{
    apriori_check, energy_check, hvi_residual, inclusion_check, smallness_check,
};
