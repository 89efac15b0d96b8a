//! The nonlocal generator `ℒu(x) = ∫ (u(x+z) − u(x)) a(x,z) J(z) dz`, its symbol, and
//! solvers for the resolvent equation `λu − ℒu = f` on a periodic grid.
//!
//! The small-jump region `|z| < ε` is dropped rather than compensated: the kernels here
//! have a finite first moment near the origin, and each result carries the bound
//! `sup|∇u|·sup a·∫_{|z|<ε}|z|J`.

mod coefficient;
mod generator;
mod solver;

pub use coefficient::{CoefficientField, PairFn, PointFn, SeparableTerm, ZCoefficient};
pub use generator::{
    apply_generator, far_radius, generator_symbol, grid_symbol, quadrature_nodes, DiscreteGenerator,
    GeneratorApplication, QuadratureNodes, SymbolValue,
};
pub use solver::{
    schauder_report, solve_homogeneous, solve_inhomogeneous, InhomogeneousSolution, ResolventSolver,
    SchauderReport, SolverConfig,
};
