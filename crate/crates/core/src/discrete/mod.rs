//! Exact finite-dimensional computations on graphs.

pub mod eigen;
pub mod exit;
pub mod graph;
pub mod heat;
pub mod hotspots;
pub mod sparse;

pub use eigen::{dirichlet_lambda, neumann_eigenpair, EigenOptions, EigenResult};
pub use exit::{gasket_level_ratios, mean_exit_solve, ExitSolution};
pub use graph::{
    build_gasket_domain, build_gasket_graph, build_gasket_graph_with, build_grid_graph, BoundaryCondition,
    GasketBoundary, Graph, GraphKind, MAX_GASKET_LEVEL,
};
pub use heat::{gasket_ondiag_decay, DecayFit, HeatKernel};
pub use hotspots::{hot_spots, HotSpots};
