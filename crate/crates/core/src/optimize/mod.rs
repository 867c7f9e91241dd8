//! Single-circuit pre-optimization and the concerted `G(N, M)` optimization.

mod analysis;
mod bfgs;
mod gnm;
mod objective;
mod saddle;

pub use analysis::{
    analyze_component, component_state, projection, total_wavefunction, ComponentAnalysis,
};
pub use bfgs::{minimize, BfgsOptions, BfgsReport};
pub use gnm::{
    gnm_solve, gnm_solve_in, pre_optimize, pre_optimize_basis_in, pre_optimize_in, prepare_basis,
    prepare_basis_in, GNMConfig, GNMResult, PreOptimized, PreparedBasis, DECOUPLED_TOLERANCE,
};
pub use objective::{
    basis_sector, rayleigh_objective, RayleighObjective, SectorOperator, DEFAULT_FD_STEP, MIN_NORM,
};
pub use saddle::{escape_step, lowest_curvature, Curvature, CURVATURE_TOLERANCE};
