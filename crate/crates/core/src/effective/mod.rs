//! Generalized eigenvalue problem over a non-orthogonal effective basis.

mod eigen;
mod generalized;

pub use eigen::{asymmetry, symmetric_eigen, SymmetricEigen, MAX_DIM, MAX_SWEEPS};
pub(crate) use generalized::solve_matrices;
pub use generalized::{
    solve_generalized, solve_generalized_hermitian, EffectiveProblem, GeneralizedEigResult,
    StateLabel, DEFAULT_THRESHOLD,
};
