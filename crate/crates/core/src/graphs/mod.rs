//! Molecular graphs, their separable-pair circuits, and resource counts.

mod circuits;
mod graph;
mod resources;

pub use circuits::{
    build_basis, build_edge_circuit, build_graph_circuit, orbital_rotation, pair_preparation,
    BasisSpec,
};
pub use graph::{enumerate_graphs, MolecularGraph};
pub use resources::{count_resources, Resources};
