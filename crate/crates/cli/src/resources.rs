//! Deepest-circuit resource table for the GNM runs of a configuration.
//!
//! Counts depend only on circuit structure, so nothing is optimized.

use effbasis_core::graphs::{build_basis, enumerate_graphs, BasisSpec};
use effbasis_core::hamiltonian::load_hamiltonian;
use serde::Serialize;

use crate::config::{ExperimentConfig, RunSpec};
use crate::runner::{basis_cell, deepest, gnm_label, sized_basis};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResourceRow {
    pub system: String,
    pub fixture: String,
    pub label: String,
    pub augmented: bool,
    /// Graphs of the basis as `0-1 2-3`, `;`-separated.
    pub graphs: String,
    pub cnot_deepest: usize,
    pub params_deepest: usize,
    pub depth_deepest: usize,
}

pub fn report_resources(cfg: &ExperimentConfig) -> anyhow::Result<Vec<ResourceRow>> {
    let mut rows = Vec::new();
    for path in cfg.fixtures() {
        let fh = load_hamiltonian(&path)?;
        let graphs = match cfg.graphs.pinned(fh.n_spatial())? {
            Some(g) => g,
            None => enumerate_graphs(fh.n_spatial(), fh.n_electrons())?,
        };
        let fixture = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        for run in &cfg.runs {
            let RunSpec::Gnm {
                n,
                m,
                augmented,
                per_graph,
            } = run
            else {
                continue;
            };
            let full = build_basis(&graphs, *augmented)?;
            let bases: Vec<BasisSpec> = if *per_graph {
                (0..full.len())
                    .map(|k| BasisSpec {
                        graphs: vec![full.graphs[k].clone()],
                        circuits: vec![full.circuits[k].clone()],
                        augmented: *augmented,
                    })
                    .collect()
            } else {
                vec![sized_basis(&full, *n)]
            };
            for basis in bases {
                let r = deepest(&basis);
                rows.push(ResourceRow {
                    system: cfg.name.clone(),
                    fixture: fixture.clone(),
                    label: gnm_label(basis.len(), *m, *augmented),
                    augmented: *augmented,
                    graphs: basis_cell(&basis),
                    cnot_deepest: r.cnot_count,
                    params_deepest: r.parameter_count,
                    depth_deepest: r.depth,
                });
            }
        }
    }
    Ok(rows)
}
