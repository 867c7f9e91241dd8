use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pairing of spatial orbitals (one orbital per vertex) by disjoint edges.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MolecularGraph {
    n_spatial: usize,
    /// Each edge stored as `(low, high)`, edges sorted.
    edges: Vec<(usize, usize)>,
}

impl MolecularGraph {
    pub fn new(n_spatial: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        let mut used = vec![false; n_spatial];
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidGraph(format!("self loop on orbital {a}")));
            }
            for v in [a, b] {
                if v >= n_spatial {
                    return Err(Error::IndexOutOfRange {
                        index: v,
                        limit: n_spatial,
                        context: "graph edge".into(),
                    });
                }
                if used[v] {
                    return Err(Error::InvalidGraph(format!(
                        "orbital {v} is shared by two edges"
                    )));
                }
                used[v] = true;
            }
            out.push((a.min(b), a.max(b)));
        }
        out.sort_unstable();
        Ok(Self {
            n_spatial,
            edges: out,
        })
    }

    pub fn n_spatial(&self) -> usize {
        self.n_spatial
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Electrons prepared by the graph circuit (two per edge).
    pub fn n_electrons(&self) -> usize {
        2 * self.edges.len()
    }

    pub fn contains_edge(&self, p: usize, q: usize) -> bool {
        self.edges.contains(&(p.min(q), p.max(q)))
    }

    /// Orbital pairs not joined by an edge, ascending.
    pub fn unconnected_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.n_spatial;
        (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .filter(|&(p, q)| !self.contains_edge(p, q))
            .collect()
    }
}

impl fmt::Display for MolecularGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, (a, b)) in self.edges.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[{a},{b}]")?;
        }
        write!(f, "]")
    }
}

/// All sets of `n_electrons / 2` pairwise-disjoint edges, lexicographic on
/// the sorted edge lists.
pub fn enumerate_graphs(n_spatial: usize, n_electrons: usize) -> Result<Vec<MolecularGraph>> {
    if !n_electrons.is_multiple_of(2) {
        return Err(Error::InvalidGraph(format!(
            "odd electron count {n_electrons} cannot be paired"
        )));
    }
    let n_edges = n_electrons / 2;
    if n_edges > n_spatial / 2 {
        return Err(Error::InvalidGraph(format!(
            "{n_edges} disjoint edges do not fit on {n_spatial} orbitals"
        )));
    }
    let all: Vec<(usize, usize)> = (0..n_spatial)
        .flat_map(|p| (p + 1..n_spatial).map(move |q| (p, q)))
        .collect();
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n_edges);
    let mut used = vec![false; n_spatial];
    extend(&all, 0, n_edges, &mut current, &mut used, &mut out);
    out.into_iter()
        .map(|edges| MolecularGraph::new(n_spatial, edges))
        .collect()
}

fn extend(
    all: &[(usize, usize)],
    start: usize,
    remaining: usize,
    current: &mut Vec<(usize, usize)>,
    used: &mut [bool],
    out: &mut Vec<Vec<(usize, usize)>>,
) {
    if remaining == 0 {
        out.push(current.clone());
        return;
    }
    for i in start..all.len() {
        let (a, b) = all[i];
        if used[a] || used[b] {
            continue;
        }
        used[a] = true;
        used[b] = true;
        current.push((a, b));
        extend(all, i + 1, remaining - 1, current, used, out);
        current.pop();
        used[a] = false;
        used[b] = false;
    }
}
