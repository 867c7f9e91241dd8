//! Executes an [`ExperimentConfig`] and writes its CSV and JSON reports.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{anyhow, bail, Context};
use effbasis_core::effective::GeneralizedEigResult;
use effbasis_core::graphs::{
    build_basis, count_resources, enumerate_graphs, BasisSpec, MolecularGraph, Resources,
};
use effbasis_core::hamiltonian::{
    exact_ground_state_in, jordan_wigner, load_hamiltonian, FermionHamiltonian, QubitHamiltonian,
    Sector, DEFAULT_MAX_QUBITS,
};
use effbasis_core::krylov::{krylov_energy, KrylovConfig, KrylovMode};
use effbasis_core::optimize::{
    basis_sector, gnm_solve_in, pre_optimize_basis_in, prepare_basis_in, GNMResult, PreparedBasis,
    SectorOperator,
};
use effbasis_core::simulator::bitstring_index;
use effbasis_core::Complex64;
use serde::Serialize;

use crate::config::{ExperimentConfig, RunSpec};

/// Slack of the variational check on reported energies (Hartree).
pub const VARIATIONAL_SLACK: f64 = 1e-9;

/// One CSV row. Energies in Hartree; empty cells mean "not applicable".
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub system: String,
    pub fixture: String,
    pub method: String,
    pub label: String,
    /// Graphs of the basis as `0-1 2-3`, `;`-separated.
    pub graphs: String,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub augmented: Option<bool>,
    pub energy: f64,
    pub fci_energy: f64,
    pub error: f64,
    pub iterations: Option<usize>,
    pub max_solve_iterations: Option<usize>,
    pub restarts: Option<usize>,
    pub saddle_escapes: Option<usize>,
    pub converged: Option<bool>,
    pub retained_rank: Option<usize>,
    pub s_condition: Option<f64>,
    pub discarded: Option<usize>,
    pub cnot_deepest: Option<usize>,
    pub params_deepest: Option<usize>,
    pub depth_deepest: Option<usize>,
}

/// Everything needed to reproduce a row.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "method", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Detail {
    Fci {
        n_electrons: usize,
        ms2: i32,
    },
    Gnm {
        graphs: Vec<String>,
        result: Box<GNMResult>,
    },
    Krylov {
        config: KrylovConfig,
        result: GeneralizedEigResult<Complex64>,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct Entry {
    pub row: Row,
    pub detail: Detail,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub config: ExperimentConfig,
    pub entries: Vec<Entry>,
    /// Fixtures whose runs failed, with the error message.
    pub failures: Vec<(String, String)>,
}

impl Report {
    pub fn rows(&self) -> impl Iterator<Item = &Row> {
        self.entries.iter().map(|e| &e.row)
    }
}

/// A loaded fixture with its exact energy and lazily prepared bases.
pub struct Fixture {
    pub name: String,
    pub fermion: FermionHamiltonian,
    pub qubit: QubitHamiltonian,
    pub fci_energy: f64,
    prepared: BTreeMap<bool, PreparedBasis>,
}

impl Fixture {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let fermion = load_hamiltonian(path)
            .with_context(|| format!("loading fixture {}", path.display()))?;
        let qubit = jordan_wigner(&fermion)?;
        let sector = Sector::new(fermion.n_electrons(), fermion.ms2());
        let (fci_energy, _) = exact_ground_state_in(&qubit, sector, DEFAULT_MAX_QUBITS)?;
        Ok(Self {
            name: fixture_name(path),
            fermion,
            qubit,
            fci_energy,
            prepared: BTreeMap::new(),
        })
    }

    /// Pre-optimized basis for the configured graph selection.
    pub fn prepared(
        &mut self,
        cfg: &ExperimentConfig,
        augmented: bool,
    ) -> anyhow::Result<&PreparedBasis> {
        if !self.prepared.contains_key(&augmented) {
            let n_spatial = self.fermion.n_spatial();
            let pinned = cfg.graphs.pinned(n_spatial)?;
            let graphs = match &pinned {
                Some(g) => g.clone(),
                None => enumerate_graphs(n_spatial, self.fermion.n_electrons())?,
            };
            let raw = build_basis(&graphs, augmented)?;
            let op = SectorOperator::new(&self.qubit, basis_sector(&raw)?)?;
            let opts = cfg.optimizer.gnm_config(1, 0, augmented);
            let prep = if pinned.is_some() {
                pre_optimize_basis_in(raw, &op, &opts)?
            } else {
                prepare_basis_in(raw, &op, &opts)?
            };
            self.prepared.insert(augmented, prep);
        }
        Ok(&self.prepared[&augmented])
    }
}

fn fixture_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Basis of `n` circuits from a prepared one, repeating circuits when `n`
/// exceeds the number of graphs.
pub fn sized_basis(prepared: &BasisSpec, n: usize) -> BasisSpec {
    if n <= prepared.len() {
        prepared.truncated(n)
    } else {
        prepared.cycled(n)
    }
}

/// Resources of the circuit with the most CNOTs (first one on ties).
pub fn deepest(basis: &BasisSpec) -> Resources {
    basis
        .circuits
        .iter()
        .map(count_resources)
        .fold(None, |best: Option<Resources>, r| match best {
            Some(b) if b.cnot_count >= r.cnot_count => Some(b),
            _ => Some(r),
        })
        .unwrap_or(Resources {
            cnot_count: 0,
            parameter_count: 0,
            depth: 0,
        })
}

/// Compact graph notation for CSV cells: `0-1 2-3`.
pub fn graph_cell(g: &MolecularGraph) -> String {
    g.edges()
        .iter()
        .map(|(a, b)| format!("{a}-{b}"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Graphs of a basis, `;`-separated.
pub fn basis_cell(basis: &BasisSpec) -> String {
    basis
        .graphs
        .iter()
        .map(graph_cell)
        .collect::<Vec<_>>()
        .join(";")
}

pub fn gnm_label(n: usize, m: usize, augmented: bool) -> String {
    if augmented {
        format!("G({n},{m})+U_R")
    } else {
        format!("G({n},{m})")
    }
}

fn krylov_label(mode: KrylovMode, n: usize) -> String {
    match mode {
        KrylovMode::Power => format!("KRYLOV-POWER({n})"),
        KrylovMode::Realtime => format!("KRYLOV-REALTIME({n})"),
    }
}

fn base_row(cfg: &ExperimentConfig, fx: &Fixture, method: &str, label: String, energy: f64) -> Row {
    Row {
        system: cfg.name.clone(),
        fixture: fx.name.clone(),
        method: method.into(),
        label,
        graphs: String::new(),
        n: None,
        m: None,
        augmented: None,
        energy,
        fci_energy: fx.fci_energy,
        error: energy - fx.fci_energy,
        iterations: None,
        max_solve_iterations: None,
        restarts: None,
        saddle_escapes: None,
        converged: None,
        retained_rank: None,
        s_condition: None,
        discarded: None,
        cnot_deepest: None,
        params_deepest: None,
        depth_deepest: None,
    }
}

fn gnm_entry(
    cfg: &ExperimentConfig,
    fx: &Fixture,
    basis: &BasisSpec,
    m: usize,
    augmented: bool,
) -> anyhow::Result<Entry> {
    let n = basis.len();
    let gcfg = cfg.optimizer.gnm_config(n, m, augmented);
    let op = SectorOperator::new(&fx.qubit, basis_sector(basis)?)?;
    let result = gnm_solve_in(basis, &op, &gcfg)?;
    let graphs: Vec<String> = basis.graphs.iter().map(|g| g.to_string()).collect();
    let res = deepest(basis);
    let mut row = base_row(cfg, fx, "GNM", gnm_label(n, m, augmented), result.energy);
    row.graphs = basis_cell(basis);
    row.n = Some(n);
    row.m = Some(m);
    row.augmented = Some(augmented);
    row.iterations = Some(result.iterations);
    row.max_solve_iterations = Some(result.max_solve_iterations);
    row.restarts = Some(result.restarts);
    row.saddle_escapes = Some(result.saddle_escapes);
    row.converged = Some(result.converged && !result.restart_limit_reached);
    row.retained_rank = Some(result.retained_rank);
    row.s_condition = Some(result.condition_number);
    row.discarded = Some(result.discarded_overlap_eigenvalues.len());
    row.cnot_deepest = Some(res.cnot_count);
    row.params_deepest = Some(res.parameter_count);
    row.depth_deepest = Some(res.depth);
    Ok(Entry {
        row,
        detail: Detail::Gnm {
            graphs,
            result: Box::new(result),
        },
    })
}

/// Runs every configured method on one fixture, in configuration order.
pub fn run_fixture(cfg: &ExperimentConfig, path: &Path) -> anyhow::Result<Vec<Entry>> {
    let mut fx = Fixture::load(path)?;
    let mut out = Vec::new();
    for (k, run) in cfg.runs.iter().enumerate() {
        let entries = run_one(cfg, &mut fx, run).with_context(|| format!("runs[{k}]"))?;
        for e in &entries {
            log::info!(
                "{} {}: E = {:.10}, error = {:.3e}",
                fx.name,
                e.row.label,
                e.row.energy,
                e.row.error
            );
            if e.row.error < -VARIATIONAL_SLACK {
                bail!(
                    "runs[{k}] {}: energy {} lies below the exact energy {}",
                    e.row.label,
                    e.row.energy,
                    fx.fci_energy
                );
            }
        }
        out.extend(entries);
    }
    Ok(out)
}

fn run_one(cfg: &ExperimentConfig, fx: &mut Fixture, run: &RunSpec) -> anyhow::Result<Vec<Entry>> {
    match run {
        RunSpec::Fci => {
            let row = base_row(cfg, fx, "FCI", "FCI".into(), fx.fci_energy);
            Ok(vec![Entry {
                row,
                detail: Detail::Fci {
                    n_electrons: fx.fermion.n_electrons(),
                    ms2: fx.fermion.ms2(),
                },
            }])
        }
        RunSpec::Gnm {
            n,
            m,
            augmented,
            per_graph,
        } => {
            let basis = fx.prepared(cfg, *augmented)?.basis.clone();
            if *per_graph {
                (0..basis.len())
                    .map(|k| {
                        let single = BasisSpec {
                            graphs: vec![basis.graphs[k].clone()],
                            circuits: vec![basis.circuits[k].clone()],
                            augmented: *augmented,
                        };
                        gnm_entry(cfg, fx, &single, *m, *augmented)
                    })
                    .collect()
            } else {
                Ok(vec![gnm_entry(
                    cfg,
                    fx,
                    &sized_basis(&basis, *n),
                    *m,
                    *augmented,
                )?])
            }
        }
        RunSpec::Krylov {
            mode,
            n,
            dt,
            references,
        } => {
            let n_qubits = fx.qubit.n_qubits();
            let mut refs = Vec::with_capacity(references.len());
            for r in references {
                if r.len() != n_qubits {
                    bail!(
                        "reference {r:?} has {} qubits, fixture has {n_qubits}",
                        r.len()
                    );
                }
                refs.push(bitstring_index(r)?);
            }
            let kcfg = KrylovConfig {
                mode: *mode,
                n: *n,
                dt: *dt,
                n_electrons: fx.fermion.n_electrons(),
                ms2: fx.fermion.ms2(),
                references: refs,
            };
            let result = krylov_energy(&fx.qubit, &kcfg, cfg.optimizer.overlap_threshold)?;
            let mut row = base_row(
                cfg,
                fx,
                "KRYLOV",
                krylov_label(*mode, *n),
                result.ground_energy,
            );
            row.n = Some(*n);
            row.retained_rank = Some(result.retained_rank);
            row.s_condition = Some(result.condition_number);
            row.discarded = Some(result.discarded_overlap_eigenvalues.len());
            Ok(vec![Entry {
                row,
                detail: Detail::Krylov {
                    config: kcfg,
                    result,
                },
            }])
        }
    }
}

/// Runs all fixtures with up to `jobs` worker threads. Rows keep the
/// fixture order of the configuration whatever the completion order.
pub fn run(cfg: &ExperimentConfig, jobs: usize) -> Report {
    let fixtures = cfg.fixtures();
    let slots: Vec<Mutex<Option<anyhow::Result<Vec<Entry>>>>> =
        fixtures.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = jobs.clamp(1, fixtures.len().max(1));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                if k >= fixtures.len() {
                    break;
                }
                let r = run_fixture(cfg, &fixtures[k]);
                *slots[k].lock().expect("result slot poisoned") = Some(r);
            });
        }
    });
    let mut entries = Vec::new();
    let mut failures = Vec::new();
    for (path, slot) in fixtures.iter().zip(slots) {
        match slot.into_inner().expect("result slot poisoned") {
            Some(Ok(e)) => entries.extend(e),
            Some(Err(e)) => failures.push((path.display().to_string(), format!("{e:#}"))),
            None => failures.push((path.display().to_string(), "not run".into())),
        }
    }
    Report {
        config: cfg.clone(),
        entries,
        failures,
    }
}

pub fn write_csv<W: std::io::Write, T: Serialize>(
    w: W,
    rows: impl IntoIterator<Item = T>,
) -> anyhow::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

/// Writes `<name>.csv` and the `<name>.json` sidecar into `dir`.
pub fn write_report(report: &Report, dir: &Path) -> anyhow::Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let name = &report.config.name;
    let csv_path = dir.join(format!("{name}.csv"));
    let json_path = dir.join(format!("{name}.json"));
    let file =
        fs::File::create(&csv_path).with_context(|| format!("creating {}", csv_path.display()))?;
    write_csv(std::io::BufWriter::new(file), report.rows())?;
    let json = serde_json::to_string_pretty(report)?;
    fs::write(&json_path, json + "\n")
        .with_context(|| format!("writing {}", json_path.display()))?;
    Ok((csv_path, json_path))
}

/// Fails when any fixture failed.
pub fn check(report: &Report) -> anyhow::Result<()> {
    if report.failures.is_empty() {
        return Ok(());
    }
    let msg: Vec<String> = report
        .failures
        .iter()
        .map(|(f, e)| format!("{f}: {e}"))
        .collect();
    Err(anyhow!(
        "{} fixture(s) failed:\n{}",
        msg.len(),
        msg.join("\n")
    ))
}
