//! Experiment description: one JSON document per experiment.
//!
//! ```json
//! {
//!   "name": "h4_square",
//!   "fixture": "../fixtures/h4_square_d1.5.fcidump",
//!   "runs": [
//!     { "method": "FCI" },
//!     { "method": "GNM", "n": 3, "m": 3 },
//!     { "method": "GNM", "n": 2, "m": 2, "augmented": true },
//!     { "method": "KRYLOV", "mode": "REALTIME", "n": 4 }
//!   ]
//! }
//! ```
//!
//! Relative paths are resolved against the directory holding the config.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use effbasis_core::graphs::MolecularGraph;
use effbasis_core::krylov::{KrylovMode, DEFAULT_TIME_STEP};
use effbasis_core::optimize::GNMConfig;
use effbasis_core::simulator::bitstring_index;
use serde::{Deserialize, Serialize};

/// Invalid configuration, located by a field path such as `runs[2].m`.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{path}: {message}")]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    fn new(path: impl Into<String>, message: impl fmt::Display) -> Self {
        Self {
            path: path.into(),
            message: message.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Experiment name; also the stem of the report files.
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture: Option<PathBuf>,
    /// Additional fixtures, e.g. the points of a bond scan. Rows follow
    /// `fixture` first, then `scan` in order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub scan: Vec<PathBuf>,
    #[serde(default)]
    pub graphs: GraphSelection,
    #[serde(default)]
    pub optimizer: OptimizerSettings,
    pub runs: Vec<RunSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

/// `"enumerate"` (all graphs, ordered by pre-optimized energy) or an
/// explicit list of edge lists used in the given order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphSelection {
    #[default]
    #[serde(with = "enumerate_keyword")]
    Enumerate,
    Pinned(Vec<Vec<(usize, usize)>>),
}

mod enumerate_keyword {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str("enumerate")
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(), D::Error> {
        let s = String::deserialize(d)?;
        if s == "enumerate" {
            Ok(())
        } else {
            Err(de::Error::custom(format!("unknown graph selection {s:?}")))
        }
    }
}

impl GraphSelection {
    /// Graphs for a fixture with `n_spatial` orbitals, or `None` for
    /// enumeration.
    pub fn pinned(&self, n_spatial: usize) -> Result<Option<Vec<MolecularGraph>>, ConfigError> {
        match self {
            GraphSelection::Enumerate => Ok(None),
            GraphSelection::Pinned(list) => list
                .iter()
                .enumerate()
                .map(|(k, edges)| {
                    MolecularGraph::new(n_spatial, edges.iter().copied())
                        .map_err(|e| ConfigError::new(format!("graphs[{k}]"), e))
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
        }
    }
}

/// Optimizer and threshold settings shared by every run of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerSettings {
    pub gtol: f64,
    pub pre_gtol: f64,
    pub max_iterations: usize,
    pub max_restarts: usize,
    pub max_saddle_escapes: usize,
    pub fd_step: f64,
    pub disagreement_tolerance: f64,
    pub overlap_threshold: f64,
    pub wolfe_c2: f64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        let d = GNMConfig::default();
        Self {
            gtol: d.gtol,
            pre_gtol: d.pre_gtol,
            max_iterations: d.max_iterations,
            max_restarts: d.max_restarts,
            max_saddle_escapes: d.max_saddle_escapes,
            fd_step: d.fd_step,
            disagreement_tolerance: d.disagreement_tolerance,
            overlap_threshold: d.overlap_threshold,
            wolfe_c2: d.wolfe_c2,
        }
    }
}

impl OptimizerSettings {
    pub fn gnm_config(&self, n: usize, m: usize, augmented: bool) -> GNMConfig {
        GNMConfig {
            n,
            m,
            augmented,
            gtol: self.gtol,
            pre_gtol: self.pre_gtol,
            max_iterations: self.max_iterations,
            max_restarts: self.max_restarts,
            max_saddle_escapes: self.max_saddle_escapes,
            fd_step: self.fd_step,
            disagreement_tolerance: self.disagreement_tolerance,
            overlap_threshold: self.overlap_threshold,
            wolfe_c2: self.wolfe_c2,
            pre_optimize: false,
        }
    }
}

fn default_dt() -> f64 {
    DEFAULT_TIME_STEP
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "method",
    rename_all = "SCREAMING_SNAKE_CASE",
    deny_unknown_fields
)]
pub enum RunSpec {
    /// Exact ground state in the fixture's sector.
    Fci,
    /// `G(N, M)`. With `per_graph`, one `G(1, M)` row per graph.
    Gnm {
        n: usize,
        m: usize,
        #[serde(default)]
        augmented: bool,
        #[serde(default)]
        per_graph: bool,
    },
    /// Krylov baseline. References are bitstrings, qubit 0 first; none
    /// selects the lowest-energy determinant.
    Krylov {
        mode: KrylovMode,
        n: usize,
        #[serde(default = "default_dt")]
        dt: f64,
        #[serde(default)]
        references: Vec<String>,
    },
}

impl ExperimentConfig {
    /// Reads, resolves relative paths and validates.
    pub fn load(path: impl AsRef<Path>) -> anyhow::Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
        let mut cfg: ExperimentConfig =
            serde_json::from_str(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.resolve_paths(base);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(f) = self.fixture.as_mut() {
            join(f);
        }
        self.scan.iter_mut().for_each(join);
        if let Some(o) = self.output.as_mut() {
            join(o);
        }
    }

    /// `fixture` followed by `scan`.
    pub fn fixtures(&self) -> Vec<PathBuf> {
        self.fixture.iter().chain(&self.scan).cloned().collect()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.name.is_empty()
            || !self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c))
        {
            return Err(ConfigError::new(
                "name",
                "must be non-empty and use only ASCII letters, digits, '-', '_' or '.'",
            ));
        }
        if self.fixture.is_none() && self.scan.is_empty() {
            return Err(ConfigError::new(
                "fixture",
                "either `fixture` or `scan` must be given",
            ));
        }
        if let Some(f) = &self.fixture {
            check_file("fixture", f)?;
        }
        for (k, f) in self.scan.iter().enumerate() {
            check_file(&format!("scan[{k}]"), f)?;
        }
        if let GraphSelection::Pinned(list) = &self.graphs {
            if list.is_empty() {
                return Err(ConfigError::new("graphs", "explicit graph list is empty"));
            }
        }
        self.optimizer
            .gnm_config(1, 0, false)
            .validate()
            .map_err(|e| ConfigError::new("optimizer", e))?;
        if self.runs.is_empty() {
            return Err(ConfigError::new("runs", "at least one run is required"));
        }
        for (k, run) in self.runs.iter().enumerate() {
            validate_run(run, &format!("runs[{k}]"))?;
        }
        Ok(())
    }
}

fn check_file(path: &str, file: &Path) -> Result<(), ConfigError> {
    if file.is_file() {
        Ok(())
    } else {
        Err(ConfigError::new(
            path,
            format!("file not found: {}", file.display()),
        ))
    }
}

fn validate_run(run: &RunSpec, path: &str) -> Result<(), ConfigError> {
    match run {
        RunSpec::Fci => Ok(()),
        RunSpec::Gnm {
            n, m, per_graph, ..
        } => {
            if *n == 0 {
                return Err(ConfigError::new(
                    format!("{path}.n"),
                    "N must be at least 1",
                ));
            }
            if m > n {
                return Err(ConfigError::new(
                    format!("{path}.m"),
                    format!("M = {m} exceeds N = {n}"),
                ));
            }
            if *per_graph && *n != 1 {
                return Err(ConfigError::new(
                    format!("{path}.n"),
                    "per_graph runs use single-circuit bases (N = 1)",
                ));
            }
            Ok(())
        }
        RunSpec::Krylov {
            n, dt, references, ..
        } => {
            if *n == 0 {
                return Err(ConfigError::new(
                    format!("{path}.n"),
                    "N must be at least 1",
                ));
            }
            if !(*dt > 0.0 && dt.is_finite()) {
                return Err(ConfigError::new(
                    format!("{path}.dt"),
                    format!("time step must be positive, got {dt}"),
                ));
            }
            for (k, r) in references.iter().enumerate() {
                bitstring_index(r)
                    .map_err(|e| ConfigError::new(format!("{path}.references[{k}]"), e))?;
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(json: &str) -> ExperimentConfig {
        serde_json::from_str(json).unwrap()
    }

    #[test]
    fn defaults_and_methods() {
        let cfg = parse(
            r#"{"name": "x", "fixture": "a.fcidump", "runs": [
                {"method": "FCI"},
                {"method": "GNM", "n": 2, "m": 1},
                {"method": "KRYLOV", "mode": "POWER", "n": 3}
            ]}"#,
        );
        assert_eq!(cfg.graphs, GraphSelection::Enumerate);
        assert_eq!(cfg.optimizer, OptimizerSettings::default());
        assert_eq!(
            cfg.runs[1],
            RunSpec::Gnm {
                n: 2,
                m: 1,
                augmented: false,
                per_graph: false
            }
        );
        match &cfg.runs[2] {
            RunSpec::Krylov { dt, references, .. } => {
                assert_eq!(*dt, DEFAULT_TIME_STEP);
                assert!(references.is_empty());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn pinned_graphs() {
        let cfg = parse(
            r#"{"name": "x", "fixture": "a", "graphs": [[[0, 3], [1, 2]]], "runs": [{"method": "FCI"}]}"#,
        );
        let g = cfg.graphs.pinned(4).unwrap().unwrap();
        assert_eq!(g[0].edges(), &[(0, 3), (1, 2)]);
        let bad = parse(
            r#"{"name": "x", "fixture": "a", "graphs": [[[0, 1], [1, 2]]], "runs": [{"method": "FCI"}]}"#,
        );
        assert_eq!(bad.graphs.pinned(4).unwrap_err().path, "graphs[0]");
    }

    #[test]
    fn unknown_fields_rejected() {
        let r: Result<ExperimentConfig, _> =
            serde_json::from_str(r#"{"name": "x", "runs": [], "fixtures": []}"#);
        assert!(r.is_err());
        let r: Result<ExperimentConfig, _> = serde_json::from_str(
            r#"{"name": "x", "runs": [{"method": "GNM", "n": 1, "m": 0, "augment": true}]}"#,
        );
        assert!(r.is_err());
        let r: Result<ExperimentConfig, _> =
            serde_json::from_str(r#"{"name": "x", "graphs": "all", "runs": []}"#);
        assert!(r.is_err());
    }

    #[test]
    fn validation_paths() {
        let dir = tempfile::tempdir().unwrap();
        let fx = dir.path().join("f.fcidump");
        fs::write(&fx, "").unwrap();
        let mut cfg = parse(r#"{"name": "x", "runs": [{"method": "GNM", "n": 2, "m": 3}]}"#);
        assert_eq!(cfg.validate().unwrap_err().path, "fixture");
        cfg.fixture = Some(fx.clone());
        assert_eq!(cfg.validate().unwrap_err().path, "runs[0].m");
        cfg.runs = vec![RunSpec::Gnm {
            n: 2,
            m: 1,
            augmented: false,
            per_graph: true,
        }];
        assert_eq!(cfg.validate().unwrap_err().path, "runs[0].n");
        cfg.runs = vec![RunSpec::Krylov {
            mode: KrylovMode::Realtime,
            n: 2,
            dt: 0.5,
            references: vec!["11x0".into()],
        }];
        assert_eq!(cfg.validate().unwrap_err().path, "runs[0].references[0]");
        cfg.runs = vec![RunSpec::Fci];
        cfg.scan = vec![dir.path().join("missing")];
        assert_eq!(cfg.validate().unwrap_err().path, "scan[0]");
        cfg.scan.clear();
        cfg.optimizer.gtol = -1.0;
        assert_eq!(cfg.validate().unwrap_err().path, "optimizer");
        cfg.optimizer.gtol = 1e-6;
        cfg.name = "a/b".into();
        assert_eq!(cfg.validate().unwrap_err().path, "name");
        cfg.name = "ok".into();
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn relative_paths_follow_config() {
        let mut cfg = parse(
            r#"{"name": "x", "fixture": "a.fcidump", "scan": ["/abs/b"], "output": "out", "runs": []}"#,
        );
        cfg.resolve_paths(Path::new("/cfg"));
        assert_eq!(
            cfg.fixtures(),
            vec![PathBuf::from("/cfg/a.fcidump"), PathBuf::from("/abs/b")]
        );
        assert_eq!(cfg.output, Some(PathBuf::from("/cfg/out")));
    }
}
