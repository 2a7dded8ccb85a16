//! Run-configuration schema: one JSON document drives every command, with
//! unused sections ignored. File references resolve relative to the
//! configuration file's directory; absent sections fall back to bundled
//! defaults (toy graphs/models, Table-style device constants, shipped
//! calibration).

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use ghost_core::arch::{ArchConfig, DeviceLibrary, PhotonicLimits, DEFAULT_SNR_REQUIREMENT_DB};
use ghost_core::dse::{toy_arch_config, toy_graphs, toy_models, SweepSpec, Workload};
use ghost_core::engine::MemoryModel;
use ghost_core::error::Error as CoreError;
use ghost_core::gnn::{GnnModelSpec, GnnModelSpecFile};
use ghost_core::graph::{load_edge_list, generate_graph, Graph, GraphKind};
use ghost_core::photonics::CrosstalkModel;

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphSource {
    /// Edge-list file plus optional feature CSV.
    Path {
        path: String,
        num_vertices: usize,
        #[serde(default)]
        feature_dim: usize,
        #[serde(default)]
        features: Option<String>,
    },
    Generate {
        kind: GraphKind,
        n: usize,
        param: f64,
        #[serde(default)]
        feature_dim: usize,
        #[serde(default)]
        seed: u64,
    },
    /// One of the bundled graphs: er64 | pl48.
    Bundled(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelSource {
    Path(String),
    /// One of the bundled models: gcn | graphsage | gin | gat.
    Bundled(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ArchSource {
    Path { path: String },
    Inline(ArchConfig),
}

#[derive(Debug, Clone, Deserialize)]
pub struct WorkloadSource {
    #[serde(default)]
    pub name: Option<String>,
    pub graph: GraphSource,
    pub model: ModelSource,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default)]
pub struct ConfigFile {
    pub graph: Option<GraphSource>,
    pub model: Option<ModelSource>,
    pub arch: Option<ArchSource>,
    /// Path to a DeviceLibrary JSON.
    pub device: Option<String>,
    /// Path to a MemoryModel JSON.
    pub memory: Option<String>,
    /// Path to a crosstalk calibration JSON.
    pub calibration: Option<String>,
    /// Bank-size limits; absent means derive from the calibration.
    pub limits: Option<PhotonicLimits>,
    pub snr_requirement_db: Option<f64>,
    pub sweep: Option<SweepSpec>,
    pub workloads: Option<Vec<WorkloadSource>>,
}

fn io_err(path: &Path, e: std::io::Error) -> anyhow::Error {
    anyhow::Error::from(CoreError::Io(std::io::Error::new(
        e.kind(),
        format!("{}: {e}", path.display()),
    )))
}

fn base_dir(config_path: Option<&Path>) -> PathBuf {
    config_path
        .and_then(|p| p.parent())
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."))
}

impl ConfigFile {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        let cfg: ConfigFile = serde_json::from_str(&text)
            .map_err(|e| CoreError::validation("config-parse", format!("{}: {e}", path.display())))?;
        Ok(cfg)
    }

    pub fn resolve_graph(&self, config_path: Option<&Path>) -> anyhow::Result<Graph> {
        let source = self
            .graph
            .clone()
            .unwrap_or(GraphSource::Bundled("er64".to_string()));
        resolve_graph_source(&source, &base_dir(config_path))
    }

    pub fn resolve_model(&self, config_path: Option<&Path>) -> anyhow::Result<GnnModelSpec> {
        let source = self
            .model
            .clone()
            .unwrap_or(ModelSource::Bundled("gcn".to_string()));
        resolve_model_source(&source, &base_dir(config_path))
    }

    pub fn resolve_arch(&self, config_path: Option<&Path>) -> anyhow::Result<ArchConfig> {
        match &self.arch {
            None => Err(CoreError::validation("arch-missing", "config has no arch section").into()),
            Some(ArchSource::Inline(cfg)) => Ok(*cfg),
            Some(ArchSource::Path { path }) => {
                let full = base_dir(config_path).join(path);
                let text = fs::read_to_string(&full).map_err(|e| io_err(&full, e))?;
                let cfg: ArchConfig = serde_json::from_str(&text)
                    .map_err(|e| CoreError::validation("arch-parse", e.to_string()))?;
                Ok(cfg)
            }
        }
    }

    pub fn resolve_arch_or_toy(&self, config_path: Option<&Path>) -> anyhow::Result<ArchConfig> {
        if self.arch.is_none() {
            return Ok(toy_arch_config());
        }
        self.resolve_arch(config_path)
    }

    pub fn resolve_device(&self, config_path: Option<&Path>) -> anyhow::Result<DeviceLibrary> {
        match &self.device {
            None => Ok(DeviceLibrary::default()),
            Some(path) => {
                let full = base_dir(config_path).join(path);
                let text = fs::read_to_string(&full).map_err(|e| io_err(&full, e))?;
                Ok(DeviceLibrary::from_json(&text)?)
            }
        }
    }

    pub fn resolve_memory(&self, config_path: Option<&Path>) -> anyhow::Result<MemoryModel> {
        match &self.memory {
            None => Ok(MemoryModel::default()),
            Some(path) => {
                let full = base_dir(config_path).join(path);
                let text = fs::read_to_string(&full).map_err(|e| io_err(&full, e))?;
                Ok(MemoryModel::from_json(&text)?)
            }
        }
    }

    pub fn resolve_calibration(&self, config_path: Option<&Path>) -> anyhow::Result<CrosstalkModel> {
        match &self.calibration {
            None => Ok(CrosstalkModel::shipped()),
            Some(path) => {
                let full = base_dir(config_path).join(path);
                let text = fs::read_to_string(&full).map_err(|e| io_err(&full, e))?;
                Ok(CrosstalkModel::from_json(&text)?)
            }
        }
    }

    /// Explicit limits win; otherwise run the feasibility scans against the
    /// configured calibration and MR design.
    pub fn resolve_limits(&self, config_path: Option<&Path>) -> anyhow::Result<PhotonicLimits> {
        if let Some(l) = self.limits {
            return Ok(l);
        }
        let model = self.resolve_calibration(config_path)?;
        let dev = self.resolve_device(config_path)?;
        let req = self.snr_requirement_db.unwrap_or(DEFAULT_SNR_REQUIREMENT_DB);
        Ok(PhotonicLimits::from_model(&dev.mr_design, &model, req)?)
    }

    /// Workload list for sweeps/ablation; defaults to the bundled set.
    pub fn resolve_workloads(&self, config_path: Option<&Path>) -> anyhow::Result<Vec<Workload>> {
        match &self.workloads {
            None => Ok(ghost_core::dse::toy_workloads()),
            Some(sources) => {
                let dir = base_dir(config_path);
                let mut out = Vec::with_capacity(sources.len());
                for (idx, s) in sources.iter().enumerate() {
                    let graph = resolve_graph_source(&s.graph, &dir)?;
                    let model = resolve_model_source(&s.model, &dir)?;
                    out.push(Workload {
                        name: s.name.clone().unwrap_or(format!("workload{idx}")),
                        graph,
                        model,
                    });
                }
                Ok(out)
            }
        }
    }
}

fn resolve_graph_source(source: &GraphSource, dir: &Path) -> anyhow::Result<Graph> {
    match source {
        GraphSource::Bundled(name) => toy_graphs()
            .into_iter()
            .find(|(n, _)| n == name)
            .map(|(_, g)| g)
            .ok_or_else(|| {
                CoreError::validation("unknown-bundled-graph", format!("'{name}' (er64 | pl48)")).into()
            }),
        GraphSource::Generate {
            kind,
            n,
            param,
            feature_dim,
            seed,
        } => Ok(generate_graph(*kind, *n, *param, *feature_dim, *seed)?),
        GraphSource::Path {
            path,
            num_vertices,
            feature_dim,
            features,
        } => {
            let full = dir.join(path);
            let file = fs::File::open(&full).map_err(|e| io_err(&full, e))?;
            let mut feature_reader = match features {
                None => None,
                Some(f) => {
                    let ff = dir.join(f);
                    Some(BufReader::new(fs::File::open(&ff).map_err(|e| io_err(&ff, e))?))
                }
            };
            let graph = load_edge_list(
                BufReader::new(file),
                *num_vertices,
                *feature_dim,
                feature_reader
                    .as_mut()
                    .map(|r| r as &mut dyn std::io::BufRead),
            )?;
            Ok(graph)
        }
    }
}

fn resolve_model_source(source: &ModelSource, dir: &Path) -> anyhow::Result<GnnModelSpec> {
    match source {
        ModelSource::Bundled(name) => toy_models()
            .into_iter()
            .find(|(n, _)| n == name)
            .map(|(_, m)| m)
            .ok_or_else(|| {
                CoreError::validation(
                    "unknown-bundled-model",
                    format!("'{name}' (gcn | graphsage | gin | gat)"),
                )
                .into()
            }),
        ModelSource::Path(path) => {
            let full = dir.join(path);
            let text = fs::read_to_string(&full).map_err(|e| io_err(&full, e))?;
            let file = GnnModelSpecFile::from_json(&text)?;
            Ok(file.resolve(full.parent().unwrap_or(dir))?)
        }
    }
}
