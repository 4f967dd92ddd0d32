//! Experiment recipes on disk.
//!
//! Recipes are TOML (or the JSON echo written next to every run) with the
//! sections `graph`, `data`, `train`, `protocol` and `output`. Unknown keys
//! are rejected.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use topoflow_core::dataset::{CentralityFocus, CommunityClasses, DistributionStrategy, Focus, Metric};
use topoflow_core::neuralnet::{TrainConfig, DEFAULT_DIMS};
use topoflow_core::protocol::{DataOptions, ExperimentConfig, ModelOptions};
use topoflow_core::seeds::{derive_seed, Stream};
use topoflow_core::topology::{GraphKind, GraphSpec};

use crate::error::{CliError, CliResult};

pub const SEED_ENV: &str = "TOPOFLOW_SEED";
pub const DEFAULT_BATCH_SIZE: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphKindName {
    Ba,
    ErGnp,
    ErGnm,
    Sbm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSection {
    pub kind: GraphKindName,
    pub node_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_sizes: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_intra: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_inter: Option<f64>,
    /// Derived from `master_seed` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataSource {
    Synthetic,
    Idx,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    CentralityFocus,
    CommunityClasses,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategySection {
    pub kind: StrategyKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Metric>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub focus: Option<Focus>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g1_classes: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g2_classes: Option<Vec<usize>>,
    /// Classes per community, indexed by community id.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub communities: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub swap: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    pub source: DataSource,
    /// Directory holding the four standard IDX files.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub idx_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic_train_per_class: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic_test_per_class: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples_per_class: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test_per_class: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eval_classes: Option<Vec<usize>>,
    pub strategy: StrategySection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    pub learning_rate: f64,
    pub momentum: f64,
    pub local_epochs: usize,
    #[serde(default = "default_batch_size")]
    pub batch_size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hidden_dims: Option<Vec<usize>>,
    #[serde(default)]
    pub shared_init: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolSection {
    pub rounds: usize,
    #[serde(default = "default_eval_every")]
    pub eval_every: usize,
    #[serde(default)]
    pub reset_momentum: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub master_seed: u64,
    pub graph: GraphSection,
    pub data: DataSection,
    pub train: TrainSection,
    pub protocol: ProtocolSection,
    #[serde(default)]
    pub output: OutputSection,
}

fn default_batch_size() -> usize {
    DEFAULT_BATCH_SIZE
}

fn default_eval_every() -> usize {
    1
}

fn parse_text<T: for<'de> Deserialize<'de>>(text: &str, path: &Path) -> CliResult<T> {
    let is_json = path.extension().is_some_and(|e| e == "json");
    let parsed = if is_json {
        serde_json::from_str(text).map_err(|e| e.to_string())
    } else {
        toml::from_str(text).map_err(|e| e.to_string())
    };
    parsed.map_err(|e| CliError::Config(format!("{}: {}", path.display(), e.trim_end())))
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))
}

/// Reads `TOPOFLOW_SEED`, if set.
pub fn seed_from_env() -> CliResult<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Config(format!("{SEED_ENV} must be an unsigned integer, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

/// Parses, resolves and validates a recipe. `seed_override` replaces
/// `master_seed`.
pub fn parse_config(path: &Path, seed_override: Option<u64>) -> CliResult<(RunConfig, ExperimentConfig)> {
    let mut cfg: RunConfig = parse_text(&read_text(path)?, path)?;
    if let Some(seed) = seed_override {
        cfg.master_seed = seed;
    }
    let resolved = cfg.resolve()?;
    let experiment = resolved.experiment()?;
    Ok((resolved, experiment))
}

/// Reads a standalone graph spec: a `[graph]` table whose `seed` is
/// mandatory.
pub fn parse_graph_spec(path: &Path) -> CliResult<GraphSpec> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct SpecFile {
        graph: GraphSection,
    }
    let file: SpecFile = parse_text(&read_text(path)?, path)?;
    let seed = file
        .graph
        .seed
        .ok_or_else(|| CliError::Config("missing field `graph.seed`".into()))?;
    file.graph.to_spec(seed)
}

fn require<T: Clone>(value: &Option<T>, name: &str, context: &str) -> CliResult<T> {
    value
        .clone()
        .ok_or_else(|| CliError::Config(format!("missing field `{name}` ({context})")))
}

fn forbid<T>(value: &Option<T>, name: &str, context: &str) -> CliResult<()> {
    match value {
        Some(_) => Err(CliError::Config(format!("field `{name}` is not allowed ({context})"))),
        None => Ok(()),
    }
}

fn range_error(e: topoflow_core::Error) -> CliError {
    match CliError::from(e) {
        CliError::Config(m) => CliError::Config(format!("out of range: {m}")),
        other => other,
    }
}

impl GraphSection {
    pub fn to_spec(&self, seed: u64) -> CliResult<GraphSpec> {
        let ctx = match self.kind {
            GraphKindName::Ba => "graph kind ba",
            GraphKindName::ErGnp => "graph kind er_gnp",
            GraphKindName::ErGnm => "graph kind er_gnm",
            GraphKindName::Sbm => "graph kind sbm",
        };
        let uses = |name: &str| match self.kind {
            GraphKindName::Ba => name == "m",
            GraphKindName::ErGnp => name == "p",
            GraphKindName::ErGnm => name == "edge_count",
            GraphKindName::Sbm => matches!(name, "block_sizes" | "p_intra" | "p_inter"),
        };
        let present = [
            ("m", self.m.is_some()),
            ("p", self.p.is_some()),
            ("edge_count", self.edge_count.is_some()),
            ("block_sizes", self.block_sizes.is_some()),
            ("p_intra", self.p_intra.is_some()),
            ("p_inter", self.p_inter.is_some()),
        ];
        if let Some((name, _)) = present.iter().find(|(name, set)| *set && !uses(name)) {
            return Err(CliError::Config(format!("field `graph.{name}` is not allowed ({ctx})")));
        }
        let kind = match self.kind {
            GraphKindName::Ba => GraphKind::Ba {
                m: require(&self.m, "graph.m", ctx)?,
            },
            GraphKindName::ErGnp => GraphKind::ErGnp {
                p: require(&self.p, "graph.p", ctx)?,
            },
            GraphKindName::ErGnm => GraphKind::ErGnm {
                edge_count: require(&self.edge_count, "graph.edge_count", ctx)?,
            },
            GraphKindName::Sbm => GraphKind::Sbm {
                block_sizes: require(&self.block_sizes, "graph.block_sizes", ctx)?,
                p_intra: require(&self.p_intra, "graph.p_intra", ctx)?,
                p_inter: require(&self.p_inter, "graph.p_inter", ctx)?,
            },
        };
        let spec = GraphSpec {
            kind,
            node_count: self.node_count,
            seed,
        };
        spec.validate().map_err(range_error)?;
        Ok(spec)
    }
}

impl StrategySection {
    fn to_strategy(&self) -> CliResult<DistributionStrategy> {
        match self.kind {
            StrategyKind::CentralityFocus => {
                let ctx = "strategy kind centrality_focus";
                forbid(&self.communities, "data.strategy.communities", ctx)?;
                forbid(&self.swap, "data.strategy.swap", ctx)?;
                let metric = require(&self.metric, "data.strategy.metric", ctx)?;
                let focus = require(&self.focus, "data.strategy.focus", ctx)?;
                let standard = CentralityFocus::standard(metric, focus);
                Ok(DistributionStrategy::CentralityFocus(CentralityFocus {
                    fraction: self.fraction.unwrap_or(standard.fraction),
                    g1_classes: self.g1_classes.clone().unwrap_or(standard.g1_classes),
                    g2_classes: self.g2_classes.clone().unwrap_or(standard.g2_classes),
                    ..standard
                }))
            }
            StrategyKind::CommunityClasses => {
                let ctx = "strategy kind community_classes";
                forbid(&self.metric, "data.strategy.metric", ctx)?;
                forbid(&self.focus, "data.strategy.focus", ctx)?;
                forbid(&self.fraction, "data.strategy.fraction", ctx)?;
                forbid(&self.g1_classes, "data.strategy.g1_classes", ctx)?;
                forbid(&self.g2_classes, "data.strategy.g2_classes", ctx)?;
                let community_to_classes = match &self.communities {
                    Some(list) => list.iter().cloned().enumerate().collect::<BTreeMap<_, _>>(),
                    None => CommunityClasses::standard().community_to_classes,
                };
                Ok(DistributionStrategy::CommunityClasses(CommunityClasses {
                    community_to_classes,
                    swap: self.swap.clone(),
                }))
            }
        }
    }

    fn resolved(&self) -> CliResult<StrategySection> {
        Ok(match self.to_strategy()? {
            DistributionStrategy::CentralityFocus(s) => StrategySection {
                kind: self.kind,
                metric: Some(s.metric),
                focus: Some(s.focus),
                fraction: Some(s.fraction),
                g1_classes: Some(s.g1_classes),
                g2_classes: Some(s.g2_classes),
                communities: None,
                swap: None,
            },
            DistributionStrategy::CommunityClasses(s) => StrategySection {
                communities: Some(s.community_to_classes.into_values().collect()),
                ..self.clone()
            },
        })
    }
}

impl RunConfig {
    /// Fills every derivable default so the result reproduces the run on its
    /// own.
    pub fn resolve(&self) -> CliResult<RunConfig> {
        let mut out = self.clone();
        if out.graph.seed.is_none() {
            out.graph.seed = Some(derive_seed(self.master_seed, Stream::Graph, 0));
        }
        if out.train.hidden_dims.is_none() {
            out.train.hidden_dims = Some(DEFAULT_DIMS[1..DEFAULT_DIMS.len() - 1].to_vec());
        }
        out.data.strategy = self.data.strategy.resolved()?;
        match out.data.source {
            DataSource::Synthetic => {
                forbid(&out.data.idx_dir, "data.idx_dir", "synthetic source")?;
                require(&out.data.synthetic_train_per_class, "data.synthetic_train_per_class", "synthetic source")?;
                require(&out.data.synthetic_test_per_class, "data.synthetic_test_per_class", "synthetic source")?;
            }
            DataSource::Idx => {
                require(&out.data.idx_dir, "data.idx_dir", "idx source")?;
                forbid(&out.data.synthetic_train_per_class, "data.synthetic_train_per_class", "idx source")?;
                forbid(&out.data.synthetic_test_per_class, "data.synthetic_test_per_class", "idx source")?;
            }
        }
        Ok(out)
    }

    pub fn experiment(&self) -> CliResult<ExperimentConfig> {
        let seed = self.graph.seed.unwrap_or_else(|| derive_seed(self.master_seed, Stream::Graph, 0));
        let cfg = ExperimentConfig {
            graph_spec: self.graph.to_spec(seed)?,
            strategy: self.data.strategy.to_strategy()?,
            train: TrainConfig {
                learning_rate: self.train.learning_rate,
                momentum: self.train.momentum,
                local_epochs: self.train.local_epochs,
                batch_size: self.train.batch_size,
                seed: 0,
            },
            rounds: self.protocol.rounds,
            eval_every: self.protocol.eval_every,
            master_seed: self.master_seed,
            data: DataOptions {
                samples_per_class: self.data.samples_per_class,
                test_per_class: self.data.test_per_class,
                eval_classes: self.data.eval_classes.clone(),
            },
            model: ModelOptions {
                hidden_dims: self
                    .train
                    .hidden_dims
                    .clone()
                    .unwrap_or_else(|| DEFAULT_DIMS[1..DEFAULT_DIMS.len() - 1].to_vec()),
                shared_init: self.train.shared_init,
                reset_momentum: self.protocol.reset_momentum,
            },
        };
        cfg.validate().map_err(range_error)?;
        Ok(cfg)
    }
}
