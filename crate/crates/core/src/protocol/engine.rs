use std::collections::BTreeMap;

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{aggregate, NodeState, Snapshot};
use crate::dataset::{
    build_centrality_partition, build_community_partition, DistributionStrategy, LabeledDataset, PartitionPlan,
    NUM_CLASSES,
};
use crate::neuralnet::{evaluate, init_mlp, train_local, DatasetView, OptimizerState, TrainConfig, DEFAULT_DIMS};
use crate::seeds::{derive_seed, Stream};
use crate::topology::{graph_summary, Graph, GraphSpec, GraphSummary};
use crate::{Error, Result};

/// How much of the corpus each node and the evaluator see.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataOptions {
    /// Cap on samples per (node, class); `None` deals the whole class.
    #[serde(default)]
    pub samples_per_class: Option<usize>,
    /// Per-class size of the balanced test subset; `None` uses the smallest
    /// class count.
    #[serde(default)]
    pub test_per_class: Option<usize>,
    /// Classes in the test subset; `None` means all ten for centrality plans
    /// and the classes some community sees for community plans.
    #[serde(default)]
    pub eval_classes: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelOptions {
    pub hidden_dims: Vec<usize>,
    /// Start every node from the same initial weights.
    #[serde(default)]
    pub shared_init: bool,
    /// Zero the momentum buffers after every aggregation.
    #[serde(default)]
    pub reset_momentum: bool,
}

impl Default for ModelOptions {
    fn default() -> Self {
        Self {
            hidden_dims: DEFAULT_DIMS[1..DEFAULT_DIMS.len() - 1].to_vec(),
            shared_init: false,
            reset_momentum: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub graph_spec: GraphSpec,
    pub strategy: DistributionStrategy,
    /// `train.seed` is ignored by the engine; per-node streams derive from
    /// `master_seed`.
    pub train: TrainConfig,
    pub rounds: usize,
    pub eval_every: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub data: DataOptions,
    #[serde(default)]
    pub model: ModelOptions,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.graph_spec
            .validate()
            .map_err(|e| Error::Configuration(e.to_string()))?;
        self.train.validate()?;
        if self.eval_every == 0 {
            return Err(Error::Configuration("eval_every must be positive".into()));
        }
        match &self.strategy {
            DistributionStrategy::CentralityFocus(s) => s.validate()?,
            DistributionStrategy::CommunityClasses(s) => {
                s.validate()?;
                if self.graph_spec.communities().is_none() {
                    return Err(Error::Configuration(
                        "community class strategy needs an SBM graph".into(),
                    ));
                }
            }
        }
        if self.model.hidden_dims.contains(&0) {
            return Err(Error::Configuration("hidden_dims must be positive".into()));
        }
        if let Some(classes) = &self.data.eval_classes {
            if classes.is_empty() || classes.iter().any(|&c| c >= NUM_CLASSES) {
                return Err(Error::Configuration(format!("invalid eval_classes {classes:?}")));
            }
        }
        Ok(())
    }

    pub fn eval_classes(&self) -> Vec<usize> {
        if let Some(c) = &self.data.eval_classes {
            return c.clone();
        }
        match &self.strategy {
            DistributionStrategy::CentralityFocus(_) => (0..NUM_CLASSES).collect(),
            DistributionStrategy::CommunityClasses(s) => s.used_classes(),
        }
    }

    fn dims(&self, input_dim: usize) -> Vec<usize> {
        let mut dims = vec![input_dim];
        dims.extend(&self.model.hidden_dims);
        dims.push(NUM_CLASSES);
        dims
    }

    fn train_for(&self, node: usize, round: usize) -> TrainConfig {
        TrainConfig {
            seed: derive_seed(self.master_seed, Stream::Train, ((node as u64) << 32) | round as u64),
            ..self.train.clone()
        }
    }
}

/// Accuracy per evaluated round and node.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Timeline {
    pub rounds: Vec<usize>,
    /// `accuracy[k][node]` is the accuracy after round `rounds[k]`.
    pub accuracy: Vec<Vec<f64>>,
}

impl Timeline {
    pub fn node_count(&self) -> usize {
        self.accuracy.first().map_or(0, Vec::len)
    }

    pub fn node_curve(&self, node: usize) -> Vec<f64> {
        self.accuracy.iter().map(|row| row[node]).collect()
    }

    pub fn last(&self) -> Option<&[f64]> {
        self.accuracy.last().map(Vec::as_slice)
    }
}

pub type Confusion = [[u64; NUM_CLASSES]; NUM_CLASSES];

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub timeline: Timeline,
    /// Confusion counts per evaluated round (aligned with `timeline.rounds`)
    /// and node.
    pub confusion_timeline: Vec<Vec<Confusion>>,
    pub final_confusions: Vec<Confusion>,
    pub graph: Graph,
    pub summary: GraphSummary,
    pub plan: PartitionPlan,
    pub config: ExperimentConfig,
}

/// One synchronous round: snapshot every model, aggregate each node's
/// neighbourhood from the snapshot, then train locally. No node sees another
/// node's round-`t` parameters.
pub fn run_round(states: &mut [NodeState<'_>], g: &Graph, cfg: &ExperimentConfig, round: usize) -> Result<()> {
    if round == 0 {
        return Err(Error::Parameter("communication rounds start at 1".into()));
    }
    let snapshots: BTreeMap<usize, Snapshot> = states
        .iter()
        .map(|s| {
            (
                s.node_id,
                Snapshot {
                    params: s.params.clone(),
                    dataset_size: s.dataset_size(),
                },
            )
        })
        .collect();
    states.par_iter_mut().try_for_each(|state| -> Result<()> {
        state.params = aggregate(state.node_id, &snapshots, g)?;
        if cfg.model.reset_momentum {
            state.opt_state.reset();
        }
        train_local(
            &mut state.params,
            &mut state.opt_state,
            &state.local,
            &cfg.train_for(state.node_id, round),
        )
    })
}

fn evaluate_all(states: &[NodeState<'_>], x: &Array2<f64>, y: &[usize]) -> Result<(Vec<f64>, Vec<Confusion>)> {
    let results = states
        .par_iter()
        .map(|s| {
            if !s.params.is_finite() {
                return Err(Error::Numerical(format!("node {} has non-finite parameters", s.node_id)));
            }
            evaluate(&s.params, x.view(), y, None)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(results.into_iter().map(|r| (r.accuracy, r.confusion)).unzip())
}

/// Builds the graph and data plan, trains every node on its local data
/// (round 0), then runs `cfg.rounds` communication rounds. Nodes are
/// evaluated after round 0, every `eval_every` rounds and after the last
/// round.
pub fn run_experiment(cfg: &ExperimentConfig, train: &LabeledDataset, test: &LabeledDataset) -> Result<ExperimentOutput> {
    cfg.validate()?;
    if train.feature_dim() != test.feature_dim() {
        return Err(Error::Configuration(format!(
            "train features ({}) and test features ({}) differ",
            train.feature_dim(),
            test.feature_dim()
        )));
    }
    let graph = cfg.graph_spec.generate()?;
    let summary = graph_summary(&graph);
    let partition_seed = derive_seed(cfg.master_seed, Stream::Partition, 0);
    let plan = match &cfg.strategy {
        DistributionStrategy::CentralityFocus(s) => {
            build_centrality_partition(&graph, train, s, cfg.data.samples_per_class, partition_seed)?
        }
        DistributionStrategy::CommunityClasses(s) => {
            let communities = cfg.graph_spec.communities().expect("validated SBM spec");
            build_community_partition(&communities, train, s, cfg.data.samples_per_class, partition_seed)?
        }
    };
    if let Some(v) = (0..graph.node_count()).find(|&v| plan.indices(v).is_empty()) {
        return Err(Error::Configuration(format!("node {v} receives no training data")));
    }
    let test_idx = test.balanced_indices(&cfg.eval_classes(), cfg.data.test_per_class)?;
    let (test_x, test_y) = test.gather(&test_idx);

    let dims = cfg.dims(train.feature_dim());
    let mut states = (0..graph.node_count())
        .map(|v| {
            let init_stream = if cfg.model.shared_init { 0 } else { v as u64 };
            let params = init_mlp(&dims, derive_seed(cfg.master_seed, Stream::Init, init_stream))?;
            Ok(NodeState {
                node_id: v,
                opt_state: OptimizerState::new(&params),
                params,
                local: DatasetView {
                    dataset: train,
                    indices: plan.indices(v),
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;

    states.par_iter_mut().try_for_each(|s| {
        train_local(&mut s.params, &mut s.opt_state, &s.local, &cfg.train_for(s.node_id, 0))
    })?;

    let mut timeline = Timeline::default();
    let mut confusion_timeline = Vec::new();
    let mut record = |round: usize, states: &[NodeState<'_>]| -> Result<()> {
        let (acc, conf) = evaluate_all(states, &test_x, &test_y)?;
        timeline.rounds.push(round);
        timeline.accuracy.push(acc);
        confusion_timeline.push(conf);
        Ok(())
    };
    record(0, &states)?;
    for round in 1..=cfg.rounds {
        run_round(&mut states, &graph, cfg, round)?;
        if round % cfg.eval_every == 0 || round == cfg.rounds {
            record(round, &states)?;
        } else if let Some(s) = states.iter().find(|s| !s.params.is_finite()) {
            return Err(Error::Numerical(format!("node {} diverged in round {round}", s.node_id)));
        }
    }

    let final_confusions = confusion_timeline.last().cloned().unwrap_or_default();
    Ok(ExperimentOutput {
        timeline,
        confusion_timeline,
        final_confusions,
        graph,
        summary,
        plan,
        config: cfg.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{synthetic_digits, CentralityFocus, CommunityClasses, Focus, Metric};
    use crate::neuralnet::{init_mlp, MlpParams};
    use crate::topology::GraphKind;

    fn small_config(kind: GraphKind, n: usize, rounds: usize, epochs: usize) -> ExperimentConfig {
        ExperimentConfig {
            graph_spec: GraphSpec {
                kind,
                node_count: n,
                seed: 3,
            },
            strategy: DistributionStrategy::CentralityFocus(CentralityFocus::standard(Metric::Degree, Focus::Highest)),
            train: TrainConfig {
                local_epochs: epochs,
                ..TrainConfig::default()
            },
            rounds,
            eval_every: 1,
            master_seed: 21,
            data: DataOptions {
                samples_per_class: Some(4),
                test_per_class: Some(5),
                eval_classes: None,
            },
            model: ModelOptions {
                hidden_dims: vec![12],
                ..ModelOptions::default()
            },
        }
    }

    fn node_states<'a>(ds: &'a LabeledDataset, plan: &'a PartitionPlan, params: &[MlpParams]) -> Vec<NodeState<'a>> {
        params
            .iter()
            .enumerate()
            .map(|(v, p)| NodeState {
                node_id: v,
                params: p.clone(),
                opt_state: OptimizerState::new(p),
                local: DatasetView {
                    dataset: ds,
                    indices: plan.indices(v),
                },
            })
            .collect()
    }

    fn plan_for(ds: &LabeledDataset, n: usize) -> PartitionPlan {
        let g = Graph::new(n);
        let mut s = CentralityFocus::standard(Metric::Degree, Focus::Highest);
        s.fraction = 1.0;
        build_centrality_partition(&g, ds, &s, Some(3), 1).unwrap()
    }

    #[test]
    fn zero_epoch_round_on_complete_graph_averages_everyone() {
        let ds = synthetic_digits(20, 1);
        let n = 4;
        let plan = plan_for(&ds, n);
        let params: Vec<MlpParams> = (0..n).map(|v| init_mlp(&[784, 6, 10], v as u64).unwrap()).collect();
        let mut states = node_states(&ds, &plan, &params);
        let g = Graph::from_edges(n, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let cfg = small_config(GraphKind::Ba { m: 1 }, n, 1, 0);
        run_round(&mut states, &g, &cfg, 1).unwrap();
        let mut mean = params[0].zeros_like();
        for p in &params {
            mean.add_scaled(0.25, p);
        }
        for s in &states {
            let diff = s.params.flat_values().zip(mean.flat_values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(diff < 1e-12);
        }
        assert_eq!(states[1].params, states[2].params);
    }

    #[test]
    fn identical_pair_stays_fixed() {
        let ds = synthetic_digits(20, 1);
        let plan = plan_for(&ds, 2);
        let p = init_mlp(&[784, 6, 10], 9).unwrap();
        let mut states = node_states(&ds, &plan, &[p.clone(), p.clone()]);
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let cfg = small_config(GraphKind::Ba { m: 1 }, 2, 5, 0);
        for t in 1..=5 {
            run_round(&mut states, &g, &cfg, t).unwrap();
        }
        assert!(states.iter().all(|s| s.params == p));
        assert!(run_round(&mut states, &g, &cfg, 0).is_err());
    }

    #[test]
    fn processing_order_does_not_matter() {
        let ds = synthetic_digits(20, 1);
        let n = 5;
        let plan = plan_for(&ds, n);
        let params: Vec<MlpParams> = (0..n).map(|v| init_mlp(&[784, 6, 10], 40 + v as u64).unwrap()).collect();
        let g = Graph::from_edges(n, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (1, 3)]).unwrap();
        let cfg = small_config(GraphKind::Ba { m: 1 }, n, 1, 2);

        let mut engine = node_states(&ds, &plan, &params);
        run_round(&mut engine, &g, &cfg, 1).unwrap();

        // sequential, reverse order, reading only the frozen snapshot
        let mut manual = node_states(&ds, &plan, &params);
        let snaps: BTreeMap<usize, Snapshot> = manual
            .iter()
            .map(|s| {
                (
                    s.node_id,
                    Snapshot {
                        params: s.params.clone(),
                        dataset_size: s.dataset_size(),
                    },
                )
            })
            .collect();
        for s in manual.iter_mut().rev() {
            s.params = aggregate(s.node_id, &snaps, &g).unwrap();
            train_local(&mut s.params, &mut s.opt_state, &s.local, &cfg.train_for(s.node_id, 1)).unwrap();
        }
        for (a, b) in engine.iter().zip(&manual) {
            assert_eq!(a.params, b.params);
            assert_eq!(a.opt_state, b.opt_state);
        }
    }

    #[test]
    fn edgeless_graph_matches_standalone_training() {
        let train = synthetic_digits(30, 1);
        let test = synthetic_digits(6, 2);
        let cfg = small_config(GraphKind::ErGnm { edge_count: 0 }, 6, 3, 1);
        let out = run_experiment(&cfg, &train, &test).unwrap();

        let dims = vec![784, 12, 10];
        let idx = test.balanced_indices(&(0..10).collect::<Vec<_>>(), Some(5)).unwrap();
        let (tx, ty) = test.gather(&idx);
        for v in 0..6 {
            let mut p = init_mlp(&dims, derive_seed(21, Stream::Init, v as u64)).unwrap();
            let mut s = OptimizerState::new(&p);
            let view = DatasetView {
                dataset: &train,
                indices: out.plan.indices(v),
            };
            let mut curve = Vec::new();
            for round in 0..=3 {
                train_local(&mut p, &mut s, &view, &cfg.train_for(v, round)).unwrap();
                curve.push(evaluate(&p, tx.view(), &ty, None).unwrap().accuracy);
            }
            assert_eq!(out.timeline.node_curve(v), curve, "node {v}");
        }
    }

    #[test]
    fn experiment_is_deterministic_and_well_formed() {
        let train = synthetic_digits(40, 4);
        let test = synthetic_digits(5, 5);
        let mut cfg = small_config(GraphKind::Ba { m: 2 }, 10, 4, 1);
        cfg.eval_every = 3;
        let a = run_experiment(&cfg, &train, &test).unwrap();
        let b = run_experiment(&cfg, &train, &test).unwrap();
        assert_eq!(a.timeline, b.timeline);
        assert_eq!(a.timeline.rounds, vec![0, 3, 4]);
        assert_eq!(a.timeline.node_count(), 10);
        assert_eq!(a.final_confusions.len(), 10);
        for conf in &a.final_confusions {
            assert_eq!(conf.iter().flatten().sum::<u64>(), 50);
        }
        assert_eq!(a.plan.g2_nodes.len(), 1);
    }

    #[test]
    fn rounds_zero_records_only_local_training() {
        let train = synthetic_digits(20, 4);
        let test = synthetic_digits(5, 5);
        let cfg = small_config(GraphKind::Ba { m: 2 }, 10, 0, 1);
        let out = run_experiment(&cfg, &train, &test).unwrap();
        assert_eq!(out.timeline.rounds, vec![0]);
    }

    #[test]
    fn configuration_errors_surface_early() {
        let train = synthetic_digits(3, 4);
        let test = synthetic_digits(5, 5);
        let mut cfg = small_config(GraphKind::Ba { m: 2 }, 10, 1, 1);
        cfg.data.samples_per_class = None;
        // 3 samples of a G1 class cannot be shared among 10 nodes
        assert!(matches!(run_experiment(&cfg, &train, &test), Err(Error::Configuration(_))));

        let mut cfg = small_config(GraphKind::Ba { m: 2 }, 10, 1, 1);
        cfg.strategy = DistributionStrategy::CommunityClasses(CommunityClasses::standard());
        assert!(matches!(cfg.validate(), Err(Error::Configuration(_))));

        let mut cfg = small_config(GraphKind::Ba { m: 2 }, 10, 1, 1);
        cfg.train.momentum = 1.5;
        assert!(cfg.validate().is_err());
    }
}
