//! Decentralized averaging: each node replaces its model with a weighted
//! average over its closed neighbourhood, then trains locally.

mod engine;

use std::collections::BTreeMap;

use crate::neuralnet::{DatasetView, MlpParams, OptimizerState, Samples};
use crate::topology::Graph;
use crate::{Error, Result};

pub use engine::{
    run_experiment, run_round, Confusion, DataOptions, ExperimentConfig, ExperimentOutput, ModelOptions, Timeline,
};

/// One participant: its model, optimizer buffers and local data.
#[derive(Debug, Clone)]
pub struct NodeState<'a> {
    pub node_id: usize,
    pub params: MlpParams,
    pub opt_state: OptimizerState,
    pub local: DatasetView<'a>,
}

impl NodeState<'_> {
    pub fn dataset_size(&self) -> usize {
        self.local.len()
    }
}

/// What a node publishes to its neighbours at the end of a round.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub params: MlpParams,
    pub dataset_size: usize,
}

/// Mixing weights `c_ij` over the closed neighbourhood of `i`, ascending by
/// node id:
///
/// ```text
/// a_ij = |D_j| / sum_{k in N(i)} |D_k|
/// c_ij = w_ij a_ij / sum_{k in N(i)} w_ik a_ik
/// ```
///
/// where `w_ij` is the edge weight and `w_ii` the self weight. The weights
/// form a convex combination.
pub fn aggregation_coefficients(i: usize, dataset_sizes: &BTreeMap<usize, usize>, g: &Graph) -> Result<Vec<(usize, f64)>> {
    let mut hood: Vec<usize> = g.neighbors(i).to_vec();
    let pos = hood.binary_search(&i).unwrap_err();
    hood.insert(pos, i);

    let sizes = hood
        .iter()
        .map(|j| {
            dataset_sizes
                .get(j)
                .copied()
                .ok_or_else(|| Error::Protocol(format!("node {i}: no snapshot from neighbour {j}")))
        })
        .collect::<Result<Vec<usize>>>()?;
    let total: usize = sizes.iter().sum();
    if total == 0 {
        return Err(Error::Protocol(format!("node {i}: neighbourhood holds no data")));
    }
    let weighted: Vec<f64> = hood
        .iter()
        .zip(&sizes)
        .map(|(&j, &size)| {
            let omega = if j == i { g.self_weight(i) } else { g.edge_weight(i, j).unwrap_or(0.0) };
            omega * size as f64 / total as f64
        })
        .collect();
    let norm: f64 = weighted.iter().sum();
    Ok(hood.into_iter().zip(weighted.into_iter().map(|w| w / norm)).collect())
}

/// Neighbourhood average of the round-(t-1) snapshots for node `i`.
pub fn aggregate(i: usize, snapshots: &BTreeMap<usize, Snapshot>, g: &Graph) -> Result<MlpParams> {
    let sizes: BTreeMap<usize, usize> = g
        .neighbors(i)
        .iter()
        .chain(std::iter::once(&i))
        .filter_map(|j| snapshots.get(j).map(|s| (*j, s.dataset_size)))
        .collect();
    let coefficients = aggregation_coefficients(i, &sizes, g)?;
    let own = &snapshots[&i].params;
    let mut out = own.zeros_like();
    for (j, c) in coefficients {
        let params = &snapshots[&j].params;
        if !params.same_shape(own) {
            return Err(Error::Shape(format!("node {j} published a model of a different shape")));
        }
        out.add_scaled(c, params);
    }
    Ok(out)
}
