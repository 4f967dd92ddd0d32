//! Post-processing of finished runs: subset curves, community tables and
//! neighbourhood groupings. Everything here works from serialized outputs.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dataset::NUM_CLASSES;
use crate::output::RunArtifacts;
use crate::protocol::{Confusion, Timeline};
use crate::topology::Graph;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetCurve {
    pub subset: String,
    pub rounds: Vec<usize>,
    pub mean: Vec<f64>,
    /// Population standard deviation.
    pub std: Vec<f64>,
}

/// Mean and population std over `nodes` at each evaluated round.
pub fn subset_stats(timeline: &Timeline, nodes: &[usize], label: &str) -> Result<SubsetCurve> {
    if nodes.is_empty() {
        return Err(Error::Parameter(format!("subset {label:?} is empty")));
    }
    let n = timeline.node_count();
    if let Some(&v) = nodes.iter().find(|&&v| v >= n) {
        return Err(Error::Parameter(format!("node {v} is not in the timeline ({n} nodes)")));
    }
    let k = nodes.len() as f64;
    let (mut mean, mut std) = (Vec::new(), Vec::new());
    for row in &timeline.accuracy {
        let m = nodes.iter().map(|&v| row[v]).sum::<f64>() / k;
        let var = nodes.iter().map(|&v| (row[v] - m).powi(2)).sum::<f64>() / k;
        mean.push(m);
        std.push(var.sqrt());
    }
    Ok(SubsetCurve {
        subset: label.to_string(),
        rounds: timeline.rounds.clone(),
        mean,
        std,
    })
}

/// Community by class matrix of mean recall.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassAccuracy {
    pub values: Vec<[f64; NUM_CLASSES]>,
    /// `(community, class)` pairs whose members saw no test samples of the
    /// class; the matching entry is 0.
    pub empty_classes: Vec<(usize, usize)>,
}

impl ClassAccuracy {
    pub fn mean_over(&self, community: usize, classes: &[usize]) -> f64 {
        classes.iter().map(|&c| self.values[community][c]).sum::<f64>() / classes.len() as f64
    }
}

pub fn community_count(communities: &[usize]) -> usize {
    communities.iter().max().map_or(0, |&c| c + 1)
}

/// Averages each member's per-class recall within its community.
pub fn community_class_accuracy(confusions: &[Confusion], communities: &[usize]) -> Result<ClassAccuracy> {
    if confusions.len() != communities.len() {
        return Err(Error::Parameter(format!(
            "{} confusion matrices for {} nodes",
            confusions.len(),
            communities.len()
        )));
    }
    let k = community_count(communities);
    let mut sums = vec![[0.0; NUM_CLASSES]; k];
    let mut members = vec![0usize; k];
    let mut empty = BTreeSet::new();
    for (conf, &c) in confusions.iter().zip(communities) {
        members[c] += 1;
        for (class, row) in conf.iter().enumerate() {
            let total: u64 = row.iter().sum();
            if total == 0 {
                empty.insert((c, class));
            } else {
                sums[c][class] += row[class] as f64 / total as f64;
            }
        }
    }
    for (row, &m) in sums.iter_mut().zip(&members) {
        if m > 0 {
            row.iter_mut().for_each(|x| *x /= m as f64);
        }
    }
    Ok(ClassAccuracy {
        values: sums,
        empty_classes: empty.into_iter().collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityLinks {
    /// Symmetric cross-community edge counts; the diagonal is zero.
    pub pairs: Vec<Vec<usize>>,
    /// Edges leaving each community.
    pub outward: Vec<usize>,
    /// Edges inside each community.
    pub intra: Vec<usize>,
}

pub fn inter_community_edges(g: &Graph, communities: &[usize]) -> CommunityLinks {
    let k = community_count(communities);
    let mut links = CommunityLinks {
        pairs: vec![vec![0; k]; k],
        outward: vec![0; k],
        intra: vec![0; k],
    };
    for (i, j) in g.edges() {
        let (a, b) = (communities[i], communities[j]);
        if a == b {
            links.intra[a] += 1;
        } else {
            links.pairs[a][b] += 1;
            links.pairs[b][a] += 1;
            links.outward[a] += 1;
            links.outward[b] += 1;
        }
    }
    links
}

/// Number of G2 neighbours for every node outside `g2_nodes`.
pub fn g2_link_histogram(g: &Graph, g2_nodes: &BTreeSet<usize>) -> BTreeMap<usize, usize> {
    (0..g.node_count())
        .filter(|v| !g2_nodes.contains(v))
        .map(|v| (v, g.neighbors(v).iter().filter(|u| g2_nodes.contains(u)).count()))
        .collect()
}

/// Members of `subset` whose degree reaches the nearest-rank `q`-quantile of
/// the subset's degrees, taken as the `floor(q * n) + 1`-th smallest degree.
pub fn degree_percentile_flags(g: &Graph, subset: &[usize], q: f64) -> Result<BTreeSet<usize>> {
    if subset.is_empty() {
        return Err(Error::Parameter("degree percentile of an empty subset".into()));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Parameter(format!("quantile {q} outside (0, 1)")));
    }
    let mut degrees: Vec<usize> = subset.iter().map(|&v| g.degree(v)).collect();
    degrees.sort_unstable();
    let rank = ((q * degrees.len() as f64).floor() as usize + 1).min(degrees.len());
    let threshold = degrees[rank - 1];
    Ok(subset.iter().copied().filter(|&v| g.degree(v) >= threshold).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundClassAccuracy {
    pub round: usize,
    pub accuracy: ClassAccuracy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityReport {
    pub community_classes: BTreeMap<usize, Vec<usize>>,
    /// Class accuracy after the last evaluated round.
    pub per_class_accuracy: ClassAccuracy,
    pub by_round: Vec<RoundClassAccuracy>,
    pub external_links: CommunityLinks,
    pub mean_curves: Vec<SubsetCurve>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupReport {
    pub quantile: f64,
    pub g2_link_count: BTreeMap<usize, usize>,
    pub degree_flag: BTreeSet<usize>,
}

pub fn community_report(run: &RunArtifacts) -> Result<CommunityReport> {
    let communities = run
        .plan
        .communities()
        .ok_or_else(|| Error::Configuration("run does not use a community plan".into()))?;
    let community_classes = match &run.plan.class_groups {
        crate::dataset::ClassGroups::Community { community_to_classes } => community_to_classes.clone(),
        crate::dataset::ClassGroups::Centrality { .. } => {
            return Err(Error::Configuration("plan has centrality class groups".into()))
        }
    };
    let by_round = run
        .timeline
        .rounds
        .iter()
        .zip(&run.confusions)
        .map(|(&round, conf)| {
            Ok(RoundClassAccuracy {
                round,
                accuracy: community_class_accuracy(conf, &communities)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let per_class_accuracy = by_round
        .last()
        .map(|r| r.accuracy.clone())
        .ok_or_else(|| Error::Configuration("timeline is empty".into()))?;
    let mean_curves = (0..community_count(&communities))
        .map(|c| {
            let nodes: Vec<usize> = (0..communities.len()).filter(|&v| communities[v] == c).collect();
            subset_stats(&run.timeline, &nodes, &format!("community {c}"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CommunityReport {
        community_classes,
        per_class_accuracy,
        by_round,
        external_links: inter_community_edges(&run.graph, &communities),
        mean_curves,
    })
}

pub fn group_report(run: &RunArtifacts, quantile: f64) -> Result<GroupReport> {
    let g1: Vec<usize> = (0..run.graph.node_count())
        .filter(|v| !run.plan.g2_nodes.contains(v))
        .collect();
    Ok(GroupReport {
        quantile,
        g2_link_count: g2_link_histogram(&run.graph, &run.plan.g2_nodes),
        degree_flag: degree_percentile_flags(&run.graph, &g1, quantile)?,
    })
}

pub fn write_subset_stats<W: Write>(curves: &[SubsetCurve], mut out: W) -> Result<()> {
    writeln!(out, "round,mean,std,subset")?;
    for c in curves {
        for ((r, m), s) in c.rounds.iter().zip(&c.mean).zip(&c.std) {
            writeln!(out, "{r},{m},{s},{}", c.subset)?;
        }
    }
    Ok(())
}
