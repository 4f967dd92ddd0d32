//! Assignment of training samples to nodes.
//!
//! Two strategies: centrality focus (every node gets an equal share of the
//! G1 classes, only a focus set chosen by a centrality metric gets the G2
//! classes) and community classes (each community sees its own class set).
//! Shares are disjoint across nodes; remainders of uneven division are
//! dropped.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use serde::{Deserialize, Serialize};

use super::{LabeledDataset, NUM_CLASSES};
use crate::seeds::{rng_for, Stream};
use crate::topology::{betweenness_centrality, clustering_coefficients, degree_sequence, Graph};
use crate::{Error, Result};

/// Values closer than this are treated as tied when choosing focus nodes.
const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Degree,
    Betweenness,
    Clustering,
}

impl Metric {
    pub fn values(self, g: &Graph) -> Vec<f64> {
        match self {
            Metric::Degree => degree_sequence(g).into_iter().map(|d| d as f64).collect(),
            Metric::Betweenness => betweenness_centrality(g),
            Metric::Clustering => clustering_coefficients(g),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Focus {
    Highest,
    Lowest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralityFocus {
    pub metric: Metric,
    pub focus: Focus,
    pub fraction: f64,
    pub g1_classes: Vec<usize>,
    pub g2_classes: Vec<usize>,
}

impl CentralityFocus {
    /// Classes 0-4 everywhere, 5-9 on the 10% focus set.
    pub fn standard(metric: Metric, focus: Focus) -> Self {
        Self {
            metric,
            focus,
            fraction: 0.1,
            g1_classes: (0..5).collect(),
            g2_classes: (5..10).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fraction > 0.0 && self.fraction <= 1.0) {
            return Err(Error::Configuration(format!(
                "fraction must lie in (0, 1], got {}",
                self.fraction
            )));
        }
        check_classes(self.g1_classes.iter().chain(&self.g2_classes))?;
        let g1: BTreeSet<_> = self.g1_classes.iter().collect();
        if let Some(c) = self.g2_classes.iter().find(|c| g1.contains(c)) {
            return Err(Error::Configuration(format!("class {c} is in both g1_classes and g2_classes")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityClasses {
    #[serde(with = "pairs")]
    pub community_to_classes: BTreeMap<usize, Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub swap: Option<Vec<usize>>,
}

impl CommunityClasses {
    /// Four communities seeing classes {0,1}, {2,3}, {4,5}, {6,7}.
    pub fn standard() -> Self {
        Self {
            community_to_classes: (0..4).map(|c| (c, vec![2 * c, 2 * c + 1])).collect(),
            swap: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
        for (&community, classes) in &self.community_to_classes {
            check_classes(classes.iter())?;
            for &c in classes {
                if let Some(prev) = owner.insert(c, community) {
                    if prev != community {
                        return Err(Error::Configuration(format!(
                            "class {c} assigned to communities {prev} and {community}"
                        )));
                    }
                }
            }
        }
        if let Some(perm) = &self.swap {
            apply_community_swap(&CommunityClasses { swap: None, ..self.clone() }, perm)?;
        }
        Ok(())
    }

    /// Mapping after applying `swap`, if any.
    pub fn effective_mapping(&self) -> Result<BTreeMap<usize, Vec<usize>>> {
        match &self.swap {
            None => Ok(self.community_to_classes.clone()),
            Some(perm) => Ok(apply_community_swap(&CommunityClasses { swap: None, ..self.clone() }, perm)?
                .community_to_classes),
        }
    }

    /// Union of all classes seen by some community, ascending.
    pub fn used_classes(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.community_to_classes.values().flatten().copied().collect();
        set.into_iter().collect()
    }
}

fn check_classes<'a>(classes: impl Iterator<Item = &'a usize>) -> Result<()> {
    let mut seen = BTreeSet::new();
    for &c in classes {
        if c >= NUM_CLASSES {
            return Err(Error::Configuration(format!("class {c} outside 0..{NUM_CLASSES}")));
        }
        if !seen.insert(c) {
            return Err(Error::Configuration(format!("class {c} listed twice")));
        }
    }
    Ok(())
}

/// Integer-keyed maps as `[key, value]` pairs, which survive internally
/// tagged enums in JSON.
mod pairs {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(map: &BTreeMap<usize, Vec<usize>>, s: S) -> Result<S::Ok, S::Error> {
        map.iter().collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<usize, Vec<usize>>, D::Error> {
        Ok(Vec::<(usize, Vec<usize>)>::deserialize(d)?.into_iter().collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistributionStrategy {
    CentralityFocus(CentralityFocus),
    CommunityClasses(CommunityClasses),
}

/// Re-keys the class mapping: classes of community `c` move to `permutation[c]`.
pub fn apply_community_swap(strategy: &CommunityClasses, permutation: &[usize]) -> Result<CommunityClasses> {
    let mut sorted = permutation.to_vec();
    sorted.sort_unstable();
    if sorted.iter().enumerate().any(|(i, &p)| i != p) {
        return Err(Error::Configuration(format!("swap {permutation:?} is not a bijection")));
    }
    if let Some(&c) = strategy.community_to_classes.keys().find(|&&c| c >= permutation.len()) {
        return Err(Error::Configuration(format!("swap does not cover community {c}")));
    }
    Ok(CommunityClasses {
        community_to_classes: strategy
            .community_to_classes
            .iter()
            .map(|(&c, classes)| (permutation[c], classes.clone()))
            .collect(),
        swap: strategy.swap.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeRole {
    G1,
    G2,
    Community(usize),
}

impl fmt::Display for NodeRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeRole::G1 => f.write_str("G1"),
            NodeRole::G2 => f.write_str("G2"),
            NodeRole::Community(c) => write!(f, "C{c}"),
        }
    }
}

impl FromStr for NodeRole {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "G1" => Ok(NodeRole::G1),
            "G2" => Ok(NodeRole::G2),
            _ => s
                .strip_prefix('C')
                .and_then(|c| c.parse().ok())
                .map(NodeRole::Community)
                .ok_or_else(|| Error::format("role", format!("unknown role `{s}`"))),
        }
    }
}

impl Serialize for NodeRole {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for NodeRole {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassGroups {
    Centrality {
        g1_classes: Vec<usize>,
        g2_classes: Vec<usize>,
    },
    Community {
        #[serde(with = "pairs")]
        community_to_classes: BTreeMap<usize, Vec<usize>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionPlan {
    /// Node id to ascending sample indices.
    pub per_node_indices: BTreeMap<usize, Vec<usize>>,
    pub g2_nodes: BTreeSet<usize>,
    /// Role per node, indexed by node id.
    pub node_roles: Vec<NodeRole>,
    pub class_groups: ClassGroups,
}

impl PartitionPlan {
    pub fn node_count(&self) -> usize {
        self.node_roles.len()
    }

    pub fn indices(&self, node: usize) -> &[usize] {
        self.per_node_indices.get(&node).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn nodes_with_role(&self, role: NodeRole) -> Vec<usize> {
        (0..self.node_count()).filter(|&v| self.node_roles[v] == role).collect()
    }

    /// Community id per node for community plans.
    pub fn communities(&self) -> Option<Vec<usize>> {
        self.node_roles
            .iter()
            .map(|r| match r {
                NodeRole::Community(c) => Some(*c),
                _ => None,
            })
            .collect()
    }
}

/// Picks `round(fraction * n)` nodes with the most extreme values.
///
/// Nodes strictly beyond the boundary value are always taken; nodes tied at
/// the boundary are sampled uniformly without replacement to fill the quota.
pub fn select_focus_nodes(values: &[f64], fraction: f64, focus: Focus, seed: u64) -> BTreeSet<usize> {
    let n = values.len();
    let k = ((fraction * n as f64).round() as usize).min(n);
    if k == 0 {
        return BTreeSet::new();
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| match focus {
        Focus::Highest => values[b].total_cmp(&values[a]),
        Focus::Lowest => values[a].total_cmp(&values[b]),
    });
    let boundary = values[order[k - 1]];
    let better = |v: f64| match focus {
        Focus::Highest => v > boundary + TIE_TOLERANCE,
        Focus::Lowest => v < boundary - TIE_TOLERANCE,
    };
    let mut chosen: BTreeSet<usize> = (0..n).filter(|&v| better(values[v])).collect();
    let tied: Vec<usize> = (0..n)
        .filter(|&v| !better(values[v]) && (values[v] - boundary).abs() <= TIE_TOLERANCE)
        .collect();
    let need = k - chosen.len();
    let mut rng = rng_for(seed, Stream::FocusTies, 0);
    chosen.extend(index::sample(&mut rng, tied.len(), need).into_iter().map(|i| tied[i]));
    chosen
}

/// Shuffles one class's samples and deals equal disjoint chunks to
/// `recipients` (in the given order), optionally capped per recipient.
fn deal_class(
    class: usize,
    class_samples: &[usize],
    recipients: &[usize],
    cap: Option<usize>,
    seed: u64,
    plan: &mut BTreeMap<usize, Vec<usize>>,
) -> Result<()> {
    if recipients.is_empty() {
        return Ok(());
    }
    let mut share = class_samples.len() / recipients.len();
    if let Some(cap) = cap {
        share = share.min(cap);
    }
    if share == 0 {
        return Err(Error::Configuration(format!(
            "class {class} has {} samples for {} recipients",
            class_samples.len(),
            recipients.len()
        )));
    }
    let mut shuffled = class_samples.to_vec();
    shuffled.shuffle(&mut rng_for(seed, Stream::Partition, class as u64));
    for (chunk, &node) in shuffled.chunks_exact(share).zip(recipients) {
        plan.entry(node).or_default().extend_from_slice(chunk);
    }
    Ok(())
}

fn finish(mut per_node: BTreeMap<usize, Vec<usize>>, n: usize) -> BTreeMap<usize, Vec<usize>> {
    for v in 0..n {
        per_node.entry(v).or_default().sort_unstable();
    }
    per_node
}

/// Centrality-focus plan: G1 classes dealt to every node, G2 classes dealt
/// only to the focus set selected by `strategy.metric`.
pub fn build_centrality_partition(
    g: &Graph,
    ds: &LabeledDataset,
    strategy: &CentralityFocus,
    samples_per_class: Option<usize>,
    seed: u64,
) -> Result<PartitionPlan> {
    strategy.validate()?;
    let n = g.node_count();
    let values = strategy.metric.values(g);
    let g2_nodes = select_focus_nodes(&values, strategy.fraction, strategy.focus, seed);
    let by_class = ds.class_indices();

    let everyone: Vec<usize> = (0..n).collect();
    let focus: Vec<usize> = g2_nodes.iter().copied().collect();
    let mut per_node = BTreeMap::new();
    for &c in &strategy.g1_classes {
        deal_class(c, &by_class[c], &everyone, samples_per_class, seed, &mut per_node)?;
    }
    for &c in &strategy.g2_classes {
        deal_class(c, &by_class[c], &focus, samples_per_class, seed, &mut per_node)?;
    }
    let node_roles = (0..n)
        .map(|v| if g2_nodes.contains(&v) { NodeRole::G2 } else { NodeRole::G1 })
        .collect();
    Ok(PartitionPlan {
        per_node_indices: finish(per_node, n),
        g2_nodes,
        node_roles,
        class_groups: ClassGroups::Centrality {
            g1_classes: strategy.g1_classes.clone(),
            g2_classes: strategy.g2_classes.clone(),
        },
    })
}

/// Community plan: each community's classes are dealt among its members only.
pub fn build_community_partition(
    communities: &[usize],
    ds: &LabeledDataset,
    strategy: &CommunityClasses,
    samples_per_class: Option<usize>,
    seed: u64,
) -> Result<PartitionPlan> {
    strategy.validate()?;
    let mapping = strategy.effective_mapping()?;
    if let Some(c) = communities.iter().find(|c| !mapping.contains_key(c)) {
        return Err(Error::Configuration(format!("community {c} has no class assignment")));
    }
    let by_class = ds.class_indices();
    let mut per_node = BTreeMap::new();
    for (&community, classes) in &mapping {
        let members: Vec<usize> = (0..communities.len()).filter(|&v| communities[v] == community).collect();
        for &c in classes {
            deal_class(c, &by_class[c], &members, samples_per_class, seed, &mut per_node)?;
        }
    }
    Ok(PartitionPlan {
        per_node_indices: finish(per_node, communities.len()),
        g2_nodes: BTreeSet::new(),
        node_roles: communities.iter().map(|&c| NodeRole::Community(c)).collect(),
        class_groups: ClassGroups::Community {
            community_to_classes: mapping,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::synthetic_digits;
    use crate::topology::{generate_ba, Graph};

    fn labels_of(ds: &LabeledDataset, idx: &[usize]) -> BTreeSet<usize> {
        idx.iter().map(|&i| ds.label(i)).collect()
    }

    #[test]
    fn focus_on_distinct_values() {
        let values: Vec<f64> = (0..100).map(|v| v as f64).collect();
        let top = select_focus_nodes(&values, 0.1, Focus::Highest, 1);
        assert_eq!(top, (90..100).collect());
        let bottom = select_focus_nodes(&values, 0.1, Focus::Lowest, 1);
        assert_eq!(bottom, (0..10).collect());
    }

    #[test]
    fn full_fraction_takes_everyone() {
        let values = vec![3.0, 1.0, 2.0, 2.0];
        assert_eq!(select_focus_nodes(&values, 1.0, Focus::Lowest, 5).len(), 4);
    }

    #[test]
    fn ties_are_filled_from_the_boundary_only() {
        // 5 is strictly highest; three nodes tie at 4 for the remaining two slots
        let values = vec![1.0, 4.0, 5.0, 4.0, 4.0, 0.0, 1.0, 1.0, 1.0, 1.0];
        for seed in 0..30 {
            let s = select_focus_nodes(&values, 0.3, Focus::Highest, seed);
            assert_eq!(s.len(), 3);
            assert!(s.contains(&2));
            assert!(s.iter().all(|v| [1, 2, 3, 4].contains(v)));
        }
    }

    #[test]
    fn tied_selection_is_uniform() {
        // all 120 three-subsets of 10 equal nodes should be equally likely
        let values = vec![0.5; 10];
        let draws = 3000u64;
        let mut counts: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
        for seed in 0..draws {
            let s = select_focus_nodes(&values, 0.3, Focus::Highest, seed);
            assert_eq!(s, select_focus_nodes(&values, 0.3, Focus::Highest, seed));
            *counts.entry(s.into_iter().collect()).or_default() += 1;
        }
        let cells = 120.0;
        let expected = draws as f64 / cells;
        let chi2: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum::<f64>()
            + (cells - counts.len() as f64) * expected;
        // chi-square critical value for 119 dof at p = 0.01
        assert!(chi2 < 158.95, "chi2 = {chi2}");
    }

    #[test]
    fn centrality_plan_shares() {
        let g = generate_ba(20, 2, 4).unwrap();
        let ds = synthetic_digits(43, 1);
        let strategy = CentralityFocus::standard(Metric::Degree, Focus::Highest);
        let plan = build_centrality_partition(&g, &ds, &strategy, None, 9).unwrap();
        assert_eq!(plan.g2_nodes.len(), 2);
        let degrees = degree_sequence(&g);
        let min_focus = plan.g2_nodes.iter().map(|&v| degrees[v]).min().unwrap();
        let max_other = (0..20).filter(|v| !plan.g2_nodes.contains(v)).map(|v| degrees[v]).max().unwrap();
        assert!(min_focus >= max_other);
        for v in 0..20 {
            let idx = plan.indices(v);
            let counts = idx.iter().fold([0usize; 10], |mut acc, &i| {
                acc[ds.label(i)] += 1;
                acc
            });
            // 43 samples over 20 nodes -> 2 each; over 2 focus nodes -> 21 each
            assert!(counts[..5].iter().all(|&c| c == 2));
            let g2 = if plan.g2_nodes.contains(&v) { 21 } else { 0 };
            assert!(counts[5..].iter().all(|&c| c == g2), "node {v}: {counts:?}");
            assert_eq!(plan.node_roles[v] == NodeRole::G2, plan.g2_nodes.contains(&v));
        }
    }

    #[test]
    fn hundred_nodes_floor_division() {
        // a class with 5923 samples over 100 nodes leaves 59 per node
        let mut plan = BTreeMap::new();
        let recipients: Vec<usize> = (0..100).collect();
        deal_class(0, &(0..5923).collect::<Vec<_>>(), &recipients, None, 1, &mut plan).unwrap();
        assert!(plan.values().all(|v| v.len() == 59));
        assert_eq!(plan.values().map(Vec::len).sum::<usize>(), 5923 - 23);
    }

    #[test]
    fn too_few_samples_is_a_configuration_error() {
        let g = generate_ba(30, 2, 1).unwrap();
        let ds = synthetic_digits(10, 1);
        let strategy = CentralityFocus::standard(Metric::Degree, Focus::Highest);
        assert!(matches!(
            build_centrality_partition(&g, &ds, &strategy, None, 1),
            Err(Error::Configuration(_))
        ));
    }

    #[test]
    fn full_focus_is_iid() {
        let g = generate_ba(10, 2, 1).unwrap();
        let ds = synthetic_digits(30, 1);
        let mut strategy = CentralityFocus::standard(Metric::Clustering, Focus::Lowest);
        strategy.fraction = 1.0;
        let plan = build_centrality_partition(&g, &ds, &strategy, None, 3).unwrap();
        for v in 0..10 {
            assert_eq!(labels_of(&ds, plan.indices(v)).len(), 10);
            assert_eq!(plan.indices(v).len(), 30);
        }
    }

    #[test]
    fn overlapping_groups_rejected() {
        let mut s = CentralityFocus::standard(Metric::Degree, Focus::Highest);
        s.g2_classes.push(0);
        assert!(s.validate().is_err());
        s = CentralityFocus::standard(Metric::Degree, Focus::Highest);
        s.fraction = 0.0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn community_plan_respects_class_sets() {
        let communities: Vec<usize> = (0..40).map(|v| v / 10).collect();
        let ds = synthetic_digits(50, 2);
        let plan = build_community_partition(&communities, &ds, &CommunityClasses::standard(), Some(4), 1).unwrap();
        for v in 0..40 {
            let c = communities[v];
            assert_eq!(labels_of(&ds, plan.indices(v)), [2 * c, 2 * c + 1].into_iter().collect());
            assert_eq!(plan.indices(v).len(), 8);
        }
        let all: BTreeSet<usize> = plan.per_node_indices.values().flatten().map(|&i| ds.label(i)).collect();
        assert!(!all.contains(&8) && !all.contains(&9));
        assert_eq!(plan.communities().unwrap(), communities);
        assert!(plan.g2_nodes.is_empty());
    }

    #[test]
    fn single_community_all_classes() {
        let communities = vec![0; 5];
        let ds = synthetic_digits(10, 2);
        let strategy = CommunityClasses {
            community_to_classes: [(0, (0..10).collect())].into_iter().collect(),
            swap: None,
        };
        let plan = build_community_partition(&communities, &ds, &strategy, None, 1).unwrap();
        assert!((0..5).all(|v| plan.indices(v).len() == 20));
    }

    #[test]
    fn community_errors() {
        let mut s = CommunityClasses::standard();
        s.community_to_classes.insert(1, vec![0, 3]);
        assert!(s.validate().is_err());
        let ds = synthetic_digits(10, 2);
        assert!(build_community_partition(&[0, 5], &ds, &CommunityClasses::standard(), None, 1).is_err());
    }

    #[test]
    fn swap_semantics() {
        let base = CommunityClasses::standard();
        let cycle = [1, 2, 3, 0];
        let swapped = apply_community_swap(&base, &cycle).unwrap();
        assert_eq!(swapped.community_to_classes[&1], vec![0, 1]);
        assert_eq!(swapped.community_to_classes[&0], vec![6, 7]);
        assert_eq!(apply_community_swap(&base, &[0, 1, 2, 3]).unwrap(), base);
        let mut s = base.clone();
        for _ in 0..4 {
            s = apply_community_swap(&s, &cycle).unwrap();
        }
        assert_eq!(s, base);
        assert!(apply_community_swap(&base, &[0, 0, 1, 2]).is_err());
        assert!(apply_community_swap(&base, &[1, 0]).is_err());

        let with_swap = CommunityClasses { swap: Some(cycle.to_vec()), ..base };
        let communities: Vec<usize> = (0..8).map(|v| v / 2).collect();
        let ds = synthetic_digits(10, 3);
        let plan = build_community_partition(&communities, &ds, &with_swap, None, 1).unwrap();
        assert_eq!(labels_of(&ds, plan.indices(2)), [0, 1].into_iter().collect());
    }

    #[test]
    fn plan_json_roundtrip_and_roles() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let ds = synthetic_digits(6, 1);
        let mut strategy = CentralityFocus::standard(Metric::Betweenness, Focus::Highest);
        strategy.fraction = 0.34;
        let plan = build_centrality_partition(&g, &ds, &strategy, None, 1).unwrap();
        assert_eq!(plan.g2_nodes, [1].into_iter().collect());
        let json = serde_json::to_string(&plan).unwrap();
        assert!(json.contains(r#""node_roles":["G1","G2","G1"]"#), "{json}");
        let back: PartitionPlan = serde_json::from_str(&json).unwrap();
        assert_eq!(back, plan);

        let strategy = DistributionStrategy::CommunityClasses(CommunityClasses::standard());
        let json = serde_json::to_string(&strategy).unwrap();
        assert_eq!(serde_json::from_str::<DistributionStrategy>(&json).unwrap(), strategy);
        let communities: Vec<usize> = (0..8).map(|v| v / 2).collect();
        let plan = build_community_partition(&communities, &ds, &CommunityClasses::standard(), None, 1).unwrap();
        let json = serde_json::to_string(&plan).unwrap();
        assert_eq!(serde_json::from_str::<PartitionPlan>(&json).unwrap(), plan);
        assert_eq!("C3".parse::<NodeRole>().unwrap(), NodeRole::Community(3));
        assert!("X".parse::<NodeRole>().is_err());
    }
}
