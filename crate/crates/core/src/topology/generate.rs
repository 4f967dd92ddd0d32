use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Graph;
use crate::seeds::seeded_rng;
use crate::{Error, Result};

/// Random-graph family and its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphKind {
    /// Barabási–Albert preferential attachment, `m` edges per arrival.
    Ba { m: usize },
    /// Erdős–Rényi G(n, p).
    ErGnp { p: f64 },
    /// Erdős–Rényi G(n, M): exactly `edge_count` uniformly chosen edges.
    ErGnm { edge_count: usize },
    /// Stochastic block model with block-contiguous node ids.
    Sbm {
        block_sizes: Vec<usize>,
        p_intra: f64,
        p_inter: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSpec {
    #[serde(flatten)]
    pub kind: GraphKind,
    pub node_count: usize,
    pub seed: u64,
}

impl GraphSpec {
    pub fn validate(&self) -> Result<()> {
        let n = self.node_count;
        if n == 0 {
            return Err(Error::Parameter("node_count must be positive".into()));
        }
        match &self.kind {
            GraphKind::Ba { m } => {
                if *m < 1 || *m >= n {
                    return Err(Error::Parameter(format!("BA requires 1 <= m < n, got m={m}, n={n}")));
                }
            }
            GraphKind::ErGnp { p } => check_probability("p", *p)?,
            GraphKind::ErGnm { edge_count } => {
                if *edge_count > max_edges(n) {
                    return Err(Error::Parameter(format!(
                        "edge_count {edge_count} exceeds {} for n={n}",
                        max_edges(n)
                    )));
                }
            }
            GraphKind::Sbm {
                block_sizes,
                p_intra,
                p_inter,
            } => {
                if block_sizes.is_empty() || block_sizes.contains(&0) {
                    return Err(Error::Parameter("SBM needs a nonempty list of positive block sizes".into()));
                }
                if block_sizes.iter().sum::<usize>() != n {
                    return Err(Error::Parameter(format!(
                        "SBM block sizes sum to {}, expected node_count {n}",
                        block_sizes.iter().sum::<usize>()
                    )));
                }
                check_probability("p_intra", *p_intra)?;
                check_probability("p_inter", *p_inter)?;
            }
        }
        Ok(())
    }

    pub fn generate(&self) -> Result<Graph> {
        self.validate()?;
        match &self.kind {
            GraphKind::Ba { m } => generate_ba(self.node_count, *m, self.seed),
            GraphKind::ErGnp { p } => generate_er_gnp(self.node_count, *p, self.seed),
            GraphKind::ErGnm { edge_count } => generate_er_gnm(self.node_count, *edge_count, self.seed),
            GraphKind::Sbm {
                block_sizes,
                p_intra,
                p_inter,
            } => generate_sbm(block_sizes, *p_intra, *p_inter, self.seed),
        }
    }

    /// Block id per node for SBM specs; `None` for the other families.
    pub fn communities(&self) -> Option<Vec<usize>> {
        match &self.kind {
            GraphKind::Sbm { block_sizes, .. } => Some(
                block_sizes
                    .iter()
                    .enumerate()
                    .flat_map(|(b, &size)| std::iter::repeat(b).take(size))
                    .collect(),
            ),
            _ => None,
        }
    }

    /// The G(n, M) spec with the same node and edge count as this BA spec.
    pub fn idempotent_er(&self, seed: u64) -> Result<GraphSpec> {
        match self.kind {
            GraphKind::Ba { m } => {
                self.validate()?;
                Ok(GraphSpec {
                    kind: GraphKind::ErGnm {
                        edge_count: m * (self.node_count - m),
                    },
                    node_count: self.node_count,
                    seed,
                })
            }
            _ => Err(Error::Parameter("idempotent ER is defined for BA specs only".into())),
        }
    }
}

fn max_edges(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} must lie in [0, 1], got {p}")))
    }
}

/// Barabási–Albert graph grown from `m` isolated seed nodes.
///
/// Each of the `n - m` arrivals attaches to `m` distinct existing nodes drawn
/// from an urn holding every edge endpoint once, i.e. proportionally to
/// degree. The first arrival finds an empty urn and connects to all seed
/// nodes. The result has exactly `m * (n - m)` edges.
pub fn generate_ba(n: usize, m: usize, seed: u64) -> Result<Graph> {
    if m < 1 || m >= n {
        return Err(Error::Parameter(format!("BA requires 1 <= m < n, got m={m}, n={n}")));
    }
    let mut rng = seeded_rng(seed);
    let mut g = Graph::new(n);
    let mut urn: Vec<usize> = Vec::with_capacity(2 * m * (n - m));
    let mut targets: Vec<usize> = Vec::with_capacity(m);
    for v in m..n {
        targets.clear();
        if urn.is_empty() {
            targets.extend(0..m);
        } else {
            while targets.len() < m {
                let t = urn[rng.random_range(0..urn.len())];
                if !targets.contains(&t) {
                    targets.push(t);
                }
            }
        }
        for &t in &targets {
            g.add_edge(v, t)?;
            urn.push(t);
            urn.push(v);
        }
    }
    Ok(g)
}

/// Uniform G(n, M) sample: `edge_count` distinct pairs out of all `n(n-1)/2`.
pub fn generate_er_gnm(n: usize, edge_count: usize, seed: u64) -> Result<Graph> {
    let total = max_edges(n);
    if edge_count > total {
        return Err(Error::Parameter(format!(
            "edge_count {edge_count} exceeds {total} for n={n}"
        )));
    }
    let mut rng = seeded_rng(seed);
    let mut picks = index::sample(&mut rng, total, edge_count).into_vec();
    picks.sort_unstable();
    Graph::from_edges(n, picks.into_iter().map(|k| pair_from_index(n, k)))
}

/// Inverse of the row-major enumeration of pairs `(i, j)`, `i < j`.
fn pair_from_index(n: usize, mut k: usize) -> (usize, usize) {
    let mut i = 0;
    loop {
        let row = n - 1 - i;
        if k < row {
            return (i, i + 1 + k);
        }
        k -= row;
        i += 1;
    }
}

pub fn generate_er_gnp(n: usize, p: f64, seed: u64) -> Result<Graph> {
    check_probability("p", p)?;
    let mut rng = seeded_rng(seed);
    let mut g = Graph::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < p {
                g.add_edge(i, j)?;
            }
        }
    }
    Ok(g)
}

pub fn generate_sbm(block_sizes: &[usize], p_intra: f64, p_inter: f64, seed: u64) -> Result<Graph> {
    if block_sizes.is_empty() {
        return Err(Error::Parameter("SBM needs at least one block".into()));
    }
    if block_sizes.contains(&0) {
        return Err(Error::Parameter("SBM block sizes must be positive".into()));
    }
    check_probability("p_intra", p_intra)?;
    check_probability("p_inter", p_inter)?;
    let block: Vec<usize> = block_sizes
        .iter()
        .enumerate()
        .flat_map(|(b, &size)| std::iter::repeat(b).take(size))
        .collect();
    let n = block.len();
    let mut rng = seeded_rng(seed);
    let mut g = Graph::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let p = if block[i] == block[j] { p_intra } else { p_inter };
            if rng.random::<f64>() < p {
                g.add_edge(i, j)?;
            }
        }
    }
    Ok(g)
}

/// Connectivity threshold ln(n)/n of G(n, p).
pub fn critical_p(n: usize) -> f64 {
    let n = n as f64;
    n.ln() / n
}
