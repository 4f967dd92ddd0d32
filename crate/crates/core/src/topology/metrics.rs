use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{algebraic_connectivity, Graph};

/// Summary statistics of a graph. Path statistics cover the largest
/// connected component only; `connected` says whether that is the whole graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub node_count: usize,
    pub edge_count: usize,
    pub avg_degree: f64,
    pub density: f64,
    pub avg_clustering: f64,
    pub avg_shortest_path: f64,
    pub diameter: usize,
    pub algebraic_connectivity: f64,
    pub connected: bool,
}

pub fn degree_sequence(g: &Graph) -> Vec<usize> {
    (0..g.node_count()).map(|v| g.degree(v)).collect()
}

/// Brandes betweenness over unweighted shortest paths, normalised by
/// `(n-1)(n-2)/2` so values lie in `[0, 1]`.
pub fn betweenness_centrality(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    if n < 3 {
        return vec![0.0; n];
    }
    let per_source: Vec<Vec<f64>> = (0..n).into_par_iter().map(|s| brandes_source(g, s)).collect();
    let mut bc = vec![0.0; n];
    for delta in &per_source {
        for (b, d) in bc.iter_mut().zip(delta) {
            *b += d;
        }
    }
    // each unordered pair was counted from both endpoints
    let scale = 1.0 / ((n - 1) * (n - 2)) as f64;
    bc.iter_mut().for_each(|b| *b *= scale);
    bc
}

fn brandes_source(g: &Graph, s: usize) -> Vec<f64> {
    let n = g.node_count();
    let mut order = Vec::with_capacity(n);
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    sigma[s] = 1.0;
    dist[s] = 0;
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in g.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
            if dist[w] == dist[v] + 1 {
                sigma[w] += sigma[v];
                preds[w].push(v);
            }
        }
    }
    let mut delta = vec![0.0f64; n];
    while let Some(w) = order.pop() {
        for &v in &preds[w] {
            delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
        }
    }
    delta[s] = 0.0;
    delta
}

/// Local clustering: closed neighbour pairs over `d(d-1)/2`, zero when `d < 2`.
pub fn clustering_coefficients(g: &Graph) -> Vec<f64> {
    (0..g.node_count())
        .map(|v| {
            let nbrs = g.neighbors(v);
            let d = nbrs.len();
            if d < 2 {
                return 0.0;
            }
            let mut closed = 0usize;
            for (a, &u) in nbrs.iter().enumerate() {
                for &w in &nbrs[a + 1..] {
                    if g.has_edge(u, w) {
                        closed += 1;
                    }
                }
            }
            closed as f64 / (d * (d - 1) / 2) as f64
        })
        .collect()
}

pub fn graph_summary(g: &Graph) -> GraphSummary {
    let n = g.node_count();
    let m = g.edge_count();
    let components = g.connected_components();
    let largest = components
        .iter()
        .max_by(|a, b| a.len().cmp(&b.len()).then(b[0].cmp(&a[0])))
        .cloned()
        .unwrap_or_default();

    let per_source: Vec<(usize, usize, usize)> = largest
        .par_iter()
        .map(|&s| {
            let dist = g.bfs_distances(s);
            let mut total = 0usize;
            let mut pairs = 0usize;
            let mut ecc = 0usize;
            for d in dist.into_iter().flatten() {
                if d > 0 {
                    total += d;
                    pairs += 1;
                    ecc = ecc.max(d);
                }
            }
            (total, pairs, ecc)
        })
        .collect();
    let total: usize = per_source.iter().map(|p| p.0).sum();
    let pairs: usize = per_source.iter().map(|p| p.1).sum();
    let diameter = per_source.iter().map(|p| p.2).max().unwrap_or(0);

    let clustering = clustering_coefficients(g);
    GraphSummary {
        node_count: n,
        edge_count: m,
        avg_degree: if n == 0 { 0.0 } else { 2.0 * m as f64 / n as f64 },
        density: if n < 2 {
            0.0
        } else {
            m as f64 / (n * (n - 1) / 2) as f64
        },
        avg_clustering: if n == 0 {
            0.0
        } else {
            clustering.iter().sum::<f64>() / n as f64
        },
        avg_shortest_path: if pairs == 0 { 0.0 } else { total as f64 / pairs as f64 },
        diameter,
        algebraic_connectivity: algebraic_connectivity(g),
        connected: components.len() <= 1,
    }
}
