//! Communication graphs: generators, structural metrics and edge-list I/O.

mod generate;
mod io;
mod metrics;
mod spectral;

use std::collections::{BTreeMap, VecDeque};

use crate::{Error, Result};

pub use generate::{
    critical_p, generate_ba, generate_er_gnm, generate_er_gnp, generate_sbm, GraphKind, GraphSpec,
};
pub use io::{read_edge_list, write_edge_list};
pub use metrics::{
    betweenness_centrality, clustering_coefficients, degree_sequence, graph_summary, GraphSummary,
};
pub use spectral::{algebraic_connectivity, laplacian, symmetric_eigenvalues};

/// Undirected simple graph over node ids `0..node_count`.
///
/// Edge weights (ω_ij) and self weights (ω_ii) default to 1.0; the generators
/// never change them.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    node_count: usize,
    adjacency: Vec<Vec<usize>>,
    edge_weights: BTreeMap<(usize, usize), f64>,
    self_weights: Vec<f64>,
}

#[inline]
fn ordered(i: usize, j: usize) -> (usize, usize) {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}

impl Graph {
    pub fn new(node_count: usize) -> Self {
        Self {
            node_count,
            adjacency: vec![Vec::new(); node_count],
            edge_weights: BTreeMap::new(),
            self_weights: vec![1.0; node_count],
        }
    }

    /// Builds a graph from an edge list, rejecting self-loops, duplicates and
    /// out-of-range ids.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Self::new(node_count);
        for (i, j) in edges {
            if !g.add_edge(i, j)? {
                return Err(Error::Parameter(format!("duplicate edge ({i}, {j})")));
            }
        }
        Ok(g)
    }

    /// Inserts edge `{i, j}` with weight 1.0. Returns `false` if it was
    /// already present.
    pub fn add_edge(&mut self, i: usize, j: usize) -> Result<bool> {
        if i == j {
            return Err(Error::Parameter(format!("self-loop at node {i}")));
        }
        if i >= self.node_count || j >= self.node_count {
            return Err(Error::Parameter(format!(
                "edge ({i}, {j}) out of range for {} nodes",
                self.node_count
            )));
        }
        let key = ordered(i, j);
        if self.edge_weights.contains_key(&key) {
            return Ok(false);
        }
        self.edge_weights.insert(key, 1.0);
        for (a, b) in [(i, j), (j, i)] {
            let row = &mut self.adjacency[a];
            let pos = row.binary_search(&b).unwrap_err();
            row.insert(pos, b);
        }
        Ok(true)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edge_weights.len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edge_weights.contains_key(&ordered(i, j))
    }

    /// Sorted neighbour ids of `i` (excluding `i`).
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    /// Edges as `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edge_weights.keys().copied()
    }

    pub fn edge_weight(&self, i: usize, j: usize) -> Option<f64> {
        self.edge_weights.get(&ordered(i, j)).copied()
    }

    pub fn set_edge_weight(&mut self, i: usize, j: usize, weight: f64) -> Result<()> {
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(Error::Parameter(format!("edge weight must be positive, got {weight}")));
        }
        match self.edge_weights.get_mut(&ordered(i, j)) {
            Some(w) => {
                *w = weight;
                Ok(())
            }
            None => Err(Error::Parameter(format!("no edge ({i}, {j})"))),
        }
    }

    pub fn self_weight(&self, i: usize) -> f64 {
        self.self_weights[i]
    }

    pub fn set_self_weight(&mut self, i: usize, weight: f64) -> Result<()> {
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(Error::Parameter(format!("self weight must be positive, got {weight}")));
        }
        self.self_weights[i] = weight;
        Ok(())
    }

    /// Hop distances from `source`; `None` for unreachable nodes.
    pub fn bfs_distances(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.node_count];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap_or(0);
            for &w in &self.adjacency[v] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Connected components, each sorted, ordered by their smallest node id.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.node_count];
        let mut components = Vec::new();
        for start in 0..self.node_count {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut head = 0;
            while head < comp.len() {
                let v = comp[head];
                head += 1;
                for &w in &self.adjacency[v] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            components.push(comp);
        }
        components
    }

    /// Returns the graph with node `v` renamed to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.node_count {
            return Err(Error::Parameter("permutation length differs from node count".into()));
        }
        let mut g = Graph::from_edges(self.node_count, self.edges().map(|(i, j)| (perm[i], perm[j])))?;
        for ((i, j), &w) in &self.edge_weights {
            g.set_edge_weight(perm[*i], perm[*j], w)?;
        }
        for (v, &w) in self.self_weights.iter().enumerate() {
            g.self_weights[perm[v]] = w;
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_self_loops_and_duplicates() {
        assert!(Graph::from_edges(3, [(1, 1)]).is_err());
        assert!(Graph::from_edges(3, [(0, 1), (1, 0)]).is_err());
        assert!(Graph::from_edges(3, [(0, 3)]).is_err());
    }

    #[test]
    fn neighbours_stay_sorted() {
        let g = Graph::from_edges(5, [(0, 4), (0, 2), (0, 1), (3, 0)]).unwrap();
        assert_eq!(g.neighbors(0), &[1, 2, 3, 4]);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2), (0, 3), (0, 4)]);
        assert_eq!(g.edge_weight(2, 0), Some(1.0));
        assert_eq!(g.self_weight(3), 1.0);
    }

    #[test]
    fn components_of_two_paths() {
        let g = Graph::from_edges(5, [(0, 1), (3, 4)]).unwrap();
        assert_eq!(g.connected_components(), vec![vec![0, 1], vec![2], vec![3, 4]]);
        assert_eq!(g.bfs_distances(0), vec![Some(0), Some(1), None, None, None]);
    }

    #[test]
    fn weights_must_be_positive() {
        let mut g = Graph::from_edges(2, [(0, 1)]).unwrap();
        assert!(g.set_edge_weight(0, 1, 0.0).is_err());
        assert!(g.set_self_weight(0, -1.0).is_err());
        g.set_edge_weight(1, 0, 2.5).unwrap();
        assert_eq!(g.edge_weight(0, 1), Some(2.5));
    }
}
