//! Undirected simple graphs with optional node weights.
//!
//! Node ids are dense `0..n`. Adjacency lists are kept sorted, and edges are
//! enumerated canonically as `(u, v)` with `u < v` in lexicographic order;
//! the position of an edge in that enumeration is its *edge id*, used by the
//! line graph and by the matching algorithms.

mod generate;
mod io;

pub use generate::{generate, GraphModel};
pub use io::{parse_edge_list, ParseError};

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type NodeId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("self-loop at node {0}")]
    SelfLoop(NodeId),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(NodeId, NodeId),
    #[error("node id {id} out of range for n = {n}")]
    NodeOutOfRange { id: NodeId, n: usize },
    #[error("expected {expected} node weights, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("weight of node {node} is {weight}; weights must be finite and non-negative")]
    InvalidWeight { node: NodeId, weight: f64 },
    #[error("infeasible generator parameters: {0}")]
    Infeasible(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    adjacency: Vec<Vec<NodeId>>,
    node_weights: Option<Vec<f64>>,
}

impl Graph {
    /// A graph with `n` nodes and no edges.
    pub fn empty(n: usize) -> Self {
        Graph {
            adjacency: vec![Vec::new(); n],
            node_weights: None,
        }
    }

    /// Builds a validated graph. Rejects self-loops, duplicate edges
    /// (in either orientation) and out-of-range ids.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut adjacency = vec![Vec::new(); n];
        for (u, v) in edges {
            for id in [u, v] {
                if id >= n {
                    return Err(GraphError::NodeOutOfRange { id, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for (u, list) in adjacency.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                let (a, b) = (u.min(w[0]), u.max(w[0]));
                return Err(GraphError::DuplicateEdge(a, b));
            }
        }
        Ok(Graph {
            adjacency,
            node_weights: None,
        })
    }

    /// Attaches node weights; each must be finite and `>= 0`.
    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self, GraphError> {
        if weights.len() != self.n() {
            return Err(GraphError::WeightCount {
                expected: self.n(),
                got: weights.len(),
            });
        }
        if let Some((node, &weight)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w < 0.0)
        {
            return Err(GraphError::InvalidWeight { node, weight });
        }
        self.node_weights = Some(weights);
        Ok(self)
    }

    /// Replaces any weights with all-ones.
    pub fn with_unit_weights(mut self) -> Self {
        self.node_weights = Some(vec![1.0; self.n()]);
        self
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adjacency[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        u < self.n() && self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn node_weights(&self) -> Option<&[f64]> {
        self.node_weights.as_deref()
    }

    /// Canonical edge list: `(u, v)` with `u < v`, lexicographically sorted.
    /// The index into this list is the edge id.
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (u, list) in self.adjacency.iter().enumerate() {
            out.extend(list.iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        out
    }

    pub fn line_graph(&self) -> LineGraphMap {
        LineGraphMap::new(self)
    }

    /// Exact hop distances from the nearest source, `None` beyond `limit`
    /// (or when unreachable).
    pub fn bounded_bfs(&self, sources: &[NodeId], limit: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let du = dist[u].expect("queued nodes have a distance");
            if du == limit {
                continue;
            }
            for &v in &self.adjacency[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }
}

/// The line graph of a base graph together with the edge-id bijection.
#[derive(Debug, Clone)]
pub struct LineGraphMap {
    /// Graph over edge ids of the base graph.
    pub lg: Graph,
    edges: Vec<(NodeId, NodeId)>,
}

impl LineGraphMap {
    fn new(g: &Graph) -> Self {
        let edges = g.edges();
        // incident[v] = ids of base edges touching v, ascending
        let mut incident: Vec<Vec<EdgeId>> = vec![Vec::new(); g.n()];
        for (id, &(u, v)) in edges.iter().enumerate() {
            incident[u].push(id);
            incident[v].push(id);
        }
        let mut adjacency: Vec<Vec<EdgeId>> = vec![Vec::new(); edges.len()];
        for (id, &(u, v)) in edges.iter().enumerate() {
            let list = &mut adjacency[id];
            list.extend(
                incident[u]
                    .iter()
                    .chain(&incident[v])
                    .copied()
                    .filter(|&f| f != id),
            );
            // simple graph: two distinct edges share at most one endpoint
            list.sort_unstable();
        }
        LineGraphMap {
            lg: Graph {
                adjacency,
                node_weights: None,
            },
            edges,
        }
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Endpoints of base edge `id`.
    pub fn endpoints(&self, id: EdgeId) -> (NodeId, NodeId) {
        self.edges[id]
    }

    /// Edge id of the base edge `{u, v}`, if present.
    pub fn edge_id(&self, u: NodeId, v: NodeId) -> Option<EdgeId> {
        let key = (u.min(v), u.max(v));
        self.edges.binary_search(&key).ok()
    }

    pub fn base_edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn path(n: usize) -> Graph {
        generate(&GraphModel::Path(n), crate::Seed(0)).unwrap()
    }

    #[test]
    fn rejects_self_loops_and_duplicates() {
        assert_eq!(Graph::from_edges(2, [(1, 1)]), Err(GraphError::SelfLoop(1)));
        assert_eq!(
            Graph::from_edges(2, [(0, 1), (1, 0)]),
            Err(GraphError::DuplicateEdge(0, 1))
        );
        assert!(matches!(
            Graph::from_edges(2, [(0, 2)]),
            Err(GraphError::NodeOutOfRange { id: 2, n: 2 })
        ));
    }

    #[test]
    fn rejects_bad_weights() {
        let g = Graph::empty(2);
        assert!(g.clone().with_weights(vec![1.0]).is_err());
        assert!(g.clone().with_weights(vec![1.0, -0.5]).is_err());
        assert!(g.clone().with_weights(vec![f64::NAN, 0.0]).is_err());
        assert!(g.with_weights(vec![0.0, 2.0]).is_ok());
    }

    #[test]
    fn line_graph_of_path3_is_one_edge() {
        let map = path(3).line_graph();
        assert_eq!(map.endpoints(0), (0, 1));
        assert_eq!(map.endpoints(1), (1, 2));
        assert_eq!(map.lg.edges(), vec![(0, 1)]);
    }

    #[test]
    fn line_graph_of_star4_is_triangle() {
        let g = generate(&GraphModel::Star(4), crate::Seed(0)).unwrap();
        let map = g.line_graph();
        assert_eq!(map.lg.n(), 3);
        assert_eq!(map.lg.edges(), vec![(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn line_graph_of_edgeless_graph_is_empty() {
        assert_eq!(Graph::empty(4).line_graph().lg.n(), 0);
    }

    #[test]
    fn bfs_examples() {
        let g = path(3);
        assert_eq!(g.bounded_bfs(&[0], 2), vec![Some(0), Some(1), Some(2)]);
        assert_eq!(g.bounded_bfs(&[0], 1), vec![Some(0), Some(1), None]);
        assert_eq!(g.bounded_bfs(&[0, 2], 2), vec![Some(0), Some(1), Some(0)]);
        assert_eq!(g.bounded_bfs(&[], 2), vec![None, None, None]);
    }

    proptest! {
        #[test]
        fn line_graph_degree_identity(n in 1usize..14, p in 0.0f64..1.0, seed in any::<u64>()) {
            let g = generate(&GraphModel::ErdosRenyi { n, p }, crate::Seed(seed)).unwrap();
            let map = g.line_graph();
            prop_assert_eq!(map.lg.n(), g.edge_count());
            for (id, &(u, v)) in map.base_edges().iter().enumerate() {
                prop_assert_eq!(map.lg.degree(id), g.degree(u) + g.degree(v) - 2);
                prop_assert_eq!(map.edge_id(v, u), Some(id));
            }
            for (a, b) in map.lg.edges() {
                let (x, y) = map.endpoints(a);
                let (s, t) = map.endpoints(b);
                prop_assert!(x == s || x == t || y == s || y == t);
            }
        }

        #[test]
        fn adjacency_is_symmetric(n in 0usize..20, p in 0.0f64..1.0, seed in any::<u64>()) {
            let g = generate(&GraphModel::ErdosRenyi { n, p }, crate::Seed(seed)).unwrap();
            for u in 0..g.n() {
                for &v in g.neighbors(u) {
                    prop_assert!(g.has_edge(v, u));
                    prop_assert_ne!(u, v);
                }
            }
        }
    }
}
