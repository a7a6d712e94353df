use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, NodeId};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PartitionError {
    #[error("expected {expected} shifts, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("shift of node {node} is {value}; shifts must be finite and non-negative")]
    NegativeShift { node: NodeId, value: f64 },
}

/// Result of shifted-distance clustering.
///
/// Clusters are indexed `0..cluster_count()` in ascending order of their
/// center id.
#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    shifts: Vec<f64>,
    center_of: Vec<NodeId>,
    hops_to_center: Vec<usize>,
    cluster_of: Vec<usize>,
    centers: Vec<NodeId>,
    members: Vec<Vec<NodeId>>,
    radii: Vec<usize>,
    round_bound: usize,
}

/// JSON form: `{shifts, center_of, radii: {center: radius}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringDoc {
    pub shifts: Vec<f64>,
    pub center_of: Vec<NodeId>,
    pub radii: BTreeMap<NodeId, usize>,
}

impl Clustering {
    pub fn n(&self) -> usize {
        self.center_of.len()
    }

    pub fn shifts(&self) -> &[f64] {
        &self.shifts
    }

    pub fn center_of(&self, v: NodeId) -> NodeId {
        self.center_of[v]
    }

    pub fn centers_by_node(&self) -> &[NodeId] {
        &self.center_of
    }

    /// Hop distance from `v` to its center.
    pub fn hops_to_center(&self, v: NodeId) -> usize {
        self.hops_to_center[v]
    }

    /// Index of the cluster containing `v`.
    pub fn cluster_of(&self, v: NodeId) -> usize {
        self.cluster_of[v]
    }

    pub fn cluster_count(&self) -> usize {
        self.centers.len()
    }

    pub fn center(&self, cluster: usize) -> NodeId {
        self.centers[cluster]
    }

    /// Members of a cluster, ascending.
    pub fn members(&self, cluster: usize) -> &[NodeId] {
        &self.members[cluster]
    }

    pub fn radius(&self, cluster: usize) -> usize {
        self.radii[cluster]
    }

    pub fn max_radius(&self) -> usize {
        self.radii.iter().copied().max().unwrap_or(0)
    }

    /// Simulated LOCAL cost of the clustering: `ceil(max shift)`.
    pub fn round_bound(&self) -> usize {
        self.round_bound
    }

    /// Cluster size -> number of clusters of that size.
    pub fn size_histogram(&self) -> BTreeMap<usize, usize> {
        let mut hist = BTreeMap::new();
        for m in &self.members {
            *hist.entry(m.len()).or_insert(0) += 1;
        }
        hist
    }

    pub fn to_doc(&self) -> ClusteringDoc {
        ClusteringDoc {
            shifts: self.shifts.clone(),
            center_of: self.center_of.clone(),
            radii: self
                .centers
                .iter()
                .copied()
                .zip(self.radii.iter().copied())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    key: f64,
    center: NodeId,
    hops: usize,
    node: NodeId,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    // max-heap: larger key first, then smaller center id
    fn cmp(&self, other: &Self) -> Ordering {
        self.key
            .total_cmp(&other.key)
            .then_with(|| other.center.cmp(&self.center))
            .then_with(|| other.node.cmp(&self.node))
    }
}

/// Assigns every node `v` to the center `u` maximizing `shift[u] - dist(u, v)`,
/// ties toward the smaller center id.
///
/// Runs a multi-source priority-first search in decreasing key order; the
/// first candidate to reach a node is its argmax. Candidates whose key drops
/// below zero are pruned since every node's own key is non-negative.
pub fn partition(g: &Graph, shifts: &[f64]) -> Result<Clustering, PartitionError> {
    let n = g.n();
    if shifts.len() != n {
        return Err(PartitionError::LengthMismatch {
            expected: n,
            got: shifts.len(),
        });
    }
    if let Some((node, &value)) = shifts
        .iter()
        .enumerate()
        .find(|(_, d)| !(d.is_finite() && **d >= 0.0))
    {
        return Err(PartitionError::NegativeShift { node, value });
    }

    let mut center_of = vec![usize::MAX; n];
    let mut hops_to_center = vec![0; n];
    let mut heap: BinaryHeap<Candidate> = (0..n)
        .map(|v| Candidate {
            key: shifts[v],
            center: v,
            hops: 0,
            node: v,
        })
        .collect();
    while let Some(Candidate {
        center, hops, node, ..
    }) = heap.pop()
    {
        if center_of[node] != usize::MAX {
            continue;
        }
        center_of[node] = center;
        hops_to_center[node] = hops;
        let key = shifts[center] - (hops + 1) as f64;
        if key < 0.0 {
            continue;
        }
        for &w in g.neighbors(node) {
            if center_of[w] == usize::MAX {
                heap.push(Candidate {
                    key,
                    center,
                    hops: hops + 1,
                    node: w,
                });
            }
        }
    }

    let mut centers: Vec<NodeId> = (0..n).filter(|&v| center_of[v] == v).collect();
    centers.sort_unstable();
    let mut index_of_center = vec![usize::MAX; n];
    for (i, &c) in centers.iter().enumerate() {
        index_of_center[c] = i;
    }
    let cluster_of: Vec<usize> = center_of.iter().map(|&c| index_of_center[c]).collect();
    let mut members = vec![Vec::new(); centers.len()];
    let mut radii = vec![0; centers.len()];
    for v in 0..n {
        let c = cluster_of[v];
        members[c].push(v);
        radii[c] = radii[c].max(hops_to_center[v]);
    }
    let round_bound = shifts.iter().copied().fold(0.0, f64::max).ceil() as usize;

    Ok(Clustering {
        shifts: shifts.to_vec(),
        center_of,
        hops_to_center,
        cluster_of,
        centers,
        members,
        radii,
        round_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{sample_shifts, ShiftDistribution};
    use crate::graph::{generate, GraphModel};
    use crate::Seed;
    use proptest::prelude::*;

    fn brute_force_centers(g: &Graph, shifts: &[f64]) -> Vec<NodeId> {
        let n = g.n();
        let dist: Vec<Vec<Option<usize>>> = (0..n).map(|u| g.bounded_bfs(&[u], n)).collect();
        (0..n)
            .map(|v| {
                let mut best = v;
                let mut best_key = f64::NEG_INFINITY;
                for u in 0..n {
                    if let Some(d) = dist[u][v] {
                        let key = shifts[u] - d as f64;
                        if key > best_key {
                            best = u;
                            best_key = key;
                        }
                    }
                }
                best
            })
            .collect()
    }

    fn path(n: usize) -> Graph {
        generate(&GraphModel::Path(n), Seed(0)).unwrap()
    }

    #[test]
    fn path3_example() {
        let c = partition(&path(3), &[2.0, 0.5, 0.1]).unwrap();
        assert_eq!(c.centers_by_node(), &[0, 0, 2]);
        assert_eq!(c.cluster_count(), 2);
        assert_eq!(c.members(0), &[0, 1]);
        assert_eq!(c.radius(0), 1);
        assert_eq!(c.radius(1), 0);
        assert_eq!(c.round_bound(), 2);
    }

    #[test]
    fn zero_shifts_give_singletons() {
        let g = generate(&GraphModel::Complete(5), Seed(0)).unwrap();
        let c = partition(&g, &[0.0; 5]).unwrap();
        assert_eq!(c.cluster_count(), 5);
        assert_eq!(c.max_radius(), 0);
    }

    #[test]
    fn exact_ties_go_to_smaller_center() {
        // node 1 sees key 0 from both ends and 0 from itself
        let c = partition(&path(3), &[1.0, 0.0, 1.0]).unwrap();
        assert_eq!(c.centers_by_node(), &[0, 0, 2]);
        let c = partition(&path(3), &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(c.centers_by_node(), &[0, 1, 2]);
    }

    #[test]
    fn single_node_and_empty() {
        let c = partition(&Graph::empty(1), &[7.5]).unwrap();
        assert_eq!(c.cluster_count(), 1);
        assert_eq!(c.max_radius(), 0);
        assert_eq!(partition(&Graph::empty(0), &[]).unwrap().cluster_count(), 0);
    }

    #[test]
    fn rejects_bad_shifts() {
        assert_eq!(
            partition(&path(2), &[0.0, -1.0]),
            Err(PartitionError::NegativeShift {
                node: 1,
                value: -1.0
            })
        );
        assert!(matches!(
            partition(&path(2), &[0.0]),
            Err(PartitionError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn doc_round_trip() {
        let c = partition(&path(3), &[2.0, 0.5, 0.1]).unwrap();
        let json = serde_json::to_string(&c.to_doc()).unwrap();
        assert_eq!(
            json,
            r#"{"shifts":[2.0,0.5,0.1],"center_of":[0,0,2],"radii":{"0":1,"2":0}}"#
        );
    }

    proptest! {
        #[test]
        fn matches_brute_force(
            n in 1usize..13,
            p in 0.0f64..1.0,
            seed in any::<u64>(),
            alpha in 0.3f64..5.0,
            quantize in any::<bool>(),
        ) {
            let g = generate(&GraphModel::ErdosRenyi { n, p }, Seed(seed)).unwrap();
            let dist = ShiftDistribution::poly_tail(alpha).unwrap();
            let mut shifts = sample_shifts(&dist, n, Seed(seed).derive(1));
            if quantize {
                // force exact ties
                shifts.iter_mut().for_each(|d| *d = (*d * 2.0).floor() / 2.0);
            }
            let c = partition(&g, &shifts).unwrap();
            prop_assert_eq!(c.centers_by_node(), &brute_force_centers(&g, &shifts)[..]);
            for k in 0..c.cluster_count() {
                prop_assert!(c.radius(k) as f64 <= shifts[c.center(k)]);
                prop_assert_eq!(c.cluster_of(c.center(k)), k);
            }
        }
    }
}
