use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::partition::{partition, Clustering};
use super::shift::{radius_tail_bound, sample_shifts, ShiftDistribution};
use crate::graph::{Graph, NodeId};
use crate::Seed;

/// Per-node foreign-cluster counts at a list of radius thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterStats {
    pub q_values: Vec<usize>,
    /// `adjacent[v][i]`: distinct clusters other than `v`'s own that contain
    /// a neighbor of `v` and have radius `>= q_values[i]`.
    pub adjacent: Vec<Vec<usize>>,
    /// Shifted-window counts, present only when requested: for each `v` and
    /// threshold `q`, the nodes `w != v` with
    /// `shift[w] >= max(win(v) - 2 + dist(w, v), q)` where `win(v)` is the
    /// winning shifted value at `v`.
    pub window: Option<Vec<Vec<usize>>>,
    pub max_radius: usize,
    pub cluster_count: usize,
    /// `(size, number of clusters)` ascending by size.
    pub size_histogram: Vec<(usize, usize)>,
}

impl ClusterStats {
    /// CSV rows `node,q,count` for the adjacency counts.
    pub fn to_csv_rows(&self) -> Vec<String> {
        let mut rows = Vec::with_capacity(self.adjacent.len() * self.q_values.len());
        for (v, counts) in self.adjacent.iter().enumerate() {
            for (q, c) in self.q_values.iter().zip(counts) {
                rows.push(format!("{v},{q},{c}"));
            }
        }
        rows
    }
}

/// Distinct foreign clusters adjacent to `v`, as cluster indices ascending.
pub fn adjacent_foreign_clusters(g: &Graph, c: &Clustering, v: NodeId) -> Vec<usize> {
    let own = c.cluster_of(v);
    let mut out: Vec<usize> = g
        .neighbors(v)
        .iter()
        .map(|&u| c.cluster_of(u))
        .filter(|&k| k != own)
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn adjacent_counts(g: &Graph, c: &Clustering, v: NodeId, q_values: &[usize]) -> Vec<usize> {
    let foreign = adjacent_foreign_clusters(g, c, v);
    q_values
        .iter()
        .map(|&q| foreign.iter().filter(|&&k| c.radius(k) >= q).count())
        .collect()
}

fn window_counts(g: &Graph, c: &Clustering, v: NodeId, q_values: &[usize]) -> Vec<usize> {
    let shifts = c.shifts();
    let win = shifts[c.center_of(v)] - c.hops_to_center(v) as f64;
    // shift[w] - dist >= win - 2 >= -2 bounds the search radius
    let limit = c.round_bound() + 2;
    let dist = g.bounded_bfs(&[v], limit);
    q_values
        .iter()
        .map(|&q| {
            (0..g.n())
                .filter(|&w| w != v)
                .filter(|&w| match dist[w] {
                    Some(d) => shifts[w] >= (win - 2.0 + d as f64).max(q as f64),
                    None => false,
                })
                .count()
        })
        .collect()
}

pub fn cluster_stats(
    g: &Graph,
    c: &Clustering,
    q_values: &[usize],
    window_audit: bool,
) -> ClusterStats {
    let adjacent = (0..g.n())
        .map(|v| adjacent_counts(g, c, v, q_values))
        .collect();
    let window = window_audit.then(|| {
        (0..g.n())
            .map(|v| window_counts(g, c, v, q_values))
            .collect()
    });
    ClusterStats {
        q_values: q_values.to_vec(),
        adjacent,
        window,
        max_radius: c.max_radius(),
        cluster_count: c.cluster_count(),
        size_histogram: c.size_histogram().into_iter().collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjacencyViolation {
    pub node: NodeId,
    pub q: usize,
    pub count: usize,
    pub bound: f64,
}

/// Clustering audit against the high-probability guarantees of the
/// poly-tail decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringAudit {
    pub n: usize,
    pub alpha: f64,
    /// The constant in `alpha = b ln n / ln ln n`, when the caller chose
    /// alpha that way.
    pub b: Option<f64>,
    pub max_radius: usize,
    pub radius_bound: f64,
    pub radius_ok: bool,
    /// Thresholds checked: `0..=max_radius + 1`.
    pub q_values: Vec<usize>,
    pub max_count: Vec<usize>,
    /// `e^(3 alpha / (q + 1))` per threshold.
    pub count_bound: Vec<f64>,
    pub violations: Vec<AdjacencyViolation>,
}

impl ClusteringAudit {
    pub fn passed(&self) -> bool {
        self.radius_ok && self.violations.is_empty()
    }
}

/// Checks the radius against `n^(3/alpha) - 1` and each node's count of
/// adjacent foreign clusters of radius `>= q` against `e^(3 alpha / (q + 1))`.
pub fn audit_clustering(g: &Graph, c: &Clustering, alpha: f64, b: Option<f64>) -> ClusteringAudit {
    let radius_bound = radius_tail_bound(&ShiftDistribution::PolyTail { alpha }, g.n()).max(0.0);
    let max_radius = c.max_radius();
    let q_values: Vec<usize> = (0..=max_radius + 1).collect();
    let count_bound: Vec<f64> = q_values
        .iter()
        .map(|&q| (3.0 * alpha / (q as f64 + 1.0)).exp())
        .collect();
    let stats = cluster_stats(g, c, &q_values, false);
    let mut max_count = vec![0; q_values.len()];
    let mut violations = Vec::new();
    for (v, counts) in stats.adjacent.iter().enumerate() {
        for (i, &count) in counts.iter().enumerate() {
            max_count[i] = max_count[i].max(count);
            if count as f64 > count_bound[i] {
                violations.push(AdjacencyViolation {
                    node: v,
                    q: q_values[i],
                    count,
                    bound: count_bound[i],
                });
            }
        }
    }
    ClusteringAudit {
        n: g.n(),
        alpha,
        b,
        max_radius,
        radius_bound,
        radius_ok: max_radius as f64 <= radius_bound,
        q_values,
        max_count,
        count_bound,
        violations,
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MomentError {
    #[error("at least one trial is required")]
    NoTrials,
    #[error("graph has no nodes")]
    EmptyGraph,
}

/// Monte Carlo estimate of `E[exp(gamma * C)]`, with `C` the count of
/// adjacent foreign clusters of radius `>= q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub trials: usize,
    pub q: usize,
    pub gamma: f64,
    /// Node 0.
    pub designated: NodeId,
    pub mean: f64,
    pub std_error: f64,
    /// The node with the largest sample mean.
    pub max_node: NodeId,
    pub max_mean: f64,
    pub max_std_error: f64,
}

/// Trial `t` uses shifts from `seed.derive(t)`, so the estimate does not
/// depend on how trials are scheduled across threads.
pub fn moment_estimate(
    g: &Graph,
    dist: &ShiftDistribution,
    q: usize,
    gamma: f64,
    trials: usize,
    seed: Seed,
) -> Result<MomentEstimate, MomentError> {
    if trials == 0 {
        return Err(MomentError::NoTrials);
    }
    if g.n() == 0 {
        return Err(MomentError::EmptyGraph);
    }
    let n = g.n();
    let samples: Vec<Vec<f64>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let shifts = sample_shifts(dist, n, seed.derive(t));
            let c = partition(g, &shifts).expect("sampled shifts are valid");
            (0..n)
                .map(|v| (gamma * adjacent_counts(g, &c, v, &[q])[0] as f64).exp())
                .collect()
        })
        .collect();

    let mut sum = vec![0.0; n];
    let mut sum_sq = vec![0.0; n];
    for row in &samples {
        for v in 0..n {
            sum[v] += row[v];
            sum_sq[v] += row[v] * row[v];
        }
    }
    let tf = trials as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / tf).collect();
    let std_error: Vec<f64> = (0..n)
        .map(|v| {
            if trials < 2 {
                return 0.0;
            }
            let var = ((sum_sq[v] - tf * mean[v] * mean[v]) / (tf - 1.0)).max(0.0);
            (var / tf).sqrt()
        })
        .collect();
    let max_node = (0..n).fold(0, |best, v| if mean[v] > mean[best] { v } else { best });
    Ok(MomentEstimate {
        trials,
        q,
        gamma,
        designated: 0,
        mean: mean[0],
        std_error: std_error[0],
        max_node,
        max_mean: mean[max_node],
        max_std_error: std_error[max_node],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::moment_exponent;
    use crate::graph::{generate, GraphModel};
    use proptest::prelude::*;

    fn model(m: GraphModel) -> Graph {
        generate(&m, Seed(0)).unwrap()
    }

    #[test]
    fn singleton_clustering_counts() {
        let g = model(GraphModel::Complete(3));
        let c = partition(&g, &[0.0; 3]).unwrap();
        let s = cluster_stats(&g, &c, &[0, 1], false);
        assert!(s.adjacent.iter().all(|row| row == &vec![2, 0]));
        assert_eq!(s.cluster_count, 3);
        assert_eq!(s.size_histogram, vec![(1, 3)]);
    }

    #[test]
    fn path3_counts() {
        let g = model(GraphModel::Path(3));
        let c = partition(&g, &[2.0, 0.5, 0.1]).unwrap();
        let s = cluster_stats(&g, &c, &[0, 1], false);
        assert_eq!(s.adjacent, vec![vec![0, 0], vec![1, 0], vec![1, 1]]);
        assert_eq!(s.to_csv_rows()[2], "1,0,1");
    }

    #[test]
    fn audit_trivial_cases() {
        let g = model(GraphModel::Complete(4));
        let c = partition(&g, &[0.0; 4]).unwrap();
        let a = audit_clustering(&g, &c, 2.0, None);
        assert!(a.radius_ok);
        let one = Graph::empty(1);
        let c = partition(&one, &[3.0]).unwrap();
        assert!(audit_clustering(&one, &c, 2.0, None).passed());
    }

    #[test]
    fn audit_flags_excess_adjacency() {
        // star with zero shifts: center sees 5 radius-0 clusters; bound at
        // alpha = 0.5, q = 0 is e^1.5 ~ 4.48
        let g = model(GraphModel::Star(6));
        let c = partition(&g, &[0.0; 6]).unwrap();
        let a = audit_clustering(&g, &c, 0.5, None);
        assert_eq!(
            a.violations,
            vec![AdjacencyViolation {
                node: 0,
                q: 0,
                count: 5,
                bound: 1.5f64.exp()
            }]
        );
        assert!(!a.passed());
    }

    #[test]
    fn moment_trivial_cases() {
        let g = model(GraphModel::Complete(6));
        let d = ShiftDistribution::poly_tail(2.0).unwrap();
        let m = moment_estimate(&g, &d, 0, 0.0, 50, Seed(1)).unwrap();
        assert_eq!((m.mean, m.max_mean, m.std_error), (1.0, 1.0, 0.0));
        let m = moment_estimate(&Graph::empty(1), &d, 0, 0.3, 20, Seed(1)).unwrap();
        assert_eq!(m.mean, 1.0);
        assert_eq!(
            moment_estimate(&g, &d, 0, 0.3, 0, Seed(1)),
            Err(MomentError::NoTrials)
        );
    }

    #[test]
    fn moment_bound_complete8() {
        let g = model(GraphModel::Complete(8));
        let d = ShiftDistribution::poly_tail(4.0).unwrap();
        let gamma = moment_exponent(4.0, 0.0).gamma;
        let m = moment_estimate(&g, &d, 0, gamma, 10_000, Seed(2)).unwrap();
        let bound = 2.0 * std::f64::consts::E;
        assert!(m.mean <= bound + 3.0 * m.std_error, "{m:?}");
        assert!(m.max_mean <= bound + 3.0 * m.max_std_error, "{m:?}");
    }

    #[test]
    fn window_counts_on_path() {
        // win(1) = 2 - 1 = 1; w = 0: 2 >= max(1 - 2 + 1, 0); w = 2: 0.1 >= max(0, 0)
        let g = model(GraphModel::Path(3));
        let c = partition(&g, &[2.0, 0.5, 0.1]).unwrap();
        let s = cluster_stats(&g, &c, &[0, 1], true);
        assert_eq!(s.window.unwrap()[1], vec![2, 1]);
    }

    proptest! {
        #[test]
        fn counts_monotone_and_bounded(n in 1usize..25, p in 0.0f64..1.0, seed in any::<u64>(), alpha in 0.5f64..6.0) {
            let g = generate(&GraphModel::ErdosRenyi { n, p }, Seed(seed)).unwrap();
            let d = ShiftDistribution::poly_tail(alpha).unwrap();
            let c = partition(&g, &sample_shifts(&d, n, Seed(seed).derive(7))).unwrap();
            let qs: Vec<usize> = (0..6).collect();
            let s = cluster_stats(&g, &c, &qs, false);
            for (v, row) in s.adjacent.iter().enumerate() {
                prop_assert!(row.windows(2).all(|w| w[0] >= w[1]));
                prop_assert!(row[0] <= adjacent_foreign_clusters(&g, &c, v).len());
            }
        }
    }
}
