//! Shifted-distance clustering.
//!
//! Every node draws an independent shift `delta_v` and joins the cluster of
//! the node `u` maximizing `delta_u - dist(u, v)`. Heavy-tailed shifts keep
//! clusters small while bounding how many clusters any node touches.

mod partition;
mod shift;
mod stats;

pub use partition::{partition, Clustering, ClusteringDoc, PartitionError};
pub use shift::{
    moment_exponent, radius_tail_bound, sample_shifts, tail_ratio_sup, MomentExponent,
    ShiftDistribution,
};
pub use stats::{
    adjacent_foreign_clusters, audit_clustering, cluster_stats, moment_estimate,
    AdjacencyViolation, ClusterStats, ClusteringAudit, MomentError, MomentEstimate,
};

/// `b ln n / ln ln n` with `n` clamped to at least 16 so that `ln ln n` stays
/// comfortably positive.
pub fn default_alpha(b: f64, n: usize) -> f64 {
    let n = n.max(16) as f64;
    b * n.ln() / n.ln().ln()
}
