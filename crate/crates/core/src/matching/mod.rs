//! Randomized maximal-matching approximation driven by fractional weights.
//!
//! [`run_cluster_matching`] clusters the line graph and lets clusters assign
//! edge weights under per-node caps; [`run_baseline_framework`] is the
//! edge-local scheme it is derived from. In both, each active edge
//! self-nominates with probability equal to its weight every two rounds and
//! joins the matching when no adjacent edge nominated.

mod baseline;
mod cluster;

pub use baseline::run_baseline_framework;
pub use cluster::{run_cluster_matching, run_cluster_matching_on, validate_params, CapValidation};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EdgeId, Graph, NodeId};
use crate::Seed;

/// Float slack used by every audit comparison.
pub const AUDIT_TOLERANCE: f64 = 1e-9;

/// At most this many individual violations are kept; the counters stay exact.
const MAX_RECORDED_VIOLATIONS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchingParams {
    /// Shift exponent for clustering the line graph.
    pub alpha: f64,
    /// Factor by which caps and weights move per update; must exceed 1.
    pub update_factor: f64,
    /// Round budget.
    pub rounds: usize,
    /// Approximation slack used by [`approximation_report`].
    pub eps: f64,
    pub seed: Seed,
    /// Stop as soon as no edge is active, and report a budget overrun
    /// otherwise. When off, exactly `rounds` rounds are simulated.
    pub fixed_point: bool,
    /// Scale initial caps down when the cap-sum premise fails instead of
    /// refusing to run.
    pub scale_caps: bool,
    /// Keep one [`RoundRecord`] per round.
    pub keep_trace: bool,
}

impl MatchingParams {
    pub fn new(alpha: f64, update_factor: f64, seed: Seed) -> Self {
        MatchingParams {
            alpha,
            update_factor,
            rounds: 10_000,
            eps: 1.0,
            seed,
            fixed_point: true,
            scale_caps: false,
            keep_trace: false,
        }
    }

    pub fn check(&self) -> Result<(), MatchingError> {
        let bad = |reason: String| Err(MatchingError::InvalidParams(reason));
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return bad(format!("alpha must be finite and > 0, got {}", self.alpha));
        }
        if !(self.update_factor.is_finite() && self.update_factor > 1.0) {
            return bad(format!(
                "update factor must be finite and > 1, got {}",
                self.update_factor
            ));
        }
        if self.rounds == 0 {
            return bad("round budget must be >= 1".into());
        }
        if !(self.eps.is_finite() && self.eps > 0.0) {
            return bad(format!("eps must be finite and > 0, got {}", self.eps));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatchingError {
    #[error("invalid matching parameters: {0}")]
    InvalidParams(String),
    #[error(
        "initial cap sum {max_sum:e} at node {node} exceeds {threshold:e}; \
         rerun with cap scaling (factor {scale:e})"
    )]
    CapPremise {
        node: NodeId,
        max_sum: f64,
        threshold: f64,
        scale: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    /// No active edge remains: the matching is maximal.
    Completed,
    /// The round budget ran out with active edges left.
    BudgetExhausted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    CapSum,
    WeightSum,
    Trichotomy,
    NegativeValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub round: usize,
    pub kind: ViolationKind,
    /// Node for sum checks, edge id for the trichotomy check.
    pub at: usize,
    pub value: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub active_edges: usize,
    pub matched: usize,
    pub cap_sums_max: f64,
    pub weight_sums_max: f64,
    /// Clusters whose period ended this round.
    pub deliveries: usize,
    /// Clusters starting a period this round.
    pub period_starts: usize,
    pub nomination: bool,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AuditSummary {
    pub cap_sum_violations: usize,
    pub weight_sum_violations: usize,
    pub trichotomy_checks: usize,
    pub trichotomy_violations: usize,
    pub negative_values: usize,
    /// Caps left unchanged because the cluster met the cap while the node's
    /// cap sum was already above the raise threshold.
    pub unchanged_caps: usize,
    pub max_cap_sum: f64,
    pub max_weight_sum: f64,
    /// The first few violations, in round order.
    pub recorded: Vec<Violation>,
}

impl AuditSummary {
    pub fn violation_count(&self) -> usize {
        self.cap_sum_violations
            + self.weight_sum_violations
            + self.trichotomy_violations
            + self.negative_values
    }

    pub fn clean(&self) -> bool {
        self.violation_count() == 0
    }

    fn record(&mut self, v: Violation, trace: Option<&mut Vec<Violation>>) {
        match v.kind {
            ViolationKind::CapSum => self.cap_sum_violations += 1,
            ViolationKind::WeightSum => self.weight_sum_violations += 1,
            ViolationKind::Trichotomy => self.trichotomy_violations += 1,
            ViolationKind::NegativeValue => self.negative_values += 1,
        }
        if let Some(t) = trace {
            t.push(v.clone());
        }
        if self.recorded.len() < MAX_RECORDED_VIOLATIONS {
            self.recorded.push(v);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchingOutcome {
    /// Matched edges as `(u, v)` with `u < v`, ascending.
    pub matched_edges: Vec<(NodeId, NodeId)>,
    pub rounds_used: usize,
    pub status: RunStatus,
    /// Uniform factor applied to the initial caps (1 when unscaled).
    pub cap_scale: f64,
    pub cluster_count: usize,
    pub max_cluster_radius: usize,
    pub audit: AuditSummary,
    pub trace: Vec<RoundRecord>,
}

/// True iff no two edges of `matching` share an endpoint.
pub fn verify_matching(g: &Graph, matching: &[(NodeId, NodeId)]) -> bool {
    let mut used = vec![false; g.n()];
    for &(u, v) in matching {
        if !g.has_edge(u, v) || used[u] || used[v] {
            return false;
        }
        used[u] = true;
        used[v] = true;
    }
    true
}

/// True iff `matching` is valid and every edge of `g` has a matched endpoint.
pub fn is_maximal_matching(g: &Graph, matching: &[(NodeId, NodeId)]) -> bool {
    if !verify_matching(g, matching) {
        return false;
    }
    let mut used = vec![false; g.n()];
    for &(u, v) in matching {
        used[u] = true;
        used[v] = true;
    }
    g.edges().iter().all(|&(u, v)| used[u] || used[v])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproximationReport {
    pub matched: usize,
    pub opt: usize,
    /// `matched / opt`, 1 when `opt = 0`.
    pub ratio: f64,
    pub eps: f64,
    /// `matched >= opt / (2 + eps)`.
    pub within_bound: bool,
}

pub fn approximation_report(matched: usize, eps: f64, opt: usize) -> ApproximationReport {
    let ratio = if opt == 0 {
        1.0
    } else {
        matched as f64 / opt as f64
    };
    ApproximationReport {
        matched,
        opt,
        ratio,
        eps,
        within_bound: matched as f64 * (2.0 + eps) >= opt as f64,
    }
}

/// Shared nomination step: every active edge draws a uniform in id order and
/// nominates when the draw is below its weight. Nominated edges with no
/// nominated neighbor join the matching; they and their neighbors retire.
fn nominate<R: rand::Rng>(
    lg: &Graph,
    weights: &mut [f64],
    active: &mut [bool],
    matched: &mut Vec<EdgeId>,
    rng: &mut R,
) -> usize {
    let m = weights.len();
    let mut nominated = vec![false; m];
    for e in 0..m {
        if active[e] {
            nominated[e] = rng.gen::<f64>() < weights[e];
        }
    }
    let winners: Vec<EdgeId> = (0..m)
        .filter(|&e| nominated[e] && lg.neighbors(e).iter().all(|&f| !nominated[f]))
        .collect();
    let mut retired = 0;
    for &e in &winners {
        matched.push(e);
        for f in std::iter::once(e).chain(lg.neighbors(e).iter().copied()) {
            if active[f] {
                active[f] = false;
                weights[f] = 0.0;
                retired += 1;
            }
        }
    }
    retired
}

fn weight_sums(g: &Graph, edges: &[(NodeId, NodeId)], weights: &[f64]) -> Vec<f64> {
    let mut sums = vec![0.0; g.n()];
    for (&(u, v), &w) in edges.iter().zip(weights) {
        sums[u] += w;
        sums[v] += w;
    }
    sums
}
