use super::{
    nominate, weight_sums, AuditSummary, MatchingError, MatchingOutcome, MatchingParams,
    RoundRecord, RunStatus, Violation, ViolationKind, AUDIT_TOLERANCE,
};
use crate::graph::{EdgeId, Graph, NodeId};

/// Edge-local fractional matching: all weights start at `1 / (2 max_degree)`;
/// every two rounds each active edge multiplies its weight by `K` when both
/// endpoint sums are at most `1 / (2K)`, then self-nominates.
///
/// Uses `update_factor`, `rounds`, `seed`, `fixed_point` and `keep_trace`
/// from `params`; the clustering fields are ignored.
pub fn run_baseline_framework(
    g: &Graph,
    params: &MatchingParams,
) -> Result<MatchingOutcome, MatchingError> {
    params.check()?;
    let k = params.update_factor;
    let map = g.line_graph();
    let edges = map.base_edges();
    let m = edges.len();
    let start = if m == 0 {
        0.0
    } else {
        1.0 / (2.0 * g.max_degree() as f64)
    };
    let raise_limit = 1.0 / (2.0 * k);

    let mut rng = params.seed.derive(1).rng();
    let mut weights = vec![start; m];
    let mut active = vec![true; m];
    let mut active_count = m;
    let mut matched: Vec<EdgeId> = Vec::new();
    let mut audit = AuditSummary::default();
    let mut trace = Vec::new();

    let mut round = 0;
    while round < params.rounds && !(params.fixed_point && active_count == 0) {
        let mut round_violations = Vec::new();
        let nomination = round % 2 == 0;
        if nomination {
            let sums = weight_sums(g, edges, &weights);
            for (e, &(u, v)) in edges.iter().enumerate() {
                if active[e] && sums[u] <= raise_limit && sums[v] <= raise_limit {
                    weights[e] *= k;
                }
            }
            active_count -= nominate(&map.lg, &mut weights, &mut active, &mut matched, &mut rng);
        }
        let sums = weight_sums(g, edges, &weights);
        let weight_sums_max = sums.iter().copied().fold(0.0, f64::max);
        audit.max_weight_sum = audit.max_weight_sum.max(weight_sums_max);
        for (u, &s) in sums.iter().enumerate() {
            if s > 0.5 + AUDIT_TOLERANCE {
                let v = Violation {
                    round,
                    kind: ViolationKind::WeightSum,
                    at: u,
                    value: s,
                    bound: 0.5,
                };
                audit.record(v, params.keep_trace.then_some(&mut round_violations));
            }
        }
        if params.keep_trace {
            trace.push(RoundRecord {
                round,
                active_edges: active_count,
                matched: matched.len(),
                cap_sums_max: 0.0,
                weight_sums_max,
                deliveries: 0,
                period_starts: 0,
                nomination,
                violations: round_violations,
            });
        }
        round += 1;
    }

    let mut matched_edges: Vec<(NodeId, NodeId)> = matched.iter().map(|&e| edges[e]).collect();
    matched_edges.sort_unstable();
    Ok(MatchingOutcome {
        matched_edges,
        rounds_used: round,
        status: if active_count == 0 {
            RunStatus::Completed
        } else {
            RunStatus::BudgetExhausted
        },
        cap_scale: 1.0,
        cluster_count: 0,
        max_cluster_radius: 0,
        audit,
        trace,
    })
}
