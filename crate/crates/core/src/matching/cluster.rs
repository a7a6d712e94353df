use serde::{Deserialize, Serialize};

use super::{
    nominate, weight_sums, AuditSummary, MatchingError, MatchingOutcome, MatchingParams,
    RoundRecord, RunStatus, Violation, ViolationKind, AUDIT_TOLERANCE,
};
use crate::decomposition::{partition, sample_shifts, Clustering, ShiftDistribution};
use crate::graph::{EdgeId, Graph, LineGraphMap, NodeId};

/// Outcome of checking that every node's initial cap sum is at most
/// `K^-3 / 4`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapValidation {
    pub valid: bool,
    pub threshold: f64,
    pub max_initial_sum: f64,
    pub worst_node: Option<NodeId>,
    /// Uniform factor that brings every sum under the threshold; 1 when
    /// already valid.
    pub scale: f64,
}

fn initial_cap(alpha: f64, radius: usize) -> f64 {
    (-4.0 * alpha / (1.0 + radius as f64)).exp()
}

/// Edge clusters adjacent to each node, ascending by cluster index.
fn adjacent_edge_clusters(g: &Graph, map: &LineGraphMap, lgc: &Clustering) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); g.n()];
    for (e, &(u, v)) in map.base_edges().iter().enumerate() {
        let k = lgc.cluster_of(e);
        out[u].push(k);
        out[v].push(k);
    }
    for list in &mut out {
        list.sort_unstable();
        list.dedup();
    }
    out
}

/// Checks `sum_C exp(-4 alpha / (1 + r_C)) <= K^-3 / 4` at every node, the
/// sum running over edge clusters adjacent to the node.
pub fn validate_params(
    g: &Graph,
    lgc: &Clustering,
    alpha: f64,
    update_factor: f64,
) -> CapValidation {
    let map = g.line_graph();
    let threshold = 0.25 * update_factor.powi(-3);
    let mut max_initial_sum = 0.0;
    let mut worst_node = None;
    for (u, clusters) in adjacent_edge_clusters(g, &map, lgc).iter().enumerate() {
        let sum: f64 = clusters
            .iter()
            .map(|&k| initial_cap(alpha, lgc.radius(k)))
            .sum();
        if sum > max_initial_sum {
            max_initial_sum = sum;
            worst_node = Some(u);
        }
    }
    let valid = max_initial_sum <= threshold;
    // shave a little so the scaled sums land strictly under the threshold
    let scale = if valid {
        1.0
    } else {
        threshold / max_initial_sum * (1.0 - 1e-12)
    };
    CapValidation {
        valid,
        threshold,
        max_initial_sum,
        worst_node,
        scale,
    }
}

/// Clusters the line graph with poly-tail shifts and runs the cluster
/// matching on it.
pub fn run_cluster_matching(
    g: &Graph,
    params: &MatchingParams,
) -> Result<MatchingOutcome, MatchingError> {
    params.check()?;
    let map = g.line_graph();
    let dist = ShiftDistribution::PolyTail {
        alpha: params.alpha,
    };
    let shifts = sample_shifts(&dist, map.edge_count(), params.seed.derive(0));
    let lgc = partition(&map.lg, &shifts).expect("sampled shifts are valid");
    run_cluster_matching_on(g, &map, &lgc, params)
}

struct EdgeCluster {
    edges: Vec<EdgeId>,
    /// Nodes touching the cluster's edges, ascending.
    nodes: Vec<NodeId>,
    period: usize,
}

impl EdgeCluster {
    fn slot(&self, u: NodeId) -> usize {
        self.nodes.binary_search(&u).expect("node touches cluster")
    }
}

/// Weights computed at a period start, applied at its end.
struct Delivery {
    due: usize,
    weights: Vec<f64>,
    /// Per cluster node: did the node's cap bind during the greedy raise.
    bound: Vec<bool>,
}

struct Caps {
    /// `entries[u]`: `(cluster, cap)` ascending by cluster.
    entries: Vec<Vec<(usize, f64)>>,
}

impl Caps {
    fn slot(&self, u: NodeId, cluster: usize) -> usize {
        self.entries[u]
            .binary_search_by_key(&cluster, |&(k, _)| k)
            .expect("cap exists for adjacent cluster")
    }

    fn get(&self, u: NodeId, cluster: usize) -> f64 {
        self.entries[u][self.slot(u, cluster)].1
    }

    fn set(&mut self, u: NodeId, cluster: usize, cap: f64) {
        let i = self.slot(u, cluster);
        self.entries[u][i].1 = cap;
    }

    fn sums(&self) -> Vec<f64> {
        self.entries
            .iter()
            .map(|l| l.iter().map(|&(_, c)| c).sum())
            .collect()
    }
}

/// Runs the cluster matching on a given line-graph clustering.
///
/// Each round executes, in order: deliveries of weights computed one period
/// earlier and the resulting cap updates; period starts, which snapshot caps
/// and weights and compute the next weights; self-nomination on even rounds;
/// and the per-node audits.
pub fn run_cluster_matching_on(
    g: &Graph,
    map: &LineGraphMap,
    lgc: &Clustering,
    params: &MatchingParams,
) -> Result<MatchingOutcome, MatchingError> {
    params.check()?;
    let k = params.update_factor;
    let validation = validate_params(g, lgc, params.alpha, k);
    if !validation.valid && !params.scale_caps {
        return Err(MatchingError::CapPremise {
            node: validation.worst_node.unwrap_or(0),
            max_sum: validation.max_initial_sum,
            threshold: validation.threshold,
            scale: validation.scale,
        });
    }
    let raise_threshold = validation.threshold;
    let cap_ceiling = 0.25 / k;
    let m = map.edge_count();
    let edges = map.base_edges();

    let clusters: Vec<EdgeCluster> = (0..lgc.cluster_count())
        .map(|c| {
            let members = lgc.members(c).to_vec();
            let mut nodes: Vec<NodeId> = members
                .iter()
                .flat_map(|&e| [edges[e].0, edges[e].1])
                .collect();
            nodes.sort_unstable();
            nodes.dedup();
            EdgeCluster {
                edges: members,
                nodes,
                period: 2 * (lgc.radius(c) + 1),
            }
        })
        .collect();
    let mut caps = Caps {
        entries: adjacent_edge_clusters(g, map, lgc)
            .into_iter()
            .map(|l| {
                l.into_iter()
                    .map(|c| {
                        (
                            c,
                            validation.scale * initial_cap(params.alpha, lgc.radius(c)),
                        )
                    })
                    .collect()
            })
            .collect(),
    };

    let mut rng = params.seed.derive(1).rng();
    let mut weights = vec![0.0; m];
    let mut active = vec![true; m];
    let mut active_count = m;
    let mut matched: Vec<EdgeId> = Vec::new();
    let mut pending: Vec<Option<Delivery>> = (0..clusters.len()).map(|_| None).collect();
    let mut audit = AuditSummary::default();
    let mut trace = Vec::new();

    let mut round = 0;
    loop {
        if params.fixed_point && active_count == 0 {
            break;
        }
        if round >= params.rounds {
            break;
        }
        let mut round_violations = Vec::new();
        let mut trace_sink = params.keep_trace.then_some(&mut round_violations);

        // deliveries: decisions use the cap sums from before this round's commits
        let due: Vec<usize> = (0..clusters.len())
            .filter(|&c| pending[c].as_ref().is_some_and(|d| d.due == round))
            .collect();
        if !due.is_empty() {
            let decision_sums = caps.sums();
            for &c in &due {
                let delivery = pending[c].take().expect("filtered on pending");
                let cluster = &clusters[c];
                let old_caps: Vec<f64> = cluster.nodes.iter().map(|&u| caps.get(u, c)).collect();
                for (&e, &w) in cluster.edges.iter().zip(&delivery.weights) {
                    weights[e] = if active[e] { w } else { 0.0 };
                }
                let mut new_caps = old_caps.clone();
                for (i, &u) in cluster.nodes.iter().enumerate() {
                    if delivery.bound[i] {
                        if decision_sums[u] <= raise_threshold {
                            new_caps[i] = old_caps[i] * k * k;
                        } else {
                            audit.unchanged_caps += 1;
                        }
                    } else {
                        new_caps[i] = old_caps[i] / k;
                    }
                    caps.set(u, c, new_caps[i]);
                }
                for &e in &cluster.edges {
                    if !active[e] {
                        continue;
                    }
                    let (u, v) = edges[e];
                    let (iu, iv) = (cluster.slot(u), cluster.slot(v));
                    audit.trichotomy_checks += 1;
                    let before = old_caps[iu] * old_caps[iv];
                    let after = new_caps[iu] * new_caps[iv];
                    let holds = decision_sums[u] > raise_threshold
                        || decision_sums[v] > raise_threshold
                        || after >= k * before * (1.0 - AUDIT_TOLERANCE);
                    if !holds {
                        let v = Violation {
                            round,
                            kind: ViolationKind::Trichotomy,
                            at: e,
                            value: after,
                            bound: k * before,
                        };
                        audit.record(v, trace_sink.as_deref_mut());
                    }
                }
            }
        }

        // period starts
        let mut period_starts = 0;
        for (c, cluster) in clusters.iter().enumerate() {
            if round % cluster.period != 0 {
                continue;
            }
            period_starts += 1;
            let snapshot: Vec<f64> = cluster.nodes.iter().map(|&u| caps.get(u, c)).collect();
            let mut sums = vec![0.0; cluster.nodes.len()];
            let mut next: Vec<f64> = cluster
                .edges
                .iter()
                .map(|&e| {
                    if !active[e] {
                        return 0.0;
                    }
                    let w = weights[e] / k;
                    let (u, v) = edges[e];
                    sums[cluster.slot(u)] += w;
                    sums[cluster.slot(v)] += w;
                    w
                })
                .collect();
            let mut bound = vec![false; cluster.nodes.len()];
            for (j, &e) in cluster.edges.iter().enumerate() {
                if !active[e] {
                    continue;
                }
                let (u, v) = edges[e];
                let (iu, iv) = (cluster.slot(u), cluster.slot(v));
                let slack_u = (snapshot[iu] - sums[iu]).max(0.0);
                let slack_v = (snapshot[iv] - sums[iv]).max(0.0);
                let inc = slack_u.min(slack_v);
                next[j] += inc;
                sums[iu] += inc;
                sums[iv] += inc;
                bound[iu] |= slack_u <= slack_v;
                bound[iv] |= slack_v <= slack_u;
            }
            pending[c] = Some(Delivery {
                due: round + cluster.period,
                weights: next,
                bound,
            });
        }

        let nomination = round % 2 == 0;
        if nomination {
            active_count -= nominate(&map.lg, &mut weights, &mut active, &mut matched, &mut rng);
        }

        // audits
        let cap_sums = caps.sums();
        let w_sums = weight_sums(g, edges, &weights);
        let cap_sums_max = cap_sums.iter().copied().fold(0.0, f64::max);
        let weight_sums_max = w_sums.iter().copied().fold(0.0, f64::max);
        audit.max_cap_sum = audit.max_cap_sum.max(cap_sums_max);
        audit.max_weight_sum = audit.max_weight_sum.max(weight_sums_max);
        for u in 0..g.n() {
            if cap_sums[u] > cap_ceiling + AUDIT_TOLERANCE {
                let v = Violation {
                    round,
                    kind: ViolationKind::CapSum,
                    at: u,
                    value: cap_sums[u],
                    bound: cap_ceiling,
                };
                audit.record(v, trace_sink.as_deref_mut());
            }
            if w_sums[u] > 0.25 + AUDIT_TOLERANCE {
                let v = Violation {
                    round,
                    kind: ViolationKind::WeightSum,
                    at: u,
                    value: w_sums[u],
                    bound: 0.25,
                };
                audit.record(v, trace_sink.as_deref_mut());
            }
            if caps.entries[u].iter().any(|&(_, c)| c < 0.0) {
                let v = Violation {
                    round,
                    kind: ViolationKind::NegativeValue,
                    at: u,
                    value: -1.0,
                    bound: 0.0,
                };
                audit.record(v, trace_sink.as_deref_mut());
            }
        }
        if weights.iter().any(|&w| w < 0.0) {
            let v = Violation {
                round,
                kind: ViolationKind::NegativeValue,
                at: usize::MAX,
                value: -1.0,
                bound: 0.0,
            };
            audit.record(v, trace_sink);
        }

        if params.keep_trace {
            trace.push(RoundRecord {
                round,
                active_edges: active_count,
                matched: matched.len(),
                cap_sums_max,
                weight_sums_max,
                deliveries: due.len(),
                period_starts,
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
        cap_scale: validation.scale,
        cluster_count: lgc.cluster_count(),
        max_cluster_radius: lgc.max_radius(),
        audit,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphModel};
    use crate::matching::{is_maximal_matching, verify_matching};
    use crate::Seed;
    use proptest::prelude::*;

    fn params(alpha: f64, k: f64, seed: u64) -> MatchingParams {
        MatchingParams {
            scale_caps: true,
            ..MatchingParams::new(alpha, k, Seed(seed))
        }
    }

    #[test]
    fn no_edges_means_no_work() {
        let out = run_cluster_matching(&Graph::empty(5), &params(2.0, 2.0, 0)).unwrap();
        assert!(out.matched_edges.is_empty());
        assert_eq!(out.rounds_used, 0);
        assert_eq!(out.status, RunStatus::Completed);
        let v = validate_params(
            &Graph::empty(5),
            &partition(&Graph::empty(0), &[]).unwrap(),
            2.0,
            2.0,
        );
        assert!(v.valid);
    }

    #[test]
    fn single_edge_validation() {
        // e^-160 <= 1/32
        let g = generate(&GraphModel::Path(2), Seed(0)).unwrap();
        let lgc = partition(&g.line_graph().lg, &[0.0]).unwrap();
        let v = validate_params(&g, &lgc, 40.0, 2.0);
        assert!(v.valid);
        assert_eq!(v.max_initial_sum, (-160.0f64).exp());
        assert_eq!(v.threshold, 1.0 / 32.0);
    }

    #[test]
    fn dense_graph_with_small_alpha_needs_scaling() {
        let g = generate(&GraphModel::Complete(6), Seed(0)).unwrap();
        let map = g.line_graph();
        let lgc = partition(&map.lg, &vec![0.0; map.edge_count()]).unwrap();
        // five singleton clusters of radius 0 per node: 5 e^-2
        let v = validate_params(&g, &lgc, 0.5, 2.0);
        assert!(!v.valid);
        assert!((v.max_initial_sum - 5.0 * (-2.0f64).exp()).abs() < 1e-15);
        assert!(v.scale < 1.0 && v.scale * v.max_initial_sum <= v.threshold);
        let strict = MatchingParams::new(0.5, 2.0, Seed(0));
        assert!(matches!(
            run_cluster_matching_on(&g, &map, &lgc, &strict),
            Err(MatchingError::CapPremise { .. })
        ));
    }

    #[test]
    fn single_edge_is_matched() {
        let g = generate(&GraphModel::Path(2), Seed(0)).unwrap();
        for seed in 0..20 {
            let out = run_cluster_matching(&g, &params(1.0, 2.0, seed)).unwrap();
            assert_eq!(out.status, RunStatus::Completed);
            assert_eq!(out.matched_edges, vec![(0, 1)]);
        }
    }

    #[test]
    fn triangle_matches_one_edge() {
        let g = generate(&GraphModel::Complete(3), Seed(0)).unwrap();
        for seed in 0..20 {
            let out = run_cluster_matching(&g, &params(2.0, 2.0, seed)).unwrap();
            assert_eq!(out.status, RunStatus::Completed);
            assert_eq!(out.matched_edges.len(), 1);
        }
    }

    #[test]
    fn trace_is_kept_on_request() {
        let g = generate(&GraphModel::Star(5), Seed(0)).unwrap();
        let out = run_cluster_matching(
            &g,
            &MatchingParams {
                keep_trace: true,
                ..params(1.0, 2.0, 3)
            },
        )
        .unwrap();
        assert_eq!(out.trace.len(), out.rounds_used);
        assert!(out
            .trace
            .iter()
            .enumerate()
            .all(|(i, r)| r.round == i && r.nomination == (i % 2 == 0)));
        assert_eq!(out.trace.last().unwrap().active_edges, 0);
    }

    #[test]
    fn budgeted_mode_runs_exactly_the_budget() {
        let g = generate(&GraphModel::Path(4), Seed(0)).unwrap();
        let p = MatchingParams {
            fixed_point: false,
            rounds: 37,
            ..params(1.0, 2.0, 1)
        };
        assert_eq!(run_cluster_matching(&g, &p).unwrap().rounds_used, 37);
    }

    #[test]
    fn deterministic_given_seed() {
        let g = generate(&GraphModel::ErdosRenyi { n: 30, p: 0.2 }, Seed(4)).unwrap();
        let p = MatchingParams {
            keep_trace: true,
            ..params(2.0, 2.0, 9)
        };
        assert_eq!(
            run_cluster_matching(&g, &p).unwrap(),
            run_cluster_matching(&g, &p).unwrap()
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn valid_maximal_and_audited(
            n in 2usize..30,
            p in 0.05f64..0.6,
            seed in any::<u64>(),
            alpha in prop::sample::select(vec![1.0, 2.0, 4.0]),
            k in prop::sample::select(vec![2.0, 3.0]),
        ) {
            let g = generate(&GraphModel::ErdosRenyi { n, p }, Seed(seed)).unwrap();
            let out = run_cluster_matching(&g, &params(alpha, k, seed)).unwrap();
            prop_assert!(verify_matching(&g, &out.matched_edges));
            prop_assert!(out.audit.clean(), "{:?}", out.audit.recorded);
            if out.status == RunStatus::Completed {
                prop_assert!(is_maximal_matching(&g, &out.matched_edges));
            }
        }
    }
}
