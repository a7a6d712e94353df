use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{CoverStatus, NodeState, VCParams, VcError};
use crate::decomposition::{partition, sample_shifts, Clustering, ShiftDistribution};
use crate::graph::{Graph, NodeId};

/// Relative slack on the deactivation threshold, absorbing rounding in the
/// reserve arithmetic.
const THRESHOLD_SLACK: f64 = 1e-12;

/// Weights below this count as negative in the audit.
const NEGATIVE_TOLERANCE: f64 = -1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    One,
    Two,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseReport {
    pub stage: usize,
    pub phase: Phase,
    pub rounds: usize,
    /// False when the round budget cut the phase off.
    pub reached_fixed_point: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunAudit {
    /// Smallest residual weight seen, in units of the largest input weight.
    pub min_weight: f64,
    /// (node, round) pairs with weight below `-1e-12`.
    pub negative_weights: usize,
    /// Active-active edges left at a phase-1 fixed point.
    pub phase1_exit_violations: usize,
    /// Active nodes left at a phase-2 fixed point.
    pub phase2_exit_violations: usize,
    /// Inactive nodes at stage end above the decay threshold.
    pub decay_violations: usize,
    pub dichotomy_checks: usize,
    /// Request batches after which an active node neither lost enough weight
    /// nor saw enough requested clusters drop out.
    pub dichotomy_violations: usize,
    /// Nodes whose phase-1 requests could outrun their cluster's reserve and
    /// were left unscaled.
    pub premise_failures: usize,
    pub min_request_scale: f64,
    pub budget_cutoffs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverRoundRecord {
    pub stage: usize,
    pub phase: Phase,
    pub round: usize,
    pub active: usize,
    pub inactive: usize,
    pub in_cover: usize,
    pub not_in_cover: usize,
    pub min_weight: f64,
    pub in_flight: usize,
}

/// Neighbor clusters of one radius, each with the node's neighbors in it.
#[derive(Debug, Clone)]
struct RadiusClass {
    radius: usize,
    clusters: Vec<(usize, Vec<NodeId>)>,
}

struct Request {
    requester: NodeId,
    amount: f64,
    targets: Vec<NodeId>,
}

/// Budgets granted by one cluster to one requester, applied on delivery.
struct Batch {
    requester: NodeId,
    requested: f64,
    parts: Vec<(NodeId, f64)>,
}

/// One request batch of a node for one radius class, checked for progress
/// once its answers have landed and neighbors have heard about any state
/// changes they caused.
struct Probe {
    node: NodeId,
    class: usize,
    weight_at_send: f64,
    clusters_at_send: usize,
    delivery: usize,
    weight_after: f64,
}

/// The state of a vertex-cover computation, advanced stage by stage.
#[derive(Debug, Clone)]
pub struct CoverRun {
    graph: Graph,
    params: VCParams,
    clustering: Clustering,
    edges: Vec<(NodeId, NodeId)>,
    classes: Vec<Vec<RadiusClass>>,
    request_scale: Vec<f64>,
    input: Vec<f64>,
    /// Largest input weight. The run works on weights divided by it, which
    /// leaves every decision unchanged and keeps rounding residue relative.
    scale: f64,
    pub(crate) w0: Vec<f64>,
    pub(crate) w: Vec<f64>,
    w_stage: Vec<f64>,
    w_phase2: Vec<f64>,
    pub(crate) state: Vec<NodeState>,
    /// Charge per edge id, in the order of `Graph::edges`.
    pub(crate) delta: Vec<f64>,
    /// Residual weight of each `InCover` node when it joined.
    pub(crate) join_weight: Vec<Option<f64>>,
    /// Global round in which each node terminated.
    pub(crate) terminated_at: Vec<Option<usize>>,
    eps_prime: f64,
    stage: usize,
    rounds_used: usize,
    phases: Vec<PhaseReport>,
    audit: RunAudit,
    trace: Vec<CoverRoundRecord>,
}

impl CoverRun {
    /// Clusters the nodes with poly-tail shifts and sets every node to its
    /// input weight.
    pub fn new(g: &Graph, params: &VCParams) -> Result<Self, VcError> {
        params.check()?;
        let input = g.node_weights().ok_or(VcError::MissingWeights)?.to_vec();
        let shifts = sample_shifts(
            &ShiftDistribution::PolyTail {
                alpha: params.alpha,
            },
            g.n(),
            params.seed.derive(0),
        );
        let clustering = partition(g, &shifts).expect("sampled shifts are valid");
        Ok(Self::with_clustering(g, params, clustering, input))
    }

    fn with_clustering(
        g: &Graph,
        params: &VCParams,
        clustering: Clustering,
        input: Vec<f64>,
    ) -> Self {
        let n = g.n();
        let largest = input.iter().copied().fold(0.0, f64::max);
        let scale = if largest > 0.0 { largest } else { 1.0 };
        let w0: Vec<f64> = input.iter().map(|x| x / scale).collect();
        let classes: Vec<Vec<RadiusClass>> =
            (0..n).map(|v| radius_classes(g, &clustering, v)).collect();
        let mut audit = RunAudit {
            min_weight: if n == 0 {
                0.0
            } else {
                w0.iter().copied().fold(f64::INFINITY, f64::min)
            },
            negative_weights: 0,
            phase1_exit_violations: 0,
            phase2_exit_violations: 0,
            decay_violations: 0,
            dichotomy_checks: 0,
            dichotomy_violations: 0,
            premise_failures: 0,
            min_request_scale: 1.0,
            budget_cutoffs: 0,
        };

        // phase-1 requests of v can land after the last reserve-respecting
        // snapshot of v's cluster; bound their total by the reserve
        let theta = params.decay_threshold();
        let denominator = params.log_n.powf(params.exponents.request_phase1);
        let mut request_scale = vec![1.0; n];
        for v in 0..n {
            let own_period = 2 * (clustering.radius(clustering.cluster_of(v)) + 1);
            let exposure: f64 = classes[v]
                .iter()
                .map(|c| sends_in_window(own_period, 2 * (c.radius + 1)) as f64 / denominator)
                .sum();
            if exposure > theta {
                if params.request_scaling {
                    request_scale[v] = theta / exposure * (1.0 - 1e-12);
                } else {
                    audit.premise_failures += 1;
                }
            }
        }
        audit.min_request_scale = request_scale.iter().copied().fold(1.0, f64::min);

        CoverRun {
            graph: g.clone(),
            params: params.clone(),
            clustering,
            edges: g.edges(),
            classes,
            request_scale,
            w: w0.clone(),
            w_stage: w0.clone(),
            w_phase2: w0.clone(),
            state: vec![NodeState::Active; n],
            delta: vec![0.0; g.edge_count()],
            join_weight: vec![None; n],
            terminated_at: vec![None; n],
            eps_prime: params.eps_prime(),
            w0,
            input,
            scale,
            stage: 0,
            rounds_used: 0,
            phases: Vec::new(),
            audit,
            trace: Vec::new(),
        }
    }

    pub fn stage(&self) -> usize {
        self.stage
    }

    pub fn rounds_used(&self) -> usize {
        self.rounds_used
    }

    pub fn all_terminal(&self) -> bool {
        self.state.iter().all(|s| s.is_terminal())
    }

    pub fn status(&self) -> CoverStatus {
        if self.all_terminal() {
            CoverStatus::Completed
        } else {
            CoverStatus::StageCapExhausted
        }
    }

    /// `InCover` nodes, ascending.
    pub fn cover(&self) -> Vec<NodeId> {
        (0..self.state.len())
            .filter(|&v| self.state[v] == NodeState::InCover)
            .collect()
    }

    /// Input weight of the cover.
    pub fn cover_weight(&self) -> f64 {
        self.cover().iter().map(|&v| self.input[v]).sum()
    }

    pub fn states(&self) -> &[NodeState] {
        &self.state
    }

    /// Residual weights in input units.
    pub fn weights(&self) -> Vec<f64> {
        self.w.iter().map(|x| x * self.scale).collect()
    }

    pub fn input_weights(&self) -> &[f64] {
        &self.input
    }

    /// The largest input weight, or 1 if all weights are zero.
    pub fn weight_scale(&self) -> f64 {
        self.scale
    }

    /// Accumulated charge per edge in input units, indexed like
    /// [`Graph::edges`].
    pub fn edge_charges(&self) -> Vec<f64> {
        self.delta.iter().map(|x| x * self.scale).collect()
    }

    pub fn clustering(&self) -> &Clustering {
        &self.clustering
    }

    pub fn audit(&self) -> &RunAudit {
        &self.audit
    }

    pub fn phases(&self) -> &[PhaseReport] {
        &self.phases
    }

    pub fn trace(&self) -> &[CoverRoundRecord] {
        &self.trace
    }

    pub fn params(&self) -> &VCParams {
        &self.params
    }

    /// Sets every non-terminated node active and records its stage weight.
    pub fn begin_stage(&mut self) {
        self.stage += 1;
        for v in 0..self.state.len() {
            if !self.state[v].is_terminal() {
                self.state[v] = NodeState::Active;
                self.w_stage[v] = self.w[v];
            }
        }
    }

    /// Checks that every inactive node ended the stage below the decay
    /// threshold.
    pub fn end_stage(&mut self) {
        let theta = self.params.decay_threshold();
        for v in 0..self.state.len() {
            if self.state[v] == NodeState::Inactive
                && self.w[v] > theta * self.w_stage[v] * (1.0 + THRESHOLD_SLACK)
            {
                self.audit.decay_violations += 1;
            }
        }
    }

    /// Runs phase 1: active nodes request until no edge joins two active
    /// nodes.
    pub fn phase1(&mut self) -> PhaseReport {
        let report = self.run_phase(Phase::One);
        if report.reached_fixed_point {
            self.audit.phase1_exit_violations += self.active_edges().len();
        }
        report
    }

    /// Runs phase 2: active nodes drain their inactive neighbors until every
    /// active node terminates. Fails if an edge joins two active nodes.
    pub fn phase2(&mut self) -> Result<PhaseReport, VcError> {
        if let Some(&(u, v)) = self.active_edges().first() {
            return Err(VcError::ActiveEdgeAtPhase2 {
                stage: self.stage,
                u,
                v,
            });
        }
        self.w_phase2.clone_from(&self.w);
        let report = self.run_phase(Phase::Two);
        if report.reached_fixed_point {
            self.audit.phase2_exit_violations += self
                .state
                .iter()
                .filter(|&&s| s == NodeState::Active)
                .count();
        }
        Ok(report)
    }

    fn active_edges(&self) -> Vec<(NodeId, NodeId)> {
        self.edges
            .iter()
            .copied()
            .filter(|&(u, v)| {
                self.state[u] == NodeState::Active && self.state[v] == NodeState::Active
            })
            .collect()
    }

    fn goal_reached(&self, phase: Phase) -> bool {
        match phase {
            Phase::One => self.active_edges().is_empty(),
            Phase::Two => self.state.iter().all(|&s| s != NodeState::Active),
        }
    }

    fn edge_id(&self, u: NodeId, v: NodeId) -> usize {
        self.edges
            .binary_search(&(u.min(v), u.max(v)))
            .expect("edge of the graph")
    }

    /// Neighbor clusters of `v`'s class that `v` currently addresses: those
    /// holding a neighbor that is active (phase 1) or not terminated
    /// (phase 2) according to `view`.
    fn addressed(&self, v: NodeId, class: usize, phase: Phase, view: &[NodeState]) -> Vec<usize> {
        let counts = |s: NodeState| match phase {
            Phase::One => s == NodeState::Active,
            Phase::Two => !s.is_terminal(),
        };
        self.classes[v][class]
            .clusters
            .iter()
            .enumerate()
            .filter(|(_, (_, members))| members.iter().any(|&u| counts(view[u])))
            .map(|(i, _)| i)
            .collect()
    }

    fn deliver(&mut self, batch: Batch, outstanding: &mut [f64]) {
        let u = batch.requester;
        for (x, amount) in batch.parts {
            self.w[u] -= amount;
            self.w[x] -= amount;
            let e = self.edge_id(u, x);
            self.delta[e] += amount;
        }
        outstanding[u] -= batch.requested;
    }

    fn state_checks(&mut self, phase: Phase, view: &[NodeState], global_round: usize) {
        let n = self.state.len();
        match phase {
            Phase::One => {
                let theta = self.params.decay_threshold();
                for v in 0..n {
                    if self.state[v] == NodeState::Active
                        && self.w[v] <= theta * self.w_stage[v] * (1.0 + THRESHOLD_SLACK)
                    {
                        self.state[v] = NodeState::Inactive;
                    }
                }
            }
            Phase::Two => {
                for v in 0..n {
                    if self.state[v].is_terminal() {
                        continue;
                    }
                    if self.w[v] <= self.eps_prime * self.w0[v] {
                        self.state[v] = NodeState::InCover;
                        self.join_weight[v] = Some(self.w[v]);
                        self.terminated_at[v] = Some(global_round);
                    } else if self
                        .graph
                        .neighbors(v)
                        .iter()
                        .all(|&u| view[u].is_terminal())
                    {
                        self.state[v] = NodeState::NotInCover;
                        self.terminated_at[v] = Some(global_round);
                    }
                }
            }
        }
    }

    fn track_weights(&mut self) -> f64 {
        let mut min = f64::INFINITY;
        for &x in &self.w {
            min = min.min(x);
            if x < NEGATIVE_TOLERANCE {
                self.audit.negative_weights += 1;
            }
        }
        if min.is_finite() {
            self.audit.min_weight = self.audit.min_weight.min(min);
        }
        min
    }

    /// Round order: deliveries, state checks, progress probes, requests,
    /// cluster period starts. Neighbors see state changes one round late.
    fn run_phase(&mut self, phase: Phase) -> PhaseReport {
        let n = self.state.len();
        let theta = self.params.decay_threshold();
        let log_n = self.params.log_n;
        let ex = self.params.exponents;
        let (denominator1, denominator2) =
            (log_n.powf(ex.request_phase1), log_n.powf(ex.request_phase2));
        let cluster_count = self.clustering.cluster_count();

        let mut pending: BTreeMap<usize, Vec<Batch>> = BTreeMap::new();
        let mut outstanding = vec![0.0; n];
        let mut probes: Vec<Probe> = Vec::new();
        let mut view = self.state.clone();
        let mut round = 0;
        let reached_fixed_point;

        loop {
            let global_round = self.rounds_used + round;
            if let Some(batches) = pending.remove(&round) {
                for b in batches {
                    self.deliver(b, &mut outstanding);
                }
            }
            let min_weight = self.track_weights();
            for p in probes.iter_mut().filter(|p| p.delivery == round) {
                p.weight_after = self.w[p.node];
            }

            self.state_checks(phase, &view, global_round);

            // probes whose answers landed last round; `view` is that round's end
            let (due, rest): (Vec<Probe>, Vec<Probe>) =
                probes.into_iter().partition(|p| p.delivery + 1 == round);
            probes = rest;
            for p in due {
                if view[p.node] != NodeState::Active {
                    continue;
                }
                self.audit.dichotomy_checks += 1;
                let dropped = p.weight_at_send - p.weight_after;
                let clusters_now = self.addressed(p.node, p.class, phase, &view).len();
                let enough_drop = dropped >= self.w_stage[p.node] / log_n.powf(ex.drop);
                let enough_shrink =
                    clusters_now as f64 <= p.clusters_at_send as f64 * log_n.powf(-ex.shrink);
                if !enough_drop && !enough_shrink {
                    self.audit.dichotomy_violations += 1;
                }
            }

            // requests
            let mut inbox: Vec<Vec<Request>> = (0..cluster_count).map(|_| Vec::new()).collect();
            for v in 0..n {
                if self.state[v] != NodeState::Active {
                    continue;
                }
                for class in 0..self.classes[v].len() {
                    let period = 2 * (self.classes[v][class].radius + 1);
                    if round % period != 0 {
                        continue;
                    }
                    let addressed = self.addressed(v, class, phase, &view);
                    let d = addressed.len();
                    if d == 0 {
                        continue;
                    }
                    let amount = match phase {
                        Phase::One => {
                            self.request_scale[v] * self.w_stage[v] / (d as f64 * denominator1)
                        }
                        Phase::Two => {
                            let room = (self.w[v] - outstanding[v]).max(0.0) / d as f64;
                            (self.w_phase2[v] / (d as f64 * denominator2)).min(room)
                        }
                    };
                    if amount <= 0.0 {
                        continue;
                    }
                    for &i in &addressed {
                        let (cluster, members) = &self.classes[v][class].clusters[i];
                        inbox[*cluster].push(Request {
                            requester: v,
                            amount,
                            targets: members.clone(),
                        });
                        outstanding[v] += amount;
                    }
                    probes.push(Probe {
                        node: v,
                        class,
                        weight_at_send: self.w[v],
                        clusters_at_send: d,
                        delivery: round + period,
                        weight_after: self.w[v],
                    });
                }
            }

            // cluster period starts: budgets from this round's weights
            for (c, requests) in inbox.into_iter().enumerate() {
                let period = 2 * (self.clustering.radius(c) + 1);
                if round % period != 0 {
                    debug_assert!(
                        requests.is_empty(),
                        "requests only reach clusters at period starts"
                    );
                    continue;
                }
                let mut taken: BTreeMap<NodeId, f64> = BTreeMap::new();
                for req in requests {
                    let mut given = 0.0;
                    let mut parts = Vec::new();
                    for &x in &req.targets {
                        if self.state[x].is_terminal() {
                            continue;
                        }
                        let available = match phase {
                            Phase::One => (self.w[x] - theta * self.w_stage[x]).max(0.0),
                            Phase::Two => self.w[x].max(0.0),
                        };
                        let used = taken.entry(x).or_insert(0.0);
                        let budget = (req.amount - given).min(available - *used);
                        if budget > 0.0 {
                            given += budget;
                            *used += budget;
                            parts.push((x, budget));
                        }
                    }
                    pending.entry(round + period).or_default().push(Batch {
                        requester: req.requester,
                        requested: req.amount,
                        parts,
                    });
                }
            }

            if self.params.keep_trace {
                self.record(
                    phase,
                    round,
                    min_weight,
                    pending.values().map(Vec::len).sum(),
                );
            }
            view.clone_from(&self.state);
            round += 1;

            if self.params.fixed_point && pending.is_empty() && self.goal_reached(phase) {
                reached_fixed_point = true;
                break;
            }
            if round >= self.params.phase_round_budget {
                for (_, batches) in std::mem::take(&mut pending) {
                    for b in batches {
                        self.deliver(b, &mut outstanding);
                    }
                }
                self.track_weights();
                self.state_checks(phase, &view, self.rounds_used + round);
                reached_fixed_point = self.goal_reached(phase);
                if !reached_fixed_point {
                    self.audit.budget_cutoffs += 1;
                }
                break;
            }
        }

        self.rounds_used += round;
        let report = PhaseReport {
            stage: self.stage,
            phase,
            rounds: round,
            reached_fixed_point,
        };
        self.phases.push(report.clone());
        report
    }

    fn record(&mut self, phase: Phase, round: usize, min_weight: f64, in_flight: usize) {
        let count = |s: NodeState| self.state.iter().filter(|&&x| x == s).count();
        self.trace.push(CoverRoundRecord {
            stage: self.stage,
            phase,
            round,
            active: count(NodeState::Active),
            inactive: count(NodeState::Inactive),
            in_cover: count(NodeState::InCover),
            not_in_cover: count(NodeState::NotInCover),
            min_weight: if min_weight.is_finite() {
                min_weight
            } else {
                0.0
            },
            in_flight,
        });
    }
}

fn radius_classes(g: &Graph, c: &Clustering, v: NodeId) -> Vec<RadiusClass> {
    let mut by_cluster: BTreeMap<usize, Vec<NodeId>> = BTreeMap::new();
    for &u in g.neighbors(v) {
        by_cluster.entry(c.cluster_of(u)).or_default().push(u);
    }
    let mut by_radius: BTreeMap<usize, Vec<(usize, Vec<NodeId>)>> = BTreeMap::new();
    for (cluster, members) in by_cluster {
        by_radius
            .entry(c.radius(cluster))
            .or_default()
            .push((cluster, members));
    }
    by_radius
        .into_iter()
        .map(|(radius, clusters)| RadiusClass { radius, clusters })
        .collect()
}

/// Largest number of send rounds (multiples of `send_period`) that fall in
/// `[s - send_period + 1, s + own_period - 1]` for a period start `s` of the
/// node's own cluster. Those are the requests whose answers can land between
/// one reserve-respecting snapshot of the node and the point where it stops
/// sending.
fn sends_in_window(own_period: usize, send_period: usize) -> usize {
    let lcm = own_period / gcd(own_period, send_period) * send_period;
    // one full cycle away from round 0, where the window would be clipped
    (lcm..2 * lcm)
        .step_by(own_period)
        .map(|s| {
            let lo = s + 1 - send_period;
            let hi = s + own_period - 1;
            (lo..=hi).filter(|t| t % send_period == 0).count()
        })
        .max()
        .unwrap_or(0)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphModel};
    use crate::vertex_cover::{run_mwvc, Profile};
    use crate::Seed;

    fn singleton_run(g: &Graph, params: &VCParams) -> CoverRun {
        let c = partition(g, &vec![0.0; g.n()]).unwrap();
        CoverRun::with_clustering(g, params, c, g.node_weights().unwrap().to_vec())
    }

    #[test]
    fn send_window_counts() {
        // own period 2, sends every 2: window [s-1, s+1] holds only s
        assert_eq!(sends_in_window(2, 2), 1);
        // own period 2, sends every 4: window [s-3, s+1] with s even
        assert_eq!(sends_in_window(2, 4), 1);
        // own period 4, sends every 2: window [s-1, s+3] holds s, s+2
        assert_eq!(sends_in_window(4, 2), 2);
        // own period 6, sends every 2: window [s-1, s+5] holds s, s+2, s+4
        assert_eq!(sends_in_window(6, 2), 3);
    }

    #[test]
    fn first_phase1_period_on_single_edge() {
        // L = e, desk profile: reserve factor e^-0.5, denominator e
        let g = generate(&GraphModel::Path(2), Seed(0))
            .unwrap()
            .with_weights(vec![1.0, 1.0])
            .unwrap();
        let p = VCParams {
            phase_round_budget: 2,
            fixed_point: false,
            ..VCParams::new(0.5, 2, Profile::Desk, Seed(0))
        };
        let mut run = singleton_run(&g, &p);
        assert_eq!(run.request_scale, vec![1.0, 1.0]);
        run.begin_stage();
        run.phase1();
        // each side asks 1/e and has 1 - e^-0.5 to give; both grants are 1/e
        let r = (-1.0f64).exp();
        assert!((run.weights()[0] - (1.0 - 2.0 * r)).abs() < 1e-15);
        assert!((run.edge_charges()[0] - 2.0 * r).abs() < 1e-15);
        // 1 - 2/e ~ 0.264 is below e^-0.5 ~ 0.607
        assert_eq!(run.states(), &[NodeState::Inactive, NodeState::Inactive]);
    }

    #[test]
    fn reserve_caps_grants() {
        let g = generate(&GraphModel::Path(2), Seed(0))
            .unwrap()
            .with_weights(vec![1.0, 1e6])
            .unwrap();
        let p = VCParams {
            phase_round_budget: 2,
            fixed_point: false,
            ..VCParams::new(0.5, 2, Profile::Desk, Seed(0))
        };
        let mut run = singleton_run(&g, &p);
        run.begin_stage();
        run.phase1();
        // node 0 gives at most 1 - e^-0.5 and loses its own 1/e grant
        let expected = 1.0 - (1.0 - (-0.5f64).exp()) - (-1.0f64).exp();
        assert!((run.weights()[0] - expected).abs() < 1e-12);
        assert!(run.weights()[0] >= 0.0);
    }

    #[test]
    fn phase2_drains_inactive_neighbor() {
        let g = generate(&GraphModel::Path(2), Seed(0))
            .unwrap()
            .with_weights(vec![1.0, 1e6])
            .unwrap();
        let p = VCParams::new(0.5, 2, Profile::Desk, Seed(0));
        let mut run = singleton_run(&g, &p);
        run.begin_stage();
        run.phase1();
        assert_eq!(run.states(), &[NodeState::Inactive, NodeState::Active]);
        run.phase2().unwrap();
        assert_eq!(run.states(), &[NodeState::InCover, NodeState::NotInCover]);
        assert!(run.weights()[0].abs() < 1e-12);
        assert!(run.terminated_at[0] < run.terminated_at[1]);
    }

    #[test]
    fn phase2_refuses_active_edges() {
        let g = generate(&GraphModel::Path(2), Seed(0))
            .unwrap()
            .with_unit_weights();
        let mut run = singleton_run(&g, &VCParams::new(0.5, 2, Profile::Desk, Seed(0)));
        run.begin_stage();
        assert!(matches!(
            run.phase2(),
            Err(VcError::ActiveEdgeAtPhase2 { u: 0, v: 1, .. })
        ));
    }

    #[test]
    fn no_active_nodes_is_a_no_op() {
        let g = Graph::empty(3).with_unit_weights();
        let mut run = singleton_run(&g, &VCParams::new(0.5, 3, Profile::Desk, Seed(0)));
        run.state = vec![NodeState::InCover; 3];
        let before = run.weights();
        run.phase1();
        assert_eq!(run.weights(), before);
    }

    #[test]
    fn star_center_usually_goes_first() {
        let g = generate(&GraphModel::Star(5), Seed(0))
            .unwrap()
            .with_unit_weights();
        let mut center_first = 0;
        for seed in 0..100 {
            let p = VCParams::new(0.5, 5, Profile::Desk, Seed(seed));
            let mut run = CoverRun::new(&g, &p).unwrap();
            run.begin_stage();
            run.phase1();
            if run.states()[0] == NodeState::Inactive
                && run.states()[1..].contains(&NodeState::Active)
            {
                center_first += 1;
            }
        }
        assert!(center_first >= 50, "{center_first}");
    }

    #[test]
    fn weights_never_negative_on_dense_graphs() {
        for seed in 0..30 {
            let g = generate(&GraphModel::ErdosRenyi { n: 40, p: 0.3 }, Seed(seed))
                .unwrap()
                .with_unit_weights();
            for profile in [Profile::Asymptotic, Profile::Desk] {
                let run = run_mwvc(&g, &VCParams::new(0.2, 40, profile, Seed(seed))).unwrap();
                assert!(
                    run.audit().min_weight >= NEGATIVE_TOLERANCE,
                    "{:?}",
                    run.audit()
                );
                assert_eq!(run.audit().negative_weights, 0);
                assert_eq!(run.audit().decay_violations, 0);
            }
        }
    }
}
