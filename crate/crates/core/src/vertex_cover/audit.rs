use serde::{Deserialize, Serialize};

use super::{CoverRun, NodeState};
use crate::graph::{Graph, NodeId};

/// Relative slack for the conservation and charge checks.
const RELATIVE_TOLERANCE: f64 = 1e-9;

/// Result of checking a run against the local-ratio conditions.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LocalRatioReport {
    /// Nodes whose incident charges exceed their input weight.
    pub overdrawn: Vec<NodeId>,
    /// Cover nodes that joined above `eps' w0`.
    pub early_joins: Vec<NodeId>,
    /// `NotInCover` nodes with a neighbor that is not in the cover or joined
    /// no earlier than they left.
    pub unsupported_exits: Vec<NodeId>,
    /// Nodes where `w != w0 - sum of incident charges`.
    pub conservation_breaks: Vec<NodeId>,
    /// Largest incident charge sum divided by input weight.
    pub max_charge_ratio: f64,
}

impl LocalRatioReport {
    pub fn clean(&self) -> bool {
        self.overdrawn.is_empty()
            && self.early_joins.is_empty()
            && self.unsupported_exits.is_empty()
            && self.conservation_breaks.is_empty()
    }
}

/// Checks the edge-charge ledger of `run`: charges around each node stay
/// within its weight, cover nodes joined at residual at most `eps' w0`, nodes
/// outside the cover left only after all neighbors joined, and residual
/// weights equal input weight minus incident charges.
pub fn local_ratio_audit(g: &Graph, run: &CoverRun) -> LocalRatioReport {
    let n = g.n();
    let eps_prime = run.params().eps_prime();
    let mut charged = vec![0.0; n];
    for (&(u, v), &c) in g.edges().iter().zip(&run.delta) {
        charged[u] += c;
        charged[v] += c;
    }
    let mut report = LocalRatioReport::default();
    for v in 0..n {
        let w0 = run.w0[v];
        let slack = RELATIVE_TOLERANCE * w0.abs().max(1e-300);
        if charged[v] > w0 + slack {
            report.overdrawn.push(v);
        }
        if w0 > 0.0 {
            report.max_charge_ratio = report.max_charge_ratio.max(charged[v] / w0);
        }
        if (run.w[v] - (w0 - charged[v])).abs()
            > RELATIVE_TOLERANCE * w0.abs().max(charged[v]).max(1e-300)
        {
            report.conservation_breaks.push(v);
        }
        match run.state[v] {
            NodeState::InCover => {
                if run.join_weight[v].is_none_or(|w| w > eps_prime * w0) {
                    report.early_joins.push(v);
                }
            }
            NodeState::NotInCover => {
                let left = run.terminated_at[v];
                let supported = g.neighbors(v).iter().all(|&u| {
                    run.state[u] == NodeState::InCover
                        && matches!((run.terminated_at[u], left), (Some(a), Some(b)) if a < b)
                });
                if !supported {
                    report.unsupported_exits.push(v);
                }
            }
            _ => {}
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphModel};
    use crate::vertex_cover::{run_mwvc, Profile, VCParams};
    use crate::Seed;

    fn finished_run() -> (Graph, CoverRun) {
        let g = generate(&GraphModel::ErdosRenyi { n: 20, p: 0.3 }, Seed(3))
            .unwrap()
            .with_unit_weights();
        let run = run_mwvc(&g, &VCParams::new(0.5, 20, Profile::Desk, Seed(3))).unwrap();
        (g, run)
    }

    #[test]
    fn honest_run_is_clean() {
        let (g, run) = finished_run();
        let report = local_ratio_audit(&g, &run);
        assert!(report.clean(), "{report:?}");
        assert!(report.max_charge_ratio <= 1.0 + 1e-9);
    }

    #[test]
    fn overdrawn_node_is_caught() {
        let (g, mut run) = finished_run();
        let (u, v) = g.edges()[0];
        run.delta[0] += 2.0;
        run.w[u] -= 2.0;
        run.w[v] -= 2.0;
        let report = local_ratio_audit(&g, &run);
        assert!(report.overdrawn.contains(&u));
        assert!(report.conservation_breaks.is_empty());
    }

    #[test]
    fn broken_conservation_is_caught() {
        let (g, mut run) = finished_run();
        run.w[4] += 0.25;
        assert_eq!(local_ratio_audit(&g, &run).conservation_breaks, vec![4]);
    }

    #[test]
    fn unsupported_exit_is_caught() {
        let g = generate(&GraphModel::Path(2), Seed(0))
            .unwrap()
            .with_weights(vec![1.0, 1e6])
            .unwrap();
        let mut run = run_mwvc(&g, &VCParams::new(0.5, 2, Profile::Desk, Seed(0))).unwrap();
        assert!(local_ratio_audit(&g, &run).clean());
        run.terminated_at[1] = run.terminated_at[0];
        assert_eq!(local_ratio_audit(&g, &run).unsupported_exits, vec![1]);
        run.join_weight[0] = Some(0.9);
        assert_eq!(local_ratio_audit(&g, &run).early_joins, vec![0]);
    }
}
