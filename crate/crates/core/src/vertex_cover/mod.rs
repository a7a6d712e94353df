//! Staged local-ratio approximation of minimum weighted vertex cover.
//!
//! Nodes reduce weight pairwise along edges; every transfer is logged as an
//! edge charge `delta(e)` so that the result can be checked against the
//! local-ratio conditions afterwards. A node joins the cover once its
//! residual weight is at most `eps' w0(v)` with `eps' = eps / (2 + eps)`,
//! which makes any resulting cover a `(2 + eps)`-approximation.
//!
//! Each stage runs two phases. Phase 1 lets active nodes request weight from
//! the clusters of their neighbors until no edge joins two active nodes;
//! phase 2 drains the remaining active nodes until they terminate.

mod audit;
mod run;

pub use audit::{local_ratio_audit, LocalRatioReport};
pub use run::{CoverRoundRecord, CoverRun, Phase, PhaseReport, RunAudit};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decomposition::default_alpha;
use crate::graph::{Graph, NodeId};
use crate::Seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeState {
    Active,
    Inactive,
    InCover,
    NotInCover,
}

impl NodeState {
    pub fn is_terminal(self) -> bool {
        matches!(self, NodeState::InCover | NodeState::NotInCover)
    }
}

/// Exponent presets. All thresholds are powers of `L`, the configured value
/// of `log n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// The asymptotic exponents: decay `L^-0.1`, request denominators
    /// `L^0.3` / `L^0.2`, progress `L^-0.7` / `L^-0.4`.
    Asymptotic,
    /// Larger exponents so that stages make visible progress at small `n`.
    Desk,
}

impl Profile {
    pub fn exponents(self) -> Exponents {
        match self {
            Profile::Asymptotic => Exponents {
                decay: 0.1,
                request_phase1: 0.3,
                request_phase2: 0.2,
                drop: 0.7,
                shrink: 0.4,
            },
            Profile::Desk => Exponents {
                decay: 0.5,
                request_phase1: 1.0,
                request_phase2: 0.5,
                drop: 1.4,
                shrink: 0.4,
            },
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::Asymptotic => "asymptotic",
            Profile::Desk => "desk",
        })
    }
}

impl FromStr for Profile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "asymptotic" => Ok(Profile::Asymptotic),
            "desk" => Ok(Profile::Desk),
            other => Err(format!(
                "unknown profile `{other}` (expected asymptotic or desk)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    /// A node goes inactive at `w <= L^-decay * w_stage`.
    pub decay: f64,
    /// Phase-1 request `w_stage / (d_r L^request_phase1)`.
    pub request_phase1: f64,
    /// Phase-2 request `w_phase2 / (d'_r L^request_phase2)`.
    pub request_phase2: f64,
    /// Progress audit: weight drop of at least `w_stage / L^drop` ...
    pub drop: f64,
    /// ... or the count of requested clusters shrinking to `L^-shrink` of
    /// its value.
    pub shrink: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VCParams {
    pub eps: f64,
    /// Shift exponent for clustering the nodes.
    pub alpha: f64,
    /// The value used for `log n`.
    pub log_n: f64,
    pub exponents: Exponents,
    /// Rounds per phase before it is cut off.
    pub phase_round_budget: usize,
    /// Maximum number of stages; `None` uses the default derived from the
    /// decay rate.
    pub stage_cap: Option<usize>,
    pub seed: Seed,
    /// End a phase as soon as its goal holds and nothing is in flight.
    pub fixed_point: bool,
    /// Scale a node's phase-1 requests down when they could outrun the
    /// reserve kept by its cluster.
    pub request_scaling: bool,
    pub keep_trace: bool,
}

impl VCParams {
    /// Defaults for a graph on `n` nodes: `alpha = 30 ln n / ln ln n`,
    /// `L = max(ln n, e)`.
    pub fn new(eps: f64, n: usize, profile: Profile, seed: Seed) -> Self {
        VCParams {
            eps,
            alpha: default_alpha(30.0, n),
            log_n: default_log_n(n),
            exponents: profile.exponents(),
            phase_round_budget: 10_000,
            stage_cap: None,
            seed,
            fixed_point: true,
            request_scaling: true,
            keep_trace: false,
        }
    }

    pub fn eps_prime(&self) -> f64 {
        self.eps / (2.0 + self.eps)
    }

    /// `L^-decay`.
    pub fn decay_threshold(&self) -> f64 {
        self.log_n.powf(-self.exponents.decay)
    }

    /// `1 + ceil(ln(1 / eps') / ln(1 / decay_threshold))`, unless overridden.
    pub fn effective_stage_cap(&self) -> usize {
        self.stage_cap.unwrap_or_else(|| {
            let stages = (1.0 / self.eps_prime()).ln() / (1.0 / self.decay_threshold()).ln();
            1 + stages.ceil() as usize
        })
    }

    pub fn check(&self) -> Result<(), VcError> {
        let bad = |reason: String| Err(VcError::InvalidParams(reason));
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return bad(format!("eps must lie in (0, 1], got {}", self.eps));
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return bad(format!("alpha must be finite and > 0, got {}", self.alpha));
        }
        if !(self.log_n.is_finite() && self.log_n > 1.0) {
            return bad(format!(
                "log n value must be finite and > 1, got {}",
                self.log_n
            ));
        }
        let e = &self.exponents;
        if [
            e.decay,
            e.request_phase1,
            e.request_phase2,
            e.drop,
            e.shrink,
        ]
        .iter()
        .any(|x| !(x.is_finite() && *x > 0.0))
        {
            return bad("profile exponents must be finite and > 0".into());
        }
        if self.phase_round_budget == 0 {
            return bad("phase round budget must be >= 1".into());
        }
        if self.stage_cap == Some(0) {
            return bad("stage cap must be >= 1".into());
        }
        Ok(())
    }
}

/// `max(ln n, e)`, keeping every power of `L` meaningful on tiny graphs.
pub fn default_log_n(n: usize) -> f64 {
    (n.max(1) as f64).ln().max(std::f64::consts::E)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VcError {
    #[error("invalid vertex-cover parameters: {0}")]
    InvalidParams(String),
    #[error("graph has no node weights")]
    MissingWeights,
    #[error("phase 2 of stage {stage} would start with active neighbors {u} and {v}")]
    ActiveEdgeAtPhase2 { stage: usize, u: NodeId, v: NodeId },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverStatus {
    /// Every node reached a terminal state.
    Completed,
    /// The stage cap ran out with non-terminated nodes left.
    StageCapExhausted,
}

/// Runs stages until every node is terminal or the stage cap is hit.
pub fn run_mwvc(g: &Graph, params: &VCParams) -> Result<CoverRun, VcError> {
    let mut run = CoverRun::new(g, params)?;
    let cap = params.effective_stage_cap();
    while !run.all_terminal() && run.stage() < cap {
        run.begin_stage();
        run.phase1();
        run.phase2()?;
        run.end_stage();
    }
    Ok(run)
}

/// True iff every edge of `g` has an endpoint in `cover`.
pub fn verify_cover(g: &Graph, cover: &[NodeId]) -> bool {
    let mut inside = vec![false; g.n()];
    for &v in cover {
        if v >= g.n() {
            return false;
        }
        inside[v] = true;
    }
    g.edges().iter().all(|&(u, v)| inside[u] || inside[v])
}
