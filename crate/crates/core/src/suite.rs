//! The acceptance suite: ten pass/fail checks over the decomposition, the
//! matching and the vertex-cover runs, each backed by an independent
//! reference computed here or in [`crate::oracles`].
//!
//! Every check returns a [`CriterionReport`] whose `payload` holds the raw
//! results. Payloads contain no timings, so reruns with the same seed must
//! serialize to identical bytes.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::decomposition::{
    audit_clustering, default_alpha, moment_estimate, moment_exponent, partition,
    radius_tail_bound, sample_shifts, ShiftDistribution,
};
use crate::graph::{generate, Graph, GraphModel, NodeId};
use crate::matching::{
    is_maximal_matching, run_cluster_matching, verify_matching, MatchingParams, RunStatus,
};
use crate::oracles::{exact_max_matching, exact_min_wvc, OracleLimits};
use crate::vertex_cover::{
    local_ratio_audit, run_mwvc, verify_cover, CoverStatus, Profile, VCParams,
};
use crate::Seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    /// One-line human summary.
    pub summary: String,
    pub payload: Value,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        format!("[{tag}] {:>2} {}: {}", self.id, self.name, self.summary)
    }
}

/// Workload sizes. [`SuiteSizes::full`] is the acceptance configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteSizes {
    pub tail_samples: usize,
    pub moment_trials: usize,
    pub adjacency_nodes: usize,
    pub adjacency_seeds: usize,
    pub matching_runs: usize,
    pub cover_runs: usize,
    pub large_cover_runs: usize,
    pub partition_pairs: usize,
}

impl SuiteSizes {
    pub fn full() -> Self {
        SuiteSizes {
            tail_samples: 1_000_000,
            moment_trials: 10_000,
            adjacency_nodes: 500,
            adjacency_seeds: 50,
            matching_runs: 500,
            cover_runs: 200,
            large_cover_runs: 24,
            partition_pairs: 1000,
        }
    }

    /// A few percent of the full workload, for reruns and quick checks.
    pub fn smoke() -> Self {
        SuiteSizes {
            tail_samples: 100_000,
            moment_trials: 300,
            adjacency_nodes: 200,
            adjacency_seeds: 4,
            matching_runs: 40,
            cover_runs: 24,
            large_cover_runs: 2,
            partition_pairs: 100,
        }
    }
}

/// Runs all ten checks.
pub fn run_all(sizes: &SuiteSizes, seed: Seed) -> Vec<CriterionReport> {
    let mut reports = checks_one_to_nine(sizes, seed);
    reports.push(rerun_identity(&SuiteSizes::smoke(), seed));
    reports
}

fn checks_one_to_nine(sizes: &SuiteSizes, seed: Seed) -> Vec<CriterionReport> {
    let mut reports = vec![
        radius_tail(sizes, seed.derive(1)),
        moment_bound(sizes, seed.derive(2)),
        adjacency_bound(sizes, seed.derive(3)),
    ];
    reports.extend(matching_checks(sizes, seed.derive(4)));
    reports.extend(cover_checks(sizes, seed.derive(7)));
    reports.push(partition_equivalence(sizes, seed.derive(9)));
    reports
}

/// Exceedance rate of `n^(3/alpha) - 1` by poly-tail shifts against the
/// exact tail `n^-3`, at `n = 100`, `alpha = 6`.
pub fn radius_tail(sizes: &SuiteSizes, seed: Seed) -> CriterionReport {
    let (n, alpha) = (100usize, 6.0);
    let dist = ShiftDistribution::PolyTail { alpha };
    let threshold = radius_tail_bound(&dist, n);
    // exact tail of the poly shift: (1 + x)^-alpha
    let expected = (1.0 + threshold).powf(-alpha);
    let chunk = 100_000;
    let chunks = sizes.tail_samples.div_ceil(chunk);
    let exceed: usize = (0..chunks)
        .into_par_iter()
        .map(|i| {
            let len = chunk.min(sizes.tail_samples - i * chunk);
            sample_shifts(&dist, len, seed.derive(i as u64))
                .iter()
                .filter(|&&x| x > threshold)
                .count()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    let samples = sizes.tail_samples as f64;
    let rate = exceed as f64 / samples;
    let tolerance = 3.0 * ((n as f64).powi(-3) / samples).sqrt();
    let passed = (rate - (n as f64).powi(-3)).abs() <= tolerance && (expected - 1e-6).abs() < 1e-18;
    CriterionReport {
        id: 1,
        name: "radius tail".into(),
        passed,
        summary: format!(
            "{exceed} of {} shifts above {threshold}: rate {rate:.3e}, |rate - 1e-6| <= {tolerance:.1e}",
            sizes.tail_samples
        ),
        payload: json!({ "threshold": threshold, "samples": sizes.tail_samples, "exceed": exceed, "rate": rate }),
    }
}

/// Monte Carlo `E[exp(gamma C)]` against `2e` plus three standard errors,
/// for every (graph, alpha, q) whose exponent premise holds. The node with
/// the largest sample mean is the one checked.
pub fn moment_bound(sizes: &SuiteSizes, seed: Seed) -> CriterionReport {
    let graphs = [
        ("complete:8", GraphModel::Complete(8)),
        ("er:50:0.3", GraphModel::ErdosRenyi { n: 50, p: 0.3 }),
        ("star:20", GraphModel::Star(20)),
    ];
    let bound = 2.0 * std::f64::consts::E;
    let mut rows = Vec::new();
    let (mut checked, mut failed, mut skipped) = (0, 0, 0);
    for (gi, (label, model)) in graphs.iter().enumerate() {
        let g = generate(model, seed.derive(gi as u64)).expect("fixed models are feasible");
        for alpha in [2.0, 4.0, 8.0] {
            for q in 0..=2usize {
                let exponent = moment_exponent(alpha, q as f64);
                if !exponent.premise_holds {
                    skipped += 1;
                    rows.push(json!({ "graph": label, "alpha": alpha, "q": q, "premise": false }));
                    continue;
                }
                let trial_seed = seed.derive(1000 + 100 * gi as u64 + 10 * alpha as u64 + q as u64);
                let est = moment_estimate(
                    &g,
                    &ShiftDistribution::PolyTail { alpha },
                    q,
                    exponent.gamma,
                    sizes.moment_trials,
                    trial_seed,
                )
                .expect("non-empty graph and trials");
                let ok = est.max_mean <= bound + 3.0 * est.max_std_error;
                checked += 1;
                failed += usize::from(!ok);
                rows.push(json!({
                    "graph": label, "alpha": alpha, "q": q, "premise": true, "gamma": est.gamma,
                    "node": est.max_node, "mean": est.max_mean, "std_error": est.max_std_error, "ok": ok,
                }));
            }
        }
    }
    CriterionReport {
        id: 2,
        name: "moment bound".into(),
        passed: failed == 0 && checked > 0,
        summary: format!(
            "{} of {checked} combinations within 2e + 3 SE over {} trials ({skipped} skipped by the premise)",
            checked - failed,
            sizes.moment_trials
        ),
        payload: Value::Array(rows),
    }
}

/// Adjacent-foreign-cluster counts on `er:500:0.05` with
/// `alpha = 4 ln n / ln ln n`; a seed passes when no (node, q) pair exceeds
/// `e^(3 alpha / (q + 1))`. At least 96% of seeds must pass.
pub fn adjacency_bound(sizes: &SuiteSizes, seed: Seed) -> CriterionReport {
    let n = sizes.adjacency_nodes;
    let alpha = default_alpha(4.0, n);
    let rows: Vec<(usize, usize, usize)> = (0..sizes.adjacency_seeds as u64)
        .into_par_iter()
        .map(|s| {
            let g = generate(&GraphModel::ErdosRenyi { n, p: 0.05 }, seed.derive(2 * s))
                .expect("valid p");
            let shifts = sample_shifts(
                &ShiftDistribution::PolyTail { alpha },
                n,
                seed.derive(2 * s + 1),
            );
            let c = partition(&g, &shifts).expect("sampled shifts are valid");
            let audit = audit_clustering(&g, &c, alpha, Some(4.0));
            (
                audit.violations.len(),
                audit.max_count.first().copied().unwrap_or(0),
                audit.max_radius,
            )
        })
        .collect();
    let clean = rows.iter().filter(|r| r.0 == 0).count();
    let required = (sizes.adjacency_seeds * 48).div_ceil(50);
    CriterionReport {
        id: 3,
        name: "adjacency bound".into(),
        passed: clean >= required,
        summary: format!(
            "{clean} of {} seeds without violations (need {required}), alpha {alpha:.2}",
            sizes.adjacency_seeds
        ),
        payload: json!({
            "alpha": alpha,
            "seeds": rows.iter().map(|r| json!({ "violations": r.0, "max_count_q0": r.1, "max_radius": r.2 })).collect::<Vec<_>>(),
        }),
    }
}

/// One fuzz instance for the matching checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchingCase {
    pub model: GraphModel,
    pub graph_seed: Seed,
    pub alpha: f64,
    pub update_factor: f64,
    pub seed: Seed,
}

/// Mixed generators with `n <= 60`; about half the instances have at most
/// ten nodes so that many fall within the exact oracle's reach.
pub fn matching_corpus(runs: usize, seed: Seed) -> Vec<MatchingCase> {
    (0..runs)
        .map(|i| {
            let case_seed = seed.derive(i as u64);
            let mut rng = case_seed.rng();
            let n = if rng.gen_bool(0.5) {
                rng.gen_range(1..=10)
            } else {
                rng.gen_range(11..=60)
            };
            let model = match rng.gen_range(0..6) {
                0 => GraphModel::Path(n),
                1 => GraphModel::Star(n),
                2 => GraphModel::Complete(n.min(14)),
                3 => {
                    let a = rng.gen_range(1..=n.clamp(1, 8));
                    GraphModel::CompleteBipartite {
                        a,
                        b: rng.gen_range(1..=8),
                    }
                }
                4 => GraphModel::ErdosRenyi {
                    n,
                    p: (rng.gen_range(1.0..6.0) / n.max(2) as f64).min(1.0),
                },
                _ => {
                    let d = rng.gen_range(1..=4usize).min(n.saturating_sub(1));
                    let n = if (n * d) % 2 == 1 { n + 1 } else { n };
                    GraphModel::RandomRegular { n, d }
                }
            };
            MatchingCase {
                model,
                graph_seed: case_seed.derive(0),
                alpha: [1.0, 2.0, 4.0][i % 3],
                update_factor: [2.0, 3.0][(i / 3) % 2],
                seed: case_seed.derive(1),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct MatchingRow {
    case: usize,
    edges: usize,
    matched: Vec<(NodeId, NodeId)>,
    rounds: usize,
    completed: bool,
    valid: bool,
    maximal: Option<bool>,
    violations: usize,
    trichotomy_checks: usize,
    cap_scale: f64,
    opt: Option<usize>,
}

/// Checks 4 to 6: validity and maximality, the per-round cap and weight
/// audits, and the 3-approximation on instances with at most 16 edges.
pub fn matching_checks(sizes: &SuiteSizes, seed: Seed) -> Vec<CriterionReport> {
    let corpus = matching_corpus(sizes.matching_runs, seed);
    let rows: Vec<MatchingRow> = corpus
        .par_iter()
        .enumerate()
        .map(|(i, case)| {
            let g = generate(&case.model, case.graph_seed).expect("corpus models are feasible");
            let params = MatchingParams {
                rounds: 10_000,
                eps: 1.0,
                fixed_point: true,
                scale_caps: true,
                ..MatchingParams::new(case.alpha, case.update_factor, case.seed)
            };
            let out = run_cluster_matching(&g, &params).expect("scaled caps always validate");
            let completed = out.status == RunStatus::Completed;
            let opt = (g.edge_count() <= 16).then(|| {
                exact_max_matching(&g, &OracleLimits::default())
                    .expect("within limits")
                    .size
            });
            MatchingRow {
                case: i,
                edges: g.edge_count(),
                valid: verify_matching(&g, &out.matched_edges),
                maximal: completed.then(|| is_maximal_matching(&g, &out.matched_edges)),
                matched: out.matched_edges,
                rounds: out.rounds_used,
                completed,
                violations: out.audit.violation_count(),
                trichotomy_checks: out.audit.trichotomy_checks,
                cap_scale: out.cap_scale,
                opt,
            }
        })
        .collect();

    let invalid = rows.iter().filter(|r| !r.valid).count();
    let completed = rows.iter().filter(|r| r.completed).count();
    let not_maximal = rows.iter().filter(|r| r.maximal == Some(false)).count();
    let validity = CriterionReport {
        id: 4,
        name: "matching validity".into(),
        passed: invalid == 0 && not_maximal == 0,
        summary: format!(
            "{invalid} invalid of {}, {not_maximal} non-maximal of {completed} completed",
            rows.len()
        ),
        payload: serde_json::to_value(&rows).expect("rows serialize"),
    };

    let violations: usize = rows.iter().map(|r| r.violations).sum();
    let checks: usize = rows.iter().map(|r| r.trichotomy_checks).sum();
    let audits = CriterionReport {
        id: 5,
        name: "matching audits".into(),
        passed: violations == 0,
        summary: format!(
            "{violations} violations over {} runs ({checks} cap updates checked)",
            rows.len()
        ),
        payload: json!({ "violations": violations, "trichotomy_checks": checks }),
    };

    let small: Vec<&MatchingRow> = rows.iter().filter(|r| r.opt.is_some()).collect();
    let small_done: Vec<&&MatchingRow> = small.iter().filter(|r| r.completed).collect();
    let short = small_done
        .iter()
        .filter(|r| 3 * r.matched.len() < r.opt.unwrap_or(0))
        .count();
    let completion = if small.is_empty() {
        1.0
    } else {
        small_done.len() as f64 / small.len() as f64
    };
    let approximation = CriterionReport {
        id: 6,
        name: "matching approximation".into(),
        passed: short == 0 && completion >= 0.99 && !small.is_empty(),
        summary: format!(
            "{short} of {} completed runs below OPT/3, completion {:.1}% of {} small instances",
            small_done.len(),
            100.0 * completion,
            small.len()
        ),
        payload: json!({ "small": small.len(), "completed": small_done.len(), "below_bound": short }),
    };
    vec![validity, audits, approximation]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    Unit,
    Uniform,
    /// `10^(6U)` for uniform `U`, spanning six orders of magnitude.
    ExponentialSpread,
}

impl WeightKind {
    pub fn sample<R: Rng>(self, n: usize, rng: &mut R) -> Vec<f64> {
        match self {
            WeightKind::Unit => vec![1.0; n],
            WeightKind::Uniform => (0..n).map(|_| rng.gen_range(0.0..10.0)).collect(),
            WeightKind::ExponentialSpread => (0..n)
                .map(|_| 10f64.powf(rng.gen_range(0.0..6.0)))
                .collect(),
        }
    }
}

/// One weighted vertex-cover instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverCase {
    pub model: GraphModel,
    pub weights: Vec<f64>,
    pub weight_kind: WeightKind,
    pub eps: f64,
    pub profile: Profile,
    pub seed: Seed,
}

impl CoverCase {
    pub fn graph(&self) -> Graph {
        generate(&self.model, self.seed.derive(0))
            .expect("corpus models are feasible")
            .with_weights(self.weights.clone())
            .expect("one weight per node")
    }
}

/// Erdos-Renyi graphs with `n <= max_n`, cycling weight kinds, eps in
/// `{0.1, 0.5, 1}` and both profiles.
pub fn cover_corpus(runs: usize, max_n: usize, seed: Seed) -> Vec<CoverCase> {
    (0..runs)
        .map(|i| {
            let case_seed = seed.derive(i as u64);
            let mut rng = case_seed.derive(1).rng();
            let n = rng.gen_range(1..=max_n);
            let p = rng.gen_range(0.1..0.6);
            let weight_kind = [
                WeightKind::Unit,
                WeightKind::Uniform,
                WeightKind::ExponentialSpread,
            ][i % 3];
            CoverCase {
                model: GraphModel::ErdosRenyi { n, p },
                weights: weight_kind.sample(n, &mut rng),
                weight_kind,
                eps: [0.1, 0.5, 1.0][(i / 3) % 3],
                profile: if (i / 9) % 2 == 0 {
                    Profile::Desk
                } else {
                    Profile::Asymptotic
                },
                seed: case_seed,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CoverRow {
    case: usize,
    n: usize,
    error: Option<String>,
    completed: bool,
    cover: Vec<NodeId>,
    weight: f64,
    opt: Option<f64>,
    valid: bool,
    within_bound: Option<bool>,
    stages: usize,
    rounds: usize,
    min_weight: f64,
    invariant_breaks: usize,
    dichotomy_violations: usize,
    dichotomy_checks: usize,
}

fn run_cover_case(i: usize, case: &CoverCase, with_oracle: bool) -> CoverRow {
    let g = case.graph();
    let params = VCParams::new(case.eps, g.n(), case.profile, case.seed.derive(2));
    let mut row = CoverRow {
        case: i,
        n: g.n(),
        error: None,
        completed: false,
        cover: Vec::new(),
        weight: 0.0,
        opt: None,
        valid: false,
        within_bound: None,
        stages: 0,
        rounds: 0,
        min_weight: 0.0,
        invariant_breaks: 0,
        dichotomy_violations: 0,
        dichotomy_checks: 0,
    };
    let run = match run_mwvc(&g, &params) {
        Ok(run) => run,
        Err(e) => {
            row.error = Some(e.to_string());
            row.invariant_breaks = 1;
            return row;
        }
    };
    let audit = run.audit();
    let ledger = local_ratio_audit(&g, &run);
    row.completed = run.status() == CoverStatus::Completed;
    row.cover = run.cover();
    row.weight = run.cover_weight();
    row.valid = verify_cover(&g, &row.cover);
    row.stages = run.stage();
    row.rounds = run.rounds_used();
    row.min_weight = audit.min_weight;
    row.invariant_breaks = usize::from(audit.min_weight < -1e-12)
        + audit.negative_weights
        + audit.phase1_exit_violations
        + audit.phase2_exit_violations
        + audit.decay_violations
        + usize::from(!ledger.clean());
    row.dichotomy_checks = audit.dichotomy_checks;
    row.dichotomy_violations = audit.dichotomy_violations;
    if with_oracle && row.completed {
        let opt = exact_min_wvc(&g, &OracleLimits::default())
            .expect("within limits")
            .weight;
        row.opt = Some(opt);
        row.within_bound = Some(row.weight <= (2.0 + case.eps) * opt * (1.0 + 1e-9));
    }
    row
}

/// Checks 7 and 8: validity and the `(2 + eps)` bound against the exact
/// optimum, then the weight, phase-exit, decay and local-ratio invariants on
/// the same runs plus larger unit- and spread-weight instances.
pub fn cover_checks(sizes: &SuiteSizes, seed: Seed) -> Vec<CriterionReport> {
    let corpus = cover_corpus(sizes.cover_runs, 20, seed);
    let rows: Vec<CoverRow> = corpus
        .par_iter()
        .enumerate()
        .map(|(i, c)| run_cover_case(i, c, true))
        .collect();
    let large = cover_corpus(sizes.large_cover_runs, 200, seed.derive(u64::MAX));
    let large_rows: Vec<CoverRow> = large
        .par_iter()
        .enumerate()
        .map(|(i, c)| run_cover_case(i, c, false))
        .collect();

    let done: Vec<&CoverRow> = rows.iter().filter(|r| r.completed).collect();
    let bad = done
        .iter()
        .filter(|r| !r.valid || r.within_bound != Some(true))
        .count();
    let worst = done
        .iter()
        .filter_map(|r| r.opt.filter(|&o| o > 0.0).map(|o| r.weight / o))
        .fold(1.0, f64::max);
    let guarantee = CriterionReport {
        id: 7,
        name: "cover guarantee".into(),
        passed: bad == 0 && !done.is_empty(),
        summary: format!(
            "{bad} of {} terminating runs invalid or above (2+eps) OPT, {} of {} terminated, worst ratio {worst:.3}",
            done.len(),
            done.len(),
            rows.len()
        ),
        payload: serde_json::to_value(&rows).expect("rows serialize"),
    };

    let all = rows.iter().chain(&large_rows);
    let breaks: usize = all.clone().map(|r| r.invariant_breaks).sum();
    let min_weight = all
        .clone()
        .map(|r| r.min_weight)
        .fold(f64::INFINITY, f64::min);
    let (dv, dc) = all.clone().fold((0, 0), |(v, c), r| {
        (v + r.dichotomy_violations, c + r.dichotomy_checks)
    });
    let runs = rows.len() + large_rows.len();
    let invariants = CriterionReport {
        id: 8,
        name: "cover invariants".into(),
        passed: breaks == 0,
        summary: format!(
            "{breaks} invariant breaks over {runs} runs, min weight {min_weight:.2e}, \
             progress shortfalls {dv} of {dc} (reported only)"
        ),
        payload: json!({ "breaks": breaks, "min_weight": min_weight, "large": large_rows }),
    };
    vec![guarantee, invariants]
}

/// Reference clustering: all-pairs distances by Floyd-Warshall, then the
/// argmax of `shift[u] - dist(u, v)` per node, ties toward the smaller `u`.
pub fn brute_force_centers(g: &Graph, shifts: &[f64]) -> Vec<NodeId> {
    let n = g.n();
    let mut dist = vec![vec![usize::MAX; n]; n];
    for (u, row) in dist.iter_mut().enumerate() {
        row[u] = 0;
    }
    for (u, v) in g.edges() {
        dist[u][v] = 1;
        dist[v][u] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if dist[i][k] != usize::MAX && dist[k][j] != usize::MAX {
                    dist[i][j] = dist[i][j].min(dist[i][k] + dist[k][j]);
                }
            }
        }
    }
    (0..n)
        .map(|v| {
            let mut best = v;
            let mut best_key = f64::NEG_INFINITY;
            for u in 0..n {
                if dist[u][v] == usize::MAX {
                    continue;
                }
                let key = shifts[u] - dist[u][v] as f64;
                if key > best_key {
                    best = u;
                    best_key = key;
                }
            }
            best
        })
        .collect()
}

/// Partition against [`brute_force_centers`] on random graphs with
/// `n <= 12`. A third of the pairs use shifts rounded to halves so that
/// ties occur.
pub fn partition_equivalence(sizes: &SuiteSizes, seed: Seed) -> CriterionReport {
    let mismatches: Vec<usize> = (0..sizes.partition_pairs)
        .into_par_iter()
        .filter(|&i| {
            let pair_seed = seed.derive(i as u64);
            let mut rng = pair_seed.rng();
            let n = rng.gen_range(1..=12);
            let p = rng.gen_range(0.0..0.6);
            let g =
                generate(&GraphModel::ErdosRenyi { n, p }, pair_seed.derive(0)).expect("valid p");
            let alpha = rng.gen_range(0.5..4.0);
            let mut shifts = sample_shifts(
                &ShiftDistribution::PolyTail { alpha },
                n,
                pair_seed.derive(1),
            );
            if i % 3 == 0 {
                shifts
                    .iter_mut()
                    .for_each(|x| *x = (*x * 2.0).round() / 2.0);
            }
            let c = partition(&g, &shifts).expect("sampled shifts are valid");
            c.centers_by_node() != brute_force_centers(&g, &shifts).as_slice()
        })
        .collect();
    CriterionReport {
        id: 9,
        name: "partition equivalence".into(),
        passed: mismatches.is_empty(),
        summary: format!(
            "{} of {} pairs differ from brute force",
            mismatches.len(),
            sizes.partition_pairs
        ),
        payload: json!({ "mismatches": mismatches }),
    }
}

/// Runs checks 1 to 9 twice at `sizes`, once on the global thread pool and
/// once on a single thread, and compares the serialized payloads byte for
/// byte.
pub fn rerun_identity(sizes: &SuiteSizes, seed: Seed) -> CriterionReport {
    let render = |reports: Vec<CriterionReport>| -> Vec<String> {
        reports
            .iter()
            .map(|r| serde_json::to_string(&r.payload).expect("payload serializes"))
            .collect()
    };
    let first = render(checks_one_to_nine(sizes, seed));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .expect("single-thread pool");
    let second = pool.install(|| render(checks_one_to_nine(sizes, seed)));
    let differing: Vec<usize> = (0..first.len())
        .filter(|&i| first[i] != second[i])
        .map(|i| i + 1)
        .collect();
    let bytes: usize = first.iter().map(String::len).sum();
    CriterionReport {
        id: 10,
        name: "determinism".into(),
        passed: differing.is_empty(),
        summary: format!("{bytes} payload bytes over checks 1-9, differing checks: {differing:?}"),
        payload: json!({ "bytes": bytes, "differing": differing }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_force_examples() {
        let g = generate(&GraphModel::Path(3), Seed(0)).unwrap();
        assert_eq!(brute_force_centers(&g, &[0.0, 0.0, 0.0]), vec![0, 1, 2]);
        // 2.5 - 2 beats the own 0.1 of node 0
        assert_eq!(brute_force_centers(&g, &[0.1, 0.0, 2.5]), vec![2, 2, 2]);
        // node 1: 1 - 1 ties 0 - 0 with itself and goes to 0
        assert_eq!(brute_force_centers(&g, &[1.0, 0.0, 0.0]), vec![0, 0, 2]);
    }

    #[test]
    fn corpora_are_reproducible() {
        assert_eq!(matching_corpus(30, Seed(1)), matching_corpus(30, Seed(1)));
        assert_eq!(cover_corpus(30, 20, Seed(1)), cover_corpus(30, 20, Seed(1)));
        for case in matching_corpus(200, Seed(2)) {
            assert!(
                generate(&case.model, case.graph_seed).is_ok(),
                "{:?}",
                case.model
            );
            assert!(case.model.node_count() <= 61);
        }
    }

    #[test]
    fn smoke_suite_passes() {
        let reports = checks_one_to_nine(&SuiteSizes::smoke(), Seed(5));
        assert_eq!(
            reports.iter().map(|r| r.id).collect::<Vec<_>>(),
            (1..=9).collect::<Vec<u8>>()
        );
        for r in &reports {
            // the tail check is too coarse at smoke size to be asserted
            if r.id != 1 {
                assert!(r.passed, "{}", r.line());
            }
        }
    }
}
