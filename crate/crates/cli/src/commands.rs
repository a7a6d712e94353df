use std::io::Write;
use std::time::Duration;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use locality_lab::decomposition::{
    audit_clustering, cluster_stats, default_alpha, moment_estimate, moment_exponent,
    partition as cluster, radius_tail_bound, sample_shifts, ShiftDistribution,
};
use locality_lab::graph::{generate, parse_edge_list, Graph};
use locality_lab::matching::{
    approximation_report, is_maximal_matching, run_baseline_framework, run_cluster_matching,
    verify_matching, MatchingParams, RunStatus,
};
use locality_lab::oracles::{exact_max_matching, exact_min_wvc, OracleError, OracleLimits};
use locality_lab::suite::{self, SuiteSizes};
use locality_lab::vertex_cover::{
    local_ratio_audit, run_mwvc, verify_cover, CoverStatus, VCParams,
};
use locality_lab::Seed;

use crate::output::{self, write_trace, Document};
use crate::{
    Command, Failure, GraphSource, MatchingArgs, OracleCommand, PartitionArgs, ReplayArgs,
    SuiteArgs, VcArgs, EXIT_AUDIT, EXIT_NON_TERMINATION,
};

fn load_graph(source: &GraphSource, seed: u64) -> Result<Graph, Failure> {
    match (&source.graph, &source.generator) {
        (Some(path), _) => {
            let bytes = std::fs::read(path)
                .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
            parse_edge_list(&bytes).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
        }
        (None, Some(model)) => {
            generate(model, Seed(seed)).map_err(|e| Failure::usage(e.to_string()))
        }
        (None, None) => Err(Failure::usage("one of --graph or --gen is required")),
    }
}

fn config(command: Command) -> Value {
    serde_json::to_value(command).expect("configs serialize")
}

fn require(ok: bool, message: impl FnOnce() -> String) -> Result<(), Failure> {
    if ok {
        Ok(())
    } else {
        Err(Failure::usage(message()))
    }
}

fn oracle_failure(e: OracleError) -> Failure {
    Failure::oracle_limit(e.to_string())
}

fn trial_seeds(base: u64, trials: usize) -> Vec<Seed> {
    (0..trials as u64).map(|t| Seed(base).derive(t)).collect()
}

pub fn partition(args: &PartitionArgs) -> Result<u8, Failure> {
    let g = load_graph(&args.source, args.run.seed)?;
    require(args.b.is_finite() && args.b > 0.0, || {
        format!("--b must be > 0, got {}", args.b)
    })?;
    require(args.run.trials > 0, || "--trials must be >= 1".into())?;
    require((0.0..=1.0).contains(&args.max_failure_rate), || {
        "--max-failure-rate must lie in [0, 1]".into()
    })?;

    let n = g.n();
    let dist = args.dist.unwrap_or(ShiftDistribution::PolyTail {
        alpha: default_alpha(args.b, n),
    });
    let b = args.dist.is_none().then_some(args.b);
    let alpha = dist.alpha();
    let q_values: Vec<usize> = (0..=args.q_max).collect();
    let radius_bound = radius_tail_bound(&dist, n).max(0.0);
    let count_bound: Option<Vec<f64>> = alpha.map(|a| {
        q_values
            .iter()
            .map(|&q| (3.0 * a / (q as f64 + 1.0)).exp())
            .collect()
    });
    let by_q = |values: &[f64]| -> Value {
        Value::Object(
            q_values
                .iter()
                .zip(values)
                .map(|(q, v)| (format!("q{q}"), json!(v)))
                .collect(),
        )
    };

    let seeds = trial_seeds(args.run.seed, args.run.trials);
    let rows: Vec<(bool, Value)> = seeds
        .par_iter()
        .enumerate()
        .map(|(t, &seed)| {
            let shifts = sample_shifts(&dist, n, seed);
            let c = cluster(&g, &shifts).expect("sampled shifts are valid");
            let stats = cluster_stats(&g, &c, &q_values, false);
            let max_count: Vec<f64> = (0..q_values.len())
                .map(|i| {
                    stats
                        .adjacent
                        .iter()
                        .map(|counts| counts[i])
                        .max()
                        .unwrap_or(0) as f64
                })
                .collect();
            let radius_ok = c.max_radius() as f64 <= radius_bound;
            let (violations, passed) = match alpha {
                Some(a) => {
                    let audit = audit_clustering(&g, &c, a, b);
                    (audit.violations.len(), audit.passed())
                }
                None => (0, radius_ok),
            };
            let row = json!({
                "trial": t,
                "seed": seed.value(),
                "clusters": c.cluster_count(),
                "max_radius": c.max_radius(),
                "radius_bound": radius_bound,
                "radius_ok": radius_ok,
                "max_count": by_q(&max_count),
                "count_bound": count_bound.as_deref().map(by_q),
                "violations": violations,
                "passed": passed,
            });
            (passed, row)
        })
        .collect();

    let mut moments = Vec::new();
    if let (Some(a), true) = (alpha, n > 0) {
        for &q in &q_values {
            let exponent = moment_exponent(a, q as f64);
            if !exponent.premise_holds {
                moments.push(json!({ "q": q, "premise": false }));
                continue;
            }
            let est = moment_estimate(
                &g,
                &dist,
                q,
                exponent.gamma,
                args.run.trials,
                Seed(args.run.seed).derive(1 << 40 | q as u64),
            )
            .expect("non-empty graph and trials");
            let bound = 2.0 * std::f64::consts::E;
            moments.push(json!({
                "q": q, "premise": true, "gamma": est.gamma, "mean": est.mean, "std_error": est.std_error,
                "max_node": est.max_node, "max_mean": est.max_mean, "max_std_error": est.max_std_error,
                "bound": bound, "within": est.max_mean <= bound + 3.0 * est.max_std_error,
            }));
        }
    }

    let failures = rows.iter().filter(|(ok, _)| !ok).count();
    let failure_rate = failures as f64 / args.run.trials as f64;
    let passed = failure_rate <= args.max_failure_rate;
    let mut doc = Document::new(
        "partition",
        args.run.seed,
        config(Command::Partition(args.clone())),
        json!({ "n": n, "edges": g.edge_count(), "dist": dist, "alpha": alpha, "b": b, "q_values": q_values }),
    );
    doc.results = rows.into_iter().map(|(_, r)| r).collect();
    doc.summary = json!({
        "trials": args.run.trials, "failures": failures, "failure_rate": failure_rate,
        "max_failure_rate": args.max_failure_rate, "passed": passed, "moments": moments,
    });
    doc.write(args.run.output.as_deref(), args.run.format)?;
    Ok(if passed { 0 } else { EXIT_AUDIT })
}

pub fn matching(args: &MatchingArgs) -> Result<u8, Failure> {
    let g = load_graph(&args.source, args.run.seed)?;
    require(args.b.is_finite() && args.b > 0.0, || {
        format!("--b must be > 0, got {}", args.b)
    })?;
    require(args.run.trials > 0, || "--trials must be >= 1".into())?;
    require((0.0..=1.0).contains(&args.min_pass_rate), || {
        "--min-pass-rate must lie in [0, 1]".into()
    })?;

    let alpha = args
        .alpha
        .unwrap_or_else(|| default_alpha(args.b, g.edge_count()));
    let fixed_point = !args.no_fixed_point;
    let template = MatchingParams {
        rounds: args.rounds,
        eps: args.eps,
        fixed_point,
        scale_caps: args.scale_caps,
        keep_trace: args.trace.is_some(),
        ..MatchingParams::new(alpha, args.update_factor, Seed(args.run.seed))
    };
    template
        .check()
        .map_err(|e| Failure::usage(e.to_string()))?;
    let opt = if args.oracle {
        Some(
            exact_max_matching(&g, &OracleLimits::default())
                .map_err(oracle_failure)?
                .size,
        )
    } else {
        None
    };

    let seeds = trial_seeds(args.run.seed, args.run.trials);
    let outcomes = seeds
        .par_iter()
        .map(|&seed| {
            let params = MatchingParams {
                seed,
                ..template.clone()
            };
            if args.baseline {
                run_baseline_framework(&g, &params)
            } else {
                run_cluster_matching(&g, &params)
            }
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure {
            code: EXIT_AUDIT,
            message: e.to_string(),
        })?;

    let (mut audit_failures, mut unfinished, mut within) = (0, Vec::new(), 0);
    let mut results = Vec::new();
    for (t, out) in outcomes.iter().enumerate() {
        let valid = verify_matching(&g, &out.matched_edges);
        let completed = out.status == RunStatus::Completed;
        let maximal = is_maximal_matching(&g, &out.matched_edges);
        let report = opt.map(|o| approximation_report(out.matched_edges.len(), args.eps, o));
        if !valid || !out.audit.clean() || (completed && !maximal) {
            audit_failures += 1;
        }
        if fixed_point && !completed {
            unfinished.push(t);
        }
        within += usize::from(report.as_ref().is_some_and(|r| r.within_bound));
        let a = &out.audit;
        results.push(json!({
            "trial": t,
            "seed": seeds[t].value(),
            "size": out.matched_edges.len(),
            "matched": out.matched_edges,
            "rounds_used": out.rounds_used,
            "status": out.status,
            "cap_scale": out.cap_scale,
            "clusters": out.cluster_count,
            "max_cluster_radius": out.max_cluster_radius,
            "valid": valid,
            "maximal": maximal,
            "audit": {
                "cap_sum_violations": a.cap_sum_violations,
                "weight_sum_violations": a.weight_sum_violations,
                "trichotomy_checks": a.trichotomy_checks,
                "trichotomy_violations": a.trichotomy_violations,
                "negative_values": a.negative_values,
                "unchanged_caps": a.unchanged_caps,
                "max_cap_sum": a.max_cap_sum,
                "max_weight_sum": a.max_weight_sum,
            },
            "opt": opt,
            "ratio": report.as_ref().map(|r| r.ratio),
            "within_bound": report.as_ref().map(|r| r.within_bound),
        }));
    }
    if let Some(path) = &args.trace {
        write_trace(
            path,
            &outcomes.iter().map(|o| o.trace.clone()).collect::<Vec<_>>(),
        )?;
    }

    let pass_rate = opt.map(|_| within as f64 / args.run.trials as f64);
    let rate_ok = pass_rate.is_none_or(|r| r >= args.min_pass_rate);
    let mut doc = Document::new(
        "matching",
        args.run.seed,
        config(Command::Matching(args.clone())),
        json!({
            "n": g.n(), "edges": g.edge_count(), "alpha": alpha, "b": args.alpha.is_none().then_some(args.b),
            "update_factor": args.update_factor, "fixed_point": fixed_point,
            "scheme": if args.baseline { "baseline" } else { "cluster" },
        }),
    );
    doc.results = results;
    doc.summary = json!({
        "trials": args.run.trials, "audit_failures": audit_failures, "unfinished": unfinished,
        "opt": opt, "pass_rate": pass_rate, "min_pass_rate": args.min_pass_rate,
        "passed": audit_failures == 0 && rate_ok && unfinished.is_empty(),
    });
    doc.write(args.run.output.as_deref(), args.run.format)?;
    Ok(if audit_failures > 0 || !rate_ok {
        EXIT_AUDIT
    } else if !unfinished.is_empty() {
        eprintln!("trials {unfinished:?} ran out of rounds with active edges left");
        EXIT_NON_TERMINATION
    } else {
        0
    })
}

pub fn vc(args: &VcArgs) -> Result<u8, Failure> {
    let mut g = load_graph(&args.source, args.run.seed)?;
    if args.unit_weights {
        g = g.with_unit_weights();
    }
    require(g.node_weights().is_some(), || {
        "graph has no node weights; pass --unit-weights or a weighted edge list".into()
    })?;
    require(args.b.is_finite() && args.b > 0.0, || {
        format!("--b must be > 0, got {}", args.b)
    })?;
    require(args.run.trials > 0, || "--trials must be >= 1".into())?;

    let n = g.n();
    let mut template = VCParams::new(args.eps, n, args.profile, Seed(args.run.seed));
    template.alpha = args.alpha.unwrap_or_else(|| default_alpha(args.b, n));
    if let Some(l) = args.log_n {
        template.log_n = l;
    }
    template.phase_round_budget = args.phase_budget;
    template.stage_cap = args.stage_cap;
    template.fixed_point = !args.no_fixed_point;
    template.request_scaling = !args.no_request_scaling;
    template.keep_trace = args.trace.is_some();
    template
        .check()
        .map_err(|e| Failure::usage(e.to_string()))?;
    let opt = if args.oracle {
        Some(
            exact_min_wvc(&g, &OracleLimits::default())
                .map_err(oracle_failure)?
                .weight,
        )
    } else {
        None
    };

    let seeds = trial_seeds(args.run.seed, args.run.trials);
    let runs: Vec<_> = seeds
        .par_iter()
        .map(|&seed| {
            run_mwvc(
                &g,
                &VCParams {
                    seed,
                    ..template.clone()
                },
            )
        })
        .collect();

    let (mut audit_failures, mut unfinished) = (0, Vec::new());
    let mut results = Vec::new();
    let mut traces = Vec::new();
    for (t, run) in runs.iter().enumerate() {
        let run = match run {
            Ok(run) => run,
            Err(e) => {
                unfinished.push(t);
                traces.push(Vec::new());
                results
                    .push(json!({ "trial": t, "seed": seeds[t].value(), "error": e.to_string() }));
                continue;
            }
        };
        let completed = run.status() == CoverStatus::Completed;
        let cover = run.cover();
        let total = run.cover_weight();
        let valid = verify_cover(&g, &cover);
        let ledger = local_ratio_audit(&g, run);
        let a = run.audit();
        let invariant_breaks = a.negative_weights
            + a.phase1_exit_violations
            + a.phase2_exit_violations
            + a.decay_violations;
        let within = opt.map(|o| total <= (2.0 + args.eps) * o * (1.0 + 1e-9));
        let ratio = opt.map(|o| {
            if o > 0.0 {
                total / o
            } else if total == 0.0 {
                1.0
            } else {
                f64::INFINITY
            }
        });
        if !ledger.clean()
            || invariant_breaks > 0
            || (completed && (!valid || within == Some(false)))
        {
            audit_failures += 1;
        }
        if !completed {
            unfinished.push(t);
        }
        traces.push(run.trace().to_vec());
        results.push(json!({
            "trial": t,
            "seed": seeds[t].value(),
            "cover": cover,
            "total_weight": total,
            "opt_weight": opt,
            "ratio": ratio,
            "within_bound": within,
            "status": run.status(),
            "valid": valid,
            "stages_used": run.stage(),
            "stage_cap": run.params().effective_stage_cap(),
            "rounds_used": run.rounds_used(),
            "violations": {
                "negative_weights": a.negative_weights,
                "min_weight": a.min_weight,
                "phase1_exit": a.phase1_exit_violations,
                "phase2_exit": a.phase2_exit_violations,
                "decay": a.decay_violations,
                "premise_failures": a.premise_failures,
                "budget_cutoffs": a.budget_cutoffs,
                "dichotomy_checks": a.dichotomy_checks,
                "dichotomy_violations": a.dichotomy_violations,
            },
            "local_ratio": {
                "clean": ledger.clean(),
                "overdrawn": ledger.overdrawn,
                "early_joins": ledger.early_joins,
                "unsupported_exits": ledger.unsupported_exits,
                "conservation_breaks": ledger.conservation_breaks,
                "max_charge_ratio": ledger.max_charge_ratio,
            },
        }));
    }
    if let Some(path) = &args.trace {
        write_trace(path, &traces)?;
    }

    let mut doc = Document::new(
        "vc",
        args.run.seed,
        config(Command::Vc(args.clone())),
        json!({
            "n": n, "edges": g.edge_count(), "eps_prime": template.eps_prime(), "alpha": template.alpha,
            "b": args.alpha.is_none().then_some(args.b), "log_n": template.log_n,
            "exponents": template.exponents, "decay_threshold": template.decay_threshold(),
            "stage_cap": template.effective_stage_cap(),
        }),
    );
    doc.results = results;
    doc.summary = json!({
        "trials": args.run.trials, "audit_failures": audit_failures, "unfinished": unfinished,
        "opt_weight": opt, "passed": audit_failures == 0 && unfinished.is_empty(),
    });
    doc.write(args.run.output.as_deref(), args.run.format)?;
    Ok(if audit_failures > 0 {
        EXIT_AUDIT
    } else if !unfinished.is_empty() {
        eprintln!("trials {unfinished:?} left non-terminated nodes");
        EXIT_NON_TERMINATION
    } else {
        0
    })
}

#[derive(Serialize)]
struct OracleDocument<T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    config: Value,
    opt: T,
    witness: Vec<Value>,
}

pub fn oracle(cmd: &OracleCommand) -> Result<u8, Failure> {
    let (args, problem) = match cmd {
        OracleCommand::Vc(a) => (a, "vc"),
        OracleCommand::Matching(a) => (a, "matching"),
    };
    let mut g = load_graph(&args.source, args.seed)?;
    if args.unit_weights {
        g = g.with_unit_weights();
    }
    let limits = OracleLimits {
        max_nodes_vc: args.max_nodes,
        max_edges_matching: args.max_edges,
        time_budget: args.time_budget_ms.map(Duration::from_millis),
    };
    let config = config(Command::Oracle(cmd.clone()));
    let (opt, witness) = match cmd {
        OracleCommand::Vc(_) => {
            let best = exact_min_wvc(&g, &limits).map_err(oracle_failure)?;
            (
                json!(best.weight),
                best.cover.iter().map(|v| json!(v)).collect(),
            )
        }
        OracleCommand::Matching(_) => {
            let best = exact_max_matching(&g, &limits).map_err(oracle_failure)?;
            (
                json!(best.size),
                best.edges.iter().map(|e| json!(e)).collect(),
            )
        }
    };
    let doc = OracleDocument {
        tool: "locality-lab",
        version: env!("CARGO_PKG_VERSION"),
        command: if problem == "vc" {
            "oracle vc"
        } else {
            "oracle matching"
        },
        config,
        opt,
        witness,
    };
    let mut out = output::open(args.output.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &doc).map_err(|e| Failure::usage(e.to_string()))?;
    writeln_flush(&mut out)?;
    Ok(0)
}

fn writeln_flush(out: &mut Box<dyn Write>) -> Result<(), Failure> {
    writeln!(out)
        .and_then(|()| out.flush())
        .map_err(|e| Failure::usage(format!("cannot write output: {e}")))
}

pub fn suite(args: &SuiteArgs) -> Result<u8, Failure> {
    let sizes = if args.quick {
        SuiteSizes::smoke()
    } else {
        SuiteSizes::full()
    };
    let reports = suite::run_all(&sizes, Seed(args.seed));
    for r in &reports {
        println!("{}", r.line());
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    println!(
        "{} of {} checks passed",
        reports.len() - failed,
        reports.len()
    );
    if let Some(path) = &args.output {
        let doc = json!({
            "tool": "locality-lab",
            "version": env!("CARGO_PKG_VERSION"),
            "command": "suite",
            "seed": args.seed,
            "config": config(Command::Suite(args.clone())),
            "parameters": { "sizes": sizes },
            "results": reports,
        });
        let mut out = output::open(Some(path))?;
        serde_json::to_writer_pretty(&mut out, &doc).map_err(|e| Failure::usage(e.to_string()))?;
        writeln_flush(&mut out)?;
    }
    Ok(if failed == 0 { 0 } else { EXIT_AUDIT })
}

/// Rebuilds the command stored in a document's `config`, with output
/// settings taken from the replay invocation.
pub fn replayed(args: &ReplayArgs) -> Result<Command, Failure> {
    let text = std::fs::read_to_string(&args.document)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", args.document.display())))?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| {
        Failure::usage(format!(
            "{}: not a JSON document: {e}",
            args.document.display()
        ))
    })?;
    let config = doc
        .get("config")
        .cloned()
        .ok_or_else(|| Failure::usage("document has no config"))?;
    let mut command: Command = serde_json::from_value(config)
        .map_err(|e| Failure::usage(format!("unusable config: {e}")))?;
    let output = args.output.clone();
    let patch = |run: &mut crate::RunArgs| {
        run.output = output.clone();
        if let Some(f) = args.format {
            run.format = f;
        }
    };
    match &mut command {
        Command::Partition(a) => patch(&mut a.run),
        Command::Matching(a) => patch(&mut a.run),
        Command::Vc(a) => patch(&mut a.run),
        Command::Oracle(OracleCommand::Vc(a) | OracleCommand::Matching(a)) => {
            a.output = output.clone()
        }
        Command::Suite(a) => a.output = output.clone(),
        Command::Replay(_) => return Err(Failure::usage("a replay cannot replay another replay")),
    }
    Ok(command)
}
