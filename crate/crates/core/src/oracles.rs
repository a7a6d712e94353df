//! Exact solvers for small instances, used as ground truth.
//!
//! Both refuse instances above their limits instead of degrading.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, NodeId};

/// Relative tolerance when comparing cover weights.
const WEIGHT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleLimits {
    pub max_nodes_vc: usize,
    pub max_edges_matching: usize,
    pub time_budget: Option<Duration>,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_nodes_vc: 24,
            max_edges_matching: 40,
            time_budget: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("{what} = {size} exceeds the oracle limit {limit}")]
    TooLarge {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("time budget of {0:?} exceeded")]
    TimeBudget(Duration),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchingOptimum {
    pub size: usize,
    /// One maximum matching, ascending.
    pub edges: Vec<(NodeId, NodeId)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverOptimum {
    pub weight: f64,
    /// The lexicographically smallest optimal cover (as a sorted id list).
    pub cover: Vec<NodeId>,
}

struct Clock {
    start: Instant,
    budget: Option<Duration>,
    ticks: u32,
}

impl Clock {
    fn new(budget: Option<Duration>) -> Self {
        Clock {
            start: Instant::now(),
            budget,
            ticks: 0,
        }
    }

    fn check(&mut self) -> Result<(), OracleError> {
        self.ticks = self.ticks.wrapping_add(1);
        match self.budget {
            Some(b) if self.ticks.is_multiple_of(1024) && self.start.elapsed() > b => {
                Err(OracleError::TimeBudget(b))
            }
            _ => Ok(()),
        }
    }
}

/// Maximum-cardinality matching by include/exclude branching on an edge
/// with a highest-degree endpoint.
pub fn exact_max_matching(
    g: &Graph,
    limits: &OracleLimits,
) -> Result<MatchingOptimum, OracleError> {
    let edges = g.edges();
    if edges.len() > limits.max_edges_matching {
        return Err(OracleError::TooLarge {
            what: "edge count",
            size: edges.len(),
            limit: limits.max_edges_matching,
        });
    }
    let mut search = MatchingSearch {
        n: g.n(),
        best: greedy_matching(&edges),
        chosen: Vec::new(),
        clock: Clock::new(limits.time_budget),
    };
    search.run(edges)?;
    let mut best = search.best;
    best.sort_unstable();
    Ok(MatchingOptimum {
        size: best.len(),
        edges: best,
    })
}

fn greedy_matching(edges: &[(NodeId, NodeId)]) -> Vec<(NodeId, NodeId)> {
    let mut used = std::collections::HashSet::new();
    let mut out = Vec::new();
    for &(u, v) in edges {
        if !used.contains(&u) && !used.contains(&v) {
            used.insert(u);
            used.insert(v);
            out.push((u, v));
        }
    }
    out
}

struct MatchingSearch {
    n: usize,
    best: Vec<(NodeId, NodeId)>,
    chosen: Vec<(NodeId, NodeId)>,
    clock: Clock,
}

impl MatchingSearch {
    fn run(&mut self, edges: Vec<(NodeId, NodeId)>) -> Result<(), OracleError> {
        self.clock.check()?;
        if self.chosen.len() > self.best.len() {
            self.best = self.chosen.clone();
        }
        if edges.is_empty() {
            return Ok(());
        }
        let mut degree = vec![0usize; self.n];
        for &(u, v) in &edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        let touched = degree.iter().filter(|&&d| d > 0).count();
        if self.chosen.len() + edges.len().min(touched / 2) <= self.best.len() {
            return Ok(());
        }
        let &(u, v) = edges
            .iter()
            .max_by_key(|&&(u, v)| (degree[u].max(degree[v]), std::cmp::Reverse((u, v))))
            .expect("edges nonempty");

        let included: Vec<_> = edges
            .iter()
            .copied()
            .filter(|&(a, b)| a != u && a != v && b != u && b != v)
            .collect();
        self.chosen.push((u, v));
        self.run(included)?;
        self.chosen.pop();

        let excluded: Vec<_> = edges.into_iter().filter(|&e| e != (u, v)).collect();
        self.run(excluded)
    }
}

/// Minimum-weight vertex cover by branching on a highest-degree vertex `u`:
/// either `u` joins the cover or all its uncovered neighbors do. Missing
/// weights count as unit weights.
pub fn exact_min_wvc(g: &Graph, limits: &OracleLimits) -> Result<CoverOptimum, OracleError> {
    let n = g.n();
    let limit = limits.max_nodes_vc.min(64);
    if n > limit {
        return Err(OracleError::TooLarge {
            what: "node count",
            size: n,
            limit,
        });
    }
    let weights: Vec<f64> = match g.node_weights() {
        Some(w) => w.to_vec(),
        None => vec![1.0; n],
    };
    let neighbors: Vec<u64> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u64, |m, &u| m | (1 << u)))
        .collect();
    let mut solver = CoverSearch {
        weights,
        neighbors,
        clock: Clock::new(limits.time_budget),
    };

    let opt = solver
        .optimum(0, 0)?
        .expect("unconstrained cover always exists");
    let within = |w: f64| w <= opt + WEIGHT_TOLERANCE * opt.abs().max(1.0);

    // greedy over ids: take v whenever some optimal cover extends the choice
    let (mut forced_in, mut forced_out) = (0u64, 0u64);
    for v in 0..n {
        if solver.is_cover(forced_in) {
            break;
        }
        match solver.optimum(forced_in | (1 << v), forced_out)? {
            Some(w) if within(w) => forced_in |= 1 << v,
            _ => forced_out |= 1 << v,
        }
    }
    let cover: Vec<NodeId> = (0..n).filter(|&v| forced_in >> v & 1 == 1).collect();
    let weight = cover.iter().map(|&v| solver.weights[v]).sum();
    Ok(CoverOptimum { weight, cover })
}

struct CoverSearch {
    weights: Vec<f64>,
    neighbors: Vec<u64>,
    clock: Clock,
}

impl CoverSearch {
    fn is_cover(&self, set: u64) -> bool {
        (0..self.weights.len()).all(|v| set >> v & 1 == 1 || self.neighbors[v] & !set == 0)
    }

    fn weight_of(&self, set: u64) -> f64 {
        (0..self.weights.len())
            .filter(|&v| set >> v & 1 == 1)
            .map(|v| self.weights[v])
            .sum()
    }

    /// Optimal weight of a cover containing `forced_in` and avoiding
    /// `forced_out`, or `None` when no such cover exists.
    fn optimum(&mut self, forced_in: u64, forced_out: u64) -> Result<Option<f64>, OracleError> {
        let mut inside = forced_in;
        for v in 0..self.weights.len() {
            if forced_out >> v & 1 == 1 {
                inside |= self.neighbors[v];
            }
        }
        if inside & forced_out != 0 {
            return Ok(None);
        }
        let mut best = f64::INFINITY;
        self.branch(inside, forced_out, self.weight_of(inside), &mut best)?;
        Ok(best.is_finite().then_some(best))
    }

    fn branch(
        &mut self,
        inside: u64,
        outside: u64,
        weight: f64,
        best: &mut f64,
    ) -> Result<(), OracleError> {
        self.clock.check()?;
        let n = self.weights.len();
        // uncovered[v]: neighbors of v reached by an edge with no endpoint inside
        let uncovered: Vec<u64> = (0..n)
            .map(|v| {
                if inside >> v & 1 == 1 {
                    0
                } else {
                    self.neighbors[v] & !inside
                }
            })
            .collect();
        let pick = (0..n)
            .filter(|&v| uncovered[v] != 0)
            .max_by_key(|&v| (uncovered[v].count_ones(), std::cmp::Reverse(v)));
        let Some(u) = pick else {
            *best = best.min(weight);
            return Ok(());
        };
        if weight + self.matching_bound(&uncovered) >= *best {
            return Ok(());
        }
        if outside >> u & 1 == 0 {
            self.branch(inside | (1 << u), outside, weight + self.weights[u], best)?;
        }
        let forced = uncovered[u];
        if forced & outside == 0 {
            let added = self.weight_of(forced);
            self.branch(inside | forced, outside | (1 << u), weight + added, best)?;
        }
        Ok(())
    }

    /// Disjoint uncovered edges each need a distinct endpoint, so a greedy
    /// matching on them bounds the remaining weight from below.
    fn matching_bound(&self, uncovered: &[u64]) -> f64 {
        let mut used = 0u64;
        let mut bound = 0.0;
        for u in 0..uncovered.len() {
            if used >> u & 1 == 1 {
                continue;
            }
            let free = uncovered[u] & !used;
            if free != 0 {
                let v = free.trailing_zeros() as usize;
                used |= (1 << u) | (1 << v);
                bound += self.weights[u].min(self.weights[v]);
            }
        }
        bound
    }
}

/// True iff every edge of `g` has an endpoint in `cover`.
pub fn is_vertex_cover(g: &Graph, cover: &[NodeId]) -> bool {
    let mut inside = vec![false; g.n()];
    for &v in cover {
        if v >= g.n() {
            return false;
        }
        inside[v] = true;
    }
    g.edges().iter().all(|&(u, v)| inside[u] || inside[v])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphModel};
    use crate::Seed;
    use proptest::prelude::*;
    use rand::Rng;

    fn model(m: GraphModel) -> Graph {
        generate(&m, Seed(0)).unwrap()
    }

    fn brute_matching(g: &Graph) -> usize {
        fn go(g: &Graph, v: usize, used: &mut Vec<bool>) -> usize {
            if v == g.n() {
                return 0;
            }
            if used[v] {
                return go(g, v + 1, used);
            }
            let mut best = go(g, v + 1, used);
            for &u in g.neighbors(v) {
                if !used[u] {
                    used[u] = true;
                    used[v] = true;
                    best = best.max(1 + go(g, v + 1, used));
                    used[u] = false;
                    used[v] = false;
                }
            }
            best
        }
        go(g, 0, &mut vec![false; g.n()])
    }

    fn brute_cover(g: &Graph, w: &[f64]) -> (f64, Vec<NodeId>) {
        let n = g.n();
        let mut best: Option<(f64, Vec<NodeId>)> = None;
        for mask in 0u32..1 << n {
            let set: Vec<NodeId> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            if !is_vertex_cover(g, &set) {
                continue;
            }
            let weight: f64 = set.iter().map(|&v| w[v]).sum();
            let better = match &best {
                None => true,
                Some((bw, bs)) => weight < bw - 1e-9 || ((weight - bw).abs() <= 1e-9 && set < *bs),
            };
            if better {
                best = Some((weight, set));
            }
        }
        best.unwrap()
    }

    #[test]
    fn matching_examples() {
        let lim = OracleLimits::default();
        assert_eq!(
            exact_max_matching(&model(GraphModel::Path(3)), &lim)
                .unwrap()
                .size,
            1
        );
        assert_eq!(
            exact_max_matching(&model(GraphModel::Complete(4)), &lim)
                .unwrap()
                .size,
            2
        );
        assert_eq!(exact_max_matching(&Graph::empty(0), &lim).unwrap().size, 0);
        assert!(matches!(
            exact_max_matching(&model(GraphModel::Complete(10)), &lim),
            Err(OracleError::TooLarge { size: 45, .. })
        ));
    }

    #[test]
    fn cover_examples() {
        let lim = OracleLimits::default();
        let edge = model(GraphModel::Path(2))
            .with_weights(vec![1.0, 1e6])
            .unwrap();
        assert_eq!(
            exact_min_wvc(&edge, &lim).unwrap(),
            CoverOptimum {
                weight: 1.0,
                cover: vec![0]
            }
        );
        let p3 = model(GraphModel::Path(3)).with_unit_weights();
        assert_eq!(
            exact_min_wvc(&p3, &lim).unwrap(),
            CoverOptimum {
                weight: 1.0,
                cover: vec![1]
            }
        );
        let k4 = model(GraphModel::Complete(4)).with_unit_weights();
        assert_eq!(
            exact_min_wvc(&k4, &lim).unwrap(),
            CoverOptimum {
                weight: 3.0,
                cover: vec![0, 1, 2]
            }
        );
        assert_eq!(
            exact_min_wvc(&Graph::empty(3), &lim).unwrap().cover,
            Vec::<NodeId>::new()
        );
        assert!(exact_min_wvc(&Graph::empty(25), &lim).is_err());
    }

    #[test]
    fn zero_weight_ties_pick_smallest_list() {
        // {1} and {0, 1} both weigh 1, and [0, 1] sorts before [1]
        let g = model(GraphModel::Path(3))
            .with_weights(vec![0.0, 1.0, 5.0])
            .unwrap();
        let opt = exact_min_wvc(&g, &OracleLimits::default()).unwrap();
        assert_eq!(opt.weight, 1.0);
        assert_eq!(opt.cover, vec![0, 1]);
    }

    #[test]
    fn cover_beats_random_covers() {
        let mut rng = Seed(3).rng();
        let g = generate(&GraphModel::ErdosRenyi { n: 16, p: 0.3 }, Seed(8)).unwrap();
        let w: Vec<f64> = (0..16).map(|_| rng.gen_range(0.1..10.0)).collect();
        let g = g.with_weights(w.clone()).unwrap();
        let opt = exact_min_wvc(&g, &OracleLimits::default()).unwrap();
        assert!(is_vertex_cover(&g, &opt.cover));
        for _ in 0..1000 {
            let p: f64 = rng.gen();
            let mut set: Vec<NodeId> = (0..16).filter(|_| rng.gen::<f64>() < p).collect();
            for (u, v) in g.edges() {
                if !set.contains(&u) && !set.contains(&v) {
                    set.push(if rng.gen() { u } else { v });
                }
            }
            let weight: f64 = set.iter().map(|&v| w[v]).sum();
            assert!(opt.weight <= weight + 1e-9);
        }
    }

    proptest! {
        #[test]
        fn agrees_with_enumeration(n in 0usize..9, p in 0.0f64..1.0, seed in any::<u64>(), unit in any::<bool>()) {
            let g = generate(&GraphModel::ErdosRenyi { n, p }, Seed(seed)).unwrap();
            let mut rng = Seed(seed).derive(1).rng();
            let w: Vec<f64> = if unit {
                vec![1.0; n]
            } else {
                (0..n).map(|_| rng.gen_range(0..4) as f64 * 0.5).collect()
            };
            let g = g.with_weights(w.clone()).unwrap();
            let lim = OracleLimits::default();

            let m = exact_max_matching(&g, &lim).unwrap();
            prop_assert_eq!(m.size, brute_matching(&g));
            prop_assert!(crate::matching::verify_matching(&g, &m.edges));

            let c = exact_min_wvc(&g, &lim).unwrap();
            let (bw, bs) = brute_cover(&g, &w);
            prop_assert!((c.weight - bw).abs() <= 1e-9);
            prop_assert_eq!(c.cover, bs);
        }
    }
}
