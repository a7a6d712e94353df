//! Test-instance generators and their `name:param[:param]` mini-syntax.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Graph, GraphError};
use crate::Seed;

/// Resampling attempts for the configuration model before giving up.
const REGULAR_MAX_ATTEMPTS: usize = 10_000;

/// Serializes as its `name:param` string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum GraphModel {
    Empty(usize),
    Path(usize),
    /// Center `0` joined to `1..n`.
    Star(usize),
    Complete(usize),
    CompleteBipartite {
        a: usize,
        b: usize,
    },
    ErdosRenyi {
        n: usize,
        p: f64,
    },
    RandomRegular {
        n: usize,
        d: usize,
    },
}

impl GraphModel {
    pub fn node_count(&self) -> usize {
        match *self {
            GraphModel::Empty(n)
            | GraphModel::Path(n)
            | GraphModel::Star(n)
            | GraphModel::Complete(n)
            | GraphModel::ErdosRenyi { n, .. }
            | GraphModel::RandomRegular { n, .. } => n,
            GraphModel::CompleteBipartite { a, b } => a + b,
        }
    }
}

/// Generates a simple graph from `model`. Deterministic in `seed`.
pub fn generate(model: &GraphModel, seed: Seed) -> Result<Graph, GraphError> {
    match *model {
        GraphModel::Empty(n) => Ok(Graph::empty(n)),
        GraphModel::Path(n) => Graph::from_edges(n, (1..n).map(|v| (v - 1, v))),
        GraphModel::Star(n) => Graph::from_edges(n, (1..n).map(|v| (0, v))),
        GraphModel::Complete(n) => {
            Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
        }
        GraphModel::CompleteBipartite { a, b } => {
            Graph::from_edges(a + b, (0..a).flat_map(|u| (a..a + b).map(move |v| (u, v))))
        }
        GraphModel::ErdosRenyi { n, p } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(GraphError::Infeasible(format!(
                    "edge probability {p} not in [0, 1]"
                )));
            }
            let mut rng = seed.rng();
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen::<f64>() < p {
                        edges.push((u, v));
                    }
                }
            }
            Graph::from_edges(n, edges)
        }
        GraphModel::RandomRegular { n, d } => random_regular(n, d, seed),
    }
}

/// Configuration model, resampled until the pairing is simple.
fn random_regular(n: usize, d: usize, seed: Seed) -> Result<Graph, GraphError> {
    if d > 0 && d >= n {
        return Err(GraphError::Infeasible(format!(
            "degree {d} must be < n = {n}"
        )));
    }
    if !(n * d).is_multiple_of(2) {
        return Err(GraphError::Infeasible(format!(
            "n * d = {} must be even",
            n * d
        )));
    }
    let mut rng = seed.rng();
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    'attempt: for _ in 0..REGULAR_MAX_ATTEMPTS {
        stubs.shuffle(&mut rng);
        let mut seen = std::collections::HashSet::with_capacity(stubs.len() / 2);
        let mut edges = Vec::with_capacity(stubs.len() / 2);
        for pair in stubs.chunks_exact(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || !seen.insert((u, v)) {
                continue 'attempt;
            }
            edges.push((u, v));
        }
        return Graph::from_edges(n, edges);
    }
    Err(GraphError::Infeasible(format!(
        "no simple {d}-regular pairing on {n} nodes after {REGULAR_MAX_ATTEMPTS} attempts"
    )))
}

impl fmt::Display for GraphModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphModel::Empty(n) => write!(f, "empty:{n}"),
            GraphModel::Path(n) => write!(f, "path:{n}"),
            GraphModel::Star(n) => write!(f, "star:{n}"),
            GraphModel::Complete(n) => write!(f, "complete:{n}"),
            GraphModel::CompleteBipartite { a, b } => write!(f, "bipartite:{a}:{b}"),
            GraphModel::ErdosRenyi { n, p } => write!(f, "er:{n}:{p}"),
            GraphModel::RandomRegular { n, d } => write!(f, "regular:{n}:{d}"),
        }
    }
}

impl From<GraphModel> for String {
    fn from(model: GraphModel) -> String {
        model.to_string()
    }
}

impl TryFrom<String> for GraphModel {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl FromStr for GraphModel {
    type Err = String;

    /// Accepts `empty:N`, `path:N`, `star:N`, `complete:N`,
    /// `bipartite:A:B` (or `complete_bipartite`), `er:N:P` (or
    /// `erdos_renyi`), `regular:N:D` (or `random_regular`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let int = |i: usize| -> Result<usize, String> {
            parts
                .get(i)
                .ok_or_else(|| format!("`{s}`: missing parameter {i}"))?
                .parse()
                .map_err(|_| format!("`{s}`: parameter {i} is not a non-negative integer"))
        };
        let arity = |k: usize| -> Result<(), String> {
            if parts.len() == k + 1 {
                Ok(())
            } else {
                Err(format!("`{s}`: expected {k} parameter(s)"))
            }
        };
        let model = match parts[0] {
            "empty" => GraphModel::Empty(int(1)?),
            "path" => GraphModel::Path(int(1)?),
            "star" => GraphModel::Star(int(1)?),
            "complete" => GraphModel::Complete(int(1)?),
            "bipartite" | "complete_bipartite" => {
                arity(2)?;
                GraphModel::CompleteBipartite {
                    a: int(1)?,
                    b: int(2)?,
                }
            }
            "er" | "erdos_renyi" => {
                arity(2)?;
                let p: f64 = parts[2]
                    .parse()
                    .map_err(|_| format!("`{s}`: bad probability"))?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(format!("`{s}`: probability must be in [0, 1]"));
                }
                GraphModel::ErdosRenyi { n: int(1)?, p }
            }
            "regular" | "random_regular" => {
                arity(2)?;
                GraphModel::RandomRegular {
                    n: int(1)?,
                    d: int(2)?,
                }
            }
            other => return Err(format!("unknown graph model `{other}`")),
        };
        if !matches!(
            model,
            GraphModel::CompleteBipartite { .. }
                | GraphModel::ErdosRenyi { .. }
                | GraphModel::RandomRegular { .. }
        ) {
            arity(1)?;
        }
        Ok(model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_and_complete() {
        let star = generate(&GraphModel::Star(4), Seed(0)).unwrap();
        assert_eq!(star.edges(), vec![(0, 1), (0, 2), (0, 3)]);
        let tri = generate(&GraphModel::Complete(3), Seed(0)).unwrap();
        assert_eq!(tri.edge_count(), 3);
        let kab = generate(&GraphModel::CompleteBipartite { a: 2, b: 3 }, Seed(0)).unwrap();
        assert_eq!(kab.edge_count(), 6);
        assert!(!kab.has_edge(0, 1));
    }

    #[test]
    fn er_with_zero_probability_is_empty() {
        let g = generate(&GraphModel::ErdosRenyi { n: 10, p: 0.0 }, Seed(5)).unwrap();
        assert_eq!(g.n(), 10);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn regular_is_regular_and_deterministic() {
        let model = GraphModel::RandomRegular { n: 20, d: 3 };
        let g = generate(&model, Seed(11)).unwrap();
        assert!((0..20).all(|v| g.degree(v) == 3));
        assert_eq!(g, generate(&model, Seed(11)).unwrap());
    }

    #[test]
    fn regular_rejects_infeasible() {
        assert!(generate(&GraphModel::RandomRegular { n: 4, d: 4 }, Seed(0)).is_err());
        assert!(generate(&GraphModel::RandomRegular { n: 5, d: 3 }, Seed(0)).is_err());
        assert!(generate(&GraphModel::RandomRegular { n: 5, d: 0 }, Seed(0)).is_ok());
    }

    #[test]
    fn er_is_deterministic() {
        let model = GraphModel::ErdosRenyi { n: 30, p: 0.2 };
        assert_eq!(
            generate(&model, Seed(3)).unwrap(),
            generate(&model, Seed(3)).unwrap()
        );
    }

    #[test]
    fn mini_syntax() {
        assert_eq!(
            "complete:8".parse::<GraphModel>().unwrap(),
            GraphModel::Complete(8)
        );
        assert_eq!(
            "er:50:0.3".parse::<GraphModel>().unwrap(),
            GraphModel::ErdosRenyi { n: 50, p: 0.3 }
        );
        assert_eq!(
            "bipartite:2:3".parse::<GraphModel>().unwrap(),
            GraphModel::CompleteBipartite { a: 2, b: 3 }
        );
        assert!("path".parse::<GraphModel>().is_err());
        assert!("path:3:4".parse::<GraphModel>().is_err());
        assert!("er:5:1.5".parse::<GraphModel>().is_err());
        assert!("torus:5".parse::<GraphModel>().is_err());
        for s in ["empty:5", "star:6", "regular:10:3", "er:7:0.25"] {
            assert_eq!(s.parse::<GraphModel>().unwrap().to_string(), s);
        }
    }

    #[test]
    fn serde_uses_the_mini_syntax() {
        let model = GraphModel::ErdosRenyi { n: 50, p: 0.3 };
        let text = serde_json::to_string(&model).unwrap();
        assert_eq!(text, "\"er:50:0.3\"");
        assert_eq!(serde_json::from_str::<GraphModel>(&text).unwrap(), model);
        assert!(serde_json::from_str::<GraphModel>("\"er:5:2\"").is_err());
    }
}
