//! Plain-text edge-list format.
//!
//! ```text
//! n m [weighted]
//! u v            (m lines)
//! v w(v)         (n lines, only when the header says `weighted`)
//! ```
//!
//! Blank lines are ignored. Line numbers in errors are 1-based and refer to
//! the original input.

use std::fmt::Write as _;

use thiserror::Error;

use super::Graph;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("line {line}: malformed line: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: node id {id} out of range for n = {n}")]
    IdOutOfRange { line: usize, id: usize, n: usize },
    #[error("line {line}: negative or non-finite weight {weight}")]
    NegativeWeight { line: usize, weight: f64 },
    #[error("line {line}: duplicate edge {{{u}, {v}}}")]
    DuplicateEdge { line: usize, u: usize, v: usize },
    #[error("line {line}: self-loop at node {node}")]
    SelfLoop { line: usize, node: usize },
    #[error("line {line}: weight for node {node} given twice")]
    DuplicateWeight { line: usize, node: usize },
    #[error("unexpected end of input: expected {expected} more {what} line(s)")]
    Truncated { expected: usize, what: &'static str },
    #[error("line {line}: unexpected trailing content")]
    Trailing { line: usize },
    #[error("input is not valid UTF-8")]
    Encoding,
}

/// Parses the edge-list format into a validated [`Graph`].
pub fn parse_edge_list(input: &[u8]) -> Result<Graph, ParseError> {
    let text = std::str::from_utf8(input).map_err(|_| ParseError::Encoding)?;
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or(ParseError::Truncated {
        expected: 1,
        what: "header",
    })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let weighted = match fields.as_slice() {
        [_, _] => false,
        [_, _, "weighted"] => true,
        _ => {
            return Err(malformed(hline, "header must be `n m` or `n m weighted`"));
        }
    };
    let n: usize = parse_num(fields[0], hline, "node count")?;
    let m: usize = parse_num(fields[1], hline, "edge count")?;

    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
    for k in 0..m {
        let (line, l) = lines.next().ok_or(ParseError::Truncated {
            expected: m - k,
            what: "edge",
        })?;
        let (u, v) = two_fields(l, line)?;
        let u: usize = parse_num(u, line, "node id")?;
        let v: usize = parse_num(v, line, "node id")?;
        for id in [u, v] {
            if id >= n {
                return Err(ParseError::IdOutOfRange { line, id, n });
            }
        }
        if u == v {
            return Err(ParseError::SelfLoop { line, node: u });
        }
        if adjacency[u].contains(&v) {
            return Err(ParseError::DuplicateEdge {
                line,
                u: u.min(v),
                v: u.max(v),
            });
        }
        adjacency[u].push(v);
        adjacency[v].push(u);
    }

    let weights = if weighted {
        let mut weights: Vec<Option<f64>> = vec![None; n];
        for k in 0..n {
            let (line, l) = lines.next().ok_or(ParseError::Truncated {
                expected: n - k,
                what: "weight",
            })?;
            let (v, w) = two_fields(l, line)?;
            let v: usize = parse_num(v, line, "node id")?;
            let w: f64 = parse_num(w, line, "weight")?;
            if v >= n {
                return Err(ParseError::IdOutOfRange { line, id: v, n });
            }
            if !w.is_finite() || w < 0.0 {
                return Err(ParseError::NegativeWeight { line, weight: w });
            }
            if weights[v].replace(w).is_some() {
                return Err(ParseError::DuplicateWeight { line, node: v });
            }
        }
        Some(
            weights
                .into_iter()
                .map(|w| w.expect("n distinct ids in 0..n cover all nodes"))
                .collect(),
        )
    } else {
        None
    };

    if let Some((line, _)) = lines.next() {
        return Err(ParseError::Trailing { line });
    }

    let edges = adjacency
        .iter()
        .enumerate()
        .flat_map(|(u, l)| l.iter().filter(move |&&v| v > u).map(move |&v| (u, v)));
    let graph = Graph::from_edges(n, edges).expect("edges validated above");
    Ok(match weights {
        Some(w) => graph.with_weights(w).expect("weights validated above"),
        None => graph,
    })
}

impl Graph {
    /// Canonical text form: header, edges in canonical order, then weights
    /// in node order.
    pub fn to_edge_list(&self) -> String {
        let edges = self.edges();
        let mut out = String::new();
        match self.node_weights() {
            Some(_) => writeln!(out, "{} {} weighted", self.n(), edges.len()),
            None => writeln!(out, "{} {}", self.n(), edges.len()),
        }
        .expect("writing to a String cannot fail");
        for (u, v) in edges {
            writeln!(out, "{u} {v}").expect("writing to a String cannot fail");
        }
        if let Some(weights) = self.node_weights() {
            for (v, w) in weights.iter().enumerate() {
                writeln!(out, "{v} {w:?}").expect("writing to a String cannot fail");
            }
        }
        out
    }
}

fn malformed(line: usize, reason: &str) -> ParseError {
    ParseError::Malformed {
        line,
        reason: reason.to_string(),
    }
}

fn two_fields(l: &str, line: usize) -> Result<(&str, &str), ParseError> {
    let mut it = l.split_whitespace();
    match (it.next(), it.next(), it.next()) {
        (Some(a), Some(b), None) => Ok((a, b)),
        _ => Err(malformed(line, "expected exactly two fields")),
    }
}

fn parse_num<T: std::str::FromStr>(s: &str, line: usize, what: &str) -> Result<T, ParseError> {
    s.parse().map_err(|_| ParseError::Malformed {
        line,
        reason: format!("invalid {what} `{s}`"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphModel};
    use proptest::prelude::*;

    #[test]
    fn parses_path() {
        let g = parse_edge_list(b"3 2\n0 1\n1 2").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edges(), vec![(0, 1), (1, 2)]);
        assert!(g.node_weights().is_none());
    }

    #[test]
    fn parses_single_isolated_node() {
        let g = parse_edge_list(b"1 0").unwrap();
        assert_eq!(g.n(), 1);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn parses_weights() {
        let g = parse_edge_list(b"2 1 weighted\n0 1\n0 5.0\n1 0.0").unwrap();
        assert_eq!(g.node_weights(), Some(&[5.0, 0.0][..]));
    }

    #[test]
    fn error_cases_name_their_line() {
        assert!(matches!(
            parse_edge_list(b"3 1\n0 x"),
            Err(ParseError::Malformed { line: 2, .. })
        ));
        assert!(matches!(
            parse_edge_list(b"3 1\n0 3"),
            Err(ParseError::IdOutOfRange {
                line: 2,
                id: 3,
                n: 3
            })
        ));
        assert!(matches!(
            parse_edge_list(b"2 1 weighted\n0 1\n0 -1\n1 1"),
            Err(ParseError::NegativeWeight { line: 3, .. })
        ));
        assert!(matches!(
            parse_edge_list(b"3 2\n0 1\n\n1 0"),
            Err(ParseError::DuplicateEdge {
                line: 4,
                u: 0,
                v: 1
            })
        ));
        assert!(matches!(
            parse_edge_list(b"3 1\n2 2"),
            Err(ParseError::SelfLoop { line: 2, node: 2 })
        ));
        assert!(matches!(
            parse_edge_list(b"3 2\n0 1"),
            Err(ParseError::Truncated { .. })
        ));
        assert!(matches!(
            parse_edge_list(b"2 0\n0 1"),
            Err(ParseError::Trailing { line: 2 })
        ));
        assert!(matches!(
            parse_edge_list(b"2 0 heavy"),
            Err(ParseError::Malformed { line: 1, .. })
        ));
        assert!(matches!(
            parse_edge_list(b"2 0 weighted\n0 1\n0 2"),
            Err(ParseError::DuplicateWeight { line: 3, node: 0 })
        ));
    }

    #[test]
    fn serialization_is_canonical() {
        let g = parse_edge_list(b"3 2\n2 1\n1 0\n").unwrap();
        assert_eq!(g.to_edge_list(), "3 2\n0 1\n1 2\n");
    }

    proptest! {
        #[test]
        fn round_trip(n in 0usize..15, p in 0.0f64..1.0, seed in any::<u64>(), weighted in any::<bool>()) {
            let mut g = generate(&GraphModel::ErdosRenyi { n, p }, crate::Seed(seed)).unwrap();
            if weighted {
                let w: Vec<f64> = (0..n).map(|i| (i as f64) * 0.37 + 1e-3).collect();
                g = g.with_weights(w).unwrap();
            }
            let text = g.to_edge_list();
            let back = parse_edge_list(text.as_bytes()).unwrap();
            prop_assert_eq!(&back, &g);
            prop_assert_eq!(back.to_edge_list(), text);
        }
    }
}
