//! Directed graphs with K nonnegative additive weights per edge, the
//! constraint vectors they are routed against, and the path semantics
//! shared by the routing algorithms.

use std::str::FromStr;

use crate::error::{Error, Result};

/// A directed edge carrying one weight per QoS metric.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub weights: Vec<f64>,
}

/// Directed graph with `metric_count` nonnegative weights per edge.
/// Parallel edges are permitted; self-loops are rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedNetwork {
    node_count: usize,
    metric_count: usize,
    edges: Vec<Edge>,
}

impl WeightedNetwork {
    pub fn new(
        node_count: usize,
        metric_count: usize,
        edges: Vec<(usize, usize, Vec<f64>)>,
    ) -> Result<Self> {
        if metric_count == 0 {
            return Err(Error::InvalidNetwork("metric count must be at least 1".into()));
        }
        let mut out = Vec::with_capacity(edges.len());
        for (from, to, weights) in edges {
            validate_edge(node_count, metric_count, from, to, &weights, None)?;
            out.push(Edge { from, to, weights });
        }
        Ok(WeightedNetwork { node_count, metric_count, edges: out })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn metric_count(&self) -> usize {
        self.metric_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Outgoing edge indices per node.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count];
        for (i, e) in self.edges.iter().enumerate() {
            adj[e.from].push(i);
        }
        adj
    }

    /// Parses the network file format: line 1 is `n m K`, followed by
    /// `m` lines `u v w1 ... wK` with 0-based node ids.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or(Error::Parse { line: 1, message: "empty input".into() })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Parse { line: 1, message: "expected header `n m K`".into() });
        }
        let parse_usize = |s: &str, what: &str| -> Result<usize> {
            s.parse().map_err(|_| Error::Parse {
                line: 1,
                message: format!("invalid {what} `{s}`"),
            })
        };
        let n = parse_usize(fields[0], "node count")?;
        let m = parse_usize(fields[1], "edge count")?;
        let k = parse_usize(fields[2], "metric count")?;
        if k == 0 {
            return Err(Error::Parse { line: 1, message: "metric count must be at least 1".into() });
        }
        let mut edges = Vec::with_capacity(m);
        let mut seen = 0usize;
        for (idx, line) in lines {
            let lineno = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            if seen == m {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("more than {m} edge rows"),
                });
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 2 + k {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("expected `u v` plus {k} weights, found {} fields", fields.len()),
                });
            }
            let u: usize = fields[0].parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("invalid node id `{}`", fields[0]),
            })?;
            let v: usize = fields[1].parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("invalid node id `{}`", fields[1]),
            })?;
            let mut weights = Vec::with_capacity(k);
            for f in &fields[2..] {
                let w: f64 = f.parse().map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("invalid weight `{f}`"),
                })?;
                weights.push(w);
            }
            validate_edge(n, k, u, v, &weights, Some(lineno))?;
            edges.push(Edge { from: u, to: v, weights });
            seen += 1;
        }
        if seen != m {
            return Err(Error::Parse {
                line: seen + 1,
                message: format!("expected {m} edge rows, found {seen}"),
            });
        }
        Ok(WeightedNetwork { node_count: n, metric_count: k, edges })
    }

    /// Inverse of [`WeightedNetwork::parse`]; `parse(emit(g)) == g`.
    pub fn emit(&self) -> String {
        let mut out = format!("{} {} {}\n", self.node_count, self.edges.len(), self.metric_count);
        for e in &self.edges {
            out.push_str(&format!("{} {}", e.from, e.to));
            for w in &e.weights {
                out.push_str(&format!(" {w}"));
            }
            out.push('\n');
        }
        out
    }
}

fn validate_edge(
    node_count: usize,
    metric_count: usize,
    from: usize,
    to: usize,
    weights: &[f64],
    line: Option<usize>,
) -> Result<()> {
    let fail = |message: String| match line {
        Some(line) => Error::Parse { line, message },
        None => Error::InvalidNetwork(message),
    };
    if from >= node_count || to >= node_count {
        return Err(fail(format!(
            "edge ({from}, {to}) references a node outside 0..{node_count}"
        )));
    }
    if from == to {
        return Err(fail(format!("self-loop at node {from}")));
    }
    if weights.len() != metric_count {
        return Err(fail(format!(
            "edge ({from}, {to}) has {} weights, expected {metric_count}",
            weights.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(fail(format!("edge ({from}, {to}) weight {w} must be finite and nonnegative")));
    }
    Ok(())
}

/// Per-metric bounds W_1..W_K, all strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintVector {
    bounds: Vec<f64>,
}

impl ConstraintVector {
    pub fn new(bounds: Vec<f64>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::InvalidConstraints("no bounds given".into()));
        }
        if let Some(b) = bounds.iter().find(|b| !(**b > 0.0) || !b.is_finite()) {
            return Err(Error::InvalidConstraints(format!(
                "bound {b} must be positive and finite"
            )));
        }
        Ok(ConstraintVector { bounds })
    }

    pub fn len(&self) -> usize {
        self.bounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bounds.is_empty()
    }

    pub fn bounds(&self) -> &[f64] {
        &self.bounds
    }

    pub(crate) fn check_arity(&self, net: &WeightedNetwork) -> Result<()> {
        if self.len() != net.metric_count() {
            return Err(Error::MetricArityMismatch {
                constraints: self.len(),
                metrics: net.metric_count(),
            });
        }
        Ok(())
    }
}

impl FromStr for ConstraintVector {
    type Err = Error;

    /// Comma-separated positive decimals, e.g. `"3,5"` or `"4,4.5"`.
    fn from_str(s: &str) -> Result<Self> {
        let mut bounds = Vec::new();
        for part in s.split(',') {
            let trimmed = part.trim();
            let b: f64 = trimmed.parse().map_err(|_| {
                Error::InvalidConstraints(format!("`{trimmed}` is not a number"))
            })?;
            bounds.push(b);
        }
        ConstraintVector::new(bounds)
    }
}

/// A simple directed path with its accumulated per-metric weights.
///
/// A path from a node to itself is the empty path: one node, zero weight
/// in every metric.
#[derive(Debug, Clone, PartialEq)]
pub struct RoutePath {
    nodes: Vec<usize>,
    edges: Vec<usize>,
    weights: Vec<f64>,
}

impl RoutePath {
    /// The empty path at `node`.
    pub fn empty(node: usize, metric_count: usize) -> Self {
        RoutePath { nodes: vec![node], edges: Vec::new(), weights: vec![0.0; metric_count] }
    }

    /// Builds and validates a path from consecutive edge indices
    /// starting at `start`. The path must chain up and stay simple.
    pub fn from_edge_indices(net: &WeightedNetwork, start: usize, edge_indices: &[usize]) -> Result<Self> {
        if start >= net.node_count() {
            return Err(Error::InvalidPath(format!("start node {start} out of range")));
        }
        let mut nodes = vec![start];
        let mut weights = vec![0.0; net.metric_count()];
        let mut at = start;
        for &ei in edge_indices {
            let edge = net.edges().get(ei).ok_or(Error::IndexOutOfRange {
                index: ei,
                len: net.edges().len(),
            })?;
            if edge.from != at {
                return Err(Error::InvalidPath(format!(
                    "edge {ei} starts at {} but the path is at {at}",
                    edge.from
                )));
            }
            at = edge.to;
            if nodes.contains(&at) {
                return Err(Error::InvalidPath(format!("node {at} repeats; path must be simple")));
            }
            nodes.push(at);
            for (acc, w) in weights.iter_mut().zip(&edge.weights) {
                *acc += w;
            }
        }
        Ok(RoutePath { nodes, edges: edge_indices.to_vec(), weights })
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    /// Indices into the network's edge list, in traversal order.
    pub fn edge_indices(&self) -> &[usize] {
        &self.edges
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn source(&self) -> usize {
        self.nodes[0]
    }

    pub fn target(&self) -> usize {
        *self.nodes.last().unwrap()
    }

    pub fn edge_count(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Node ids joined with hyphens, e.g. `0-1-3`.
    pub fn display_nodes(&self) -> String {
        let strs: Vec<String> = self.nodes.iter().map(|n| n.to_string()).collect();
        strs.join("-")
    }
}

/// Accumulated weight of `path` in metric `k`.
pub fn path_weight(path: &RoutePath, k: usize) -> Result<f64> {
    path.weights()
        .get(k)
        .copied()
        .ok_or(Error::IndexOutOfRange { index: k, len: path.weights().len() })
}

/// Path length relative to the constraints: `max_k w_k(p) / W_k`.
/// Zero for the empty path.
pub fn path_length(path: &RoutePath, constraints: &ConstraintVector) -> Result<f64> {
    if path.weights().len() != constraints.len() {
        return Err(Error::MetricArityMismatch {
            constraints: constraints.len(),
            metrics: path.weights().len(),
        });
    }
    Ok(path
        .weights()
        .iter()
        .zip(constraints.bounds())
        .map(|(w, b)| w / b)
        .fold(0.0, f64::max))
}

/// True iff every metric respects its bound, i.e. `path_length <= 1`.
pub fn is_feasible(path: &RoutePath, constraints: &ConstraintVector) -> Result<bool> {
    if path.weights().len() != constraints.len() {
        return Err(Error::MetricArityMismatch {
            constraints: constraints.len(),
            metrics: path.weights().len(),
        });
    }
    Ok(path
        .weights()
        .iter()
        .zip(constraints.bounds())
        .all(|(w, b)| w <= b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_edge_net() -> WeightedNetwork {
        WeightedNetwork::new(
            3,
            2,
            vec![(0, 1, vec![1.0, 2.0]), (1, 2, vec![3.0, 4.0])],
        )
        .unwrap()
    }

    #[test]
    fn network_validation() {
        assert!(WeightedNetwork::new(2, 0, vec![]).is_err());
        assert!(WeightedNetwork::new(2, 1, vec![(0, 2, vec![1.0])]).is_err());
        assert!(WeightedNetwork::new(2, 1, vec![(1, 1, vec![1.0])]).is_err());
        assert!(WeightedNetwork::new(2, 1, vec![(0, 1, vec![-1.0])]).is_err());
        assert!(WeightedNetwork::new(2, 1, vec![(0, 1, vec![f64::NAN])]).is_err());
        assert!(WeightedNetwork::new(2, 2, vec![(0, 1, vec![1.0])]).is_err());
        // Parallel edges are fine.
        assert!(WeightedNetwork::new(
            2,
            1,
            vec![(0, 1, vec![1.0]), (0, 1, vec![2.0])]
        )
        .is_ok());
    }

    #[test]
    fn empty_path_has_zero_weight_everywhere() {
        let p = RoutePath::empty(1, 2);
        assert_eq!(path_weight(&p, 0).unwrap(), 0.0);
        assert_eq!(path_weight(&p, 1).unwrap(), 0.0);
        assert!(path_weight(&p, 2).is_err());
    }

    #[test]
    fn path_weights_accumulate_per_metric() {
        let net = two_edge_net();
        let single = RoutePath::from_edge_indices(&net, 0, &[0]).unwrap();
        assert_eq!(single.weights(), &[1.0, 2.0]);
        let both = RoutePath::from_edge_indices(&net, 0, &[0, 1]).unwrap();
        assert_eq!(both.weights(), &[4.0, 6.0]);
        assert_eq!(both.nodes(), &[0, 1, 2]);
    }

    #[test]
    fn path_construction_rejects_broken_chains_and_repeats() {
        let net = two_edge_net();
        assert!(RoutePath::from_edge_indices(&net, 0, &[1]).is_err());
        assert!(RoutePath::from_edge_indices(&net, 9, &[]).is_err());
        let cyclic = WeightedNetwork::new(
            2,
            1,
            vec![(0, 1, vec![1.0]), (1, 0, vec![1.0])],
        )
        .unwrap();
        assert!(RoutePath::from_edge_indices(&cyclic, 0, &[0, 1]).is_err());
    }

    #[test]
    fn path_length_is_the_worst_constraint_ratio() {
        let net = two_edge_net();
        let p = RoutePath::from_edge_indices(&net, 0, &[0, 1]).unwrap();
        // weights (4, 6)
        let w = ConstraintVector::new(vec![4.0, 4.0]).unwrap();
        assert_eq!(path_length(&p, &w).unwrap(), 1.5);
        let boundary = ConstraintVector::new(vec![4.0, 6.0]).unwrap();
        assert_eq!(path_length(&p, &boundary).unwrap(), 1.0);
        assert!(is_feasible(&p, &boundary).unwrap());
        let tight = ConstraintVector::new(vec![3.9, 6.0]).unwrap();
        assert!(!is_feasible(&p, &tight).unwrap());
        let empty = RoutePath::empty(0, 2);
        assert_eq!(path_length(&empty, &w).unwrap(), 0.0);
    }

    #[test]
    fn scaling_constraints_scales_length_inversely() {
        let net = two_edge_net();
        let p = RoutePath::from_edge_indices(&net, 0, &[0, 1]).unwrap();
        let w = ConstraintVector::new(vec![2.0, 3.0]).unwrap();
        let l = path_length(&p, &w).unwrap();
        let scaled = ConstraintVector::new(vec![4.0, 6.0]).unwrap();
        assert!((path_length(&p, &scaled).unwrap() - l / 2.0).abs() <= 1e-15);
    }

    #[test]
    fn constraint_parsing() {
        let w: ConstraintVector = "3,5".parse().unwrap();
        assert_eq!(w.bounds(), &[3.0, 5.0]);
        let w: ConstraintVector = "4, 4.5".parse().unwrap();
        assert_eq!(w.bounds(), &[4.0, 4.5]);
        assert!("".parse::<ConstraintVector>().is_err());
        assert!("3,-5".parse::<ConstraintVector>().is_err());
        assert!("3,zero".parse::<ConstraintVector>().is_err());
        assert!("0,5".parse::<ConstraintVector>().is_err());
    }

    #[test]
    fn parse_minimal_network() {
        let net = WeightedNetwork::parse("2 1 2\n0 1 1.0 2.0\n").unwrap();
        assert_eq!(net.node_count(), 2);
        assert_eq!(net.metric_count(), 2);
        assert_eq!(net.edges().len(), 1);
        assert_eq!(net.edges()[0].weights, vec![1.0, 2.0]);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let err = WeightedNetwork::parse("2 1 2\n0 1 1.0 -2.0\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        let err = WeightedNetwork::parse("2 2 1\n0 1 1.0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
        let err = WeightedNetwork::parse("2 1 2\n0 1 1.0\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(WeightedNetwork::parse("not a header\n").is_err());
    }

    #[test]
    fn emit_then_parse_round_trips() {
        let net = two_edge_net();
        let back = WeightedNetwork::parse(&net.emit()).unwrap();
        assert_eq!(back, net);
    }
}
