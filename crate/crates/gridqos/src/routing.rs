//! Multi-constrained routing: greedy scalarized routing with a provable
//! approximation factor, and an exact enumeration oracle for small
//! instances.
//!
//! The greedy algorithm collapses the K metrics of each edge into the
//! auxiliary weight `max_k w_k(e) / W_k` (computable locally at a node)
//! and routes on a plain shortest path. The returned path `p` satisfies
//! `w_k(p) <= K * delta_opt * W_k` for every metric, where `delta_opt`
//! is the best achievable worst-case constraint ratio.

use crate::error::{Error, Result};
use crate::graph::{is_feasible, path_length, ConstraintVector, RoutePath, WeightedNetwork};

/// Which algorithm produced a routing outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Greedy,
    Exact,
}

impl Algorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Greedy => "greedy",
            Algorithm::Exact => "exact",
        }
    }
}

/// Result of a routing query.
#[derive(Debug, Clone, PartialEq)]
pub struct RoutingOutcome {
    pub source: usize,
    pub target: usize,
    /// Absent iff the target is unreachable.
    pub path: Option<RoutePath>,
    /// `path_length` of the found path.
    pub delta_of_path: Option<f64>,
    /// Whether the found path meets every constraint.
    pub feasible: bool,
    pub algorithm: Algorithm,
}

/// CSV header matching [`RoutingOutcome::to_csv_row`].
pub const OUTCOME_CSV_HEADER: &str = "algorithm,source,target,feasible,length,path";

impl RoutingOutcome {
    /// One row under [`OUTCOME_CSV_HEADER`]. The `feasible` column holds
    /// the verdict: `feasible`, `unknown` (greedy found only an
    /// over-budget path), `infeasible` (exact proved it), or
    /// `infeasible: unreachable`.
    pub fn to_csv_row(&self) -> String {
        let verdict = match (&self.path, self.feasible, self.algorithm) {
            (None, _, _) => "infeasible: unreachable",
            (Some(_), true, _) => "feasible",
            (Some(_), false, Algorithm::Greedy) => "unknown",
            (Some(_), false, Algorithm::Exact) => "infeasible",
        };
        let length = self
            .delta_of_path
            .map(|l| crate::numeric::format_sig(l, 6))
            .unwrap_or_default();
        let path = self.path.as_ref().map(RoutePath::display_nodes).unwrap_or_default();
        format!(
            "{},{},{},{},{},{}",
            self.algorithm.as_str(),
            self.source,
            self.target,
            verdict,
            length,
            path
        )
    }
}

/// Auxiliary scalar weight per edge: `max_k w_k(e) / W_k`.
pub fn auxiliary_weights(net: &WeightedNetwork, constraints: &ConstraintVector) -> Result<Vec<f64>> {
    constraints.check_arity(net)?;
    Ok(net
        .edges()
        .iter()
        .map(|e| {
            e.weights
                .iter()
                .zip(constraints.bounds())
                .map(|(w, b)| w / b)
                .fold(0.0, f64::max)
        })
        .collect())
}

#[derive(Clone, Copy, PartialEq)]
struct Label {
    dist: f64,
    hops: u32,
    pred_node: usize,
    pred_edge: usize,
}

/// Relaxation-based single-source shortest path (Bellman-Ford) under
/// nonnegative scalar edge weights.
///
/// Ties are broken deterministically by preferring fewer hops, then the
/// smaller predecessor node id, then the smaller edge index. The hop
/// component also keeps predecessor pointers acyclic when zero-weight
/// edges tie. Edges relax in file order each round; rounds stop as soon
/// as nothing changes.
pub fn shortest_path(
    net: &WeightedNetwork,
    weights: &[f64],
    source: usize,
    target: usize,
) -> Result<Option<RoutePath>> {
    let n = net.node_count();
    if source >= n || target >= n {
        return Err(Error::IndexOutOfRange { index: source.max(target), len: n });
    }
    if weights.len() != net.edges().len() {
        return Err(Error::InvalidNetwork(format!(
            "{} scalar weights for {} edges",
            weights.len(),
            net.edges().len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(Error::InvalidNetwork(format!(
            "scalar weight {w} must be finite and nonnegative"
        )));
    }
    if source == target {
        return Ok(Some(RoutePath::empty(source, net.metric_count())));
    }

    let mut labels: Vec<Option<Label>> = vec![None; n];
    labels[source] =
        Some(Label { dist: 0.0, hops: 0, pred_node: usize::MAX, pred_edge: usize::MAX });

    // Distances and hop counts settle within n-1 rounds; one more round
    // settles local predecessor ties, and a final pass detects quiescence.
    for _ in 0..n + 1 {
        let mut changed = false;
        for (ei, edge) in net.edges().iter().enumerate() {
            let Some(from) = labels[edge.from] else { continue };
            let cand = Label {
                dist: from.dist + weights[ei],
                hops: from.hops + 1,
                pred_node: edge.from,
                pred_edge: ei,
            };
            let better = match &labels[edge.to] {
                None => true,
                Some(cur) => {
                    (cand.dist, cand.hops, cand.pred_node, cand.pred_edge)
                        < (cur.dist, cur.hops, cur.pred_node, cur.pred_edge)
                }
            };
            if better {
                labels[edge.to] = Some(cand);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    if labels[target].is_none() {
        return Ok(None);
    }
    let mut rev_edges = Vec::new();
    let mut at = target;
    while at != source {
        let label = labels[at].expect("reached node has a label");
        rev_edges.push(label.pred_edge);
        at = label.pred_node;
        debug_assert!(rev_edges.len() <= n, "predecessor chain longer than node count");
    }
    rev_edges.reverse();
    Ok(Some(RoutePath::from_edge_indices(net, source, &rev_edges)?))
}

/// Greedy multi-constrained routing: shortest path under the auxiliary
/// weights. A returned over-budget path does not prove infeasibility;
/// an absent path does (the target is unreachable).
pub fn omcr_greedy(
    net: &WeightedNetwork,
    source: usize,
    target: usize,
    constraints: &ConstraintVector,
) -> Result<RoutingOutcome> {
    let aux = auxiliary_weights(net, constraints)?;
    let path = shortest_path(net, &aux, source, target)?;
    let delta_of_path = match &path {
        Some(p) => Some(path_length(p, constraints)?),
        None => None,
    };
    let feasible = match &path {
        Some(p) => is_feasible(p, constraints)?,
        None => false,
    };
    Ok(RoutingOutcome { source, target, path, delta_of_path, feasible, algorithm: Algorithm::Greedy })
}

/// Exhaustive enumeration refuses instances above this many nodes unless
/// an explicit limit overrides it.
pub const DEFAULT_EXACT_NODE_LIMIT: usize = 16;

/// The optimum of the routing relaxation: the smallest `delta` such that
/// some simple source-target path satisfies `w_k(p) <= delta * W_k` for
/// all k, together with a path achieving it.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub delta_opt: f64,
    pub optimal_path: RoutePath,
}

/// Brute-force optimum over all simple paths, by depth-first enumeration
/// with monotone pruning. Exponential; guarded by
/// [`DEFAULT_EXACT_NODE_LIMIT`]. Returns `None` iff the target is
/// unreachable.
pub fn exact_optimal_value(
    net: &WeightedNetwork,
    source: usize,
    target: usize,
    constraints: &ConstraintVector,
) -> Result<Option<OracleResult>> {
    exact_optimal_value_with_limit(net, source, target, constraints, DEFAULT_EXACT_NODE_LIMIT)
}

pub fn exact_optimal_value_with_limit(
    net: &WeightedNetwork,
    source: usize,
    target: usize,
    constraints: &ConstraintVector,
    node_limit: usize,
) -> Result<Option<OracleResult>> {
    constraints.check_arity(net)?;
    let n = net.node_count();
    if source >= n || target >= n {
        return Err(Error::IndexOutOfRange { index: source.max(target), len: n });
    }
    if n > node_limit {
        return Err(Error::ExactSizeGuard { nodes: n, limit: node_limit });
    }
    if source == target {
        return Ok(Some(OracleResult {
            delta_opt: 0.0,
            optimal_path: RoutePath::empty(source, net.metric_count()),
        }));
    }

    struct Search<'a> {
        net: &'a WeightedNetwork,
        adjacency: Vec<Vec<usize>>,
        bounds: &'a [f64],
        target: usize,
        visited: Vec<bool>,
        acc: Vec<f64>,
        edges: Vec<usize>,
        best: Option<(f64, Vec<usize>)>,
    }

    impl Search<'_> {
        fn dfs(&mut self, node: usize, ratio: f64) {
            if let Some((best, _)) = &self.best {
                // Appending edges never lowers the ratio.
                if ratio >= *best {
                    return;
                }
            }
            if node == self.target {
                self.best = Some((ratio, self.edges.clone()));
                return;
            }
            for i in 0..self.adjacency[node].len() {
                let ei = self.adjacency[node][i];
                let edge = &self.net.edges()[ei];
                if self.visited[edge.to] {
                    continue;
                }
                let mut next_ratio = ratio;
                for (k, w) in edge.weights.iter().enumerate() {
                    self.acc[k] += w;
                    next_ratio = next_ratio.max(self.acc[k] / self.bounds[k]);
                }
                self.visited[edge.to] = true;
                self.edges.push(ei);
                self.dfs(edge.to, next_ratio);
                self.edges.pop();
                self.visited[edge.to] = false;
                for (k, w) in edge.weights.iter().enumerate() {
                    self.acc[k] -= w;
                }
            }
        }
    }

    let mut search = Search {
        net,
        adjacency: net.adjacency(),
        bounds: constraints.bounds(),
        target,
        visited: vec![false; n],
        acc: vec![0.0; net.metric_count()],
        edges: Vec::new(),
        best: None,
    };
    search.visited[source] = true;
    search.dfs(source, 0.0);

    match search.best {
        None => Ok(None),
        Some((_, edges)) => {
            let optimal_path = RoutePath::from_edge_indices(net, source, &edges)?;
            // Recompute from the path so the reported optimum is exactly
            // consistent with path_length.
            let delta_opt = path_length(&optimal_path, constraints)?;
            Ok(Some(OracleResult { delta_opt, optimal_path }))
        }
    }
}

/// Feasibility verdict for the constrained routing decision problem.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Feasible { witness: RoutePath },
    Infeasible,
    /// The greedy backend found only an over-budget path; it cannot
    /// prove infeasibility.
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecisionBackend {
    Greedy,
    Exact { node_limit: usize },
}

/// Decision outcome; `delta_opt` is populated by the exact backend.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub verdict: Verdict,
    pub delta_opt: Option<f64>,
}

/// Decides feasibility of the constrained routing problem.
///
/// The exact backend answers definitively: feasible iff the optimum
/// ratio is at most 1. The greedy backend returns a witness when its
/// path fits the budget and `Unknown` otherwise; it is only guaranteed
/// to find a witness when the optimum ratio is at most `1/K`.
pub fn mcr_decide(
    net: &WeightedNetwork,
    source: usize,
    target: usize,
    constraints: &ConstraintVector,
    backend: DecisionBackend,
) -> Result<Decision> {
    match backend {
        DecisionBackend::Greedy => {
            let outcome = omcr_greedy(net, source, target, constraints)?;
            let verdict = match outcome.path {
                None => Verdict::Infeasible,
                Some(witness) if outcome.feasible => Verdict::Feasible { witness },
                Some(_) => Verdict::Unknown,
            };
            Ok(Decision { verdict, delta_opt: None })
        }
        DecisionBackend::Exact { node_limit } => {
            match exact_optimal_value_with_limit(net, source, target, constraints, node_limit)? {
                None => Ok(Decision { verdict: Verdict::Infeasible, delta_opt: None }),
                Some(res) => {
                    let verdict = if res.delta_opt <= 1.0 {
                        Verdict::Feasible { witness: res.optimal_path }
                    } else {
                        Verdict::Infeasible
                    };
                    Ok(Decision { verdict, delta_opt: Some(res.delta_opt) })
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constraints(bounds: &[f64]) -> ConstraintVector {
        ConstraintVector::new(bounds.to_vec()).unwrap()
    }

    #[test]
    fn auxiliary_weight_examples() {
        let net = WeightedNetwork::new(
            2,
            2,
            vec![(0, 1, vec![2.0, 3.0]), (0, 1, vec![0.0, 0.0])],
        )
        .unwrap();
        let aux = auxiliary_weights(&net, &constraints(&[4.0, 5.0])).unwrap();
        assert_eq!(aux, vec![0.6, 0.0]);
        assert!(auxiliary_weights(&net, &constraints(&[4.0])).is_err());
    }

    #[test]
    fn auxiliary_weight_sits_between_each_ratio_and_their_sum() {
        let net = WeightedNetwork::new(2, 3, vec![(0, 1, vec![1.0, 2.0, 0.5])]).unwrap();
        let w = constraints(&[2.0, 5.0, 1.0]);
        let aux = auxiliary_weights(&net, &w).unwrap()[0];
        let ratios = [0.5, 0.4, 0.5];
        let sum: f64 = ratios.iter().sum();
        for r in ratios {
            assert!(r <= aux + 1e-15);
        }
        assert!(aux <= sum + 1e-15);
    }

    #[test]
    fn shortest_path_source_equals_target() {
        let net = WeightedNetwork::new(2, 1, vec![(0, 1, vec![1.0])]).unwrap();
        let p = shortest_path(&net, &[1.0], 0, 0).unwrap().unwrap();
        assert_eq!(p.nodes(), &[0]);
        assert_eq!(p.weights(), &[0.0]);
    }

    #[test]
    fn shortest_path_unreachable_target() {
        let net = WeightedNetwork::new(3, 1, vec![(0, 1, vec![1.0])]).unwrap();
        assert!(shortest_path(&net, &[1.0], 0, 2).unwrap().is_none());
        assert!(shortest_path(&net, &[1.0], 1, 0).unwrap().is_none());
    }

    #[test]
    fn shortest_path_rejects_bad_weights() {
        let net = WeightedNetwork::new(2, 1, vec![(0, 1, vec![1.0])]).unwrap();
        assert!(shortest_path(&net, &[], 0, 1).is_err());
        assert!(shortest_path(&net, &[-1.0], 0, 1).is_err());
        assert!(shortest_path(&net, &[f64::INFINITY], 0, 1).is_err());
    }

    #[test]
    fn shortest_path_handles_zero_weight_two_cycles() {
        // Zero-weight back-and-forth edges must not trap reconstruction.
        let net = WeightedNetwork::new(
            4,
            1,
            vec![
                (0, 1, vec![1.0]),
                (0, 2, vec![1.0]),
                (1, 2, vec![0.0]),
                (2, 1, vec![0.0]),
                (1, 3, vec![1.0]),
            ],
        )
        .unwrap();
        let aux = vec![1.0, 1.0, 0.0, 0.0, 1.0];
        let p = shortest_path(&net, &aux, 0, 3).unwrap().unwrap();
        assert_eq!(p.nodes(), &[0, 1, 3]);
    }

    fn diamond() -> WeightedNetwork {
        // 0 -> 1 -> 3 cheap, 0 -> 2 -> 3 expensive.
        WeightedNetwork::new(
            4,
            2,
            vec![
                (0, 1, vec![1.0, 1.0]),
                (1, 3, vec![1.0, 1.0]),
                (0, 2, vec![3.0, 3.0]),
                (2, 3, vec![3.0, 3.0]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn greedy_picks_the_cheap_diamond_branch() {
        let net = diamond();
        let w = constraints(&[4.0, 4.0]);
        let out = omcr_greedy(&net, 0, 3, &w).unwrap();
        let p = out.path.unwrap();
        assert_eq!(p.nodes(), &[0, 1, 3]);
        assert_eq!(out.delta_of_path.unwrap(), 0.5);
        assert!(out.feasible);
    }

    fn suboptimality_witness() -> (WeightedNetwork, ConstraintVector) {
        // Greedy prefers the direct edge (aux 0.9) over the two-hop path
        // (aux 0.5 + 0.5), but the two-hop path has the better ratio.
        let net = WeightedNetwork::new(
            3,
            2,
            vec![
                (0, 2, vec![0.9, 0.0]),
                (0, 1, vec![0.5, 0.0]),
                (1, 2, vec![0.0, 0.5]),
            ],
        )
        .unwrap();
        (net, constraints(&[1.0, 1.0]))
    }

    #[test]
    fn greedy_suboptimality_witness_still_meets_the_bound() {
        let (net, w) = suboptimality_witness();
        let out = omcr_greedy(&net, 0, 2, &w).unwrap();
        assert_eq!(out.path.as_ref().unwrap().nodes(), &[0, 2]);
        assert!((out.delta_of_path.unwrap() - 0.9).abs() <= 1e-15);
        let oracle = exact_optimal_value(&net, 0, 2, &w).unwrap().unwrap();
        assert!((oracle.delta_opt - 0.5).abs() <= 1e-15);
        assert_eq!(oracle.optimal_path.nodes(), &[0, 1, 2]);
        // Theorem bound with K = 2.
        for (k, &wk) in w.bounds().iter().enumerate() {
            let got = out.path.as_ref().unwrap().weights()[k];
            assert!(got <= 2.0 * oracle.delta_opt * wk + 1e-9);
        }
    }

    #[test]
    fn single_metric_greedy_is_exact() {
        let net = WeightedNetwork::new(
            4,
            1,
            vec![
                (0, 1, vec![2.0]),
                (1, 3, vec![2.0]),
                (0, 2, vec![1.0]),
                (2, 3, vec![2.5]),
            ],
        )
        .unwrap();
        let w = constraints(&[10.0]);
        let out = omcr_greedy(&net, 0, 3, &w).unwrap();
        let oracle = exact_optimal_value(&net, 0, 3, &w).unwrap().unwrap();
        assert!((out.delta_of_path.unwrap() - oracle.delta_opt).abs() <= 1e-12);
    }

    #[test]
    fn exact_single_edge() {
        let net = WeightedNetwork::new(2, 2, vec![(0, 1, vec![2.0, 2.0])]).unwrap();
        let res = exact_optimal_value(&net, 0, 1, &constraints(&[4.0, 4.0])).unwrap().unwrap();
        assert_eq!(res.delta_opt, 0.5);
    }

    #[test]
    fn exact_size_guard() {
        let edges: Vec<(usize, usize, Vec<f64>)> =
            (0..19).map(|i| (i, i + 1, vec![1.0])).collect();
        let net = WeightedNetwork::new(20, 1, edges).unwrap();
        let w = constraints(&[100.0]);
        let err = exact_optimal_value(&net, 0, 19, &w).unwrap_err();
        assert!(matches!(err, Error::ExactSizeGuard { nodes: 20, limit: 16 }));
        // Overridable.
        let res = exact_optimal_value_with_limit(&net, 0, 19, &w, 32).unwrap().unwrap();
        assert!((res.delta_opt - 0.19).abs() <= 1e-12);
    }

    #[test]
    fn decide_greedy_feasible_and_exact_infeasible() {
        let net = diamond();
        let w = constraints(&[4.0, 4.0]);
        let d = mcr_decide(&net, 0, 3, &w, DecisionBackend::Greedy).unwrap();
        assert!(matches!(d.verdict, Verdict::Feasible { .. }));

        let tight = constraints(&[1.5, 1.5]);
        let d = mcr_decide(&net, 0, 3, &tight, DecisionBackend::Exact { node_limit: 16 }).unwrap();
        assert!(matches!(d.verdict, Verdict::Infeasible));
        assert!((d.delta_opt.unwrap() - 2.0 / 1.5).abs() <= 1e-12);
    }

    #[test]
    fn decide_unreachable_is_infeasible_for_both_backends() {
        let net = WeightedNetwork::new(3, 1, vec![(0, 1, vec![1.0])]).unwrap();
        let w = constraints(&[1.0]);
        for backend in [DecisionBackend::Greedy, DecisionBackend::Exact { node_limit: 16 }] {
            let d = mcr_decide(&net, 0, 2, &w, backend).unwrap();
            assert!(matches!(d.verdict, Verdict::Infeasible));
        }
    }

    #[test]
    fn tri_constraint_greedy_unknown_but_exact_feasible() {
        // Direct edge blows one budget; the three-hop path fits exactly,
        // but its auxiliary length (3) loses to the direct edge (1.2).
        let net = WeightedNetwork::new(
            4,
            3,
            vec![
                (0, 3, vec![1.2, 0.0, 0.0]),
                (0, 1, vec![1.0, 0.0, 0.0]),
                (1, 2, vec![0.0, 1.0, 0.0]),
                (2, 3, vec![0.0, 0.0, 1.0]),
            ],
        )
        .unwrap();
        let w = constraints(&[1.0, 1.0, 1.0]);
        let greedy = mcr_decide(&net, 0, 3, &w, DecisionBackend::Greedy).unwrap();
        assert!(matches!(greedy.verdict, Verdict::Unknown));
        let exact = mcr_decide(&net, 0, 3, &w, DecisionBackend::Exact { node_limit: 16 }).unwrap();
        match exact.verdict {
            Verdict::Feasible { witness } => assert_eq!(witness.nodes(), &[0, 1, 2, 3]),
            other => panic!("expected feasible, got {other:?}"),
        }
        assert!((exact.delta_opt.unwrap() - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn outcome_csv_rows() {
        let net = diamond();
        let w = constraints(&[4.0, 4.0]);
        let out = omcr_greedy(&net, 0, 3, &w).unwrap();
        assert_eq!(out.to_csv_row(), "greedy,0,3,feasible,0.500000,0-1-3");

        let disconnected = WeightedNetwork::new(3, 2, vec![(0, 1, vec![1.0, 1.0])]).unwrap();
        let out = omcr_greedy(&disconnected, 0, 2, &w).unwrap();
        assert_eq!(out.to_csv_row(), "greedy,0,2,infeasible: unreachable,,");
    }
}
