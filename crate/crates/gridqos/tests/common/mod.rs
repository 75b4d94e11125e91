//! Independent oracles shared by the integration suites: Monte Carlo
//! estimators for the welfare costs, a label-setting shortest path, and
//! brute-force feasibility enumeration. None of these reuse the library's
//! quadrature or relaxation code paths.
#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use gridqos::graph::{ConstraintVector, WeightedNetwork};
use gridqos::market::LoadPriceCurve;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Closed-form welfare gap for the log utility `U(x) = scale ln x`:
/// `scale * (r - 1 - ln r)` with `r = p_true / p_used`.
pub fn log_utility_gap(scale: f64, p_true: f64, p_used: f64) -> f64 {
    let r = p_true / p_used;
    scale * (r - 1.0 - r.ln())
}

/// Draws from a Gaussian with the library's variance-like `sigma`
/// parameter, rejected onto `[0, d_max]`.
pub fn sample_truncated(rng: &mut ChaCha8Rng, mu: f64, sigma: f64, d_max: f64) -> f64 {
    let normal = Normal::new(mu, sigma.sqrt()).unwrap();
    loop {
        let x = normal.sample(rng);
        if (0.0..=d_max).contains(&x) {
            return x;
        }
    }
}

/// Monte Carlo estimate of the delay cost: sample the stale-price load
/// uniformly, evolve it for `d` slots, and average the closed-form gap.
pub fn mc_delay_cost(
    curve: &LoadPriceCurve,
    scale: f64,
    d: u32,
    theta: f64,
    samples: usize,
    seed: u64,
) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d_max = curve.d_max();
    let sigma = theta * d as f64;
    let mut total = 0.0;
    for _ in 0..samples {
        let d0 = rng.random_range(0.0..d_max);
        let p_used = curve.price_of_load(d0).unwrap();
        let now = sample_truncated(&mut rng, d0, sigma, d_max);
        let p_true = curve.price_of_load(now).unwrap();
        total += log_utility_gap(scale, p_true, p_used);
    }
    total / samples as f64
}

/// Monte Carlo estimate of the per-event outage loss against the
/// width-weighted average price.
pub fn mc_outage_rate(curve: &LoadPriceCurve, scale: f64, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d_max = curve.d_max();
    let p_bar: f64 = (0..curve.price_count())
        .map(|i| {
            let (lo, hi) = curve.load_interval(i).unwrap();
            curve.prices()[i] * (hi - lo) / d_max
        })
        .sum();
    let mut total = 0.0;
    for _ in 0..samples {
        let load = rng.random_range(0.0..d_max);
        total += log_utility_gap(scale, curve.price_of_load(load).unwrap(), p_bar);
    }
    total / samples as f64
}

/// Empirical frequency of each price interval after evolving the load
/// from `d0` for `t` slots.
pub fn mc_interval_frequencies(
    curve: &LoadPriceCurve,
    d0: f64,
    t: u32,
    theta: f64,
    samples: usize,
    seed: u64,
) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma = theta * t as f64;
    let mut counts = vec![0usize; curve.price_count()];
    for _ in 0..samples {
        let x = sample_truncated(&mut rng, d0, sigma, curve.d_max());
        counts[curve.interval_index_of(x).unwrap()] += 1;
    }
    counts.iter().map(|c| *c as f64 / samples as f64).collect()
}

#[derive(PartialEq)]
struct HeapEntry {
    dist: f64,
    node: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on distance.
        other.dist.partial_cmp(&self.dist).unwrap().then(other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Independent label-setting (Dijkstra) shortest-path distance.
pub fn dijkstra_distance(
    net: &WeightedNetwork,
    weights: &[f64],
    source: usize,
    target: usize,
) -> Option<f64> {
    let adjacency = net.adjacency();
    let mut dist = vec![f64::INFINITY; net.node_count()];
    let mut done = vec![false; net.node_count()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(HeapEntry { dist: 0.0, node: source });
    while let Some(HeapEntry { dist: d, node }) = heap.pop() {
        if done[node] {
            continue;
        }
        done[node] = true;
        if node == target {
            return Some(d);
        }
        for &ei in &adjacency[node] {
            let to = net.edges()[ei].to;
            let cand = d + weights[ei];
            if cand < dist[to] {
                dist[to] = cand;
                heap.push(HeapEntry { dist: cand, node: to });
            }
        }
    }
    None
}

/// Brute-force search for any simple path meeting every bound directly
/// (no ratio arithmetic); the reference for feasibility verdicts.
pub fn brute_force_feasible(
    net: &WeightedNetwork,
    source: usize,
    target: usize,
    constraints: &ConstraintVector,
) -> bool {
    fn dfs(
        net: &WeightedNetwork,
        adjacency: &[Vec<usize>],
        bounds: &[f64],
        at: usize,
        target: usize,
        visited: &mut Vec<bool>,
        acc: &mut Vec<f64>,
    ) -> bool {
        if acc.iter().zip(bounds).any(|(a, b)| a > b) {
            return false;
        }
        if at == target {
            return true;
        }
        for &ei in &adjacency[at] {
            let edge = &net.edges()[ei];
            if visited[edge.to] {
                continue;
            }
            visited[edge.to] = true;
            for (a, w) in acc.iter_mut().zip(&edge.weights) {
                *a += w;
            }
            if dfs(net, adjacency, bounds, edge.to, target, visited, acc) {
                return true;
            }
            for (a, w) in acc.iter_mut().zip(&edge.weights) {
                *a -= w;
            }
            visited[edge.to] = false;
        }
        false
    }

    let adjacency = net.adjacency();
    let mut visited = vec![false; net.node_count()];
    visited[source] = true;
    let mut acc = vec![0.0; net.metric_count()];
    dfs(net, &adjacency, constraints.bounds(), source, target, &mut visited, &mut acc)
}

/// Arbitrary (possibly disconnected) random network for oracle
/// comparisons, independent of the benchmark generator.
pub fn arbitrary_network(
    rng: &mut ChaCha8Rng,
    nodes: usize,
    edges: usize,
    metrics: usize,
    max_weight: f64,
) -> WeightedNetwork {
    let mut list = Vec::with_capacity(edges);
    while list.len() < edges {
        let u = rng.random_range(0..nodes);
        let v = rng.random_range(0..nodes);
        if u == v {
            continue;
        }
        let w: Vec<f64> = (0..metrics).map(|_| rng.random_range(0.0..max_weight)).collect();
        list.push((u, v, w));
    }
    WeightedNetwork::new(nodes, metrics, list).unwrap()
}
