//! The five-bus PJM pricing scenario, seeded random topologies, and the
//! experiment sweeps emitted as CSV.

use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::consumer::{tabulate_costs_with, QuadratureConfig, Utility};
use crate::derivation::{joint_qos_requirement, ObjectiveMode, QosRequirement, TaxFunctions};
use crate::error::{domain, Error, Result};
use crate::exec;
use crate::graph::{ConstraintVector, RoutePath, WeightedNetwork};
use crate::market::{LoadPriceCurve, stationary_load_prior, DEFAULT_D_MAX};
use crate::numeric::format_sig;
use crate::routing::{exact_optimal_value_with_limit, omcr_greedy, DEFAULT_EXACT_NODE_LIMIT};

const PJM_BREAKPOINTS: [f64; 8] = [0.0, 600.0, 640.0, 711.81, 742.80, 963.94, 1137.02, 1484.06];

const PJM_PRICES: [(&str, [f64; 8]); 5] = [
    ("A", [10.00, 14.00, 15.00, 15.00, 15.83, 15.24, 16.98, 16.98]),
    ("B", [10.00, 14.00, 15.00, 21.74, 23.68, 28.18, 26.38, 26.38]),
    ("C", [10.00, 14.00, 15.00, 24.33, 26.70, 30.00, 30.00, 30.00]),
    ("D", [10.00, 14.00, 15.00, 31.46, 35.00, 35.00, 39.94, 39.94]),
    ("E", [10.00, 14.00, 15.00, 10.00, 10.00, 10.00, 10.00, 10.00]),
];

/// Load-to-price curves of the five PJM buses, A through E.
pub fn pjm_scenario() -> Vec<(String, LoadPriceCurve)> {
    PJM_PRICES
        .iter()
        .map(|(name, prices)| {
            let curve =
                LoadPriceCurve::new(PJM_BREAKPOINTS.to_vec(), prices.to_vec(), DEFAULT_D_MAX)
                    .expect("embedded curve data is valid");
            (name.to_string(), curve)
        })
        .collect()
}

/// Curve for a single PJM bus (`"A"` through `"E"`).
pub fn pjm_bus(name: &str) -> Option<LoadPriceCurve> {
    pjm_scenario().into_iter().find(|(n, _)| n == name).map(|(_, c)| c)
}

/// Filename/content pairs for shipping the five curves as files.
pub fn pjm_curve_files() -> Vec<(String, String)> {
    pjm_scenario()
        .into_iter()
        .map(|(name, curve)| (format!("bus_{name}.txt"), curve.emit()))
        .collect()
}

/// Theta values used for the requirement sweeps (MW² per slot).
pub fn default_theta_grid() -> Vec<f64> {
    vec![10.0, 31.6, 100.0, 316.0, 1000.0]
}

/// How tight the constraint vector is relative to a feasible reference
/// path: its weights are scaled by 1.0 / 1.2 / 1.5.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintRegime {
    Tight,
    Medium,
    Loose,
}

impl ConstraintRegime {
    pub fn scale(self) -> f64 {
        match self {
            ConstraintRegime::Tight => 1.0,
            ConstraintRegime::Medium => 1.2,
            ConstraintRegime::Loose => 1.5,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ConstraintRegime::Tight => "tight",
            ConstraintRegime::Medium => "medium",
            ConstraintRegime::Loose => "loose",
        }
    }

    pub const ALL: [ConstraintRegime; 3] =
        [ConstraintRegime::Tight, ConstraintRegime::Medium, ConstraintRegime::Loose];
}

impl FromStr for ConstraintRegime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tight" => Ok(ConstraintRegime::Tight),
            "medium" => Ok(ConstraintRegime::Medium),
            "loose" => Ok(ConstraintRegime::Loose),
            other => Err(domain(format!("unknown constraint regime `{other}`"))),
        }
    }
}

/// Shape, weight ranges and seeding of one benchmark series.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub nodes: usize,
    pub edges: usize,
    pub metrics: usize,
    /// Uniform sampling range per metric, lower bounds strictly positive.
    pub weight_ranges: Vec<(f64, f64)>,
    pub regime: ConstraintRegime,
    pub trials: usize,
    pub seed: u64,
}

impl BenchConfig {
    pub fn new(nodes: usize, edges: usize, metrics: usize, regime: ConstraintRegime) -> Self {
        BenchConfig {
            nodes,
            edges,
            metrics,
            weight_ranges: vec![(1.0, 10.0); metrics],
            regime,
            trials: 100,
            seed: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes < 2 {
            return Err(Error::InvalidBenchConfig(format!(
                "need at least 2 nodes, got {}",
                self.nodes
            )));
        }
        if self.edges < self.nodes - 1 {
            return Err(Error::InvalidBenchConfig(format!(
                "{} edges cannot connect {} nodes",
                self.edges, self.nodes
            )));
        }
        if self.metrics == 0 {
            return Err(Error::InvalidBenchConfig("metric count must be at least 1".into()));
        }
        if self.weight_ranges.len() != self.metrics {
            return Err(Error::InvalidBenchConfig(format!(
                "{} weight ranges for {} metrics",
                self.weight_ranges.len(),
                self.metrics
            )));
        }
        for &(lo, hi) in &self.weight_ranges {
            if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
                return Err(Error::InvalidBenchConfig(format!(
                    "weight range ({lo}, {hi}) must be positive and ordered"
                )));
            }
        }
        Ok(())
    }

    /// Compact tag identifying the config in summary CSV rows.
    pub fn tag(&self) -> String {
        format!(
            "n{}_m{}_k{}_{}",
            self.nodes,
            self.edges,
            self.metrics,
            self.regime.as_str()
        )
    }
}

fn mix_seed(seed: u64, salt: u64) -> u64 {
    // splitmix64 step
    let mut z = seed.wrapping_add(salt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A generated routing problem: network, endpoints, and a constraint
/// vector that is feasible by construction.
#[derive(Debug, Clone)]
pub struct RoutingInstance {
    pub net: WeightedNetwork,
    pub source: usize,
    pub target: usize,
    pub constraints: ConstraintVector,
}

struct GeneratedInstance {
    net: WeightedNetwork,
    source: usize,
    target: usize,
}

fn generate_instance(
    nodes: usize,
    edges: usize,
    ranges: &[(f64, f64)],
    rng: &mut ChaCha8Rng,
) -> GeneratedInstance {
    let mut order: Vec<usize> = (0..nodes).collect();
    order.shuffle(rng);
    let draw_weights = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        ranges.iter().map(|&(lo, hi)| if lo == hi { lo } else { rng.random_range(lo..hi) }).collect()
    };
    let mut edge_list = Vec::with_capacity(edges);
    // Spanning chain along the shuffled order keeps the instance
    // connected from its first node.
    for pair in order.windows(2) {
        let w = draw_weights(rng);
        edge_list.push((pair[0], pair[1], w));
    }
    while edge_list.len() < edges {
        let u = rng.random_range(0..nodes);
        let v = rng.random_range(0..nodes);
        if u == v {
            continue;
        }
        let w = draw_weights(rng);
        edge_list.push((u, v, w));
    }
    let net = WeightedNetwork::new(nodes, ranges.len(), edge_list)
        .expect("generated edges satisfy the network invariants");
    GeneratedInstance { net, source: order[0], target: order[nodes - 1] }
}

/// Connected random digraph: a spanning chain over a shuffled node order
/// plus random extra arcs, weights uniform per metric. Deterministic
/// under `cfg.seed`.
pub fn random_topology(cfg: &BenchConfig) -> Result<WeightedNetwork> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    Ok(generate_instance(cfg.nodes, cfg.edges, &cfg.weight_ranges, &mut rng).net)
}

fn random_reference_path(
    net: &WeightedNetwork,
    source: usize,
    target: usize,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<usize>> {
    fn walk(
        net: &WeightedNetwork,
        adjacency: &[Vec<usize>],
        at: usize,
        target: usize,
        visited: &mut Vec<bool>,
        edges: &mut Vec<usize>,
        rng: &mut ChaCha8Rng,
    ) -> bool {
        if at == target {
            return true;
        }
        let mut outgoing = adjacency[at].clone();
        outgoing.shuffle(rng);
        for ei in outgoing {
            let to = net.edges()[ei].to;
            if visited[to] {
                continue;
            }
            visited[to] = true;
            edges.push(ei);
            if walk(net, adjacency, to, target, visited, edges, rng) {
                return true;
            }
            edges.pop();
            visited[to] = false;
        }
        false
    }

    let adjacency = net.adjacency();
    let mut visited = vec![false; net.node_count()];
    visited[source] = true;
    let mut edges = Vec::new();
    walk(net, &adjacency, source, target, &mut visited, &mut edges, rng).then_some(edges)
}

/// Builds a constraint vector by scaling the weights of a random
/// source-target reference path, so the instance is feasible by
/// construction: the reference path itself has length `1 / scale`.
pub fn constraint_for_regime(
    net: &WeightedNetwork,
    source: usize,
    target: usize,
    regime: ConstraintRegime,
    seed: u64,
) -> Result<ConstraintVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = random_reference_path(net, source, target, &mut rng)
        .ok_or(Error::UnreachableTarget { from: source, to: target })?;
    let reference = RoutePath::from_edge_indices(net, source, &edges)?;
    let bounds: Vec<f64> = reference.weights().iter().map(|w| w * regime.scale()).collect();
    if bounds.iter().any(|b| !(*b > 0.0)) {
        return Err(domain(format!(
            "reference path {} has a zero-weight metric; cannot form positive bounds",
            reference.display_nodes()
        )));
    }
    ConstraintVector::new(bounds)
}

/// Output of the QoS requirement sweep over buses and theta values.
#[derive(Debug, Clone)]
pub struct QosSweep {
    /// CSV `bus,theta,param,cost` of delay cost over the delay grid.
    pub delay_cost_csv: String,
    /// CSV `bus,theta,param,cost` of outage cost over the zeta grid.
    pub outage_cost_csv: String,
    /// CSV `theta,bus,d_star,zeta_star,objective,mode`.
    pub requirement_csv: String,
    /// One entry per (theta, bus) in emission order.
    pub requirements: Vec<(f64, String, QosRequirement)>,
}

/// Runs the cost tabulations and the joint requirement optimization for
/// every (theta, bus) pair.
#[allow(clippy::too_many_arguments)]
pub fn run_qos_sweep(
    buses: &[(String, LoadPriceCurve)],
    theta_grid: &[f64],
    d_grid: &[u32],
    zeta_grid: &[f64],
    taxes: &TaxFunctions,
    mode: ObjectiveMode,
    util: &impl Utility,
    quadrature: QuadratureConfig,
) -> Result<QosSweep> {
    if theta_grid.is_empty() {
        return Err(Error::EmptyGrid("theta grid"));
    }
    let mut delay_cost_csv = String::from("bus,theta,param,cost\n");
    let mut outage_cost_csv = String::from("bus,theta,param,cost\n");
    let mut requirement_csv = String::from("theta,bus,d_star,zeta_star,objective,mode\n");
    let mut requirements = Vec::new();
    for &theta in theta_grid {
        for (name, curve) in buses {
            let prior = stationary_load_prior(curve);
            let (delay_curve, outage_curve) =
                tabulate_costs_with(curve, util, d_grid, zeta_grid, theta, &prior, quadrature)?;
            for (param, cost) in delay_curve.points() {
                delay_cost_csv.push_str(&format!(
                    "{},{},{},{}\n",
                    name,
                    format_sig(theta, 6),
                    format_sig(*param, 6),
                    format_sig(*cost, 6)
                ));
            }
            for (param, cost) in outage_curve.points() {
                outage_cost_csv.push_str(&format!(
                    "{},{},{},{}\n",
                    name,
                    format_sig(theta, 6),
                    format_sig(*param, 6),
                    format_sig(*cost, 6)
                ));
            }
            let rate = crate::consumer::outage_loss_rate(curve, util, &prior);
            let req = joint_qos_requirement(&delay_curve, rate, taxes, zeta_grid, mode)?;
            requirement_csv.push_str(&format!(
                "{},{},{},{},{},{}\n",
                format_sig(theta, 6),
                name,
                req.d_star,
                format_sig(req.zeta_star, 6),
                format_sig(req.objective_value, 6),
                req.mode
            ));
            requirements.push((theta, name.clone(), req));
        }
    }
    Ok(QosSweep { delay_cost_csv, outage_cost_csv, requirement_csv, requirements })
}

/// One routing benchmark trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub nodes: usize,
    pub edges: usize,
    pub metrics: usize,
    pub regime: ConstraintRegime,
    pub greedy_len: f64,
    /// Brute-force optimum; absent above the oracle node limit.
    pub delta_opt: Option<f64>,
    /// Per-metric approximation bound check against the oracle.
    pub bound_ok: Option<bool>,
    pub greedy_ms: f64,
    pub oracle_ms: Option<f64>,
}

/// CSV header of the per-trial rows.
pub const TRIAL_CSV_HEADER: &str = "trial,n,m,K,regime,greedy_len,delta_opt,bound_ok";

/// CSV header of the per-config summary rows.
pub const SUMMARY_CSV_HEADER: &str =
    "config,trials,greedy_win_pct,oracle_win_pct,tie_pct,greedy_mean_ms,oracle_mean_ms";

/// Routing benchmark output; the trial CSV contains no timing fields and
/// is byte-stable under a fixed seed.
#[derive(Debug, Clone)]
pub struct BenchReport {
    pub records: Vec<TrialRecord>,
    pub trial_csv: String,
    pub summary_csv: String,
}

fn median(samples: &mut [f64]) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len();
    if n % 2 == 1 {
        samples[n / 2]
    } else {
        (samples[n / 2 - 1] + samples[n / 2]) / 2.0
    }
}

const TIMING_REPS: usize = 10;

/// The routing problem of one benchmark trial, derived from
/// `(cfg.seed, trial)` so trials are independent of execution order.
pub fn random_instance(cfg: &BenchConfig, trial: usize) -> Result<RoutingInstance> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(trial as u64);
    let generated = generate_instance(cfg.nodes, cfg.edges, &cfg.weight_ranges, &mut rng);
    let constraints = constraint_for_regime(
        &generated.net,
        generated.source,
        generated.target,
        cfg.regime,
        mix_seed(cfg.seed, trial as u64),
    )?;
    Ok(RoutingInstance {
        net: generated.net,
        source: generated.source,
        target: generated.target,
        constraints,
    })
}

fn run_trial(cfg: &BenchConfig, trial: usize, oracle_limit: usize) -> TrialRecord {
    let RoutingInstance { net, source, target, constraints } =
        random_instance(cfg, trial).expect("validated config generates feasible instances");
    let instance = GeneratedInstance { net, source, target };

    let mut greedy_times = Vec::with_capacity(TIMING_REPS);
    let mut outcome = None;
    for _ in 0..TIMING_REPS {
        let start = Instant::now();
        let out = omcr_greedy(&instance.net, instance.source, instance.target, &constraints)
            .expect("validated instance");
        greedy_times.push(start.elapsed().as_secs_f64() * 1e3);
        outcome.get_or_insert(out);
    }
    let outcome = outcome.expect("at least one timing rep");
    let greedy_path = outcome.path.as_ref().expect("target reachable by construction");
    let greedy_len = outcome.delta_of_path.expect("path present");

    let (delta_opt, bound_ok, oracle_ms) = if cfg.nodes <= oracle_limit {
        let mut oracle_times = Vec::with_capacity(TIMING_REPS);
        let mut oracle = None;
        for _ in 0..TIMING_REPS {
            let start = Instant::now();
            let res = exact_optimal_value_with_limit(
                &instance.net,
                instance.source,
                instance.target,
                &constraints,
                oracle_limit,
            )
            .expect("validated instance");
            oracle_times.push(start.elapsed().as_secs_f64() * 1e3);
            oracle.get_or_insert(res);
        }
        let oracle = oracle.flatten().expect("target reachable by construction");
        let k = cfg.metrics as f64;
        let ok = greedy_path
            .weights()
            .iter()
            .zip(constraints.bounds())
            .all(|(w, b)| *w <= k * oracle.delta_opt * b + 1e-9);
        (Some(oracle.delta_opt), Some(ok), Some(median(&mut oracle_times)))
    } else {
        (None, None, None)
    };

    TrialRecord {
        trial,
        nodes: cfg.nodes,
        edges: instance.net.edges().len(),
        metrics: cfg.metrics,
        regime: cfg.regime,
        greedy_len,
        delta_opt,
        bound_ok,
        greedy_ms: median(&mut greedy_times),
        oracle_ms,
    }
}

fn summarize(cfg: &BenchConfig, records: &[TrialRecord]) -> String {
    let checked: Vec<&TrialRecord> = records.iter().filter(|r| r.delta_opt.is_some()).collect();
    let (mut greedy_wins, mut oracle_wins, mut ties) = (0usize, 0usize, 0usize);
    for r in &checked {
        let delta = r.delta_opt.unwrap();
        if (r.greedy_len - delta).abs() <= 1e-9 {
            ties += 1;
        } else if r.greedy_len < delta {
            greedy_wins += 1;
        } else {
            oracle_wins += 1;
        }
    }
    let pct = |count: usize| {
        if checked.is_empty() {
            String::new()
        } else {
            format_sig(count as f64 * 100.0 / checked.len() as f64, 6)
        }
    };
    let greedy_mean =
        records.iter().map(|r| r.greedy_ms).sum::<f64>() / records.len().max(1) as f64;
    let oracle_mean = if checked.is_empty() {
        String::new()
    } else {
        format_sig(
            checked.iter().map(|r| r.oracle_ms.unwrap()).sum::<f64>() / checked.len() as f64,
            6,
        )
    };
    format!(
        "{},{},{},{},{},{},{}",
        cfg.tag(),
        records.len(),
        pct(greedy_wins),
        pct(oracle_wins),
        pct(ties),
        format_sig(greedy_mean, 6),
        oracle_mean
    )
}

fn bench_records(cfg: &BenchConfig, oracle_limit: usize, parallel: bool) -> Vec<TrialRecord> {
    if parallel {
        exec::map_indexed(cfg.trials, |trial| run_trial(cfg, trial, oracle_limit))
    } else {
        exec::map_indexed_seq(cfg.trials, |trial| run_trial(cfg, trial, oracle_limit))
    }
}

fn assemble_report(configs: &[BenchConfig], oracle_limit: usize, parallel: bool) -> Result<BenchReport> {
    let mut records = Vec::new();
    let mut trial_csv = String::from(TRIAL_CSV_HEADER);
    trial_csv.push('\n');
    let mut summary_csv = String::from(SUMMARY_CSV_HEADER);
    summary_csv.push('\n');
    for cfg in configs {
        cfg.validate()?;
        let cfg_records = bench_records(cfg, oracle_limit, parallel);
        for r in &cfg_records {
            trial_csv.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.trial,
                r.nodes,
                r.edges,
                r.metrics,
                r.regime.as_str(),
                format_sig(r.greedy_len, 9),
                r.delta_opt.map(|d| format_sig(d, 9)).unwrap_or_default(),
                r.bound_ok.map(|b| b.to_string()).unwrap_or_default()
            ));
        }
        summary_csv.push_str(&summarize(cfg, &cfg_records));
        summary_csv.push('\n');
        records.extend(cfg_records);
    }
    Ok(BenchReport { records, trial_csv, summary_csv })
}

/// Runs every config's trials (in parallel when enabled), comparing the
/// greedy route against the brute-force oracle wherever the instance is
/// small enough. Everything except wall times is deterministic under the
/// config seeds.
pub fn run_routing_bench(configs: &[BenchConfig]) -> Result<BenchReport> {
    assemble_report(configs, DEFAULT_EXACT_NODE_LIMIT, true)
}

/// Sequential fallback of [`run_routing_bench`]; identical non-timing
/// output.
pub fn run_routing_bench_seq(configs: &[BenchConfig]) -> Result<BenchReport> {
    assemble_report(configs, DEFAULT_EXACT_NODE_LIMIT, false)
}
