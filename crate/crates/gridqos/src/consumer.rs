//! Appliance utility model and the welfare costs of stale or missing
//! price signals.
//!
//! An appliance consuming `x` at price `p` earns welfare `U(x) - p*x`.
//! It picks `x` from the price it knows, so a delayed or defaulted price
//! costs it the gap between the welfare it could have earned and what it
//! actually earns at the true price.

use crate::error::{domain, Error, Result};
use crate::exec;
use crate::market::{spread_interval_masses, LoadPriceCurve, LoadPrior, DEFAULT_PANELS};
use crate::numeric::format_sig;

/// Concave utility of power consumption, with the derivative and inverse
/// derivative needed for price-responsive consumption decisions.
pub trait Utility: Sync {
    /// U(x).
    fn utility(&self, x: f64) -> f64;
    /// U'(x), assumed positive and strictly decreasing.
    fn marginal_utility(&self, x: f64) -> f64;
    /// U'⁻¹(p): consumption chosen when the appliance believes price `p`.
    fn consumption_for_price(&self, p: f64) -> f64;
}

/// `U(x) = scale * ln(x)`; the default appliance model with scale 1000.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogUtility {
    pub scale: f64,
}

impl LogUtility {
    /// Floor keeping `ln` finite; never reached for realistic prices.
    const CONSUMPTION_FLOOR: f64 = 1e-9;
}

impl Default for LogUtility {
    fn default() -> Self {
        LogUtility { scale: 1000.0 }
    }
}

impl Utility for LogUtility {
    fn utility(&self, x: f64) -> f64 {
        self.scale * x.max(Self::CONSUMPTION_FLOOR).ln()
    }

    fn marginal_utility(&self, x: f64) -> f64 {
        self.scale / x.max(Self::CONSUMPTION_FLOOR)
    }

    fn consumption_for_price(&self, p: f64) -> f64 {
        self.scale / p
    }
}

/// Welfare earned consuming `x` at true price `p`.
pub fn welfare(util: &impl Utility, x: f64, p: f64) -> f64 {
    util.utility(x) - p * x
}

/// Consumption maximizing `U(x) - p*x`, from the first-order condition.
pub fn optimal_consumption(util: &impl Utility, p: f64) -> Result<f64> {
    check_price(p)?;
    Ok(util.consumption_for_price(p))
}

fn check_price(p: f64) -> Result<()> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(domain(format!("price must be positive, got {p}")));
    }
    Ok(())
}

fn gap_unchecked(util: &impl Utility, p_true: f64, p_used: f64) -> f64 {
    if p_true == p_used {
        return 0.0;
    }
    let best = util.consumption_for_price(p_true);
    let used = util.consumption_for_price(p_used);
    welfare(util, best, p_true) - welfare(util, used, p_true)
}

/// Welfare lost by consuming for `p_used` while the true price is
/// `p_true`. Nonnegative, zero iff the prices agree, because the
/// consumption chosen for `p_true` maximizes welfare at `p_true`.
pub fn welfare_gap(util: &impl Utility, p_true: f64, p_used: f64) -> Result<f64> {
    check_price(p_true)?;
    check_price(p_used)?;
    Ok(gap_unchecked(util, p_true, p_used))
}

/// Quadrature resolution for the delay-cost expectations.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureConfig {
    /// Evaluation points for the outer expectation over the prior load.
    pub prior_points: usize,
    /// Simpson panel budget for the inner interval masses.
    pub kernel_panels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { prior_points: 2048, kernel_panels: DEFAULT_PANELS }
    }
}

fn delay_cost_validate(d_max_curve: f64, prior: &LoadPrior, theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(domain(format!("theta must be positive, got {theta}")));
    }
    let LoadPrior::Uniform { d_max } = prior;
    if *d_max != d_max_curve {
        return Err(domain(format!(
            "prior support {} does not match curve d_max {}",
            d_max, d_max_curve
        )));
    }
    Ok(())
}

fn delay_cost_term(
    curve: &LoadPriceCurve,
    util: &impl Utility,
    sigma: f64,
    panels: usize,
    d0: f64,
) -> f64 {
    let p_used = curve.price_of_load(d0).expect("grid point inside support");
    let masses = spread_interval_masses(curve, d0, sigma, panels).expect("validated inputs");
    masses
        .iter()
        .zip(curve.prices())
        .map(|(m, q)| m * gap_unchecked(util, *q, p_used))
        .sum()
}

/// Expected welfare loss from acting on a price `d` slots stale.
///
/// The expectation runs over the prior for the load `d` slots ago and,
/// inside it, over the load evolved for `d` slots; both prices are read
/// off the curve. Exactly zero at `d = 0`.
pub fn delay_cost(
    curve: &LoadPriceCurve,
    util: &impl Utility,
    d: u32,
    theta: f64,
    prior: &LoadPrior,
) -> Result<f64> {
    delay_cost_with(curve, util, d, theta, prior, QuadratureConfig::default())
}

pub fn delay_cost_with(
    curve: &LoadPriceCurve,
    util: &impl Utility,
    d: u32,
    theta: f64,
    prior: &LoadPrior,
    cfg: QuadratureConfig,
) -> Result<f64> {
    delay_cost_validate(curve.d_max(), prior, theta)?;
    if d == 0 {
        return Ok(0.0);
    }
    let sigma = theta * d as f64;
    let grid: Vec<(f64, f64)> = prior.grid(cfg.prior_points).collect();
    let terms = exec::map_indexed(grid.len(), |j| {
        let (d0, w) = grid[j];
        w * delay_cost_term(curve, util, sigma, cfg.kernel_panels, d0)
    });
    Ok(terms.iter().sum())
}

/// Sequential fallback of [`delay_cost`]; same result bit-for-bit.
pub fn delay_cost_seq(
    curve: &LoadPriceCurve,
    util: &impl Utility,
    d: u32,
    theta: f64,
    prior: &LoadPrior,
    cfg: QuadratureConfig,
) -> Result<f64> {
    delay_cost_validate(curve.d_max(), prior, theta)?;
    if d == 0 {
        return Ok(0.0);
    }
    let sigma = theta * d as f64;
    let grid: Vec<(f64, f64)> = prior.grid(cfg.prior_points).collect();
    let terms = exec::map_indexed_seq(grid.len(), |j| {
        let (d0, w) = grid[j];
        w * delay_cost_term(curve, util, sigma, cfg.kernel_panels, d0)
    });
    Ok(terms.iter().sum())
}

/// Expected welfare loss per outage event: the appliance falls back to
/// the average price instead of the live one. The outage cost at
/// probability `zeta` is `zeta` times this rate.
pub fn outage_loss_rate(curve: &LoadPriceCurve, util: &impl Utility, prior: &LoadPrior) -> f64 {
    let p_bar = crate::market::average_price(curve, prior);
    (0..curve.price_count())
        .map(|i| {
            let (lo, hi) = curve.load_interval(i).expect("index in range");
            prior.interval_probability(lo, hi) * gap_unchecked(util, curve.prices()[i], p_bar)
        })
        .sum()
}

/// Tabulated cost against a QoS parameter (delay in slots, or outage
/// probability).
#[derive(Debug, Clone, PartialEq)]
pub struct CostCurve {
    points: Vec<(f64, f64)>,
}

impl CostCurve {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyGrid("cost curve"));
        }
        for pair in points.windows(2) {
            if !(pair[1].0 > pair[0].0) {
                return Err(domain(format!(
                    "cost-curve parameters not strictly ascending at {} -> {}",
                    pair[0].0, pair[1].0
                )));
            }
        }
        if !points.iter().all(|(p, c)| p.is_finite() && c.is_finite()) {
            return Err(domain("cost curve has non-finite entries"));
        }
        Ok(CostCurve { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// CSV with header `param,cost`, parameters at 6 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("param,cost\n");
        for (param, cost) in &self.points {
            out.push_str(&format_sig(*param, 6));
            out.push(',');
            out.push_str(&format_sig(*cost, 6));
            out.push('\n');
        }
        out
    }
}

/// Evaluates the delay cost over `d_grid` and the outage cost
/// `zeta * rate` over `zeta_grid`.
pub fn tabulate_costs(
    curve: &LoadPriceCurve,
    util: &impl Utility,
    d_grid: &[u32],
    zeta_grid: &[f64],
    theta: f64,
    prior: &LoadPrior,
) -> Result<(CostCurve, CostCurve)> {
    tabulate_costs_with(curve, util, d_grid, zeta_grid, theta, prior, QuadratureConfig::default())
}

pub fn tabulate_costs_with(
    curve: &LoadPriceCurve,
    util: &impl Utility,
    d_grid: &[u32],
    zeta_grid: &[f64],
    theta: f64,
    prior: &LoadPrior,
    cfg: QuadratureConfig,
) -> Result<(CostCurve, CostCurve)> {
    if d_grid.is_empty() {
        return Err(Error::EmptyGrid("delay grid"));
    }
    if zeta_grid.is_empty() {
        return Err(Error::EmptyGrid("outage grid"));
    }
    if zeta_grid.iter().any(|z| !(*z >= 0.0) || !z.is_finite()) {
        return Err(domain("outage probabilities must be nonnegative"));
    }
    let mut delay_points = Vec::with_capacity(d_grid.len());
    for &d in d_grid {
        delay_points.push((d as f64, delay_cost_with(curve, util, d, theta, prior, cfg)?));
    }
    let rate = outage_loss_rate(curve, util, prior);
    let outage_points = zeta_grid.iter().map(|&z| (z, z * rate)).collect();
    Ok((CostCurve::new(delay_points)?, CostCurve::new(outage_points)?))
}
