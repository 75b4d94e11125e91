//! Requirement selection: picks the delay and outage-probability targets
//! that minimize welfare loss plus the network's QoS taxes.

use std::fmt;
use std::str::FromStr;

use crate::consumer::CostCurve;
use crate::error::{domain, Error, Result};
use crate::exec;

/// Upper bound on admissible outage probabilities.
pub const ZETA_MAX: f64 = 0.1;

/// Network prices for QoS levels: a tax on low delay and a tax on low
/// outage probability. Defaults are `exp(4/d)` and `exp(0.01/zeta)`,
/// both cheap at loose requirements and steep near zero.
pub struct TaxFunctions {
    delay: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    outage: Box<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl TaxFunctions {
    pub fn new(
        delay: impl Fn(f64) -> f64 + Send + Sync + 'static,
        outage: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        TaxFunctions { delay: Box::new(delay), outage: Box::new(outage) }
    }

    /// P(d): price of delay requirement `d`.
    pub fn delay_tax(&self, d: f64) -> f64 {
        (self.delay)(d)
    }

    /// T(zeta): price of outage requirement `zeta`.
    pub fn outage_tax(&self, zeta: f64) -> f64 {
        (self.outage)(zeta)
    }
}

impl Default for TaxFunctions {
    fn default() -> Self {
        TaxFunctions::new(|d| (4.0 / d).exp(), |z| (0.01 / z).exp())
    }
}

impl fmt::Debug for TaxFunctions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("TaxFunctions")
    }
}

/// How the outage term composes in the objectives.
///
/// The outage loss is already scaled by the outage probability; composing
/// it again as written in the joint objective squares that factor. Both
/// readings are kept: `Literal` uses `zeta^2 * rate`, `Consistent` (the
/// default) uses a single `zeta * rate` factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ObjectiveMode {
    Literal,
    #[default]
    Consistent,
}

impl ObjectiveMode {
    fn outage_term(self, zeta: f64, loss_rate: f64) -> f64 {
        match self {
            ObjectiveMode::Literal => zeta * zeta * loss_rate,
            ObjectiveMode::Consistent => zeta * loss_rate,
        }
    }
}

impl fmt::Display for ObjectiveMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObjectiveMode::Literal => f.write_str("literal"),
            ObjectiveMode::Consistent => f.write_str("consistent"),
        }
    }
}

impl FromStr for ObjectiveMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(ObjectiveMode::Literal),
            "consistent" => Ok(ObjectiveMode::Consistent),
            other => Err(domain(format!("unknown objective mode `{other}`"))),
        }
    }
}

/// A derived QoS requirement pair and the objective value it achieves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QosRequirement {
    pub d_star: f64,
    pub zeta_star: f64,
    pub objective_value: f64,
    pub mode: ObjectiveMode,
}

/// Integer delay grid 1..=50 slots.
pub fn default_delay_grid() -> Vec<u32> {
    (1..=50).collect()
}

/// Outage grid 0.001..=0.1 in steps of 0.001.
pub fn default_zeta_grid() -> Vec<f64> {
    (1..=100).map(|i| i as f64 / 1000.0).collect()
}

fn validate_zeta_grid(zeta_grid: &[f64]) -> Result<()> {
    if zeta_grid.is_empty() {
        return Err(Error::EmptyGrid("outage grid"));
    }
    for &z in zeta_grid {
        if !(z > 0.0 && z.is_finite()) {
            return Err(domain(format!("outage probability must be positive, got {z}")));
        }
        if z > ZETA_MAX {
            return Err(Error::OutageGridBound { value: z });
        }
    }
    Ok(())
}

/// Argmin of `C(d) + P(d)` over the tabulated delay grid; ties go to the
/// smaller delay.
pub fn optimal_delay_requirement(c_curve: &CostCurve, taxes: &TaxFunctions) -> Result<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    for &(d, c) in c_curve.points() {
        let obj = c + taxes.delay_tax(d);
        if best.map_or(true, |(_, b)| obj < b) {
            best = Some((d, obj));
        }
    }
    best.ok_or(Error::EmptyGrid("delay grid"))
}

/// Argmin of the outage objective over `zeta_grid`; ties go to the
/// smaller probability.
pub fn optimal_outage_requirement(
    loss_rate: f64,
    taxes: &TaxFunctions,
    zeta_grid: &[f64],
    mode: ObjectiveMode,
) -> Result<(f64, f64)> {
    validate_zeta_grid(zeta_grid)?;
    let mut best: Option<(f64, f64)> = None;
    for &z in zeta_grid {
        let obj = mode.outage_term(z, loss_rate) + taxes.outage_tax(z);
        if best.map_or(true, |(_, b)| obj < b) {
            best = Some((z, obj));
        }
    }
    best.ok_or(Error::EmptyGrid("outage grid"))
}

/// Joint objective over the (delay, outage) product grid:
/// `(1 - zeta) * C(d) + outage_term + P(d) + T(zeta)`.
///
/// Ties go to the smaller delay, then the smaller outage probability.
pub fn joint_qos_requirement(
    c_curve: &CostCurve,
    loss_rate: f64,
    taxes: &TaxFunctions,
    zeta_grid: &[f64],
    mode: ObjectiveMode,
) -> Result<QosRequirement> {
    validate_zeta_grid(zeta_grid)?;
    if c_curve.points().is_empty() {
        return Err(Error::EmptyGrid("delay grid"));
    }
    // Scan rows of the product grid in parallel, then take the min in
    // grid order so the tie-break stays deterministic.
    let per_delay = exec::map_indexed(c_curve.points().len(), |i| {
        let (d, c) = c_curve.points()[i];
        let mut best: Option<(f64, f64)> = None;
        for &z in zeta_grid {
            let obj =
                (1.0 - z) * c + mode.outage_term(z, loss_rate) + taxes.delay_tax(d) + taxes.outage_tax(z);
            if best.map_or(true, |(_, b)| obj < b) {
                best = Some((z, obj));
            }
        }
        let (zeta, objective) = best.expect("nonempty zeta grid");
        (d, zeta, objective)
    });
    let (d_star, zeta_star, objective_value) = per_delay
        .into_iter()
        .reduce(|acc, cand| if cand.2 < acc.2 { cand } else { acc })
        .expect("nonempty delay grid");
    Ok(QosRequirement { d_star, zeta_star, objective_value, mode })
}
