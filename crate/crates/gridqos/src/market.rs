//! Stochastic load process and the piecewise load-to-price mapping.
//!
//! A bus maps load (MW) to a locational marginal price through a
//! piecewise-constant curve. Load itself is modeled as a Gaussian
//! truncated to `[0, d_max]` whose variance grows linearly with elapsed
//! time, so the price seen `t` slots after a known reading `d0` is a
//! discrete distribution over the curve's price levels.

use crate::error::{domain, Error, Result};
use crate::numeric::simpson;

/// Default upper load bound (MW). The highest curve breakpoint shipped
/// with the five-bus scenario is 1484.06, which this cleanly bounds.
pub const DEFAULT_D_MAX: f64 = 1600.0;

/// Default panel count for the Simpson quadratures behind the truncated
/// Gaussian normalization and interval masses.
pub const DEFAULT_PANELS: usize = 4096;

/// Piecewise-constant mapping from load (MW) to price ($/MWh).
///
/// Interval `i` is `[breakpoints[i], breakpoints[i+1])`, left-closed;
/// the last interval is closed on both ends at `d_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadPriceCurve {
    breakpoints: Vec<f64>,
    prices: Vec<f64>,
    d_max: f64,
}

impl LoadPriceCurve {
    pub fn new(breakpoints: Vec<f64>, prices: Vec<f64>, d_max: f64) -> Result<Self> {
        if breakpoints.is_empty() {
            return Err(Error::InvalidCurve("no breakpoints".into()));
        }
        if breakpoints.len() != prices.len() {
            return Err(Error::InvalidCurve(format!(
                "{} breakpoints but {} prices",
                breakpoints.len(),
                prices.len()
            )));
        }
        if breakpoints[0] != 0.0 {
            return Err(Error::InvalidCurve(format!(
                "first breakpoint must be 0, got {}",
                breakpoints[0]
            )));
        }
        for pair in breakpoints.windows(2) {
            if !(pair[1] > pair[0]) {
                return Err(Error::InvalidCurve(format!(
                    "breakpoints not strictly ascending at {} -> {}",
                    pair[0], pair[1]
                )));
            }
        }
        if !breakpoints.iter().all(|b| b.is_finite()) {
            return Err(Error::InvalidCurve("non-finite breakpoint".into()));
        }
        if !(d_max.is_finite() && d_max > *breakpoints.last().unwrap()) {
            return Err(Error::InvalidCurve(format!(
                "d_max {} must exceed the last breakpoint {}",
                d_max,
                breakpoints.last().unwrap()
            )));
        }
        if !prices.iter().all(|p| p.is_finite() && *p > 0.0) {
            return Err(Error::InvalidCurve("prices must be positive and finite".into()));
        }
        Ok(Self { breakpoints, prices, d_max })
    }

    /// Number of price levels Q.
    pub fn price_count(&self) -> usize {
        self.prices.len()
    }

    pub fn d_max(&self) -> f64 {
        self.d_max
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Index of the interval containing `load` (left-closed convention).
    pub fn interval_index_of(&self, load: f64) -> Result<usize> {
        if !(load >= 0.0 && load <= self.d_max) {
            return Err(domain(format!(
                "load {} outside [0, {}]",
                load, self.d_max
            )));
        }
        // Largest i with breakpoints[i] <= load; load == d_max falls in
        // the last (both-ends-closed) interval.
        let i = self.breakpoints.partition_point(|b| *b <= load);
        Ok(i - 1)
    }

    /// Price in force at the given load.
    pub fn price_of_load(&self, load: f64) -> Result<f64> {
        Ok(self.prices[self.interval_index_of(load)?])
    }

    /// Bounds `[lo, hi)` of interval `i` (the last interval is `[lo, d_max]`).
    pub fn load_interval(&self, i: usize) -> Result<(f64, f64)> {
        if i >= self.prices.len() {
            return Err(Error::IndexOutOfRange { index: i, len: self.prices.len() });
        }
        let lo = self.breakpoints[i];
        let hi = if i + 1 < self.breakpoints.len() {
            self.breakpoints[i + 1]
        } else {
            self.d_max
        };
        Ok((lo, hi))
    }

    /// Parses a curve file: line 1 is `Q d_max`, lines 2..Q+1 are
    /// `breakpoint price` pairs with ascending breakpoints.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or(Error::Parse { line: 1, message: "empty input".into() })?;
        let mut it = header.split_whitespace();
        let q: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse { line: 1, message: "expected `Q d_max`".into() })?;
        let d_max: f64 = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse { line: 1, message: "expected `Q d_max`".into() })?;
        if it.next().is_some() {
            return Err(Error::Parse { line: 1, message: "trailing tokens after `Q d_max`".into() });
        }
        let mut breakpoints = Vec::with_capacity(q);
        let mut prices = Vec::with_capacity(q);
        let mut seen = 0usize;
        for (idx, line) in lines {
            let lineno = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            if seen == q {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("more than {q} curve rows"),
                });
            }
            let mut it = line.split_whitespace();
            let bp: f64 = it
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Parse {
                    line: lineno,
                    message: "expected `breakpoint price`".into(),
                })?;
            let price: f64 = it
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Parse {
                    line: lineno,
                    message: "expected `breakpoint price`".into(),
                })?;
            if it.next().is_some() {
                return Err(Error::Parse {
                    line: lineno,
                    message: "trailing tokens after `breakpoint price`".into(),
                });
            }
            breakpoints.push(bp);
            prices.push(price);
            seen += 1;
        }
        if seen != q {
            return Err(Error::Parse {
                line: seen + 1,
                message: format!("expected {q} curve rows, found {seen}"),
            });
        }
        Self::new(breakpoints, prices, d_max)
    }

    /// Inverse of [`LoadPriceCurve::parse`]; `parse(emit(c)) == c`.
    pub fn emit(&self) -> String {
        let mut out = format!("{} {}\n", self.prices.len(), self.d_max);
        for (bp, price) in self.breakpoints.iter().zip(&self.prices) {
            out.push_str(&format!("{bp} {price}\n"));
        }
        out
    }
}

fn gaussian_kernel(x: f64, mu: f64, sigma: f64) -> f64 {
    // sigma enters as written in the load model: exp(-(x-mu)^2 / (2 sigma)),
    // with sigma playing the role of the variance.
    (-(x - mu) * (x - mu) / (2.0 * sigma)).exp()
}

/// Gaussian truncated to `[0, d_max]`.
///
/// `sigma` is the variance-like spread parameter: the density is
/// proportional to `exp(-(x - mu)^2 / (2 sigma))` on the support.
#[derive(Debug, Clone)]
pub struct TruncatedGaussian {
    mu: f64,
    sigma: f64,
    d_max: f64,
    panels: usize,
    norm: f64,
}

impl TruncatedGaussian {
    pub fn new(mu: f64, sigma: f64, d_max: f64) -> Result<Self> {
        Self::with_panels(mu, sigma, d_max, DEFAULT_PANELS)
    }

    pub fn with_panels(mu: f64, sigma: f64, d_max: f64, panels: usize) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(domain(format!("sigma must be positive, got {sigma}")));
        }
        if !(d_max > 0.0 && d_max.is_finite()) {
            return Err(domain(format!("d_max must be positive, got {d_max}")));
        }
        if !mu.is_finite() {
            return Err(domain("mu must be finite"));
        }
        let norm = simpson(|y| gaussian_kernel(y, mu, sigma), 0.0, d_max, panels);
        if !(norm > 0.0 && norm.is_finite()) {
            // A mean far outside the support (or a spike narrower than
            // the panel spacing) leaves no resolvable mass to normalize.
            return Err(domain(format!(
                "kernel mass over [0, {d_max}] vanishes for mu {mu}, sigma {sigma}"
            )));
        }
        Ok(Self { mu, sigma, d_max, panels, norm })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// The variance-like spread parameter.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn d_max(&self) -> f64 {
        self.d_max
    }

    /// Density at `x`, normalized over the truncated support.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        self.check_support(x)?;
        Ok(gaussian_kernel(x, self.mu, self.sigma) / self.norm)
    }

    /// P(X <= x) on the truncated support.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        self.check_support(x)?;
        let panels = self.scaled_panels(x / self.d_max);
        Ok(simpson(|y| gaussian_kernel(y, self.mu, self.sigma), 0.0, x, panels) / self.norm)
    }

    fn scaled_panels(&self, fraction: f64) -> usize {
        ((self.panels as f64 * fraction).ceil() as usize).max(32)
    }

    fn check_support(&self, x: f64) -> Result<()> {
        if !(x >= 0.0 && x <= self.d_max) {
            return Err(domain(format!("x {} outside [0, {}]", x, self.d_max)));
        }
        Ok(())
    }
}

/// Load distribution after some elapsed time: either still the known
/// reading (zero elapsed slots) or a truncated Gaussian around it.
///
/// The zero-time case is kept as an exact point mass rather than a
/// zero-variance Gaussian, whose kernel would be 0/0.
#[derive(Debug, Clone)]
pub enum LoadDistribution {
    PointMass { at: f64 },
    Spread(TruncatedGaussian),
}

/// PDF of the load `x` under the truncated-Gaussian spread model.
pub fn truncated_gaussian_pdf(x: f64, dist: &TruncatedGaussian) -> Result<f64> {
    dist.pdf(x)
}

/// Distribution of the load `t` slots after a known reading `d0`, with
/// variance growing linearly at rate `theta` (MW² per slot). The mean
/// stays at `d0`: the prediction is unbiased.
pub fn load_distribution_after(d0: f64, t: u32, theta: f64, d_max: f64) -> Result<LoadDistribution> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(domain(format!("theta must be positive, got {theta}")));
    }
    if !(d0 >= 0.0 && d0 <= d_max) {
        return Err(domain(format!("d0 {} outside [0, {}]", d0, d_max)));
    }
    if t == 0 {
        return Ok(LoadDistribution::PointMass { at: d0 });
    }
    let sigma = theta * t as f64;
    Ok(LoadDistribution::Spread(TruncatedGaussian::new(d0, sigma, d_max)?))
}

/// Discrete distribution over a curve's price levels.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceDistribution {
    probabilities: Vec<f64>,
}

impl PriceDistribution {
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// Shannon entropy (nats); used to observe how the price spreads
    /// with elapsed time.
    pub fn entropy(&self) -> f64 {
        self.probabilities
            .iter()
            .filter(|p| **p > 0.0)
            .map(|p| -p * p.ln())
            .sum()
    }
}

/// Per-interval kernel masses of a spread distribution centered at `mu`
/// with spread `sigma`, normalized to sum to one.
///
/// Normalizing by the partition total keeps the probabilities summing to
/// one regardless of per-interval quadrature error; panel counts scale
/// with interval width out of the given budget.
pub(crate) fn spread_interval_masses(
    curve: &LoadPriceCurve,
    mu: f64,
    sigma: f64,
    panels: usize,
) -> Result<Vec<f64>> {
    let q = curve.price_count();
    let d_max = curve.d_max();
    let mut masses = Vec::with_capacity(q);
    for i in 0..q {
        let (lo, hi) = curve.load_interval(i)?;
        let n = ((panels as f64 * (hi - lo) / d_max).ceil() as usize).max(32);
        masses.push(simpson(|y| gaussian_kernel(y, mu, sigma), lo, hi, n));
    }
    let total: f64 = masses.iter().sum();
    if !(total > 0.0) {
        return Err(domain("degenerate load distribution: zero total mass"));
    }
    for m in &mut masses {
        *m /= total;
    }
    Ok(masses)
}

/// Per-interval masses of `dist` over the curve's load intervals,
/// normalized to sum to one.
pub(crate) fn interval_masses(curve: &LoadPriceCurve, dist: &LoadDistribution) -> Result<Vec<f64>> {
    match dist {
        LoadDistribution::PointMass { at } => {
            let mut probs = vec![0.0; curve.price_count()];
            probs[curve.interval_index_of(*at)?] = 1.0;
            Ok(probs)
        }
        LoadDistribution::Spread(tg) => {
            if tg.d_max() != curve.d_max() {
                return Err(domain(format!(
                    "distribution support {} does not match curve d_max {}",
                    tg.d_max(),
                    curve.d_max()
                )));
            }
            spread_interval_masses(curve, tg.mu(), tg.sigma(), tg.panels)
        }
    }
}

/// Distribution over the curve's price levels `t` slots after reading `d0`.
pub fn price_distribution_after(
    curve: &LoadPriceCurve,
    d0: f64,
    t: u32,
    theta: f64,
) -> Result<PriceDistribution> {
    let dist = load_distribution_after(d0, t, theta, curve.d_max())?;
    Ok(PriceDistribution { probabilities: interval_masses(curve, &dist)? })
}

/// Prior over the current load level, used for the expectations behind
/// the delay and outage costs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LoadPrior {
    /// Uniform over `[0, d_max]`.
    Uniform { d_max: f64 },
}

impl LoadPrior {
    pub fn uniform(d_max: f64) -> Self {
        LoadPrior::Uniform { d_max }
    }

    /// Probability assigned to the load interval `[lo, hi)`.
    pub fn interval_probability(&self, lo: f64, hi: f64) -> f64 {
        match self {
            LoadPrior::Uniform { d_max } => {
                let lo = lo.max(0.0);
                let hi = hi.min(*d_max);
                if hi <= lo {
                    0.0
                } else {
                    (hi - lo) / d_max
                }
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            LoadPrior::Uniform { d_max } => d_max / 2.0,
        }
    }

    /// Equal-weight evaluation grid: `n` equally spaced midpoints with
    /// weight `1/n` each.
    pub fn grid(&self, n: usize) -> impl Iterator<Item = (f64, f64)> + '_ {
        let LoadPrior::Uniform { d_max } = *self;
        let w = 1.0 / n as f64;
        (0..n).map(move |j| ((j as f64 + 0.5) * d_max / n as f64, w))
    }
}

/// Default prior over the current load for a given curve.
pub fn stationary_load_prior(curve: &LoadPriceCurve) -> LoadPrior {
    LoadPrior::uniform(curve.d_max())
}

/// Average price under the prior: the default price an appliance falls
/// back to during an outage.
pub fn average_price(curve: &LoadPriceCurve, prior: &LoadPrior) -> f64 {
    (0..curve.price_count())
        .map(|i| {
            let (lo, hi) = curve.load_interval(i).expect("index in range");
            curve.prices()[i] * prior.interval_probability(lo, hi)
        })
        .sum()
}
