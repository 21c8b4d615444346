//! Intraday time change: intensity processes and equal-activity subordination.
//!
//! A subordinator partitions the day's cumulative market activity into `c`
//! buckets of equal mass and picks one grid index per bucket, producing the
//! strictly increasing map tau(0)=0 < tau(1) < ... < tau(c)=390 and the
//! subordinated returns Y_j = S_{tau(j)} - S_{tau(j-1)}.
//!
//! Three intensity choices are registered: constant (physical clock),
//! tri-power variation over a centered 15-minute window (jump-robust
//! volatility proxy), and traded volume.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market_data::IntradayDay;

/// Per-minute activity measure and its cumulative sums.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensitySeries {
    /// lambda_0..lambda_n, one entry per grid point.
    pub lambda: Vec<f64>,
    /// Lambda_j = sum_{i<=j} lambda_i.
    pub cumulative: Vec<f64>,
    /// Lambda = sum of all lambda_i.
    pub total: f64,
}

impl IntensitySeries {
    fn from_lambda(lambda: Vec<f64>) -> Self {
        let mut cumulative = Vec::with_capacity(lambda.len());
        let mut run = 0.0;
        for &l in &lambda {
            run += l;
            cumulative.push(run);
        }
        let total = run;
        Self {
            lambda,
            cumulative,
            total,
        }
    }
}

/// An interchangeable intensity-process strategy.
pub trait Subordinator: Send + Sync {
    /// Registry name, as used by configuration and the CLI.
    fn name(&self) -> &'static str;
    /// Per-minute intensity for one day.
    fn intensity(&self, day: &IntradayDay) -> IntensitySeries;
}

/// Constant intensity: physical (clock) time.
pub struct Clock;

impl Subordinator for Clock {
    fn name(&self) -> &'static str {
        "clock"
    }

    fn intensity(&self, day: &IntradayDay) -> IntensitySeries {
        IntensitySeries::from_lambda(vec![1.0; day.log_prices.len()])
    }
}

/// Tri-power variation over a centered 15-minute window.
pub struct TriPowerVariation;

impl Subordinator for TriPowerVariation {
    fn name(&self) -> &'static str {
        "tpv"
    }

    fn intensity(&self, day: &IntradayDay) -> IntensitySeries {
        let s = &day.log_prices;
        let n = s.len() - 1; // last grid index
        let pow = |l: usize| -> f64 { (s[l] - s[l - 1]).abs().powf(2.0 / 3.0) };

        let lambda = (0..=n)
            .map(|i| {
                let lo = i.saturating_sub(15) + 3;
                let hi = (i + 15).min(n);
                let mut sum = 0.0;
                let mut l = lo;
                while l <= hi {
                    sum += pow(l - 2) * pow(l - 1) * pow(l);
                    l += 1;
                }
                sum
            })
            .collect();
        IntensitySeries::from_lambda(lambda)
    }
}

/// Traded volume as intensity; no interval precedes minute 0, so lambda_0 = 0.
pub struct TradedVolume;

impl Subordinator for TradedVolume {
    fn name(&self) -> &'static str {
        "vol"
    }

    fn intensity(&self, day: &IntradayDay) -> IntensitySeries {
        let mut lambda = Vec::with_capacity(day.log_prices.len());
        lambda.push(0.0);
        lambda.extend_from_slice(&day.volumes);
        IntensitySeries::from_lambda(lambda)
    }
}

/// Registry of the built-in subordinators.
pub fn registry() -> &'static [&'static dyn Subordinator] {
    static REGISTRY: [&dyn Subordinator; 3] = [&Clock, &TriPowerVariation, &TradedVolume];
    &REGISTRY
}

/// Look a subordinator up by registry name.
pub fn by_name(name: &str) -> Option<&'static dyn Subordinator> {
    registry().iter().copied().find(|s| s.name() == name)
}

/// Config-friendly tag for the built-in subordinators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubordinatorKind {
    Clock,
    Tpv,
    Vol,
}

impl SubordinatorKind {
    pub fn instance(self) -> &'static dyn Subordinator {
        match self {
            SubordinatorKind::Clock => &Clock,
            SubordinatorKind::Tpv => &TriPowerVariation,
            SubordinatorKind::Vol => &TradedVolume,
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "clock" => Some(Self::Clock),
            "tpv" => Some(Self::Tpv),
            "vol" => Some(Self::Vol),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        self.instance().name()
    }
}

/// Subordination request: which intensity, and how many intraday returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubordinationSpec {
    pub kind: SubordinatorKind,
    pub c: usize,
}

impl SubordinationSpec {
    pub fn new(kind: SubordinatorKind, c: usize) -> Self {
        Self { kind, c }
    }
}

/// The time-changed day: grid map tau and the c subordinated returns.
#[derive(Debug, Clone, PartialEq)]
pub struct SubordinatedSeries {
    /// tau(0)=0 < tau(1) < ... < tau(c) = last grid index.
    pub tau: Vec<usize>,
    /// Y_j = S_{tau(j)} - S_{tau(j-1)}, j = 1..c.
    pub returns: Vec<f64>,
    /// Set when a zero-mass intensity forced the clock fallback.
    pub clock_fallback: bool,
}

impl SubordinatedSeries {
    pub fn c(&self) -> usize {
        self.returns.len()
    }

    /// Synthetic series carry no minute grid; tau is the identity 0..=c.
    pub fn from_returns(returns: Vec<f64>) -> Self {
        let tau = (0..=returns.len()).collect();
        Self {
            tau,
            returns,
            clock_fallback: false,
        }
    }

    pub fn daily_return(&self) -> f64 {
        self.returns.iter().sum()
    }
}

/// Compute the intensity process of `kind` for one day.
pub fn intensity(day: &IntradayDay, kind: SubordinatorKind) -> IntensitySeries {
    kind.instance().intensity(day)
}

/// Partition the day into `spec.c` equal-activity buckets and emit the
/// subordinated returns.
///
/// Bucket mass is measured on the return intervals: the cumulative activity at
/// grid index l counts lambda_1..lambda_l (lambda_0 precedes the first return
/// and carries no interval, keeping the clock case exactly uniform). Bucket j
/// selects its largest index; an empty bucket borrows the smallest index from
/// the next unconsumed bucket, or failing that the smallest free index that
/// keeps tau strictly increasing.
pub fn subordinate(day: &IntradayDay, spec: SubordinationSpec) -> Result<SubordinatedSeries> {
    let n = day.log_prices.len() - 1; // number of return intervals
    let c = spec.c;
    if c < 1 || c > n {
        return Err(Error::InvalidInput(format!(
            "c must be in 1..={n}, got {c}"
        )));
    }

    let series = intensity(day, spec.kind);
    let interval_mass: Vec<f64> = (1..=n)
        .map(|l| series.cumulative[l] - series.lambda[0])
        .collect();
    let total = interval_mass[n - 1];

    let (mass, total, fell_back) = if total > 0.0 && total.is_finite() {
        (interval_mass, total, false)
    } else {
        // zero activity: fall back to the clock
        let clock: Vec<f64> = (1..=n).map(|l| l as f64).collect();
        (clock, n as f64, true)
    };

    // Bucket j holds indices l with (j-1) total/c < mass_l <= j total/c.
    // Indices with zero cumulative mass fail the strict lower bound of every
    // bucket and stay unassigned.
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); c + 1];
    for (idx, &m) in mass.iter().enumerate() {
        if m <= 0.0 {
            continue;
        }
        let l = idx + 1;
        let mut j = ((m * c as f64) / total).ceil() as usize;
        j = j.clamp(1, c);
        // guard against float rounding at bucket edges
        while j < c && m > total * j as f64 / c as f64 {
            j += 1;
        }
        while j > 1 && m <= total * (j as f64 - 1.0) / c as f64 {
            j -= 1;
        }
        buckets[j].push(l);
    }

    let mut tau = Vec::with_capacity(c + 1);
    tau.push(0usize);

    for j in 1..c {
        let prev = *tau.last().expect("tau starts non-empty");

        let pick = if buckets[j].last().is_some_and(|&v| v > prev) {
            // own bucket: take its maximum
            buckets[j].pop().expect("checked non-empty")
        } else {
            // borrow the minimum of the next non-empty, unconsumed bucket
            let borrowed = buckets
                .iter_mut()
                .skip(j + 1)
                .find(|b| b.first().is_some_and(|&v| v > prev))
                .map(|b| b.remove(0));
            // last resort: smallest unused index above tau(j-1)
            borrowed.unwrap_or(prev + 1)
        };

        // keep room for tau(j+1..c): tau(j) <= n - (c - j)
        let pick = pick.min(n - (c - j)).max(prev + 1);
        tau.push(pick);
    }
    tau.push(n); // tau(c) forced to the session end

    debug_assert!(tau.windows(2).all(|w| w[0] < w[1]), "tau must strictly increase");

    let returns = tau
        .windows(2)
        .map(|w| day.log_prices[w[1]] - day.log_prices[w[0]])
        .collect();

    Ok(SubordinatedSeries {
        tau,
        returns,
        clock_fallback: fell_back,
    })
}
