//! Realized-quantile benchmark: empirical intraday VaR/ES scaled by c^H.
//!
//! Under self-similarity with stationary increments, intraday risk measures
//! scale to the daily horizon by c^H; H = 1/2 (diffusive scaling) is the
//! default. The empirical quantile follows the type-7 convention; the tail
//! mean includes returns at the quantile, falling back to the sample minimum
//! if the inclusive set were empty under some other rule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scaling::{RiskDiagnostics, RiskMethod, RiskPair, RiskSpec};
use crate::stats::{mean_at_or_below, quantile_sorted};
use crate::subordinator::SubordinatedSeries;

/// Scaling-exponent configuration for the benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DhConfig {
    /// Hurst exponent in (0, 1).
    pub hurst: f64,
}

impl Default for DhConfig {
    fn default() -> Self {
        Self { hurst: 0.5 }
    }
}

/// Daily (VaR, ES) from the empirical intraday pair scaled by c^H.
pub fn dh_risk_pair(
    returns: &SubordinatedSeries,
    spec: &RiskSpec,
    cfg: &DhConfig,
) -> Result<RiskPair> {
    let c = returns.c();
    if c < 2 {
        return Err(Error::InvalidInput(format!(
            "benchmark needs at least 2 subordinated returns, got {c}"
        )));
    }
    if !(cfg.hurst > 0.0 && cfg.hurst < 1.0) {
        return Err(Error::InvalidInput(format!(
            "hurst exponent must lie in (0, 1), got {}",
            cfg.hurst
        )));
    }
    if !(spec.theta > 0.0 && spec.theta < 0.5) {
        return Err(Error::InvalidInput(format!(
            "theta must lie in (0, 0.5), got {}",
            spec.theta
        )));
    }

    let mut sorted = returns.returns.clone();
    sorted.sort_by(f64::total_cmp);
    let q_hf = quantile_sorted(&sorted, spec.theta);
    let e_hf = mean_at_or_below(&sorted, q_hf).unwrap_or(sorted[0]);

    let scale = (c as f64).powf(cfg.hurst);
    Ok(RiskPair {
        var: scale * q_hf,
        es: scale * e_hf,
        method: RiskMethod::Dh,
        diagnostics: RiskDiagnostics::default(),
    })
}
