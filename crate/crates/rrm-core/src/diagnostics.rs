//! Self-similarity diagnostics: structure-function scaling, Ljung-Box
//! autocorrelation testing, and the nonzero-mean scaling bias.
//!
//! The structure function m(q, D) = E|S_{tau(j+D)} - S_{tau(j)}|^q obeys
//! m = A(q) D^{H(q)} for a multifractal process; H(q) linear in q means
//! monofractal. H(q) is estimated per day by regressing log m on log D over
//! overlapping increments of the subordinated log-price path, then averaged
//! across the panel (a pooled variant regresses the day-averaged m instead).

use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::market_data::DayPanel;
use crate::num::student_t::normal_quantile;
use crate::stats::{autocorrelation, mean, ols};
use crate::subordinator::{subordinate, SubordinationSpec};

/// Structure-function scaling estimates over a panel.
#[derive(Debug, Clone, Serialize)]
pub struct StructureFunctionReport {
    pub q_grid: Vec<f64>,
    pub delta_grid: Vec<usize>,
    /// Estimated scaling exponent per q.
    pub hq: Vec<f64>,
    /// Regression intercepts log A(q).
    pub aq_log: Vec<f64>,
    /// Regression fit quality per q.
    pub r2: Vec<f64>,
    pub days_averaged: usize,
}

/// Default moment orders: 40 equispaced points in (0.25, 10].
pub fn default_q_grid() -> Vec<f64> {
    (1..=40).map(|i| 0.25 + (10.0 - 0.25) * i as f64 / 40.0).collect()
}

/// Default increment lags: all integers 1..=38.
pub fn default_delta_grid() -> Vec<usize> {
    (1..=38).collect()
}

/// How the per-day structure functions are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SfAggregation {
    /// Regress per day, average the daily H(q) curves (default).
    PerDay,
    /// Average m(q, D) across days first, then run one regression per q.
    Pooled,
}

/// Structure-function analysis of a subordinated panel.
pub fn structure_function(
    panel: &DayPanel,
    spec: SubordinationSpec,
    q_grid: &[f64],
    delta_grid: &[usize],
    aggregation: SfAggregation,
) -> Result<StructureFunctionReport> {
    if panel.days.is_empty() {
        return Err(Error::InvalidInput("panel must contain at least one day".into()));
    }
    if q_grid.is_empty() || delta_grid.is_empty() {
        return Err(Error::InvalidInput("q and delta grids must be non-empty".into()));
    }

    // per day: m[q][delta] over valid (day, delta) cells
    let day_moments: Vec<Vec<Vec<Option<f64>>>> = panel
        .days
        .par_iter()
        .map(|day| {
            let sub = subordinate(day, spec)?;
            let path: Vec<f64> = sub.tau.iter().map(|&t| day.log_prices[t]).collect();
            let c = path.len() - 1;
            let moments = q_grid
                .iter()
                .map(|&q| {
                    delta_grid
                        .iter()
                        .map(|&delta| {
                            if delta >= c + 1 {
                                return None; // day too short for this lag
                            }
                            let m = mean(
                                &(0..=(c - delta))
                                    .map(|j| (path[j + delta] - path[j]).abs().powf(q))
                                    .collect::<Vec<f64>>(),
                            );
                            (m > 0.0).then_some(m)
                        })
                        .collect()
                })
                .collect();
            Ok(moments)
        })
        .collect::<Result<_>>()?;

    let nq = q_grid.len();
    let mut hq = vec![0.0; nq];
    let mut aq_log = vec![0.0; nq];
    let mut r2 = vec![0.0; nq];
    let days_averaged;

    match aggregation {
        SfAggregation::PerDay => {
            let mut counted = 0usize;
            let mut sums = vec![(0.0, 0.0, 0.0); nq];
            for day in &day_moments {
                let mut day_ok = false;
                for (qi, row) in day.iter().enumerate() {
                    let pts: Vec<(f64, f64)> = row
                        .iter()
                        .zip(delta_grid)
                        .filter_map(|(m, &d)| m.map(|v| ((d as f64).ln(), v.ln())))
                        .collect();
                    if pts.len() < 2 {
                        continue;
                    }
                    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
                    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
                    let (a, b, r) = ols(&xs, &ys);
                    sums[qi].0 += b;
                    sums[qi].1 += a;
                    sums[qi].2 += r;
                    day_ok = true;
                }
                if day_ok {
                    counted += 1;
                }
            }
            if counted == 0 {
                return Err(Error::DegenerateSeries(
                    "no day produced a usable structure function".into(),
                ));
            }
            for qi in 0..nq {
                hq[qi] = sums[qi].0 / counted as f64;
                aq_log[qi] = sums[qi].1 / counted as f64;
                r2[qi] = sums[qi].2 / counted as f64;
            }
            days_averaged = counted;
        }
        SfAggregation::Pooled => {
            for qi in 0..nq {
                let mut pts = Vec::new();
                for (di, &delta) in delta_grid.iter().enumerate() {
                    let cells: Vec<f64> = day_moments
                        .iter()
                        .filter_map(|day| day[qi][di])
                        .collect();
                    if !cells.is_empty() {
                        pts.push(((delta as f64).ln(), mean(&cells).ln()));
                    }
                }
                if pts.len() < 2 {
                    return Err(Error::DegenerateSeries(format!(
                        "fewer than two usable lags for q = {}",
                        q_grid[qi]
                    )));
                }
                let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
                let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
                let (a, b, r) = ols(&xs, &ys);
                hq[qi] = b;
                aq_log[qi] = a;
                r2[qi] = r;
            }
            days_averaged = day_moments.len();
        }
    }

    Ok(StructureFunctionReport {
        q_grid: q_grid.to_vec(),
        delta_grid: delta_grid.to_vec(),
        hq,
        aq_log,
        r2,
        days_averaged,
    })
}

/// Ljung-Box portmanteau test outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LjungBoxResult {
    pub statistic: f64,
    pub lags: usize,
    pub p_value: f64,
}

/// Ljung-Box test: Q = n(n+2) sum_k rho_k^2 / (n-k), chi-squared(h) tail.
pub fn ljung_box(series: &[f64], lags: usize) -> Result<LjungBoxResult> {
    if lags == 0 {
        return Err(Error::InvalidInput("lags must be positive".into()));
    }
    if series.len() <= lags + 1 {
        return Err(Error::InsufficientHistory {
            required: lags + 1,
            got: series.len(),
        });
    }
    let m = mean(series);
    let denom: f64 = series.iter().map(|&x| (x - m) * (x - m)).sum();
    if denom <= 0.0 {
        return Err(Error::DegenerateSeries(
            "zero-variance series has no autocorrelation".into(),
        ));
    }

    let n = series.len() as f64;
    let mut q = 0.0;
    for k in 1..=lags {
        let rho = autocorrelation(series, k);
        q += rho * rho / (n - k as f64);
    }
    q *= n * (n + 2.0);

    let chi = ChiSquared::new(lags as f64).expect("positive dof");
    let p_value = 1.0 - chi.cdf(q);
    Ok(LjungBoxResult {
        statistic: q,
        lags,
        p_value,
    })
}

/// Quantile-scaling bias from a nonzero mean.
///
/// For iid Gaussian intraday returns with mean mu/c and sd sigma/sqrt(c), the
/// true daily quantile is mu + sigma alpha while sqrt(c)-scaling of the exact
/// high-frequency quantile yields mu/sqrt(c) + sigma alpha. Returns
/// (biased, truth); the bias is mu (1/sqrt(c) - 1).
pub fn scaling_bias(mu: f64, sigma: f64, c: usize, theta: f64) -> (f64, f64) {
    assert!(sigma > 0.0 && c >= 1 && theta > 0.0 && theta < 1.0);
    let alpha = normal_quantile(theta);
    let truth = mu + sigma * alpha;
    let biased = mu / (c as f64).sqrt() + sigma * alpha;
    (biased, truth)
}
