//! Intraday return model: a-priori drift, optional MA(1) filter, Student-t MLE.
//!
//! The location of the intraday distribution is never estimated by maximum
//! likelihood; it is fixed a priori to zero or to an exponential moving
//! average of past daily returns (divided by c so the intervals aggregate to
//! the daily drift). Scale and degrees of freedom (plus the MA coefficient in
//! filtered mode) are fitted by a bounded derivative-free simplex with three
//! multi-starts. Caps: nu >= 2 + 1e-6, sigma >= 1e-6, |phi| <= 0.99.
//!
//! sigma is the t scale parameter, not the standard deviation; the implied
//! variance is sigma^2 nu / (nu - 2).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::nelder_mead::nelder_mead;
pub use crate::num::student_t::t_logpdf;
use crate::stats::{autocorrelation, mean, sample_std};
use crate::subordinator::SubordinatedSeries;

/// Floor on the degrees of freedom; the t variance exists only above 2.
pub const NU_FLOOR: f64 = 2.0 + 1e-6;
/// Cap on the degrees of freedom, effectively Gaussian beyond it.
pub const NU_CAP: f64 = 200.0;
/// Floor on the t scale parameter.
pub const SIGMA_FLOOR: f64 = 1e-6;
/// Cap on the MA(1) coefficient magnitude.
pub const PHI_CAP: f64 = 0.99;

/// A-priori drift rule for the intraday location parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "beta")]
pub enum DriftSpec {
    Zero,
    Ema(u32),
}

impl DriftSpec {
    /// Parse "zero", "ema5", "ema21", or any "ema<beta>".
    pub fn parse(text: &str) -> Option<Self> {
        if text == "zero" {
            return Some(Self::Zero);
        }
        text.strip_prefix("ema")
            .and_then(|b| b.parse::<u32>().ok())
            .filter(|&b| b >= 1)
            .map(Self::Ema)
    }

    pub fn label(&self) -> String {
        match self {
            Self::Zero => "zero".to_string(),
            Self::Ema(beta) => format!("ema{beta}"),
        }
    }
}

/// Whether subordinated returns are modelled directly or through an MA(1) filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterMode {
    Iid,
    Ma1,
}

impl FilterMode {
    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "iid" => Some(Self::Iid),
            "ma1" => Some(Self::Ma1),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Iid => "iid",
            Self::Ma1 => "ma1",
        }
    }
}

/// Fitted intraday model for one day.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailModel {
    /// Per-subordinated-interval location (fixed a priori, not estimated).
    pub mu: f64,
    /// t scale parameter.
    pub sigma: f64,
    /// Degrees of freedom.
    pub nu: f64,
    /// MA(1) coefficient; `None` in iid mode.
    pub phi: Option<f64>,
    /// Number of subordinated returns behind the fit.
    pub c: usize,
    /// Attained log-likelihood.
    pub loglik: f64,
}

impl TailModel {
    pub fn respects_caps(&self) -> bool {
        self.nu >= NU_FLOOR && self.sigma >= SIGMA_FLOOR && self.phi.is_none_or(|p| p.abs() < 1.0)
    }
}

/// Exponential moving average of daily returns, used as next-day drift.
///
/// EMA_t = (2/(beta+1)) y_{t-1} + (1 - 2/(beta+1)) EMA_{t-1}, with EMA_0 the
/// sample mean of the first `init_window` returns. The output has length
/// `len + 1`; entry t is the drift available for day t, built from data
/// through day t-1 only (entries below `init_window` look ahead through the
/// initialization and should not be consumed).
pub fn ema_drift(daily_returns: &[f64], beta: u32, init_window: usize) -> Result<Vec<f64>> {
    if daily_returns.len() <= init_window {
        return Err(Error::InsufficientHistory {
            required: init_window,
            got: daily_returns.len(),
        });
    }
    if beta < 1 {
        return Err(Error::InvalidInput("ema beta must be >= 1".into()));
    }
    let w = 2.0 / (beta as f64 + 1.0);
    let mut out = Vec::with_capacity(daily_returns.len() + 1);
    out.push(mean(&daily_returns[..init_window]));
    for t in 1..=daily_returns.len() {
        let prev = out[t - 1];
        out.push(w * daily_returns[t - 1] + (1.0 - w) * prev);
    }
    Ok(out)
}

const MIN_FIT_SAMPLE: usize = 10;

fn check_sample(returns: &SubordinatedSeries) -> Result<()> {
    if returns.c() < MIN_FIT_SAMPLE {
        return Err(Error::InvalidInput(format!(
            "need at least {MIN_FIT_SAMPLE} subordinated returns to fit, got {}",
            returns.c()
        )));
    }
    Ok(())
}

// Unconstrained <-> box transforms for the simplex.
#[inline]
fn sigma_from(a: f64) -> f64 {
    SIGMA_FLOOR + a.exp()
}
#[inline]
fn sigma_to(sigma: f64) -> f64 {
    (sigma - SIGMA_FLOOR).max(1e-12).ln()
}
#[inline]
fn nu_from(b: f64) -> f64 {
    NU_FLOOR + (NU_CAP - NU_FLOOR) / (1.0 + (-b).exp())
}
#[inline]
fn nu_to(nu: f64) -> f64 {
    let frac = ((nu - NU_FLOOR) / (NU_CAP - NU_FLOOR)).clamp(1e-9, 1.0 - 1e-9);
    (frac / (1.0 - frac)).ln()
}
#[inline]
fn phi_from(g: f64) -> f64 {
    PHI_CAP * g.tanh()
}
#[inline]
fn phi_to(phi: f64) -> f64 {
    (phi / PHI_CAP).clamp(-0.999_999, 0.999_999).atanh()
}

/// Per-observation normalizing constant of the location-scale t log density.
#[inline]
fn t_ln_norm(sigma: f64, nu: f64) -> f64 {
    use statrs::function::gamma::ln_gamma;
    const LN_PI: f64 = 1.144_729_885_849_400_2;
    ln_gamma((nu + 1.0) * 0.5) - ln_gamma(nu * 0.5) - 0.5 * (nu.ln() + LN_PI) - sigma.ln()
}

fn iid_loglik(resid: &[f64], sigma: f64, nu: f64) -> f64 {
    let norm = t_ln_norm(sigma, nu);
    let half = 0.5 * (nu + 1.0);
    let inv = 1.0 / (nu * sigma * sigma);
    resid
        .iter()
        .map(|&r| norm - half * (r * r * inv).ln_1p())
        .sum()
}

/// Innovations of the MA(1) recursion, xi_0 = 0, xi_j = y_j - phi xi_{j-1}.
fn ma1_innovations(returns: &[f64], phi: f64) -> Vec<f64> {
    let mut xi = Vec::with_capacity(returns.len());
    let mut prev = 0.0;
    for &y in returns {
        let cur = y - phi * prev;
        xi.push(cur);
        prev = cur;
    }
    xi
}

fn ma1_loglik(returns: &[f64], mu: f64, phi: f64, sigma: f64, nu: f64) -> f64 {
    let norm = t_ln_norm(sigma, nu);
    let half = 0.5 * (nu + 1.0);
    let inv = 1.0 / (nu * sigma * sigma);
    let mut prev = 0.0;
    let mut ll = 0.0;
    for &y in returns {
        let cur = y - phi * prev;
        let d = cur - mu;
        ll += norm - half * (d * d * inv).ln_1p();
        prev = cur;
    }
    ll
}

/// Maximum-likelihood fit of a location-scale t to the subordinated returns
/// with the location fixed at `mu_fixed`.
pub fn fit_iid_t(returns: &SubordinatedSeries, mu_fixed: f64) -> Result<TailModel> {
    check_sample(returns)?;
    let resid: Vec<f64> = returns.returns.iter().map(|&y| y - mu_fixed).collect();
    let c = resid.len();

    let spread = resid.iter().fold(0.0f64, |acc, &r| acc.max(r.abs()));
    if spread < 1e-300 {
        // all returns equal the fixed location: scale pins to the floor
        let loglik = iid_loglik(&resid, SIGMA_FLOOR, NU_CAP);
        return Ok(TailModel {
            mu: mu_fixed,
            sigma: SIGMA_FLOOR,
            nu: NU_CAP,
            phi: None,
            c,
            loglik,
        });
    }

    let sd = sample_std(&resid).max(SIGMA_FLOOR * 2.0);
    let mut best: Option<(f64, f64, f64, bool)> = None; // sigma, nu, loglik, converged
    for scale in [0.5, 1.0, 2.0] {
        let x0 = [sigma_to(sd * scale), nu_to(4.0)];
        let run = |start: &[f64]| {
            nelder_mead(
                |x| -iid_loglik(&resid, sigma_from(x[0]), nu_from(x[1])),
                start,
                &[0.5, 0.5],
                1e-10,
                1e-8,
                2000,
            )
        };
        let first = run(&x0);
        let refined = run(&first.x);
        let cand = (
            sigma_from(refined.x[0]),
            nu_from(refined.x[1]),
            -refined.f,
            first.converged || refined.converged,
        );
        if best.as_ref().is_none_or(|b| cand.2 > b.2) {
            best = Some(cand);
        }
    }
    let (sigma, nu, loglik, converged) = best.expect("three starts always run");
    if !converged {
        return Err(Error::FitNonConvergence {
            starts: 3,
            sigma,
            nu,
            phi: None,
            loglik,
        });
    }
    Ok(TailModel {
        mu: mu_fixed,
        sigma,
        nu,
        phi: None,
        c,
        loglik,
    })
}

/// Conditional MLE of the MA(1)-filtered t model: Y_j = phi xi_{j-1} + xi_j,
/// xi_j iid t(mu_fixed, sigma, nu), xi_0 = 0.
pub fn fit_ma1_t(returns: &SubordinatedSeries, mu_fixed: f64) -> Result<TailModel> {
    check_sample(returns)?;
    let y = &returns.returns;
    let c = y.len();

    let spread = y
        .iter()
        .map(|&v| v - y[0])
        .fold(0.0f64, |acc, r| acc.max(r.abs()));
    if spread < 1e-300 && (y[0] - mu_fixed).abs() < 1e-300 {
        // constant returns at the location: phi unidentified, scale at the floor
        let loglik = ma1_loglik(y, mu_fixed, 0.0, SIGMA_FLOOR, NU_CAP);
        return Ok(TailModel {
            mu: mu_fixed,
            sigma: SIGMA_FLOOR,
            nu: NU_CAP,
            phi: Some(0.0),
            c,
            loglik,
        });
    }

    let centered: Vec<f64> = y.iter().map(|&v| v - mu_fixed).collect();
    let phi_seed = autocorrelation(&centered, 1).clamp(-0.9, 0.9);
    let sd = sample_std(&centered).max(SIGMA_FLOOR * 2.0);

    let mut best: Option<(f64, f64, f64, f64, bool)> = None; // phi, sigma, nu, loglik, conv
    for scale in [0.5, 1.0, 2.0] {
        let x0 = [phi_to(phi_seed), sigma_to(sd * scale), nu_to(4.0)];
        let run = |start: &[f64]| {
            nelder_mead(
                |x| -ma1_loglik(y, mu_fixed, phi_from(x[0]), sigma_from(x[1]), nu_from(x[2])),
                start,
                &[0.2, 0.5, 0.5],
                1e-10,
                1e-8,
                4000,
            )
        };
        let first = run(&x0);
        let refined = run(&first.x);
        let cand = (
            phi_from(refined.x[0]),
            sigma_from(refined.x[1]),
            nu_from(refined.x[2]),
            -refined.f,
            first.converged || refined.converged,
        );
        if best.as_ref().is_none_or(|b| cand.3 > b.3) {
            best = Some(cand);
        }
    }
    let (phi, sigma, nu, loglik, converged) = best.expect("three starts always run");
    if !converged {
        return Err(Error::FitNonConvergence {
            starts: 3,
            sigma,
            nu,
            phi: Some(phi),
            loglik,
        });
    }
    Ok(TailModel {
        mu: mu_fixed,
        sigma,
        nu,
        phi: Some(phi),
        c,
        loglik,
    })
}

/// Reconstructed innovations for a fitted MA model (diagnostic helper).
pub fn innovations(model: &TailModel, returns: &SubordinatedSeries) -> Vec<f64> {
    match model.phi {
        Some(phi) => ma1_innovations(&returns.returns, phi),
        None => returns.returns.clone(),
    }
}
