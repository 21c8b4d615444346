//! Scaling the fitted intraday model to the daily horizon.
//!
//! Two parallel routes produce the daily (VaR, ES) pair:
//!
//! * characteristic function: the daily CF is the exact c-fold product (iid)
//!   or the MA(1) product form; the CDF comes from the Gil-Pelaez inversion
//!   integral, and quantiles from a bracketed Brent search over ten
//!   log-equispaced candidates with a bounded |F - theta| minimizer as the
//!   last fallback. ES is the mean of the quantiles at theta_j = j theta / m,
//!   j = 1..m (left-Riemann discretization of the tail integral).
//! * Monte Carlo: antithetic inverse-CDF sampling of B daily returns, with
//!   the empirical theta-quantile and the strict tail mean.
//!
//! Their equally weighted average is the ensemble estimator.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intraday_model::TailModel;
use crate::num::brent::{brent_root, golden_minimize};
use crate::num::quad::integrate;
use crate::num::student_t::{ln_cf_std, QuantileTable};
use crate::stats::{mean, mean_below};

/// Probability level and ES discretization for one risk request.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskSpec {
    /// Tail probability in (0, 0.5).
    pub theta: f64,
    /// Number of quantile nodes averaged into the ES (default 10).
    pub es_grid_size: usize,
}

impl RiskSpec {
    pub fn new(theta: f64) -> Self {
        Self {
            theta,
            es_grid_size: 10,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta < 0.5) {
            return Err(Error::InvalidInput(format!(
                "theta must lie in (0, 0.5), got {}",
                self.theta
            )));
        }
        if self.es_grid_size == 0 {
            return Err(Error::InvalidInput("es_grid_size must be positive".into()));
        }
        Ok(())
    }
}

/// Monte-Carlo sampling configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    /// Number of simulated daily returns; must be even for antithetic pairing.
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            batch_size: 100_000,
            seed: 0,
        }
    }
}

/// Which route produced a risk pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RiskMethod {
    Cf,
    Mc,
    Ensemble,
    Dh,
}

impl RiskMethod {
    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "cf" => Some(Self::Cf),
            "mc" => Some(Self::Mc),
            "ensemble" => Some(Self::Ensemble),
            "dh" => Some(Self::Dh),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Cf => "cf",
            Self::Mc => "mc",
            Self::Ensemble => "ensemble",
            Self::Dh => "dh",
        }
    }
}

/// Numerical metadata attached to a risk estimate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RiskDiagnostics {
    /// Largest adaptive-quadrature panel count across CDF evaluations.
    pub quad_intervals_max: usize,
    /// Brent restarts summed over the quantile grid.
    pub root_restarts: usize,
    /// Whether the bounded |F - theta| minimizer had to finish a root search.
    pub fallback_minimizer_used: bool,
    /// Monte-Carlo batch size (0 for the CF route).
    pub mc_batch: usize,
    pub mc_seed: u64,
    /// Set when nu < 2.5 (near-infinite variance; estimates are less stable).
    pub low_nu_warning: bool,
}

impl RiskDiagnostics {
    fn merge(a: &Self, b: &Self) -> Self {
        Self {
            quad_intervals_max: a.quad_intervals_max.max(b.quad_intervals_max),
            root_restarts: a.root_restarts + b.root_restarts,
            fallback_minimizer_used: a.fallback_minimizer_used || b.fallback_minimizer_used,
            mc_batch: a.mc_batch.max(b.mc_batch),
            mc_seed: a.mc_seed | b.mc_seed,
            low_nu_warning: a.low_nu_warning || b.low_nu_warning,
        }
    }
}

/// A daily (VaR, ES) estimate in log-return units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskPair {
    pub var: f64,
    pub es: f64,
    pub method: RiskMethod,
    pub diagnostics: RiskDiagnostics,
}

/// Characteristic function of one subordinated return (or innovation):
/// phi_HF(omega) = exp(i mu omega) psi_nu(sigma omega).
pub fn hf_char_fn(model: &TailModel) -> impl Fn(f64) -> Complex64 {
    let (mu, sigma, nu) = (model.mu, model.sigma, model.nu);
    move |omega: f64| Complex64::new(ln_cf_std(nu, sigma * omega), mu * omega).exp()
}

/// Characteristic function of the daily return.
///
/// iid: [phi_HF(omega)]^c. MA(1):
/// phi_HF(omega) phi_HF(phi omega) [phi_HF((1+phi) omega)]^{c-1}.
pub fn daily_char_fn(model: &TailModel) -> impl Fn(f64) -> Complex64 {
    let ln = daily_ln_cf(model);
    move |omega: f64| ln(omega).exp()
}

/// Log of the daily CF, split as (decay, phase). Working in logs keeps the
/// c-fold product exact far past the f64 underflow point of the factors.
fn daily_ln_cf(model: &TailModel) -> impl Fn(f64) -> Complex64 {
    let (mu, sigma, nu, c) = (model.mu, model.sigma, model.nu, model.c as f64);
    let phi = model.phi;
    move |omega: f64| match phi {
        None => Complex64::new(c * ln_cf_std(nu, sigma * omega), c * mu * omega),
        Some(p) => {
            let decay = ln_cf_std(nu, sigma * omega)
                + ln_cf_std(nu, sigma * p * omega)
                + (c - 1.0) * ln_cf_std(nu, sigma * (1.0 + p) * omega);
            let phase = mu * omega * (c * (1.0 + p));
            Complex64::new(decay, phase)
        }
    }
}

const CF_MODULUS_EPS: f64 = 1e-12;
const CDF_ABS_TOL: f64 = 1e-9;
const MAX_QUAD_INTERVALS: usize = 4000;

/// Upper integration limit: smallest power-of-two refinement where the CF
/// modulus has dropped below 1e-12; contributions beyond it are bounded by
/// eps * log-factor and ignored.
fn modulus_bound<F: Fn(f64) -> Complex64>(phi_y: &F) -> f64 {
    let mut hi = 1e-6;
    let mut steps = 0;
    while phi_y(hi).norm() >= CF_MODULUS_EPS && steps < 220 {
        hi *= 2.0;
        steps += 1;
    }
    let mut lo = hi / 2.0;
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        if phi_y(mid).norm() >= CF_MODULUS_EPS {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

fn gil_pelaez_with_bound<F: Fn(f64) -> Complex64>(
    phi_y: &F,
    x: f64,
    omega_max: f64,
) -> Result<(f64, usize)> {
    let integrand = |omega: f64| {
        if omega == 0.0 {
            return 0.0;
        }
        let z = Complex64::new(0.0, -omega * x).exp() * phi_y(omega);
        z.im / omega
    };
    let (integral, _err) = integrate(integrand, 0.0, omega_max, CDF_ABS_TOL, MAX_QUAD_INTERVALS)?;
    let f = (0.5 - integral / std::f64::consts::PI).clamp(0.0, 1.0);
    Ok((f, 0))
}

/// CDF of the law behind `phi_y` at `x`, by the Gil-Pelaez inversion formula
/// F(x) = 1/2 - (1/pi) int_0^inf Im(e^{-i omega x} phi_Y(omega) / omega) d omega.
pub fn gil_pelaez_cdf<F: Fn(f64) -> Complex64>(phi_y: F, x: f64) -> Result<f64> {
    let omega_max = modulus_bound(&phi_y);
    gil_pelaez_with_bound(&phi_y, x, omega_max).map(|(f, _)| f)
}

// Appendix-style root protocol constants.
const ROOT_X0: f64 = -1e-3;
const ROOT_LEFT: f64 = -0.2;
const ROOT_RIGHT: f64 = -1e-12;
const ROOT_TOL: f64 = 1e-8;
const ROOT_MAX_RESTARTS: usize = 10;
const FALLBACK_RESIDUAL: f64 = 1e-4;
const BRACKET_POINTS: usize = 10;
const MAX_LEFT_DOUBLINGS: usize = 4;

fn log_spaced(from_mag: f64, to_mag: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (from_mag.ln(), to_mag.ln());
    (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            -(la + t * (lb - la)).exp()
        })
        .collect()
}

struct QuantileSolver<'a> {
    cdf: &'a dyn Fn(f64) -> Result<f64>,
    /// CDF values cached at bracket candidates; shared across the theta grid.
    cache: Vec<(f64, f64)>,
    restarts: usize,
    fallback_used: bool,
}

impl<'a> QuantileSolver<'a> {
    fn new(cdf: &'a dyn Fn(f64) -> Result<f64>) -> Self {
        Self {
            cdf,
            cache: Vec::new(),
            restarts: 0,
            fallback_used: false,
        }
    }

    fn cached_cdf(&mut self, x: f64) -> Result<f64> {
        if let Some(&(_, f)) = self.cache.iter().find(|&&(cx, _)| cx == x) {
            return Ok(f);
        }
        let f = (self.cdf)(x)?;
        self.cache.push((x, f));
        Ok(f)
    }

    /// Candidate abscissae, ascending: ten log-equispaced points from the
    /// (possibly doubled) left endpoint to x0, then ten from x0 to -1e-12.
    fn candidates(doublings: usize) -> Vec<f64> {
        let left = ROOT_LEFT * (1 << doublings) as f64;
        let mut xs = log_spaced(-left, -ROOT_X0, BRACKET_POINTS);
        xs.extend(log_spaced(-ROOT_X0, -ROOT_RIGHT, BRACKET_POINTS));
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        xs
    }

    /// Innermost bracketing pair around F(x) = theta.
    fn bracket(&mut self, theta: f64) -> Result<Option<(f64, f64)>> {
        for doublings in 0..=MAX_LEFT_DOUBLINGS {
            let xs = Self::candidates(doublings);
            let mut a: Option<f64> = None;
            let mut b: Option<f64> = None;
            for &x in &xs {
                let f = self.cached_cdf(x)? - theta;
                if f < 0.0 {
                    a = Some(match a {
                        Some(cur) => cur.max(x),
                        None => x,
                    });
                } else if b.is_none() || x < b.unwrap() {
                    // CDF is monotone, so the first non-negative f gives b,
                    // but keep the min in case of tiny numeric wiggles
                    b = Some(match b {
                        Some(cur) => cur.min(x),
                        None => x,
                    });
                }
            }
            match (a, b) {
                (Some(a), Some(b)) if a < b => return Ok(Some((a, b))),
                // quantile below the left endpoint: double and retry
                (None, Some(_)) => continue,
                _ => return Ok(None),
            }
        }
        Ok(None)
    }

    fn solve(&mut self, theta: f64) -> Result<f64> {
        let bracket = self.bracket(theta)?;

        if let Some((mut a, mut b)) = bracket {
            let quad_failure = std::cell::Cell::new(None::<Error>);
            for _restart in 0..ROOT_MAX_RESTARTS {
                let f = |x: f64| match (self.cdf)(x) {
                    Ok(v) => v - theta,
                    Err(e) => {
                        if quad_failure.take().is_none() {
                            quad_failure.set(Some(e));
                        }
                        f64::NAN
                    }
                };
                let res = brent_root(&f, a, b, ROOT_TOL, 100);
                if let Some(e) = quad_failure.take() {
                    return Err(e);
                }
                if res.converged {
                    return Ok(res.root);
                }
                self.restarts += 1;
                // reuse the last iterate as one boundary and try again
                if res.f_root < 0.0 {
                    a = res.root;
                } else {
                    b = res.root;
                }
            }
        }

        // Bounded fallback: minimize |F - theta| over the widest search span.
        self.fallback_used = true;
        let left = ROOT_LEFT * (1 << MAX_LEFT_DOUBLINGS) as f64;
        let quad_failure = std::cell::Cell::new(None::<Error>);
        let objective = |x: f64| match (self.cdf)(x) {
            Ok(v) => (v - theta).abs(),
            Err(e) => {
                if quad_failure.take().is_none() {
                    quad_failure.set(Some(e));
                }
                f64::INFINITY
            }
        };
        let (x_star, residual) = golden_minimize(objective, left, ROOT_RIGHT, 1e-10, 200);
        if let Some(e) = quad_failure.take() {
            return Err(e);
        }
        if residual < FALLBACK_RESIDUAL {
            Ok(x_star)
        } else {
            Err(Error::RootSearch {
                best_residual: residual,
                x: x_star,
            })
        }
    }
}

/// Daily (VaR, ES) by characteristic-function inversion.
///
/// Solves F_Y(x) = j theta / m for j = 1..m; the quantile is the solution at
/// theta itself and the ES is the mean of all m solutions.
pub fn cf_risk_pair(model: &TailModel, spec: &RiskSpec) -> Result<RiskPair> {
    let mut pairs = cf_risk_pairs(model, std::slice::from_ref(spec))?;
    Ok(pairs.pop().expect("one spec, one pair"))
}

/// CF risk pairs for several probability levels on the same model.
///
/// Shares the integration bound, the bracket-grid CDF cache and already-solved
/// quantiles across the levels, which overlap on their theta_j grids.
pub fn cf_risk_pairs(model: &TailModel, specs: &[RiskSpec]) -> Result<Vec<RiskPair>> {
    for spec in specs {
        spec.validate()?;
    }
    let ln_cf = daily_ln_cf(model);
    let phi_y = |omega: f64| ln_cf(omega).exp();
    let omega_max = modulus_bound(&phi_y);

    let cdf = move |x: f64| gil_pelaez_with_bound(&phi_y, x, omega_max).map(|(f, _)| f);
    let mut solver = QuantileSolver::new(&cdf);
    let mut solved: Vec<(u64, f64)> = Vec::new();

    let mut out = Vec::with_capacity(specs.len());
    for spec in specs {
        let m = spec.es_grid_size;
        let mut quantiles = Vec::with_capacity(m);
        for j in 1..=m {
            let theta_j = spec.theta * j as f64 / m as f64;
            let key = theta_j.to_bits();
            let x = match solved.iter().find(|&&(k, _)| k == key) {
                Some(&(_, x)) => x,
                None => {
                    let x = solver.solve(theta_j)?;
                    solved.push((key, x));
                    x
                }
            };
            quantiles.push(x);
        }
        out.push(RiskPair {
            var: quantiles[m - 1],
            es: mean(&quantiles),
            method: RiskMethod::Cf,
            diagnostics: RiskDiagnostics {
                quad_intervals_max: 0,
                root_restarts: solver.restarts,
                fallback_minimizer_used: solver.fallback_used,
                mc_batch: 0,
                mc_seed: 0,
                low_nu_warning: model.nu < 2.5,
            },
        });
    }
    Ok(out)
}

/// Simulate `batch` daily returns from the fitted model by antithetic
/// inverse-CDF sampling (iid: sum of c draws; MA: c+1 innovations pushed
/// through the filter). Pairing each uniform u with 1-u through the t inverse
/// CDF mirrors every simulated day around its mean. `batch` must be even.
pub fn simulate_daily_returns(model: &TailModel, batch: usize, seed: u64) -> Result<Vec<f64>> {
    if batch < 2 || batch % 2 != 0 {
        return Err(Error::InvalidInput(format!(
            "mc batch size must be a positive even number, got {batch}"
        )));
    }

    let table = QuantileTable::new(model.nu);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = model.c;
    let (mu, sigma) = (model.mu, model.sigma);

    let daily_mean = match model.phi {
        None => c as f64 * mu,
        Some(p) => c as f64 * (1.0 + p) * mu,
    };

    let draw = |rng: &mut ChaCha8Rng| -> f64 {
        let u: f64 = rng.gen::<f64>().max(1e-300);
        mu + sigma * table.quantile(u)
    };

    let mut samples = Vec::with_capacity(batch);
    match model.phi {
        None => {
            for _ in 0..batch / 2 {
                let mut s = 0.0;
                for _ in 0..c {
                    s += draw(&mut rng);
                }
                samples.push(s);
                samples.push(2.0 * daily_mean - s);
            }
        }
        Some(p) => {
            for _ in 0..batch / 2 {
                let mut prev = draw(&mut rng); // xi_0
                let mut s = 0.0;
                for _ in 1..=c {
                    let cur = draw(&mut rng);
                    s += p * prev + cur;
                    prev = cur;
                }
                samples.push(s);
                samples.push(2.0 * daily_mean - s);
            }
        }
    }
    Ok(samples)
}

/// Daily (VaR, ES) by antithetic Monte Carlo: the empirical theta-quantile of
/// the simulated returns and the mean of the values strictly below it.
pub fn mc_risk_pair(model: &TailModel, spec: &RiskSpec, cfg: &McConfig) -> Result<RiskPair> {
    let mut pairs = mc_risk_pairs(model, std::slice::from_ref(spec), cfg)?;
    Ok(pairs.pop().expect("one spec, one pair"))
}

/// MC risk pairs for several probability levels from one simulated batch.
pub fn mc_risk_pairs(
    model: &TailModel,
    specs: &[RiskSpec],
    cfg: &McConfig,
) -> Result<Vec<RiskPair>> {
    for spec in specs {
        spec.validate()?;
    }
    let mut samples = simulate_daily_returns(model, cfg.batch_size, cfg.seed)?;
    samples.sort_by(f64::total_cmp);

    let mut out = Vec::with_capacity(specs.len());
    for spec in specs {
        let q_hat = crate::stats::quantile_sorted(&samples, spec.theta);
        let e_hat = mean_below(&samples, q_hat).ok_or_else(|| {
            Error::Numerical(format!(
                "no simulated returns strictly below the quantile {q_hat:.6e}; increase the batch"
            ))
        })?;
        out.push(RiskPair {
            var: q_hat,
            es: e_hat,
            method: RiskMethod::Mc,
            diagnostics: RiskDiagnostics {
                quad_intervals_max: 0,
                root_restarts: 0,
                fallback_minimizer_used: false,
                mc_batch: cfg.batch_size,
                mc_seed: cfg.seed,
                low_nu_warning: model.nu < 2.5,
            },
        });
    }
    Ok(out)
}

/// Equally weighted average of the CF and MC estimates.
pub fn ensemble_risk_pair(cf: &RiskPair, mc: &RiskPair) -> RiskPair {
    RiskPair {
        var: 0.5 * (cf.var + mc.var),
        es: 0.5 * (cf.es + mc.es),
        method: RiskMethod::Ensemble,
        diagnostics: RiskDiagnostics::merge(&cf.diagnostics, &mc.diagnostics),
    }
}
