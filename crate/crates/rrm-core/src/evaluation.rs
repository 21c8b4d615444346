//! Scoring realized risk measures.
//!
//! In-sample: hits frequency and the Acerbi-Szekely Z1/Z2 bootstrap tests (the
//! Z statistics target 1 under a correctly specified (VaR, ES) pair; p-values
//! come from an iid resampling bootstrap of day-level triples, centered at the
//! target, one-sided against ES underestimation). Out-of-sample: AR(1), EMA
//! and random-walk forecasters over block rolling windows, scored with the
//! pinball and joint (VaR, ES) losses. Ground-truth distance is plain rMSE.

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{mean, ols, rmse};

/// Trading days per calendar year, used for fold spans and initialization.
pub const DAYS_PER_YEAR: usize = 252;

/// Daily observations with their realized risk estimates at one level theta.
#[derive(Debug, Clone, PartialEq)]
pub struct RealizedPanel {
    pub dates: Vec<NaiveDate>,
    /// Realized daily log returns.
    pub y: Vec<f64>,
    /// Realized VaR estimates.
    pub q_hat: Vec<f64>,
    /// Realized ES estimates.
    pub e_hat: Vec<f64>,
    pub theta: f64,
}

impl RealizedPanel {
    pub fn new(
        dates: Vec<NaiveDate>,
        y: Vec<f64>,
        q_hat: Vec<f64>,
        e_hat: Vec<f64>,
        theta: f64,
    ) -> Result<Self> {
        let n = dates.len();
        if n == 0 || y.len() != n || q_hat.len() != n || e_hat.len() != n {
            return Err(Error::InvalidInput(
                "panel columns must be non-empty and of equal length".into(),
            ));
        }
        if let Some(i) = (0..n).find(|&i| e_hat[i] > q_hat[i]) {
            return Err(Error::InvalidInput(format!(
                "ES must not exceed VaR: day {} has e={} q={}",
                dates[i], e_hat[i], q_hat[i]
            )));
        }
        Ok(Self {
            dates,
            y,
            q_hat,
            e_hat,
            theta,
        })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }
}

/// Pinball (quantile) loss: (y - q)(theta - 1{y <= q}). Non-negative, zero
/// exactly at y = q.
pub fn pinball_loss(q_hat: f64, y: f64, theta: f64) -> f64 {
    let indicator = if y <= q_hat { 1.0 } else { 0.0 };
    (y - q_hat) * (theta - indicator)
}

/// Strictly consistent joint (VaR, ES) loss:
/// q/e - (q - y) 1{y <= q} / (theta e) + ln(-e). Requires e < 0.
pub fn joint_loss(q_hat: f64, e_hat: f64, y: f64, theta: f64) -> Result<f64> {
    if !(e_hat < 0.0) {
        return Err(Error::InvalidInput(format!(
            "joint loss needs a negative ES estimate, got {e_hat}"
        )));
    }
    let indicator = if y <= q_hat { 1.0 } else { 0.0 };
    Ok(q_hat / e_hat - (q_hat - y) * indicator / (theta * e_hat) + (-e_hat).ln())
}

/// Fraction of days whose return fell at or below the VaR estimate.
pub fn hits_frequency(panel: &RealizedPanel) -> f64 {
    let hits = panel
        .y
        .iter()
        .zip(&panel.q_hat)
        .filter(|&(&y, &q)| y <= q)
        .count();
    hits as f64 / panel.len() as f64
}

/// Acerbi-Szekely bootstrap test outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsTestResult {
    /// Observed mean of Z1 = y/e over hit days; `None` without hits.
    pub z1: Option<f64>,
    /// Observed mean of Z2 = y 1{y <= q} / (theta e) over all days.
    pub z2: f64,
    /// One-sided bootstrap p-value for Z1 (missing when AS1 is undefined).
    pub as1_p: Option<f64>,
    /// One-sided bootstrap p-value for Z2.
    pub as2_p: f64,
    pub n_boot: usize,
}

fn z_statistics(y: &[f64], q: &[f64], e: &[f64], theta: f64) -> (Option<f64>, f64) {
    let n = y.len();
    let mut z1_sum = 0.0;
    let mut hits = 0usize;
    let mut z2_sum = 0.0;
    for i in 0..n {
        if y[i] <= q[i] {
            z1_sum += y[i] / e[i];
            hits += 1;
            z2_sum += y[i] / (theta * e[i]);
        }
    }
    let z1 = (hits > 0).then(|| z1_sum / hits as f64);
    (z1, z2_sum / n as f64)
}

/// One-sided shifted-bootstrap p-value with midrank tie handling.
///
/// The bootstrap distribution of the statistic is recentered at the target
/// value 1; the p-value is the share of recentered replicates at or beyond
/// the observed statistic (ties at half weight). Large statistics mean the
/// tail mean was underestimated in magnitude.
fn bootstrap_p(observed: f64, replicates: &[f64]) -> f64 {
    if replicates.is_empty() {
        return f64::NAN;
    }
    let mut beyond = 0.0;
    for &r in replicates {
        let centered = r - observed + 1.0;
        if centered > observed {
            beyond += 1.0;
        } else if centered == observed {
            beyond += 0.5;
        }
    }
    beyond / replicates.len() as f64
}

/// Z1/Z2 bootstrap tests on a realized panel.
///
/// Day-level triples (y, q, e) are resampled with replacement `n_boot` times;
/// replicates with no hits are skipped for AS1.
pub fn as_tests(panel: &RealizedPanel, n_boot: usize, seed: u64) -> Result<AsTestResult> {
    if panel.is_empty() {
        return Err(Error::InvalidInput("panel must be non-empty".into()));
    }
    if panel.e_hat.iter().any(|&e| e >= 0.0) {
        return Err(Error::InvalidInput(
            "AS statistics need strictly negative ES estimates".into(),
        ));
    }
    let n = panel.len();
    let (z1_obs, z2_obs) = z_statistics(&panel.y, &panel.q_hat, &panel.e_hat, panel.theta);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z1_reps = Vec::with_capacity(n_boot);
    let mut z2_reps = Vec::with_capacity(n_boot);
    let mut idx = vec![0usize; n];
    for _ in 0..n_boot {
        for slot in idx.iter_mut() {
            *slot = rng.gen_range(0..n);
        }
        let mut z1_sum = 0.0;
        let mut hits = 0usize;
        let mut z2_sum = 0.0;
        for &i in &idx {
            if panel.y[i] <= panel.q_hat[i] {
                z1_sum += panel.y[i] / panel.e_hat[i];
                hits += 1;
                z2_sum += panel.y[i] / (panel.theta * panel.e_hat[i]);
            }
        }
        if hits > 0 {
            z1_reps.push(z1_sum / hits as f64);
        }
        z2_reps.push(z2_sum / n as f64);
    }

    let as1_p = z1_obs.map(|obs| bootstrap_p(obs, &z1_reps));
    let as2_p = bootstrap_p(z2_obs, &z2_reps);

    Ok(AsTestResult {
        z1: z1_obs,
        z2: z2_obs,
        as1_p,
        as2_p,
        n_boot,
    })
}

/// Root mean squared error between estimates and ground truth.
pub fn rmse_vs_truth(estimates: &[f64], truth: &[f64]) -> f64 {
    rmse(estimates, truth)
}

/// Interchangeable one-step-ahead forecaster for a realized risk series.
pub trait Forecaster: Send + Sync {
    /// Registry name, as used by configuration and the CLI.
    fn name(&self) -> &'static str;

    /// One-step-ahead forecasts for `series[train_len..]`, each built from
    /// observations strictly before the forecast index. Model parameters (if
    /// any) are fitted on `series[..train_len]` only.
    fn one_step_forecasts(&self, series: &[f64], train_len: usize) -> Result<Vec<f64>>;
}

/// AR(1) fitted by ordinary least squares with intercept on the train block.
pub struct Ar1Forecaster;

impl Forecaster for Ar1Forecaster {
    fn name(&self) -> &'static str {
        "ar1"
    }

    fn one_step_forecasts(&self, series: &[f64], train_len: usize) -> Result<Vec<f64>> {
        if train_len < 3 || train_len > series.len() {
            return Err(Error::InsufficientHistory {
                required: 3,
                got: train_len.min(series.len()),
            });
        }
        let x = &series[..train_len - 1];
        let y = &series[1..train_len];
        let (a, b, _) = ols(x, y);
        Ok((train_len..series.len())
            .map(|t| a + b * series[t - 1])
            .collect())
    }
}

/// Exponential moving average with persistence weight alpha on the running
/// mean; initialized on the first year of the train block.
pub struct EmaForecaster {
    pub alpha: f64,
}

impl Forecaster for EmaForecaster {
    fn name(&self) -> &'static str {
        "ema"
    }

    fn one_step_forecasts(&self, series: &[f64], train_len: usize) -> Result<Vec<f64>> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidInput(format!(
                "ema alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if train_len < 1 || train_len > series.len() {
            return Err(Error::InsufficientHistory {
                required: 1,
                got: train_len.min(series.len()),
            });
        }
        let init_len = train_len.min(DAYS_PER_YEAR);
        let mut ema = mean(&series[..init_len]);
        for &v in &series[init_len..train_len] {
            ema = (1.0 - self.alpha) * v + self.alpha * ema;
        }
        let mut out = Vec::with_capacity(series.len() - train_len);
        for t in train_len..series.len() {
            out.push(ema);
            ema = (1.0 - self.alpha) * series[t] + self.alpha * ema;
        }
        Ok(out)
    }
}

/// Random walk: the forecast is yesterday's realized value.
pub struct RwForecaster;

impl Forecaster for RwForecaster {
    fn name(&self) -> &'static str {
        "rw"
    }

    fn one_step_forecasts(&self, series: &[f64], train_len: usize) -> Result<Vec<f64>> {
        if train_len < 1 || train_len > series.len() {
            return Err(Error::InsufficientHistory {
                required: 1,
                got: train_len.min(series.len()),
            });
        }
        Ok(series[train_len - 1..series.len() - 1].to_vec())
    }
}

/// Kind tag for the forecaster registry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ForecasterKind {
    Ar1,
    Ema,
    Rw,
}

impl ForecasterKind {
    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "ar1" => Some(Self::Ar1),
            "ema" => Some(Self::Ema),
            "rw" => Some(Self::Rw),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Ar1 => "ar1",
            Self::Ema => "ema",
            Self::Rw => "rw",
        }
    }
}

/// Out-of-sample evaluation configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForecasterSpec {
    pub kind: ForecasterKind,
    /// EMA persistence weight (ignored by the other forecasters).
    pub alpha: f64,
    pub train_years: usize,
    pub test_years: usize,
}

impl Default for ForecasterSpec {
    fn default() -> Self {
        Self {
            kind: ForecasterKind::Ar1,
            alpha: 0.9,
            train_years: 5,
            test_years: 1,
        }
    }
}

impl ForecasterSpec {
    pub fn instance(&self) -> Box<dyn Forecaster> {
        match self.kind {
            ForecasterKind::Ar1 => Box::new(Ar1Forecaster),
            ForecasterKind::Ema => Box::new(EmaForecaster { alpha: self.alpha }),
            ForecasterKind::Rw => Box::new(RwForecaster),
        }
    }
}

/// Aggregated evaluation results for one rolling fold (or one in-sample year).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BacktestReport {
    /// Day-index span [start, end) of the scored fold.
    pub span: (usize, usize),
    pub hits_freq: Option<f64>,
    pub as1_p: Option<f64>,
    pub as2_p: Option<f64>,
    pub pinball_mean: Option<f64>,
    pub joint_mean: Option<f64>,
    pub forecaster: Option<ForecasterKind>,
}

/// Rolling out-of-sample forecast evaluation.
///
/// Blocks of `train_years` + `test_years` calendar years (252 trading days
/// each) roll forward by the test length. Per block, one-step-ahead forecasts
/// of the realized VaR and ES series are scored against the realized daily
/// returns with the pinball and joint losses.
pub fn rolling_forecast_eval(
    panel: &RealizedPanel,
    spec: &ForecasterSpec,
) -> Result<Vec<BacktestReport>> {
    let train = spec.train_years * DAYS_PER_YEAR;
    let test = spec.test_years * DAYS_PER_YEAR;
    if train == 0 || test == 0 {
        return Err(Error::InvalidInput(
            "train and test windows must be at least one year".into(),
        ));
    }
    if panel.len() < train + test {
        return Err(Error::InsufficientHistory {
            required: train + test,
            got: panel.len(),
        });
    }

    let forecaster = spec.instance();
    let mut reports = Vec::new();
    let mut start = 0usize;
    while start + train + test <= panel.len() {
        let block_end = start + train + test;
        let q_block = &panel.q_hat[start..block_end];
        let e_block = &panel.e_hat[start..block_end];
        let y_test = &panel.y[start + train..block_end];

        let q_fc = forecaster.one_step_forecasts(q_block, train)?;
        let e_fc = forecaster.one_step_forecasts(e_block, train)?;

        let mut pinball = Vec::with_capacity(test);
        let mut joint = Vec::with_capacity(test);
        for i in 0..test {
            pinball.push(pinball_loss(q_fc[i], y_test[i], panel.theta));
            joint.push(joint_loss(q_fc[i], e_fc[i], y_test[i], panel.theta)?);
        }

        reports.push(BacktestReport {
            span: (start + train, block_end),
            hits_freq: None,
            as1_p: None,
            as2_p: None,
            pinball_mean: Some(mean(&pinball)),
            joint_mean: Some(mean(&joint)),
            forecaster: Some(spec.kind),
        });
        start += test;
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand_distr::{Distribution, StandardNormal};

    fn dates(n: usize) -> Vec<NaiveDate> {
        let start = NaiveDate::from_ymd_opt(2010, 1, 1).unwrap();
        (0..n).map(|i| start + chrono::Days::new(i as u64)).collect()
    }

    fn gaussian_panel(n: usize, theta: f64, seed: u64) -> RealizedPanel {
        // correctly specified: y ~ N(0,1), q and e the true constants
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let alpha = crate::num::student_t::normal_quantile(theta);
        let es = -crate::num::student_t::normal_pdf(alpha) / theta;
        RealizedPanel::new(dates(n), y, vec![alpha; n], vec![es; n], theta).unwrap()
    }

    #[test]
    fn pinball_loss_examples() {
        assert_relative_eq!(pinball_loss(-1.0, -1.0, 0.05), 0.0);
        assert_relative_eq!(pinball_loss(-1.0, -2.0, 0.05), 0.95, epsilon = 1e-12);
        assert_relative_eq!(pinball_loss(0.0, 1.0, 0.05), 0.05, epsilon = 1e-12);
        // non-negative, zero iff exact hit
        for &(q, y) in &[(0.3, -0.5), (-0.2, 0.9), (0.0, 0.0)] {
            let l = pinball_loss(q, y, 0.05);
            assert!(l >= 0.0);
            assert_eq!(l == 0.0, y == q);
        }
    }

    #[test]
    fn joint_loss_examples() {
        // hit: q=-1, e=-2, y=-3, theta=0.05
        let l = joint_loss(-1.0, -2.0, -3.0, 0.05).unwrap();
        assert_relative_eq!(l, 0.5 + 20.0 + 2.0f64.ln(), epsilon = 1e-12);
        // no hit: indicator drops the middle term
        let l = joint_loss(-1.0, -2.0, 0.0, 0.05).unwrap();
        assert_relative_eq!(l, 0.5 + 2.0f64.ln(), epsilon = 1e-12);
        // domain error
        assert!(joint_loss(-1.0, 0.0, 0.0, 0.05).is_err());
        assert!(joint_loss(-1.0, 0.5, 0.0, 0.05).is_err());
    }

    #[test]
    fn empirical_quantile_minimizes_mean_pinball_loss() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let sample: Vec<f64> = (0..400).map(|_| StandardNormal.sample(&mut rng)).collect();
        let theta = 0.1;
        let mut sorted = sample.clone();
        sorted.sort_by(f64::total_cmp);
        let q_emp = crate::stats::quantile_sorted(&sorted, theta);
        let loss_at = |q: f64| mean(&sample.iter().map(|&y| pinball_loss(q, y, theta)).collect::<Vec<_>>());
        let base = loss_at(q_emp);
        // grid search around the empirical quantile cannot do better
        for k in -40..=40 {
            let q = q_emp + k as f64 * 0.05;
            assert!(loss_at(q) >= base - 1e-12, "beaten at {q}");
        }
    }

    #[test]
    fn joint_loss_grid_minimizer_matches_analytic_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(91);
        let sample: Vec<f64> = (0..60_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let theta = 0.05;
        let alpha = crate::num::student_t::normal_quantile(theta);
        let es_true = -crate::num::student_t::normal_pdf(alpha) / theta;

        let mean_loss = |q: f64, e: f64| {
            mean(
                &sample
                    .iter()
                    .map(|&y| joint_loss(q, e, y, theta).unwrap())
                    .collect::<Vec<_>>(),
            )
        };
        // coarse grid around the analytic pair
        let mut best = (f64::INFINITY, 0.0, 0.0);
        for qi in -8..=8 {
            for ei in -8..=8 {
                let q = alpha + qi as f64 * 0.05;
                let e = es_true + ei as f64 * 0.05;
                if e < q && e < 0.0 {
                    let l = mean_loss(q, e);
                    if l < best.0 {
                        best = (l, q, e);
                    }
                }
            }
        }
        assert!((best.1 - alpha).abs() <= 0.1, "q* = {}", best.1);
        assert!((best.2 - es_true).abs() <= 0.1, "e* = {}", best.2);
    }

    #[test]
    fn joint_loss_sample_mean_matches_population_value_at_the_analytic_pair() {
        // For standard normal returns at the analytic (VaR, ES) the expected
        // joint loss is 1 + ln(phi(alpha)/theta).
        let theta = 0.05;
        let alpha = crate::num::student_t::normal_quantile(theta);
        let es = -crate::num::student_t::normal_pdf(alpha) / theta;
        let expected = 1.0 + (crate::num::student_t::normal_pdf(alpha) / theta).ln();

        let mut rng = ChaCha8Rng::seed_from_u64(2718);
        let losses: Vec<f64> = (0..100_000)
            .map(|_| {
                let y: f64 = StandardNormal.sample(&mut rng);
                joint_loss(alpha, es, y, theta).unwrap()
            })
            .collect();
        let m = mean(&losses);
        let se = (crate::stats::sample_variance(&losses) / losses.len() as f64).sqrt();
        assert!(
            (m - expected).abs() < 3.0 * se,
            "mean {m} vs {expected} (se {se})"
        );
    }

    #[test]
    fn hits_frequency_saturates() {
        let n = 100;
        let y = vec![0.0; n];
        let p_all = RealizedPanel::new(dates(n), y.clone(), vec![1e9; n], vec![1e9 - 1.0; n], 0.05);
        // e <= q holds; every y <= q
        assert_relative_eq!(hits_frequency(&p_all.unwrap()), 1.0);
        let p_none =
            RealizedPanel::new(dates(n), y, vec![-1e9; n], vec![-1e9 - 1.0; n], 0.05).unwrap();
        assert_relative_eq!(hits_frequency(&p_none), 0.0);
    }

    #[test]
    fn hits_frequency_is_calibrated_for_correct_specification() {
        let theta = 0.05;
        let n = 2520;
        let panel = gaussian_panel(n, theta, 1234);
        let freq = hits_frequency(&panel);
        let band = 3.0 * (theta * (1.0 - theta) / n as f64).sqrt();
        assert!((freq - theta).abs() < band, "freq {freq}, band {band}");
    }

    #[test]
    fn as_tests_null_saturation() {
        // every hit exactly at the ES estimate -> Z1 = 1, p ~ 0.5 (midrank ties)
        let n = 200;
        let mut y = vec![1.0; n];
        for i in 0..10 {
            y[i * 20] = -2.0; // exact hits
        }
        let q = vec![-1.0; n];
        let e = vec![-2.0; n];
        let panel = RealizedPanel::new(dates(n), y, q, e, 0.05).unwrap();
        let res = as_tests(&panel, 500, 9).unwrap();
        assert_relative_eq!(res.z1.unwrap(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(res.as1_p.unwrap(), 0.5, epsilon = 1e-9);
    }

    #[test]
    fn as_tests_reject_underestimated_es() {
        // halve the ES magnitude: strong one-sided rejection expected
        let theta = 0.05;
        let n = 2520;
        let mut panel = gaussian_panel(n, theta, 777);
        for e in panel.e_hat.iter_mut() {
            *e *= 0.5;
        }
        // q unchanged so e > q now on some days? es/2 > q (less negative) -> fix q too
        let panel = RealizedPanel::new(
            panel.dates.clone(),
            panel.y.clone(),
            panel.e_hat.clone(), // use shrunken e as q to keep e <= q
            panel.e_hat.clone(),
            theta,
        )
        .unwrap();
        let res = as_tests(&panel, 1000, 5).unwrap();
        assert!(res.z1.unwrap() > 1.0);
        assert!(res.as1_p.unwrap() < 0.05, "as1_p = {:?}", res.as1_p);
        assert!(res.as2_p < 0.05, "as2_p = {}", res.as2_p);
    }

    #[test]
    fn as_tests_zero_hits_reports_missing_as1() {
        let n = 50;
        let panel = RealizedPanel::new(
            dates(n),
            vec![1.0; n],
            vec![-1.0; n],
            vec![-2.0; n],
            0.05,
        )
        .unwrap();
        let res = as_tests(&panel, 200, 3).unwrap();
        assert!(res.z1.is_none());
        assert!(res.as1_p.is_none());
    }

    #[test]
    fn as_p_values_are_scale_invariant() {
        let theta = 0.05;
        let base = gaussian_panel(1260, theta, 31);
        let k = 37.5;
        let scaled = RealizedPanel::new(
            base.dates.clone(),
            base.y.iter().map(|&v| k * v).collect(),
            base.q_hat.iter().map(|&v| k * v).collect(),
            base.e_hat.iter().map(|&v| k * v).collect(),
            theta,
        )
        .unwrap();
        let a = as_tests(&base, 400, 11).unwrap();
        let b = as_tests(&scaled, 400, 11).unwrap();
        assert_relative_eq!(a.as1_p.unwrap(), b.as1_p.unwrap(), epsilon = 1e-12);
        assert_relative_eq!(a.as2_p, b.as2_p, epsilon = 1e-12);
    }

    #[test]
    fn rmse_examples() {
        assert_relative_eq!(rmse_vs_truth(&[1.0, 2.0], &[1.0, 2.0]), 0.0);
        assert_relative_eq!(
            rmse_vs_truth(&[1.001, 2.001], &[1.0, 2.0]),
            0.001,
            epsilon = 1e-12
        );
        assert_relative_eq!(rmse_vs_truth(&[1.0, -1.0], &[0.0, 0.0]), 1.0);
    }

    #[test]
    fn rw_forecasts_lag_the_series() {
        let series: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let fc = RwForecaster.one_step_forecasts(&series, 4).unwrap();
        assert_eq!(fc, vec![3.0, 4.0, 5.0, 6.0, 7.0, 8.0]);
    }

    #[test]
    fn rw_on_constant_series_is_the_constant_predictor() {
        let series = vec![-0.02; 600];
        let fc = RwForecaster.one_step_forecasts(&series, 300).unwrap();
        assert!(fc.iter().all(|&f| f == -0.02));
    }

    #[test]
    fn ar1_recovers_generating_coefficients() {
        // exact AR(1) with known (a, b), n = 1260; slope SE ~ sqrt((1-b^2)/n)
        let (a_true, b_true) = (0.005, 0.95);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut x = 0.1;
        let series: Vec<f64> = (0..1260)
            .map(|_| {
                let eps: f64 = StandardNormal.sample(&mut rng);
                x = a_true + b_true * x + 0.05 * eps;
                x
            })
            .collect();
        let (a, b, _) = ols(&series[..series.len() - 1], &series[1..]);
        assert!((a - a_true).abs() < 0.02, "a = {a}");
        assert!((b - b_true).abs() < 0.02, "b = {b}");

        // forecaster wires the same fit (parameters from the train block only)
        let fc = Ar1Forecaster.one_step_forecasts(&series, 1000).unwrap();
        assert_eq!(fc.len(), 260);
        let (a_tr, b_tr, _) = ols(&series[..999], &series[1..1000]);
        assert_relative_eq!(fc[0], a_tr + b_tr * series[999], epsilon = 1e-12);
        assert_relative_eq!(fc[259], a_tr + b_tr * series[1258], epsilon = 1e-12);
    }

    #[test]
    fn ema_forecaster_hand_recursion() {
        // series (1, 0, 0, ...), alpha = 0.9, train_len = 1:
        // forecasts 1, then 0.1*0 + 0.9*1 = 0.9, then 0.81, ...
        let mut series = vec![0.0; 8];
        series[0] = 1.0;
        let fc = EmaForecaster { alpha: 0.9 }
            .one_step_forecasts(&series, 1)
            .unwrap();
        assert_relative_eq!(fc[0], 1.0, epsilon = 1e-15);
        assert_relative_eq!(fc[1], 0.9, epsilon = 1e-15);
        assert_relative_eq!(fc[2], 0.81, epsilon = 1e-15);
    }

    #[test]
    fn rolling_eval_produces_one_report_per_block() {
        let theta = 0.05;
        let n = 7 * DAYS_PER_YEAR; // 5 train + 1 test rolls twice
        let panel = gaussian_panel(n, theta, 42);
        let reports = rolling_forecast_eval(&panel, &ForecasterSpec::default()).unwrap();
        assert_eq!(reports.len(), 2);
        for r in &reports {
            assert!(r.pinball_mean.unwrap() > 0.0);
            assert!(r.joint_mean.unwrap().is_finite());
            assert_eq!(r.forecaster, Some(ForecasterKind::Ar1));
        }
        assert_eq!(reports[0].span, (5 * DAYS_PER_YEAR, 6 * DAYS_PER_YEAR));
        assert_eq!(reports[1].span, (6 * DAYS_PER_YEAR, 7 * DAYS_PER_YEAR));
    }

    #[test]
    fn rolling_eval_rejects_short_panels() {
        let panel = gaussian_panel(100, 0.05, 1);
        assert!(matches!(
            rolling_forecast_eval(&panel, &ForecasterSpec::default()),
            Err(Error::InsufficientHistory { .. })
        ));
    }

    #[test]
    fn panel_validation_rejects_es_above_var() {
        let err = RealizedPanel::new(dates(2), vec![0.0; 2], vec![-1.0; 2], vec![-0.5; 2], 0.05);
        assert!(err.is_err());
    }
}
