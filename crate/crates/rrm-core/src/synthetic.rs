//! Synthetic subordinated-return panels with known daily ground truth.
//!
//! Panels replicate the subordinated returns directly (no subordinator is
//! involved), drawn Gaussian or Student-t, iid or MA(1). For Gaussian
//! generators the daily return is still normal with mean c(1+phi)mu and
//! variance [(c-1)(1+phi)^2 + (1+phi^2)] sigma^2, so VaR/ES come in closed
//! form; for Student-t generators a brute-force Monte-Carlo oracle on an
//! independent RNG stream supplies the truth with batch-means standard errors.

use chrono::NaiveDate;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::student_t::{normal_pdf, normal_quantile};
use crate::seed::task_seed;
use crate::stats::{mean_at_or_below, quantile_select};
use crate::subordinator::SubordinatedSeries;

/// Distribution family of the generated intraday observations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Gaussian,
    StudentT,
}

impl Family {
    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "gaussian" => Some(Self::Gaussian),
            "student-t" | "studentt" | "t" => Some(Self::StudentT),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Gaussian => "gaussian",
            Self::StudentT => "student-t",
        }
    }
}

/// Dependence structure of the generated returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dependence {
    Iid,
    Ma1,
}

impl Dependence {
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

/// Data-generating process specification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub family: Family,
    pub dependence: Dependence,
    pub c: usize,
    /// MA(1) coefficient (used in Ma1 mode).
    pub phi: f64,
    /// Per-interval location.
    pub mu: f64,
    /// Per-interval scale.
    pub sigma: f64,
    /// Degrees of freedom (StudentT family only).
    pub nu: f64,
    pub n_days: usize,
    pub seed: u64,
}

impl GeneratorSpec {
    /// Ten-year default panel mirroring the typical fitted magnitudes:
    /// phi = -0.05, nu = 3, daily variance held constant across c
    /// (sigma ~ 1/sqrt(c), mu ~ 1/c).
    pub fn default_for(family: Family, dependence: Dependence, c: usize, seed: u64) -> Self {
        let base = 39.0 / c as f64;
        Self {
            family,
            dependence,
            c,
            phi: -0.05,
            mu: 1e-5 * base,
            sigma: 3e-3 * base.sqrt(),
            nu: 3.0,
            n_days: 2520,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.c < 1 {
            return Err(Error::InvalidInput("c must be at least 1".into()));
        }
        if self.n_days < 1 {
            return Err(Error::InvalidInput("n_days must be at least 1".into()));
        }
        if !(self.sigma > 0.0) {
            return Err(Error::InvalidInput("sigma must be positive".into()));
        }
        if self.family == Family::StudentT && !(self.nu > 2.0) {
            return Err(Error::InvalidInput("nu must exceed 2".into()));
        }
        if self.dependence == Dependence::Ma1 && self.phi.abs() >= 1.0 {
            return Err(Error::InvalidInput("|phi| must be below 1".into()));
        }
        Ok(())
    }

    /// Effective MA coefficient entering the daily moments (0 in iid mode).
    pub fn phi_effective(&self) -> f64 {
        match self.dependence {
            Dependence::Iid => 0.0,
            Dependence::Ma1 => self.phi,
        }
    }

    /// Daily mean c (1 + phi) mu.
    pub fn daily_mean(&self) -> f64 {
        let p = self.phi_effective();
        self.c as f64 * (1.0 + p) * self.mu
    }

    /// Daily variance [(c-1)(1+phi)^2 + (1+phi^2)] sigma_marginal^2 where
    /// sigma_marginal^2 is the variance of one innovation.
    pub fn daily_variance(&self) -> f64 {
        let p = self.phi_effective();
        let innov_var = match self.family {
            Family::Gaussian => self.sigma * self.sigma,
            Family::StudentT => self.sigma * self.sigma * self.nu / (self.nu - 2.0),
        };
        let c = self.c as f64;
        ((c - 1.0) * (1.0 + p) * (1.0 + p) + (1.0 + p * p)) * innov_var
    }
}

/// A generated panel of subordinated-return days with synthetic dates.
#[derive(Debug, Clone)]
pub struct SyntheticPanel {
    pub spec: GeneratorSpec,
    pub dates: Vec<NaiveDate>,
    pub days: Vec<SubordinatedSeries>,
}

impl SyntheticPanel {
    pub fn daily_returns(&self) -> Vec<f64> {
        self.days.iter().map(|d| d.daily_return()).collect()
    }
}

fn draw_innovation(spec: &GeneratorSpec, rng: &mut ChaCha8Rng) -> f64 {
    match spec.family {
        Family::Gaussian => {
            let z: f64 = StandardNormal.sample(rng);
            spec.mu + spec.sigma * z
        }
        Family::StudentT => {
            let t: f64 = StudentT::new(spec.nu).expect("validated nu").sample(rng);
            spec.mu + spec.sigma * t
        }
    }
}

/// Generate the panel: n_days independent days of c returns each, with
/// per-day seeds derived from the base seed so day order never matters.
pub fn generate(spec: &GeneratorSpec) -> Result<SyntheticPanel> {
    spec.validate()?;
    let start = NaiveDate::from_ymd_opt(2015, 1, 1).expect("valid date");
    let days: Vec<SubordinatedSeries> = (0..spec.n_days)
        .into_par_iter()
        .map(|d| {
            let mut rng = ChaCha8Rng::seed_from_u64(task_seed(spec.seed, d as u64));
            let returns = match spec.dependence {
                Dependence::Iid => (0..spec.c).map(|_| draw_innovation(spec, &mut rng)).collect(),
                Dependence::Ma1 => {
                    let mut prev = draw_innovation(spec, &mut rng); // xi_0
                    (0..spec.c)
                        .map(|_| {
                            let cur = draw_innovation(spec, &mut rng);
                            let y = spec.phi * prev + cur;
                            prev = cur;
                            y
                        })
                        .collect()
                }
            };
            SubordinatedSeries::from_returns(returns)
        })
        .collect();
    let dates = (0..spec.n_days)
        .map(|d| start + chrono::Days::new(d as u64))
        .collect();
    Ok(SyntheticPanel {
        spec: *spec,
        dates,
        days,
    })
}

/// How a ground-truth value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TruthMethod {
    Analytic,
    McOracle,
}

/// Daily ground-truth (VaR, ES) at one probability level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub theta: f64,
    pub var_true: f64,
    pub es_true: f64,
    pub method: TruthMethod,
    /// Sample count behind a Monte-Carlo oracle (None for analytic truths).
    pub oracle_n: Option<usize>,
    /// Batch-means standard errors attached to oracle estimates.
    pub var_se: Option<f64>,
    pub es_se: Option<f64>,
}

/// Closed-form daily truth for Gaussian generators.
pub fn gaussian_ground_truth(spec: &GeneratorSpec, theta: f64) -> Result<GroundTruth> {
    spec.validate()?;
    if spec.family != Family::Gaussian {
        return Err(Error::InvalidInput(
            "analytic ground truth requires the Gaussian family".into(),
        ));
    }
    let m = spec.daily_mean();
    let sd = spec.daily_variance().sqrt();
    let alpha = normal_quantile(theta);
    Ok(GroundTruth {
        theta,
        var_true: m + sd * alpha,
        es_true: m - sd * normal_pdf(alpha) / theta,
        method: TruthMethod::Analytic,
        oracle_n: None,
        var_se: None,
        es_se: None,
    })
}

const ORACLE_BATCHES: usize = 100;
// keeps the oracle stream disjoint from every estimator stream
const ORACLE_SEED_SALT: u64 = 0x0D15_C105_EED5_EED5;

/// Brute-force Monte-Carlo oracle for the Student-t daily truth.
///
/// Simulates `oracle_n` daily returns on an RNG stream disjoint from every
/// estimator seed, and reports the empirical quantile and inclusive tail mean
/// with batch-means standard errors.
pub fn t_ground_truth_oracle(
    spec: &GeneratorSpec,
    theta: f64,
    oracle_n: usize,
) -> Result<GroundTruth> {
    spec.validate()?;
    if spec.family != Family::StudentT {
        return Err(Error::InvalidInput(
            "the Monte-Carlo oracle is for the Student-t family".into(),
        ));
    }
    if oracle_n < 1_000_000 {
        return Err(Error::InvalidInput(format!(
            "oracle needs at least 1e6 samples, got {oracle_n}"
        )));
    }

    let per_batch = oracle_n.div_ceil(ORACLE_BATCHES);
    let batches: Vec<Vec<f64>> = (0..ORACLE_BATCHES)
        .into_par_iter()
        .map(|b| {
            let mut rng =
                ChaCha8Rng::seed_from_u64(task_seed(spec.seed ^ ORACLE_SEED_SALT, b as u64));
            (0..per_batch)
                .map(|_| match spec.dependence {
                    Dependence::Iid => {
                        (0..spec.c).map(|_| draw_innovation(spec, &mut rng)).sum()
                    }
                    Dependence::Ma1 => {
                        let mut prev = draw_innovation(spec, &mut rng);
                        (0..spec.c)
                            .map(|_| {
                                let cur = draw_innovation(spec, &mut rng);
                                let y = spec.phi * prev + cur;
                                prev = cur;
                                y
                            })
                            .sum()
                    }
                })
                .collect()
        })
        .collect();

    // batch-level estimates feed the standard errors
    let mut batch_q = Vec::with_capacity(ORACLE_BATCHES);
    let mut batch_e = Vec::with_capacity(ORACLE_BATCHES);
    for batch in &batches {
        let mut scratch = batch.clone();
        let q = quantile_select(&mut scratch, theta);
        batch_q.push(q);
        batch_e.push(mean_at_or_below(batch, q).expect("quantile is attained"));
    }

    let mut all: Vec<f64> = batches.into_iter().flatten().collect();
    let q = quantile_select(&mut all, theta);
    let e = mean_at_or_below(&all, q).expect("quantile is attained");

    let k = ORACLE_BATCHES as f64;
    let se = |xs: &[f64]| (crate::stats::sample_variance(xs) / k).sqrt();

    Ok(GroundTruth {
        theta,
        var_true: q,
        es_true: e,
        method: TruthMethod::McOracle,
        oracle_n: Some(all.len()),
        var_se: Some(se(&batch_q)),
        es_se: Some(se(&batch_e)),
    })
}
