//! Risk-estimator strategy registry.
//!
//! Every daily estimation route sits behind the same trait and is selected by
//! name at runtime (`cf`, `mc`, `ensemble`, `dh`). The model-based routes
//! require a fitted `TailModel` in the context; the benchmark works directly
//! on the subordinated returns.

use crate::dh::{dh_risk_pair, DhConfig};
use crate::error::{Error, Result};
use crate::intraday_model::TailModel;
use crate::scaling::{
    cf_risk_pair, ensemble_risk_pair, mc_risk_pair, McConfig, RiskPair, RiskSpec,
};
use crate::subordinator::SubordinatedSeries;

/// Everything a single day offers to an estimator.
pub struct DayContext<'a> {
    pub series: &'a SubordinatedSeries,
    /// Fitted intraday model; `None` for routes that do not need one.
    pub model: Option<&'a TailModel>,
    pub mc: McConfig,
    pub dh: DhConfig,
}

impl<'a> DayContext<'a> {
    fn require_model(&self, method: &str) -> Result<&'a TailModel> {
        self.model.ok_or_else(|| {
            Error::InvalidInput(format!("the {method} estimator needs a fitted model"))
        })
    }
}

/// An interchangeable daily risk-estimation strategy.
pub trait RiskEstimator: Send + Sync {
    /// Registry name, as used by configuration and the CLI.
    fn name(&self) -> &'static str;
    fn estimate(&self, ctx: &DayContext, spec: &RiskSpec) -> Result<RiskPair>;
}

/// Characteristic-function inversion route.
pub struct CfEstimator;

impl RiskEstimator for CfEstimator {
    fn name(&self) -> &'static str {
        "cf"
    }

    fn estimate(&self, ctx: &DayContext, spec: &RiskSpec) -> Result<RiskPair> {
        cf_risk_pair(ctx.require_model(self.name())?, spec)
    }
}

/// Antithetic Monte-Carlo route.
pub struct McEstimator;

impl RiskEstimator for McEstimator {
    fn name(&self) -> &'static str {
        "mc"
    }

    fn estimate(&self, ctx: &DayContext, spec: &RiskSpec) -> Result<RiskPair> {
        mc_risk_pair(ctx.require_model(self.name())?, spec, &ctx.mc)
    }
}

/// Equally weighted CF/MC average.
pub struct EnsembleEstimator;

impl RiskEstimator for EnsembleEstimator {
    fn name(&self) -> &'static str {
        "ensemble"
    }

    fn estimate(&self, ctx: &DayContext, spec: &RiskSpec) -> Result<RiskPair> {
        let model = ctx.require_model(self.name())?;
        let cf = cf_risk_pair(model, spec)?;
        let mc = mc_risk_pair(model, spec, &ctx.mc)?;
        Ok(ensemble_risk_pair(&cf, &mc))
    }
}

/// Realized-quantile benchmark (c^H scaling of the empirical intraday pair).
pub struct DhEstimator;

impl RiskEstimator for DhEstimator {
    fn name(&self) -> &'static str {
        "dh"
    }

    fn estimate(&self, ctx: &DayContext, spec: &RiskSpec) -> Result<RiskPair> {
        dh_risk_pair(ctx.series, spec, &ctx.dh)
    }
}

/// Registry of the built-in estimators.
pub fn registry() -> &'static [&'static dyn RiskEstimator] {
    static REGISTRY: [&dyn RiskEstimator; 4] =
        [&CfEstimator, &McEstimator, &EnsembleEstimator, &DhEstimator];
    &REGISTRY
}

/// Look an estimator up by registry name.
pub fn by_name(name: &str) -> Option<&'static dyn RiskEstimator> {
    registry().iter().copied().find(|e| e.name() == name)
}
