//! Flat key-value run configuration: TOML file merged under CLI flags.

use std::path::PathBuf;

use serde::Deserialize;

use rrm_core::evaluation::{ForecasterKind, ForecasterSpec};
use rrm_core::intraday_model::{DriftSpec, FilterMode};
use rrm_core::pipeline::{InputKind, RunConfig};
use rrm_core::scaling::RiskMethod;
use rrm_core::subordinator::SubordinatorKind;

/// File schema: every field optional, enums spelled as strings.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub input: Option<PathBuf>,
    pub input_kind: Option<String>,
    pub asset_id: Option<String>,
    pub subordinator: Option<String>,
    pub c: Option<usize>,
    pub drift: Option<String>,
    pub drift_init_window: Option<usize>,
    pub filter: Option<String>,
    pub thetas: Option<Vec<f64>>,
    pub method: Option<String>,
    pub mc_batch: Option<usize>,
    pub hurst: Option<f64>,
    pub forecaster: Option<String>,
    pub alpha: Option<f64>,
    pub train_years: Option<usize>,
    pub test_years: Option<usize>,
    pub n_boot: Option<usize>,
    pub ground_truth: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub base_seed: Option<u64>,
    pub jobs: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &std::path::Path) -> anyhow::Result<Self> {
        let raw = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
        toml::from_str(&raw).map_err(|e| anyhow::anyhow!("bad config {}: {e}", path.display()))
    }

    /// Apply the file entries onto a base configuration.
    pub fn apply(&self, cfg: &mut RunConfig) -> anyhow::Result<()> {
        if let Some(v) = &self.input {
            cfg.input = v.clone();
        }
        if let Some(v) = &self.input_kind {
            cfg.input_kind = parse_input_kind(v)?;
        }
        if let Some(v) = &self.asset_id {
            cfg.asset_id = v.clone();
        }
        if let Some(v) = &self.subordinator {
            cfg.subordinator = parse_subordinator(v)?;
        }
        if let Some(v) = self.c {
            cfg.c = v;
        }
        if let Some(v) = &self.drift {
            cfg.drift = parse_drift(v)?;
        }
        if let Some(v) = self.drift_init_window {
            cfg.drift_init_window = v;
        }
        if let Some(v) = &self.filter {
            cfg.filter = parse_filter(v)?;
        }
        if let Some(v) = &self.thetas {
            cfg.thetas = v.clone();
        }
        if let Some(v) = &self.method {
            cfg.method = parse_method(v)?;
        }
        if let Some(v) = self.mc_batch {
            cfg.mc_batch = v;
        }
        if let Some(v) = self.hurst {
            cfg.hurst = v;
        }
        if let Some(v) = &self.forecaster {
            cfg.forecaster.kind = parse_forecaster(v)?;
        }
        if let Some(v) = self.alpha {
            cfg.forecaster.alpha = v;
        }
        if let Some(v) = self.train_years {
            cfg.forecaster.train_years = v;
        }
        if let Some(v) = self.test_years {
            cfg.forecaster.test_years = v;
        }
        if let Some(v) = self.n_boot {
            cfg.n_boot = v;
        }
        if let Some(v) = &self.ground_truth {
            cfg.ground_truth = Some(v.clone());
        }
        if let Some(v) = &self.output_dir {
            cfg.output_dir = v.clone();
        }
        if let Some(v) = self.base_seed {
            cfg.base_seed = v;
        }
        if let Some(v) = self.jobs {
            cfg.jobs = v;
        }
        Ok(())
    }
}

pub fn parse_input_kind(text: &str) -> anyhow::Result<InputKind> {
    InputKind::parse(text)
        .ok_or_else(|| anyhow::anyhow!("unknown input kind '{text}' (minute|panel|subordinated)"))
}

pub fn parse_subordinator(text: &str) -> anyhow::Result<SubordinatorKind> {
    SubordinatorKind::parse(text)
        .ok_or_else(|| anyhow::anyhow!("unknown subordinator '{text}' (clock|tpv|vol)"))
}

pub fn parse_drift(text: &str) -> anyhow::Result<DriftSpec> {
    DriftSpec::parse(text)
        .ok_or_else(|| anyhow::anyhow!("unknown drift '{text}' (zero|ema5|ema21|ema<beta>)"))
}

pub fn parse_filter(text: &str) -> anyhow::Result<FilterMode> {
    FilterMode::parse(text).ok_or_else(|| anyhow::anyhow!("unknown filter '{text}' (iid|ma1)"))
}

pub fn parse_method(text: &str) -> anyhow::Result<RiskMethod> {
    RiskMethod::parse(text)
        .ok_or_else(|| anyhow::anyhow!("unknown method '{text}' (cf|mc|ensemble|dh)"))
}

pub fn parse_forecaster(text: &str) -> anyhow::Result<ForecasterKind> {
    ForecasterKind::parse(text)
        .ok_or_else(|| anyhow::anyhow!("unknown forecaster '{text}' (ar1|ema|rw)"))
}

/// Resolve a full run configuration: defaults, then file, then flag overrides.
#[allow(clippy::too_many_arguments)]
pub fn resolve(
    config_path: Option<&std::path::Path>,
    seed: Option<u64>,
    jobs: Option<usize>,
    apply_flags: impl FnOnce(&mut RunConfig) -> anyhow::Result<()>,
) -> anyhow::Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = config_path {
        FileConfig::load(path)?.apply(&mut cfg)?;
    }
    if let Some(s) = seed {
        cfg.base_seed = s;
    }
    if let Some(j) = jobs {
        cfg.jobs = j;
    }
    apply_flags(&mut cfg)?;
    Ok(cfg)
}

/// Forecaster spec helper for the backtest subcommand.
pub fn forecaster_spec(
    kind: Option<&str>,
    alpha: Option<f64>,
    train_years: Option<usize>,
    test_years: Option<usize>,
) -> anyhow::Result<ForecasterSpec> {
    let mut spec = ForecasterSpec::default();
    if let Some(k) = kind {
        spec.kind = parse_forecaster(k)?;
    }
    if let Some(a) = alpha {
        spec.alpha = a;
    }
    if let Some(t) = train_years {
        spec.train_years = t;
    }
    if let Some(t) = test_years {
        spec.test_years = t;
    }
    Ok(spec)
}
