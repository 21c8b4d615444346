//! End-to-end orchestration: estimate realized risk measures over a panel,
//! persist them, and score the persisted series.
//!
//! One run covers one (subordinator, c, drift, filter, method) combination
//! over a list of probability levels. Days are processed in parallel with
//! per-day seeds derived from (base seed, date), so reruns are bit-identical
//! regardless of scheduling. Per-day failures are logged and skipped; the run
//! aborts when more than 5% of days fail.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dh::DhConfig;
use crate::error::{Error, Result};
use crate::estimator::{by_name, DayContext};
use crate::evaluation::{
    as_tests, hits_frequency, rolling_forecast_eval, rmse_vs_truth, ForecasterSpec,
    RealizedPanel, DAYS_PER_YEAR,
};
use crate::intraday_model::{fit_iid_t, fit_ma1_t, DriftSpec, FilterMode, TailModel};
use crate::market_data::{import_panel_csv, parse_minute_file, DayPanel, SessionSpec};
use crate::scaling::{ensemble_risk_pair, McConfig, RiskMethod, RiskPair, RiskSpec};
use crate::seed::day_seed;
use crate::subordinator::{subordinate, SubordinatedSeries, SubordinationSpec, SubordinatorKind};
use crate::synthetic::GroundTruth;

/// How the input file is interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputKind {
    /// Raw minute bars: timestamp, price, volume.
    Minute,
    /// Columnar panel export: date, minute, log_price, volume.
    Panel,
    /// Pre-subordinated returns: date, j, y (no subordination applied).
    Subordinated,
}

impl InputKind {
    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "minute" => Some(Self::Minute),
            "panel" => Some(Self::Panel),
            "subordinated" => Some(Self::Subordinated),
            _ => None,
        }
    }
}

/// Full configuration of one estimation/backtest run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub input: PathBuf,
    pub input_kind: InputKind,
    pub asset_id: String,
    pub subordinator: SubordinatorKind,
    pub c: usize,
    pub drift: DriftSpec,
    /// Daily returns used to initialize the EMA drift ("one year of data").
    pub drift_init_window: usize,
    pub filter: FilterMode,
    pub thetas: Vec<f64>,
    pub method: RiskMethod,
    pub mc_batch: usize,
    pub hurst: f64,
    pub forecaster: ForecasterSpec,
    pub n_boot: usize,
    /// Optional ground-truth sidecar enabling rMSE reports.
    pub ground_truth: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub base_seed: u64,
    /// Worker threads; 0 picks the rayon default.
    pub jobs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: PathBuf::new(),
            input_kind: InputKind::Minute,
            asset_id: "ASSET".into(),
            subordinator: SubordinatorKind::Tpv,
            c: 39,
            drift: DriftSpec::Zero,
            drift_init_window: DAYS_PER_YEAR,
            filter: FilterMode::Iid,
            thetas: vec![0.05, 0.025, 0.01],
            method: RiskMethod::Ensemble,
            mc_batch: 100_000,
            hurst: 0.5,
            forecaster: ForecasterSpec::default(),
            n_boot: 10_000,
            ground_truth: None,
            output_dir: PathBuf::from("out"),
            base_seed: 0,
            jobs: 0,
        }
    }
}

impl RunConfig {
    fn validate(&self) -> Result<()> {
        if self.thetas.is_empty() {
            return Err(Error::InvalidInput("theta list must be non-empty".into()));
        }
        for &t in &self.thetas {
            if !(t > 0.0 && t < 0.5) {
                return Err(Error::InvalidInput(format!(
                    "every theta must lie in (0, 0.5), got {t}"
                )));
            }
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical serialized configuration; changes iff any
    /// field changes.
    pub fn config_hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        hex_string(&hasher.finalize())
    }

    /// Value columns this run's method writes, in order.
    pub fn value_columns(&self) -> Vec<&'static str> {
        match self.method {
            RiskMethod::Cf => vec!["var_cf", "es_cf"],
            RiskMethod::Mc => vec!["var_mc", "es_mc"],
            RiskMethod::Ensemble => vec![
                "var_cf", "es_cf", "var_mc", "es_mc", "var_ens", "es_ens",
            ],
            RiskMethod::Dh => vec!["var_dh", "es_dh"],
        }
    }
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// One day ready for estimation.
struct PreparedDay {
    date: NaiveDate,
    y: f64,
    series: SubordinatedSeries,
    mu_fixed: f64,
}

/// One estimated day: value per column, aligned with `RunConfig::value_columns`.
#[derive(Debug, Clone)]
pub struct EstimateRow {
    pub date: NaiveDate,
    pub theta: f64,
    pub y: f64,
    pub values: Vec<f64>,
}

/// Output of an estimation run.
#[derive(Debug, Clone)]
pub struct EstimateOutput {
    pub columns: Vec<&'static str>,
    pub rows: Vec<EstimateRow>,
    pub n_days: usize,
    pub n_failed: usize,
    pub csv_path: PathBuf,
    pub manifest_path: PathBuf,
}

impl EstimateOutput {
    /// Realized panel for one theta and one method column suffix.
    pub fn realized_panel(&self, theta: f64, suffix: &str) -> Result<RealizedPanel> {
        let var_col = format!("var_{suffix}");
        let es_col = format!("es_{suffix}");
        let vi = self
            .columns
            .iter()
            .position(|&c| c == var_col)
            .ok_or_else(|| Error::InvalidInput(format!("no column {var_col}")))?;
        let ei = self
            .columns
            .iter()
            .position(|&c| c == es_col)
            .ok_or_else(|| Error::InvalidInput(format!("no column {es_col}")))?;
        let mut dates = Vec::new();
        let mut y = Vec::new();
        let mut q = Vec::new();
        let mut e = Vec::new();
        for row in self.rows.iter().filter(|r| r.theta == theta) {
            dates.push(row.date);
            y.push(row.y);
            q.push(row.values[vi]);
            e.push(row.values[ei].min(row.values[vi]));
        }
        RealizedPanel::new(dates, y, q, e, theta)
    }
}

/// Read a pre-subordinated panel: CSV with header date,j,y.
pub fn read_subordinated_csv<R: Read>(source: R) -> Result<Vec<(NaiveDate, SubordinatedSeries)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let mut per_day: BTreeMap<NaiveDate, Vec<(usize, f64)>> = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map(|p| p.line()).unwrap_or_default(),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or_default();
        let bad = |message: String| Error::Parse { line, message };
        let date: NaiveDate = record[0]
            .parse()
            .map_err(|_| bad(format!("bad date {:?}", &record[0])))?;
        let j: usize = record[1]
            .parse()
            .map_err(|_| bad(format!("bad index {:?}", &record[1])))?;
        let y: f64 = record[2]
            .parse()
            .map_err(|_| bad(format!("bad return {:?}", &record[2])))?;
        per_day.entry(date).or_default().push((j, y));
    }
    Ok(per_day
        .into_iter()
        .map(|(date, mut rows)| {
            rows.sort_by_key(|r| r.0);
            let returns = rows.into_iter().map(|r| r.1).collect();
            (date, SubordinatedSeries::from_returns(returns))
        })
        .collect())
}

/// Write a pre-subordinated panel in the date,j,y schema.
pub fn write_subordinated_csv<W: Write>(
    days: &[(NaiveDate, &SubordinatedSeries)],
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["date", "j", "y"])
        .map_err(|e| Error::InvalidInput(format!("csv write failure: {e}")))?;
    for (date, series) in days {
        for (j, y) in series.returns.iter().enumerate() {
            w.write_record(&[date.to_string(), (j + 1).to_string(), y.to_string()])
                .map_err(|e| Error::InvalidInput(format!("csv write failure: {e}")))?;
        }
    }
    w.flush()?;
    Ok(())
}

fn load_days(config: &RunConfig) -> Result<Vec<(NaiveDate, SubordinatedSeries)>> {
    match config.input_kind {
        InputKind::Minute | InputKind::Panel => {
            let panel: DayPanel = match config.input_kind {
                InputKind::Minute => {
                    parse_minute_file(&config.input, SessionSpec::default(), &config.asset_id)?
                }
                _ => {
                    let file = std::fs::File::open(&config.input)?;
                    import_panel_csv(file, &config.asset_id)?
                }
            };
            let spec = SubordinationSpec::new(config.subordinator, config.c);
            panel
                .days
                .iter()
                .map(|day| Ok((day.date, subordinate(day, spec)?)))
                .collect()
        }
        InputKind::Subordinated => {
            let file = std::fs::File::open(&config.input)?;
            read_subordinated_csv(file)
        }
    }
}

fn prepare_days(config: &RunConfig) -> Result<Vec<PreparedDay>> {
    let days = load_days(config)?;
    if days.is_empty() {
        return Err(Error::InvalidInput("no usable days in the input".into()));
    }
    let daily: Vec<f64> = days.iter().map(|(_, s)| s.daily_return()).collect();

    let (drift, first_day) = match config.drift {
        DriftSpec::Zero => (vec![0.0; days.len() + 1], 0usize),
        DriftSpec::Ema(beta) => {
            let ema =
                crate::intraday_model::ema_drift(&daily, beta, config.drift_init_window)?;
            (ema, config.drift_init_window)
        }
    };

    Ok(days
        .into_iter()
        .enumerate()
        .skip(first_day)
        .map(|(t, (date, series))| {
            let c = series.c() as f64;
            PreparedDay {
                date,
                y: daily[t],
                series,
                mu_fixed: drift[t] / c,
            }
        })
        .collect())
}

fn estimate_one_day(config: &RunConfig, day: &PreparedDay) -> Result<Vec<EstimateRow>> {
    let model: Option<TailModel> = match config.method {
        RiskMethod::Dh => None,
        _ => Some(match config.filter {
            FilterMode::Iid => fit_iid_t(&day.series, day.mu_fixed)?,
            FilterMode::Ma1 => fit_ma1_t(&day.series, day.mu_fixed)?,
        }),
    };
    let mc_cfg = McConfig {
        batch_size: config.mc_batch,
        seed: day_seed(config.base_seed, day.date),
    };
    let specs: Vec<RiskSpec> = config.thetas.iter().map(|&t| RiskSpec::new(t)).collect();

    // theta levels share the CF solver caches and the simulated MC batch
    let per_theta: Vec<Vec<f64>> = match (config.method, &model) {
        (RiskMethod::Ensemble, Some(m)) => {
            let cf = crate::scaling::cf_risk_pairs(m, &specs)?;
            let mc = crate::scaling::mc_risk_pairs(m, &specs, &mc_cfg)?;
            cf.iter()
                .zip(&mc)
                .map(|(c, s)| {
                    let ens = ensemble_risk_pair(c, s);
                    vec![c.var, c.es, s.var, s.es, ens.var, ens.es]
                })
                .collect()
        }
        (RiskMethod::Cf, Some(m)) => crate::scaling::cf_risk_pairs(m, &specs)?
            .iter()
            .map(|p| vec![p.var, p.es])
            .collect(),
        (RiskMethod::Mc, Some(m)) => crate::scaling::mc_risk_pairs(m, &specs, &mc_cfg)?
            .iter()
            .map(|p| vec![p.var, p.es])
            .collect(),
        _ => {
            let ctx = DayContext {
                series: &day.series,
                model: model.as_ref(),
                mc: mc_cfg,
                dh: DhConfig {
                    hurst: config.hurst,
                },
            };
            let est = by_name(config.method.label()).expect("registered");
            specs
                .iter()
                .map(|spec| {
                    let pair: RiskPair = est.estimate(&ctx, spec)?;
                    Ok(vec![pair.var, pair.es])
                })
                .collect::<Result<_>>()?
        }
    };

    Ok(config
        .thetas
        .iter()
        .zip(per_theta)
        .map(|(&theta, values)| EstimateRow {
            date: day.date,
            theta,
            y: day.y,
            values,
        })
        .collect())
}

const FAILURE_THRESHOLD_PCT: u8 = 5;

fn with_pool<T: Send>(jobs: usize, body: impl FnOnce() -> T + Send) -> T {
    if jobs == 0 {
        body()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("thread pool");
        pool.install(body)
    }
}

/// Run the estimate pipeline: subordinate, fit, scale, persist.
pub fn run_estimate(config: &RunConfig) -> Result<EstimateOutput> {
    config.validate()?;
    let days = prepare_days(config)?;
    if days.is_empty() {
        return Err(Error::InvalidInput(
            "no days remain after drift initialization".into(),
        ));
    }

    let results: Vec<(NaiveDate, Result<Vec<EstimateRow>>)> = with_pool(config.jobs, || {
        days.par_iter()
            .map(|day| (day.date, estimate_one_day(config, day)))
            .collect()
    });

    let total = results.len();
    let mut rows = Vec::with_capacity(total * config.thetas.len());
    let mut n_failed = 0usize;
    let mut first_error = String::new();
    for (date, res) in results {
        match res {
            Ok(mut day_rows) => rows.append(&mut day_rows),
            Err(e) => {
                warn!("day {date} failed: {e}");
                if n_failed == 0 {
                    first_error = e.to_string();
                }
                n_failed += 1;
            }
        }
    }
    if n_failed * 100 > total * FAILURE_THRESHOLD_PCT as usize {
        return Err(Error::TooManyFailures {
            failed: n_failed,
            total,
            threshold_pct: FAILURE_THRESHOLD_PCT,
            first_error,
        });
    }

    std::fs::create_dir_all(&config.output_dir)?;
    let columns = config.value_columns();
    let csv_path = config.output_dir.join("estimates.csv");
    {
        let mut w = csv::Writer::from_path(&csv_path)?;
        let mut header = vec!["date".to_string(), "theta".to_string(), "y".to_string()];
        header.extend(columns.iter().map(|c| c.to_string()));
        w.write_record(&header)
            .map_err(|e| Error::InvalidInput(format!("csv write failure: {e}")))?;
        for row in &rows {
            let mut record = vec![
                row.date.to_string(),
                row.theta.to_string(),
                row.y.to_string(),
            ];
            record.extend(row.values.iter().map(|v| v.to_string()));
            w.write_record(&record)
                .map_err(|e| Error::InvalidInput(format!("csv write failure: {e}")))?;
        }
        w.flush()?;
    }

    let manifest_path = config.output_dir.join("manifest.json");
    let manifest = serde_json::json!({
        "config_hash": config.config_hash(),
        "seed": config.base_seed,
        "version": env!("CARGO_PKG_VERSION"),
        "n_days": total - n_failed,
        "n_failed": n_failed,
        "columns": columns,
    });
    std::fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)?.as_bytes())?;

    Ok(EstimateOutput {
        columns,
        rows,
        n_days: total - n_failed,
        n_failed,
        csv_path,
        manifest_path,
    })
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::InvalidInput(format!("json: {e}"))
    }
}

/// Read a persisted estimates.csv back into memory.
pub fn read_estimates_csv(path: &Path) -> Result<(Vec<String>, Vec<EstimateRow>)> {
    let file = std::fs::File::open(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| Error::InvalidInput(format!("csv: {e}")))?
        .iter()
        .map(|s| s.to_string())
        .collect();
    if header.len() < 4 || header[0] != "date" || header[1] != "theta" || header[2] != "y" {
        return Err(Error::InvalidInput(
            "estimates csv must start with date,theta,y".into(),
        ));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map(|p| p.line()).unwrap_or_default(),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or_default();
        let bad = |message: String| Error::Parse { line, message };
        let date: NaiveDate = record[0]
            .parse()
            .map_err(|_| bad(format!("bad date {:?}", &record[0])))?;
        let theta: f64 = record[1]
            .parse()
            .map_err(|_| bad(format!("bad theta {:?}", &record[1])))?;
        let y: f64 = record[2]
            .parse()
            .map_err(|_| bad(format!("bad return {:?}", &record[2])))?;
        let values = (3..record.len())
            .map(|i| {
                record[i]
                    .parse()
                    .map_err(|_| bad(format!("bad value {:?}", &record[i])))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(EstimateRow {
            date,
            theta,
            y,
            values,
        });
    }
    Ok((header[3..].to_vec(), rows))
}

/// Aggregated backtest tables for one run.
#[derive(Debug, Clone, Serialize)]
pub struct BacktestTables {
    pub in_sample: Vec<InSampleRow>,
    pub out_of_sample: Vec<OosRow>,
    pub rmse: Vec<RmseRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InSampleRow {
    pub method: String,
    pub theta: f64,
    pub hits_freq: f64,
    /// Share of per-year AS tests rejecting at the 5% level.
    pub as1_reject_rate: Option<f64>,
    pub as2_reject_rate: f64,
    pub n_years: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct OosRow {
    pub method: String,
    pub theta: f64,
    pub forecaster: String,
    pub pinball_mean: f64,
    pub joint_mean: f64,
    pub n_blocks: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RmseRow {
    pub method: String,
    pub theta: f64,
    pub var_rmse: f64,
    pub es_rmse: f64,
}

fn method_suffixes(columns: &[String]) -> Vec<String> {
    ["cf", "mc", "ens", "dh"]
        .iter()
        .filter(|s| columns.iter().any(|c| c == &format!("var_{s}")))
        .map(|s| s.to_string())
        .collect()
}

fn panel_from_rows(
    columns: &[String],
    rows: &[EstimateRow],
    theta: f64,
    suffix: &str,
) -> Result<RealizedPanel> {
    let vi = columns
        .iter()
        .position(|c| c == &format!("var_{suffix}"))
        .ok_or_else(|| Error::InvalidInput(format!("missing var_{suffix}")))?;
    let ei = columns
        .iter()
        .position(|c| c == &format!("es_{suffix}"))
        .ok_or_else(|| Error::InvalidInput(format!("missing es_{suffix}")))?;
    let mut dates = Vec::new();
    let mut y = Vec::new();
    let mut q = Vec::new();
    let mut e = Vec::new();
    for row in rows.iter().filter(|r| r.theta == theta) {
        dates.push(row.date);
        y.push(row.y);
        q.push(row.values[vi]);
        e.push(row.values[ei].min(row.values[vi]));
    }
    RealizedPanel::new(dates, y, q, e, theta)
}

/// Score a persisted estimate run: in-sample hits and per-year AS tests,
/// rolling out-of-sample forecast losses, and rMSE when ground truth exists.
pub fn run_backtest(config: &RunConfig, estimates_path: &Path) -> Result<BacktestTables> {
    config.validate()?;
    let (columns, rows) = read_estimates_csv(estimates_path)?;
    if rows.is_empty() {
        return Err(Error::InvalidInput("estimates file holds no rows".into()));
    }
    let suffixes = method_suffixes(&columns);
    if suffixes.is_empty() {
        return Err(Error::InvalidInput(
            "estimates file holds no recognized method columns".into(),
        ));
    }

    let truths: Vec<GroundTruth> = match &config.ground_truth {
        Some(path) if path.exists() => {
            let raw = std::fs::read_to_string(path)?;
            serde_json::from_str::<SidecarFile>(&raw)?.truths
        }
        _ => Vec::new(),
    };

    let mut thetas: Vec<f64> = rows.iter().map(|r| r.theta).collect();
    thetas.sort_by(f64::total_cmp);
    thetas.dedup();

    let mut in_sample = Vec::new();
    let mut out_of_sample = Vec::new();
    let mut rmse = Vec::new();

    for &theta in &thetas {
        for suffix in &suffixes {
            let panel = panel_from_rows(&columns, &rows, theta, suffix)?;

            // in-sample: hits over the whole panel, one AS test per year
            let hits = hits_frequency(&panel);
            let n_years = panel.len() / DAYS_PER_YEAR;
            let mut as1_rejects = 0usize;
            let mut as1_defined = 0usize;
            let mut as2_rejects = 0usize;
            for year in 0..n_years {
                let lo = year * DAYS_PER_YEAR;
                let hi = lo + DAYS_PER_YEAR;
                let slice = RealizedPanel::new(
                    panel.dates[lo..hi].to_vec(),
                    panel.y[lo..hi].to_vec(),
                    panel.q_hat[lo..hi].to_vec(),
                    panel.e_hat[lo..hi].to_vec(),
                    theta,
                )?;
                let seed = day_seed(config.base_seed ^ 0xA5, slice.dates[0]);
                let res = as_tests(&slice, config.n_boot, seed)?;
                if let Some(p) = res.as1_p {
                    as1_defined += 1;
                    if p < 0.05 {
                        as1_rejects += 1;
                    }
                }
                if res.as2_p < 0.05 {
                    as2_rejects += 1;
                }
            }
            in_sample.push(InSampleRow {
                method: suffix.clone(),
                theta,
                hits_freq: hits,
                as1_reject_rate: (as1_defined > 0)
                    .then(|| as1_rejects as f64 / as1_defined as f64),
                as2_reject_rate: if n_years > 0 {
                    as2_rejects as f64 / n_years as f64
                } else {
                    f64::NAN
                },
                n_years,
            });

            // out-of-sample rolling forecast losses
            if panel.len()
                >= (config.forecaster.train_years + config.forecaster.test_years) * DAYS_PER_YEAR
            {
                let reports = rolling_forecast_eval(&panel, &config.forecaster)?;
                let n_blocks = reports.len();
                let pinball =
                    reports.iter().filter_map(|r| r.pinball_mean).sum::<f64>() / n_blocks as f64;
                let joint =
                    reports.iter().filter_map(|r| r.joint_mean).sum::<f64>() / n_blocks as f64;
                out_of_sample.push(OosRow {
                    method: suffix.clone(),
                    theta,
                    forecaster: config.forecaster.kind.label().to_string(),
                    pinball_mean: pinball,
                    joint_mean: joint,
                    n_blocks,
                });
            }

            // ground-truth distance when the sidecar provides this theta
            if let Some(gt) = truths.iter().find(|g| g.theta == theta) {
                let var_truth = vec![gt.var_true; panel.len()];
                let es_truth = vec![gt.es_true; panel.len()];
                rmse.push(RmseRow {
                    method: suffix.clone(),
                    theta,
                    var_rmse: rmse_vs_truth(&panel.q_hat, &var_truth),
                    es_rmse: rmse_vs_truth(&panel.e_hat, &es_truth),
                });
            }
        }
    }

    let tables = BacktestTables {
        in_sample,
        out_of_sample,
        rmse,
    };
    write_backtest_tables(&config.output_dir, &tables)?;
    Ok(tables)
}

/// Sidecar file schema: generator description plus the per-theta truths.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SidecarFile {
    pub generator: crate::synthetic::GeneratorSpec,
    pub truths: Vec<GroundTruth>,
}

fn write_backtest_tables(dir: &Path, tables: &BacktestTables) -> Result<()> {
    std::fs::create_dir_all(dir)?;

    let mut w = csv::Writer::from_path(dir.join("backtest_insample.csv"))?;
    w.write_record([
        "method",
        "theta",
        "hits_freq",
        "as1_reject_rate",
        "as2_reject_rate",
        "n_years",
    ])
    .map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
    for r in &tables.in_sample {
        w.write_record(&[
            r.method.clone(),
            r.theta.to_string(),
            r.hits_freq.to_string(),
            r.as1_reject_rate.map(|v| v.to_string()).unwrap_or_default(),
            r.as2_reject_rate.to_string(),
            r.n_years.to_string(),
        ])
        .map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join("backtest_oos.csv"))?;
    w.write_record([
        "method",
        "theta",
        "forecaster",
        "pinball_mean",
        "joint_mean",
        "n_blocks",
    ])
    .map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
    for r in &tables.out_of_sample {
        w.write_record(&[
            r.method.clone(),
            r.theta.to_string(),
            r.forecaster.clone(),
            r.pinball_mean.to_string(),
            r.joint_mean.to_string(),
            r.n_blocks.to_string(),
        ])
        .map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
    }
    w.flush()?;

    if !tables.rmse.is_empty() {
        let mut w = csv::Writer::from_path(dir.join("backtest_rmse.csv"))?;
        w.write_record(["method", "theta", "var_rmse", "es_rmse"])
            .map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
        for r in &tables.rmse {
            w.write_record(&[
                r.method.clone(),
                r.theta.to_string(),
                r.var_rmse.to_string(),
                r.es_rmse.to_string(),
            ])
            .map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
        }
        w.flush()?;
    }
    Ok(())
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        match e.kind() {
            csv::ErrorKind::Io(_) => Error::InvalidInput(format!("csv io: {e}")),
            _ => Error::InvalidInput(format!("csv: {e}")),
        }
    }
}
