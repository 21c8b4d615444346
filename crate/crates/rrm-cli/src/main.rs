//! `rrm` — realized risk measures from intraday minute bars.
//!
//! Subcommands: `estimate` (daily VaR/ES over a panel), `backtest` (score a
//! persisted run), `synthetic` (generate panels with ground truth), and
//! `diagnose` (structure-function and Ljung-Box diagnostics).
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rrm_core::diagnostics::{
    default_delta_grid, default_q_grid, ljung_box, structure_function, SfAggregation,
};
use rrm_core::market_data::{parse_minute_file, SessionSpec};
use rrm_core::pipeline::{
    run_backtest, run_estimate, write_subordinated_csv, RunConfig, SidecarFile,
};
use rrm_core::subordinator::{subordinate, SubordinationSpec};
use rrm_core::synthetic::{
    gaussian_ground_truth, generate, t_ground_truth_oracle, Dependence, Family, GeneratorSpec,
};
use rrm_core::ErrorKind;

#[derive(Parser)]
#[command(
    name = "rrm",
    version,
    about = "Daily VaR/ES estimation from intraday minute bars"
)]
struct Cli {
    /// Flat key-value (TOML) config file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Base random seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (0 = automatic).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    /// Input file (minute CSV, optionally .gz; or panel/subordinated CSV).
    #[arg(long)]
    input: Option<PathBuf>,

    /// Input interpretation: minute | panel | subordinated.
    #[arg(long)]
    input_kind: Option<String>,

    #[arg(long)]
    asset: Option<String>,

    /// Subordinator: clock | tpv | vol.
    #[arg(long)]
    subordinator: Option<String>,

    /// Number of subordinated returns per day (e.g. 39, 78, 130).
    #[arg(long)]
    c: Option<usize>,

    /// Drift rule: zero | ema5 | ema21 | ema<beta>.
    #[arg(long)]
    drift: Option<String>,

    /// Filter: iid | ma1.
    #[arg(long)]
    filter: Option<String>,

    /// Probability level(s); repeat for a grid.
    #[arg(long = "theta")]
    thetas: Vec<f64>,

    /// Estimation method: cf | mc | ensemble | dh.
    #[arg(long)]
    method: Option<String>,

    /// Monte-Carlo batch size (even).
    #[arg(long)]
    mc_batch: Option<usize>,

    /// Hurst exponent for the dh method.
    #[arg(long)]
    hurst: Option<f64>,

    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BacktestArgs {
    /// Persisted estimates.csv from a previous run.
    #[arg(long)]
    estimates: Option<PathBuf>,

    /// Forecaster: ar1 | ema | rw.
    #[arg(long)]
    forecaster: Option<String>,

    /// EMA forecaster persistence weight.
    #[arg(long)]
    alpha: Option<f64>,

    #[arg(long)]
    train_years: Option<usize>,

    #[arg(long)]
    test_years: Option<usize>,

    /// Bootstrap replicates for the AS tests.
    #[arg(long)]
    n_boot: Option<usize>,

    /// Ground-truth sidecar (enables rMSE columns).
    #[arg(long)]
    ground_truth: Option<PathBuf>,

    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SyntheticArgs {
    /// Family: gaussian | student-t.
    #[arg(long, default_value = "student-t")]
    family: String,

    /// Dependence: iid | ma1.
    #[arg(long, default_value = "ma1")]
    dependence: String,

    #[arg(long, default_value_t = 39)]
    c: usize,

    #[arg(long, default_value_t = -0.05, allow_hyphen_values = true)]
    phi: f64,

    /// Per-interval location; defaults to the c-scaled preset.
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<f64>,

    /// Per-interval scale; defaults to the c-scaled preset.
    #[arg(long)]
    sigma: Option<f64>,

    #[arg(long, default_value_t = 3.0)]
    nu: f64,

    #[arg(long, default_value_t = 2520)]
    n_days: usize,

    /// Probability level(s) for the ground truth.
    #[arg(long = "theta")]
    thetas: Vec<f64>,

    /// Monte-Carlo oracle sample count (Student-t truth).
    #[arg(long, default_value_t = 10_000_000)]
    oracle_n: usize,

    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct DiagnoseArgs {
    /// Minute CSV input.
    #[arg(long)]
    input: PathBuf,

    #[arg(long)]
    asset: Option<String>,

    /// Subordinator: clock | tpv | vol.
    #[arg(long, default_value = "tpv")]
    subordinator: String,

    #[arg(long, default_value_t = 130)]
    c: usize,

    /// Ljung-Box lags.
    #[arg(long, default_value_t = 5)]
    lags: usize,

    /// Pool m(q, delta) across days before regressing.
    #[arg(long)]
    pooled: bool,

    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate daily (VaR, ES) for every day of the input panel.
    Estimate(EstimateArgs),
    /// Score a persisted estimate run (in-sample, out-of-sample, rMSE).
    Backtest(BacktestArgs),
    /// Generate a synthetic subordinated panel plus a ground-truth sidecar.
    Synthetic(SyntheticArgs),
    /// Structure-function and Ljung-Box diagnostics, as plot-ready CSV.
    Diagnose(DiagnoseArgs),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders its own message; usage problems exit with 1
            let _ = e.print();
            return ExitCode::from(1);
        }
    };

    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = match e.downcast_ref::<rrm_core::Error>() {
                Some(core_err) => match core_err.kind() {
                    ErrorKind::Data => 2,
                    ErrorKind::Numerical => 3,
                },
                None => 1,
            };
            ExitCode::from(code)
        }
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Estimate(args) => estimate(cli.config.as_deref(), cli.seed, cli.jobs, args),
        Command::Backtest(args) => backtest(cli.config.as_deref(), cli.seed, cli.jobs, args),
        Command::Synthetic(args) => synthetic(cli.seed, args),
        Command::Diagnose(args) => diagnose(args),
    }
}

fn estimate(
    config_path: Option<&std::path::Path>,
    seed: Option<u64>,
    jobs: Option<usize>,
    args: EstimateArgs,
) -> anyhow::Result<()> {
    let cfg = config::resolve(config_path, seed, jobs, |cfg: &mut RunConfig| {
        if let Some(v) = &args.input {
            cfg.input = v.clone();
        }
        if let Some(v) = &args.input_kind {
            cfg.input_kind = config::parse_input_kind(v)?;
        }
        if let Some(v) = &args.asset {
            cfg.asset_id = v.clone();
        }
        if let Some(v) = &args.subordinator {
            cfg.subordinator = config::parse_subordinator(v)?;
        }
        if let Some(v) = args.c {
            cfg.c = v;
        }
        if let Some(v) = &args.drift {
            cfg.drift = config::parse_drift(v)?;
        }
        if let Some(v) = &args.filter {
            cfg.filter = config::parse_filter(v)?;
        }
        if !args.thetas.is_empty() {
            cfg.thetas = args.thetas.clone();
        }
        if let Some(v) = &args.method {
            cfg.method = config::parse_method(v)?;
        }
        if let Some(v) = args.mc_batch {
            cfg.mc_batch = v;
        }
        if let Some(v) = args.hurst {
            cfg.hurst = v;
        }
        if let Some(v) = &args.out {
            cfg.output_dir = v.clone();
        }
        Ok(())
    })?;

    if cfg.input.as_os_str().is_empty() {
        anyhow::bail!("no input file given (use --input or the config file)");
    }
    let output = run_estimate(&cfg)?;
    println!(
        "estimated {} days ({} failed) -> {}",
        output.n_days,
        output.n_failed,
        output.csv_path.display()
    );
    Ok(())
}

fn backtest(
    config_path: Option<&std::path::Path>,
    seed: Option<u64>,
    jobs: Option<usize>,
    args: BacktestArgs,
) -> anyhow::Result<()> {
    let cfg = config::resolve(config_path, seed, jobs, |cfg: &mut RunConfig| {
        cfg.forecaster = config::forecaster_spec(
            args.forecaster.as_deref(),
            args.alpha,
            args.train_years,
            args.test_years,
        )?;
        if let Some(v) = args.n_boot {
            cfg.n_boot = v;
        }
        if let Some(v) = &args.ground_truth {
            cfg.ground_truth = Some(v.clone());
        }
        if let Some(v) = &args.out {
            cfg.output_dir = v.clone();
        }
        Ok(())
    })?;

    let estimates = args
        .estimates
        .unwrap_or_else(|| cfg.output_dir.join("estimates.csv"));
    if !estimates.exists() {
        anyhow::bail!(
            "estimates file {} not found; run `rrm estimate` first",
            estimates.display()
        );
    }
    let tables = run_backtest(&cfg, &estimates)?;
    println!(
        "backtest written to {} ({} in-sample rows, {} out-of-sample rows, {} rmse rows)",
        cfg.output_dir.display(),
        tables.in_sample.len(),
        tables.out_of_sample.len(),
        tables.rmse.len()
    );
    Ok(())
}

fn synthetic(seed: Option<u64>, args: SyntheticArgs) -> anyhow::Result<()> {
    let family = Family::parse(&args.family)
        .ok_or_else(|| anyhow::anyhow!("unknown family '{}' (gaussian|student-t)", args.family))?;
    let dependence = Dependence::parse(&args.dependence)
        .ok_or_else(|| anyhow::anyhow!("unknown dependence '{}' (iid|ma1)", args.dependence))?;

    let mut spec = GeneratorSpec::default_for(family, dependence, args.c, seed.unwrap_or(0));
    spec.phi = args.phi;
    spec.nu = args.nu;
    spec.n_days = args.n_days;
    if let Some(mu) = args.mu {
        spec.mu = mu;
    }
    if let Some(sigma) = args.sigma {
        spec.sigma = sigma;
    }
    let thetas = if args.thetas.is_empty() {
        vec![0.05, 0.025, 0.01]
    } else {
        args.thetas.clone()
    };

    let panel = generate(&spec)?;
    std::fs::create_dir_all(&args.out)?;

    let panel_path = args.out.join("panel.csv");
    let rows: Vec<_> = panel
        .dates
        .iter()
        .zip(&panel.days)
        .map(|(d, s)| (*d, s))
        .collect();
    let file = std::fs::File::create(&panel_path)?;
    write_subordinated_csv(&rows, file)?;

    let truths = thetas
        .iter()
        .map(|&theta| match family {
            Family::Gaussian => gaussian_ground_truth(&spec, theta),
            Family::StudentT => t_ground_truth_oracle(&spec, theta, args.oracle_n),
        })
        .collect::<rrm_core::Result<Vec<_>>>()?;
    let sidecar = SidecarFile {
        generator: spec,
        truths,
    };
    let gt_path = args.out.join("ground_truth.json");
    std::fs::write(&gt_path, serde_json::to_string_pretty(&sidecar)?)?;

    println!(
        "wrote {} days to {} and truth to {}",
        spec.n_days,
        panel_path.display(),
        gt_path.display()
    );
    Ok(())
}

fn diagnose(args: DiagnoseArgs) -> anyhow::Result<()> {
    let kind = config::parse_subordinator(&args.subordinator)?;
    let asset = args.asset.as_deref().unwrap_or("ASSET");
    let panel = parse_minute_file(&args.input, SessionSpec::default(), asset)?;
    let spec = SubordinationSpec::new(kind, args.c);

    std::fs::create_dir_all(&args.out)?;

    let aggregation = if args.pooled {
        SfAggregation::Pooled
    } else {
        SfAggregation::PerDay
    };
    let report = structure_function(
        &panel,
        spec,
        &default_q_grid(),
        &default_delta_grid(),
        aggregation,
    )?;
    let sf_path = args.out.join("structure_function.csv");
    {
        let mut w = csv::WriterBuilder::new().from_path(&sf_path)?;
        w.write_record(["q", "hq", "aq_log", "r2"])?;
        for i in 0..report.q_grid.len() {
            w.write_record(&[
                report.q_grid[i].to_string(),
                report.hq[i].to_string(),
                report.aq_log[i].to_string(),
                report.r2[i].to_string(),
            ])?;
        }
        w.flush()?;
    }

    let lb_path = args.out.join("ljung_box.csv");
    let mut rejections = 0usize;
    let mut tested = 0usize;
    {
        let mut w = csv::WriterBuilder::new().from_path(&lb_path)?;
        w.write_record(["date", "statistic", "lags", "p_value"])?;
        for day in &panel.days {
            let sub = subordinate(day, spec)?;
            match ljung_box(&sub.returns, args.lags) {
                Ok(res) => {
                    tested += 1;
                    if res.p_value < 0.05 {
                        rejections += 1;
                    }
                    w.write_record(&[
                        day.date.to_string(),
                        res.statistic.to_string(),
                        res.lags.to_string(),
                        res.p_value.to_string(),
                    ])?;
                }
                Err(e) => log::warn!("ljung-box skipped {}: {e}", day.date),
            }
        }
        w.flush()?;
    }

    println!(
        "structure function ({} days averaged) -> {}",
        report.days_averaged,
        sf_path.display()
    );
    if tested > 0 {
        println!(
            "ljung-box: {rejections}/{tested} days reject no-autocorrelation at 5% -> {}",
            lb_path.display()
        );
    }
    Ok(())
}
