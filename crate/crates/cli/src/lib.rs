//! Command implementations behind the `turnpoint` binary.
//!
//! Every command computes all of its outputs in memory before touching the
//! filesystem, then writes each file through a temporary sibling and a rename.
//! A failing command therefore leaves no partial tables behind.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use turnpoint::analytic::{
    asymmetric_bias, build_exponential, build_linear_asymmetric, build_linear_symmetric,
    ExponentialTrendSpec, PiecewiseLinearTrendSpec,
};
use turnpoint::io::{
    distribution_csv, load_series, write_coverage_table, write_endpoints_table, write_report,
    DistributionPoint, EndpointsTable, OutputFormat, SeriesFormat,
};
use turnpoint::simulate::{coverage_study, CoverageTable, Execution, StudyConfig, TrendSpec};
use turnpoint::{
    estimate_minimum_location, location_distribution, Bandwidth, ConfidenceInterval, IndexWindow, NoiseModel,
    TrendSequence,
};

const UNITS: &str = "Indices are sample positions (beat numbers for cardiac interval series). \
Values and trend levels are in the input's units (e.g. milliseconds); \
rates (lambda) are in inverse input units.";

#[derive(Debug, Parser)]
#[command(name = "turnpoint", version, about = "Confidence intervals for the location of a series minimum under exponential noise", long_about = None)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the minimum location of an observed series for one or more bandwidths.
    #[command(after_help = UNITS)]
    Analyze(AnalyzeArgs),
    /// Monte Carlo coverage study on a synthetic trend.
    #[command(after_help = UNITS)]
    Simulate(SimulateArgs),
    /// Exact minimum-location distribution for a known trend and noise rate.
    #[command(after_help = UNITS)]
    Dist(DistArgs),
    /// Closed-form expected minimum location for an asymmetric V trend.
    #[command(after_help = UNITS)]
    Bias(BiasArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Columns {
    Auto,
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
}

impl From<Columns> for SeriesFormat {
    fn from(c: Columns) -> Self {
        match c {
            Columns::Auto => SeriesFormat::Auto,
            Columns::One => SeriesFormat::SingleColumn,
            Columns::Two => SeriesFormat::TwoColumn,
        }
    }
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Series file: one value per line, or `index,value` pairs (comma or whitespace separated, `#` comments).
    pub file: PathBuf,
    /// Bandwidth(s) h, the half-width of the running-minimum window, in samples; comma-separated for a sweep.
    #[arg(long = "h", value_delimiter = ',', required = true)]
    pub bandwidths: Vec<usize>,
    /// Confidence level of the interval.
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    /// Output directory; receives `report_h<h>.<format>` and, for sweeps, `endpoints.csv`.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Input layout.
    #[arg(long, value_enum, default_value_t = Columns::Auto)]
    pub columns: Columns,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StudyTrend {
    Linear,
    Exponential,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Trend family: piecewise linear `-a(t-t0)` / `b(t-t0)`, or exponential `L(e^{-a(t-t0)}-1)` / `R(1-e^{-b(t-t0)})`.
    #[arg(long, value_enum)]
    pub trend: StudyTrend,
    /// Left slope (linear) or left rate (exponential), per index.
    #[arg(long)]
    pub a: f64,
    /// Right slope (linear) or right rate (exponential), per index.
    #[arg(long)]
    pub b: f64,
    /// True minimum location (index).
    #[arg(long)]
    pub t0: i64,
    /// Series length; indices run 1..=n.
    #[arg(long)]
    pub n: usize,
    /// Realizations per bandwidth.
    #[arg(long, default_value_t = 200)]
    pub reps: usize,
    /// Bandwidths h, comma-separated.
    #[arg(long = "h", value_delimiter = ',', required = true)]
    pub bandwidths: Vec<usize>,
    #[arg(long)]
    pub seed: u64,
    /// Noise rate lambda, in inverse value units.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    /// Left amplitude L of the exponential trend.
    #[arg(long, default_value_t = ExponentialTrendSpec::DEFAULT_LEFT_AMPLITUDE)]
    pub left_amplitude: f64,
    /// Right amplitude R of the exponential trend.
    #[arg(long, default_value_t = ExponentialTrendSpec::DEFAULT_RIGHT_AMPLITUDE)]
    pub right_amplitude: f64,
    /// Worker threads; 1 runs serially, 0 uses every core. Output does not depend on this.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Output file for the coverage table; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ParametricTrend {
    /// `a|t|`
    Symmetric,
    /// `-a(t-t0)` left of t0, `b(t-t0)` from t0 on.
    Linear,
    /// `L(e^{-a(t-t0)}-1)` left of t0, `R(1-e^{-b(t-t0)})` from t0 on.
    Exponential,
}

#[derive(Debug, Args)]
pub struct DistArgs {
    /// Trend file (same layout as series files).
    #[arg(long, conflicts_with = "trend")]
    pub trend_file: Option<PathBuf>,
    /// Parametric trend family, as an alternative to --trend-file.
    #[arg(long, value_enum, required_unless_present = "trend_file")]
    pub trend: Option<ParametricTrend>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub t0: i64,
    /// First index of the parametric window.
    #[arg(long)]
    pub start: Option<i64>,
    /// Last index of the parametric window.
    #[arg(long)]
    pub end: Option<i64>,
    #[arg(long, default_value_t = ExponentialTrendSpec::DEFAULT_LEFT_AMPLITUDE)]
    pub left_amplitude: f64,
    #[arg(long, default_value_t = ExponentialTrendSpec::DEFAULT_RIGHT_AMPLITUDE)]
    pub right_amplitude: f64,
    /// Noise rate lambda, in inverse value units.
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, value_enum, default_value_t = Columns::Auto)]
    pub columns: Columns,
}

#[derive(Debug, Args)]
pub struct BiasArgs {
    /// Left slope (value units per index).
    #[arg(long)]
    pub a: f64,
    /// Right slope (value units per index).
    #[arg(long)]
    pub b: f64,
    /// Noise rate lambda, in inverse value units.
    #[arg(long)]
    pub lambda: f64,
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Analyze(args) => run_analyze(&args, stdout),
        Command::Simulate(args) => run_simulate(&args, stdout),
        Command::Dist(args) => run_dist(&args, stdout),
        Command::Bias(args) => run_bias(&args, stdout),
    }
}

/// Writes every `(path, bytes)` pair or none of them.
fn commit(files: &[(PathBuf, Vec<u8>)]) -> Result<()> {
    let mut written: Vec<&Path> = Vec::new();
    for (path, bytes) in files {
        let tmp = path.with_extension("partial");
        let res = fs::write(&tmp, bytes).and_then(|()| fs::rename(&tmp, path));
        if let Err(e) = res {
            let _ = fs::remove_file(&tmp);
            for p in written {
                let _ = fs::remove_file(p);
            }
            return Err(e).with_context(|| format!("writing {}", path.display()));
        }
        written.push(path);
    }
    Ok(())
}

fn emit(out: Option<&Path>, bytes: Vec<u8>, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => commit(&[(path.to_path_buf(), bytes)]),
        None => Ok(stdout.write_all(&bytes)?),
    }
}

fn bandwidths(raw: &[usize]) -> Result<Vec<Bandwidth>> {
    let mut hs = raw
        .iter()
        .map(|&h| Bandwidth::new(h).map_err(anyhow::Error::from))
        .collect::<Result<Vec<_>>>()?;
    hs.sort();
    hs.dedup();
    Ok(hs)
}

pub fn run_analyze(args: &AnalyzeArgs, stdout: &mut dyn Write) -> Result<()> {
    let series = load_series(&args.file, args.columns.into())?;
    let hs = bandwidths(&args.bandwidths)?;
    let format = OutputFormat::from(args.format);

    let mut reports = Vec::with_capacity(hs.len());
    let mut files = Vec::new();
    for h in hs {
        let report = estimate_minimum_location(&series, h, args.level)
            .with_context(|| format!("bandwidth {}", h.get()))?;
        let mut bytes = Vec::new();
        write_report(&report, format, &mut bytes)?;
        files.push((
            args.out
                .join(format!("report_h{}.{}", h.get(), format.extension())),
            bytes,
        ));
        reports.push(report);
    }
    if reports.len() > 1 {
        let mut bytes = Vec::new();
        write_endpoints_table(
            &EndpointsTable::from_reports(&reports),
            OutputFormat::Csv,
            &mut bytes,
        )?;
        files.push((args.out.join("endpoints.csv"), bytes));
    }

    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    commit(&files)?;

    writeln!(stdout, "h\ttau_hat\trate_hat\tleft\tright\tlength")?;
    for r in &reports {
        writeln!(
            stdout,
            "{}\t{}\t{:.6}\t{}\t{}\t{}",
            r.bandwidth,
            r.tau_hat,
            r.rate_hat,
            r.interval.left,
            r.interval.right,
            r.interval.length()
        )?;
    }
    Ok(())
}

pub fn study_config(args: &SimulateArgs) -> Result<StudyConfig> {
    let window = IndexWindow::with_len(1, args.n)?;
    let trend = match args.trend {
        StudyTrend::Linear => {
            TrendSpec::Linear(PiecewiseLinearTrendSpec::new(args.a, args.b, args.t0, window)?)
        }
        StudyTrend::Exponential => TrendSpec::Exponential(ExponentialTrendSpec::new(
            args.a,
            args.b,
            args.left_amplitude,
            args.right_amplitude,
            args.t0,
            window,
        )?),
    };
    let config = StudyConfig {
        trend,
        noise_rate: args.lambda,
        realizations: args.reps,
        bandwidths: args.bandwidths.clone(),
        level: args.level,
        seed: args.seed,
    };
    config.validate()?;
    Ok(config)
}

pub fn simulate_table(config: &StudyConfig, threads: usize) -> Result<CoverageTable> {
    let table = if threads == 1 {
        coverage_study(config, Execution::Serial)?
    } else {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
        pool.install(|| coverage_study(config, Execution::Parallel))?
    };
    Ok(table)
}

pub fn run_simulate(args: &SimulateArgs, stdout: &mut dyn Write) -> Result<()> {
    let config = study_config(args)?;
    let table = simulate_table(&config, args.threads)?;
    let mut bytes = Vec::new();
    write_coverage_table(&table, args.format.into(), &mut bytes)?;
    emit(args.out.as_deref(), bytes, stdout)?;
    if args.out.is_some() {
        writeln!(stdout, "h\tcoverage\tmean_length")?;
        for row in &table.rows {
            writeln!(
                stdout,
                "{}\t{:.3}\t{:.2}",
                row.bandwidth, row.coverage_rate, row.mean_interval_length
            )?;
        }
    }
    Ok(())
}

fn require(value: Option<f64>, flag: &str) -> Result<f64> {
    value.with_context(|| format!("--{flag} is required for this trend"))
}

fn dist_trend(args: &DistArgs) -> Result<TrendSequence> {
    if let Some(path) = &args.trend_file {
        let s = load_series(path, args.columns.into())?;
        return Ok(TrendSequence::new(s.window(), s.values().to_vec())?);
    }
    let (Some(start), Some(end)) = (args.start, args.end) else {
        bail!("--start and --end are required with --trend");
    };
    let window = IndexWindow::new(start, end)?;
    let a = require(args.a, "a")?;
    let trend = match args.trend.expect("clap enforces --trend or --trend-file") {
        ParametricTrend::Symmetric => build_linear_symmetric(a, window)?,
        ParametricTrend::Linear => build_linear_asymmetric(&PiecewiseLinearTrendSpec::new(
            a,
            require(args.b, "b")?,
            args.t0,
            window,
        )?)?,
        ParametricTrend::Exponential => build_exponential(&ExponentialTrendSpec::new(
            a,
            require(args.b, "b")?,
            args.left_amplitude,
            args.right_amplitude,
            args.t0,
            window,
        )?)?,
    };
    Ok(trend)
}

/// JSON document written by `dist`.
#[derive(Debug, Serialize)]
pub struct DistDocument {
    pub lambda: f64,
    pub expectation: f64,
    pub interval: ConfidenceInterval,
    pub distribution: Vec<DistributionPoint>,
}

pub fn run_dist(args: &DistArgs, stdout: &mut dyn Write) -> Result<()> {
    let trend = dist_trend(args)?;
    let noise = NoiseModel::new(args.lambda)?;
    let dist = location_distribution(&trend, &noise)?;
    let interval = dist.confidence_interval(args.level)?;
    let points: Vec<DistributionPoint> = trend
        .iter()
        .zip(dist.mass())
        .map(|((index, trend), &mass)| DistributionPoint { index, trend, mass })
        .collect();
    let doc = DistDocument {
        lambda: noise.rate(),
        expectation: dist.expectation(),
        interval,
        distribution: points,
    };

    let bytes = match args.format {
        Format::Json => {
            let mut b = serde_json::to_vec_pretty(&doc)?;
            b.push(b'\n');
            b
        }
        Format::Csv => distribution_csv(&doc.distribution).into_bytes(),
    };
    emit(args.out.as_deref(), bytes, stdout)?;
    if args.out.is_some() {
        writeln!(
            stdout,
            "expectation {:.6}\tinterval [{}, {}] at level {}",
            doc.expectation, interval.left, interval.right, interval.level
        )?;
    }
    Ok(())
}

pub fn run_bias(args: &BiasArgs, stdout: &mut dyn Write) -> Result<()> {
    let value = asymmetric_bias(args.a, args.b, args.lambda)?;
    writeln!(stdout, "{value}")?;
    Ok(())
}
