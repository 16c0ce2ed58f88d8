//! Synthetic series and the Monte Carlo coverage study.
//!
//! Every replicate draws from its own ChaCha8 stream keyed by
//! `(seed, bandwidth, replicate)`. Results do not depend on how replicates are
//! scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{
    build_exponential, build_linear_asymmetric, ExponentialTrendSpec, PiecewiseLinearTrendSpec,
};
use crate::error::{Error, Result};
use crate::estimate::{estimate_minimum_location, Bandwidth};
use crate::model::{IndexWindow, NoiseModel, TimeSeries, TrendSequence};

/// Reference bandwidth grid.
pub const REFERENCE_BANDWIDTHS: [usize; 6] = [5, 8, 11, 14, 17, 20];

/// Random stream for one replicate.
pub fn substream(seed: u64, bandwidth: usize, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((bandwidth as u64) << 32) ^ replicate);
    rng
}

/// One `Exp(rate)` draw by inverse CDF.
pub fn exponential_draw<R: Rng + ?Sized>(rng: &mut R, rate: f64) -> f64 {
    -(1.0 - rng.gen::<f64>()).ln() / rate
}

/// `Y_t = T_t + E_t` with `E_t ~ Exp(λ)` i.i.d. drawn in index order.
pub fn sample_series<R: Rng + ?Sized>(trend: &TrendSequence, noise: &NoiseModel, rng: &mut R) -> TimeSeries {
    let values = trend
        .levels()
        .iter()
        .map(|t| t + exponential_draw(rng, noise.rate()))
        .collect();
    TimeSeries::new(trend.window(), values).expect("finite trend plus finite noise")
}

/// Data-generating trend of a study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum TrendSpec {
    Linear(PiecewiseLinearTrendSpec),
    Exponential(ExponentialTrendSpec),
}

impl TrendSpec {
    pub fn t0(&self) -> i64 {
        match self {
            TrendSpec::Linear(s) => s.t0,
            TrendSpec::Exponential(s) => s.t0,
        }
    }

    pub fn window(&self) -> IndexWindow {
        match self {
            TrendSpec::Linear(s) => s.window,
            TrendSpec::Exponential(s) => s.window,
        }
    }

    pub fn build(&self) -> Result<TrendSequence> {
        match self {
            TrendSpec::Linear(s) => build_linear_asymmetric(s),
            TrendSpec::Exponential(s) => build_exponential(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub trend: TrendSpec,
    pub noise_rate: f64,
    pub realizations: usize,
    pub bandwidths: Vec<usize>,
    pub level: f64,
    pub seed: u64,
}

impl StudyConfig {
    /// 200 realizations, `λ = 1`, level 0.95, the reference bandwidth grid.
    pub fn reference(trend: TrendSpec, seed: u64) -> Self {
        Self {
            trend,
            noise_rate: 1.0,
            realizations: 200,
            bandwidths: REFERENCE_BANDWIDTHS.to_vec(),
            level: 0.95,
            seed,
        }
    }

    /// Checks every invariant; returns the bandwidths sorted and deduplicated.
    pub fn validate(&self) -> Result<Vec<Bandwidth>> {
        self.trend.build()?;
        NoiseModel::new(self.noise_rate)?;
        if self.realizations == 0 {
            return Err(Error::NoRealizations);
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::ProbabilityOutOfRange(self.level));
        }
        if self.bandwidths.is_empty() {
            return Err(Error::NoBandwidths);
        }
        let len = self.trend.window().len();
        let mut hs = self
            .bandwidths
            .iter()
            .map(|&h| {
                let bw = Bandwidth::new(h)?;
                bw.check_fits(len)?;
                Ok(bw)
            })
            .collect::<Result<Vec<_>>>()?;
        hs.sort();
        hs.dedup();
        Ok(hs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageRow {
    pub bandwidth: usize,
    pub coverage_rate: f64,
    pub mean_interval_length: f64,
}

/// Coverage and mean length per bandwidth, ascending in `h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageTable {
    pub rows: Vec<CoverageRow>,
}

impl CoverageTable {
    pub fn row(&self, bandwidth: usize) -> Option<&CoverageRow> {
        self.rows.iter().find(|r| r.bandwidth == bandwidth)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    #[default]
    Parallel,
}

#[derive(Debug, Clone, Copy)]
struct Outcome {
    covered: bool,
    length: i64,
}

fn replicate(
    config: &StudyConfig,
    trend: &TrendSequence,
    noise: &NoiseModel,
    h: Bandwidth,
    index: usize,
) -> Result<Outcome> {
    let mut rng = substream(config.seed, h.get(), index as u64);
    let series = sample_series(trend, noise, &mut rng);
    let report = estimate_minimum_location(&series, h, config.level)?;
    Ok(Outcome {
        covered: report.interval.contains(config.trend.t0()),
        length: report.interval.length(),
    })
}

/// Runs `realizations` replicates per bandwidth and tabulates how often the
/// interval contains `t0` and how long it is on average.
pub fn coverage_study(config: &StudyConfig, execution: Execution) -> Result<CoverageTable> {
    let bandwidths = config.validate()?;
    let trend = config.trend.build()?;
    let noise = NoiseModel::new(config.noise_rate)?;
    let reps = config.realizations;

    let mut rows = Vec::with_capacity(bandwidths.len());
    for h in bandwidths {
        let run = |i: usize| replicate(config, &trend, &noise, h, i);
        let outcomes: Vec<Outcome> = match execution {
            Execution::Serial => (0..reps).map(run).collect::<Result<_>>()?,
            Execution::Parallel => (0..reps).into_par_iter().map(run).collect::<Result<_>>()?,
        };
        // Integer accumulation keeps the summary independent of reduction order.
        let covered = outcomes.iter().filter(|o| o.covered).count();
        let total_length: i64 = outcomes.iter().map(|o| o.length).sum();
        rows.push(CoverageRow {
            bandwidth: h.get(),
            coverage_rate: covered as f64 / reps as f64,
            mean_interval_length: total_length as f64 / reps as f64,
        });
    }
    Ok(CoverageTable { rows })
}
