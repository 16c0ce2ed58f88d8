//! Nonparametric estimation of the minimum location from one observed series.
//!
//! The trend is estimated as a running minimum of half-width `h`. The noise
//! rate is fitted to the residuals. The exact argmin law is then evaluated with
//! the estimated trend and rate plugged in.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::exactdist::location_distribution;
use crate::model::{EstimationReport, NoiseModel, TimeSeries, TrendSequence};

/// Half-width `h` of the sliding window; the full window spans `2h + 1` points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bandwidth(usize);

impl Bandwidth {
    pub fn new(h: usize) -> Result<Self> {
        if h == 0 {
            return Err(Error::BandwidthZero);
        }
        Ok(Self(h))
    }

    pub fn get(self) -> usize {
        self.0
    }

    pub fn check_fits(self, len: usize) -> Result<()> {
        if 2 * self.0 + 1 > len {
            return Err(Error::BandwidthTooLarge { h: self.0, len });
        }
        Ok(())
    }
}

/// `T̂_t = min{Y_{t-h}, …, Y_{t+h}}`, windows truncated at both ends.
pub fn sliding_min_trend(series: &TimeSeries, h: Bandwidth) -> Result<TrendSequence> {
    let values = series.values();
    let n = values.len();
    h.check_fits(n)?;
    let h = h.get();

    // Monotone deque of offsets whose values increase from front to back.
    let mut deque: VecDeque<usize> = VecDeque::with_capacity(2 * h + 1);
    let mut out = Vec::with_capacity(n);
    let mut next = 0;
    for t in 0..n {
        let hi = (t + h).min(n - 1);
        while next <= hi {
            while deque.back().is_some_and(|&j| values[j] >= values[next]) {
                deque.pop_back();
            }
            deque.push_back(next);
            next += 1;
        }
        let lo = t.saturating_sub(h);
        while deque.front().is_some_and(|&j| j < lo) {
            deque.pop_front();
        }
        out.push(values[*deque.front().expect("window is never empty")]);
    }
    TrendSequence::new(series.window(), out)
}

/// `ε̂_t = Y_t - T̂_t`.
pub fn residuals(series: &TimeSeries, trend: &TrendSequence) -> Result<Vec<f64>> {
    let (a, b) = (series.window(), trend.window());
    if a != b {
        return Err(Error::WindowMismatch {
            a_start: a.start(),
            a_end: a.end(),
            b_start: b.start(),
            b_end: b.end(),
        });
    }
    Ok(series
        .values()
        .iter()
        .zip(trend.levels())
        .map(|(y, t)| y - t)
        .collect())
}

/// Exponential maximum likelihood: `λ̂ = 1 / mean(residuals)`, zeros included.
pub fn fit_rate(residuals: &[f64]) -> Result<NoiseModel> {
    if let Some(&bad) = residuals.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
        return Err(Error::InvalidResidual(bad));
    }
    let total: f64 = residuals.iter().sum();
    if total <= 0.0 {
        return Err(Error::AllResidualsZero);
    }
    NoiseModel::new(residuals.len() as f64 / total)
}

/// Full pipeline: running-min trend, residual rate fit, plug-in argmin law,
/// and equal-tailed interval at `level`.
pub fn estimate_minimum_location(series: &TimeSeries, h: Bandwidth, level: f64) -> Result<EstimationReport> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::ProbabilityOutOfRange(level));
    }
    let trend_hat = sliding_min_trend(series, h)?;
    let eps = residuals(series, &trend_hat)?;
    let noise = fit_rate(&eps)?;
    let distribution = location_distribution(&trend_hat, &noise)?;
    let interval = distribution.confidence_interval(level)?;
    Ok(EstimationReport {
        tau_hat: trend_hat.argmin(),
        rate_hat: noise.rate(),
        bandwidth: h.get(),
        trend_hat,
        distribution,
        interval,
    })
}
