//! Exact law of the argmin location for a trend plus i.i.d. exponential noise.
//!
//! For `Y_t = T_t + E_t` with `E_t ~ Exp(λ)`,
//!
//! ```text
//! P(τ = s) = ∫_{T_s}^{∞} λ exp(-λ B(u)) du,     B(u) = Σ_{t : T_t ≤ u} (u - T_t)
//! ```
//!
//! `B` is piecewise affine between consecutive sorted levels `v_1 ≤ … ≤ v_n`,
//! with slope `k` on `[v_k, v_{k+1})`. Each segment therefore integrates in
//! closed form:
//!
//! ```text
//! c_k = exp(-λ B(v_k)) · (1 - exp(-λ k (v_{k+1} - v_k))) / k,   c_n = exp(-λ B(v_n)) / n
//! ```
//!
//! and `P(τ = s)` is the suffix sum of `c_k` starting at the rank of `T_s`.
//! Nothing is truncated and no quadrature step is involved.

use crate::error::{Error, Result};
use crate::model::{ConfidenceInterval, LocationDistribution, NoiseModel, TrendSequence};

/// Masses below this are stored as exact zeros.
pub const MASS_FLOOR: f64 = 1e-300;

/// Sorted trend levels with prefix sums; evaluates `B(u)` in `O(log n)`.
#[derive(Debug, Clone)]
pub struct AreaFunction {
    sorted_levels: Vec<f64>,
    /// `prefix_sums[k]` is the sum of the `k` smallest levels; `prefix_sums[0] = 0`.
    prefix_sums: Vec<f64>,
}

impl AreaFunction {
    pub fn new(trend: &TrendSequence) -> Self {
        let mut sorted_levels = trend.levels().to_vec();
        sorted_levels.sort_by(f64::total_cmp);
        let mut prefix_sums = Vec::with_capacity(sorted_levels.len() + 1);
        prefix_sums.push(0.0);
        let mut acc = 0.0;
        for &v in &sorted_levels {
            acc += v;
            prefix_sums.push(acc);
        }
        Self {
            sorted_levels,
            prefix_sums,
        }
    }

    pub fn sorted_levels(&self) -> &[f64] {
        &self.sorted_levels
    }

    pub fn prefix_sums(&self) -> &[f64] {
        &self.prefix_sums
    }

    /// Number of levels `≤ u`.
    pub fn count_below(&self, u: f64) -> usize {
        self.sorted_levels.partition_point(|&v| v <= u)
    }

    /// `B(u) = k·u - S_k` with `k` the number of levels `≤ u`.
    pub fn eval(&self, u: f64) -> f64 {
        let k = self.count_below(u);
        (k as f64 * u - self.prefix_sums[k]).max(0.0)
    }
}

/// Area between the horizontal line at height `u` and the trend levels below it.
pub fn area_below(trend: &TrendSequence, u: f64) -> f64 {
    AreaFunction::new(trend).eval(u)
}

/// Exact distribution of `argmin_t (T_t + E_t)` with `E_t ~ Exp(λ)` i.i.d.
pub fn location_distribution(trend: &TrendSequence, noise: &NoiseModel) -> Result<LocationDistribution> {
    let n = trend.len();
    if n < 2 {
        return Err(Error::TrendTooShort(n));
    }
    let rate = noise.rate();
    if !(rate.is_finite() && rate > 0.0) {
        return Err(Error::RateNotPositive(rate));
    }

    let levels = trend.levels();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| levels[i].total_cmp(&levels[j]));
    let sorted: Vec<f64> = order.iter().map(|&i| levels[i]).collect();

    // B at each sorted level, accumulated from gaps so that adding a constant
    // to the trend leaves it unchanged up to rounding of the gaps themselves.
    let mut segment = vec![0.0; n];
    let mut area = 0.0;
    for k in 1..=n {
        let head = (-rate * area).max(-800.0).exp();
        if k < n {
            let gap = sorted[k] - sorted[k - 1];
            let slope = k as f64;
            segment[k - 1] = head * -(-rate * slope * gap).exp_m1() / slope;
            area += slope * gap;
        } else {
            segment[k - 1] = head / n as f64;
        }
    }

    // Suffix sums, smallest terms first.
    let mut tail = vec![0.0; n];
    let mut acc = 0.0;
    for k in (0..n).rev() {
        acc += segment[k];
        tail[k] = acc;
    }

    let mut mass = vec![0.0; n];
    let mut rank = 0;
    for (pos, &idx) in order.iter().enumerate() {
        // Tied levels share the integral's lower limit.
        if pos == 0 || sorted[pos] != sorted[pos - 1] {
            rank = pos;
        }
        let m = tail[rank];
        mass[idx] = if m < MASS_FLOOR { 0.0 } else { m.min(1.0) };
    }

    LocationDistribution::new(trend.window(), mass)
}

/// Running sum of the mass in index order.
pub fn cumulative(dist: &LocationDistribution) -> Vec<f64> {
    dist.mass()
        .iter()
        .scan(0.0, |acc, &m| {
            *acc += m;
            Some(*acc)
        })
        .collect()
}

/// `Σ_s s · P(τ = s)` over absolute indices.
pub fn distribution_expectation(dist: &LocationDistribution) -> f64 {
    dist.iter().map(|(s, m)| s as f64 * m).sum()
}

/// Smallest index `s` with `CDF(s) ≥ p`.
pub fn distribution_quantile(dist: &LocationDistribution, p: f64) -> Result<i64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    let window = dist.window();
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &m) in dist.mass().iter().enumerate() {
        acc += m;
        if m > 0.0 {
            last_positive = i;
        }
        if acc >= p {
            return Ok(window.index_at(i));
        }
    }
    // Rounding left the total just under p.
    Ok(window.index_at(last_positive))
}

/// Equal-tailed interval `[q(α/2), q(1 - α/2)]` with `α = 1 - level`.
pub fn confidence_interval(dist: &LocationDistribution, level: f64) -> Result<ConfidenceInterval> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::ProbabilityOutOfRange(level));
    }
    let alpha = 1.0 - level;
    let left = distribution_quantile(dist, alpha / 2.0)?;
    let right = distribution_quantile(dist, 1.0 - alpha / 2.0)?;
    ConfidenceInterval::new(dist.window(), left, right, level)
}

impl LocationDistribution {
    pub fn expectation(&self) -> f64 {
        distribution_expectation(self)
    }

    pub fn quantile(&self, p: f64) -> Result<i64> {
        distribution_quantile(self, p)
    }

    pub fn confidence_interval(&self, level: f64) -> Result<ConfidenceInterval> {
        confidence_interval(self, level)
    }

    pub fn cdf(&self) -> Vec<f64> {
        cumulative(self)
    }
}
