//! Domain types shared by every stage of the pipeline.
//!
//! All types validate on construction and are immutable afterwards. Series,
//! trends and distributions carry an explicit [`IndexWindow`]; element `i` of
//! any sequence corresponds to the absolute index `window.start() + i`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A contiguous, inclusive range of integer time indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawWindow", into = "RawWindow")]
pub struct IndexWindow {
    start: i64,
    end: i64,
}

#[derive(Serialize, Deserialize)]
struct RawWindow {
    start: i64,
    end: i64,
}

impl TryFrom<RawWindow> for IndexWindow {
    type Error = Error;

    fn try_from(raw: RawWindow) -> Result<Self> {
        IndexWindow::new(raw.start, raw.end)
    }
}

impl From<IndexWindow> for RawWindow {
    fn from(w: IndexWindow) -> Self {
        RawWindow {
            start: w.start,
            end: w.end,
        }
    }
}

impl IndexWindow {
    pub fn new(start: i64, end: i64) -> Result<Self> {
        if end <= start {
            return Err(Error::InvalidWindow { start, end });
        }
        Ok(Self { start, end })
    }

    /// Window `[start, start + len - 1]`.
    pub fn with_len(start: i64, len: usize) -> Result<Self> {
        if len < 2 {
            return Err(Error::InvalidWindow {
                start,
                end: start + len as i64 - 1,
            });
        }
        Self::new(start, start + len as i64 - 1)
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn end(&self) -> i64 {
        self.end
    }

    pub fn len(&self) -> usize {
        (self.end - self.start + 1) as usize
    }

    /// Always false: a window holds at least two indices.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, index: i64) -> bool {
        (self.start..=self.end).contains(&index)
    }

    /// Absolute index of the `offset`-th element.
    pub fn index_at(&self, offset: usize) -> i64 {
        self.start + offset as i64
    }

    /// Position of `index` inside the window, if it belongs to it.
    pub fn offset_of(&self, index: i64) -> Option<usize> {
        self.contains(index).then(|| (index - self.start) as usize)
    }

    pub fn indices(&self) -> impl DoubleEndedIterator<Item = i64> {
        self.start..=self.end
    }
}

fn check_values(window: &IndexWindow, values: &[f64]) -> Result<()> {
    if values.len() != window.len() {
        return Err(Error::LengthMismatch {
            expected: window.len(),
            found: values.len(),
        });
    }
    if let Some((i, &v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite {
            index: window.index_at(i),
            value: v,
        });
    }
    Ok(())
}

/// Observed values `Y_t` over an index window.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    window: IndexWindow,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(window: IndexWindow, values: Vec<f64>) -> Result<Self> {
        check_values(&window, &values)?;
        Ok(Self { window, values })
    }

    /// Series on the window `1..=values.len()`.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        let window = IndexWindow::with_len(1, values.len())?;
        Self::new(window, values)
    }

    pub fn window(&self) -> IndexWindow {
        self.window
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(index, value)` pairs in index order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.window.indices().zip(self.values.iter().copied())
    }

    /// Series with every value multiplied by -1. Turns a maximum-location
    /// problem into a minimum-location one.
    pub fn negated(&self) -> Self {
        Self {
            window: self.window,
            values: self.values.iter().map(|v| -v).collect(),
        }
    }
}

/// Deterministic location parameters `T_t` (or their estimates).
#[derive(Debug, Clone, PartialEq)]
pub struct TrendSequence {
    window: IndexWindow,
    levels: Vec<f64>,
}

impl TrendSequence {
    pub fn new(window: IndexWindow, levels: Vec<f64>) -> Result<Self> {
        check_values(&window, &levels)?;
        Ok(Self { window, levels })
    }

    /// Trend on the window `1..=levels.len()`.
    pub fn from_levels(levels: Vec<f64>) -> Result<Self> {
        let window = IndexWindow::with_len(1, levels.len())?;
        Self::new(window, levels)
    }

    pub fn window(&self) -> IndexWindow {
        self.window
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.window.indices().zip(self.levels.iter().copied())
    }

    /// First index attaining the smallest level.
    pub fn argmin(&self) -> i64 {
        let mut best = 0;
        for (i, &v) in self.levels.iter().enumerate().skip(1) {
            if v < self.levels[best] {
                best = i;
            }
        }
        self.window.index_at(best)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.window, self.levels.iter().map(|&v| f(v)).collect())
    }

    /// Same levels in reverse index order, on the same window.
    pub fn reversed(&self) -> Self {
        let mut levels = self.levels.clone();
        levels.reverse();
        Self {
            window: self.window,
            levels,
        }
    }
}

/// i.i.d. exponential noise with rate `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    rate: f64,
}

impl NoiseModel {
    pub fn new(rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::RateNotPositive(rate));
        }
        Ok(Self { rate })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn mean(&self) -> f64 {
        1.0 / self.rate
    }
}

/// Tolerance on the total mass of a [`LocationDistribution`].
pub const MASS_TOLERANCE: f64 = 1e-9;

/// Discrete law of the minimum location over an index window.
#[derive(Debug, Clone, PartialEq)]
pub struct LocationDistribution {
    window: IndexWindow,
    mass: Vec<f64>,
}

impl LocationDistribution {
    pub fn new(window: IndexWindow, mass: Vec<f64>) -> Result<Self> {
        check_values(&window, &mass)?;
        if let Some((i, m)) = mass.iter().enumerate().find(|(_, &m)| !(0.0..=1.0).contains(&m)) {
            return Err(Error::InvalidMass(format!(
                "mass {m} at index {} outside [0, 1]",
                window.index_at(i)
            )));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidMass(format!("total mass {total} != 1")));
        }
        Ok(Self { window, mass })
    }

    /// All mass on `index`.
    pub fn point_mass(window: IndexWindow, index: i64) -> Result<Self> {
        let offset = window.offset_of(index).ok_or(Error::T0OutOfWindow {
            t0: index,
            start: window.start(),
            end: window.end(),
        })?;
        let mut mass = vec![0.0; window.len()];
        mass[offset] = 1.0;
        Ok(Self { window, mass })
    }

    pub fn uniform(window: IndexWindow) -> Self {
        let n = window.len();
        Self {
            window,
            mass: vec![1.0 / n as f64; n],
        }
    }

    pub fn window(&self) -> IndexWindow {
        self.window
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    /// Probability of `index`; zero outside the window.
    pub fn mass_at(&self, index: i64) -> f64 {
        self.window.offset_of(index).map_or(0.0, |i| self.mass[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.window.indices().zip(self.mass.iter().copied())
    }
}

/// Index interval `[left, right]` with its nominal coverage level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub left: i64,
    pub right: i64,
    pub level: f64,
}

impl ConfidenceInterval {
    pub fn new(window: IndexWindow, left: i64, right: i64, level: f64) -> Result<Self> {
        if !(level > 0.0 && level < 1.0) {
            return Err(Error::ProbabilityOutOfRange(level));
        }
        if !(window.start() <= left && left <= right && right <= window.end()) {
            return Err(Error::InvalidInterval {
                left,
                right,
                start: window.start(),
                end: window.end(),
            });
        }
        Ok(Self { left, right, level })
    }

    /// `right - left`, in index units.
    pub fn length(&self) -> i64 {
        self.right - self.left
    }

    pub fn contains(&self, index: i64) -> bool {
        (self.left..=self.right).contains(&index)
    }
}

/// Everything produced by one run of the estimation pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimationReport {
    pub tau_hat: i64,
    pub rate_hat: f64,
    pub bandwidth: usize,
    pub trend_hat: TrendSequence,
    pub distribution: LocationDistribution,
    pub interval: ConfidenceInterval,
}
