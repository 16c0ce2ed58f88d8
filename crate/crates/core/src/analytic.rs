//! Parametric trends and closed-form results for the argmin location.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{IndexWindow, LocationDistribution, TrendSequence};

fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::ParameterNotPositive { name, value })
    }
}

fn slope(value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::SlopeNotPositive(value))
    }
}

fn t0_inside(window: IndexWindow, t0: i64) -> Result<()> {
    if window.contains(t0) {
        Ok(())
    } else {
        Err(Error::T0OutOfWindow {
            t0,
            start: window.start(),
            end: window.end(),
        })
    }
}

/// V-shaped trend `-a(t - t0)` left of `t0` and `b(t - t0)` from `t0` on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLinearTrendSpec {
    pub left_slope: f64,
    pub right_slope: f64,
    pub t0: i64,
    pub window: IndexWindow,
}

impl PiecewiseLinearTrendSpec {
    pub fn new(left_slope: f64, right_slope: f64, t0: i64, window: IndexWindow) -> Result<Self> {
        let spec = Self {
            left_slope,
            right_slope,
            t0,
            window,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// `t0 = 500`, `a = 1/300`, `b = 1/100` on `1..=1000`.
    pub fn reference() -> Self {
        Self {
            left_slope: 1.0 / 300.0,
            right_slope: 1.0 / 100.0,
            t0: 500,
            window: IndexWindow::new(1, 1000).expect("static window"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        slope(self.left_slope)?;
        slope(self.right_slope)?;
        t0_inside(self.window, self.t0)
    }

    pub fn level(&self, t: i64) -> f64 {
        let d = (t - self.t0) as f64;
        if t < self.t0 {
            -self.left_slope * d
        } else {
            self.right_slope * d
        }
    }
}

/// Saturating exponential trend:
/// `L(e^{-a(t - t0)} - 1)` left of `t0`, `R(1 - e^{-b(t - t0)})` from `t0` on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentialTrendSpec {
    pub left_rate: f64,
    pub right_rate: f64,
    pub left_amplitude: f64,
    pub right_amplitude: f64,
    pub t0: i64,
    pub window: IndexWindow,
}

impl ExponentialTrendSpec {
    pub const DEFAULT_LEFT_AMPLITUDE: f64 = 2.0;
    pub const DEFAULT_RIGHT_AMPLITUDE: f64 = 4.0;

    pub fn new(
        left_rate: f64,
        right_rate: f64,
        left_amplitude: f64,
        right_amplitude: f64,
        t0: i64,
        window: IndexWindow,
    ) -> Result<Self> {
        let spec = Self {
            left_rate,
            right_rate,
            left_amplitude,
            right_amplitude,
            t0,
            window,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// `t0 = 500`, `a = 1/500`, `b = 1/100`, amplitudes 2 and 4, on `1..=1000`.
    pub fn reference() -> Self {
        Self {
            left_rate: 1.0 / 500.0,
            right_rate: 1.0 / 100.0,
            left_amplitude: Self::DEFAULT_LEFT_AMPLITUDE,
            right_amplitude: Self::DEFAULT_RIGHT_AMPLITUDE,
            t0: 500,
            window: IndexWindow::new(1, 1000).expect("static window"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for rate in [self.left_rate, self.right_rate] {
            if !(rate.is_finite() && rate > 0.0) {
                return Err(Error::RateNotPositive(rate));
            }
        }
        positive("left_amplitude", self.left_amplitude)?;
        positive("right_amplitude", self.right_amplitude)?;
        t0_inside(self.window, self.t0)
    }

    pub fn level(&self, t: i64) -> f64 {
        let d = (t - self.t0) as f64;
        if t < self.t0 {
            self.left_amplitude * (-self.left_rate * d).exp_m1()
        } else {
            -self.right_amplitude * (-self.right_rate * d).exp_m1()
        }
    }
}

/// `T_t = a|t|` on a window containing 0.
pub fn build_linear_symmetric(a: f64, window: IndexWindow) -> Result<TrendSequence> {
    slope(a)?;
    if !window.contains(0) {
        return Err(Error::WindowExcludesZero {
            start: window.start(),
            end: window.end(),
        });
    }
    TrendSequence::new(window, window.indices().map(|t| a * t.abs() as f64).collect())
}

pub fn build_linear_asymmetric(spec: &PiecewiseLinearTrendSpec) -> Result<TrendSequence> {
    spec.validate()?;
    TrendSequence::new(
        spec.window,
        spec.window.indices().map(|t| spec.level(t)).collect(),
    )
}

pub fn build_exponential(spec: &ExponentialTrendSpec) -> Result<TrendSequence> {
    spec.validate()?;
    TrendSequence::new(
        spec.window,
        spec.window.indices().map(|t| spec.level(t)).collect(),
    )
}

/// Large-window approximation of `E(τ)` for the V trend with left slope `a`
/// and right slope `b` (minimum at 0):
///
/// ```text
/// E(τ) = -(√(2π) / √λ) · (b - a) / √(ab(a + b))
/// ```
///
/// Negative when `a < b`: the mean location leans towards the flatter side.
pub fn asymmetric_bias(a: f64, b: f64, rate: f64) -> Result<f64> {
    let a = positive("a", a)?;
    let b = positive("b", b)?;
    let rate = positive("lambda", rate)?;
    Ok(-((2.0 * PI).sqrt() / rate.sqrt()) * (b - a) / (a * b * (a + b)).sqrt())
}

/// Positive exponents `α_t` of a family with survival functions `G(y)^{α_t}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProportionalFamily {
    window: IndexWindow,
    alphas: Vec<f64>,
}

impl ProportionalFamily {
    pub fn new(window: IndexWindow, alphas: Vec<f64>) -> Result<Self> {
        if alphas.len() != window.len() {
            return Err(Error::LengthMismatch {
                expected: window.len(),
                found: alphas.len(),
            });
        }
        if let Some((i, &a)) = alphas
            .iter()
            .enumerate()
            .find(|(_, a)| !(a.is_finite() && **a > 0.0))
        {
            return Err(Error::AlphaNotPositive {
                index: window.index_at(i),
                value: a,
            });
        }
        Ok(Self { window, alphas })
    }

    pub fn window(&self) -> IndexWindow {
        self.window
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    /// `G(y)^{α_t}` for the exponential base `G(y) = e^{-y}`, `y ≥ 0`.
    pub fn exponential_survival(&self, offset: usize, y: f64) -> f64 {
        (-self.alphas[offset] * y.max(0.0)).exp()
    }
}

/// `P(τ = s) = α_s / Σ_t α_t`.
pub fn proportional_argmin_distribution(family: &ProportionalFamily) -> Result<LocationDistribution> {
    let total: f64 = family.alphas.iter().sum();
    LocationDistribution::new(family.window, family.alphas.iter().map(|a| a / total).collect())
}

/// Strictly increasing levels: sufficient for shifted exponentials with a
/// common rate to be stochastically increasing.
pub fn is_stochastically_increasing(trend: &TrendSequence) -> bool {
    trend.levels().windows(2).all(|w| w[0] < w[1])
}
